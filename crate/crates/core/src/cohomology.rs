//! Cohomology of rank-one reflexive sheaves through forbidden sets.
//!
//! For a torus-invariant divisor `D` and a character `m`, let
//! `I(D, m) = {ρ : ⟨m, u_ρ⟩ + D_ρ < 0}`. The degree-`m` piece of `H^i(X, O(D))`
//! has dimension `rank H̃_{i-1}(C_I)`, where `C_I` is the complex on `I` whose
//! faces are the sets `rays(σ) ∩ I`. Only the subsets `I` with nonzero reduced
//! homology contribute; those with `i >= 1` are the forbidden sets. `H^i(D)`
//! vanishes exactly when no character realizes a forbidden set for `i`, which
//! is a lattice-point question in the polytope
//!
//! `R_I(D) = {m : ⟨m, u_ρ⟩ <= -D_ρ - 1 for ρ ∈ I, ⟨m, u_ρ⟩ >= -D_ρ otherwise}`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{ReducedHomology, SimplicialComplex};
use crate::polyhedron::Polyhedron;
use crate::quiver::QuiverOfSections;
use crate::toric::{DivisorClass, Fan, ToricVariety};
use crate::{Int, IntMatrix};

/// The complex on `subset` whose faces are the intersections of `subset` with cones of the fan.
pub fn induced_complex(fan: &Fan, subset: &[usize]) -> SimplicialComplex {
    let faces = fan
        .max_cones()
        .iter()
        .map(|cone| cone.iter().copied().filter(|r| subset.contains(r)).collect::<Vec<_>>());
    SimplicialComplex::from_faces(subset.to_vec(), faces)
}

pub fn reduced_homology_ranks(k: &SimplicialComplex) -> BTreeMap<isize, usize> {
    k.reduced_homology().nonzero().into_iter().collect()
}

fn mask_to_set(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

/// Every subset (as a bitmask, including the empty set) with nonzero reduced
/// homology, in increasing mask order.
fn homology_table(x: &ToricVariety) -> &[(u64, Vec<usize>)] {
    x.caches.homology.get_or_init(|| {
        let n = x.num_rays();
        assert!(n < 64, "too many rays for subset enumeration");
        (0u64..(1u64 << n))
            .filter_map(|mask| {
                let h = induced_complex(x.fan(), &mask_to_set(mask)).reduced_homology();
                (!h.is_acyclic()).then(|| (mask, h.raw().to_vec()))
            })
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ForbiddenSet {
    pub rays: Vec<usize>,
    /// Cohomological degrees `i >= 1` with `H̃_{i-1}(C_I) != 0`.
    pub witness_degrees: Vec<usize>,
}

impl fmt::Display for ForbiddenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.rays.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", r.join(","))
    }
}

/// Forbidden sets keyed by cohomological degree, each list in increasing
/// bitmask order of the ray subsets.
pub fn forbidden_sets(x: &ToricVariety) -> BTreeMap<usize, Vec<ForbiddenSet>> {
    let mut out: BTreeMap<usize, Vec<ForbiddenSet>> = BTreeMap::new();
    for (mask, raw) in homology_table(x) {
        if *mask == 0 {
            continue;
        }
        let h = ReducedHomology::from_raw(raw.clone());
        let witness_degrees: Vec<usize> =
            h.nonzero().into_iter().filter(|&(deg, _)| deg >= 0).map(|(deg, _)| deg as usize + 1).collect();
        let set = ForbiddenSet { rays: mask_to_set(*mask), witness_degrees: witness_degrees.clone() };
        for i in witness_degrees {
            out.entry(i).or_default().push(set.clone());
        }
    }
    out
}

fn region(x: &ToricVariety, rays: &[usize], divisor: &[Int]) -> Polyhedron<Int> {
    let mut p = Polyhedron::new(x.dim());
    for (r, (u, d)) in x.fan().rays().iter().zip(divisor).enumerate() {
        if rays.contains(&r) {
            p.push(u.iter().map(|c| -c).collect(), d + 1);
        } else {
            p.push(u.clone(), -d.clone());
        }
    }
    p
}

fn region_points(x: &ToricVariety, rays: &[usize], divisor: &[Int]) -> Result<usize> {
    region(x, rays, divisor).count_lattice_points().map_err(|_| Error::UnboundedRegion(rays.to_vec()))
}

/// Does the non-vanishing region of `set` contain the class `d`?
pub fn nonvanishing_region_contains(x: &ToricVariety, set: &ForbiddenSet, d: &DivisorClass) -> Result<bool> {
    let divisor = x.lift(d)?;
    region(x, &set.rays, &divisor).has_lattice_point().map_err(|_| Error::UnboundedRegion(set.rays.clone()))
}

/// `{v ∈ Cl(X) ⊗ Q : H v <= w}`, the image under `deg` of the rational
/// relaxation of the divisors that are negative exactly on a forbidden set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectedCone {
    pub rays: Vec<usize>,
    pub w: Vec<Int>,
    pub h: IntMatrix,
}

impl ProjectedCone {
    pub fn contains(&self, v: &DivisorClass) -> bool {
        self.h.mul_vec(&v.0).iter().zip(&self.w).all(|(a, b)| a <= b)
    }

    pub fn to_json_value(&self) -> Result<ProjectedConeJson> {
        Ok(ProjectedConeJson {
            rays: self.rays.clone(),
            w: crate::toric::to_i64_vec(&self.w)?,
            h: crate::toric::to_i64_rows(&self.h)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectedConeJson {
    #[serde(rename = "I")]
    pub rays: Vec<usize>,
    pub w: Vec<i64>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<i64>>,
}

/// Projects the raw cone of `set` to the class group by Fourier–Motzkin
/// elimination of the character directions, then drops redundant rows.
pub fn projected_cone(x: &ToricVariety, set: &ForbiddenSet) -> ProjectedCone {
    let r = x.cl_rank();
    let n = x.dim();
    let section = x.section();
    let mut p = Polyhedron::new(r + n);
    for (rho, u) in x.fan().rays().iter().enumerate() {
        // a_ρ = section_ρ · v + ⟨m, u_ρ⟩
        let mut normal: Vec<Int> = section.row(rho).to_vec();
        normal.extend(u.iter().cloned());
        if set.rays.contains(&rho) {
            p.push(normal.into_iter().map(|c| -c).collect(), Int::from(1));
        } else {
            p.push(normal, Int::zero());
        }
    }
    let projected = p.eliminate_all(&(r..r + n).collect::<Vec<_>>());
    let mut rows: Vec<(Vec<Int>, Int)> =
        projected.inequalities().iter().map(|i| (i.normal[..r].to_vec(), i.offset.clone())).collect();
    rows.sort();
    let mut k = 0;
    while k < rows.len() {
        let mut others = Polyhedron::new(r);
        for (j, (a, b)) in rows.iter().enumerate() {
            if j != k {
                others.push(a.clone(), b.clone());
            }
        }
        // a·v >= b is implied iff max(-a·v) over the others is <= -b
        let neg: Vec<Int> = rows[k].0.iter().map(|c| -c).collect();
        let redundant = match others.maximize(&neg) {
            Ok(Some(best)) => best <= num_rational::Ratio::from_integer(-rows[k].1.clone()),
            Ok(None) => true,
            Err(_) => false,
        };
        if redundant {
            rows.remove(k);
        } else {
            k += 1;
        }
    }
    let h = IntMatrix::from_rows(rows.iter().map(|(a, _)| a.iter().map(|c| -c).collect()).collect(), r);
    let w = rows.iter().map(|(_, b)| -b.clone()).collect();
    ProjectedCone { rays: set.rays.clone(), w, h }
}

/// Does `H^i(X, O(d))` vanish for every `i >= 1`?
pub fn higher_cohomology_vanishes(x: &ToricVariety, d: &DivisorClass) -> Result<bool> {
    let divisor = x.lift(d)?;
    for (mask, raw) in homology_table(x) {
        // skip the empty set and subsets whose only homology is in degree -1
        if *mask == 0 || raw.iter().skip(1).all(Zero::is_zero) {
            continue;
        }
        let rays = mask_to_set(*mask);
        if region(x, &rays, &divisor).has_lattice_point().map_err(|_| Error::UnboundedRegion(rays.clone()))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Vanishing of higher cohomology for all `v_i - v_j + m·(-K)`, `0 <= m <= twist`.
pub fn do_higher_self_exts_vanish_classes(x: &ToricVariety, classes: &[DivisorClass], twist: u32) -> Result<bool> {
    let anti = x.anticanonical_class();
    for a in classes {
        for b in classes {
            let diff = a.sub(b);
            for m in 0..=twist {
                if !higher_cohomology_vanishes(x, &diff.add(&anti.scale(m as i64)))? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Are the higher Ext groups between all vertices of `q` zero?
pub fn do_higher_self_exts_vanish(q: &QuiverOfSections) -> Result<bool> {
    do_higher_self_exts_vanish_classes(q.variety(), q.vertices(), 0)
}

/// As [`do_higher_self_exts_vanish`], also for twists by `ω^{-m}`, `m <= p`.
pub fn do_higher_self_exts_vanish_twisted(q: &QuiverOfSections, p: u32) -> Result<bool> {
    do_higher_self_exts_vanish_classes(q.variety(), q.vertices(), p)
}

/// `h^0, ..., h^n` of `O(D)` for a torus-invariant divisor `D`, by summing
/// homology ranks over the lattice points of every region `R_I(D)`.
pub fn cohomology_oracle(x: &ToricVariety, divisor: &[Int]) -> Result<Vec<usize>> {
    if divisor.len() != x.num_rays() {
        return Err(Error::LengthMismatch { expected: x.num_rays(), got: divisor.len() });
    }
    let n = x.dim();
    let mut h = vec![0usize; n + 1];
    for (mask, raw) in homology_table(x) {
        let rays = mask_to_set(*mask);
        let mut points = None;
        for (k, &rank) in raw.iter().enumerate() {
            // raw[k] is the rank in degree k - 1, contributing to H^k
            if rank == 0 || k > n {
                continue;
            }
            let count = match points {
                Some(c) => c,
                None => *points.insert(region_points(x, &rays, divisor)?),
            };
            h[k] += rank * count;
        }
    }
    Ok(h)
}

/// Oracle on a class, via its canonical lift.
pub fn cohomology_oracle_class(x: &ToricVariety, d: &DivisorClass) -> Result<Vec<usize>> {
    cohomology_oracle(x, &x.lift(d)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenJson {
    pub i: usize,
    pub sets: Vec<Vec<usize>>,
}

pub fn forbidden_sets_json(x: &ToricVariety) -> Vec<ForbiddenJson> {
    forbidden_sets(x)
        .into_iter()
        .map(|(i, sets)| ForbiddenJson { i, sets: sets.into_iter().map(|s| s.rays).collect() })
        .collect()
}
