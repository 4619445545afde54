//! Torus-invariant curves on smooth complete toric varieties and nef tests.
//!
//! Each wall `τ = σ ∩ σ'` between two adjacent maximal cones gives a
//! torus-invariant curve `V(τ)`. Writing `u_a`, `u_b` for the two rays off the
//! wall, smoothness gives a unique integral relation
//! `u_a + u_b + Σ_{ρ ∈ τ} c_ρ u_ρ = 0` and then
//! `D · V(τ) = D_a + D_b + Σ c_ρ D_ρ`.
//!
//! A class is nef iff it meets every such curve nonnegatively. When all
//! `L_i ⊗ L_j^{-1} ⊗ ω^{-n}` are nef, Demazure vanishing kills their higher
//! cohomology, which is what makes [`bundles_nef_check`] a useful stopping
//! criterion for the twisted vanishing checks.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::lattice::solve_integer;
use crate::quiver::QuiverOfSections;
use crate::toric::{DivisorClass, ToricVariety};
use crate::{Int, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    /// Rays of the codimension-one cone, sorted.
    pub rays: Vec<usize>,
    /// Indices of the two adjacent maximal cones.
    pub cones: (usize, usize),
    /// The ray of each adjacent cone that is not on the wall.
    pub off_wall: (usize, usize),
    /// `c_ρ` for each wall ray, in the order of `rays`.
    pub coefficients: Vec<Int>,
}

impl Wall {
    /// Coefficient vector over all rays: 1 at the off-wall rays, `c_ρ` on the wall.
    pub fn relation(&self, num_rays: usize) -> Vec<Int> {
        let mut r = vec![Int::from(0); num_rays];
        r[self.off_wall.0] = Int::from(1);
        r[self.off_wall.1] = Int::from(1);
        for (&i, c) in self.rays.iter().zip(&self.coefficients) {
            r[i] = c.clone();
        }
        r
    }
}

pub fn walls(x: &ToricVariety) -> Result<&[Wall]> {
    if let Some(w) = x.caches.walls.get() {
        return Ok(w);
    }
    if !x.fan().is_smooth() {
        return Err(Error::NotSmooth);
    }
    let computed = compute_walls(x);
    Ok(x.caches.walls.get_or_init(|| computed))
}

fn compute_walls(x: &ToricVariety) -> Vec<Wall> {
    let fan = x.fan();
    let n = fan.dim();
    let cones = fan.max_cones();
    let mut out = Vec::new();
    for k in 0..cones.len() {
        for l in k + 1..cones.len() {
            let shared: Vec<usize> = cones[k].iter().copied().filter(|i| cones[l].contains(i)).collect();
            if shared.len() + 1 != n {
                continue;
            }
            let a = *cones[k].iter().find(|i| !shared.contains(i)).expect("simplicial cone");
            let b = *cones[l].iter().find(|i| !shared.contains(i)).expect("simplicial cone");
            let columns: Vec<Vec<Int>> = shared.iter().map(|&i| fan.rays()[i].clone()).collect();
            let m = IntMatrix::from_columns(&columns, n);
            let rhs: Vec<Int> = fan.rays()[a].iter().zip(&fan.rays()[b]).map(|(p, q)| -(p + q)).collect();
            let coefficients = solve_integer(&m, &rhs).expect("smooth fan has integral wall relations");
            out.push(Wall { rays: shared, cones: (k, l), off_wall: (a, b), coefficients });
        }
    }
    out.sort_by(|p, q| p.rays.cmp(&q.rays).then(p.cones.cmp(&q.cones)));
    out
}

/// Intersection of a torus-invariant divisor with the curve of `wall`.
pub fn intersection_number(divisor: &[Int], wall: &Wall) -> Int {
    let mut total = &divisor[wall.off_wall.0] + &divisor[wall.off_wall.1];
    for (&i, c) in wall.rays.iter().zip(&wall.coefficients) {
        total += c * &divisor[i];
    }
    total
}

pub fn is_nef(x: &ToricVariety, d: &DivisorClass) -> Result<bool> {
    let divisor = x.lift(d)?;
    Ok(walls(x)?.iter().all(|w| !intersection_number(&divisor, w).is_negative()))
}

/// Is `L_i ⊗ L_j^{-1} ⊗ ω^{-n}` nef for every ordered pair of classes?
pub fn bundles_nef_check_classes(x: &ToricVariety, classes: &[DivisorClass], n: u32) -> Result<bool> {
    let twist = x.anticanonical_class().scale(n as i64);
    for a in classes {
        for b in classes {
            if !is_nef(x, &a.sub(b).add(&twist))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn bundles_nef_check(q: &QuiverOfSections, n: u32) -> Result<bool> {
    bundles_nef_check_classes(q.variety(), q.vertices(), n)
}
