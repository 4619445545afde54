//! Graded pieces of the Cox ring: monomial bases of `Hom(L_i, L_j)`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::polyhedron::Polyhedron;
use crate::toric::{DivisorClass, ToricVariety};
use crate::Int;

/// A monomial in the Cox ring, one exponent per ray.
///
/// Ordered by graded reverse lexicographic order with `x_0 > x_1 > ...`;
/// bases are always listed from the largest monomial down.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u64>);

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn variable(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Torus-invariant divisor of zeros of the monomial.
    pub fn as_divisor(&self) -> Vec<Int> {
        self.0.iter().map(|&e| Int::from(e)).collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree().cmp(&other.total_degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0).rev() {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => write!(f, "x_{i}")?,
                _ => write!(f, "x_{i}^{e}")?,
            }
        }
        Ok(())
    }
}

/// Integer points `m` of `{m : ⟨m, u_ρ⟩ >= -D_ρ}`.
pub(crate) fn section_polytope(x: &ToricVariety, divisor: &[Int]) -> Polyhedron<Int> {
    let mut p = Polyhedron::new(x.dim());
    for (ray, d) in x.fan().rays().iter().zip(divisor) {
        p.push(ray.clone(), -d.clone());
    }
    p
}

/// Monomial basis of the Cox ring in multidegree `d`, largest first.
pub fn hom_basis(x: &ToricVariety, d: &DivisorClass) -> Result<Vec<Monomial>> {
    let divisor = x.lift(d)?;
    let points = section_polytope(x, &divisor).lattice_points().map_err(|_| Error::NotComplete)?;
    let mut basis: Vec<Monomial> = points
        .iter()
        .map(|m| {
            Monomial(
                x.fan()
                    .rays()
                    .iter()
                    .zip(&divisor)
                    .map(|(u, dr)| {
                        let e = crate::toric::dot(m, u) + dr;
                        e.to_u64().expect("exponent is nonnegative")
                    })
                    .collect(),
            )
        })
        .collect();
    basis.sort_by(|a, b| b.cmp(a));
    Ok(basis)
}

pub fn hom_dimension(x: &ToricVariety, d: &DivisorClass) -> Result<usize> {
    let divisor = x.lift(d)?;
    section_polytope(x, &divisor).count_lattice_points().map_err(|_| Error::NotComplete)
}
