//! Rational polyhedra `{x : a_k · x >= b_k}` with integral data.
//!
//! Projection is exact Fourier–Motzkin elimination; lattice points are
//! found by computing the exact bounding box of the polytope (the projection
//! onto every coordinate axis) and filtering the box against the
//! inequalities.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_rational::Ratio;
use num_traits::Zero;

use crate::scalar::{gcd_all, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> Inequality<T> {
    pub fn new(normal: Vec<T>, offset: T) -> Self {
        let mut ineq = Inequality { normal, offset };
        ineq.normalize();
        ineq
    }

    /// Divides through by the gcd of all entries; the rational solution
    /// set is unchanged.
    fn normalize(&mut self) {
        let g = gcd_all(&self.normal).gcd(&self.offset);
        if !g.is_zero() && !g.is_one() {
            for v in &mut self.normal {
                *v = v.clone() / g.clone();
            }
            self.offset = self.offset.clone() / g;
        }
    }

    pub fn is_satisfied_by(&self, x: &[T]) -> bool {
        dot(&self.normal, x) >= self.offset
    }

    fn is_trivial(&self) -> bool {
        self.normal.iter().all(Zero::is_zero)
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Exact rational range of one coordinate over a polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Range<T: Clone + num_integer::Integer> {
    Empty,
    Interval { lower: Option<Ratio<T>>, upper: Option<Ratio<T>> },
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
#[error("polyhedron is unbounded")]
pub struct Unbounded;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron<T> {
    dim: usize,
    ineqs: Vec<Inequality<T>>,
    infeasible: bool,
}

impl<T: Scalar> Polyhedron<T> {
    pub fn new(dim: usize) -> Self {
        Polyhedron { dim, ineqs: Vec::new(), infeasible: false }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Inequality<T>] {
        &self.ineqs
    }

    /// Adds `normal · x >= offset`.
    pub fn push(&mut self, normal: Vec<T>, offset: T) {
        assert_eq!(normal.len(), self.dim, "inequality has wrong dimension");
        let ineq = Inequality::new(normal, offset);
        if ineq.is_trivial() {
            if ineq.offset.is_positive() {
                self.infeasible = true;
            }
            return;
        }
        self.ineqs.push(ineq);
    }

    pub fn contains(&self, x: &[T]) -> bool {
        !self.infeasible && self.ineqs.iter().all(|i| i.is_satisfied_by(x))
    }

    /// Fourier–Motzkin elimination of one variable. The variable stays in the
    /// ambient space with coefficient zero everywhere.
    pub fn eliminate(&self, var: usize) -> Self {
        let mut out = Polyhedron::new(self.dim);
        out.infeasible = self.infeasible;
        if self.infeasible {
            return out;
        }
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut kept: HashMap<Vec<T>, T> = HashMap::new();
        let mut keep = |ineq: Inequality<T>, out: &mut Polyhedron<T>| {
            if ineq.is_trivial() {
                if ineq.offset.is_positive() {
                    out.infeasible = true;
                }
                return;
            }
            kept.entry(ineq.normal)
                .and_modify(|b| {
                    if ineq.offset > *b {
                        *b = ineq.offset.clone();
                    }
                })
                .or_insert(ineq.offset);
        };
        for ineq in &self.ineqs {
            match ineq.normal[var].cmp(&T::zero()) {
                Ordering::Greater => lower.push(ineq),
                Ordering::Less => upper.push(ineq),
                Ordering::Equal => keep(ineq.clone(), &mut out),
            }
        }
        for lo in &lower {
            for up in &upper {
                let a = -up.normal[var].clone();
                let b = lo.normal[var].clone();
                let normal =
                    lo.normal.iter().zip(&up.normal).map(|(x, y)| a.clone() * x.clone() + b.clone() * y.clone()).collect();
                let offset = a * lo.offset.clone() + b * up.offset.clone();
                keep(Inequality::new(normal, offset), &mut out);
            }
        }
        let mut ineqs: Vec<_> = kept.into_iter().map(|(normal, offset)| Inequality { normal, offset }).collect();
        ineqs.sort_by(|x, y| x.normal.cmp(&y.normal).then(x.offset.cmp(&y.offset)));
        out.ineqs = ineqs;
        out
    }

    pub fn eliminate_all(&self, vars: &[usize]) -> Self {
        vars.iter().fold(self.clone(), |p, &v| p.eliminate(v))
    }

    /// Rationally empty?
    pub fn is_empty(&self) -> bool {
        let all: Vec<usize> = (0..self.dim).collect();
        self.eliminate_all(&all).infeasible
    }

    pub fn range(&self, var: usize) -> Range<T> {
        let others: Vec<usize> = (0..self.dim).filter(|&v| v != var).collect();
        let line = self.eliminate_all(&others);
        if line.infeasible {
            return Range::Empty;
        }
        let mut lower: Option<Ratio<T>> = None;
        let mut upper: Option<Ratio<T>> = None;
        for ineq in &line.ineqs {
            let a = ineq.normal[var].clone();
            let bound = Ratio::new(ineq.offset.clone(), a.clone());
            if a.is_positive() {
                if lower.as_ref().map_or(true, |l| bound > *l) {
                    lower = Some(bound);
                }
            } else if upper.as_ref().map_or(true, |u| bound < *u) {
                upper = Some(bound);
            }
        }
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if l > u {
                return Range::Empty;
            }
        }
        Range::Interval { lower, upper }
    }

    /// Integer bounding box, `Ok(None)` if it contains no integer point.
    pub fn integer_box(&self) -> Result<Option<Vec<(T, T)>>, Unbounded> {
        let mut bounds = Vec::with_capacity(self.dim);
        let mut empty = false;
        for var in 0..self.dim {
            match self.range(var) {
                Range::Empty => empty = true,
                Range::Interval { lower: Some(l), upper: Some(u) } => {
                    let lo = l.ceil().to_integer();
                    let hi = u.floor().to_integer();
                    if lo > hi {
                        empty = true;
                    }
                    bounds.push((lo, hi));
                }
                Range::Interval { .. } => return Err(Unbounded),
            }
        }
        Ok(if empty || self.infeasible { None } else { Some(bounds) })
    }

    /// All integer points, in lexicographic order.
    pub fn lattice_points(&self) -> Result<Vec<Vec<T>>, Unbounded> {
        let mut out = Vec::new();
        self.scan(|p| {
            out.push(p.to_vec());
            true
        })?;
        Ok(out)
    }

    pub fn count_lattice_points(&self) -> Result<usize, Unbounded> {
        let mut n = 0;
        self.scan(|_| {
            n += 1;
            true
        })?;
        Ok(n)
    }

    pub fn has_lattice_point(&self) -> Result<bool, Unbounded> {
        let mut found = false;
        self.scan(|_| {
            found = true;
            false
        })?;
        Ok(found)
    }

    /// Visits box points that satisfy every inequality until `visit` returns false.
    fn scan(&self, mut visit: impl FnMut(&[T]) -> bool) -> Result<(), Unbounded> {
        let Some(bounds) = self.integer_box()? else {
            return Ok(());
        };
        if self.dim == 0 {
            visit(&[]);
            return Ok(());
        }
        let mut point: Vec<T> = bounds.iter().map(|(lo, _)| lo.clone()).collect();
        loop {
            if self.contains(&point) && !visit(&point) {
                return Ok(());
            }
            // odometer increment, last coordinate fastest
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                if point[k] < bounds[k].1 {
                    point[k] = point[k].clone() + T::one();
                    break;
                }
                point[k] = bounds[k].0.clone();
            }
        }
    }

    /// Supremum of `c · x`: `Err(Unbounded)` if unbounded above, `Ok(None)`
    /// if the polyhedron is empty.
    pub fn maximize(&self, c: &[T]) -> Result<Option<Ratio<T>>, Unbounded> {
        // Lift to (x, t) with t = c · x and project onto t.
        let n = self.dim;
        let mut lifted = Polyhedron::new(n + 1);
        lifted.infeasible = self.infeasible;
        for ineq in &self.ineqs {
            let mut normal = ineq.normal.clone();
            normal.push(T::zero());
            lifted.push(normal, ineq.offset.clone());
        }
        let mut up: Vec<T> = c.to_vec();
        up.push(-T::one());
        lifted.push(up.clone(), T::zero());
        lifted.push(up.into_iter().map(|v| -v).collect(), T::zero());
        match lifted.range(n) {
            Range::Empty => Ok(None),
            Range::Interval { upper: Some(u), .. } => Ok(Some(u)),
            Range::Interval { upper: None, .. } => Err(Unbounded),
        }
    }
}

impl<T: Scalar> Range<T> {
    pub fn is_bounded(&self) -> bool {
        match self {
            Range::Empty => true,
            Range::Interval { lower, upper } => lower.is_some() && upper.is_some(),
        }
    }
}
