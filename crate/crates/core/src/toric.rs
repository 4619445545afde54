//! Fans, complete toric varieties and their class groups.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{cokernel_projection, kernel_basis, rank, smith_normal_form, solve_integer};
use crate::scalar::gcd_all;
use crate::{Int, IntMatrix};

/// Rays and maximal cones of a fan. Ray order is significant: ray `i` is the
/// Cox variable `x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<Int>>,
    max_cones: Vec<Vec<usize>>,
}

impl Fan {
    pub fn new(dim: usize, rays: Vec<Vec<Int>>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidFan("ambient dimension must be positive".into()));
        }
        let mut seen = HashSet::new();
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::InvalidFan(format!("ray {i} has length {}, expected {dim}", r.len())));
            }
            let g = gcd_all(r);
            if g.is_zero() {
                return Err(Error::InvalidFan(format!("ray {i} is zero")));
            }
            if !g.is_one() {
                return Err(Error::InvalidFan(format!("ray {i} is not primitive")));
            }
            if !seen.insert(r.clone()) {
                return Err(Error::InvalidFan(format!("ray {i} is a duplicate")));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        let mut used = vec![false; rays.len()];
        let mut distinct = HashSet::new();
        for (k, cone) in max_cones.into_iter().enumerate() {
            let set: BTreeSet<usize> = cone.iter().copied().collect();
            if set.is_empty() || set.len() != cone.len() {
                return Err(Error::InvalidFan(format!("cone {k} is empty or repeats a ray")));
            }
            if let Some(&bad) = set.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("cone {k} refers to missing ray {bad}")));
            }
            for &i in &set {
                used[i] = true;
            }
            let sorted: Vec<usize> = set.into_iter().collect();
            if !distinct.insert(sorted.clone()) {
                return Err(Error::InvalidFan(format!("cone {k} is listed twice")));
            }
            cones.push(sorted);
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidFan(format!("ray {i} lies in no maximal cone")));
        }
        Ok(Fan { dim, rays, max_cones: cones })
    }

    pub fn from_i64(dim: usize, rays: &[Vec<i64>], max_cones: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(dim, rays.iter().map(|r| r.iter().map(|&v| Int::from(v)).collect()).collect(), max_cones)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<Int>] {
        &self.rays
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// `|Σ(1)| × n` matrix whose rows are the rays; as a map it is the
    /// inclusion `M -> Z^Σ(1)`, `m ↦ (⟨m, u_ρ⟩)_ρ`.
    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.rays.clone(), self.dim)
    }

    fn cone_matrix(&self, cone: &[usize]) -> IntMatrix {
        IntMatrix::from_rows(cone.iter().map(|&i| self.rays[i].clone()).collect(), self.dim)
    }

    /// Facets of a full-dimensional maximal cone, as sorted ray subsets with
    /// an inward normal.
    fn facets(&self, cone: &[usize]) -> Vec<(Vec<usize>, Vec<Int>)> {
        let n = self.dim;
        if n == 1 {
            return vec![(Vec::new(), self.rays[cone[0]].clone())];
        }
        let mut facets = BTreeMap::new();
        for subset in combinations(cone, n - 1) {
            let m = self.cone_matrix(&subset);
            if rank(&m) != n - 1 {
                continue;
            }
            let mut normal = kernel_basis(&m).column(0);
            let pairing: Vec<Int> = cone.iter().map(|&i| dot(&normal, &self.rays[i])).collect();
            if pairing.iter().all(|v| !v.is_positive()) {
                normal = normal.into_iter().map(|v| -v).collect();
            } else if pairing.iter().any(|v| v.is_negative()) {
                continue;
            }
            let face: Vec<usize> = cone.iter().zip(&pairing).filter(|(_, p)| p.is_zero()).map(|(&i, _)| i).collect();
            facets.insert(face, normal);
        }
        facets.into_iter().collect()
    }

    /// Support is all of `R^n`: every maximal cone is full-dimensional, every
    /// facet lies in exactly two maximal cones on opposite sides of it, the
    /// adjacency graph is connected, and a point inside the first cone lies
    /// in no other cone (so the cones cover the sphere of directions once).
    pub fn is_complete(&self) -> bool {
        if self.max_cones.iter().any(|c| rank(&self.cone_matrix(c)) != self.dim) {
            return false;
        }
        let facets: Vec<Vec<(Vec<usize>, Vec<Int>)>> = self.max_cones.iter().map(|c| self.facets(c)).collect();
        let mut owners: HashMap<&[usize], Vec<(usize, &[Int])>> = HashMap::new();
        for (k, fs) in facets.iter().enumerate() {
            for (f, normal) in fs {
                owners.entry(f.as_slice()).or_default().push((k, normal.as_slice()));
            }
        }
        let mut adjacency = vec![Vec::new(); self.max_cones.len()];
        for (face, o) in &owners {
            if o.len() != 2 {
                return false;
            }
            let ((k, normal), (l, _)) = (o[0], o[1]);
            let opposite = self.max_cones[l]
                .iter()
                .filter(|i| !face.contains(i))
                .all(|&i| dot(normal, &self.rays[i]).is_negative());
            if !opposite {
                return false;
            }
            adjacency[k].push(l);
            adjacency[l].push(k);
        }
        let mut reached = vec![false; self.max_cones.len()];
        let mut queue = VecDeque::from([0usize]);
        reached[0] = true;
        while let Some(k) = queue.pop_front() {
            for &l in &adjacency[k] {
                if !reached[l] {
                    reached[l] = true;
                    queue.push_back(l);
                }
            }
        }
        if !reached.into_iter().all(|r| r) {
            return false;
        }
        let inside: Vec<Int> =
            (0..self.dim).map(|j| self.max_cones[0].iter().map(|&i| self.rays[i][j].clone()).sum()).collect();
        facets[1..].iter().all(|fs| fs.iter().any(|(_, normal)| dot(normal, &inside).is_negative()))
    }

    pub fn is_simplicial(&self) -> bool {
        self.max_cones.iter().all(|c| rank(&self.cone_matrix(c)) == c.len())
    }

    /// Every maximal cone is generated by part of a lattice basis.
    pub fn is_smooth(&self) -> bool {
        self.max_cones.iter().all(|c| {
            let snf = smith_normal_form(&self.cone_matrix(c));
            let f = snf.invariant_factors();
            f.len() == c.len() && f.iter().all(One::is_one)
        })
    }
}

pub(crate) fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// An element of the class group, in the variety's chosen basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass(pub Vec<Int>);

impl DivisorClass {
    pub fn from_i64(v: &[i64]) -> Self {
        DivisorClass(v.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        DivisorClass(vec![Int::zero(); rank])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        DivisorClass(self.0.iter().map(|a| a * k).collect())
    }

    pub fn to_i64(&self) -> Result<Vec<i64>> {
        to_i64_vec(&self.0)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub(crate) fn to_i64_vec(v: &[Int]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or_else(|| Error::Overflow(x.to_string()))).collect()
}

pub(crate) fn to_i64_rows(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    m.row_vecs().iter().map(|r| to_i64_vec(r)).collect()
}

#[derive(Default, Debug)]
pub(crate) struct Caches {
    /// Ray subsets (bitmask) whose induced complex has nonzero reduced
    /// homology, with ranks indexed from degree −1.
    pub(crate) homology: OnceLock<Vec<(u64, Vec<usize>)>>,
    pub(crate) walls: OnceLock<Vec<crate::positivity::Wall>>,
}

impl Clone for Caches {
    fn clone(&self) -> Self {
        Caches { homology: self.homology.clone(), walls: self.walls.clone() }
    }
}

/// A complete toric variety with torsion-free class group and a fixed
/// basis of `Cl(X)`, given by the surjection `deg: Z^Σ(1) -> Cl(X)`.
#[derive(Clone, Debug)]
pub struct ToricVariety {
    fan: Fan,
    deg: IntMatrix,
    /// Right inverse of `deg`; `section · d` is a canonical lift of `d`.
    section: IntMatrix,
    pub(crate) caches: Caches,
}

impl PartialEq for ToricVariety {
    fn eq(&self, other: &Self) -> bool {
        self.fan == other.fan && self.deg == other.deg
    }
}

impl Eq for ToricVariety {}

impl ToricVariety {
    /// Validates `fan` and either adopts `deg` or derives the class group
    /// basis from the cokernel of the ray inclusion.
    pub fn new(fan: Fan, deg: Option<IntMatrix>) -> Result<Self> {
        if !fan.is_complete() {
            return Err(Error::NotComplete);
        }
        let coker = cokernel_projection(&fan.ray_matrix());
        if !coker.torsion.is_empty() {
            return Err(Error::TorsionClassGroup(coker.torsion.iter().map(|t| t.to_string()).collect()));
        }
        let deg = match deg {
            None => coker.proj,
            Some(deg) => {
                validate_deg(&fan, &deg, coker.rank)?;
                deg
            }
        };
        let r = deg.rows();
        let columns: Vec<Vec<Int>> = (0..r)
            .map(|k| {
                let mut e = vec![Int::zero(); r];
                e[k] = Int::one();
                solve_integer(&deg, &e).expect("deg is surjective")
            })
            .collect();
        let section = IntMatrix::from_columns(&columns, fan.num_rays());
        Ok(ToricVariety { fan, deg, section, caches: Caches::default() })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn dim(&self) -> usize {
        self.fan.dim
    }

    pub fn num_rays(&self) -> usize {
        self.fan.num_rays()
    }

    pub fn cl_rank(&self) -> usize {
        self.deg.rows()
    }

    pub fn deg(&self) -> &IntMatrix {
        &self.deg
    }

    pub fn section(&self) -> &IntMatrix {
        &self.section
    }

    pub fn from_wdiv_to_cl(&self, divisor: &[Int]) -> Result<DivisorClass> {
        if divisor.len() != self.num_rays() {
            return Err(Error::LengthMismatch { expected: self.num_rays(), got: divisor.len() });
        }
        Ok(DivisorClass(self.deg.mul_vec(divisor)))
    }

    pub fn check_class(&self, d: &DivisorClass) -> Result<()> {
        if d.len() != self.cl_rank() {
            return Err(Error::LengthMismatch { expected: self.cl_rank(), got: d.len() });
        }
        Ok(())
    }

    /// A torus-invariant divisor of class `d`.
    pub fn lift(&self, d: &DivisorClass) -> Result<Vec<Int>> {
        self.check_class(d)?;
        Ok(self.section.mul_vec(&d.0))
    }

    pub fn ray_class(&self, ray: usize) -> DivisorClass {
        DivisorClass(self.deg.column(ray))
    }

    pub fn anticanonical_class(&self) -> DivisorClass {
        DivisorClass((0..self.cl_rank()).map(|i| self.deg.row(i).iter().sum()).collect())
    }

    /// Cartier test: on every maximal cone the lift is given by a character.
    pub fn is_line_bundle(&self, d: &DivisorClass) -> Result<bool> {
        let divisor = self.lift(d)?;
        Ok(self.fan.max_cones.iter().all(|cone| {
            let a = self.fan.cone_matrix(cone);
            let rhs: Vec<Int> = cone.iter().map(|&i| -divisor[i].clone()).collect();
            solve_integer(&a, &rhs).is_some()
        }))
    }

    pub fn from_spec(spec: &FanSpec) -> Result<Self> {
        let fan = Fan::from_i64(spec.dim, &spec.rays, spec.max_cones.clone())?;
        let deg = match &spec.deg {
            Some(rows) => {
                let cols = fan.num_rays();
                if rows.iter().any(|r| r.len() != cols) {
                    return Err(Error::InvalidDegMatrix(format!("every row must have {cols} entries")));
                }
                Some(IntMatrix::from_rows(
                    rows.iter().map(|r| r.iter().map(|&v| Int::from(v)).collect()).collect(),
                    cols,
                ))
            }
            None => None,
        };
        Self::new(fan, deg)
    }

    pub fn to_spec(&self) -> Result<FanSpec> {
        Ok(FanSpec {
            dim: self.dim(),
            rays: self.fan.rays.iter().map(|r| to_i64_vec(r)).collect::<Result<_>>()?,
            max_cones: self.fan.max_cones.clone(),
            deg: Some(to_i64_rows(&self.deg)?),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: FanSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }
}

fn validate_deg(fan: &Fan, deg: &IntMatrix, expected_rank: usize) -> Result<()> {
    if deg.cols() != fan.num_rays() || deg.rows() != expected_rank {
        return Err(Error::InvalidDegMatrix(format!(
            "expected a {expected_rank}x{} matrix, got {}x{}",
            fan.num_rays(),
            deg.rows(),
            deg.cols()
        )));
    }
    if !(deg * &fan.ray_matrix()).is_zero() {
        return Err(Error::InvalidDegMatrix("deg does not vanish on the character lattice".into()));
    }
    let f = smith_normal_form(deg).invariant_factors();
    if f.len() != expected_rank || !f.iter().all(One::is_one) {
        return Err(Error::InvalidDegMatrix("deg is not surjective".into()));
    }
    Ok(())
}

/// JSON form of a fan: `{"dim", "rays", "max_cones", "deg"?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSpec {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deg: Option<Vec<Vec<i64>>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn p2() -> ToricVariety {
        let fan = Fan::from_i64(2, &[vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
            .unwrap();
        ToricVariety::new(fan, None).unwrap()
    }

    fn hexagon() -> Fan {
        let rays = [vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, 0], vec![-1, -1], vec![0, -1]];
        Fan::from_i64(2, &rays, (0..6).map(|i| vec![i, (i + 1) % 6]).collect()).unwrap()
    }

    #[test]
    fn projective_plane() {
        let x = p2();
        assert_eq!(x.cl_rank(), 1);
        assert_eq!(x.deg().row_vecs(), vec![vec![Int::from(1); 3]]);
        assert_eq!(x.anticanonical_class(), DivisorClass::from_i64(&[3]));
        assert_eq!(x.from_wdiv_to_cl(&[Int::from(1), Int::zero(), Int::zero()]).unwrap(), DivisorClass::from_i64(&[1]));
        assert!(x.fan().is_complete());
        assert!(x.fan().is_smooth());
    }

    #[test]
    fn hexagon_has_rank_four() {
        let x = ToricVariety::new(hexagon(), None).unwrap();
        assert_eq!(x.cl_rank(), 4);
        assert!(x.fan().is_smooth());
        let ones = vec![Int::one(); 6];
        assert_eq!(x.from_wdiv_to_cl(&ones).unwrap(), x.anticanonical_class());
    }

    #[test]
    fn rejects_bad_rays() {
        assert!(matches!(
            Fan::from_i64(2, &[vec![2, 0], vec![0, 1]], vec![vec![0, 1]]),
            Err(Error::InvalidFan(_))
        ));
        assert!(matches!(
            Fan::from_i64(2, &[vec![1, 0], vec![1, 0]], vec![vec![0], vec![1]]),
            Err(Error::InvalidFan(_))
        ));
        assert!(matches!(Fan::from_i64(2, &[vec![0, 0]], vec![vec![0]]), Err(Error::InvalidFan(_))));
    }

    #[test]
    fn completeness() {
        let quadrant = Fan::from_i64(2, &[vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert!(!quadrant.is_complete());
        assert_eq!(ToricVariety::new(quadrant, None), Err(Error::NotComplete));
        // three of the four quadrants of P1 x P1
        let partial = Fan::from_i64(
            2,
            &[vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
        )
        .unwrap();
        assert!(!partial.is_complete());
        let p1 = Fan::from_i64(1, &[vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        assert!(p1.is_complete());
        assert!(hexagon().is_complete());
    }

    #[test]
    fn smoothness() {
        let singular = Fan::from_i64(
            2,
            &[vec![1, 0], vec![1, 2], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .unwrap();
        assert!(singular.is_complete());
        assert!(!singular.is_smooth());
    }

    #[test]
    fn overlapping_cones_are_not_complete() {
        // the cone on (-3,-1), (2,1) takes the short way round and overlaps its neighbours
        let rays = [vec![-3, -1], vec![2, 1], vec![3, 2], vec![1, 2]];
        let fan = Fan::from_i64(2, &rays, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap();
        assert!(!fan.is_complete());
        // five rays joined in pentagram order wrap twice around the origin
        let star = [vec![1, 0], vec![-1, 1], vec![0, -1], vec![1, 1], vec![-1, 0]];
        let fan = Fan::from_i64(2, &star, (0..5).map(|i| vec![i, (i + 1) % 5]).collect()).unwrap();
        assert!(!fan.is_complete());
    }

    #[test]
    fn weighted_projective_cartier() {
        let fan = Fan::from_i64(2, &[vec![1, 0], vec![0, 1], vec![-1, -2]], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
            .unwrap();
        let x = ToricVariety::new(fan, None).unwrap();
        assert_eq!(x.cl_rank(), 1);
        // P(1,2,1): D_0 generates Cl and D_1 = 2 D_0 is Cartier
        let generator = x.ray_class(0);
        assert_eq!(generator.0[0].abs(), Int::one());
        assert!(!x.is_line_bundle(&generator).unwrap());
        assert!(x.is_line_bundle(&generator.scale(2)).unwrap());
        assert!(x.is_line_bundle(&x.ray_class(1)).unwrap());
        assert!(!x.is_line_bundle(&x.ray_class(2)).unwrap());
    }

    #[test]
    fn torsion_class_group_rejected() {
        // P2 / (Z/3): rays (1,0), (-1,3)... use the fan of P2 in a sublattice
        let fan = Fan::from_i64(2, &[vec![1, 0], vec![1, 3], vec![-2, -3]], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
            .unwrap();
        assert!(matches!(ToricVariety::new(fan, None), Err(Error::TorsionClassGroup(_))));
    }

    #[test]
    fn explicit_deg_is_validated() {
        let fan = p2().fan().clone();
        let good = IntMatrix::from_i64_rows(&[vec![-1, -1, -1]], 3);
        assert!(ToricVariety::new(fan.clone(), Some(good)).is_ok());
        let not_zero = IntMatrix::from_i64_rows(&[vec![1, 1, 0]], 3);
        assert!(matches!(ToricVariety::new(fan.clone(), Some(not_zero)), Err(Error::InvalidDegMatrix(_))));
        let not_onto = IntMatrix::from_i64_rows(&[vec![2, 2, 2]], 3);
        assert!(matches!(ToricVariety::new(fan, Some(not_onto)), Err(Error::InvalidDegMatrix(_))));
    }

    #[test]
    fn json_round_trip_and_floats_rejected() {
        let x = p2();
        let text = serde_json::to_string(&x.to_spec().unwrap()).unwrap();
        assert_eq!(ToricVariety::from_json(&text).unwrap(), x);
        let floats = r#"{"dim": 2, "rays": [[1.0, 0], [0, 1], [-1, -1]], "max_cones": [[0,1],[1,2],[0,2]]}"#;
        assert!(matches!(ToricVariety::from_json(floats), Err(Error::Json(_))));
    }
}
