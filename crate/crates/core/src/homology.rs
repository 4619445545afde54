//! Finite simplicial complexes and their reduced homology over the rationals.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};

use crate::lattice::rank;
use crate::{Int, IntMatrix};

/// A simplicial complex given by its facets. Every subset of a facet is a
/// face, and the empty face is always present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<usize>,
    facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Builds the complex generated by `faces`, keeping only the maximal ones.
    pub fn from_faces(vertices: Vec<usize>, faces: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let mut all: BTreeSet<Vec<usize>> = faces
            .into_iter()
            .filter(|f| !f.is_empty())
            .map(|mut f| {
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        for &v in &vertices {
            all.insert(vec![v]);
        }
        let candidates: Vec<Vec<usize>> = all.into_iter().collect();
        let facets = candidates
            .iter()
            .filter(|f| !candidates.iter().any(|g| g.len() > f.len() && f.iter().all(|v| g.contains(v))))
            .cloned()
            .collect();
        let mut vertices = vertices;
        vertices.sort_unstable();
        vertices.dedup();
        SimplicialComplex { vertices, facets }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// Dimension of the largest face; −1 for the complex `{∅}`.
    pub fn dim(&self) -> isize {
        self.facets.iter().map(|f| f.len() as isize - 1).max().unwrap_or(-1)
    }

    /// All faces grouped by size; `faces[0]` holds only the empty face.
    fn faces_by_size(&self) -> Vec<Vec<Vec<usize>>> {
        let top = self.facets.iter().map(Vec::len).max().unwrap_or(0);
        let mut sets: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); top + 1];
        sets[0].insert(Vec::new());
        for facet in &self.facets {
            let k = facet.len();
            for mask in 1u64..(1u64 << k) {
                let face: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| facet[b]).collect();
                sets[face.len()].insert(face);
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    pub fn reduced_homology(&self) -> ReducedHomology {
        let faces = self.faces_by_size();
        let index: Vec<HashMap<&[usize], usize>> =
            faces.iter().map(|fs| fs.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect()).collect();
        // boundary_ranks[s] = rank of ∂ from faces of size s to size s − 1
        let mut boundary_ranks = vec![0usize; faces.len() + 1];
        for s in 1..faces.len() {
            let mut m = IntMatrix::zeros(faces[s - 1].len(), faces[s].len());
            for (j, face) in faces[s].iter().enumerate() {
                for drop in 0..face.len() {
                    let sub: Vec<usize> =
                        face.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &v)| v).collect();
                    let i = index[s - 1][sub.as_slice()];
                    m[(i, j)] = if drop % 2 == 0 { Int::one() } else { -Int::one() };
                }
            }
            boundary_ranks[s] = if m.is_zero() { 0 } else { rank(&m) };
        }
        let ranks = (0..faces.len())
            .map(|s| faces[s].len() - boundary_ranks[s] - boundary_ranks[s + 1])
            .collect();
        ReducedHomology { ranks }
    }
}

/// Reduced Betti numbers, `ranks[k + 1]` being the rank in degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedHomology {
    ranks: Vec<usize>,
}

impl ReducedHomology {
    pub fn rank(&self, degree: isize) -> usize {
        usize::try_from(degree + 1).ok().and_then(|i| self.ranks.get(i)).copied().unwrap_or(0)
    }

    /// `(degree, rank)` for every nonzero rank.
    pub fn nonzero(&self) -> Vec<(isize, usize)> {
        self.ranks
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(i, &r)| (i as isize - 1, r))
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.ranks.iter().all(Zero::is_zero)
    }

    pub(crate) fn raw(&self) -> &[usize] {
        &self.ranks
    }

    pub(crate) fn from_raw(ranks: Vec<usize>) -> Self {
        ReducedHomology { ranks }
    }
}
