//! Quivers of sections.
//!
//! Vertices are the classes of a collection of rank-one reflexive sheaves,
//! ordered so that there are no maps from later vertices to earlier ones.
//! The arrows `i -> j` are the sections of `Hom(L_i, L_j)` that do not factor
//! through any intermediate vertex `i < k < j`. All Hom spaces have monomial
//! bases and composition is multiplication, so these are exactly the
//! monomials of multidegree `v_j - v_i` not divisible by a monomial of
//! multidegree `v_k - v_i`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sections::{hom_basis, hom_dimension, Monomial};
use crate::toric::{DivisorClass, ToricVariety};
use crate::Int;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    index: usize,
    source: usize,
    target: usize,
    label: Monomial,
}

impl Arrow {
    /// 1-based position in the quiver's arrow list.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn label(&self) -> &Monomial {
        &self.label
    }
}

#[derive(Clone, Debug)]
pub struct QuiverOfSections {
    variety: Arc<ToricVariety>,
    vertices: Vec<DivisorClass>,
    arrows: Vec<Arrow>,
    by_pair: BTreeMap<(usize, usize), Vec<usize>>,
    non_line_bundles: Vec<usize>,
}

impl PartialEq for QuiverOfSections {
    fn eq(&self, other: &Self) -> bool {
        *self.variety == *other.variety && self.vertices == other.vertices && self.arrows == other.arrows
    }
}

impl Eq for QuiverOfSections {}

fn check_classes(x: &ToricVariety, classes: &[DivisorClass]) -> Result<()> {
    let mut seen = HashSet::new();
    for c in classes {
        x.check_class(c)?;
        if !seen.insert(c) {
            return Err(Error::DuplicateClass(c.to_string()));
        }
    }
    Ok(())
}

/// Orders classes so that `Hom(L_j, L_i) = 0` whenever `i < j`.
///
/// Among the classes that may come next, the zero class is taken first and
/// otherwise the earliest in input order, so an input that is already a
/// valid order is returned unchanged.
pub fn order_vertices(x: &ToricVariety, classes: &[DivisorClass]) -> Result<Vec<DivisorClass>> {
    check_classes(x, classes)?;
    let n = classes.len();
    // maps[i][j]: Hom(L_i, L_j) != 0
    let mut maps = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                maps[i][j] = hom_dimension(x, &classes[j].sub(&classes[i]))? > 0;
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if maps[i][j] && maps[j][i] {
                return Err(Error::CyclicHoms(i, j));
            }
        }
    }
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let ready = (0..n)
            .filter(|&i| !placed[i] && (0..n).all(|j| placed[j] || j == i || !maps[j][i]))
            .min_by_key(|&i| (!classes[i].is_zero(), i));
        match ready {
            Some(i) => {
                placed[i] = true;
                order.push(i);
            }
            None => {
                let i = (0..n).find(|&i| !placed[i]).expect("unplaced vertex");
                let j = (0..n).find(|&j| !placed[j] && maps[j][i]).expect("blocking vertex");
                return Err(Error::CyclicHoms(i.min(j), i.max(j)));
            }
        }
    }
    Ok(order.into_iter().map(|i| classes[i].clone()).collect())
}

impl QuiverOfSections {
    /// The quiver of sections of a collection of classes.
    pub fn new(variety: Arc<ToricVariety>, classes: &[DivisorClass]) -> Result<Self> {
        let vertices = order_vertices(&variety, classes)?;
        let n = vertices.len();
        let mut bases: BTreeMap<(usize, usize), Vec<Monomial>> = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                bases.insert((i, j), hom_basis(&variety, &vertices[j].sub(&vertices[i]))?);
            }
        }
        let mut arrows = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for a in &bases[&(i, j)] {
                    let factors = (i + 1..j).any(|k| bases[&(i, k)].iter().any(|b| b.divides(a)));
                    if !factors {
                        arrows.push((i, j, a.clone()));
                    }
                }
            }
        }
        Self::assemble(variety, vertices, arrows)
    }

    /// A quiver with explicitly given vertices and labelled arrows.
    pub fn from_data(
        variety: Arc<ToricVariety>,
        vertices: Vec<DivisorClass>,
        arrows: Vec<(usize, usize, Monomial)>,
    ) -> Result<Self> {
        check_classes(&variety, &vertices)?;
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if hom_dimension(&variety, &vertices[i].sub(&vertices[j]))? > 0 {
                    return Err(Error::CyclicHoms(i, j));
                }
            }
        }
        for (pos, (s, t, label)) in arrows.iter().enumerate() {
            if s >= t || *t >= vertices.len() {
                return Err(Error::BadOrientation(pos));
            }
            if label.exponents().len() != variety.num_rays()
                || variety.from_wdiv_to_cl(&label.as_divisor())? != vertices[*t].sub(&vertices[*s])
            {
                return Err(Error::BadLabelDegree(pos));
            }
        }
        Self::assemble(variety, vertices, arrows)
    }

    fn assemble(
        variety: Arc<ToricVariety>,
        vertices: Vec<DivisorClass>,
        mut raw: Vec<(usize, usize, Monomial)>,
    ) -> Result<Self> {
        raw.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(b.2.cmp(&a.2)));
        raw.dedup();
        let arrows: Vec<Arrow> = raw
            .into_iter()
            .enumerate()
            .map(|(k, (source, target, label))| Arrow { index: k + 1, source, target, label })
            .collect();
        let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (k, a) in arrows.iter().enumerate() {
            by_pair.entry((a.source, a.target)).or_default().push(k);
        }
        let mut non_line_bundles = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            if !variety.is_line_bundle(v)? {
                non_line_bundles.push(i);
            }
        }
        Ok(QuiverOfSections { variety, vertices, arrows, by_pair, non_line_bundles })
    }

    pub fn variety(&self) -> &ToricVariety {
        &self.variety
    }

    pub fn variety_arc(&self) -> &Arc<ToricVariety> {
        &self.variety
    }

    pub fn vertices(&self) -> &[DivisorClass] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// Arrow by its 1-based index.
    pub fn arrow(&self, index: usize) -> Option<&Arrow> {
        index.checked_sub(1).and_then(|k| self.arrows.get(k))
    }

    pub fn arrows_between(&self, source: usize, target: usize) -> Vec<&Arrow> {
        self.by_pair.get(&(source, target)).map_or_else(Vec::new, |ks| ks.iter().map(|&k| &self.arrows[k]).collect())
    }

    /// Arrows leaving `vertex`, grouped by target.
    pub fn arrows_from(&self, vertex: usize) -> BTreeMap<usize, Vec<&Arrow>> {
        let mut out: BTreeMap<usize, Vec<&Arrow>> = BTreeMap::new();
        for a in self.arrows.iter().filter(|a| a.source == vertex) {
            out.entry(a.target).or_default().push(a);
        }
        out
    }

    /// Vertices whose class is not Cartier; the quiver is still built but
    /// its relations need not present the endomorphism algebra.
    pub fn non_line_bundles(&self) -> &[usize] {
        &self.non_line_bundles
    }

    /// Arrows at a vertex in the layout `target => {labels}` followed by the degree.
    pub fn vertex_summary(&self, vertex: usize) -> String {
        let mut s = String::new();
        for (target, arrows) in self.arrows_from(vertex) {
            let labels: Vec<String> = arrows.iter().map(|a| a.label.to_string()).collect();
            let _ = writeln!(s, "{target} => {{{}}}", labels.join(", "));
        }
        let _ = writeln!(s, "degree => {}", self.vertices[vertex]);
        s
    }

    /// Pairs of distinct paths of length at most `max_len` with the same
    /// endpoints and the same product label. A pair is only reported when
    /// the paths differ in both their first and their last arrow.
    pub fn relations(&self, max_len: usize) -> Vec<Relation> {
        let mut groups: BTreeMap<(usize, usize, Vec<u64>), Vec<Vec<usize>>> = BTreeMap::new();
        let mut stack: Vec<(Vec<usize>, Monomial)> =
            self.arrows.iter().map(|a| (vec![a.index], a.label.clone())).collect();
        while let Some((path, label)) = stack.pop() {
            let first = &self.arrows[path[0] - 1];
            let last = &self.arrows[path[path.len() - 1] - 1];
            if path.len() < max_len {
                for next in self.arrows.iter().filter(|a| a.source == last.target) {
                    let mut p = path.clone();
                    p.push(next.index);
                    stack.push((p, label.mul(&next.label)));
                }
            }
            groups.entry((first.source, last.target, label.0)).or_default().push(path);
        }
        let mut out = Vec::new();
        for paths in groups.into_values() {
            let mut paths = paths;
            paths.sort();
            for a in 0..paths.len() {
                for b in a + 1..paths.len() {
                    let (p, q) = (&paths[a], &paths[b]);
                    if p[0] != q[0] && p[p.len() - 1] != q[q.len() - 1] {
                        out.push(Relation { lhs: p.clone(), rhs: q.clone() });
                    }
                }
            }
        }
        out.sort_by(|x, y| (x.lhs.len().max(x.rhs.len()), &x.lhs, &x.rhs).cmp(&(y.lhs.len().max(y.rhs.len()), &y.lhs, &y.rhs)));
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph quiver {\n  rankdir=LR;\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"{i}: {v}\"];");
        }
        for a in &self.arrows {
            let _ = writeln!(s, "  v{} -> v{} [label=\"{}\"];", a.source, a.target, a.label);
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json_value(&self) -> Result<QuiverJson> {
        Ok(QuiverJson {
            vertices: self.vertices.iter().map(DivisorClass::to_i64).collect::<Result<_>>()?,
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowJson { index: a.index - 1, source: a.source, target: a.target, label: a.label.0.clone() })
                .collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value()?)?)
    }

    pub fn from_json(variety: Arc<ToricVariety>, text: &str) -> Result<Self> {
        let data: QuiverJson = serde_json::from_str(text)?;
        let vertices = data.vertices.iter().map(|v| DivisorClass::from_i64(v)).collect();
        let arrows = data.arrows.into_iter().map(|a| (a.source, a.target, Monomial(a.label))).collect();
        Self::from_data(variety, vertices, arrows)
    }
}

/// Two parallel paths (as 1-based arrow indices) with equal product labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowJson {
    pub index: usize,
    pub source: usize,
    pub target: usize,
    pub label: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverJson {
    pub vertices: Vec<Vec<i64>>,
    pub arrows: Vec<ArrowJson>,
}

/// Multidegree of a label, for invariant checks.
pub fn label_degree(x: &ToricVariety, label: &Monomial) -> Result<DivisorClass> {
    x.from_wdiv_to_cl(&label.0.iter().map(|&e| Int::from(e)).collect::<Vec<_>>())
}
