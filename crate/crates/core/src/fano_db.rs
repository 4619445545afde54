//! Smooth toric Fano varieties with stored exceptional collections and the
//! blowdowns between them.
//!
//! A blowdown removes rays of the fan over the same lattice `N`. It induces
//! the identity on characters, the coordinate projection forgetting the
//! exceptional divisors on `Z^Σ(1)`, and the unique map on class groups
//! making the square with the two `deg` maps commute.

use std::collections::{BTreeMap, VecDeque};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::cohomology::do_higher_self_exts_vanish_classes;
use crate::error::{Error, Result};
use crate::positivity::{intersection_number, walls};
use crate::quiver::QuiverOfSections;
use crate::toric::{to_i64_rows, DivisorClass, Fan, ToricVariety};
use crate::{Int, IntMatrix};

pub const DB_PATH_VAR: &str = "TORQUIV_DB_PATH";

const EMBEDDED: &str = include_str!("../data/fano_db.json");

pub type Key = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionJson {
    pub target: usize,
    /// For each ray of the target, the index of the equal ray of the source.
    pub matching: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub dim: usize,
    pub index: usize,
    pub name: String,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    pub deg: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collection: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub contractions: Vec<ContractionJson>,
}

#[derive(Clone, Debug)]
pub struct DatabaseEntry {
    pub key: Key,
    pub name: String,
    pub variety: Arc<ToricVariety>,
    pub collection: Option<Vec<DivisorClass>>,
    /// `(target index, matching)` pairs within the same dimension.
    pub contractions: Vec<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionMaps {
    pub character_map: IntMatrix,
    pub divisor_map: IntMatrix,
    pub picard_map: IntMatrix,
}

impl ContractionMaps {
    pub fn identity(x: &ToricVariety) -> Self {
        ContractionMaps {
            character_map: IntMatrix::identity(x.dim()),
            divisor_map: IntMatrix::identity(x.num_rays()),
            picard_map: IntMatrix::identity(x.cl_rank()),
        }
    }

    /// The maps induced by removing the source rays outside `matching`.
    pub fn new(source: &ToricVariety, target: &ToricVariety, matching: &[usize]) -> Result<Self> {
        if source.dim() != target.dim() || matching.len() != target.num_rays() {
            return Err(Error::Database("ray matching has the wrong shape".into()));
        }
        let mut divisor_map = IntMatrix::zeros(target.num_rays(), source.num_rays());
        for (j, &i) in matching.iter().enumerate() {
            if i >= source.num_rays() || source.fan().rays()[i] != target.fan().rays()[j] {
                return Err(Error::Database(format!("target ray {j} is not matched by an equal source ray")));
            }
            if matching[..j].contains(&i) {
                return Err(Error::Database(format!("source ray {i} is matched twice")));
            }
            divisor_map[(j, i)] = Int::one();
        }
        let picard_map = &(target.deg() * &divisor_map) * source.section();
        let maps = ContractionMaps { character_map: IntMatrix::identity(source.dim()), divisor_map, picard_map };
        maps.check(source, target)?;
        Ok(maps)
    }

    /// Both squares of the induced map of short exact sequences commute.
    pub fn check(&self, source: &ToricVariety, target: &ToricVariety) -> Result<()> {
        if &(target.deg() * &self.divisor_map) != &(&self.picard_map * source.deg()) {
            return Err(Error::NonCommuting("deg_target ∘ divisor_map != picard_map ∘ deg_source".into()));
        }
        let left = &self.divisor_map * &source.fan().ray_matrix();
        let right = &target.fan().ray_matrix() * &self.character_map;
        if left != right {
            return Err(Error::NonCommuting("divisor_map ∘ rays_source != rays_target ∘ character_map".into()));
        }
        Ok(())
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ContractionMaps) -> ContractionMaps {
        ContractionMaps {
            character_map: &next.character_map * &self.character_map,
            divisor_map: &next.divisor_map * &self.divisor_map,
            picard_map: &next.picard_map * &self.picard_map,
        }
    }

    pub fn apply(&self, d: &DivisorClass) -> DivisorClass {
        DivisorClass(self.picard_map.mul_vec(&d.0))
    }
}

/// Images of `collection`, without repeats, in order of first occurrence.
pub fn image_collection(collection: &[DivisorClass], maps: &ContractionMaps) -> Vec<DivisorClass> {
    let mut out: Vec<DivisorClass> = Vec::new();
    for d in collection {
        let e = maps.apply(d);
        if !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Database {
    entries: BTreeMap<Key, DatabaseEntry>,
}

impl Database {
    /// The database at `$TORQUIV_DB_PATH`, or the embedded copy.
    pub fn load() -> Result<Self> {
        match std::env::var_os(DB_PATH_VAR) {
            Some(path) => Self::from_path(std::path::Path::new(&path)),
            None => Ok(Self::embedded().clone()),
        }
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Database(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn embedded() -> &'static Database {
        static DB: OnceLock<Database> = OnceLock::new();
        DB.get_or_init(|| Database::from_json(EMBEDDED).expect("embedded database is valid"))
    }

    /// Parses and validates a database; every stored collection must pass
    /// the strong exceptionality check and every contraction square must commute.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<EntryJson> = serde_json::from_str(text)?;
        let mut entries = BTreeMap::new();
        for e in raw {
            let key = (e.dim, e.index);
            let fan = Fan::from_i64(e.dim, &e.rays, e.max_cones.clone())
                .map_err(|err| Error::Database(format!("({}, {}): {err}", key.0, key.1)))?;
            let deg = IntMatrix::from_i64_rows(&e.deg, e.rays.len());
            let variety = ToricVariety::new(fan, Some(deg))
                .map_err(|err| Error::Database(format!("({}, {}): {err}", key.0, key.1)))?;
            let entry = DatabaseEntry {
                key,
                name: e.name,
                variety: Arc::new(variety),
                collection: e.collection.map(|c| c.iter().map(|v| DivisorClass::from_i64(v)).collect()),
                contractions: e.contractions.into_iter().map(|c| (c.target, c.matching)).collect(),
            };
            if entries.insert(key, entry).is_some() {
                return Err(Error::Database(format!("duplicate key ({}, {})", key.0, key.1)));
            }
        }
        let db = Database { entries };
        db.self_test()?;
        Ok(db)
    }

    fn self_test(&self) -> Result<()> {
        for (key, e) in &self.entries {
            let x = &e.variety;
            let context = |what: &str| Error::Database(format!("({}, {}): {what}", key.0, key.1));
            if !x.fan().is_smooth() {
                return Err(context("fan is not smooth"));
            }
            let ones = vec![Int::one(); x.num_rays()];
            if !walls(x)?.iter().all(|w| intersection_number(&ones, w).is_positive()) {
                return Err(context("anticanonical class is not ample"));
            }
            if let Some(c) = &e.collection {
                for d in c {
                    x.check_class(d).map_err(|err| context(&err.to_string()))?;
                }
                if !do_higher_self_exts_vanish_classes(x, c, 0)? {
                    return Err(context("stored collection is not strong exceptional"));
                }
            }
            for (target, matching) in &e.contractions {
                let t = self.get((key.0, *target)).map_err(|_| context("contraction to an unknown entry"))?;
                ContractionMaps::new(x, &t.variety, matching).map_err(|err| context(&err.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = &DatabaseEntry> {
        self.entries.values()
    }

    pub fn get(&self, key: Key) -> Result<&DatabaseEntry> {
        self.entries.get(&key).ok_or(Error::UnknownKey(key.0, key.1))
    }

    pub fn smooth_fano(&self, dim: usize, index: usize) -> Result<Arc<ToricVariety>> {
        Ok(self.get((dim, index))?.variety.clone())
    }

    pub fn full_str_exc_coll(&self, dim: usize, index: usize) -> Result<Vec<DivisorClass>> {
        self.get((dim, index))?.collection.clone().ok_or(Error::NoCollection(dim, index))
    }

    /// Stored blowdowns `(source index, target index)` in dimension `dim`.
    pub fn contraction_list(&self, dim: usize) -> Vec<(usize, usize)> {
        self.entries
            .values()
            .filter(|e| e.key.0 == dim)
            .flat_map(|e| e.contractions.iter().map(move |(t, _)| (e.key.1, *t)))
            .collect()
    }

    /// Maps of a single stored edge, or the identity when `source == target`.
    pub fn contraction_maps(&self, source: Key, target: Key) -> Result<ContractionMaps> {
        let s = self.get(source)?;
        if source == target {
            return Ok(ContractionMaps::identity(&s.variety));
        }
        let no_edge = Error::NoSuchEdge(source.0, source.1, target.0, target.1);
        if source.0 != target.0 {
            return Err(no_edge);
        }
        let (_, matching) = s.contractions.iter().find(|(t, _)| *t == target.1).ok_or(no_edge)?;
        ContractionMaps::new(&s.variety, &self.get(target)?.variety, matching)
    }

    /// Composite of stored edges along a shortest path from `source` to `target`.
    pub fn composed_maps(&self, source: Key, target: Key) -> Result<ContractionMaps> {
        let dim = source.0;
        if target.0 != dim {
            return Err(Error::NoSuchEdge(source.0, source.1, target.0, target.1));
        }
        let mut previous: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([source.1]);
        while let Some(v) = queue.pop_front() {
            if v == target.1 {
                break;
            }
            for (t, _) in &self.get((dim, v))?.contractions {
                if *t != source.1 && !previous.contains_key(t) {
                    previous.insert(*t, v);
                    queue.push_back(*t);
                }
            }
        }
        let mut path = vec![target.1];
        while *path.last().expect("nonempty") != source.1 {
            let last = *path.last().expect("nonempty");
            match previous.get(&last) {
                Some(&p) => path.push(p),
                _ => return Err(Error::NoSuchEdge(source.0, source.1, target.0, target.1)),
            }
        }
        path.reverse();
        let mut maps = ContractionMaps::identity(&self.get(source)?.variety);
        for step in path.windows(2) {
            maps = maps.then(&self.contraction_maps((dim, step[0]), (dim, step[1]))?);
        }
        Ok(maps)
    }

    /// Pushes the vertices of `q` forward to each variety of `chain` (indices in
    /// the dimension of `q`, the first being the variety of `q` itself) and checks
    /// the images, optionally with anticanonical twists up to `twist` on each target.
    pub fn do_higher_self_exts_vanish_chain(
        &self,
        q: &QuiverOfSections,
        chain: &[usize],
        twist: Option<u32>,
    ) -> Result<bool> {
        let dim = q.variety().dim();
        let first = *chain.first().ok_or(Error::ChainMismatch)?;
        if *self.get((dim, first))?.variety != *q.variety() {
            return Err(Error::ChainMismatch);
        }
        let mut maps = ContractionMaps::identity(q.variety());
        let mut current = first;
        for &t in chain {
            maps = maps.then(&self.composed_maps((dim, current), (dim, t))?);
            current = t;
            let image = image_collection(q.vertices(), &maps);
            if !do_higher_self_exts_vanish_classes(&self.get((dim, t))?.variety, &image, twist.unwrap_or(0))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> Result<String> {
        let out: Vec<EntryJson> = self
            .entries
            .values()
            .map(|e| {
                let spec = e.variety.to_spec()?;
                Ok(EntryJson {
                    dim: e.key.0,
                    index: e.key.1,
                    name: e.name.clone(),
                    rays: spec.rays,
                    max_cones: spec.max_cones,
                    deg: to_i64_rows(e.variety.deg())?,
                    collection: e.collection.as_ref().map(|c| c.iter().map(DivisorClass::to_i64).collect()).transpose()?,
                    contractions: e
                        .contractions
                        .iter()
                        .map(|(t, m)| ContractionJson { target: *t, matching: m.clone() })
                        .collect(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(serde_json::to_string_pretty(&out)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db() -> &'static Database {
        Database::embedded()
    }

    #[test]
    fn surfaces() {
        let x = db().smooth_fano(2, 4).unwrap();
        assert_eq!((x.num_rays(), x.cl_rank()), (6, 4));
        assert_eq!(db().smooth_fano(2, 0).unwrap().num_rays(), 3);
        assert_eq!(db().smooth_fano(1, 0).unwrap().num_rays(), 2);
        assert_eq!(db().smooth_fano(9, 9).unwrap_err(), Error::UnknownKey(9, 9));
    }

    #[test]
    fn collections() {
        let c = db().full_str_exc_coll(2, 4).unwrap();
        let want = [[0, 0, 0, 0], [0, 0, 1, 1], [0, 1, 0, 0], [0, 1, 1, 0], [1, 0, 0, 0], [1, 0, 0, 1]];
        assert_eq!(c, want.iter().map(|v| DivisorClass::from_i64(v)).collect::<Vec<_>>());
        let beilinson: Vec<_> = (0..3).map(|d| DivisorClass::from_i64(&[d])).collect();
        assert_eq!(db().full_str_exc_coll(2, 0).unwrap(), beilinson);
        assert_eq!(db().full_str_exc_coll(1, 0).unwrap().len(), 2);
    }

    #[test]
    fn contraction_edges() {
        let l = db().contraction_list(2);
        for e in [(4, 3), (3, 2), (2, 0)] {
            assert!(l.contains(&e));
        }
        assert!(!l.contains(&(4, 0)));
        assert!(db().contraction_list(1).is_empty());
        assert!(matches!(db().contraction_maps((2, 4), (2, 0)), Err(Error::NoSuchEdge(2, 4, 2, 0))));
    }

    #[test]
    fn blowdown_maps() {
        let m = db().contraction_maps((2, 4), (2, 3)).unwrap();
        assert_eq!((m.divisor_map.rows(), m.divisor_map.cols()), (5, 6));
        assert_eq!((m.picard_map.rows(), m.picard_map.cols()), (3, 4));
        assert_eq!(crate::lattice::rank(&m.picard_map), 3);
        let id = db().contraction_maps((2, 4), (2, 4)).unwrap();
        let c = db().full_str_exc_coll(2, 4).unwrap();
        assert_eq!(image_collection(&c, &id), c);
        assert_eq!(image_collection(&c[..1], &m).len(), 1);
        assert_eq!(image_collection(&c, &m).len(), 5);
        let composed = db().composed_maps((2, 4), (2, 0)).unwrap();
        assert_eq!(image_collection(&c, &composed).len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let text = db().to_json().unwrap();
        let again = Database::from_json(&text).unwrap();
        assert_eq!(again.to_json().unwrap(), text);
    }

    #[test]
    fn broken_collection_fails_self_test() {
        let mut raw: Vec<EntryJson> = serde_json::from_str(EMBEDDED).unwrap();
        let p2 = raw.iter_mut().find(|e| (e.dim, e.index) == (2, 0)).unwrap();
        p2.collection = Some(vec![vec![0], vec![3]]);
        let err = Database::from_json(&serde_json::to_string(&raw).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Database(msg) if msg.contains("strong exceptional")));
    }
}
