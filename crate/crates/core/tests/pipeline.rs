use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use torquiv::cohomology::{cohomology_oracle_class, projected_cone};
use torquiv::fano_db::image_collection;
use torquiv::lattice::{rank, solve_integer};
use torquiv::positivity::{intersection_number, walls};
use torquiv::*;

fn db() -> &'static Database {
    Database::embedded()
}

#[test]
fn class_group_sequences_are_exact() {
    for e in db().entries() {
        let x = &e.variety;
        let p = x.fan().ray_matrix();
        assert!((x.deg() * &p).is_zero(), "{}", e.name);
        assert_eq!(rank(&p), x.dim(), "{}", e.name);
        assert_eq!(x.cl_rank() + x.dim(), x.num_rays(), "{}", e.name);
        assert_eq!(x.deg() * x.section(), IntMatrix::identity(x.cl_rank()), "{}", e.name);
        // the kernel of deg is spanned by the rays' characters
        for k in 0..x.num_rays() {
            let mut v = x.section().mul_vec(&x.deg().column(k));
            v[k] -= BigInt::from(1);
            assert!(solve_integer(&p, &v.iter().map(|c| -c).collect::<Vec<_>>()).is_some(), "{}", e.name);
        }
    }
}

#[test]
fn database_fanos_are_fano() {
    for e in db().entries() {
        let x = &e.variety;
        assert!(x.fan().is_smooth() && x.fan().is_complete());
        assert!(is_nef(x, &x.anticanonical_class()).unwrap());
        assert!(!is_nef(x, &x.anticanonical_class().scale(-1)).unwrap());
        let ones = vec![BigInt::from(1); x.num_rays()];
        assert!(walls(x).unwrap().iter().all(|w| intersection_number(&ones, w) > BigInt::from(0)));
    }
}

#[test]
fn stored_collections_are_strong_exceptional() {
    for e in db().entries() {
        if let Some(c) = &e.collection {
            let q = QuiverOfSections::new(e.variety.clone(), c).unwrap();
            assert!(do_higher_self_exts_vanish(&q).unwrap(), "{}", e.name);
            assert_eq!(q.vertices().len(), c.len());
        }
    }
}

/// Every section between two vertices is a product of arrow labels along a path.
#[test]
fn arrows_generate_every_hom_space() {
    for e in db().entries() {
        let Some(c) = &e.collection else { continue };
        let q = QuiverOfSections::new(e.variety.clone(), c).unwrap();
        let n = q.vertices().len();
        let mut reach: Vec<Vec<BTreeSet<Monomial>>> = vec![vec![BTreeSet::new(); n]; n];
        for i in (0..n).rev() {
            reach[i][i].insert(Monomial::one(e.variety.num_rays()));
            for a in q.arrows().iter().filter(|a| a.source() == i) {
                for j in a.target()..n {
                    let tails: Vec<Monomial> = reach[a.target()][j].iter().cloned().collect();
                    for m in tails {
                        reach[i][j].insert(a.label().mul(&m));
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let basis: BTreeSet<Monomial> =
                    hom_basis(&e.variety, &q.vertices()[j].sub(&q.vertices()[i])).unwrap().into_iter().collect();
                assert_eq!(reach[i][j], basis, "{} {i}->{j}", e.name);
            }
        }
    }
}

#[test]
fn dp6_quiver_shape() {
    let x = db().smooth_fano(2, 4).unwrap();
    let q = QuiverOfSections::new(x.clone(), &db().full_str_exc_coll(2, 4).unwrap()).unwrap();
    // the quiver reorders the stored list: (1,0,0,0) precedes (0,1,1,0)
    let order: Vec<Vec<i64>> = q.vertices().iter().map(|v| v.to_i64().unwrap()).collect();
    assert_eq!(order, vec![vec![0, 0, 0, 0], vec![0, 0, 1, 1], vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 1, 1, 0], vec![1, 0, 0, 1]]);
    assert_eq!(q.arrows().len(), 12);
    assert!(q.arrows().iter().all(|a| a.label().total_degree() <= 2));
    assert!(q.non_line_bundles().is_empty());
    // nef check with n = 0 fails (regression value)
    assert!(!bundles_nef_check(&q, 0).unwrap());
    assert!(bundles_nef_check(&q, 2).unwrap());
    let rel = q.relations(3);
    assert!(!rel.is_empty());
    for r in &rel {
        let prod = |p: &[usize]| p.iter().fold(Monomial::one(6), |m, &k| m.mul(q.arrow(k).unwrap().label()));
        assert_eq!(prod(&r.lhs), prod(&r.rhs));
    }
}

#[test]
fn chain_images() {
    let c = db().full_str_exc_coll(2, 4).unwrap();
    let sizes: Vec<usize> = [3, 2, 0]
        .iter()
        .map(|&t| image_collection(&c, &db().composed_maps((2, 4), (2, t)).unwrap()).len())
        .collect();
    assert_eq!(sizes, vec![5, 4, 3]);
    let q = QuiverOfSections::new(db().smooth_fano(2, 4).unwrap(), &c).unwrap();
    assert_eq!(
        db().do_higher_self_exts_vanish_chain(&q, &[4], None).unwrap(),
        do_higher_self_exts_vanish(&q).unwrap()
    );
    assert!(db().do_higher_self_exts_vanish_chain(&q, &[4, 0], Some(1)).unwrap());
    assert_eq!(db().do_higher_self_exts_vanish_chain(&q, &[3, 2], None), Err(Error::ChainMismatch));
    let blp3 = QuiverOfSections::new(db().smooth_fano(3, 3).unwrap(), &db().full_str_exc_coll(3, 3).unwrap()).unwrap();
    assert!(db().do_higher_self_exts_vanish_chain(&blp3, &[3, 0], None).unwrap());
}

fn relabel(sets: &[Vec<usize>], perm: &[usize]) -> BTreeSet<Vec<usize>> {
    sets.iter()
        .map(|s| {
            let mut t: Vec<usize> = s.iter().map(|&i| perm[i]).collect();
            t.sort();
            t
        })
        .collect()
}

#[test]
fn forbidden_sets_respect_hexagon_symmetry() {
    let x = db().smooth_fano(2, 4).unwrap();
    let sets = forbidden_sets(&x);
    let rotation: Vec<usize> = (0..6).map(|i| (i + 1) % 6).collect();
    let reflection: Vec<usize> = (0..6).map(|i| (8 - i) % 6).collect();
    for (_, list) in sets {
        let rays: Vec<Vec<usize>> = list.iter().map(|s| s.rays.clone()).collect();
        let original: BTreeSet<Vec<usize>> = rays.iter().cloned().collect();
        assert_eq!(relabel(&rays, &rotation), original);
        assert_eq!(relabel(&rays, &reflection), original);
    }
}

/// The projected cones are a rational relaxation; on surfaces they agree with
/// exact membership at every integer point of a box.
#[test]
fn projected_cones_match_exact_membership() {
    for e in db().entries().filter(|e| e.key.0 <= 2) {
        let x = &e.variety;
        let r = x.cl_rank();
        let points: Vec<DivisorClass> = (0..7usize.pow(r as u32))
            .map(|k| DivisorClass::from_i64(&(0..r).map(|i| (k / 7usize.pow(i as u32) % 7) as i64 - 3).collect::<Vec<_>>()))
            .collect();
        for list in forbidden_sets(x).values() {
            for set in list {
                let cone = projected_cone(x, set);
                for d in &points {
                    assert_eq!(
                        cone.contains(d),
                        nonvanishing_region_contains(x, set, d).unwrap(),
                        "{} {set} {d}",
                        e.name
                    );
                }
            }
        }
    }
}

#[test]
fn oracle_on_threefolds() {
    let mut rng = StdRng::seed_from_u64(11);
    for key in [(3, 0), (3, 1), (3, 2), (3, 3)] {
        let x = db().smooth_fano(key.0, key.1).unwrap();
        for _ in 0..150 {
            let d = DivisorClass::from_i64(&(0..x.cl_rank()).map(|_| rng.gen_range(-4..=4)).collect::<Vec<_>>());
            let h = cohomology_oracle_class(&x, &d).unwrap();
            assert_eq!(higher_cohomology_vanishes(&x, &d).unwrap(), h[1..].iter().all(|&v| v == 0), "{key:?} {d}");
            assert_eq!(hom_dimension(&x, &d).unwrap(), h[0]);
        }
    }
    // P3: h^3(O(-4)) = 1
    let p3 = db().smooth_fano(3, 0).unwrap();
    assert_eq!(cohomology_oracle_class(&p3, &DivisorClass::from_i64(&[-4])).unwrap(), vec![0, 0, 0, 1]);
}

#[test]
fn hom_dimension_grows_under_effective_twists() {
    let x = db().smooth_fano(2, 4).unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..200 {
        let d = DivisorClass::from_i64(&(0..4).map(|_| rng.gen_range(-2..=3)).collect::<Vec<_>>());
        let rho = rng.gen_range(0..6);
        let basis = hom_basis(&x, &d).unwrap();
        let bigger = hom_basis(&x, &d.add(&x.ray_class(rho))).unwrap();
        let var = Monomial::variable(6, rho);
        assert!(basis.iter().all(|m| bigger.contains(&m.mul(&var))));
    }
}

#[test]
fn random_complete_fans_in_the_plane() {
    // rays sorted by angle with consecutive cones form a complete fan when
    // every angular gap is below pi
    let mut rng = StdRng::seed_from_u64(9);
    let mut built = 0;
    for _ in 0..200 {
        let mut rays: Vec<(f64, Vec<i64>)> = Vec::new();
        while rays.len() < rng.gen_range(3..7) {
            let v = vec![rng.gen_range(-3..=3i64), rng.gen_range(-3..=3i64)];
            let g = num_integer::gcd(v[0], v[1]);
            if g != 1 || rays.iter().any(|(_, r)| *r == v) {
                continue;
            }
            rays.push(((v[1] as f64).atan2(v[0] as f64), v));
        }
        rays.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let n = rays.len();
        let vecs: Vec<Vec<i64>> = rays.iter().map(|(_, v)| v.clone()).collect();
        let cones: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        let strictly_convex = (0..n).all(|i| {
            let (a, b) = (&vecs[i], &vecs[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0] > 0
        });
        let fan = Fan::from_i64(2, &vecs, cones).unwrap();
        assert_eq!(fan.is_complete(), strictly_convex, "{vecs:?}");
        if let Ok(x) = ToricVariety::new(fan, None) {
            built += 1;
            assert_eq!(x.cl_rank(), n - 2);
        }
    }
    assert!(built > 0);
}
