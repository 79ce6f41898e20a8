use std::cmp::Ordering;

use laumon_core::geometry::{
    attracting_cell, fixed_point_rep, is_stable, lambda_exterior_dual, moment_map, split_by_subgroup,
    tangent_character, tautological_character, Character, GeometryError,
};
use laumon_core::partitions::{
    attracting_preceq, enumerate_fixed_points, finite_preceq, interval_vector, order_h, strip_decomposition,
    MultiPartition,
};
use laumon_core::ring::{p_index, LaurentPoly, Mono, OneParamSubgroup};
use proptest::prelude::*;

/// All partitions of `size` with parts at most `max`, as row lists.
fn partitions(size: usize, max: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=size.min(max)).rev() {
        for mut rest in partitions(size - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every `n`-tuple of partitions of total size `|d|` whose box colors give `d`.
fn brute_force(n: usize, d: &[usize]) -> Vec<MultiPartition> {
    let total: usize = d.iter().sum();
    let mut tuples: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &tuples {
            let used: usize = t.iter().flatten().sum();
            for s in 0..=total - used {
                for p in partitions(s, s) {
                    let mut e = t.clone();
                    e.push(p);
                    next.push(e);
                }
            }
        }
        tuples = next;
    }
    let mut out: Vec<MultiPartition> = tuples
        .into_iter()
        .filter(|t| {
            let mut colors = vec![0; n];
            for (k, rows) in t.iter().enumerate() {
                for (y, len) in rows.iter().enumerate() {
                    colors[(y + k) % n] += len;
                }
            }
            colors == d
        })
        .map(|t| MultiPartition::new(n, t).unwrap())
        .collect();
    out.sort();
    out
}

fn degrees(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v: Vec<usize>| (0..=max).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn display() -> MultiPartition {
    "(2,2,1,1|2,1|2,1,1,1)".parse().unwrap()
}

#[test]
fn enumeration_matches_brute_force() {
    for (n, max) in [(2, 3), (3, 2)] {
        for d in degrees(n, max) {
            assert_eq!(enumerate_fixed_points(n, &d), brute_force(n, &d), "d = {d:?}");
        }
    }
    let d = [4, 5, 5];
    let fps = enumerate_fixed_points(3, &d);
    assert_eq!(fps, brute_force(3, &d));
    assert!(fps.contains(&display()));
}

#[test]
fn kostant_points_are_exactly_those_without_the_last_color() {
    for (n, max) in [(2, 3), (3, 2), (4, 1)] {
        for d in degrees(n, max) {
            for lam in enumerate_fixed_points(n, &d) {
                assert_eq!(lam.is_kostant(), d[n - 1] == 0, "{lam}");
            }
        }
    }
}

#[test]
fn strips_partition_the_boxes() {
    let strips = strip_decomposition(&display());
    let got: Vec<(usize, usize)> = strips.iter().map(|s| (s.i, s.j)).collect();
    assert_eq!(got, vec![(1, 5), (1, 3), (2, 4), (2, 3), (3, 7), (3, 4)]);
    for d in degrees(3, 2) {
        for lam in enumerate_fixed_points(3, &d) {
            let mut sum = vec![0; 3];
            for s in strip_decomposition(&lam) {
                for (a, b) in sum.iter_mut().zip(&s.vector) {
                    *a += b;
                }
            }
            assert_eq!(sum, d, "{lam}");
        }
    }
}

#[test]
fn interval_examples() {
    assert_eq!(interval_vector(1, 5, 3).unwrap().vector, vec![2, 1, 1]);
    assert_eq!(interval_vector(1, 5, 2).unwrap().vector, vec![2, 2]);
    assert_eq!(interval_vector(2, 3, 2).unwrap().vector, vec![0, 1]);
    assert!(interval_vector(0, 3, 2).is_err());
    assert!(interval_vector(2, 2, 2).is_err());
    assert!(interval_vector(3, 4, 2).is_err());
}

#[test]
fn height_order_refines_both_strip_orders() {
    for (n, d) in [(2, vec![2, 1]), (2, vec![2, 2]), (3, vec![2, 1, 1]), (3, vec![2, 2, 0])] {
        let fps = enumerate_fixed_points(n, &d);
        for lam in &fps {
            for mu in &fps {
                if lam == mu {
                    continue;
                }
                if attracting_preceq(lam, mu).unwrap() {
                    assert_eq!(order_h(lam, mu).unwrap(), Ordering::Less, "{lam} below {mu}");
                }
                if finite_preceq(mu, lam).unwrap() {
                    assert_eq!(order_h(mu, lam).unwrap(), Ordering::Less, "{mu} below {lam}");
                }
            }
        }
    }
    let a: MultiPartition = "(1|)".parse().unwrap();
    let b: MultiPartition = "(|1)".parse().unwrap();
    assert!(order_h(&a, &b).is_err());
}

#[test]
fn tangent_spaces_have_constant_rank() {
    for (n, max) in [(2, 2), (3, 1)] {
        for d in degrees(n, max) {
            let size: usize = d.iter().sum();
            for lam in enumerate_fixed_points(n, &d) {
                let t = tangent_character(&lam).unwrap();
                assert!(t.is_effective(), "{lam}");
                assert_eq!(t.rank(), 2 * size as i64, "{lam}");
                if lam.is_kostant() {
                    assert!(t.iter().all(|(w, _)| w.get(p_index(n)) == 0), "{lam}: {t:?}");
                }
            }
        }
    }
}

#[test]
fn tautological_character_of_the_display() {
    let n = 3;
    let m = |k: usize, q: i32, p: i32| Mono::var(k - 1, 2).mul(&Mono::var(n, q)).mul(&Mono::var(p_index(n), p));
    let expected = Character::from_weights(n, [m(1, 0, 0), m(1, 2, 0), m(2, 0, 0), m(2, 2, 0), m(3, 0, 2)]);
    assert_eq!(tautological_character(&display(), 2), expected);
    let total: i64 = (1..=n).map(|i| tautological_character(&display(), i).rank()).sum();
    assert_eq!(total, display().size() as i64);
}

#[test]
fn fixed_point_reps_are_stable_and_lie_in_their_own_cells() {
    for lam in ["(2,1|1|)", "(1,1|1|)", "(3|2|)", "(2,2,1,1|2,1|2,1,1,1)"] {
        let lam: MultiPartition = lam.parse().unwrap();
        let r = fixed_point_rep(&lam);
        r.validate().unwrap();
        assert!(moment_map(&r).iter().all(|m| m.is_zero()), "{lam}");
        assert!(is_stable(&r), "{lam}");
        assert_eq!(attracting_cell(&r).unwrap(), lam);
    }
}

#[test]
fn split_examples() {
    let n = 2;
    let xi = OneParamSubgroup::new(vec![1, 2], -7, 0);
    let rep = Mono::var(0, 2).mul(&Mono::var(1, -2));
    let att = Mono::var(1, 2).mul(&Mono::var(2, -2));
    let fixed = Mono::var(2, 2);
    let c = Character::from_weights(n, [rep, att, fixed, fixed]);
    let s = split_by_subgroup(&c, &xi).unwrap();
    assert_eq!(s.repelling, Character::from_weights(n, [rep]));
    assert_eq!(s.attracting, Character::from_weights(n, [att]));
    assert_eq!(s.fixed.multiplicity(&fixed), 2);
    let wall = Mono::var(0, 2).mul(&Mono::var(1, -1));
    let c = Character::from_weights(n, [wall]);
    assert_eq!(split_by_subgroup(&c, &xi), Err(GeometryError::Wall(wall)));
}

#[test]
fn exterior_algebra_examples() {
    let n = 2;
    let one = LaurentPoly::one(n);
    let u1 = Mono::var(0, 2);
    let q2 = Mono::var(2, 2);
    let c = Character::from_weights(n, [u1]);
    assert_eq!(lambda_exterior_dual(&c).unwrap(), one.sub(&LaurentPoly::monomial(n, u1.inv(), 1)));
    let c = Character::from_weights(n, [q2, q2]);
    let f = one.sub(&LaurentPoly::monomial(n, q2.inv(), 1));
    assert_eq!(lambda_exterior_dual(&c).unwrap(), f.mul(&f));
    assert_eq!(lambda_exterior_dual(&Character::new(n)).unwrap(), one);
    let mut c = Character::new(n);
    c.add_weight(u1, -1);
    assert!(lambda_exterior_dual(&c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_form_roundtrips(rows in prop::collection::vec(prop::collection::vec(1usize..4, 0..4), 2..5)) {
        let rows: Vec<Vec<usize>> = rows.into_iter().map(|mut r| { r.sort_unstable_by(|a, b| b.cmp(a)); r }).collect();
        let n = rows.len();
        let lam = MultiPartition::new(n, rows).unwrap();
        let back: MultiPartition = lam.to_string().parse().unwrap();
        prop_assert_eq!(&back, &lam);
        let json: MultiPartition = serde_json::from_str(&serde_json::to_string(&lam).unwrap()).unwrap();
        prop_assert_eq!(json, lam);
    }
}
