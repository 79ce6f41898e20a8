use laumon_core::ring::{
    gcd, is_bounded_by_polytope, limit_along, newton_polytope_a, polytope_contains, LaurentPoly, LimitResult, Mono,
    OneParamSubgroup, RationalFunction, RingError,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const N: usize = 2;

/// Laurent polynomials in `u1, u2, q, p` with exponents in `-e..=e`.
fn poly(max_terms: usize, e: i32) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::array::uniform4(-e..=e), -4i64..=4), 1..=max_terms).prop_map(|terms| {
        LaurentPoly::from_terms(N, terms.into_iter().map(|(ex, c)| (Mono::from_slice(&ex), BigInt::from(c))))
    })
}

fn nonzero_poly(max_terms: usize, e: i32) -> impl Strategy<Value = LaurentPoly> {
    poly(max_terms, e).prop_filter("nonzero", |p| !p.is_zero())
}

fn rf() -> impl Strategy<Value = RationalFunction> {
    (poly(3, 2), nonzero_poly(3, 1)).prop_map(|(a, b)| RationalFunction::new(a, b))
}

/// A-projection `(u1, u2, p)` of a monomial.
fn a_part(m: &Mono) -> [i64; 3] {
    [m.get(0) as i64, m.get(1) as i64, m.get(3) as i64]
}

/// No two distinct A-monomials of `f` pair equally with `xi`.
fn generic_for(f: &LaurentPoly, xi: &[i64; 3]) -> bool {
    let mut seen: Vec<([i64; 3], i64)> = Vec::new();
    for (m, _) in f.terms() {
        let a = a_part(m);
        let v = a[0] * xi[0] + a[1] * xi[1] + a[2] * xi[2];
        if seen.iter().any(|(b, w)| *w == v && *b != a) {
            return false;
        }
        seen.push((a, v));
    }
    true
}

fn subgroup(xi: &[i64; 3]) -> OneParamSubgroup {
    OneParamSubgroup::new(vec![xi[0], xi[1]], xi[2], 0)
}

fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Integer directions likely to separate a point from a small polytope:
/// a cube of small vectors plus cross products of difference vectors and their sums.
fn candidate_directions(f: &RationalFunction) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for a in -3..=3 {
        for b in -3..=3 {
            for c in -3..=3 {
                out.push([a, b, c]);
            }
        }
    }
    let num: Vec<[i64; 3]> = f.num().terms().iter().map(|(m, _)| a_part(m)).collect();
    let den: Vec<[i64; 3]> = f.den().terms().iter().map(|(m, _)| a_part(m)).collect();
    let sub = |x: [i64; 3], y: [i64; 3]| [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let mut rays = Vec::new();
    for v in &num {
        for i in 0..den.len() {
            rays.push(sub(*v, den[i]));
            for j in i + 1..den.len() {
                let r = cross(sub(*v, den[i]), sub(*v, den[j]));
                rays.push(r);
                rays.push([-r[0], -r[1], -r[2]]);
            }
        }
    }
    for (i, r) in rays.iter().enumerate() {
        out.push(*r);
        for s in &rays[i + 1..] {
            out.push([r[0] + s[0], r[1] + s[1], r[2] + s[2]]);
            out.push([2 * r[0] + s[0], 2 * r[1] + s[1], 2 * r[2] + s[2]]);
            out.push([r[0] + 2 * s[0], r[1] + 2 * s[1], r[2] + 2 * s[2]]);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ring_axioms(a in poly(4, 2), b in poly(4, 2), c in poly(4, 2)) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn exact_division_undoes_multiplication(a in poly(4, 2), b in nonzero_poly(3, 2)) {
        prop_assert_eq!(a.mul(&b).div_exact(&b), Some(a));
    }

    #[test]
    fn gcd_divides_both(a in nonzero_poly(3, 1), b in nonzero_poly(3, 1), c in nonzero_poly(2, 1)) {
        let (x, y) = (a.mul(&c), b.mul(&c));
        let g = gcd(&x, &y);
        prop_assert!(x.div_exact(&g).is_some());
        prop_assert!(y.div_exact(&g).is_some());
        // the common factor survives up to a unit
        prop_assert!(g.div_exact(&c.split_monomial().1).is_some() || g.mul(&LaurentPoly::constant(N, -1)).div_exact(&c.split_monomial().1).is_some());
    }

    #[test]
    fn field_axioms(f in rf(), g in rf(), h in rf()) {
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.add(&g).add(&h), f.add(&g.add(&h)));
        prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
        if !f.is_zero() {
            prop_assert!(f.mul(&f.inv()).is_one());
        }
    }

    #[test]
    fn canonical_form_is_unique(a in poly(3, 1), b in nonzero_poly(3, 1), c in nonzero_poly(2, 1)) {
        let f = RationalFunction::new(a.clone(), b.clone());
        let g = RationalFunction::new(a.mul(&c), b.mul(&c));
        prop_assert_eq!(&f, &g);
        let back: RationalFunction = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn limits_are_multiplicative(f in rf(), g in rf(), xi in prop::array::uniform3(-5i64..=5)) {
        let s = subgroup(&xi);
        let fg = f.mul(&g);
        if let (Ok(a), Ok(b), Ok(c)) = (limit_along(&f, &s), limit_along(&g, &s), limit_along(&fg, &s)) {
            match (a, b) {
                (LimitResult::Finite(x), LimitResult::Finite(y)) => {
                    prop_assert_eq!(c, LimitResult::Finite(x.mul(&y)));
                }
                (LimitResult::Zero, LimitResult::Finite(_)) | (LimitResult::Finite(_), LimitResult::Zero) | (LimitResult::Zero, LimitResult::Zero) => {
                    prop_assert_eq!(c, LimitResult::Zero);
                }
                _ => {}
            }
        }
    }

    #[test]
    fn boundedness_matches_limits(num in nonzero_poly(3, 1), den in nonzero_poly(3, 1), xs in prop::collection::vec(prop::array::uniform3(-6i64..=6), 24)) {
        let f = RationalFunction::new(num, den);
        let bounded = is_bounded_by_polytope(&f).unwrap();
        let generic = |xi: &[i64; 3]| generic_for(f.num(), xi) && generic_for(f.den(), xi);
        if bounded {
            for xi in xs.iter().filter(|x| generic(x)) {
                let l = limit_along(&f, &subgroup(xi)).unwrap();
                prop_assert!(l.is_bounded(), "xi {:?} diverges on bounded {}", xi, f);
            }
        } else {
            let witness = candidate_directions(&f)
                .into_iter()
                .filter(|xi| generic(xi))
                .find(|xi| limit_along(&f, &subgroup(xi)) == Ok(LimitResult::Diverges));
            prop_assert!(witness.is_some(), "no diverging direction for unbounded {}", f);
        }
    }
}

#[test]
fn limit_examples() {
    let n = N;
    let u1 = LaurentPoly::u(n, 1);
    let u2 = LaurentPoly::u(n, 2);
    let q = LaurentPoly::q(n);
    let one = LaurentPoly::one(n);
    let xi = OneParamSubgroup::new(vec![1, 2], -7, 0);
    let ratio = RationalFunction::new(u2.clone(), u1.clone());
    let f = RationalFunction::from_poly(one.clone()).div(&RationalFunction::from_poly(one.clone()).sub(&ratio));
    assert_eq!(limit_along(&f, &xi).unwrap(), LimitResult::Zero);
    let q3 = RationalFunction::from_poly(q.pow(3));
    assert_eq!(limit_along(&q3, &xi).unwrap(), LimitResult::Finite(q3.clone()));
    let inv = RationalFunction::new(u1.clone(), u2.clone());
    let g = RationalFunction::from_poly(one.clone())
        .sub(&inv.mul_poly(&q))
        .div(&RationalFunction::from_poly(one.clone()).sub(&inv));
    assert_eq!(limit_along(&g, &xi).unwrap(), LimitResult::Finite(RationalFunction::one(n)));
    let with_q = OneParamSubgroup::new(vec![1, 2], -7, 1);
    assert_eq!(limit_along(&g, &with_q), Err(RingError::NotInA(1)));
}

#[test]
fn polytope_examples() {
    let n = N;
    let one = LaurentPoly::one(n);
    let u1 = LaurentPoly::u(n, 1);
    let u2 = LaurentPoly::u(n, 2);
    let q = LaurentPoly::q(n);
    assert!(matches!(newton_polytope_a(&LaurentPoly::zero(n)), Err(RingError::ZeroPolytope)));
    let seg = newton_polytope_a(&one.add(&u1.mul(&q.pow(3)))).unwrap();
    assert_eq!(seg.vertices.len(), 2);
    let square = newton_polytope_a(&one.add(&u1).mul(&one.add(&u2))).unwrap();
    assert_eq!(square.vertices.len(), 4);
    let point = newton_polytope_a(&one).unwrap();
    let zero = vec![BigRational::from_integer(0.into()); 3];
    assert!(polytope_contains(&seg, &point, &zero).unwrap());
    let long = newton_polytope_a(&one.add(&u1.mul(&u1))).unwrap();
    assert!(!polytope_contains(&seg, &long, &zero).unwrap());
    let mut half = zero.clone();
    half[0] = BigRational::new(1.into(), 2.into());
    assert!(!polytope_contains(&seg, &seg, &half).unwrap());
    assert!(polytope_contains(&seg, &seg, &zero).unwrap());
}
