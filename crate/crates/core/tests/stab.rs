use std::sync::Arc;

use laumon_core::action::ActionEngine;
use laumon_core::partitions::{attracting_preceq, enumerate_fixed_points, MultiPartition};
use laumon_core::ring::{p_index, LaurentPoly, Mono, RationalFunction};
use laumon_core::stab::{
    allowed_points, check_stab_axioms, forced_candidate, random_lift_problem, rigidity_check, solve_degree_lift,
    stab_diagonal, unique_fixed_point, verify_lift, weight_l, FractionalWeight, LiftProblem, LiftResult, StabCandidate,
};
use laumon_core::verma::Verma;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every pair `lam < mu` in the attracting order.
fn comparable_pairs(n: usize, d: &[usize]) -> Vec<(MultiPartition, MultiPartition)> {
    let fps = enumerate_fixed_points(n, d);
    let mut out = Vec::new();
    for l in &fps {
        for m in &fps {
            if m != l && attracting_preceq(l, m).unwrap() {
                out.push((l.clone(), m.clone()));
            }
        }
    }
    out
}

#[test]
fn degree_axiom_against_allowed_points() {
    let n = 2;
    let mut with_points = 0;
    for d in [[2, 1], [1, 2], [2, 2]] {
        for (lam, mu) in comparable_pairs(n, &d) {
            let diag = stab_diagonal(&lam).unwrap();
            let mut cand = forced_candidate(&lam).unwrap();
            let big = LaurentPoly::monomial(n, Mono::var(0, 6), 1).mul(&diag);
            cand.restrictions.set(mu.clone(), RationalFunction::from_poly(big));
            let rep = check_stab_axioms(&cand).unwrap();
            assert!(rep.support.is_empty() && rep.diagonal.is_empty());
            assert_eq!(rep.degree.len(), 1, "{lam} {mu}");
            assert_eq!(rep.degree[0].mu, mu);

            // A monomial at a lattice point allowed for the shift wL(mu) - wL(lam) passes.
            let s = weight_l(&mu).sub(&weight_l(&lam));
            let allowed = allowed_points(&diag, &s).unwrap();
            with_points += usize::from(!allowed.is_empty());
            for x in allowed {
                let m = Mono::var(0, x[0] as i32).mul(&Mono::var(1, x[1] as i32)).mul(&Mono::var(p_index(n), x[2] as i32));
                cand.restrictions.set(mu.clone(), RationalFunction::monomial(n, m, 1));
                assert!(check_stab_axioms(&cand).unwrap().passes(), "{lam} {mu} {x:?}");
            }
        }
    }
    assert!(with_points > 0);
}

#[test]
fn diagonal_must_match_up_to_a_unit() {
    let n = 2;
    let lam: MultiPartition = "(1,1|)".parse().unwrap();
    let diag = stab_diagonal(&lam).unwrap();
    let mut cand = forced_candidate(&lam).unwrap();
    let unit = RationalFunction::monomial(n, Mono::var(1, 3).mul(&Mono::var(2, -1)), -1);
    cand.restrictions.set(lam.clone(), RationalFunction::from_poly(diag.clone()).mul(&unit));
    assert!(check_stab_axioms(&cand).unwrap().passes());
    let skewed = diag.mul(&LaurentPoly::one(n).add(&LaurentPoly::u(n, 1)));
    cand.restrictions.set(lam.clone(), RationalFunction::from_poly(skewed));
    assert_eq!(check_stab_axioms(&cand).unwrap().diagonal.len(), 1);
    cand.restrictions.set(lam, RationalFunction::zero(n));
    assert_eq!(check_stab_axioms(&cand).unwrap().diagonal.len(), 1);
}

#[test]
fn forced_candidates_are_rigid() {
    for n in [2, 3] {
        let v = Verma::new(Arc::new(ActionEngine::new(n)));
        let mut seen = 0;
        for d in [vec![1; n], [vec![2], vec![0; n - 1]].concat(), [vec![0; n - 1], vec![1]].concat()] {
            let Some(lam) = unique_fixed_point(&v, &d) else { continue };
            seen += 1;
            let cand = forced_candidate(&lam).unwrap();
            assert!(check_stab_axioms(&cand).unwrap().passes(), "{lam}");
            let r = rigidity_check(&v, &cand).unwrap();
            assert!(r.passes(), "{lam}: {:?}", r.violations);
        }
        assert!(seen > 0);
    }
}

#[test]
fn candidate_json_roundtrip() {
    let lam: MultiPartition = "(2|1)".parse().unwrap();
    let cand = forced_candidate(&lam).unwrap();
    let back: StabCandidate = serde_json::from_str(&serde_json::to_string(&cand).unwrap()).unwrap();
    assert_eq!(back.lambda, cand.lambda);
    assert_eq!(back.restrictions, cand.restrictions);
    // A restriction at a point of the wrong degree is rejected.
    let bad = r#"{"lambda":[[1],[]],"restrictions":[{"mu":[[],[1]],"value":{"num":[],"den":[]}}]}"#;
    assert!(serde_json::from_str::<StabCandidate>(bad).is_err());
}

fn one_variable(alpha: LaurentPoly) -> LiftProblem {
    let n = 2;
    LiftProblem { p: LaurentPoly::one(n).sub(&LaurentPoly::u(n, 1)), alpha, s: FractionalWeight::zero(n + 1), hbound: None }
}

#[test]
fn canonical_lifts() {
    let n = 2;
    let a = LaurentPoly::u(n, 1);
    for k in 2..5 {
        let prob = one_variable(a.pow(k));
        let LiftResult::Found(lift) = solve_degree_lift(&prob).unwrap() else { panic!("a^{k} has a lift") };
        assert!(lift.alpha_prime.is_one(), "a^{k}: {}", lift.alpha_prime);
        assert!(verify_lift(&prob, &lift).unwrap());
    }
    // The q-part of the coefficients rides along.
    let prob = one_variable(a.pow(2).mul(&LaurentPoly::q(n)));
    let LiftResult::Found(lift) = solve_degree_lift(&prob).unwrap() else { panic!() };
    assert_eq!(lift.alpha_prime, RationalFunction::from_poly(LaurentPoly::q(n)));
}

#[test]
fn small_box_is_exhausted() {
    let n = 2;
    let mut prob = one_variable(LaurentPoly::u(n, 1).pow(3));
    prob.hbound = Some(vec![(0, 0); n + 1]);
    assert!(matches!(solve_degree_lift(&prob).unwrap(), LiftResult::BoundExhausted { .. }));
}

#[test]
fn infinitesimal_shift_drops_boundary_points() {
    let n = 2;
    let p = LaurentPoly::one(n).sub(&LaurentPoly::u(n, 1));
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::from_integer(1.into());
    let s = FractionalWeight { vector: vec![one, zero.clone(), zero.clone()], infinitesimal: true };
    assert_eq!(allowed_points(&p, &s).unwrap(), vec![vec![1, 0, 0]]);
    assert_eq!(allowed_points(&p, &FractionalWeight::zero(3)).unwrap().len(), 2);
}

#[test]
fn planted_problems_are_solved() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..25 {
        let prob = random_lift_problem(&mut rng, true);
        match solve_degree_lift(&prob).unwrap() {
            LiftResult::Found(lift) => assert!(verify_lift(&prob, &lift).unwrap()),
            LiftResult::BoundExhausted { hbound } => panic!("planted instance exhausted {hbound:?}"),
        }
    }
}
