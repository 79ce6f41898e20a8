//! Stable-envelope candidates: the axioms, the rigidity pairing with PBW
//! vectors, and the local degree-constrained lifting problem.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{det_weight, ActionError, KClass};
use crate::geometry::{is_a_trivial, lambda_exterior_dual, tangent_character, vw_characters, GeometryError};
use crate::partitions::{attracting_preceq, order_h, MultiPartition, PartitionError};
use crate::ring::linalg::{rref, Field, Matrix};
use crate::ring::{
    a_projection, is_bounded_by_polytope, newton_polytope_a, polytope_contains_eps, q_index, LaurentPoly, Mono, NewtonPolytopeA,
    OneParamSubgroup, RationalFunction, RingError,
};
use crate::verma::{Verma, VermaError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabError {
    #[error(transparent)]
    Verma(#[from] VermaError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("invalid lifting problem: {0}")]
    BadLift(String),
}

/// A rational vector in `char(A) (x) Q`, optionally scaled by an infinitesimal `eps > 0`.
///
/// Coordinates are the exponents of `u_1, ..., u_n, p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionalWeight {
    #[serde(with = "rat_vec_serde")]
    pub vector: Vec<BigRational>,
    /// True when the weight is `eps * vector` for an infinitesimal `eps`.
    pub infinitesimal: bool,
}

mod rat_vec_serde {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?.into_iter().map(|x| x.parse().map_err(serde::de::Error::custom)).collect()
    }
}

impl FractionalWeight {
    pub fn zero(dim: usize) -> Self {
        FractionalWeight { vector: vec![BigRational::zero(); dim], infinitesimal: false }
    }

    pub fn sub(&self, o: &Self) -> Self {
        FractionalWeight {
            vector: self.vector.iter().zip(&o.vector).map(|(a, b)| a - b).collect(),
            infinitesimal: self.infinitesimal || o.infinitesimal,
        }
    }
}

/// `weight_A L|_lam` for `L = (prod_i det V_i)^eps`.
pub fn weight_l(lam: &MultiPartition) -> FractionalWeight {
    let v = a_projection(lam.n, &det_weight(lam));
    FractionalWeight { vector: v.into_iter().map(|x| BigRational::from_integer(x.into())).collect(), infinitesimal: true }
}

/// Where a candidate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    LoadedFromFile,
    Solver,
}

/// A candidate stable envelope `s_lam`, given by its fixed-point restrictions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabCandidate {
    pub lambda: MultiPartition,
    pub restrictions: KClass,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct CandidateEntry {
    mu: MultiPartition,
    value: RationalFunction,
}

#[derive(Serialize, Deserialize)]
struct CandidateJson {
    lambda: MultiPartition,
    restrictions: Vec<CandidateEntry>,
}

impl Serialize for StabCandidate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CandidateJson {
            lambda: self.lambda.clone(),
            restrictions: self.restrictions.restrictions.iter().map(|(mu, v)| CandidateEntry { mu: mu.clone(), value: v.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StabCandidate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = CandidateJson::deserialize(d)?;
        let mut k = KClass::zero(raw.lambda.n, &raw.lambda.degree());
        for e in raw.restrictions {
            k.set(e.mu, e.value);
        }
        k.validate().map_err(serde::de::Error::custom)?;
        Ok(StabCandidate { lambda: raw.lambda, restrictions: k, provenance: Provenance::LoadedFromFile })
    }
}

/// `Lambda(V^mov_lam)^vee`, the prescribed diagonal restriction.
pub fn stab_diagonal(lam: &MultiPartition) -> Result<LaurentPoly, StabError> {
    let (v, _) = vw_characters(lam);
    Ok(lambda_exterior_dual(&v.moving_part())?)
}

/// The candidate supported at `lam` alone, with the prescribed diagonal.
///
/// When `lam` is the only fixed point of its degree this is the stable envelope.
pub fn forced_candidate(lam: &MultiPartition) -> Result<StabCandidate, StabError> {
    let value = RationalFunction::from_poly(stab_diagonal(lam)?);
    Ok(StabCandidate { lambda: lam.clone(), restrictions: KClass::fixed_point(lam, value), provenance: Provenance::Solver })
}

/// One failed axiom at one fixed point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: String,
    pub mu: MultiPartition,
    pub detail: String,
}

/// Per-axiom outcome of [`check_stab_axioms`].
#[derive(Clone, Debug, Default, Serialize)]
pub struct AxiomReport {
    pub support: Vec<AxiomViolation>,
    pub diagonal: Vec<AxiomViolation>,
    pub degree: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.support.is_empty() && self.diagonal.is_empty() && self.degree.is_empty()
    }
}

/// True if `x` is `+-` a monomial.
fn is_unit(x: &RationalFunction) -> bool {
    x.is_unit_monomial()
}

/// Checks the three stable-envelope axioms.
///
/// * Support: `s|_mu = 0` unless `mu` is in the attracting closure of `lam`.
/// * Diagonal: `s|_lam = Lambda(V^mov_lam)^vee` up to a unit monomial.
/// * Degree: for `mu` strictly above `lam`, `deg_A s|_mu + eps wL(lam)` lies in
///   `deg_A Lambda(V^mov_lam)^vee + eps wL(mu)` for all small `eps > 0`.
pub fn check_stab_axioms(cand: &StabCandidate) -> Result<AxiomReport, StabError> {
    let lam = &cand.lambda;
    let mut report = AxiomReport::default();
    let diag = stab_diagonal(lam)?;
    let outer = newton_polytope_a(&diag)?;
    let wl = weight_l(lam);
    let zero = vec![BigRational::zero(); outer.dim];
    let mut seen_diagonal = false;
    for (mu, value) in &cand.restrictions.restrictions {
        if mu == lam {
            seen_diagonal = true;
            let ratio = value.div_poly(&diag);
            if !is_unit(&ratio) {
                report.diagonal.push(AxiomViolation { axiom: "diagonal".into(), mu: mu.clone(), detail: format!("s|_lam / Lambda = {ratio}") });
            }
            continue;
        }
        if !attracting_preceq(lam, mu)? {
            report.support.push(AxiomViolation { axiom: "support".into(), mu: mu.clone(), detail: format!("nonzero restriction {value}") });
            continue;
        }
        let Some(poly) = value.as_poly() else {
            report.degree.push(AxiomViolation { axiom: "degree".into(), mu: mu.clone(), detail: format!("restriction is not a Laurent polynomial: {value}") });
            continue;
        };
        let inner = newton_polytope_a(poly)?;
        let direction = wl.sub(&weight_l(mu)).vector;
        if !polytope_contains_eps(&outer, &inner, &zero, &direction)? {
            report.degree.push(AxiomViolation {
                axiom: "degree".into(),
                mu: mu.clone(),
                detail: format!("deg_A of {value} leaves the shifted polytope of {diag}"),
            });
        }
    }
    if !seen_diagonal {
        report.diagonal.push(AxiomViolation { axiom: "diagonal".into(), mu: lam.clone(), detail: "s|_lam = 0".into() });
    }
    Ok(report)
}

/// The pairing `(s~_lam, |e_mu>~)` with its per-fixed-point certificates.
#[derive(Clone, Debug, Serialize)]
pub struct RigidityEntry {
    pub mu: MultiPartition,
    pub value: RationalFunction,
    /// The value involves no `u_i` and no `p`.
    pub a_independent: bool,
    /// Every summand `f_{lam nu} g_{mu nu}` passes the polytope boundedness test.
    pub summands_bounded: bool,
    /// `h(mu)` compared with `h(lam)`.
    #[serde(serialize_with = "serialize_ordering")]
    pub order: std::cmp::Ordering,
}

fn serialize_ordering<S: serde::Serializer>(o: &std::cmp::Ordering, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_i8(*o as i8)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RigidityReport {
    pub entries: Vec<RigidityEntry>,
    pub violations: Vec<String>,
}

impl RigidityReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `f_{lam nu} = s_lam|_nu / Lambda(T_nu^{<0})^vee`.
fn stab_quotient(value: &RationalFunction, nu: &MultiPartition, xi: &OneParamSubgroup) -> Result<RationalFunction, StabError> {
    let t = tangent_character(nu)?;
    let n = nu.n;
    let negative = t.filter(|w| !is_a_trivial(n, w) && xi.pairing(w) < 0);
    Ok(value.div_poly(&lambda_exterior_dual(&negative)?))
}

/// Twist turning the symmetric Shapovalov norm into the plain localization
/// pairing: `D|_nu det(T_nu)^{1/2}`.
fn rigidity_twist(nu: &MultiPartition) -> Result<RationalFunction, StabError> {
    let t = tangent_character(nu)?;
    let mut det = Mono::ONE;
    for (w, m) in t.iter() {
        det = det.mul(&w.pow(*m as i32));
    }
    let half = det.sqrt();
    Ok(RationalFunction::monomial(nu.n, det_weight(nu).mul(&half), 1))
}

/// Pairs the candidate with every normalized PBW vector of its degree.
///
/// The pairing is `sum_nu s~|_nu |e_mu>~|_nu d_nu` with `s~ = s (x) D (x) det(T)^{1/2}`.
/// The extra `det(T)^{1/2}` compensates for the symmetric normalization
/// of the Shapovalov norms `d_nu`, so the sum equals
/// `sum_nu s|_nu |e_mu>~|_nu / Lambda(T_nu)^vee = sum_nu f_{lam nu} g_{mu nu}`.
pub fn rigidity_check(verma: &Verma, cand: &StabCandidate) -> Result<RigidityReport, StabError> {
    let lam = &cand.lambda;
    let n = lam.n;
    let d = lam.degree();
    let engine = verma.engine();
    let fps = engine.fixed_points(&d);
    let total: usize = d.iter().sum();
    let xi = OneParamSubgroup::default_sigma_a(n, total);
    let twisted = cand.restrictions.twist(|nu| rigidity_twist(nu).expect("tangent weights at fixed points are squares"));
    let pbw = verma.pbw_basis(&d)?;
    let f_quot: BTreeMap<MultiPartition, RationalFunction> = cand
        .restrictions
        .restrictions
        .iter()
        .map(|(nu, v)| Ok((nu.clone(), stab_quotient(v, nu, &xi)?)))
        .collect::<Result<_, StabError>>()?;
    let entries: Vec<RigidityEntry> = pbw
        .par_iter()
        .map(|e| {
            let value = engine.pair(&twisted, &e.normalized)?;
            let mut summands_bounded = true;
            for (nu, f) in &f_quot {
                let g = e.normalized.get(nu);
                if g.is_zero() {
                    continue;
                }
                let g = g.div_poly(&crate::verma::nonnegative_denominator(nu, &xi)?);
                summands_bounded &= is_bounded_by_polytope(&f.mul(&g))?;
            }
            let a_independent = (0..n).all(|i| !value.contains_var(i)) && !value.contains_var(crate::ring::p_index(n));
            Ok(RigidityEntry { mu: e.lambda.clone(), value, a_independent, summands_bounded, order: order_h(&e.lambda, lam)? })
        })
        .collect::<Result<_, StabError>>()?;
    let mut report = RigidityReport { entries, violations: Vec::new() };
    for e in &report.entries {
        if !e.a_independent {
            report.violations.push(format!("pairing with {} depends on A: {}", e.mu, e.value));
        }
        if e.order == std::cmp::Ordering::Greater && !e.value.is_zero() {
            report.violations.push(format!("pairing with {} above lam is {}", e.mu, e.value));
        }
        if &e.mu == lam && !is_unit(&e.value) {
            report.violations.push(format!("diagonal pairing {} is not a unit monomial", e.value));
        }
    }
    debug_assert_eq!(report.entries.len(), fps.len());
    Ok(report)
}

/// A lifting problem: find `alpha' = alpha + h P` with `deg_A alpha'` inside `deg_A P + s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftProblem {
    pub p: LaurentPoly,
    pub alpha: LaurentPoly,
    pub s: FractionalWeight,
    /// Inclusive exponent ranges for `h`, one per `A`-coordinate.
    #[serde(default)]
    pub hbound: Option<Vec<(i64, i64)>>,
}

/// A solution of the lifting problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lift {
    pub alpha_prime: RationalFunction,
    pub h: RationalFunction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LiftResult {
    Found(Lift),
    /// No lift with `h` supported in the given box.
    BoundExhausted { hbound: Vec<(i64, i64)> },
}

/// Splits a Laurent polynomial by `A`-monomial; values are polynomials in `q`.
fn by_a_monomial(f: &LaurentPoly) -> BTreeMap<Vec<i64>, LaurentPoly> {
    let n = f.nvars();
    let qi = q_index(n);
    let mut parts: BTreeMap<Vec<i64>, Vec<(Mono, BigInt)>> = BTreeMap::new();
    for (m, c) in f.terms() {
        parts.entry(a_projection(n, m)).or_default().push((Mono::var(qi, m.get(qi)), c.clone()));
    }
    parts.into_iter().map(|(k, v)| (k, LaurentPoly::from_terms(n, v))).collect()
}

fn a_monomial(n: usize, a: &[i64]) -> Mono {
    let mut m = Mono::ONE;
    for (i, &e) in a.iter().enumerate().take(n) {
        m.set(i, e as i32);
    }
    m.set(crate::ring::p_index(n), a[n] as i32);
    m
}

/// Lattice points of `deg_A P + s`; with an infinitesimal `s` these are the
/// points `x` of `deg_A P` with `x - eps s` still inside for small `eps > 0`.
pub fn allowed_points(p: &LaurentPoly, s: &FractionalWeight) -> Result<Vec<Vec<i64>>, StabError> {
    let poly = newton_polytope_a(p)?;
    if s.infinitesimal {
        let neg: Vec<BigRational> = s.vector.iter().map(|x| -x).collect();
        let zero = vec![BigRational::zero(); poly.dim];
        let mut out = Vec::new();
        for x in poly.lattice_points() {
            let point = NewtonPolytopeA::hull(poly.dim, vec![x.iter().map(|&v| BigRational::from_integer(v.into())).collect()]);
            if polytope_contains_eps(&poly, &point, &zero, &neg)? {
                out.push(x);
            }
        }
        Ok(out)
    } else {
        Ok(poly.shifted(&s.vector).lattice_points())
    }
}

/// Default support box for `h`: the bounding box of `deg_A alpha` and
/// `deg_A P + s`, widened by 2 along every coordinate that either uses.
pub fn default_hbound(p: &LaurentPoly, alpha: &LaurentPoly, s: &FractionalWeight) -> Result<Vec<(i64, i64)>, StabError> {
    let n = p.nvars();
    let mut pts: Vec<Vec<i64>> = by_a_monomial(alpha).into_keys().collect();
    pts.extend(allowed_points(p, s)?);
    pts.extend(by_a_monomial(p).into_keys());
    let dim = n + 1;
    let mut out = Vec::with_capacity(dim);
    for k in 0..dim {
        let lo = pts.iter().map(|v| v[k]).min().unwrap_or(0);
        let hi = pts.iter().map(|v| v[k]).max().unwrap_or(0);
        let used = pts.iter().any(|v| v[k] != 0);
        out.push(if used { (lo - 2, hi + 2) } else { (0, 0) });
    }
    Ok(out)
}

fn box_points(bound: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in bound {
        out = out.into_iter().flat_map(|v| (lo..=hi).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Solves the linear system over a coefficient field; free unknowns are set to 0.
fn solve_system<F: Field>(rows: Matrix<F>, unknowns: usize, zero: F) -> Option<Vec<F>> {
    let mut m = rows;
    let pivots = rref(&mut m);
    if pivots.last() == Some(&unknowns) {
        return None;
    }
    let mut x = vec![zero; unknowns];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][unknowns].clone();
    }
    Some(x)
}

fn q_poly_to_rat(p: &LaurentPoly) -> BigRational {
    p.terms().first().map_or_else(BigRational::zero, |(_, c)| BigRational::from_integer(c.clone()))
}

/// Solves the local lifting problem.
///
/// The unknowns are the coefficients of `h` on the support box and the
/// coefficients of `alpha'` on the allowed lattice points, all in `Q(q)`.
/// The equations say `alpha' - h P = alpha` coefficientwise. Unknowns are
/// ordered with `h` first and the allowed monomials of `alpha'` in increasing
/// order, and every free unknown is set to zero, which selects one canonical
/// lift. In the one-variable example `P = 1 - a`, `alpha = a^2` this lift is `alpha' = 1`.
pub fn solve_degree_lift(prob: &LiftProblem) -> Result<LiftResult, StabError> {
    let p = &prob.p;
    let alpha = &prob.alpha;
    let n = p.nvars();
    if p.is_zero() {
        return Err(StabError::BadLift("P is zero".into()));
    }
    if alpha.nvars() != n || prob.s.vector.len() != n + 1 {
        return Err(StabError::BadLift("ring dimensions do not match".into()));
    }
    let hbound = match &prob.hbound {
        Some(b) => b.clone(),
        None => default_hbound(p, alpha, &prob.s)?,
    };
    if hbound.len() != n + 1 {
        return Err(StabError::BadLift(format!("hbound needs {} ranges", n + 1)));
    }
    let p_parts = by_a_monomial(p);
    let a_parts = by_a_monomial(alpha);
    let allowed = allowed_points(p, &prob.s)?;
    let hpts = box_points(&hbound);
    let nh = hpts.len();
    let unknowns = nh + allowed.len();

    // Equation rows indexed by A-monomial.
    let mut eq_index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let index = |k: Vec<i64>, eq: &mut BTreeMap<Vec<i64>, usize>| {
        let len = eq.len();
        *eq.entry(k).or_insert(len)
    };
    // (row, column) -> coefficient polynomial in q.
    let mut entries: BTreeMap<(usize, usize), LaurentPoly> = BTreeMap::new();
    for (c, b) in hpts.iter().enumerate() {
        for (pm, pc) in &p_parts {
            let key: Vec<i64> = b.iter().zip(pm).map(|(x, y)| x + y).collect();
            let r = index(key, &mut eq_index);
            entries.insert((r, c), pc.neg());
        }
    }
    for (k, a) in allowed.iter().enumerate() {
        let r = index(a.clone(), &mut eq_index);
        entries.insert((r, nh + k), LaurentPoly::one(n));
    }
    let mut rhs: BTreeMap<usize, LaurentPoly> = BTreeMap::new();
    for (am, ac) in &a_parts {
        let r = index(am.clone(), &mut eq_index);
        rhs.insert(r, ac.clone());
    }
    let rows = eq_index.len();
    let q_free = p.is_u_free() && !p.contains_var(q_index(n)) && !alpha.contains_var(q_index(n));
    let solution: Option<Vec<RationalFunction>> = if q_free {
        let mut m = vec![vec![BigRational::zero(); unknowns + 1]; rows];
        for ((r, c), v) in &entries {
            m[*r][*c] = q_poly_to_rat(v);
        }
        for (r, v) in &rhs {
            m[*r][unknowns] = q_poly_to_rat(v);
        }
        solve_system(m, unknowns, BigRational::zero()).map(|x| x.into_iter().map(|v| rat_to_rf(n, &v)).collect())
    } else {
        let mut m = vec![vec![RationalFunction::zero(n); unknowns + 1]; rows];
        for ((r, c), v) in &entries {
            m[*r][*c] = RationalFunction::from_poly(v.clone());
        }
        for (r, v) in &rhs {
            m[*r][unknowns] = RationalFunction::from_poly(v.clone());
        }
        solve_system(m, unknowns, RationalFunction::zero(n))
    };
    let Some(x) = solution else {
        return Ok(LiftResult::BoundExhausted { hbound });
    };
    let assemble = |pts: &[Vec<i64>], coeffs: &[RationalFunction]| {
        let terms: Vec<RationalFunction> = pts
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(pt, c)| c.mul(&RationalFunction::monomial(n, a_monomial(n, pt), 1)))
            .collect();
        crate::action::sum_rf(n, &terms)
    };
    let h = assemble(&hpts, &x[..nh]);
    let alpha_prime = assemble(&allowed, &x[nh..]);
    Ok(LiftResult::Found(Lift { alpha_prime, h }))
}

fn rat_to_rf(n: usize, v: &BigRational) -> RationalFunction {
    RationalFunction::new(LaurentPoly::constant(n, v.numer().clone()), LaurentPoly::constant(n, v.denom().clone()))
}

/// Independent re-check of a lift: `(alpha' - alpha) / P` reduces to a
/// fraction whose denominator involves no `A`-variable, so `P` divides
/// `alpha' - alpha` over `Q(q)`, and every `A`-monomial of `alpha'` lies in
/// `deg_A P + s`.
pub fn verify_lift(prob: &LiftProblem, lift: &Lift) -> Result<bool, StabError> {
    let n = prob.p.nvars();
    let a_free = |f: &LaurentPoly| (0..n).all(|v| !f.contains_var(v)) && !f.contains_var(crate::ring::p_index(n));
    if !a_free(lift.alpha_prime.den()) {
        return Ok(false);
    }
    let quotient = lift.alpha_prime.sub(&RationalFunction::from_poly(prob.alpha.clone())).div_poly(&prob.p);
    if !a_free(quotient.den()) {
        return Ok(false);
    }
    let allowed: BTreeSet<Vec<i64>> = allowed_points(&prob.p, &prob.s)?.into_iter().collect();
    Ok(by_a_monomial(lift.alpha_prime.num()).keys().all(|k| allowed.contains(k)))
}

/// A random lifting problem in at most three `A`-variables with supports of at most 20 points.
///
/// A planted problem is built backwards from a known solution: `alpha'` is
/// supported on the allowed points, `h` on exponents `0..=1`, and
/// `alpha = alpha' - h P`. Its default `h`-box contains the planted `h`, so it
/// is solvable within the bound.
pub fn random_lift_problem<R: Rng>(rng: &mut R, planted: bool) -> LiftProblem {
    let n = 2;
    let nvars = rng.gen_range(1..=3usize);
    // A-coordinates available: u1, u2, p.
    let mut coords = vec![0usize, 1, 2];
    for i in (1..coords.len()).rev() {
        let j = rng.gen_range(0..=i);
        coords.swap(i, j);
    }
    coords.truncate(nvars);
    let with_q = rng.gen_bool(0.3);
    let coeff = |rng: &mut R| -> BigInt {
        loop {
            let c = rng.gen_range(-3..=3);
            if c != 0 {
                return BigInt::from(c);
            }
        }
    };
    let monomial = |rng: &mut R, max_exp: i64| {
        let mut a = vec![0i64; n + 1];
        for &c in &coords {
            a[c] = rng.gen_range(0..=max_exp);
        }
        let mut m = a_monomial(n, &a);
        if with_q {
            m.set(q_index(n), rng.gen_range(-1..=1));
        }
        m
    };
    let random_poly = |rng: &mut R, terms: usize, max_exp: i64| {
        let t: Vec<(Mono, BigInt)> = (0..terms).map(|_| (monomial(rng, max_exp), coeff(rng))).collect();
        LaurentPoly::from_terms(n, t)
    };
    let p = loop {
        let t = rng.gen_range(2..=4);
        let p = random_poly(rng, t, 1);
        if p.len() >= 2 {
            break p;
        }
    };
    let mut s = FractionalWeight::zero(n + 1);
    if rng.gen_bool(0.5) {
        for &c in &coords {
            s.vector[c] = BigRational::new(rng.gen_range(-2..=2).into(), BigInt::from(rng.gen_range(1..=3)));
        }
        s.infinitesimal = rng.gen_bool(0.5);
    }
    let alpha = if planted {
        let allowed = allowed_points(&p, &s).expect("P is nonzero");
        let mut terms = Vec::new();
        for pt in &allowed {
            if rng.gen_bool(0.5) {
                terms.push((a_monomial(n, pt), coeff(rng)));
            }
        }
        let alpha_prime = LaurentPoly::from_terms(n, terms);
        let t = rng.gen_range(1..=4);
        let h = random_poly(rng, t, 1);
        alpha_prime.sub(&h.mul(&p))
    } else {
        let t = rng.gen_range(1..=6);
        random_poly(rng, t, 3)
    };
    LiftProblem { p, alpha, s, hbound: None }
}

/// The fixed point of degree `d` when there is exactly one.
pub fn unique_fixed_point(verma: &Verma, d: &[usize]) -> Option<MultiPartition> {
    let fps = verma.engine().fixed_points(d);
    (fps.len() == 1).then(|| fps.points[0].clone())
}
