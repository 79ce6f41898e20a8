//! PBW vectors, the Gram matrix of the Shapovalov form, the dual PBW basis
//! and the integrality and boundedness checks built on them.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::action::{sum_rf, ActionEngine, ActionError, Generator, KClass};
use crate::geometry::{is_a_trivial, lambda_exterior_dual, tangent_character, Character, GeometryError};
use crate::partitions::{order_h, strip_decomposition, Degree, IntervalVector, MultiPartition};
use crate::ring::linalg::{inverse, Matrix};
use crate::ring::{is_bounded_by_polytope, limit_along, p_index, LaurentPoly, LimitResult, Mono, OneParamSubgroup, RationalFunction, RingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VermaError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("the PBW vectors of degree {0:?} are linearly dependent")]
    SingularGram(Degree),
}

/// `|e_lambda> = e_lambda |empty>` together with its normalized variant.
#[derive(Clone, Debug, Serialize)]
pub struct PBWVector {
    pub lambda: MultiPartition,
    pub kclass: KClass,
    /// `kclass / prod_i u_{i+1}^{d_i}` with `u_{n+1} = u_1 p^{-1}`.
    pub normalized: KClass,
}

/// The monomial `prod_i u_{i+1}^{d_i}` with `u_{n+1} = u_1 p^{-1}`.
pub fn normalization_monomial(n: usize, d: &[usize]) -> Mono {
    let mut m = Mono::ONE;
    for (i, &di) in d.iter().enumerate() {
        let di = di as i32;
        if i + 1 < n {
            m = m.mul(&Mono::var(i + 1, di));
        } else {
            m = m.mul(&Mono::var(0, di)).mul(&Mono::var(p_index(n), -di));
        }
    }
    m
}

/// The dual PBW basis of one degree.
#[derive(Clone, Debug, Serialize)]
pub struct DualBasis {
    pub degree: Degree,
    pub points: Vec<MultiPartition>,
    /// `|e_lambda>^*` for each `lambda`.
    pub classes: BTreeMap<MultiPartition, KClass>,
}

/// A restriction that is not a Laurent polynomial with integer coefficients.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralityViolation {
    pub lambda: MultiPartition,
    pub mu: MultiPartition,
    pub value: RationalFunction,
}

/// Outcome of [`denominator_membership`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    /// The factor of the denominator that does not divide the allowed product, up to units.
    pub remainder: LaurentPoly,
    /// True if an equivariant variable `u_i` survives in the reduced function.
    pub has_u: bool,
}

type StripKey = Vec<(usize, usize)>;

/// Memoizing front end for everything built from PBW vectors.
pub struct Verma {
    engine: Arc<ActionEngine>,
    suffixes: RwLock<HashMap<StripKey, Arc<KClass>>>,
    duals: RwLock<HashMap<Degree, Arc<DualBasis>>>,
}

impl Verma {
    pub fn new(engine: Arc<ActionEngine>) -> Self {
        Verma { engine, suffixes: RwLock::default(), duals: RwLock::default() }
    }

    pub fn engine(&self) -> &Arc<ActionEngine> {
        &self.engine
    }

    pub fn n(&self) -> usize {
        self.engine.n()
    }

    /// `e_{s_k} ... e_{s_m} |empty>` for the strip suffix `s_k, ..., s_m`.
    fn apply_strips(&self, strips: &[(usize, usize)]) -> Result<Arc<KClass>, VermaError> {
        if strips.is_empty() {
            return Ok(Arc::new(KClass::vacuum(self.n())));
        }
        if let Some(v) = self.suffixes.read().unwrap().get(strips) {
            return Ok(v.clone());
        }
        let rest = self.apply_strips(&strips[1..])?;
        let (i, j) = strips[0];
        let v = Arc::new(self.engine.apply(Generator::E { i, j }, &rest)?);
        Ok(self.suffixes.write().unwrap().entry(strips.to_vec()).or_insert(v).clone())
    }

    /// `|e_lambda>`: the strip generators applied to the vacuum, rightmost strip first.
    pub fn pbw_vector(&self, lam: &MultiPartition) -> Result<PBWVector, VermaError> {
        let strips: StripKey = strip_decomposition(lam).iter().map(|s| (s.i, s.j)).collect();
        let kclass = (*self.apply_strips(&strips)?).clone();
        let unit = normalization_monomial(self.n(), &lam.degree()).inv();
        let normalized = kclass.scale(&RationalFunction::monomial(self.n(), unit, 1));
        Ok(PBWVector { lambda: lam.clone(), kclass, normalized })
    }

    /// The PBW vectors of every fixed point of degree `d`, in fixed-point order.
    pub fn pbw_basis(&self, d: &[usize]) -> Result<Vec<PBWVector>, VermaError> {
        let fps = self.engine.fixed_points(d);
        fps.points.iter().map(|lam| self.pbw_vector(lam)).collect()
    }

    /// `M[lambda][nu] = |e_lambda>|_nu` in fixed-point order.
    fn restriction_matrix(&self, d: &[usize]) -> Result<(Vec<MultiPartition>, Matrix<RationalFunction>), VermaError> {
        let fps = self.engine.fixed_points(d);
        let basis = self.pbw_basis(d)?;
        let m = basis.iter().map(|v| fps.points.iter().map(|nu| v.kclass.get(nu)).collect()).collect();
        Ok((fps.points.clone(), m))
    }

    /// `G[lambda][mu] = (|e_lambda>, |e_mu>)`.
    pub fn gram_matrix(&self, d: &[usize]) -> Result<(Vec<MultiPartition>, Matrix<RationalFunction>), VermaError> {
        let basis = self.pbw_basis(d)?;
        let points: Vec<MultiPartition> = basis.iter().map(|v| v.lambda.clone()).collect();
        let k = basis.len();
        let cols: Vec<Vec<RationalFunction>> = (0..k)
            .into_par_iter()
            .map(|b| (0..k).map(|a| self.engine.pair(&basis[a].kclass, &basis[b].kclass)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let g = (0..k).map(|a| (0..k).map(|b| cols[b][a].clone()).collect()).collect();
        Ok((points, g))
    }

    /// The classes `|e_lambda>^*` with `(|e_lambda>^*, |e_mu>) = delta_{lambda mu}`.
    ///
    /// With `M[lambda][nu] = |e_lambda>|_nu` the dual class has restriction
    /// `(M^{-1})[nu][lambda] / d_nu` at `nu`.
    pub fn dual_pbw(&self, d: &[usize]) -> Result<Arc<DualBasis>, VermaError> {
        if let Some(b) = self.duals.read().unwrap().get(d) {
            return Ok(b.clone());
        }
        let n = self.n();
        let (points, m) = self.restriction_matrix(d)?;
        let inv = triangular_inverse(&m).or_else(|| inverse(&m)).ok_or_else(|| VermaError::SingularGram(d.to_vec()))?;
        let norms: Vec<RationalFunction> = points.iter().map(|nu| self.engine.norm(nu)).collect();
        let classes = points
            .par_iter()
            .enumerate()
            .map(|(l, lam)| {
                let mut c = KClass::zero(n, d);
                for (v, nu) in points.iter().enumerate() {
                    if !inv[v][l].is_zero() {
                        c.set(nu.clone(), inv[v][l].div(&norms[v]));
                    }
                }
                (lam.clone(), c)
            })
            .collect();
        let b = Arc::new(DualBasis { degree: d.to_vec(), points, classes });
        Ok(self.duals.write().unwrap().entry(d.to_vec()).or_insert(b).clone())
    }

    /// Restrictions of dual PBW classes of degree `d` that are not integral.
    pub fn integrality_violations(&self, d: &[usize]) -> Result<Vec<IntegralityViolation>, VermaError> {
        let basis = self.dual_pbw(d)?;
        let mut out = Vec::new();
        for (lam, c) in &basis.classes {
            for (mu, v) in &c.restrictions {
                if !v.is_integral() {
                    out.push(IntegralityViolation { lambda: lam.clone(), mu: mu.clone(), value: v.clone() });
                }
            }
        }
        Ok(out)
    }

    /// `c_lambda = (|0>, f_{[i;j)} |e_lambda>^*)` for every `lambda` of degree `[i;j)`.
    pub fn c_coefficients(&self, iv: &IntervalVector) -> Result<BTreeMap<MultiPartition, RationalFunction>, VermaError> {
        let n = self.n();
        let basis = self.dual_pbw(&iv.vector)?;
        let f = self.engine.matrix(Generator::F { i: iv.i, j: iv.j }, &iv.vector)?;
        let vacuum = KClass::vacuum(n);
        basis
            .classes
            .par_iter()
            .map(|(lam, c)| {
                let image = f.apply(c)?;
                Ok((lam.clone(), self.engine.pair(&vacuum, &image)?))
            })
            .collect()
    }

    /// `g_{lambda mu} = |e_lambda>~|_mu / Lambda(T_mu^{>=0})^vee` for every pair of degree `d`.
    pub fn bounded_quotients(&self, d: &[usize], xi: &OneParamSubgroup) -> Result<Vec<BoundedQuotient>, VermaError> {
        let fps = self.engine.fixed_points(d);
        let basis = self.pbw_basis(d)?;
        let dens: Vec<LaurentPoly> =
            fps.points.iter().map(|mu| nonnegative_denominator(mu, xi)).collect::<Result<_, _>>()?;
        let pairs: Vec<(usize, usize)> = (0..basis.len()).flat_map(|a| (0..fps.len()).map(move |b| (a, b))).collect();
        pairs
            .par_iter()
            .filter_map(|&(a, b)| {
                let lam = &basis[a].lambda;
                let mu = &fps.points[b];
                let r = basis[a].normalized.get(mu);
                if r.is_zero() {
                    return None;
                }
                Some((|| {
                    let g = r.div_poly(&dens[b]);
                    let bounded = is_bounded_by_polytope(&g)?;
                    let limit = limit_along(&g, xi)?;
                    let below = order_h(mu, lam).map_err(ActionError::from)? == std::cmp::Ordering::Less;
                    Ok(BoundedQuotient { lambda: lam.clone(), mu: mu.clone(), value: g, bounded, limit, below })
                })())
            })
            .collect()
    }
}

/// One `g_{lambda mu}` with its boundedness data.
#[derive(Clone, Debug)]
pub struct BoundedQuotient {
    pub lambda: MultiPartition,
    pub mu: MultiPartition,
    pub value: RationalFunction,
    /// Newton polytope of the numerator lies in that of the denominator.
    pub bounded: bool,
    pub limit: LimitResult,
    /// `h(mu) < h(lambda)`.
    pub below: bool,
}

impl BoundedQuotient {
    /// Bounded, and vanishing in the limit when `mu` is strictly below `lambda`.
    pub fn passes(&self) -> bool {
        self.bounded && (!self.below || self.limit == LimitResult::Zero)
    }
}

/// `Lambda(T_mu^{>=0})^vee`: the factors `1 - w^{-1}` of tangent weights that
/// pair nonnegatively with `xi` or have trivial `A`-part.
pub fn nonnegative_denominator(mu: &MultiPartition, xi: &OneParamSubgroup) -> Result<LaurentPoly, VermaError> {
    let t = tangent_character(mu)?;
    let n = mu.n;
    let part: Character = t.filter(|w| is_a_trivial(n, w) || xi.pairing(w) >= 0);
    Ok(lambda_exterior_dual(&part)?)
}

/// Inverse of a matrix that becomes triangular after simultaneously
/// permuting rows and columns, or `None` if no such ordering exists.
pub fn triangular_inverse(m: &Matrix<RationalFunction>) -> Option<Matrix<RationalFunction>> {
    let k = m.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let nv = m[0][0].nvars();
    if (0..k).any(|i| m[i][i].is_zero()) {
        return None;
    }
    // Order indices so that m[a][b] != 0 implies b comes no later than a.
    let mut order = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    while order.len() < k {
        let next = (0..k).find(|&a| !placed[a] && (0..k).all(|b| b == a || placed[b] || m[a][b].is_zero()))?;
        placed[next] = true;
        order.push(next);
    }
    // Forward substitution for each column of the identity in the lower-triangular order.
    let mut inv = vec![vec![RationalFunction::zero(nv); k]; k];
    let cols: Vec<Vec<RationalFunction>> = (0..k)
        .into_par_iter()
        .map(|c| {
            let mut x = vec![RationalFunction::zero(nv); k];
            for &a in &order {
                let mut terms: Vec<RationalFunction> = Vec::new();
                for &b in &order {
                    if b == a {
                        break;
                    }
                    if !m[a][b].is_zero() && !x[b].is_zero() {
                        terms.push(m[a][b].mul(&x[b]));
                    }
                }
                let rhs = if a == c { RationalFunction::one(nv) } else { RationalFunction::zero(nv) };
                x[a] = rhs.sub(&sum_rf(nv, &terms)).div(&m[a][a]);
            }
            x
        })
        .collect();
    for (c, x) in cols.into_iter().enumerate() {
        for (r, v) in x.into_iter().enumerate() {
            inv[r][c] = v;
        }
    }
    Some(inv)
}

/// `prod_{k=1}^{big_k} (1 - p^{2k})^{big_m}` in the ring with `n` equivariant variables.
pub fn cyclotomic_bound(n: usize, big_k: u32, big_m: u32) -> LaurentPoly {
    let one = LaurentPoly::one(n);
    (1..=big_k).fold(one.clone(), |acc, k| {
        let f = one.sub(&LaurentPoly::monomial(n, Mono::var(p_index(n), 2 * k as i32), 1));
        acc.mul(&f.pow(big_m))
    })
}

/// Decides whether `f` lies in `Z[q^±, p^±]` localized at `prod_{k<=K} (1 - p^{2k})^M`.
///
/// The reduced denominator, with its monomial part removed, must divide the
/// product exactly, and neither numerator nor denominator may involve a `u_i`.
pub fn denominator_membership(f: &RationalFunction, big_k: u32, big_m: u32) -> MembershipReport {
    let n = f.nvars();
    let has_u = !f.is_u_free();
    let (_, den) = f.den().split_monomial();
    let bound = cyclotomic_bound(n, big_k, big_m);
    let remainder = if bound.div_exact(&den).is_some() {
        LaurentPoly::one(n)
    } else {
        let g = crate::ring::gcd(&den, &bound);
        den.div_exact(&g).expect("gcd divides")
    };
    let member = !has_u && remainder.is_unit();
    MembershipReport { member, remainder, has_u }
}
