//! One-parameter subgroups of the torus and limits along them.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::mono::Mono;
use super::poly::{p_index, q_index, LaurentPoly};
use super::rf::RationalFunction;
use super::RingError;

/// A cocharacter `t -> (t^{k_1}, ..., t^{k_n}, t^l, t^s)` acting on `(u, q, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneParamSubgroup {
    pub exps_u: Vec<i64>,
    pub exp_p: i64,
    pub exp_q: i64,
}

impl OneParamSubgroup {
    pub fn new(exps_u: Vec<i64>, exp_p: i64, exp_q: i64) -> Self {
        OneParamSubgroup { exps_u, exp_p, exp_q }
    }

    pub fn n(&self) -> usize {
        self.exps_u.len()
    }

    /// `k_1 < k_2 < ... < k_n < k_1 - s` with `l = 0`.
    pub fn is_sigma_a_admissible(&self) -> bool {
        self.exp_q == 0
            && self.exps_u.windows(2).all(|w| w[0] < w[1])
            && self.exps_u.last().copied().unwrap_or(0) < self.exps_u[0] - self.exp_p
    }

    /// The default admissible subgroup for degree `|d| = total`:
    /// `k_i = 2 i M`, `s = -(2n + 1) M - 1` with `M = 2 |d| + 1`.
    pub fn default_sigma_a(n: usize, total: usize) -> Self {
        let m = 2 * total as i64 + 1;
        let exps_u = (1..=n as i64).map(|i| 2 * i * m).collect();
        OneParamSubgroup { exps_u, exp_p: -(2 * n as i64 + 1) * m - 1, exp_q: 0 }
    }

    /// A subgroup of the full torus with `l < 0` negligible against the
    /// `A`-exponents: `q`-exponents of weights at degree `|d|` never exceed
    /// `2 |d| + 2` in absolute value, so scaling the admissible subgroup by a
    /// larger factor makes `q` a tie-breaker only.
    pub fn default_full(n: usize, total: usize) -> Self {
        let base = Self::default_sigma_a(n, total);
        let scale = 4 * total as i64 + 8;
        OneParamSubgroup {
            exps_u: base.exps_u.iter().map(|k| k * scale).collect(),
            exp_p: base.exp_p * scale,
            exp_q: -1,
        }
    }

    /// Pairing `<xi, w>` with the exponent vector of a monomial.
    pub fn pairing(&self, m: &Mono) -> i64 {
        let n = self.n();
        let mut s: i64 = self.exps_u.iter().enumerate().map(|(i, k)| k * m.get(i) as i64).sum();
        s += self.exp_q * m.get(q_index(n)) as i64;
        s += self.exp_p * m.get(p_index(n)) as i64;
        s
    }

    /// Pairing with the `A`-part only (ignores the `q`-exponent).
    pub fn pairing_a(&self, m: &Mono) -> i64 {
        let n = self.n();
        let mut s: i64 = self.exps_u.iter().enumerate().map(|(i, k)| k * m.get(i) as i64).sum();
        s += self.exp_p * m.get(p_index(n)) as i64;
        s
    }
}

/// Result of `t -> infinity` along a subgroup of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitResult {
    /// A finite nonzero limit, a rational function of `q` alone.
    Finite(RationalFunction),
    Zero,
    Diverges,
}

impl LimitResult {
    pub fn is_bounded(&self) -> bool {
        !matches!(self, LimitResult::Diverges)
    }
}

/// Highest `t`-exponent with a nonvanishing leading form, and that form in `q`.
fn leading_form(p: &LaurentPoly, xi: &OneParamSubgroup) -> Option<(i64, LaurentPoly)> {
    let n = p.nvars();
    let qi = q_index(n);
    let mut graded: Vec<(i64, Mono, BigInt)> = p
        .terms()
        .iter()
        .map(|(m, c)| (xi.pairing_a(m), Mono::var(qi, m.get(qi)), c.clone()))
        .collect();
    graded.sort_by(|a, b| b.0.cmp(&a.0));
    let mut i = 0;
    while i < graded.len() {
        let t = graded[i].0;
        let mut j = i;
        while j < graded.len() && graded[j].0 == t {
            j += 1;
        }
        let form = LaurentPoly::from_terms(n, graded[i..j].iter().map(|(_, m, c)| (*m, c.clone())));
        if !form.is_zero() {
            return Some((t, form));
        }
        i = j;
    }
    None
}

/// `lim_{t -> infinity} f(u_i = t^{k_i}, p = t^s)` with `q` kept symbolic.
pub fn limit_along(f: &RationalFunction, xi: &OneParamSubgroup) -> Result<LimitResult, RingError> {
    if xi.exp_q != 0 {
        return Err(RingError::NotInA(xi.exp_q));
    }
    if xi.n() != f.nvars() {
        return Err(RingError::Dimension(xi.n(), f.nvars()));
    }
    let Some((tn, fnum)) = leading_form(f.num(), xi) else {
        return Ok(LimitResult::Zero);
    };
    let (td, fden) = leading_form(f.den(), xi).ok_or(RingError::DegenerateSubgroup)?;
    Ok(match tn.cmp(&td) {
        std::cmp::Ordering::Less => LimitResult::Zero,
        std::cmp::Ordering::Greater => LimitResult::Diverges,
        std::cmp::Ordering::Equal => LimitResult::Finite(RationalFunction::new(fnum, fden)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi12() -> OneParamSubgroup {
        OneParamSubgroup::new(vec![1, 2], -5, 0)
    }

    #[test]
    fn spec_examples() {
        let n = 2;
        let one = LaurentPoly::one(n);
        let u1 = LaurentPoly::u(n, 1);
        let u2 = LaurentPoly::u(n, 2);
        let q = LaurentPoly::q(n);
        let ratio = RationalFunction::new(u2.clone(), u1.clone());
        let f = RationalFunction::one(n).div(&RationalFunction::one(n).sub(&ratio));
        assert_eq!(limit_along(&f, &xi12()).unwrap(), LimitResult::Zero);

        let q3 = RationalFunction::from_poly(q.pow(3));
        assert_eq!(limit_along(&q3, &xi12()).unwrap(), LimitResult::Finite(q3.clone()));

        let r = RationalFunction::new(u1.clone(), u2.clone());
        let g = RationalFunction::one(n)
            .sub(&r.mul_poly(&q))
            .div(&RationalFunction::one(n).sub(&r));
        assert_eq!(limit_along(&g, &xi12()).unwrap(), LimitResult::Finite(RationalFunction::one(n)));
        let _ = one;
    }

    #[test]
    fn diverging_and_rejected() {
        let u2 = RationalFunction::from_poly(LaurentPoly::u(2, 2));
        assert_eq!(limit_along(&u2, &xi12()).unwrap(), LimitResult::Diverges);
        let bad = OneParamSubgroup::new(vec![1, 2], -5, 1);
        assert!(limit_along(&u2, &bad).is_err());
    }

    #[test]
    fn denominator_vanishing_along_subgroup() {
        let n = 2;
        let u1 = LaurentPoly::u(n, 1);
        let f = RationalFunction::new(u1.clone(), u1.sub(&LaurentPoly::u(n, 2)));
        let diagonal = OneParamSubgroup::new(vec![1, 1], 0, 0);
        assert_eq!(limit_along(&f, &diagonal), Err(RingError::DegenerateSubgroup));
        assert_eq!(limit_along(&f, &xi12()).unwrap(), LimitResult::Zero);
    }

    #[test]
    fn default_subgroup_is_admissible() {
        for n in 2..=4 {
            for d in 0..6 {
                assert!(OneParamSubgroup::default_sigma_a(n, d).is_sigma_a_admissible());
            }
        }
    }
}
