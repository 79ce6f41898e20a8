//! Sparse Laurent polynomials with big-integer coefficients.
//!
//! Variables are `u_1, ..., u_n, q, p` in that order. A polynomial stores its
//! terms sorted by ascending lexicographic exponent vector with no zero
//! coefficients, so structural equality is mathematical equality.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::mono::{Mono, MAX_VARS};
use super::RingError;

/// Index of `q` in the exponent vector of a ring with `n` framing variables.
#[inline]
pub fn q_index(n: usize) -> usize {
    n
}

/// Index of `p` in the exponent vector of a ring with `n` framing variables.
#[inline]
pub fn p_index(n: usize) -> usize {
    n + 1
}

/// Exact Laurent polynomial in `u_1..u_n, q, p` over the integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    n: usize,
    terms: Vec<(Mono, BigInt)>,
}

impl LaurentPoly {
    /// The zero polynomial of the ring with `n` framing variables.
    pub fn zero(n: usize) -> Self {
        assert!(n + 2 <= MAX_VARS, "at most {} framing variables are supported", MAX_VARS - 2);
        LaurentPoly { n, terms: Vec::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigInt::one())
    }

    pub fn constant(n: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(n, Mono::ONE, c)
    }

    /// `c * x^m`.
    pub fn monomial(n: usize, m: Mono, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut p = Self::zero(n);
        if !c.is_zero() {
            debug_assert!(m.0[n + 2..].iter().all(|&e| e == 0));
            p.terms.push((m, c));
        }
        p
    }

    /// The variable `u_k` for `k` in `1..=n`.
    pub fn u(n: usize, k: usize) -> Self {
        assert!((1..=n).contains(&k));
        Self::monomial(n, Mono::var(k - 1, 1), 1)
    }

    pub fn q(n: usize) -> Self {
        Self::monomial(n, Mono::var(q_index(n), 1), 1)
    }

    pub fn p(n: usize) -> Self {
        Self::monomial(n, Mono::var(p_index(n), 1), 1)
    }

    /// Builds a polynomial from arbitrary (possibly repeated or zero) terms.
    pub fn from_terms<I: IntoIterator<Item = (Mono, BigInt)>>(n: usize, it: I) -> Self {
        let mut v: Vec<(Mono, BigInt)> = it.into_iter().collect();
        v.sort_unstable_by_key(|a| a.0);
        let mut out: Vec<(Mono, BigInt)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => {
                    if let Some((_, lc)) = out.last() {
                        if lc.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some((_, lc)) = out.last() {
            if lc.is_zero() {
                out.pop();
            }
        }
        let mut p = Self::zero(n);
        p.terms = out;
        p
    }

    /// Number of framing variables `n`.
    #[inline]
    pub fn nvars(&self) -> usize {
        self.n
    }

    /// Length of meaningful exponent vectors, `n + 2`.
    #[inline]
    pub fn width(&self) -> usize {
        self.n + 2
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lexicographic order of exponents.
    pub fn terms(&self) -> &[(Mono, BigInt)] {
        &self.terms
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// True for a nonzero constant.
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }

    /// The single term of a monomial, if this is one.
    pub fn as_monomial(&self) -> Option<(&Mono, &BigInt)> {
        if self.terms.len() == 1 {
            Some((&self.terms[0].0, &self.terms[0].1))
        } else {
            None
        }
    }

    /// True for `+-x^m`.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1.abs().is_one()
    }

    /// Lexicographically largest term.
    pub fn leading(&self) -> Option<&(Mono, BigInt)> {
        self.terms.last()
    }

    /// Lexicographically smallest term.
    pub fn trailing(&self) -> Option<&(Mono, BigInt)> {
        self.terms.first()
    }

    /// Coefficient of `x^m`.
    pub fn coeff(&self, m: &Mono) -> BigInt {
        match self.terms.binary_search_by(|t| t.0.cmp(m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Componentwise minimum exponent over the support (identity for zero).
    pub fn min_exps(&self) -> Mono {
        let mut it = self.terms.iter();
        match it.next() {
            None => Mono::ONE,
            Some((m, _)) => it.fold(*m, |acc, (m, _)| acc.cmin(m)),
        }
    }

    /// Componentwise maximum exponent over the support (identity for zero).
    pub fn max_exps(&self) -> Mono {
        let mut it = self.terms.iter();
        match it.next() {
            None => Mono::ONE,
            Some((m, _)) => it.fold(*m, |acc, (m, _)| acc.cmax(m)),
        }
    }

    /// True if some term has a nonzero exponent of `var`.
    pub fn contains_var(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.get(var) != 0)
    }

    /// True if no framing variable `u_i` occurs.
    pub fn is_u_free(&self) -> bool {
        (0..self.n).all(|v| !self.contains_var(v))
    }

    /// Bit mask of variables that occur in the support.
    pub fn var_mask(&self) -> u32 {
        let mut mask = 0u32;
        for (m, _) in &self.terms {
            for (i, e) in m.0.iter().enumerate() {
                if *e != 0 {
                    mask |= 1 << i;
                }
            }
        }
        mask
    }

    fn check_ring(&self, other: &Self) {
        assert_eq!(self.n, other.n, "mixing rings with different numbers of variables");
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        self.check_ring(other);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        LaurentPoly { n: self.n, terms: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_ring(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.n);
        }
        if let Some((m, c)) = other.as_monomial() {
            return self.mul_term(m, c);
        }
        if let Some((m, c)) = self.as_monomial() {
            return other.mul_term(m, c);
        }
        let mut v = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                v.push((ma.mul(mb), ca * cb));
            }
        }
        Self::from_terms(self.n, v)
    }

    /// Multiplication by a single term `c * x^m`.
    pub fn mul_term(&self, m: &Mono, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(a, b)| (a.mul(m), b * c)).collect(),
        }
    }

    /// Multiplication by the monomial `x^m`.
    pub fn mul_mono(&self, m: &Mono) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(a, b)| (a.mul(m), b.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        self.mul_term(&Mono::ONE, c)
    }

    pub fn pow(&self, k: u32) -> Self {
        if let Some((m, c)) = self.as_monomial() {
            return Self::monomial(self.n, m.pow(k as i32), c.pow(k));
        }
        let mut result = Self::one(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Nonnegative gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Exact division of every coefficient by an integer; panics if inexact.
    pub fn div_int_exact(&self, c: &BigInt) -> Self {
        if c.is_one() {
            return self.clone();
        }
        LaurentPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| {
                    let (qt, r) = a.div_rem(c);
                    assert!(r.is_zero(), "inexact integer division");
                    (*m, qt)
                })
                .collect(),
        }
    }

    /// Writes `self = x^m * poly` where `poly` has componentwise minimum exponent zero.
    pub fn split_monomial(&self) -> (Mono, Self) {
        let m = self.min_exps();
        if m.is_one() {
            (m, self.clone())
        } else {
            (m, self.mul_mono(&m.inv()))
        }
    }

    /// Exact quotient `self / g` in the Laurent ring, or `None` if `g` does not divide.
    ///
    /// The quotient of a Laurent division has its exponents confined to the box
    /// between the exponent bounds of dividend and divisor, which bounds the
    /// loop even when no quotient exists.
    pub fn div_exact(&self, g: &Self) -> Option<Self> {
        self.check_ring(g);
        assert!(!g.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Self::zero(self.n));
        }
        if let Some((m, c)) = g.as_monomial() {
            let inv = m.inv();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (a, b) in &self.terms {
                let (qt, r) = b.div_rem(c);
                if !r.is_zero() {
                    return None;
                }
                terms.push((a.mul(&inv), qt));
            }
            return Some(LaurentPoly { n: self.n, terms });
        }
        let lo = self.min_exps().div(&g.min_exps());
        let hi = self.max_exps().div(&g.max_exps());
        if (0..MAX_VARS).any(|i| lo.get(i) > hi.get(i)) {
            return None;
        }
        let (gm, gc) = g.terms.last().unwrap().clone();
        let mut rem: BTreeMap<Mono, BigInt> = self.terms.iter().cloned().collect();
        let mut quot: Vec<(Mono, BigInt)> = Vec::new();
        while let Some((rm, rc)) = rem.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            let t = rm.div(&gm);
            if (0..MAX_VARS).any(|i| t.get(i) < lo.get(i) || t.get(i) > hi.get(i)) {
                return None;
            }
            let (c, r) = rc.div_rem(&gc);
            if !r.is_zero() {
                return None;
            }
            for (m, a) in &g.terms {
                let key = m.mul(&t);
                let delta = a * &c;
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            quot.push((t, c));
        }
        quot.reverse();
        Some(LaurentPoly { n: self.n, terms: quot })
    }

    /// Substitutes the integer `x` for variable `var`; the result does not involve `var`.
    pub(crate) fn eval_var_int(&self, var: usize, x: &BigInt) -> Self {
        let maxe = self.terms.iter().map(|(m, _)| m.get(var)).max().unwrap_or(0);
        let mine = self.terms.iter().map(|(m, _)| m.get(var)).min().unwrap_or(0);
        assert!(mine >= 0, "integer evaluation needs a polynomial in the variable");
        let mut powers = Vec::with_capacity(maxe as usize + 1);
        let mut acc = BigInt::one();
        for _ in 0..=maxe {
            powers.push(acc.clone());
            acc *= x;
        }
        Self::from_terms(
            self.n,
            self.terms.iter().map(|(m, c)| {
                let mut m2 = *m;
                let e = m2.get(var);
                m2.set(var, 0);
                (m2, c * &powers[e as usize])
            }),
        )
    }

    /// Evaluates at an integer point, returning the value as a fraction
    /// `(numerator, denominator)`; negative exponents go to the denominator.
    pub fn eval_int_point(&self, point: &[BigInt]) -> (BigInt, BigInt) {
        // Negative exponents are cleared by multiplying through by x^-min.
        let shift = self.min_exps();
        let mut num = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = m.get(i) - shift.get(i).min(0);
                if e > 0 {
                    t *= x.pow(e as u32);
                }
            }
            num += t;
        }
        let mut den = BigInt::one();
        for (i, x) in point.iter().enumerate() {
            let e = -shift.get(i).min(0);
            if e > 0 {
                den *= x.pow(e as u32);
            }
        }
        (num, den)
    }

    /// Applies a monomial substitution `x^m -> x^{phi(m)}` termwise.
    pub fn map_monomials<F: Fn(&Mono) -> Mono>(&self, f: F) -> Self {
        Self::from_terms(self.n, self.terms.iter().map(|(m, c)| (f(m), c.clone())))
    }

    /// Reinterprets the polynomial in a ring with a different number of
    /// framing variables, keeping `q` and `p` as the last two variables.
    pub fn change_ring(&self, n: usize) -> Self {
        if n == self.n {
            return self.clone();
        }
        let old = self.n;
        Self::from_terms(
            n,
            self.terms.iter().map(|(m, c)| {
                let mut e = [0i32; MAX_VARS];
                for i in 0..old.min(n) {
                    e[i] = m.get(i);
                }
                assert!((n..old).all(|i| m.get(i) == 0), "variable u_{} would be dropped", n + 1);
                e[n] = m.get(old);
                e[n + 1] = m.get(old + 1);
                (Mono(e), c.clone())
            }),
        )
    }

    /// Name of variable `i` in a ring with `n` framing variables.
    pub fn var_name(n: usize, i: usize) -> String {
        if i < n {
            format!("u{}", i + 1)
        } else if i == n {
            "q".to_string()
        } else {
            "p".to_string()
        }
    }

    /// Serialization-friendly form `[(coefficient, exponents)]`.
    pub fn to_pairs(&self) -> Vec<(String, Vec<i32>)> {
        self.terms
            .iter()
            .map(|(m, c)| (c.to_string(), m.prefix(self.width()).to_vec()))
            .collect()
    }

    /// Inverse of [`LaurentPoly::to_pairs`]; `n` is inferred from the exponent length.
    pub fn from_pairs(pairs: &[(String, Vec<i32>)], n_hint: Option<usize>) -> Result<Self, RingError> {
        let n = match (pairs.first(), n_hint) {
            (Some((_, e)), _) => {
                if e.len() < 3 {
                    return Err(RingError::Parse(format!("exponent vector too short: {e:?}")));
                }
                e.len() - 2
            }
            (None, Some(n)) => n,
            (None, None) => return Err(RingError::Parse("cannot infer ring of the zero polynomial".into())),
        };
        if n + 2 > MAX_VARS {
            return Err(RingError::Parse(format!("too many variables: {}", n + 2)));
        }
        let mut terms = Vec::with_capacity(pairs.len());
        for (c, e) in pairs {
            if e.len() != n + 2 {
                return Err(RingError::Parse(format!("inconsistent exponent length in {e:?}")));
            }
            let c: BigInt = c
                .parse()
                .map_err(|_| RingError::Parse(format!("bad integer coefficient {c:?}")))?;
            terms.push((Mono::from_slice(e), c));
        }
        Ok(Self::from_terms(n, terms))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for i in 0..self.width() {
                let e = m.get(i);
                if e == 0 {
                    continue;
                }
                let name = Self::var_name(self.n, i);
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs = Vec::<(String, Vec<i32>)>::deserialize(d)?;
        Self::from_pairs(&pairs, None).map_err(serde::de::Error::custom)
    }
}
