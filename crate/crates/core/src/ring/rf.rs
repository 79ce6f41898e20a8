//! Reduced fractions of Laurent polynomials.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::gcd::gcd_poly;
use super::mono::Mono;
use super::poly::LaurentPoly;
use super::RingError;

/// An element `num / den` of the fraction field `Q(u_1, ..., u_n, q, p)`.
///
/// Canonical form:
/// * `num` and `den` have no common factor other than a unit monomial;
/// * the integer contents of `num` and `den` are coprime;
/// * the lexicographically least exponent vector of `den` is zero and the
///   coefficient there is positive;
/// * zero is `0 / 1`.
///
/// Under this normalization two fractions are equal iff their fields are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunction {
    pub fn zero(n: usize) -> Self {
        RationalFunction { num: LaurentPoly::zero(n), den: LaurentPoly::one(n) }
    }

    pub fn one(n: usize) -> Self {
        RationalFunction { num: LaurentPoly::one(n), den: LaurentPoly::one(n) }
    }

    pub fn from_int(n: usize, c: impl Into<BigInt>) -> Self {
        Self::from_poly(LaurentPoly::constant(n, c))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        let n = p.nvars();
        RationalFunction { num: p, den: LaurentPoly::one(n) }
    }

    /// `c * x^m` as a fraction.
    pub fn monomial(n: usize, m: Mono, c: impl Into<BigInt>) -> Self {
        Self::from_poly(LaurentPoly::monomial(n, m, c))
    }

    /// Reduces `num / den` to canonical form.
    pub fn canonicalize(num: LaurentPoly, den: LaurentPoly) -> Result<Self, RingError> {
        if den.is_zero() {
            return Err(RingError::ZeroDenominator);
        }
        assert_eq!(num.nvars(), den.nvars(), "mixing rings with different numbers of variables");
        Ok(Self::reduce(num, den))
    }

    /// Canonical form of `num / den`; panics on a zero denominator.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        Self::canonicalize(num, den).expect("zero denominator")
    }

    fn reduce(num: LaurentPoly, den: LaurentPoly) -> Self {
        let n = num.nvars();
        if num.is_zero() {
            return Self::zero(n);
        }
        let (mn, pn) = num.split_monomial();
        let (md, pd) = den.split_monomial();
        let g = gcd_poly(&pn, &pd);
        let (pn, pd) = if g.is_one() {
            (pn, pd)
        } else {
            (pn.div_exact(&g).expect("gcd divides"), pd.div_exact(&g).expect("gcd divides"))
        };
        Self::normalize(pn.mul_mono(&mn.div(&md)), pd)
    }

    /// Fixes the unit ambiguity of an already coprime pair: integer content,
    /// sign, and the monomial shift of the denominator.
    fn normalize(mut num: LaurentPoly, mut den: LaurentPoly) -> Self {
        let cn = num.content();
        let cd = den.content();
        let c = cn.gcd(&cd);
        if !c.is_one() {
            num = num.div_int_exact(&c);
            den = den.div_int_exact(&c);
        }
        let (m, lc) = den.trailing().map(|(m, c)| (*m, c.is_negative())).unwrap();
        if !m.is_one() {
            let inv = m.inv();
            num = num.mul_mono(&inv);
            den = den.mul_mono(&inv);
        }
        if lc {
            num = num.neg();
            den = den.neg();
        }
        RationalFunction { num, den }
    }

    #[inline]
    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    #[inline]
    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True if this is a Laurent polynomial with integer coefficients.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// The polynomial value, if this is a Laurent polynomial over the integers.
    pub fn as_poly(&self) -> Option<&LaurentPoly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// True if the value is `+-x^m` for a monomial `x^m`.
    pub fn is_unit_monomial(&self) -> bool {
        self.den.is_one() && self.num.is_unit()
    }

    /// True if no framing variable `u_i` occurs in numerator or denominator.
    pub fn is_u_free(&self) -> bool {
        self.num.is_u_free() && self.den.is_u_free()
    }

    /// True if the variable with the given index occurs.
    pub fn contains_var(&self, var: usize) -> bool {
        self.num.contains_var(var) || self.den.contains_var(var)
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return Self::from_poly(num);
            }
            return Self::reduce(num, self.den.clone());
        }
        if self.den.is_one() {
            let num = self.num.mul(&other.den).add(&other.num);
            return Self::normalize_coprime(num, other.den.clone());
        }
        if other.den.is_one() {
            let num = other.num.mul(&self.den).add(&self.num);
            return Self::normalize_coprime(num, self.den.clone());
        }
        // With g = gcd(b, d) and b = g b', d = g d', the sum a/b + c/d has
        // numerator a d' + c b' which is coprime to b' d', so only g can cancel.
        let g = gcd_poly(&self.den, &other.den);
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d1).add(&other.num.mul(&b1));
        if num.is_zero() {
            return Self::zero(self.nvars());
        }
        let (mn, pn) = num.split_monomial();
        let h = gcd_poly(&pn, &g);
        let (pn, g) = if h.is_one() {
            (pn, g)
        } else {
            (pn.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
        };
        Self::normalize(pn.mul_mono(&mn), g.mul(&b1).mul(&d1))
    }

    /// `num / den` where `den` is already coprime to `num` up to integers.
    fn normalize_coprime(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero(den.nvars());
        }
        Self::normalize(num, den)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars());
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        // Cross cancellation keeps the gcd inputs small.
        let (a, d) = cancel(&self.num, &other.den);
        let (c, b) = cancel(&other.num, &self.den);
        Self::normalize(a.mul(&c), b.mul(&d))
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::normalize(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i32) -> Self {
        if k < 0 {
            return self.inv().pow(-k);
        }
        Self::normalize(self.num.pow(k as u32), self.den.pow(k as u32))
    }

    /// Multiplication by a Laurent polynomial.
    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        self.mul(&Self::from_poly(p.clone()))
    }

    /// Division by a Laurent polynomial.
    pub fn div_poly(&self, p: &LaurentPoly) -> Self {
        self.mul(&Self::new(LaurentPoly::one(p.nvars()), p.clone()))
    }

    /// Multiplication by `c * x^m`.
    pub fn mul_term(&self, m: &Mono, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        Self::normalize(self.num.mul_term(m, c), self.den.clone())
    }

    /// Applies a monomial substitution to numerator and denominator and reduces.
    pub fn map_monomials<F: Fn(&Mono) -> Mono>(&self, f: F) -> Self {
        Self::new(self.num.map_monomials(&f), self.den.map_monomials(&f))
    }

    /// Value at an integer point, or `None` when the denominator vanishes there.
    pub fn eval_int_point(&self, point: &[BigInt]) -> Option<num_rational::BigRational> {
        let (a, b) = self.num.eval_int_point(point);
        let (c, d) = self.den.eval_int_point(point);
        if c.is_zero() {
            return None;
        }
        Some(num_rational::BigRational::new(a * d, b * c))
    }
}

/// Removes the common factor of `a` and `b`, returning the cofactors.
fn cancel(a: &LaurentPoly, b: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    if b.is_one() || a.is_one() {
        return (a.clone(), b.clone());
    }
    let (ma, pa) = a.split_monomial();
    let (mb, pb) = b.split_monomial();
    let g = gcd_poly(&pa, &pb);
    if g.is_one() {
        return (a.clone(), b.clone());
    }
    (
        pa.div_exact(&g).expect("gcd divides").mul_mono(&ma),
        pb.div_exact(&g).expect("gcd divides").mul_mono(&mb),
    )
}

impl From<LaurentPoly> for RationalFunction {
    fn from(p: LaurentPoly) -> Self {
        Self::from_poly(p)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inherent:ident) => {
        impl<'a> $tr<&'a RationalFunction> for &'a RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: &'a RationalFunction) -> RationalFunction {
                RationalFunction::$inherent(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);
forward_binop!(Div, div, div);

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::neg(self)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RfJson {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RfJson { num: self.num.clone(), den: self.den.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: Vec<(String, Vec<i32>)>,
            den: Vec<(String, Vec<i32>)>,
        }
        let raw = Raw::deserialize(d)?;
        let n = raw
            .num
            .first()
            .or(raw.den.first())
            .map(|(_, e)| e.len().saturating_sub(2))
            .ok_or_else(|| serde::de::Error::custom("cannot infer the ring of an empty fraction"))?;
        let num = LaurentPoly::from_pairs(&raw.num, Some(n)).map_err(serde::de::Error::custom)?;
        let den = LaurentPoly::from_pairs(&raw.den, Some(n)).map_err(serde::de::Error::custom)?;
        RationalFunction::canonicalize(num, den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(n: usize, terms: &[(i64, &[i32])]) -> LaurentPoly {
        LaurentPoly::from_terms(n, terms.iter().map(|(c, e)| (Mono::from_slice(e), BigInt::from(*c))))
    }

    #[test]
    fn canonicalize_divides_out_binomial() {
        // (u1^2 q^2 - u1^2) / (q - 1) = u1^2 (q + 1)
        let num = lp(1, &[(1, &[2, 2, 0]), (-1, &[2, 0, 0])]);
        let den = lp(1, &[(1, &[0, 1, 0]), (-1, &[0, 0, 0])]);
        let f = RationalFunction::canonicalize(num, den).unwrap();
        assert_eq!(f.num(), &lp(1, &[(1, &[2, 1, 0]), (1, &[2, 0, 0])]));
        assert!(f.den().is_one());
    }

    #[test]
    fn canonicalize_trivial_cases() {
        let z = RationalFunction::canonicalize(LaurentPoly::zero(1), LaurentPoly::u(1, 1)).unwrap();
        assert!(z.is_zero() && z.den().is_one());
        let b = lp(1, &[(1, &[0, 0, 0]), (-1, &[0, 0, 2])]);
        let one = RationalFunction::canonicalize(b.clone(), b).unwrap();
        assert!(one.is_one());
        assert!(matches!(
            RationalFunction::canonicalize(LaurentPoly::one(1), LaurentPoly::zero(1)),
            Err(RingError::ZeroDenominator)
        ));
    }

    #[test]
    fn denominator_normalization() {
        // 1 / (2x - 2y) with x = u1, y = q: lex least exponent of den is q.
        let den = lp(1, &[(2, &[1, 0, 0]), (-2, &[0, 1, 0])]);
        let f = RationalFunction::new(LaurentPoly::one(1), den);
        assert_eq!(f.den().trailing().unwrap().0, Mono::ONE);
        assert!(f.den().trailing().unwrap().1 > BigInt::zero());
        assert_eq!(f.den().content(), BigInt::from(2));
    }

    #[test]
    fn field_arithmetic() {
        let a = RationalFunction::new(lp(2, &[(1, &[1, 0, 0, 0]), (1, &[0, 0, 1, 0])]), lp(2, &[(1, &[0, 0, 0, 0]), (-1, &[0, 0, 0, 2])]));
        let b = RationalFunction::new(lp(2, &[(3, &[0, 1, 0, 0])]), lp(2, &[(1, &[0, 0, 0, 0]), (1, &[0, 0, 0, 1])]));
        let s = a.add(&b);
        assert_eq!(s.sub(&b), a);
        assert_eq!(a.mul(&b).div(&b), a);
        assert!(a.mul(&a.inv()).is_one());
        assert_eq!(a.add(&a.neg()), RationalFunction::zero(2));
    }

    #[test]
    fn json_roundtrip() {
        let a = RationalFunction::new(LaurentPoly::q(1), LaurentPoly::one(1).sub(&LaurentPoly::p(1)));
        let s = serde_json::to_string(&a).unwrap();
        let b: RationalFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
