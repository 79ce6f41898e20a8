//! Exponent vectors of Laurent monomials.
//!
//! A [`Mono`] is a fixed-width array of signed exponents. Only the first
//! `n + 2` slots are meaningful for a ring with `n` framing variables; the
//! remaining slots stay zero so that comparison, hashing and arithmetic never
//! need to know `n`.

use std::fmt;

/// Maximum number of ring variables (`u_1..u_n, q, p`), so `n <= 6`.
pub const MAX_VARS: usize = 8;

/// Exponent vector of a Laurent monomial. Ordered lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub [i32; MAX_VARS]);

impl Mono {
    /// The exponent vector of the constant monomial `1`.
    pub const ONE: Mono = Mono([0; MAX_VARS]);

    /// Builds a monomial from a prefix of exponents; missing slots are zero.
    pub fn from_slice(exps: &[i32]) -> Mono {
        assert!(exps.len() <= MAX_VARS, "too many variables: {}", exps.len());
        let mut e = [0; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        Mono(e)
    }

    /// The monomial `x_var^exp`.
    pub fn var(var: usize, exp: i32) -> Mono {
        let mut e = [0; MAX_VARS];
        e[var] = exp;
        Mono(e)
    }

    #[inline]
    pub fn get(&self, var: usize) -> i32 {
        self.0[var]
    }

    #[inline]
    pub fn set(&mut self, var: usize, exp: i32) {
        self.0[var] = exp;
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Product of monomials (sum of exponents).
    #[inline]
    pub fn mul(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Mono(e)
    }

    /// Quotient of monomials (difference of exponents).
    #[inline]
    pub fn div(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a -= *b;
        }
        Mono(e)
    }

    #[inline]
    pub fn inv(&self) -> Mono {
        let mut e = self.0;
        for a in e.iter_mut() {
            *a = -*a;
        }
        Mono(e)
    }

    #[inline]
    pub fn pow(&self, k: i32) -> Mono {
        let mut e = self.0;
        for a in e.iter_mut() {
            *a *= k;
        }
        Mono(e)
    }

    /// Componentwise minimum.
    #[inline]
    pub fn cmin(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = (*a).min(*b);
        }
        Mono(e)
    }

    /// Componentwise maximum.
    #[inline]
    pub fn cmax(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = (*a).max(*b);
        }
        Mono(e)
    }

    /// True if every exponent is even, so the monomial has a monomial square root.
    pub fn is_square(&self) -> bool {
        self.0.iter().all(|e| e % 2 == 0)
    }

    /// Halves every exponent. Panics if some exponent is odd.
    pub fn sqrt(&self) -> Mono {
        assert!(self.is_square(), "monomial {self:?} has no monomial square root");
        let mut e = self.0;
        for a in e.iter_mut() {
            *a /= 2;
        }
        Mono(e)
    }

    /// Pairing with an integer weight vector over the first `w.len()` slots.
    pub fn dot(&self, w: &[i64]) -> i64 {
        w.iter().zip(self.0.iter()).map(|(a, b)| a * (*b as i64)).sum()
    }

    /// The meaningful prefix of length `len`.
    pub fn prefix(&self, len: usize) -> &[i32] {
        &self.0[..len]
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1);
        write!(f, "{:?}", &self.0[..last])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_roundtrip() {
        let a = Mono::from_slice(&[2, -1, 0, 3]);
        let b = Mono::from_slice(&[-1, 4, 2]);
        assert_eq!(a.mul(&b).div(&b), a);
        assert!(a.mul(&a.inv()).is_one());
        assert_eq!(a.pow(2).sqrt(), a);
        assert_eq!(a.cmin(&b), Mono::from_slice(&[-1, -1, 0, 0]));
        assert_eq!(a.cmax(&b), Mono::from_slice(&[2, 4, 2, 3]));
    }

    #[test]
    fn lex_order() {
        assert!(Mono::from_slice(&[0, 1]) < Mono::from_slice(&[1, 0]));
        assert!(Mono::from_slice(&[0, -1]) < Mono::ONE);
    }
}
