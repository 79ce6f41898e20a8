//! Multivariate polynomial greatest common divisors over the integers.
//!
//! The main path is the heuristic GCD of Char, Geddes and Gonnet: evaluate one
//! variable at a large integer, recurse, and recover the candidate from its
//! balanced base-`x` digits. A candidate is accepted only after exact trial
//! division of both inputs. When the heuristic gives up, a recursive
//! primitive pseudo-remainder sequence computes the answer deterministically.
//!
//! All functions here take honest polynomials (nonnegative exponents). The
//! Laurent wrapper [`gcd`] strips monomial factors first, since monomials are
//! units of the Laurent ring.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::mono::Mono;
use super::poly::LaurentPoly;

const HEU_ATTEMPTS: usize = 6;

/// Gcd of two Laurent polynomials, defined up to a unit monomial.
///
/// The result is a polynomial whose componentwise minimum exponent is zero and
/// whose lexicographically largest coefficient is positive. It includes the
/// integer gcd of the contents. `gcd(0, 0) = 0`.
pub fn gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return normalize_sign(b.split_monomial().1);
    }
    if b.is_zero() {
        return normalize_sign(a.split_monomial().1);
    }
    let (_, pa) = a.split_monomial();
    let (_, pb) = b.split_monomial();
    gcd_poly(&pa, &pb)
}

/// Gcd of two nonzero polynomials together with the two cofactors.
pub fn gcd_cofactors(a: &LaurentPoly, b: &LaurentPoly) -> (LaurentPoly, LaurentPoly, LaurentPoly) {
    let g = gcd_poly(a, b);
    let ca = a.div_exact(&g).expect("gcd divides its first argument");
    let cb = b.div_exact(&g).expect("gcd divides its second argument");
    (g, ca, cb)
}

fn normalize_sign(p: LaurentPoly) -> LaurentPoly {
    match p.leading() {
        Some((_, c)) if c.is_negative() => p.neg(),
        _ => p,
    }
}

/// Gcd of polynomials with nonnegative exponents and no common monomial factor
/// assumptions; returns a polynomial with positive leading coefficient.
pub(crate) fn gcd_poly(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let n = a.nvars();
    if a.is_zero() {
        return normalize_sign(b.clone());
    }
    if b.is_zero() {
        return normalize_sign(a.clone());
    }
    if a == b {
        return normalize_sign(a.clone());
    }
    // Monomial inputs: the gcd is a monomial times the content gcd.
    if a.len() == 1 || b.len() == 1 {
        let m = a.min_exps().cmin(&b.min_exps());
        let c = a.content().gcd(&b.content());
        return LaurentPoly::monomial(n, m, c);
    }
    // Common monomial factor, handled separately so the heuristic sees
    // polynomials without one.
    let m = a.min_exps().cmin(&b.min_exps());
    let (a1, b1) = if m.is_one() {
        (a.clone(), b.clone())
    } else {
        let inv = m.inv();
        (a.mul_mono(&inv), b.mul_mono(&inv))
    };
    // Disjoint variable sets: only the content can be shared.
    let (ma, mb) = (a1.var_mask(), b1.var_mask());
    let g = if ma & mb == 0 {
        let c = a1.content().gcd(&b1.content());
        // A polynomial in variables absent from the other operand shares no
        // nonconstant factor with it.
        LaurentPoly::constant(n, c)
    } else {
        match heu_gcd(&a1, &b1) {
            Some((g, _, _)) => g,
            None => prs_gcd(&a1, &b1),
        }
    };
    normalize_sign(g.mul_mono(&m))
}

fn max_norm(p: &LaurentPoly) -> BigInt {
    p.terms().iter().map(|(_, c)| c.abs()).max().unwrap_or_else(BigInt::zero)
}

/// Heuristic gcd with cofactors; `None` means the heuristic gave up.
fn heu_gcd(f: &LaurentPoly, g: &LaurentPoly) -> Option<(LaurentPoly, LaurentPoly, LaurentPoly)> {
    let n = f.nvars();
    let mask = f.var_mask() | g.var_mask();
    if mask == 0 {
        let a = &f.terms()[0].1;
        let b = &g.terms()[0].1;
        let h = a.gcd(b);
        return Some((
            LaurentPoly::constant(n, h.clone()),
            LaurentPoly::constant(n, a / &h),
            LaurentPoly::constant(n, b / &h),
        ));
    }
    let var = mask.trailing_zeros() as usize;
    let content = f.content().gcd(&g.content());
    let f = f.div_int_exact(&content);
    let g = g.div_int_exact(&content);
    let fnorm = max_norm(&f);
    let gnorm = max_norm(&g);
    let b: BigInt = BigInt::from(2) * std::cmp::min(&fnorm, &gnorm) + 29;
    let flc = f.leading().unwrap().1.abs();
    let glc = g.leading().unwrap().1.abs();
    let lower: BigInt = BigInt::from(2) * std::cmp::min(&fnorm / &flc, &gnorm / &glc) + 4;
    let mut x: BigInt = std::cmp::max(std::cmp::min(b.clone(), BigInt::from(99) * b.sqrt()), lower);
    let scale = |h: LaurentPoly| h.scale(&content);
    for _ in 0..HEU_ATTEMPTS {
        let ff = f.eval_var_int(var, &x);
        let gg = g.eval_var_int(var, &x);
        if !ff.is_zero() && !gg.is_zero() {
            if let Some((h, cff, cfg)) = heu_gcd(&ff, &gg) {
                let h = primitive(&interpolate(&h, var, &x));
                if !h.is_zero() {
                    if let Some(cf) = f.div_exact(&h) {
                        if let Some(cg) = g.div_exact(&h) {
                            return Some((scale(h), cf, cg));
                        }
                    }
                }
                let cff = interpolate(&cff, var, &x);
                if !cff.is_zero() {
                    if let Some(h) = f.div_exact(&cff) {
                        if let Some(cg) = g.div_exact(&h) {
                            return Some((scale(h), cff, cg));
                        }
                    }
                }
                let cfg = interpolate(&cfg, var, &x);
                if !cfg.is_zero() {
                    if let Some(h) = g.div_exact(&cfg) {
                        if let Some(cf) = f.div_exact(&h) {
                            return Some((scale(h), cf, cfg));
                        }
                    }
                }
            }
        }
        x = BigInt::from(73794) * &x * x.sqrt().sqrt() / BigInt::from(27011);
    }
    None
}

/// Reads the balanced base-`x` digits of each coefficient as powers of `var`.
fn interpolate(h: &LaurentPoly, var: usize, x: &BigInt) -> LaurentPoly {
    let n = h.nvars();
    let half = x / 2;
    let mut terms: Vec<(Mono, BigInt)> = Vec::new();
    for (m, c) in h.terms() {
        let mut c = c.clone();
        let mut e = 0;
        while !c.is_zero() {
            let mut digit = c.mod_floor(x);
            if digit > half {
                digit -= x;
            }
            if !digit.is_zero() {
                let mut m2 = *m;
                m2.set(var, e);
                terms.push((m2, digit.clone()));
            }
            c = (c - digit) / x;
            e += 1;
        }
    }
    normalize_sign(LaurentPoly::from_terms(n, terms))
}

fn primitive(p: &LaurentPoly) -> LaurentPoly {
    if p.is_zero() {
        return p.clone();
    }
    normalize_sign(p.div_int_exact(&p.content()))
}

/// Splits `p` by powers of `var`: `p = sum_k coeffs[k] * var^k`.
fn coefficients_in(p: &LaurentPoly, var: usize) -> Vec<LaurentPoly> {
    let n = p.nvars();
    let deg = p.terms().iter().map(|(m, _)| m.get(var)).max().unwrap_or(0);
    let mut buckets: Vec<Vec<(Mono, BigInt)>> = vec![Vec::new(); deg as usize + 1];
    for (m, c) in p.terms() {
        let mut m2 = *m;
        let e = m2.get(var);
        m2.set(var, 0);
        buckets[e as usize].push((m2, c.clone()));
    }
    buckets.into_iter().map(|b| LaurentPoly::from_terms(n, b)).collect()
}

fn degree_in(p: &LaurentPoly, var: usize) -> i32 {
    p.terms().iter().map(|(m, _)| m.get(var)).max().unwrap_or(-1)
}

/// Content of `p` as a polynomial in `var` with coefficients in the other variables.
fn content_in(p: &LaurentPoly, var: usize) -> LaurentPoly {
    let coeffs = coefficients_in(p, var);
    let mut g = LaurentPoly::zero(p.nvars());
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = gcd_poly(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Pseudo-remainder of `a` by `b` as polynomials in `var`.
fn prem(a: &LaurentPoly, b: &LaurentPoly, var: usize) -> LaurentPoly {
    let db = degree_in(b, var);
    let lb = coefficients_in(b, var).pop().unwrap();
    let mut r = a.clone();
    loop {
        let dr = degree_in(&r, var);
        if r.is_zero() || dr < db {
            return r;
        }
        let lr = coefficients_in(&r, var).pop().unwrap();
        let shift = Mono::var(var, dr - db);
        r = r.mul(&lb).sub(&b.mul(&lr).mul_mono(&shift));
    }
}

/// Deterministic fallback: recursive primitive pseudo-remainder sequence.
fn prs_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let n = a.nvars();
    let mask = a.var_mask() | b.var_mask();
    if mask == 0 {
        return LaurentPoly::constant(n, a.content().gcd(&b.content()));
    }
    let var = 31 - mask.leading_zeros() as usize;
    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let c = gcd_poly(&ca, &cb);
    let mut f = a.div_exact(&ca).unwrap();
    let mut g = b.div_exact(&cb).unwrap();
    if degree_in(&f, var) < degree_in(&g, var) {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_zero() {
        let r = prem(&f, &g, var);
        f = g;
        g = if r.is_zero() {
            r
        } else {
            let cr = content_in(&r, var);
            r.div_exact(&cr).unwrap()
        };
    }
    let h = if degree_in(&f, var) <= 0 {
        LaurentPoly::one(n)
    } else {
        let cf = content_in(&f, var);
        f.div_exact(&cf).unwrap()
    };
    normalize_sign(h.mul(&c))
}
