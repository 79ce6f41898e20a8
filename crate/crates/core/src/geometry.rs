//! Equivariant characters at fixed points and quiver representations.
//!
//! Characters are signed multisets of torus weights, stored by exponent
//! vector. Quiver representations of the cyclic chainsaw quiver are stored as
//! exact rational matrices; they are used to test stability, the moment map
//! and the cell decomposition.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::partitions::{Degree, MultiPartition, PartitionError, Square};
use crate::ring::{linalg, p_index, q_index, LaurentPoly, Mono, OneParamSubgroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("character is not effective: weight {0:?} has multiplicity {1}")]
    NotEffective(Mono, i64),
    #[error("weight {0:?} lies on a wall of the subgroup")]
    Wall(Mono),
    #[error("weight {0:?} has no monomial square root")]
    NotSquare(Mono),
    #[error("representation is not stable")]
    NotStable,
    #[error("moment map does not vanish at component {0}")]
    MomentMap(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("cell algorithm produced an invalid multipartition: {0}")]
    BadCell(PartitionError),
    #[error("cell algorithm did not span V_{0}")]
    Incomplete(usize),
}

/// A virtual character: monomial weights with signed multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Character {
    n: usize,
    terms: BTreeMap<Mono, i64>,
}

impl Character {
    pub fn new(n: usize) -> Self {
        Character { n, terms: BTreeMap::new() }
    }

    pub fn from_weights<I: IntoIterator<Item = Mono>>(n: usize, it: I) -> Self {
        let mut c = Character::new(n);
        for w in it {
            c.add_weight(w, 1);
        }
        c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_weight(&mut self, w: Mono, mult: i64) {
        if mult == 0 {
            return;
        }
        let e = self.terms.entry(w).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.terms.remove(&w);
        }
    }

    /// Weights with their multiplicities, in increasing exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &i64)> {
        self.terms.iter()
    }

    pub fn multiplicity(&self, w: &Mono) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    /// Number of distinct weights.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of multiplicities.
    pub fn rank(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|&m| m > 0)
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, m) in &o.terms {
            out.add_weight(*w, *m);
        }
        out
    }

    pub fn minus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, m) in &o.terms {
            out.add_weight(*w, -*m);
        }
        out
    }

    /// Tensor product of characters.
    pub fn times(&self, o: &Self) -> Self {
        let mut out = Character::new(self.n);
        for (a, ma) in &self.terms {
            for (b, mb) in &o.terms {
                out.add_weight(a.mul(b), ma * mb);
            }
        }
        out
    }

    /// Every weight multiplied by the monomial `m`.
    pub fn shifted(&self, m: &Mono) -> Self {
        Character { n: self.n, terms: self.terms.iter().map(|(w, k)| (w.mul(m), *k)).collect() }
    }

    /// The dual character (weights inverted).
    pub fn dual(&self) -> Self {
        Character { n: self.n, terms: self.terms.iter().map(|(w, k)| (w.inv(), *k)).collect() }
    }

    /// Part of the character whose weights satisfy `keep`.
    pub fn filter<F: Fn(&Mono) -> bool>(&self, keep: F) -> Self {
        Character { n: self.n, terms: self.terms.iter().filter(|(w, _)| keep(w)).map(|(w, k)| (*w, *k)).collect() }
    }

    /// Weights with a nontrivial `A = (u, p)` part.
    pub fn moving_part(&self) -> Self {
        let n = self.n;
        self.filter(|w| !is_a_trivial(n, w))
    }

    /// The same multiset with every `q`-exponent set to zero.
    pub fn a_projection(&self) -> Self {
        let qi = q_index(self.n);
        let mut out = Character::new(self.n);
        for (w, m) in &self.terms {
            let mut a = *w;
            a.set(qi, 0);
            out.add_weight(a, *m);
        }
        out
    }

    /// Sum of the weights as a Laurent polynomial.
    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.n, self.terms.iter().map(|(w, m)| (*w, BigInt::from(*m))))
    }
}

impl Serialize for Character {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let width = self.n + 2;
        let v: Vec<(Vec<i32>, i64)> = self.terms.iter().map(|(w, m)| (w.prefix(width).to_vec(), *m)).collect();
        v.serialize(s)
    }
}

/// True if the weight has zero `u`- and `p`-exponents.
pub fn is_a_trivial(n: usize, w: &Mono) -> bool {
    (0..n).all(|i| w.get(i) == 0) && w.get(p_index(n)) == 0
}

fn u_sq(n: usize, i: usize) -> Mono {
    // u_{n+1}^2 = u_1^2 p^{-2}
    if i == n + 1 {
        Mono::var(0, 2).mul(&Mono::var(p_index(n), -2))
    } else {
        Mono::var(i - 1, 2)
    }
}

/// `V_i|_lambda`: the weights of the color-`i` boxes.
pub fn tautological_character(lam: &MultiPartition, i: usize) -> Character {
    let n = lam.n;
    Character::from_weights(n, lam.boxes_of_color(i).iter().map(|b| b.chi(n)))
}

/// `V_i` for `i` in `0..=n`, with `V_0 = V_n p^2`.
fn taut_cyclic(lam: &MultiPartition, i: usize) -> Character {
    let n = lam.n;
    if i == 0 {
        tautological_character(lam, n).shifted(&Mono::var(p_index(n), 2))
    } else {
        tautological_character(lam, i)
    }
}

/// Tangent character at a fixed point:
/// `sum_i (1 - q^{-2})(V_i/V_{i-1} - V_i/V_i) + V_i/u_i^2 + u_{i+1}^2/(V_i q^2)`.
pub fn tangent_character(lam: &MultiPartition) -> Result<Character, GeometryError> {
    let n = lam.n;
    let qm2 = Mono::var(q_index(n), -2);
    let mut t = Character::new(n);
    for i in 1..=n {
        let vi = taut_cyclic(lam, i);
        let vprev = taut_cyclic(lam, i - 1);
        let diff = vi.times(&vprev.dual()).minus(&vi.times(&vi.dual()));
        t = t.plus(&diff).minus(&diff.shifted(&qm2));
        t = t.plus(&vi.shifted(&u_sq(n, i).inv()));
        t = t.plus(&vi.dual().shifted(&u_sq(n, i + 1).mul(&qm2)));
    }
    if let Some((w, m)) = t.iter().find(|(_, m)| **m <= 0) {
        return Err(GeometryError::NotEffective(*w, *m));
    }
    Ok(t)
}

/// The bundles `V = sum_i u_i^{-2} V_i` and `U = sum_i u_{i+1}^2 q^{-2} V_i^{-1}` at a fixed point.
pub fn vw_characters(lam: &MultiPartition) -> (Character, Character) {
    let n = lam.n;
    let qm2 = Mono::var(q_index(n), -2);
    let mut v = Character::new(n);
    let mut u = Character::new(n);
    for i in 1..=n {
        let vi = tautological_character(lam, i);
        v = v.plus(&vi.shifted(&u_sq(n, i).inv()));
        u = u.plus(&vi.dual().shifted(&u_sq(n, i + 1).mul(&qm2)));
    }
    (v, u)
}

/// Decomposition of a character with respect to a one-parameter subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractingSplit {
    pub attracting: Character,
    pub repelling: Character,
    pub fixed: Character,
}

/// Splits weights by the sign of their pairing with `xi`; weights with trivial `A`-part are fixed.
pub fn split_by_subgroup(c: &Character, xi: &OneParamSubgroup) -> Result<AttractingSplit, GeometryError> {
    let n = c.n();
    let mut s = AttractingSplit { attracting: Character::new(n), repelling: Character::new(n), fixed: Character::new(n) };
    for (w, m) in c.iter() {
        if is_a_trivial(n, w) {
            s.fixed.add_weight(*w, *m);
            continue;
        }
        match xi.pairing(w).signum() {
            1 => s.attracting.add_weight(*w, *m),
            -1 => s.repelling.add_weight(*w, *m),
            _ => return Err(GeometryError::Wall(*w)),
        }
    }
    Ok(s)
}

/// `prod_w (1 - w^{-1})^{mult(w)}` for an effective character.
pub fn lambda_exterior_dual(c: &Character) -> Result<LaurentPoly, GeometryError> {
    let n = c.n();
    let mut out = LaurentPoly::one(n);
    for (w, m) in c.iter() {
        if *m < 0 {
            return Err(GeometryError::NotEffective(*w, *m));
        }
        let f = LaurentPoly::one(n).sub(&LaurentPoly::monomial(n, w.inv(), 1));
        out = out.mul(&f.pow(*m as u32));
    }
    Ok(out)
}

/// `prod_w (w^{1/2} - w^{-1/2})^{mult(w)}` for an effective character of square weights.
pub fn lambda_symmetric(c: &Character) -> Result<LaurentPoly, GeometryError> {
    let n = c.n();
    let mut out = LaurentPoly::one(n);
    for (w, m) in c.iter() {
        if *m < 0 {
            return Err(GeometryError::NotEffective(*w, *m));
        }
        if !w.is_square() {
            return Err(GeometryError::NotSquare(*w));
        }
        let s = w.sqrt();
        let f = LaurentPoly::monomial(n, s, 1).sub(&LaurentPoly::monomial(n, s.inv(), 1));
        out = out.mul(&f.pow(*m as u32));
    }
    Ok(out)
}

/// Dense matrix over the rationals with explicit shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Vec<BigRational>>) -> Result<Self, GeometryError> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(GeometryError::Shape(format!("expected {rows}x{cols} entries")));
        }
        Ok(RatMatrix { rows, cols, data: entries.into_iter().flatten().collect() })
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = BigRational::zero();
                for (c, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc += self.get(r, c) * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, c: usize) -> Vec<BigRational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let inv = linalg::inverse(&self.to_rows())?;
        Some(RatMatrix { rows: self.rows, cols: self.cols, data: inv.into_iter().flatten().collect() })
    }

    /// Copy of the block with the given row and column ranges.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries = self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        RawMatrix { rows: self.rows, cols: self.cols, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(d)?;
        let entries = raw
            .entries
            .iter()
            .map(|r| r.iter().map(|x| x.parse::<BigRational>().map_err(serde::de::Error::custom)).collect())
            .collect::<Result<Vec<Vec<_>>, _>>()?;
        RatMatrix::from_rows(raw.rows, raw.cols, entries).map_err(serde::de::Error::custom)
    }
}

/// A representation of the cyclic chainsaw quiver with framing.
///
/// Index `i - 1` holds `X_i: V_i -> V_i`, `Y_i: V_{i-1} -> V_i`,
/// `A_i: W_i -> V_i` and `B_i: V_{i-1} -> W_i`, with `V_0 = V_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverRep {
    pub n: usize,
    pub d: Degree,
    pub x: Vec<RatMatrix>,
    pub y: Vec<RatMatrix>,
    pub a: Vec<RatMatrix>,
    pub b: Vec<RatMatrix>,
}

fn prev(i: usize, n: usize) -> usize {
    if i == 1 {
        n
    } else {
        i - 1
    }
}

fn next(i: usize, n: usize) -> usize {
    i % n + 1
}

impl QuiverRep {
    pub fn zero(n: usize, d: &[usize]) -> Self {
        let dim = |i: usize| d[i - 1];
        QuiverRep {
            n,
            d: d.to_vec(),
            x: (1..=n).map(|i| RatMatrix::zeros(dim(i), dim(i))).collect(),
            y: (1..=n).map(|i| RatMatrix::zeros(dim(i), dim(prev(i, n)))).collect(),
            a: (1..=n).map(|i| RatMatrix::zeros(dim(i), 1)).collect(),
            b: (1..=n).map(|i| RatMatrix::zeros(1, dim(prev(i, n)))).collect(),
        }
    }

    /// Checks all matrix shapes.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let n = self.n;
        if self.d.len() != n || self.x.len() != n || self.y.len() != n || self.a.len() != n || self.b.len() != n {
            return Err(GeometryError::Shape("wrong number of components".into()));
        }
        for i in 1..=n {
            let (di, dp) = (self.d[i - 1], self.d[prev(i, n) - 1]);
            let ok = (self.x[i - 1].rows, self.x[i - 1].cols) == (di, di)
                && (self.y[i - 1].rows, self.y[i - 1].cols) == (di, dp)
                && (self.a[i - 1].rows, self.a[i - 1].cols) == (di, 1)
                && (self.b[i - 1].rows, self.b[i - 1].cols) == (1, dp);
            if !ok {
                return Err(GeometryError::Shape(format!("component {i}")));
            }
        }
        Ok(())
    }

    fn xm(&self, i: usize) -> &RatMatrix {
        &self.x[i - 1]
    }

    fn ym(&self, i: usize) -> &RatMatrix {
        &self.y[i - 1]
    }

    /// `v_box = Y^y X^x A_k w_k`, a vector in `V_{color(box)}`.
    pub fn box_vector(&self, b: &Square) -> Vec<BigRational> {
        let n = self.n;
        let mut v = self.a[b.k - 1].column(0);
        for _ in 0..b.x {
            v = self.xm(b.k).apply(&v);
        }
        let mut c = b.k;
        for _ in 0..b.y {
            c = next(c, n);
            v = self.ym(c).apply(&v);
        }
        v
    }
}

/// Components `X_i Y_i - Y_i X_{i-1} + A_i B_i` for `i = 1..n`, cyclically.
pub fn moment_map(r: &QuiverRep) -> Vec<RatMatrix> {
    let n = r.n;
    (1..=n)
        .map(|i| {
            let xy = r.xm(i).mul(r.ym(i));
            let yx = r.ym(i).mul(r.xm(prev(i, n)));
            xy.sub(&yx).add(&r.a[i - 1].mul(&r.b[i - 1]))
        })
        .collect()
}

/// Incremental row-echelon basis of a subspace of `Q^dim`.
#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl Echelon {
    fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (a, b) in v.iter_mut().zip(row.iter()) {
                    if !b.is_zero() {
                        *a -= &f * b;
                    }
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent of the current span; returns whether it was added.
    fn insert(&mut self, v: &[BigRational]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = BigRational::one() / &r[p];
        for x in r.iter_mut() {
            *x = &*x * &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (a, b) in row.iter_mut().zip(r.iter()) {
                    if !b.is_zero() {
                        *a -= &f * b;
                    }
                }
            }
        }
        self.rows.push((p, r));
        true
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Stability: the images of the `A_i` generate every `V_i` under `X` and `Y`.
pub fn is_stable(r: &QuiverRep) -> bool {
    let n = r.n;
    let mut spans: Vec<Echelon> = vec![Echelon::default(); n];
    let mut queue: Vec<(usize, Vec<BigRational>)> = (1..=n).map(|i| (i, r.a[i - 1].column(0))).collect();
    while let Some((i, v)) = queue.pop() {
        if r.d[i - 1] == 0 || !spans[i - 1].insert(&v) {
            continue;
        }
        queue.push((i, r.xm(i).apply(&v)));
        let j = next(i, n);
        queue.push((j, r.ym(j).apply(&v)));
    }
    (1..=n).all(|i| spans[i - 1].dim() == r.d[i - 1])
}

/// Position of each box of `lam` inside the basis of its color space.
fn box_positions(lam: &MultiPartition) -> HashMap<Square, usize> {
    let n = lam.n;
    let mut pos = HashMap::new();
    for i in 1..=n {
        for (idx, b) in lam.boxes_of_color(i).into_iter().enumerate() {
            pos.insert(b, idx);
        }
    }
    pos
}

/// The torus-fixed representation with basis `v_box`: `X` moves right, `Y` moves up, `B = 0`.
pub fn fixed_point_rep(lam: &MultiPartition) -> QuiverRep {
    let n = lam.n;
    let d = lam.degree();
    let pos = box_positions(lam);
    let mut r = QuiverRep::zero(n, &d);
    for b in lam.boxes() {
        let c = b.color(n);
        let right = Square::new(b.k, b.x + 1, b.y);
        if let Some(&t) = pos.get(&right) {
            r.x[c - 1].set(t, pos[&b], BigRational::one());
        }
        let up = Square::new(b.k, b.x, b.y + 1);
        if let Some(&t) = pos.get(&up) {
            let c2 = next(c, n);
            r.y[c2 - 1].set(t, pos[&b], BigRational::one());
        }
        if b.x == 0 && b.y == 0 {
            r.a[b.k - 1].set(pos[&b], 0, BigRational::one());
        }
    }
    r
}

fn check_cell_input(r: &QuiverRep) -> Result<(), GeometryError> {
    r.validate()?;
    if let Some(i) = moment_map(r).iter().position(|m| !m.is_zero()) {
        return Err(GeometryError::MomentMap(i + 1));
    }
    if !is_stable(r) {
        return Err(GeometryError::NotStable);
    }
    Ok(())
}

/// The fixed point whose attracting cell contains `r`.
///
/// For each color `i`, group `k` consists of the vectors `Y^k X^x A_{i-k} w`
/// for `x = 0, 1, ...`; `r_k` is the largest count keeping all vectors of
/// groups `0..=k` linearly independent, and becomes row `k` of
/// `lambda^{i-k}`.
pub fn attracting_cell(r: &QuiverRep) -> Result<MultiPartition, GeometryError> {
    check_cell_input(r)?;
    let n = r.n;
    let total: usize = r.d.iter().sum();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut row_len: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in 1..=n {
        let di = r.d[i - 1];
        let mut span = Echelon::default();
        for k in 0..=total {
            if span.dim() == di {
                break;
            }
            let part = (i as i64 - 1 - k as i64).rem_euclid(n as i64) as usize + 1;
            let mut count = 0;
            while span.dim() < di {
                let v = r.box_vector(&Square::new(part, count, k));
                if !span.insert(&v) {
                    break;
                }
                count += 1;
            }
            if count > 0 {
                row_len.insert((part, k), count);
            }
        }
        if span.dim() != di {
            return Err(GeometryError::Incomplete(i));
        }
    }
    for ((part, k), len) in row_len {
        let rs = &mut rows[part - 1];
        if rs.len() < k {
            rs.resize(k, 0);
        }
        rs.push(len);
    }
    MultiPartition::new(n, rows).map_err(GeometryError::BadCell)
}

/// A nonzero entry of `X` or `Y` in the `v_box` basis whose weight is neither trivial nor attracting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellViolation {
    pub matrix: String,
    pub target: Square,
    pub source: Square,
    pub weight: Vec<i32>,
}

/// Rewrites `r` in the basis `v_box` of `lam` and checks that every nonzero
/// entry of every `X_i`, `Y_i` has trivial weight or positive pairing with `xi`.
///
/// The entry mapping box `s` to box `t` has weight `chi_t / (chi_s q^2)` in
/// `X` and `chi_t / chi_s` in `Y`, with an extra `p^{-2}` when `Y` wraps from
/// color `n` to color `1`.
pub fn cell_postcondition(r: &QuiverRep, lam: &MultiPartition, xi: &OneParamSubgroup) -> Result<Vec<CellViolation>, GeometryError> {
    let n = r.n;
    if lam.degree() != r.d {
        return Err(GeometryError::Shape("cell degree differs from the representation".into()));
    }
    let basis: Vec<Vec<Square>> = (1..=n).map(|i| lam.boxes_of_color(i)).collect();
    let mut change = Vec::with_capacity(n);
    let mut change_inv = Vec::with_capacity(n);
    for i in 1..=n {
        let di = r.d[i - 1];
        let mut p = RatMatrix::zeros(di, di);
        for (c, b) in basis[i - 1].iter().enumerate() {
            for (row, v) in r.box_vector(b).into_iter().enumerate() {
                p.set(row, c, v);
            }
        }
        let inv = p.inverse().ok_or(GeometryError::Incomplete(i))?;
        change.push(p);
        change_inv.push(inv);
    }
    let qm2 = Mono::var(q_index(n), -2);
    let pm2 = Mono::var(p_index(n), -2);
    let mut out = Vec::new();
    for i in 1..=n {
        let j = prev(i, n);
        let xp = change_inv[i - 1].mul(r.xm(i)).mul(&change[i - 1]);
        let yp = change_inv[i - 1].mul(r.ym(i)).mul(&change[j - 1]);
        let checks = [("X", &xp, i, qm2), ("Y", &yp, j, if i == 1 { pm2 } else { Mono::ONE })];
        for (name, m, src_color, twist) in checks {
            for (t_idx, t) in basis[i - 1].iter().enumerate() {
                for (s_idx, s) in basis[src_color - 1].iter().enumerate() {
                    if m.get(t_idx, s_idx).is_zero() {
                        continue;
                    }
                    let w = t.chi(n).div(&s.chi(n)).mul(&twist);
                    if !w.is_one() && xi.pairing(&w) <= 0 {
                        out.push(CellViolation {
                            matrix: format!("{name}_{i}"),
                            target: *t,
                            source: *s,
                            weight: w.prefix(n + 2).to_vec(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Total-space shift operators of the fixed-point module, indexed by `lam.boxes()`.
fn total_shift_operators(lam: &MultiPartition) -> (RatMatrix, RatMatrix, HashMap<Square, usize>) {
    let boxes = lam.boxes();
    let idx: HashMap<Square, usize> = boxes.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let size = boxes.len();
    let mut x0 = RatMatrix::zeros(size, size);
    let mut y0 = RatMatrix::zeros(size, size);
    for b in &boxes {
        if let Some(&t) = idx.get(&Square::new(b.k, b.x + 1, b.y)) {
            x0.set(t, idx[b], BigRational::one());
        }
        if let Some(&t) = idx.get(&Square::new(b.k, b.x, b.y + 1)) {
            y0.set(t, idx[b], BigRational::one());
        }
    }
    (x0, y0, idx)
}

fn small_int<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(rng.gen_range(lo..=hi)))
}

/// Random element of `SL_k(Z)` with small entries, as a product of unitriangular matrices.
fn random_unimodular<R: Rng>(rng: &mut R, k: usize) -> RatMatrix {
    let mut lower = RatMatrix::identity(k);
    let mut upper = RatMatrix::identity(k);
    for i in 0..k {
        for j in 0..i {
            lower.set(i, j, small_int(rng, -2, 2));
            upper.set(j, i, small_int(rng, -2, 2));
        }
    }
    lower.mul(&upper)
}

/// A random stable representation with vanishing moment map and `B = 0`,
/// obtained by deforming `fixed_point_rep(lam)` and changing bases.
///
/// `X` and `Y` are replaced by polynomials in the shift operators whose
/// `Y`-degree is `0` resp. `1` mod `n`; these commute and respect colors, so
/// the moment map stays zero. The framing vectors are perturbed inside their
/// color spaces. Samples that fail stability are redrawn.
pub fn random_stable_rep<R: Rng>(lam: &MultiPartition, rng: &mut R) -> QuiverRep {
    let n = lam.n;
    let d = lam.degree();
    let (x0, y0, idx) = total_shift_operators(lam);
    let size = x0.rows;
    let boxes = lam.boxes();
    let color_of: Vec<usize> = boxes.iter().map(|b| b.color(n)).collect();
    let mut x_pows = vec![RatMatrix::identity(size)];
    let mut y_pows = vec![RatMatrix::identity(size)];
    for e in 1..=(2 * n + 1) {
        x_pows.push(x_pows[e - 1].mul(&x0));
        y_pows.push(y_pows[e - 1].mul(&y0));
    }
    for _attempt in 0..64 {
        let mut xt = x0.clone();
        let mut yt = y0.clone();
        for a in 0..=3usize {
            for b in 0..=(2 * n + 1) {
                if a + b < 2 || !rng.gen_bool(0.5) {
                    continue;
                }
                let term = x_pows[a].mul(&y_pows[b]).scale(&small_int(rng, -2, 2));
                if b % n == 0 {
                    xt = xt.add(&term);
                } else if b % n == 1 {
                    yt = yt.add(&term);
                }
            }
        }
        let mut r = QuiverRep::zero(n, &d);
        let local: Vec<usize> = {
            let pos = box_positions(lam);
            boxes.iter().map(|b| pos[b]).collect()
        };
        for gs in 0..size {
            for gt in 0..size {
                let (cs, ct) = (color_of[gs], color_of[gt]);
                let xv = xt.get(gt, gs);
                if !xv.is_zero() && cs == ct {
                    r.x[ct - 1].set(local[gt], local[gs], xv.clone());
                }
                let yv = yt.get(gt, gs);
                if !yv.is_zero() && ct == next(cs, n) {
                    r.y[ct - 1].set(local[gt], local[gs], yv.clone());
                }
            }
        }
        for k in 1..=n {
            if let Some(&g) = idx.get(&Square::new(k, 0, 0)) {
                r.a[k - 1].set(local[g], 0, BigRational::one());
            }
            for (g, b) in boxes.iter().enumerate() {
                if color_of[g] == k && (b.x, b.y) != (0, 0) && rng.gen_bool(0.3) {
                    let v = r.a[k - 1].get(local[g], 0) + small_int(rng, -1, 1);
                    r.a[k - 1].set(local[g], 0, v);
                }
            }
        }
        if !is_stable(&r) {
            continue;
        }
        return conjugate(&r, &(1..=n).map(|i| random_unimodular(rng, d[i - 1])).collect::<Vec<_>>());
    }
    conjugate(&fixed_point_rep(lam), &(1..=n).map(|i| random_unimodular(rng, d[i - 1])).collect::<Vec<_>>())
}

/// Base change by `g_i` in `GL(V_i)`.
pub fn conjugate(r: &QuiverRep, g: &[RatMatrix]) -> QuiverRep {
    let n = r.n;
    let ginv: Vec<RatMatrix> = g.iter().map(|m| m.inverse().expect("base change must be invertible")).collect();
    let mut out = r.clone();
    for i in 1..=n {
        let j = prev(i, n);
        out.x[i - 1] = g[i - 1].mul(&r.x[i - 1]).mul(&ginv[i - 1]);
        out.y[i - 1] = g[i - 1].mul(&r.y[i - 1]).mul(&ginv[j - 1]);
        out.a[i - 1] = g[i - 1].mul(&r.a[i - 1]);
        out.b[i - 1] = r.b[i - 1].mul(&ginv[j - 1]);
    }
    out
}
