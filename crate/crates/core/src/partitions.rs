//! Multipartitions, colored boxes, vertical strips and the orders on fixed points.
//!
//! A fixed point of the torus action is an `n`-tuple of 2d partitions
//! `(lambda^1, ..., lambda^n)`. Each partition is stored as its row lengths
//! read bottom-up. The box in column `x`, row `y` of `lambda^k` has color
//! `(y + k - 1) mod n + 1`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::{p_index, q_index, LaurentPoly, Mono};

/// Color-degree vector `(d_1, ..., d_n)`.
pub type Degree = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("rows of partition {k} are not weakly decreasing positive integers: {rows:?}")]
    NotAPartition { k: usize, rows: Vec<usize> },
    #[error("expected {expected} partitions, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("degree mismatch: {0:?} vs {1:?}")]
    DegreeMismatch(Degree, Degree),
    #[error("invalid interval [{i};{j}) for n = {n}")]
    BadInterval { i: usize, j: usize, n: usize },
    #[error("n = {0} is outside the supported range 2..=6")]
    BadN(usize),
    #[error("cannot parse multipartition {0:?}")]
    Parse(String),
}

/// Which formula to use for the `p`-exponent of a box weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChiConvention {
    /// `p^{2 floor((y + k - 1) / n)}`, matching the worked tableau.
    #[default]
    Tableau,
    /// `p^{2 floor((y - k) / n)}`, the inline text formula, kept for comparison.
    Literal,
}

/// A box of the multipartition: column `x`, row `y` of `lambda^k` (`k` is 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Square {
    pub k: usize,
    pub x: usize,
    pub y: usize,
}

impl Square {
    pub fn new(k: usize, x: usize, y: usize) -> Self {
        Square { k, x, y }
    }

    /// Color in `1..=n`.
    pub fn color(&self, n: usize) -> usize {
        (self.y + self.k - 1) % n + 1
    }

    /// Exponent vector of `sqrt(chi)`, namely `u_k q^x p^{floor((y + k - 1) / n)}`.
    pub fn sqrt_chi(&self, n: usize) -> Mono {
        self.sqrt_chi_with(n, ChiConvention::Tableau)
    }

    pub fn sqrt_chi_with(&self, n: usize, conv: ChiConvention) -> Mono {
        let mut m = Mono::ONE;
        m.set(self.k - 1, 1);
        m.set(q_index(n), self.x as i32);
        let pe = match conv {
            ChiConvention::Tableau => ((self.y + self.k - 1) / n) as i32,
            ChiConvention::Literal => (self.y as i32 - self.k as i32).div_euclid(n as i32),
        };
        m.set(p_index(n), pe);
        m
    }

    /// Exponent vector of the box weight `chi`.
    pub fn chi(&self, n: usize) -> Mono {
        self.sqrt_chi(n).pow(2)
    }
}

/// The box weight `chi` as a monomial polynomial.
pub fn chi(sq: &Square, n: usize) -> LaurentPoly {
    chi_with(sq, n, ChiConvention::Tableau)
}

pub fn chi_with(sq: &Square, n: usize, conv: ChiConvention) -> LaurentPoly {
    LaurentPoly::monomial(n, sq.sqrt_chi_with(n, conv).pow(2), 1)
}

/// An `n`-tuple of partitions, each stored as bottom-up row lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawMultiPartition")]
pub struct MultiPartition {
    pub n: usize,
    pub rows: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawMultiPartition {
    n: usize,
    rows: Vec<Vec<usize>>,
}

impl TryFrom<RawMultiPartition> for MultiPartition {
    type Error = PartitionError;
    fn try_from(r: RawMultiPartition) -> Result<Self, Self::Error> {
        MultiPartition::new(r.n, r.rows)
    }
}

impl fmt::Display for MultiPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "({})", parts.join("|"))
    }
}

/// Parses the display form `(2,1|1|)`; the outer parentheses are optional.
impl std::str::FromStr for MultiPartition {
    type Err = PartitionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let t = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(t);
        let rows = t
            .split('|')
            .map(|part| {
                let part = part.trim();
                if part.is_empty() {
                    return Ok(Vec::new());
                }
                part.split(',').map(|x| x.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PartitionError::Parse(s.to_string()))?;
        MultiPartition::new(rows.len(), rows)
    }
}

impl MultiPartition {
    pub fn empty(n: usize) -> Self {
        MultiPartition { n, rows: vec![Vec::new(); n] }
    }

    /// Validating constructor.
    pub fn new(n: usize, rows: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        if !(2..=6).contains(&n) {
            return Err(PartitionError::BadN(n));
        }
        if rows.len() != n {
            return Err(PartitionError::WrongArity { expected: n, found: rows.len() });
        }
        for (k, r) in rows.iter().enumerate() {
            if r.contains(&0) || r.windows(2).any(|w| w[0] < w[1]) {
                return Err(PartitionError::NotAPartition { k: k + 1, rows: r.clone() });
            }
        }
        Ok(MultiPartition { n, rows })
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    /// Total number of boxes.
    pub fn size(&self) -> usize {
        self.rows.iter().map(|r| r.iter().sum::<usize>()).sum()
    }

    /// All boxes, ordered by `k`, then `y`, then `x`.
    pub fn boxes(&self) -> Vec<Square> {
        let mut out = Vec::with_capacity(self.size());
        for (k, rows) in self.rows.iter().enumerate() {
            for (y, &len) in rows.iter().enumerate() {
                for x in 0..len {
                    out.push(Square::new(k + 1, x, y));
                }
            }
        }
        out
    }

    /// Boxes of the given color, in the order of [`MultiPartition::boxes`].
    pub fn boxes_of_color(&self, color: usize) -> Vec<Square> {
        self.boxes().into_iter().filter(|b| b.color(self.n) == color).collect()
    }

    pub fn contains(&self, b: &Square) -> bool {
        b.k >= 1 && b.k <= self.n && self.rows[b.k - 1].get(b.y).is_some_and(|&len| b.x < len)
    }

    /// Color-degree vector.
    pub fn degree(&self) -> Degree {
        let mut d = vec![0; self.n];
        for b in self.boxes() {
            d[b.color(self.n) - 1] += 1;
        }
        d
    }

    /// Sum of the row indices of all boxes.
    pub fn height_sum(&self) -> usize {
        self.rows.iter().map(|rows| rows.iter().enumerate().map(|(y, &len)| y * len).sum::<usize>()).sum()
    }

    /// Finite-sector predicate: `lambda^i` has at most `n - i` rows and `lambda^n` is empty.
    pub fn is_kostant(&self) -> bool {
        self.rows.iter().enumerate().all(|(k, r)| r.len() < self.n - k)
    }

    /// Boxes that can be added while keeping every component a partition.
    pub fn addable(&self) -> Vec<Square> {
        let mut out = Vec::new();
        for (k, rows) in self.rows.iter().enumerate() {
            for y in 0..=rows.len() {
                let len = rows.get(y).copied().unwrap_or(0);
                if y == 0 || rows[y - 1] > len {
                    out.push(Square::new(k + 1, len, y));
                }
            }
        }
        out
    }

    /// Boxes that can be removed while keeping every component a partition.
    pub fn removable(&self) -> Vec<Square> {
        let mut out = Vec::new();
        for (k, rows) in self.rows.iter().enumerate() {
            for (y, &len) in rows.iter().enumerate() {
                let next = rows.get(y + 1).copied().unwrap_or(0);
                if len > next {
                    out.push(Square::new(k + 1, len - 1, y));
                }
            }
        }
        out
    }

    /// Adds an addable box. Panics if the box is not addable.
    pub fn with_box(&self, b: &Square) -> Self {
        let mut out = self.clone();
        let rows = &mut out.rows[b.k - 1];
        if b.y == rows.len() {
            assert_eq!(b.x, 0, "box {b:?} is not addable");
            rows.push(1);
        } else {
            assert_eq!(rows[b.y], b.x, "box {b:?} is not addable");
            assert!(b.y == 0 || rows[b.y - 1] > b.x, "box {b:?} is not addable");
            rows[b.y] += 1;
        }
        out
    }

    /// True if every box of `self` is a box of `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.n == other.n
            && self.rows.iter().zip(other.rows.iter()).all(|(a, b)| {
                a.len() <= b.len() && a.iter().zip(b.iter()).all(|(x, y)| x <= y)
            })
    }

    /// Boxes of `self` not in `smaller`, assuming `smaller` is a subset.
    pub fn skew_boxes(&self, smaller: &Self) -> Vec<Square> {
        let mut out = Vec::new();
        for (k, rows) in self.rows.iter().enumerate() {
            for (y, &len) in rows.iter().enumerate() {
                let start = smaller.rows[k].get(y).copied().unwrap_or(0);
                for x in start..len {
                    out.push(Square::new(k + 1, x, y));
                }
            }
        }
        out
    }
}

/// The residue-count vector `[i;j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntervalVector {
    pub i: usize,
    pub j: usize,
    pub vector: Degree,
}

impl IntervalVector {
    pub fn len(&self) -> usize {
        self.j - self.i
    }

    pub fn is_empty(&self) -> bool {
        self.j == self.i
    }
}

impl fmt::Display for IntervalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};{})", self.i, self.j)
    }
}

/// Color of an integer slot `a`, i.e. its residue mod `n` taken in `1..=n`.
pub fn slot_color(a: usize, n: usize) -> usize {
    (a - 1) % n + 1
}

/// `[i;j)`: entry `k` counts the integers in `[i, j)` congruent to `k` mod `n`.
pub fn interval_vector(i: usize, j: usize, n: usize) -> Result<IntervalVector, PartitionError> {
    if i < 1 || i > n || j <= i {
        return Err(PartitionError::BadInterval { i, j, n });
    }
    let mut vector = vec![0; n];
    for a in i..j {
        vector[slot_color(a, n) - 1] += 1;
    }
    Ok(IntervalVector { i, j, vector })
}

/// One `[k; k + h)` per column of height `h` in each `lambda^k`, ordered by `k`, then column.
pub fn strip_decomposition(lam: &MultiPartition) -> Vec<IntervalVector> {
    let n = lam.n;
    let mut out = Vec::new();
    for (k0, rows) in lam.rows.iter().enumerate() {
        let k = k0 + 1;
        let width = rows.first().copied().unwrap_or(0);
        for x in 0..width {
            let h = rows.iter().take_while(|&&len| len > x).count();
            out.push(interval_vector(k, k + h, n).expect("strip interval is valid"));
        }
    }
    out
}

/// All multipartitions of color-degree exactly `d`, sorted.
///
/// Components are built one row at a time with the color budget checked as
/// each row is placed, so only branches that can still reach `d` are explored.
pub fn enumerate_fixed_points(n: usize, d: &[usize]) -> Vec<MultiPartition> {
    assert_eq!(d.len(), n, "degree vector has wrong length");
    let mut out = Vec::new();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut budget = d.to_vec();
    fill_component(n, 0, &mut rows, &mut budget, &mut out);
    out.sort();
    out
}

fn fill_component(n: usize, k: usize, rows: &mut Vec<Vec<usize>>, budget: &mut Vec<usize>, out: &mut Vec<MultiPartition>) {
    if k == n {
        if budget.iter().all(|&b| b == 0) {
            out.push(MultiPartition { n, rows: rows.clone() });
        }
        return;
    }
    fill_rows(n, k, usize::MAX, rows, budget, out);
}

/// Extends `rows[k]` by a new row of length at most `max_len`, or closes it.
fn fill_rows(n: usize, k: usize, max_len: usize, rows: &mut Vec<Vec<usize>>, budget: &mut Vec<usize>, out: &mut Vec<MultiPartition>) {
    fill_component(n, k + 1, rows, budget, out);
    let y = rows[k].len();
    let color = (y + k) % n;
    let cap = max_len.min(budget[color]);
    for len in 1..=cap {
        budget[color] -= len;
        rows[k].push(len);
        fill_rows(n, k, len, rows, budget, out);
        rows[k].pop();
        budget[color] += len;
    }
}

/// Compares `h(lambda)` with `h(mu)`, the sums of box heights.
pub fn order_h(lam: &MultiPartition, mu: &MultiPartition) -> Result<Ordering, PartitionError> {
    check_same_degree(lam, mu)?;
    Ok(lam.height_sum().cmp(&mu.height_sum()))
}

fn check_same_degree(lam: &MultiPartition, mu: &MultiPartition) -> Result<(), PartitionError> {
    let (a, b) = (lam.degree(), mu.degree());
    if lam.n != mu.n || a != b {
        return Err(PartitionError::DegreeMismatch(a, b));
    }
    Ok(())
}

/// Direction in which vertical strips move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripDirection {
    /// The affine orientation: a strip moves up by `m > 0` rows into `lambda^{k-m}`.
    Upward,
    /// The finite-sector orientation: a strip moves down by `m` rows into `lambda^{k+m}`,
    /// which reads as a move to the right in the finite tableau.
    Rightward,
}

/// All multipartitions obtained from `lam` by one vertical-strip move.
///
/// A strip is the set of last boxes of rows `y0..y1` of `lambda^k`, all of
/// length `x + 1`, such that removing it leaves a partition. Moving it by
/// `m` rows places those boxes at the ends of rows `y0 + m..y1 + m` of
/// `lambda^{k'}` with `k' = k - m mod n`, which preserves every box color.
/// The target rows must have a common length and the result must be a
/// partition.
pub fn strip_moves(lam: &MultiPartition, dir: StripDirection) -> Vec<MultiPartition> {
    let n = lam.n;
    let total = lam.size() as i64 + n as i64;
    let mut out = BTreeSet::new();
    for k in 0..n {
        let rows = &lam.rows[k];
        for y0 in 0..rows.len() {
            let len = rows[y0];
            // The strip must end at the top of the block of rows with this length.
            let y1 = y0 + rows[y0..].iter().take_while(|&&l| l == len).count();
            let mut removed = lam.rows.clone();
            for y in y0..y1 {
                removed[k][y] -= 1;
            }
            while removed[k].last() == Some(&0) {
                removed[k].pop();
            }
            let ms: Vec<i64> = match dir {
                StripDirection::Upward => (1..=total).collect(),
                StripDirection::Rightward => (1..=y0 as i64).map(|m| -m).collect(),
            };
            for m in ms {
                let k2 = (k as i64 - m).rem_euclid(n as i64) as usize;
                let t0 = (y0 as i64 + m) as usize;
                let t1 = (y1 as i64 + m) as usize;
                let mut target = removed[k2].clone();
                if target.len() < t1 {
                    target.resize(t1, 0);
                }
                let base = target[t0];
                if target[t0..t1].iter().any(|&l| l != base) {
                    continue;
                }
                for l in &mut target[t0..t1] {
                    *l += 1;
                }
                if target.windows(2).any(|w| w[0] < w[1]) {
                    continue;
                }
                while target.last() == Some(&0) {
                    target.pop();
                }
                let mut res = removed.clone();
                res[k2] = target;
                let res = MultiPartition { n, rows: res };
                if &res != lam {
                    out.insert(res);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Everything reachable from `lam` by a sequence of strip moves (including `lam`).
pub fn strip_closure(lam: &MultiPartition, dir: StripDirection) -> HashSet<MultiPartition> {
    let mut seen = HashSet::new();
    seen.insert(lam.clone());
    let mut stack = vec![lam.clone()];
    while let Some(x) = stack.pop() {
        for y in strip_moves(&x, dir) {
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen
}

/// `lambda <= mu` in the attracting order: `mu` is reached from `lambda` by moving strips upward.
pub fn attracting_preceq(lam: &MultiPartition, mu: &MultiPartition) -> Result<bool, PartitionError> {
    check_same_degree(lam, mu)?;
    Ok(lam == mu || strip_closure(lam, StripDirection::Upward).contains(mu))
}

/// `mu <= lambda` in the finite-sector order: `mu` is reached from `lambda` by moving strips rightward.
pub fn finite_preceq(mu: &MultiPartition, lam: &MultiPartition) -> Result<bool, PartitionError> {
    check_same_degree(lam, mu)?;
    Ok(lam == mu || strip_closure(lam, StripDirection::Rightward).contains(mu))
}
