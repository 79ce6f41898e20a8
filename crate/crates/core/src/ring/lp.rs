//! Exact two-phase simplex over the rationals.
//!
//! Solves `maximize c.x subject to A x = b, x >= 0` with Bland's rule, which
//! cannot cycle. Problem sizes in this crate are tiny (a few rows, at most a
//! few hundred columns), so a dense tableau is adequate.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

/// Outcome of a linear program.
#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Infeasible,
    Unbounded,
    Optimal { value: Q, x: Vec<Q> },
}

struct Tableau {
    /// `rows[i]` has `cols + 1` entries; the last is the right-hand side.
    rows: Vec<Vec<Q>>,
    /// Objective row in the same layout (reduced costs, negated value last).
    obj: Vec<Q>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Q::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, p) in self.obj.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on columns `0..allowed`; returns false if unbounded.
    fn run(&mut self, allowed: usize) -> bool {
        loop {
            // Bland: smallest index with positive reduced cost enters.
            let Some(c) = (0..allowed).find(|&j| self.obj[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Maximizes `c.x` subject to `A x = b`, `x >= 0`.
pub fn maximize(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpResult {
    let m = a.len();
    let nvar = c.len();
    assert_eq!(b.len(), m);
    assert!(a.iter().all(|r| r.len() == nvar));
    let cols = nvar + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Q> = a[i].iter().map(|v| if flip { -v } else { v.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
        row.push(if flip { -&b[i] } else { b[i].clone() });
        rows.push(row);
    }
    // Phase 1: maximize -(sum of artificials). In reduced form the objective
    // row is the sum of constraint rows over the structural columns.
    let mut obj = vec![Q::zero(); cols + 1];
    for row in &rows {
        for j in 0..nvar {
            obj[j] += &row[j];
        }
        obj[cols] += &row[cols];
    }
    let mut t = Tableau { rows, obj, basis: (nvar..nvar + m).collect(), cols };
    t.run(nvar);
    if t.obj[cols].is_positive() {
        return LpResult::Infeasible;
    }
    // Drive remaining artificials out of the basis or drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= nvar {
            match (0..nvar).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    // Phase 2 objective in reduced form with respect to the current basis.
    let mut obj = vec![Q::zero(); cols + 1];
    obj[..nvar].clone_from_slice(c);
    for (r, &bj) in t.basis.iter().enumerate() {
        if !obj[bj].is_zero() {
            let f = obj[bj].clone();
            for (v, p) in obj.iter_mut().zip(t.rows[r].iter()) {
                *v -= &f * p;
            }
        }
    }
    t.obj = obj;
    if !t.run(nvar) {
        return LpResult::Unbounded;
    }
    let mut x = vec![Q::zero(); nvar];
    for (r, &bj) in t.basis.iter().enumerate() {
        if bj < nvar {
            x[bj] = t.rows[r][cols].clone();
        }
    }
    let value = c.iter().zip(x.iter()).fold(Q::zero(), |acc, (ci, xi)| acc + ci * xi);
    LpResult::Optimal { value, x }
}

/// True if `A x = b, x >= 0` has a solution.
pub fn feasible(a: &[Vec<Q>], b: &[Q]) -> bool {
    let nvar = a.first().map_or(0, |r| r.len());
    !matches!(maximize(a, b, &vec![Q::zero(); nvar]), LpResult::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Q {
        Q::from_integer(v.into())
    }

    #[test]
    fn small_program() {
        // maximize x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.
        let a = vec![vec![q(1), q(2), q(1), q(0)], vec![q(3), q(1), q(0), q(1)]];
        let b = vec![q(4), q(6)];
        let c = vec![q(1), q(1), q(0), q(0)];
        match maximize(&a, &b, &c) {
            LpResult::Optimal { value, .. } => assert_eq!(value, Q::new(14.into(), 5.into())),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![q(1), q(1)]];
        assert_eq!(maximize(&a, &[q(-1)], &[q(0), q(0)]), LpResult::Infeasible);
        let a = vec![vec![q(1), q(-1)]];
        assert_eq!(maximize(&a, &[q(1)], &[q(1), q(0)]), LpResult::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let a = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        assert!(feasible(&a, &[q(1), q(2)]));
        assert!(!feasible(&a, &[q(1), q(3)]));
    }
}
