//! Newton polytopes in the character lattice of `A = (u_1, ..., u_n, p)`.
//!
//! Polytopes are stored by their vertex sets. Vertex extraction and all
//! containment questions reduce to exact linear programs over the rationals.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lp::{feasible, maximize, LpResult, Q};
use super::poly::{p_index, LaurentPoly};
use super::RingError;

/// A rational vector.
pub type RatVec = Vec<BigRational>;

/// Convex polytope given by its vertices (in convex position, sorted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolytopeA {
    pub dim: usize,
    #[serde(with = "ratvecs")]
    pub vertices: Vec<RatVec>,
}

mod ratvecs {
    use super::RatVec;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[RatVec], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<RatVec>, D::Error> {
        let strs = Vec::<Vec<String>>::deserialize(d)?;
        strs.into_iter()
            .map(|r| r.into_iter().map(|x| x.parse().map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

/// `A`-projection of an exponent vector: drop the `q` coordinate.
pub fn a_projection(n: usize, m: &super::Mono) -> Vec<i64> {
    let mut v: Vec<i64> = (0..n).map(|i| m.get(i) as i64).collect();
    v.push(m.get(p_index(n)) as i64);
    v
}

fn to_rat(v: &[i64]) -> RatVec {
    v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

/// Is `target` a convex combination of `points`?
fn in_hull(points: &[RatVec], target: &[BigRational]) -> bool {
    if points.is_empty() {
        return false;
    }
    let dim = target.len();
    let mut a: Vec<Vec<Q>> = (0..dim).map(|k| points.iter().map(|p| p[k].clone()).collect()).collect();
    a.push(vec![Q::from_integer(1.into()); points.len()]);
    let mut b: Vec<Q> = target.to_vec();
    b.push(Q::from_integer(1.into()));
    feasible(&a, &b)
}

impl NewtonPolytopeA {
    /// Convex hull of a finite point set, reduced to its vertices.
    pub fn hull(dim: usize, points: Vec<RatVec>) -> Self {
        let pts: Vec<RatVec> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        assert!(pts.iter().all(|p| p.len() == dim));
        let mut vertices: Vec<RatVec> = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            let others: Vec<RatVec> = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()).collect();
            if !in_hull(&others, p) {
                vertices.push(p.clone());
            }
        }
        NewtonPolytopeA { dim, vertices }
    }

    /// Translate by a rational vector.
    pub fn shifted(&self, shift: &[BigRational]) -> Self {
        assert_eq!(shift.len(), self.dim);
        NewtonPolytopeA {
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().zip(shift.iter()).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }

    /// Closed membership of a point.
    pub fn contains_point(&self, x: &[BigRational]) -> bool {
        in_hull(&self.vertices, x)
    }

    /// Integer points of the bounding box, filtered by membership.
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        if self.vertices.is_empty() {
            return Vec::new();
        }
        let lo: Vec<i64> = (0..self.dim)
            .map(|k| {
                let m = self.vertices.iter().map(|v| v[k].clone()).min().unwrap();
                m.ceil().to_integer().try_into().unwrap()
            })
            .collect();
        let hi: Vec<i64> = (0..self.dim)
            .map(|k| {
                let m = self.vertices.iter().map(|v| v[k].clone()).max().unwrap();
                m.floor().to_integer().try_into().unwrap()
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        if lo.iter().zip(hi.iter()).any(|(a, b)| a > b) {
            return out;
        }
        loop {
            if self.contains_point(&to_rat(&cur)) {
                out.push(cur.clone());
            }
            let mut k = 0;
            loop {
                if k == self.dim {
                    return out;
                }
                cur[k] += 1;
                if cur[k] <= hi[k] {
                    break;
                }
                cur[k] = lo[k];
                k += 1;
            }
        }
    }
}

/// Newton polytope of `f` in `char(A)`, with `q` projected out.
pub fn newton_polytope_a(f: &LaurentPoly) -> Result<NewtonPolytopeA, RingError> {
    if f.is_zero() {
        return Err(RingError::ZeroPolytope);
    }
    let n = f.nvars();
    let points: Vec<RatVec> = f.terms().iter().map(|(m, _)| to_rat(&a_projection(n, m))).collect();
    Ok(NewtonPolytopeA::hull(n + 1, points))
}

/// Boundedness of a reduced rational function along every one-parameter
/// subgroup of `A`: the `A`-Newton polytope of the numerator lies in that of
/// the denominator.
pub fn is_bounded_by_polytope(f: &super::RationalFunction) -> Result<bool, RingError> {
    if f.is_zero() {
        return Ok(true);
    }
    let outer = newton_polytope_a(f.den())?;
    let inner = newton_polytope_a(f.num())?;
    let zero = vec![BigRational::zero(); inner.dim];
    polytope_contains(&outer, &inner, &zero)
}

/// True iff `inner + shift` is contained in `outer`.
pub fn polytope_contains(outer: &NewtonPolytopeA, inner: &NewtonPolytopeA, shift: &[BigRational]) -> Result<bool, RingError> {
    if outer.dim != inner.dim || shift.len() != inner.dim {
        return Err(RingError::Dimension(outer.dim, inner.dim));
    }
    Ok(inner.vertices.iter().all(|v| {
        let x: RatVec = v.iter().zip(shift.iter()).map(|(a, b)| a + b).collect();
        outer.contains_point(&x)
    }))
}

/// True iff `inner + shift + eps * direction` is contained in `outer` for all
/// sufficiently small `eps > 0`.
///
/// For each vertex `v` this maximizes `eps >= 0` subject to
/// `v + shift + eps * direction` lying in `outer`; containment for small
/// positive `eps` holds exactly when that maximum is positive or unbounded.
/// With a zero direction this is plain closed containment.
pub fn polytope_contains_eps(
    outer: &NewtonPolytopeA,
    inner: &NewtonPolytopeA,
    shift: &[BigRational],
    direction: &[BigRational],
) -> Result<bool, RingError> {
    if outer.dim != inner.dim || shift.len() != inner.dim || direction.len() != inner.dim {
        return Err(RingError::Dimension(outer.dim, inner.dim));
    }
    if direction.iter().all(|d| d.is_zero()) {
        return polytope_contains(outer, inner, shift);
    }
    let k = outer.vertices.len();
    for v in &inner.vertices {
        // Variables: lambda_1..lambda_k, eps.
        let mut a: Vec<Vec<Q>> = (0..outer.dim)
            .map(|c| {
                let mut row: Vec<Q> = outer.vertices.iter().map(|p| p[c].clone()).collect();
                row.push(-direction[c].clone());
                row
            })
            .collect();
        let mut ones = vec![Q::from_integer(1.into()); k];
        ones.push(Q::zero());
        a.push(ones);
        let mut b: Vec<Q> = v.iter().zip(shift.iter()).map(|(x, s)| x + s).collect();
        b.push(Q::from_integer(1.into()));
        let mut c = vec![Q::zero(); k];
        c.push(Q::from_integer(1.into()));
        match maximize(&a, &b, &c) {
            LpResult::Infeasible => return Ok(false),
            LpResult::Unbounded => {}
            LpResult::Optimal { value, .. } => {
                if !value.is_positive() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
