//! Listing and dump subcommands.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context};
use laumon_core::action::{ActionEngine, Generator, KClass, OperatorMatrix};
use laumon_core::geometry::{tangent_character, Character};
use laumon_core::partitions::{enumerate_fixed_points, interval_vector, MultiPartition};
use laumon_core::ring::LaurentPoly;
use laumon_core::stab::{
    check_stab_axioms, rigidity_check, solve_degree_lift, verify_lift, AxiomReport, LiftProblem, LiftResult,
    RigidityReport, StabCandidate,
};
use laumon_core::verma::Verma;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::Output;
use crate::UsageError;

/// Upper bound for the number of fixed points of total size `size`: the
/// number of `n`-tuples of partitions with `size` boxes in total.
pub fn multipartition_count(n: usize, size: usize) -> u128 {
    let mut p = vec![0u128; size + 1];
    p[0] = 1;
    for k in 1..=size {
        for i in k..=size {
            p[i] = p[i].saturating_add(p[i - k]);
        }
    }
    let mut out = vec![0u128; size + 1];
    out[0] = 1;
    for _ in 0..n {
        let prev = out.clone();
        for (s, o) in out.iter_mut().enumerate() {
            *o = (0..=s).fold(0u128, |acc, a| acc.saturating_add(prev[s - a].saturating_mul(p[a])));
        }
    }
    out[size]
}

/// Largest fixed-point count accepted without `--force`.
pub const COST_LIMIT: u128 = 120;

pub fn guard_cost(cfg: &RunConfig, size: usize) -> anyhow::Result<()> {
    let count = multipartition_count(cfg.n, size);
    if count > COST_LIMIT && !cfg.force {
        bail!(UsageError::new(format!(
            "n = {} with {size} boxes allows up to {count} fixed points (limit {COST_LIMIT}); pass --force to run anyway",
            cfg.n
        )));
    }
    Ok(())
}

fn weight_string(n: usize, w: &laumon_core::ring::Mono) -> String {
    LaurentPoly::monomial(n, *w, 1).to_string()
}

pub fn fixed_points(cfg: &RunConfig) -> anyhow::Result<Output> {
    let d = cfg.degree_vector()?;
    guard_cost(cfg, d.iter().sum())?;
    let n = cfg.n;
    let points = enumerate_fixed_points(n, &d);
    let mut rows = Vec::new();
    let mut listing = Vec::new();
    for lam in &points {
        let mut boxes = Vec::new();
        for b in lam.boxes() {
            let chi = weight_string(n, &b.chi(n));
            rows.push(vec![lam.to_string(), b.k.to_string(), b.x.to_string(), b.y.to_string(), b.color(n).to_string(), chi.clone()]);
            boxes.push(json!({"k": b.k, "x": b.x, "y": b.y, "color": b.color(n), "chi": chi}));
        }
        listing.push(json!({"lambda": lam.to_string(), "rows": lam.rows, "kostant": lam.is_kostant(), "boxes": boxes}));
    }
    Ok(Output {
        json: json!({"n": n, "degree": d, "count": points.len(), "fixed_points": listing}),
        header: vec!["lambda", "k", "x", "y", "color", "chi"],
        rows,
    })
}

fn character_json(n: usize, c: &Character) -> Value {
    Value::Array(c.iter().map(|(w, m)| json!({"weight": weight_string(n, w), "multiplicity": m})).collect())
}

pub fn tangent(cfg: &RunConfig, lambda: Option<&str>) -> anyhow::Result<Output> {
    let n = cfg.n;
    let points = match lambda {
        Some(text) => {
            let lam: MultiPartition = text.parse().map_err(|e| UsageError::new(format!("{e}")))?;
            if lam.n != n {
                bail!(UsageError::new(format!("{lam} has {} parts, expected n = {n}", lam.n)));
            }
            vec![lam]
        }
        None => {
            let d = cfg.degree_vector()?;
            guard_cost(cfg, d.iter().sum())?;
            enumerate_fixed_points(n, &d)
        }
    };
    let mut rows = Vec::new();
    let mut listing = Vec::new();
    for lam in &points {
        let t = tangent_character(lam)?;
        for (w, m) in t.iter() {
            rows.push(vec![lam.to_string(), weight_string(n, w), m.to_string()]);
        }
        listing.push(json!({"lambda": lam.to_string(), "rank": t.rank(), "weights": character_json(n, &t)}));
    }
    Ok(Output { json: json!({"n": n, "tangent": listing}), header: vec!["lambda", "weight", "multiplicity"], rows })
}

fn matrix_rows(m: &OperatorMatrix) -> Vec<Vec<String>> {
    m.entries.iter().map(|((lam, mu), v)| vec![lam.to_string(), mu.to_string(), v.to_string()]).collect()
}

pub fn action_matrix(cfg: &RunConfig, interval: &str, lowering: bool) -> anyhow::Result<Output> {
    let n = cfg.n;
    let d = cfg.degree_vector()?;
    let ij = crate::config::parse_list(interval)?;
    let [i, j] = ij[..] else { bail!(UsageError::new(format!("interval {interval:?} must be two integers i,j"))) };
    let iv = interval_vector(i, j, n).map_err(|e| UsageError::new(e.to_string()))?;
    let size = d.iter().sum::<usize>() + if lowering { 0 } else { iv.len() };
    guard_cost(cfg, size)?;
    let engine = ActionEngine::new(n);
    let g = if lowering { Generator::F { i, j } } else { Generator::E { i, j } };
    let m = engine.matrix(g, &d)?;
    let mut json = serde_json::to_value(&*m)?;
    json["generator"] = json!(format!("{}_{}", if lowering { "f" } else { "e" }, iv));
    Ok(Output { json, header: vec!["lam", "mu", "value"], rows: matrix_rows(&m) })
}

pub fn gram(cfg: &RunConfig) -> anyhow::Result<Output> {
    let d = cfg.degree_vector()?;
    guard_cost(cfg, d.iter().sum())?;
    let verma = Verma::new(Arc::new(ActionEngine::new(cfg.n)));
    let (points, g) = verma.gram_matrix(&d)?;
    let mut rows = Vec::new();
    for (a, la) in points.iter().enumerate() {
        for (b, lb) in points.iter().enumerate() {
            rows.push(vec![la.to_string(), lb.to_string(), g[a][b].to_string()]);
        }
    }
    let labels: Vec<String> = points.iter().map(|p| p.to_string()).collect();
    Ok(Output { json: json!({"degree": d, "points": labels, "matrix": g}), header: vec!["lambda", "mu", "value"], rows })
}

fn restrictions_json(c: &KClass) -> Value {
    Value::Array(
        c.restrictions
            .iter()
            .map(|(mu, v)| json!({"mu": mu.to_string(), "value": v, "integral": v.is_integral()}))
            .collect(),
    )
}

pub fn dual_pbw(cfg: &RunConfig) -> anyhow::Result<Output> {
    let d = cfg.degree_vector()?;
    guard_cost(cfg, d.iter().sum())?;
    let verma = Verma::new(Arc::new(ActionEngine::new(cfg.n)));
    let basis = verma.dual_pbw(&d)?;
    let mut rows = Vec::new();
    let mut classes = Vec::new();
    for (lam, c) in &basis.classes {
        for (mu, v) in &c.restrictions {
            rows.push(vec![lam.to_string(), mu.to_string(), v.to_string(), v.is_integral().to_string()]);
        }
        classes.push(json!({"lambda": lam.to_string(), "restrictions": restrictions_json(c)}));
    }
    Ok(Output { json: json!({"degree": d, "classes": classes}), header: vec!["lambda", "mu", "value", "integral"], rows })
}

/// Reads one candidate or a list of candidates.
pub fn load_candidates(path: &Path) -> anyhow::Result<Vec<StabCandidate>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| UsageError::new(format!("{}: {e}", path.display())))?;
    let parsed = if value.is_array() { serde_json::from_value(value) } else { serde_json::from_value(value).map(|c| vec![c]) };
    let cands: Vec<StabCandidate> = parsed.map_err(|e| UsageError::new(format!("{}: {e}", path.display())))?;
    for c in &cands {
        c.restrictions.validate().map_err(|e| UsageError::new(format!("candidate {}: {e}", c.lambda)))?;
        if c.restrictions.degree != c.lambda.degree() {
            bail!(UsageError::new(format!("candidate {} has restrictions of degree {:?}", c.lambda, c.restrictions.degree)));
        }
    }
    Ok(cands)
}

/// Axioms and rigidity for one candidate.
pub struct CandidateCheck {
    pub lambda: MultiPartition,
    pub axioms: AxiomReport,
    pub rigidity: RigidityReport,
}

impl CandidateCheck {
    pub fn run(verma: &Verma, cand: &StabCandidate) -> anyhow::Result<Self> {
        Ok(CandidateCheck {
            lambda: cand.lambda.clone(),
            axioms: check_stab_axioms(cand)?,
            rigidity: rigidity_check(verma, cand)?,
        })
    }

    pub fn passes(&self) -> bool {
        self.axioms.passes() && self.rigidity.passes()
    }

    /// `(axiom, mu, detail)` for every violation.
    pub fn witnesses(&self) -> Vec<(String, String, String)> {
        let a = &self.axioms;
        let mut out: Vec<(String, String, String)> = a
            .support
            .iter()
            .chain(&a.diagonal)
            .chain(&a.degree)
            .map(|v| (v.axiom.clone(), v.mu.to_string(), v.detail.clone()))
            .collect();
        out.extend(self.rigidity.violations.iter().map(|v| ("rigidity".to_string(), String::new(), v.clone())));
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lambda": self.lambda.to_string(),
            "passed": self.passes(),
            "axioms": {
                "support": {"passed": self.axioms.support.is_empty(), "witnesses": self.axioms.support},
                "diagonal": {"passed": self.axioms.diagonal.is_empty(), "witnesses": self.axioms.diagonal},
                "degree": {"passed": self.axioms.degree.is_empty(), "witnesses": self.axioms.degree},
            },
            "rigidity": self.rigidity,
        })
    }
}

pub fn stab_check(cfg: &RunConfig, file: &Path) -> anyhow::Result<(Output, bool)> {
    let cands = load_candidates(file)?;
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut all = true;
    for cand in &cands {
        guard_cost(cfg, cand.lambda.size())?;
        let verma = Verma::new(Arc::new(ActionEngine::new(cand.lambda.n)));
        let check = CandidateCheck::run(&verma, cand)?;
        all &= check.passes();
        for (axiom, mu, detail) in check.witnesses() {
            rows.push(vec![check.lambda.to_string(), axiom, mu, detail]);
        }
        reports.push(check.to_json());
    }
    let out = Output {
        json: json!({"passed": all, "candidates": reports}),
        header: vec!["lambda", "axiom", "mu", "detail"],
        rows,
    };
    Ok((out, all))
}

pub fn lift_solve(file: &Path) -> anyhow::Result<(Output, bool)> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let prob: LiftProblem = serde_json::from_str(&text).map_err(|e| UsageError::new(format!("{}: {e}", file.display())))?;
    if prob.p.is_zero() {
        bail!(UsageError::new("P must be nonzero"));
    }
    let result = solve_degree_lift(&prob)?;
    let (verified, row) = match &result {
        LiftResult::Found(lift) => {
            let ok = verify_lift(&prob, lift)?;
            (Some(ok), vec!["found".to_string(), lift.alpha_prime.to_string(), lift.h.to_string(), ok.to_string()])
        }
        LiftResult::BoundExhausted { hbound } => {
            (None, vec!["bound-exhausted".to_string(), String::new(), format!("{hbound:?}"), String::new()])
        }
    };
    let out = Output {
        json: json!({"result": result, "verified": verified}),
        header: vec!["status", "alpha_prime", "h", "verified"],
        rows: vec![row],
    };
    Ok((out, verified != Some(false)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multipartition_counts() {
        // Coefficients of prod_k (1 - x^k)^{-2} and (1 - x^k)^{-3}.
        let two: Vec<u128> = (0..6).map(|s| multipartition_count(2, s)).collect();
        assert_eq!(two, vec![1, 2, 5, 10, 20, 36]);
        let three: Vec<u128> = (0..5).map(|s| multipartition_count(3, s)).collect();
        assert_eq!(three, vec![1, 3, 9, 22, 51]);
    }

    #[test]
    fn counts_bound_enumeration() {
        for d in [vec![1, 1], vec![2, 1], vec![3, 0], vec![2, 2]] {
            let total = enumerate_fixed_points(2, &d).len() as u128;
            assert!(total <= multipartition_count(2, d.iter().sum()));
        }
    }
}
