//! The `verify` suites. Each walks every degree up to a bound and collects failures.

use std::path::Path;
use std::sync::Arc;

use clap::ValueEnum;
use laumon_core::action::{ActionEngine, Generator};
use laumon_core::geometry::{attracting_cell, cell_postcondition, fixed_point_rep, random_stable_rep};
use laumon_core::partitions::{enumerate_fixed_points, finite_preceq, interval_vector, MultiPartition};
use laumon_core::ring::OneParamSubgroup;
use laumon_core::stab::{forced_candidate, unique_fixed_point};
use laumon_core::verma::{denominator_membership, Verma};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::commands::{guard_cost, load_candidates, CandidateCheck};
use crate::config::RunConfig;
use crate::output::Output;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Relations,
    Triangularity,
    Integrality,
    Boundedness,
    Stab,
    Cells,
    Denominators,
}

/// Suite-specific knobs.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub candidates: Option<std::path::PathBuf>,
    pub samples: usize,
    pub big_k: u32,
    pub big_m: u32,
}

#[derive(Debug, Serialize)]
struct Failure {
    item: String,
    detail: String,
}

#[derive(Debug, Default)]
struct Tally {
    checked: usize,
    failures: Vec<Failure>,
}

impl Tally {
    fn check(&mut self, ok: bool, item: impl FnOnce() -> String, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(Failure { item: item(), detail: detail() });
        }
    }
}

/// Degree vectors of length `n` with `|d| <= bound`, in lexicographic order.
pub fn degrees_up_to(n: usize, bound: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, bound, &mut Vec::new(), &mut out);
    out
}

pub fn run(suite: Suite, cfg: &RunConfig, opts: &SuiteOptions) -> anyhow::Result<(Output, bool)> {
    let n = cfg.n;
    let bound = cfg.degree_bound(3)?;
    guard_cost(cfg, bound)?;
    let mut t = Tally::default();
    match suite {
        Suite::Relations => relations(n, bound, &mut t)?,
        Suite::Triangularity => triangularity(n, bound, &mut t)?,
        Suite::Integrality => integrality(n, bound, &mut t)?,
        Suite::Boundedness => boundedness(n, bound, &mut t)?,
        Suite::Stab => stab(n, bound, opts.candidates.as_deref(), &mut t)?,
        Suite::Cells => cells(n, bound, cfg.seed, opts.samples, &mut t)?,
        Suite::Denominators => denominators(n, bound, opts.big_k, opts.big_m, &mut t)?,
    }
    let passed = t.failures.is_empty();
    let rows = t.failures.iter().map(|f| vec![f.item.clone(), f.detail.clone()]).collect();
    let json = json!({
        "suite": suite,
        "n": n,
        "degree_bound": bound,
        "seed": cfg.seed,
        "passed": passed,
        "checked": t.checked,
        "failures": t.failures,
    });
    Ok((Output { json, header: vec!["item", "detail"], rows }, passed))
}

fn relations(n: usize, bound: usize, t: &mut Tally) -> anyhow::Result<()> {
    let engine = ActionEngine::new(n);
    for d in degrees_up_to(n, bound) {
        for i in 1..=n {
            for j in 1..=n {
                let c = engine.simple_commutator(i, j, &d)?;
                let ok = if i == j { c.is_diagonal() } else { c.is_zero() };
                t.check(ok, || format!("[e_{i}, f_{j}] on {d:?}"), || if i == j { "not diagonal".into() } else { "nonzero".into() });
            }
        }
    }
    Ok(())
}

fn triangularity(n: usize, bound: usize, t: &mut Tally) -> anyhow::Result<()> {
    let verma = Verma::new(Arc::new(ActionEngine::new(n)));
    for d in degrees_up_to(n, bound).into_iter().filter(|d| d[n - 1] == 0) {
        for v in verma.pbw_basis(&d)? {
            for mu in v.kclass.support() {
                let ok = finite_preceq(mu, &v.lambda)?;
                t.check(ok, || format!("|e_{}> at {mu}", v.lambda), || "nonzero outside the order ideal".into());
            }
        }
    }
    let engine = verma.engine();
    for d in degrees_up_to(n, bound) {
        let size: usize = d.iter().sum();
        for i in 1..=n {
            for j in i + 1..=i + bound - size.min(bound) {
                let iv = interval_vector(i, j, n)?;
                let m = engine.matrix(Generator::E { i, j }, &d)?;
                for (lam, mu) in m.entries.keys() {
                    let mut colors = vec![0usize; n];
                    for b in lam.skew_boxes(mu) {
                        colors[b.color(n) - 1] += 1;
                    }
                    t.check(colors == iv.vector, || format!("<{lam}| e_{iv} |{mu}>"), || format!("adds colors {colors:?}"));
                }
            }
        }
    }
    Ok(())
}

fn integrality(n: usize, bound: usize, t: &mut Tally) -> anyhow::Result<()> {
    let verma = Verma::new(Arc::new(ActionEngine::new(n)));
    for d in degrees_up_to(n, bound) {
        let basis = verma.dual_pbw(&d)?;
        for (lam, c) in &basis.classes {
            for (mu, v) in &c.restrictions {
                t.check(v.is_integral(), || format!("dual {lam} at {mu}"), || v.to_string());
            }
        }
    }
    Ok(())
}

fn boundedness(n: usize, bound: usize, t: &mut Tally) -> anyhow::Result<()> {
    let verma = Verma::new(Arc::new(ActionEngine::new(n)));
    for d in degrees_up_to(n, bound) {
        let xi = OneParamSubgroup::default_sigma_a(n, d.iter().sum());
        for g in verma.bounded_quotients(&d, &xi)? {
            t.check(
                g.passes(),
                || format!("g({}, {})", g.lambda, g.mu),
                || format!("{} bounded={} limit={:?}", g.value, g.bounded, g.limit),
            );
        }
    }
    Ok(())
}

fn record_candidate(t: &mut Tally, check: &CandidateCheck) {
    let witnesses = check.witnesses();
    t.checked += 1;
    for (axiom, mu, detail) in witnesses {
        t.failures.push(Failure { item: format!("candidate {} {axiom} {mu}", check.lambda), detail });
    }
}

fn stab(n: usize, bound: usize, file: Option<&Path>, t: &mut Tally) -> anyhow::Result<()> {
    let verma = Verma::new(Arc::new(ActionEngine::new(n)));
    for d in degrees_up_to(n, bound) {
        if let Some(lam) = unique_fixed_point(&verma, &d) {
            let cand = forced_candidate(&lam)?;
            record_candidate(t, &CandidateCheck::run(&verma, &cand)?);
        }
    }
    if let Some(path) = file {
        for cand in load_candidates(path)? {
            let v = if cand.lambda.n == n { &verma } else { &Verma::new(Arc::new(ActionEngine::new(cand.lambda.n))) };
            record_candidate(t, &CandidateCheck::run(v, &cand)?);
        }
    }
    Ok(())
}

fn cells(n: usize, bound: usize, seed: u64, samples: usize, t: &mut Tally) -> anyhow::Result<()> {
    let pool: Vec<MultiPartition> = degrees_up_to(n, bound)
        .iter()
        .filter(|d| d.iter().sum::<usize>() > 0)
        .flat_map(|d| enumerate_fixed_points(n, d))
        .collect();
    for lam in &pool {
        let cell = attracting_cell(&fixed_point_rep(lam))?;
        t.check(&cell == lam, || format!("fixed point {lam}"), || format!("lands in cell {cell}"));
    }
    if pool.is_empty() {
        return Ok(());
    }
    for k in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let lam = &pool[rng.gen_range(0..pool.len())];
        let r = random_stable_rep(lam, &mut rng);
        let cell = attracting_cell(&r)?;
        let xi = OneParamSubgroup::default_full(n, lam.size());
        let bad = cell_postcondition(&r, &cell, &xi)?;
        t.check(bad.is_empty(), || format!("sample {k} from {lam}"), || format!("cell {cell}: {bad:?}"));
    }
    Ok(())
}

fn denominators(n: usize, bound: usize, big_k: u32, big_m: u32, t: &mut Tally) -> anyhow::Result<()> {
    let verma = Verma::new(Arc::new(ActionEngine::new(n)));
    for i in 1..=n {
        for j in i + 1..=i + bound {
            let iv = interval_vector(i, j, n)?;
            for (lam, c) in verma.c_coefficients(&iv)? {
                let r = denominator_membership(&c, big_k, big_m);
                t.check(r.member, || format!("c_{lam} for {iv}"), || format!("{c} leaves {}", r.remainder));
            }
        }
    }
    Ok(())
}
