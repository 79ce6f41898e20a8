use std::path::Path;
use std::process::{Command, Output};

use laumon_core::partitions::MultiPartition;
use laumon_core::ring::{LaurentPoly, Mono, RationalFunction};
use laumon_core::stab::{forced_candidate, FractionalWeight, LiftProblem};
use serde_json::Value;

fn laumon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laumon")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

/// All partitions of `size` as weakly decreasing row lists.
fn partitions(size: usize, max: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=size.min(max)).rev() {
        for mut rest in partitions(size - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Counts `n`-tuples of partitions whose box colors `(y + k - 1) mod n + 1` give `d`.
fn brute_force_count(n: usize, d: &[usize]) -> usize {
    let total: usize = d.iter().sum();
    let mut tuples: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &tuples {
            let used: usize = t.iter().flatten().sum();
            for s in 0..=total - used {
                for p in partitions(s, s) {
                    let mut e = t.clone();
                    e.push(p);
                    next.push(e);
                }
            }
        }
        tuples = next;
    }
    tuples
        .iter()
        .filter(|t| {
            let mut colors = vec![0; n];
            for (k, rows) in t.iter().enumerate() {
                for (y, len) in rows.iter().enumerate() {
                    colors[(y + k) % n] += len;
                }
            }
            colors == d
        })
        .count()
}

#[test]
fn fixed_point_listing_contains_the_example_and_matches_brute_force() {
    let out = laumon(&["fixed-points", "--n", "3", "--degree", "4,5,5", "--force"]);
    assert!(out.status.success());
    let v = json_of(&out);
    let labels: Vec<&str> = v["fixed_points"].as_array().unwrap().iter().map(|p| p["lambda"].as_str().unwrap()).collect();
    assert!(labels.contains(&"(2,2,1,1|2,1|2,1,1,1)"));
    assert_eq!(v["count"].as_u64().unwrap() as usize, brute_force_count(3, &[4, 5, 5]));
    assert_eq!(labels.len(), brute_force_count(3, &[4, 5, 5]));

    for d in [[1, 1], [2, 1], [0, 3]] {
        let arg = format!("{},{}", d[0], d[1]);
        let v = json_of(&laumon(&["fixed-points", "--n", "2", "--degree", &arg]));
        assert_eq!(v["count"].as_u64().unwrap() as usize, brute_force_count(2, &d), "d = {d:?}");
    }
}

#[test]
fn zero_degree_has_one_row() {
    let out = laumon(&["fixed-points", "--n", "2", "--degree", "0,0", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("lambda,k,x,y,color,chi"));
    let v = json_of(&laumon(&["fixed-points", "--n", "2", "--degree", "0,0"]));
    assert_eq!(v["count"], 1);
    assert_eq!(v["fixed_points"][0]["lambda"], "(|)");
}

#[test]
fn simple_generator_on_vacuum() {
    let v = json_of(&laumon(&["action-matrix", "--n", "2", "--degree", "0,0", "--interval", "1,2"]));
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    // (q - q^-1)(u2 q^-1 - u1^2 q u2^-1)
    let n = 2;
    let q = LaurentPoly::q(n);
    let qinv = LaurentPoly::monomial(n, Mono::var(2, -1), 1);
    let a = LaurentPoly::monomial(n, Mono::var(1, 1).mul(&Mono::var(2, -1)), 1);
    let b = LaurentPoly::monomial(n, Mono::var(0, 2).mul(&Mono::var(2, 1)).mul(&Mono::var(1, -1)), 1);
    let expected = RationalFunction::from_poly(q.sub(&qinv).mul(&a.sub(&b)));
    let got: RationalFunction = serde_json::from_value(entries[0]["value"].clone()).unwrap();
    assert_eq!(got, expected);
    assert_eq!(v["source"], serde_json::json!([0, 0]));
    assert_eq!(v["target"], serde_json::json!([1, 0]));
}

#[test]
fn impossible_degree_gives_empty_matrix() {
    let v = json_of(&laumon(&["action-matrix", "--n", "2", "--degree", "0,0", "--interval", "1,2", "--lowering"]));
    assert_eq!(v["entries"].as_array().unwrap().len(), 0);
}

#[test]
fn finite_sector_matrices_are_p_free() {
    for interval in ["1,2", "2,3", "1,3"] {
        let out = laumon(&["action-matrix", "--n", "3", "--degree", "1,1,0", "--interval", interval]);
        assert!(out.status.success());
        let v = json_of(&out);
        let entries = v["entries"].as_array().unwrap();
        assert!(!entries.is_empty());
        for e in entries {
            let x: RationalFunction = serde_json::from_value(e["value"].clone()).unwrap();
            assert!(!x.contains_var(4), "{interval}: {x}");
        }
    }
}

#[test]
fn bad_interval_is_a_usage_error() {
    assert_eq!(laumon(&["action-matrix", "--n", "2", "--degree", "0,0", "--interval", "2,1"]).status.code(), Some(2));
    assert_eq!(laumon(&["action-matrix", "--n", "2", "--degree", "0,0", "--interval", "1"]).status.code(), Some(2));
    assert_eq!(laumon(&["gram", "--n", "2", "--degree", "1,0,0"]).status.code(), Some(2));
    assert_eq!(laumon(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn cost_guard_needs_force() {
    let out = laumon(&["gram", "--n", "3", "--degree", "2,2,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
}

#[test]
fn integrality_suite_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = laumon(&["verify", "integrality", "--n", "2", "--degree", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["suite"], "integrality");
    assert!(v["checked"].as_u64().unwrap() > 0);
}

#[test]
fn triangularity_at_degree_zero() {
    let out = laumon(&["verify", "triangularity", "--n", "2", "--degree", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["passed"], true);
}

fn corrupted_candidate(dir: &Path) -> std::path::PathBuf {
    let lam: MultiPartition = "(1|)".parse().unwrap();
    let mut cand = forced_candidate(&lam).unwrap();
    // A high power of u1 pushes the diagonal out of the prescribed form.
    let x = cand.restrictions.get(&lam).mul(&RationalFunction::monomial(2, Mono::var(0, 6), 1));
    cand.restrictions.set(lam, x);
    let path = dir.join("bad.json");
    std::fs::write(&path, serde_json::to_vec(&cand).unwrap()).unwrap();
    path
}

#[test]
fn corrupted_candidate_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let bad = corrupted_candidate(dir.path());
    let out = laumon(&["verify", "stab", "--n", "2", "--degree", "2", "--candidates", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    let failures = v["failures"].as_array().unwrap();
    assert!(failures.iter().any(|f| f["item"].as_str().unwrap().contains("(1|)")));

    let out = laumon(&["stab-check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["candidates"][0]["passed"], false);

    let lam: MultiPartition = "(1|)".parse().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, serde_json::to_vec(&forced_candidate(&lam).unwrap()).unwrap()).unwrap();
    let out = laumon(&["stab-check", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["passed"], true);
}

#[test]
fn unreadable_candidate_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"lambda\": 3}").unwrap();
    assert_eq!(laumon(&["stab-check", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(laumon(&["stab-check", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn lift_solve_canonical_example() {
    let n = 2;
    let one = LaurentPoly::one(n);
    let u1 = LaurentPoly::u(n, 1);
    let prob = LiftProblem { p: one.sub(&u1), alpha: u1.mul(&u1), s: FractionalWeight::zero(n + 1), hbound: None };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lift.json");
    std::fs::write(&path, serde_json::to_vec(&prob).unwrap()).unwrap();
    let out = laumon(&["lift-solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["status"], "found");
    assert_eq!(v["verified"], true);
    let alpha_prime: RationalFunction = serde_json::from_value(v["result"]["alpha_prime"].clone()).unwrap();
    assert!(alpha_prime.is_one());
}

#[test]
fn reports_are_reproducible() {
    let args = ["verify", "cells", "--n", "2", "--degree", "2", "--samples", "20", "--seed", "7"];
    let a = laumon(&args);
    let b = laumon(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = laumon(&["verify", "cells", "--n", "2", "--degree", "2", "--samples", "20", "--seed", "7", "--jobs", "1"]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n = 2\ndegree = [1, 1]\nformat = \"csv\"\n").unwrap();
    let out = laumon(&["fixed-points", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("lambda,k,x,y,color,chi"));
    // flags override the file
    let out = laumon(&["fixed-points", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(json_of(&out)["degree"], serde_json::json!([1, 1]));

    std::fs::write(&cfg, "colour = 1\n").unwrap();
    assert_eq!(laumon(&["fixed-points", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
