use std::fs;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::{Command, RunConfig, SplitDescriptor};
use super::record::{opt_real, real, version, Assertion, RunRecord, Table};
use crate::dirac::{
    assemble_channel, pollution_demo, solve_channel, ChannelConfig, ChannelSolution, ChannelSolveOptions,
    KappaChannel, SplitKind,
};
use crate::forms::{check_all, default_tolerance, FormPair};
use crate::minimax::{solve_all, MinimaxResult, SForm, SolveOptions, SolveStatus};
use crate::random::random_pair;
use crate::{mtx, Error, Result, Scalar};

/// Errors below this level are roundoff, not discretisation error, and are
/// exempt from the monotone-convergence assertion.
pub const CONVERGE_FLOOR: f64 = 1e-11;

/// `|λ_k - μ_k|` allowed relative to `max(1, |μ_k|)`.
pub const MU_TOLERANCE: f64 = 1e-9;

/// Relative `T` vs `P` agreement of `λ_1` asserted by a sweep over both.
pub const SPLIT_AGREEMENT: f64 = 1e-6;

const SOLVE_HEADER: [&str; 8] = ["nu", "kappa", "split", "k", "lambda", "oracle", "abs_error", "iterations"];

/// Run the configured command. Input errors surface as `Err`; numeric
/// assertions are recorded in the returned record.
pub fn run(config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let start = Instant::now();
    let mut record = match config.command {
        Command::Solve => run_solve(config),
        Command::Sweep => run_sweep(config),
        Command::Converge => run_converge(config),
        Command::PollutionDemo => run_pollution_demo(config),
        Command::CheckForms => run_check_forms(config),
        Command::AbstractSolve => run_abstract_solve(config),
    }?;
    record.wall_time_s = start.elapsed().as_secs_f64();
    if let Some(dir) = &config.out {
        record.write(dir)?;
    }
    Ok(record)
}

fn record(config: &RunConfig, table: Table, results: serde_json::Value, assertions: Vec<Assertion>, failures: Vec<String>) -> RunRecord {
    RunRecord {
        config: config.clone(),
        version: version(),
        wall_time_s: 0.0,
        results,
        assertions,
        failures,
        table,
    }
}

fn solve_opts(config: &RunConfig) -> ChannelSolveOptions {
    ChannelSolveOptions {
        k_max: config.k_max,
        eps: config.eps,
        force: config.force,
        solve: SolveOptions::default(),
    }
}

/// Rows count `k` over gap levels; the abstract index is `k + below_gap`.
fn solution_rows(sol: &ChannelSolution) -> Vec<Vec<String>> {
    sol.results
        .iter()
        .zip(sol.oracle.iter().zip(sol.errors()))
        .enumerate()
        .map(|(i, (r, (oracle, err)))| {
            vec![
                real(sol.nu),
                sol.kappa.to_string(),
                sol.split.to_string(),
                (i + 1).to_string(),
                real(r.lambda),
                opt_real(*oracle),
                opt_real(err),
                r.iterations.to_string(),
            ]
        })
        .collect()
}

fn solution_assertions(sol: &ChannelSolution, tol: f64) -> Vec<Assertion> {
    let tag = format!("nu={} kappa={} split={}", sol.nu, sol.kappa, sol.split);
    let mut out = Vec::new();
    for (i, (r, err)) in sol.results.iter().zip(sol.errors()).enumerate() {
        let k = i + 1;
        if let Some(err) = err {
            out.push(Assertion::at_most(format!("{tag} k={k} abs_error"), err, tol));
        }
        if let (Some(mu), Some(diff)) = (r.pencil_mu_k, r.mu_difference()) {
            out.push(Assertion::at_most(
                format!("{tag} k={k} lambda_vs_mu"),
                diff / mu.abs().max(1.0),
                MU_TOLERANCE,
            ));
        }
        if r.k == 1 + sol.below_gap && r.status == SolveStatus::Converged {
            out.push(Assertion::holds(format!("{tag} G_lambda1 psd"), r.above_edge_certified()));
        }
    }
    out
}

fn solution_json(sol: &ChannelSolution) -> serde_json::Value {
    let results: Vec<_> = sol
        .results
        .iter()
        .zip(sol.oracle.iter().zip(sol.errors()))
        .enumerate()
        .map(|(i, (r, (oracle, err)))| {
            json!({
                "k": i + 1,
                "abstract_k": r.k,
                "lambda": r.lambda,
                "oracle": oracle,
                "abs_error": err,
                "mu_k": r.pencil_mu_k,
                "multiplicity": r.multiplicity,
                "status": r.status,
                "status_text": r.status.describe(),
                "iterations": r.iterations,
                "bracket": r.bracket,
                "schur_residual": r.schur_residual,
                "scan_decreasing": r.scan_decreasing,
                "edge_check": r.edge_check,
            })
        })
        .collect();
    json!({
        "nu": sol.nu,
        "kappa": sol.kappa,
        "eps": sol.eps,
        "split": sol.split,
        "a": sol.a,
        "below_gap": sol.below_gap,
        "regime": sol.regime,
        "conditions": sol.conditions,
        "results": results,
    })
}

/// Write `m.mtx`, `q.mtx` (free form), `v.mtx` (Coulomb form) and
/// `split.json` for use with `abstract-solve`.
pub fn export_channel(channel: &KappaChannel, nu: f64, eps: f64, split: SplitKind, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    mtx::write(dir.join("m.mtx"), channel.mass())?;
    mtx::write(dir.join("q.mtx"), channel.free())?;
    mtx::write(dir.join("v.mtx"), &channel.coulomb(nu, eps)?)?;
    let descriptor = match split {
        SplitKind::P => json!({"split": "sign-of-Q"}),
        SplitKind::T => json!({"plus_indices": (0..channel.n_upper()).collect::<Vec<_>>()}),
    };
    fs::write(dir.join("split.json"), serde_json::to_string(&descriptor)? + "\n")?;
    Ok(())
}

pub fn run_solve(config: &RunConfig) -> Result<RunRecord> {
    let nu = config.single_nu()?;
    let channel = assemble_channel(&config.channel)?;
    let tol = config.tolerance();
    let mut table = Table::new(&SOLVE_HEADER);
    let mut assertions = Vec::new();
    let mut results = Vec::new();
    for &split in &config.splits {
        let sol = solve_channel(&channel, nu, split, &solve_opts(config))?;
        if let Some(dir) = &config.export {
            export_channel(&channel, nu, config.eps, split, &dir.join(split.to_string()))?;
        }
        for row in solution_rows(&sol) {
            table.push(row);
        }
        assertions.extend(solution_assertions(&sol, tol));
        results.push(solution_json(&sol));
    }
    Ok(record(config, table, json!(results), assertions, Vec::new()))
}

fn is_refusal(err: &Error) -> bool {
    matches!(err, Error::RegimeViolation { .. } | Error::Overcritical { .. })
}

pub fn run_sweep(config: &RunConfig) -> Result<RunRecord> {
    let mut table = Table::new(&SOLVE_HEADER);
    if config.nu.is_empty() || config.splits.is_empty() {
        return Ok(record(config, table, json!([]), Vec::new(), Vec::new()));
    }
    let channel = assemble_channel(&config.channel)?;
    channel.free_spectrum();
    let tol = config.tolerance();
    let mut tasks: Vec<(f64, SplitKind)> = config
        .nu
        .iter()
        .flat_map(|&nu| config.splits.iter().map(move |&s| (nu, s)))
        .collect();
    tasks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    tasks.dedup();
    let outcomes: Vec<((f64, SplitKind), Result<ChannelSolution>)> = tasks
        .par_iter()
        .map(|&(nu, split)| ((nu, split), solve_channel(&channel, nu, split, &solve_opts(config))))
        .collect();

    let mut assertions = Vec::new();
    let mut failures = Vec::new();
    let mut results = Vec::new();
    let mut max_error: Option<f64> = None;
    for ((nu, split), outcome) in &outcomes {
        match outcome {
            Ok(sol) => {
                for row in solution_rows(sol) {
                    table.push(row);
                }
                for err in sol.errors().into_iter().flatten() {
                    max_error = Some(max_error.map_or(err, |m| m.max(err)));
                }
                assertions.extend(solution_assertions(sol, tol).into_iter().filter(|a| !a.name.ends_with("abs_error")));
                results.push(solution_json(sol));
            }
            Err(err) => {
                let reason = err.to_string();
                table.push(vec![
                    real(*nu),
                    config.channel.kappa.to_string(),
                    split.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
                failures.push(format!("nu={nu} split={split}: {reason}"));
                if !is_refusal(err) {
                    assertions.push(Assertion::holds(format!("nu={nu} split={split} solved"), false));
                }
                results.push(json!({"nu": nu, "kappa": config.channel.kappa, "split": split, "refused": is_refusal(err), "error": reason}));
            }
        }
    }
    if let Some(max_error) = max_error {
        assertions.push(Assertion::at_most("max abs_error", max_error, tol));
    }
    // Both splits characterise the same eigenvalues.
    for nu in &config.nu {
        let find = |split| {
            outcomes.iter().find_map(|((n, s), o)| match o {
                Ok(sol) if n == nu && *s == split => sol.results.first().map(|r| r.lambda),
                _ => None,
            })
        };
        if let (Some(p), Some(t)) = (find(SplitKind::P), find(SplitKind::T)) {
            assertions.push(Assertion::at_most(
                format!("nu={nu} lambda1 T vs P relative"),
                (t - p).abs() / p.abs().max(f64::MIN_POSITIVE),
                SPLIT_AGREEMENT,
            ));
        }
    }
    Ok(record(config, table, json!(results), assertions, failures))
}

#[derive(Serialize)]
struct ConvergeRow {
    n_splines: usize,
    lambda: f64,
    oracle: Option<f64>,
    abs_error: Option<f64>,
    iterations: usize,
    status: SolveStatus,
}

pub fn run_converge(config: &RunConfig) -> Result<RunRecord> {
    let nu = config.single_nu()?;
    let split = *config.splits.first().unwrap_or(&SplitKind::P);
    let slack = config.tolerance();
    let opts = ChannelSolveOptions {
        k_max: 1,
        ..solve_opts(config)
    };
    let rows: Vec<ConvergeRow> = config
        .sizes
        .par_iter()
        .map(|&n| {
            let channel = assemble_channel(&ChannelConfig {
                n_splines: n,
                ..config.channel.clone()
            })?;
            let sol = solve_channel(&channel, nu, split, &opts)?;
            let r = &sol.results[0];
            Ok(ConvergeRow {
                n_splines: n,
                lambda: r.lambda,
                oracle: sol.oracle[0],
                abs_error: sol.errors()[0],
                iterations: r.iterations,
                status: r.status,
            })
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&["n_splines", "nu", "kappa", "split", "lambda", "oracle", "abs_error", "iterations"]);
    for r in &rows {
        table.push(vec![
            r.n_splines.to_string(),
            real(nu),
            config.channel.kappa.to_string(),
            split.to_string(),
            real(r.lambda),
            opt_real(r.oracle),
            opt_real(r.abs_error),
            r.iterations.to_string(),
        ]);
    }
    let mut assertions = Vec::new();
    for w in rows.windows(2) {
        if let (Some(prev), Some(next)) = (w[0].abs_error, w[1].abs_error) {
            // Excess of the next error over the slack-widened previous one.
            let excess = next - ((1.0 + slack) * prev).max(CONVERGE_FLOOR);
            assertions.push(Assertion::at_most(
                format!("n={} -> n={} error nonincreasing", w[0].n_splines, w[1].n_splines),
                excess,
                0.0,
            ));
        }
    }
    Ok(record(config, table, json!(rows), assertions, Vec::new()))
}

pub fn run_pollution_demo(config: &RunConfig) -> Result<RunRecord> {
    let nu = config.single_nu()?;
    let report = pollution_demo(&config.channel, nu, config.k_max, &SolveOptions::default())?;
    let tol = config.tolerance();
    let mut table = Table::new(&["list", "index", "value", "nearest_level", "distance"]);
    let nearest = |x: f64| {
        report
            .levels
            .iter()
            .copied()
            .chain(std::iter::once(crate::dirac::GAP_TOP))
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
    };
    for (i, &e) in report.direct.iter().enumerate() {
        let level = nearest(e);
        table.push(vec!["direct".into(), (i + 1).to_string(), real(e), opt_real(level), opt_real(level.map(|l| (l - e).abs()))]);
    }
    let mut assertions = Vec::new();
    for (r, d) in report.minimax.iter().zip(&report.minimax_distance) {
        let level = nearest(r.lambda);
        table.push(vec!["minimax".into(), r.k.to_string(), real(r.lambda), opt_real(level), opt_real(*d)]);
        if let Some(d) = d {
            assertions.push(Assertion::at_most(format!("minimax k={} distance to level", r.k), *d, tol));
        }
    }
    Ok(record(config, table, serde_json::to_value(&report)?, assertions, Vec::new()))
}

fn load_pair<T: Scalar>(config: &RunConfig) -> Result<FormPair<T>> {
    let inputs = config.matrices.as_ref().expect("validated");
    let m = mtx::read::<T>(&inputs.m)?;
    let q = mtx::read::<T>(&inputs.q)?;
    let v = mtx::read::<T>(&inputs.v)?;
    let n = m.nrows();
    for (name, a) in [("M", &m), ("Q", &q), ("V", &v)] {
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{name} is {}x{}, expected {n}x{n}",
                a.nrows(),
                a.ncols()
            )));
        }
    }
    let split = SplitDescriptor::read(&inputs.split)?.build(&m, &q)?;
    FormPair::new(m, q, v, split)
}

fn inputs_are_complex(config: &RunConfig) -> Result<bool> {
    let inputs = config.matrices.as_ref().expect("validated");
    for p in [&inputs.m, &inputs.q, &inputs.v] {
        if mtx::is_complex(p)? {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn run_check_forms(config: &RunConfig) -> Result<RunRecord> {
    if inputs_are_complex(config)? {
        check_forms_with(load_pair::<Complex64>(config)?, config)
    } else {
        check_forms_with(load_pair::<f64>(config)?, config)
    }
}

fn check_forms_with<T: Scalar>(pair: FormPair<T>, config: &RunConfig) -> Result<RunRecord> {
    let tol = config.tolerance.unwrap_or_else(|| default_tolerance(&pair));
    let report = check_all(&pair, tol);
    let mut table = Table::new(&["condition", "pass", "margin", "tolerance", "note"]);
    let mut assertions = Vec::new();
    for c in &report.checks {
        table.push(vec![
            c.condition.to_string(),
            c.pass.to_string(),
            real(c.margin),
            real(c.tolerance),
            c.note.clone().unwrap_or_default(),
        ]);
        assertions.push(Assertion::holds(format!("condition {}", c.condition), c.pass));
    }
    let notes: Vec<_> = report.checks.iter().map(|c| json!({"condition": c.condition, "note": c.note})).collect();
    let results = json!({"conditions": report, "notes": notes});
    Ok(record(config, table, results, assertions, Vec::new()))
}

const ABSTRACT_HEADER: [&str; 10] = [
    "pair",
    "n",
    "n_plus",
    "k",
    "lambda",
    "mu",
    "difference",
    "multiplicity",
    "status",
    "iterations",
];

struct Solved {
    index: usize,
    n: usize,
    n_plus: usize,
    results: Vec<MinimaxResult>,
}

fn solve_pair<T: Scalar>(pair: &FormPair<T>, k_max: usize, b: Option<f64>) -> Result<Vec<MinimaxResult>> {
    let mut s = SForm::assemble(&pair.to_block_coordinates());
    if let Some(b) = b {
        s = s.with_ceiling(b)?;
    }
    let k = k_max.min(s.n_plus());
    if k == 0 {
        return Ok(Vec::new());
    }
    solve_all(&s, k, &SolveOptions::default())
}

fn abstract_from_files<T: Scalar>(config: &RunConfig) -> Result<Vec<Solved>> {
    let pair = load_pair::<T>(config)?;
    let report = check_all(&pair, config.tolerance.unwrap_or_else(|| default_tolerance(&pair)));
    if !report.all_pass() {
        if !config.force {
            return Err(Error::FormCheckFailed(Box::new(report)));
        }
        for c in report.failed() {
            log::warn!("condition {} failed (margin {:.3e}); proceeding as requested", c.condition, c.margin);
        }
    }
    Ok(vec![Solved {
        index: 0,
        n: pair.dim(),
        n_plus: pair.n_plus(),
        results: solve_pair(&pair, config.k_max, config.b)?,
    }])
}

/// Pair `i` of the seeded suite: dimension, `n_plus` and a private seed are
/// drawn in sequence from `ChaCha8(seed)`.
pub fn random_suite_specs(seed: u64, count: usize, dim: Option<usize>) -> Vec<(usize, usize, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = dim.unwrap_or_else(|| rng.random_range(2..=40));
            let n_plus = rng.random_range(1..n);
            (n, n_plus, rng.next_u64())
        })
        .collect()
}

pub fn run_abstract_solve(config: &RunConfig) -> Result<RunRecord> {
    let solved = if config.matrices.is_some() {
        if inputs_are_complex(config)? {
            abstract_from_files::<Complex64>(config)?
        } else {
            abstract_from_files::<f64>(config)?
        }
    } else {
        let suite = config.random.as_ref().expect("validated");
        random_suite_specs(config.seed, suite.count, suite.dim)
            .into_par_iter()
            .enumerate()
            .map(|(index, (n, n_plus, seed))| {
                let pair = random_pair::<f64, _>(&mut ChaCha8Rng::seed_from_u64(seed), n, n_plus);
                Ok(Solved {
                    index,
                    n,
                    n_plus,
                    results: solve_pair(&pair, config.k_max, config.b)?,
                })
            })
            .collect::<Result<Vec<_>>>()?
    };

    let tol = config.tolerance();
    let mut table = Table::new(&ABSTRACT_HEADER);
    let mut worst: f64 = 0.0;
    let mut json_rows = Vec::new();
    for s in &solved {
        for r in &s.results {
            let rel = r.mu_difference().zip(r.pencil_mu_k).map(|(d, mu)| d / mu.abs().max(1.0));
            if let Some(rel) = rel {
                worst = worst.max(rel);
            }
            table.push(vec![
                s.index.to_string(),
                s.n.to_string(),
                s.n_plus.to_string(),
                r.k.to_string(),
                real(r.lambda),
                opt_real(r.pencil_mu_k),
                opt_real(r.mu_difference()),
                r.multiplicity.to_string(),
                r.status.describe().to_string(),
                r.iterations.to_string(),
            ]);
            json_rows.push(json!({
                "pair": s.index,
                "n": s.n,
                "n_plus": s.n_plus,
                "result": r,
                "relative_difference": rel,
            }));
        }
    }
    let assertions = vec![Assertion::at_most("max |lambda - mu| / max(1, |mu|)", worst, tol)];
    Ok(record(config, table, json!(json_rows), assertions, Vec::new()))
}

/// Dense matrices of a [`FormPair`] written as Matrix Market files plus a
/// split descriptor with the given plus indices.
pub fn export_pair(m: &DMatrix<f64>, q: &DMatrix<f64>, v: &DMatrix<f64>, plus: &[usize], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    mtx::write(dir.join("m.mtx"), m)?;
    mtx::write(dir.join("q.mtx"), q)?;
    mtx::write(dir.join("v.mtx"), v)?;
    fs::write(dir.join("split.json"), serde_json::to_string(&json!({"plus_indices": plus}))? + "\n")?;
    Ok(())
}
