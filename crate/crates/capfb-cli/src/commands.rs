//! The `capacity`, `sweep`, and `verify` subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use capfb_core::channel::MarkovInputPolicy;
use capfb_core::dp::{dual_search, relative_value_iteration, DualSolveResult};
use capfb_core::error::CoreError;
use capfb_core::gaussian::{
    matrix_achieved_power, matrix_capacity_solve, scalar_achieved_power, scalar_solve,
};
use capfb_core::prob::{decode_state, LN_2};
use capfb_core::verify;
use nalgebra::DMatrix;
use serde::Serialize;

use crate::spec_doc::{ChannelSpecDocument, Problem};

/// Exit codes: 0 ok, 1 verification failure, 2 validation error,
/// 3 non-convergence, 4 ergodicity diagnostic, 5 I/O.
pub fn exit_code(err: &CoreError) -> i32 {
    match err {
        CoreError::Domain(_) | CoreError::Resource { .. } | CoreError::Unsupported(_) => 2,
        CoreError::NonConvergence { .. } | CoreError::StageNonConvergence { .. } => 3,
        CoreError::NotErgodic(_) => 4,
    }
}

pub const IO_EXIT: i32 = 5;

fn fail(err: &CoreError) -> i32 {
    eprintln!("error: {err}");
    exit_code(err)
}

fn read_spec(path: &Path) -> Result<ChannelSpecDocument, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read spec {}: {e}", path.display());
        IO_EXIT
    })?;
    ChannelSpecDocument::from_json(&text).map_err(|e| fail(&e))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ErgodicReport {
    irreducible: bool,
    aperiodic: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CapacityReport {
    kind: &'static str,
    capacity_bits: f64,
    capacity_nats: f64,
    s_star: f64,
    regime: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    avg_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_star: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_z_star: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    span_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ergodic: Option<ErgodicReport>,
}

fn print_report(report: &CapacityReport) {
    println!(
        "{}",
        serde_json::to_string_pretty(report).expect("report serializes")
    );
}

fn mat_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Writes a stationary policy as one CSV row per window state:
/// `state_index,window_symbols,prob_input_0,...`.
fn dump_policy(path: &Path, policy: &MarkovInputPolicy) -> Result<(), i32> {
    let mut out = String::new();
    let radix = policy.output_alphabet().size();
    for s in 0..policy.state_count() {
        let window = decode_state(s, policy.memory(), radix).expect("valid state");
        let symbols = window
            .symbols()
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(".");
        out.push_str(&s.to_string());
        out.push(',');
        out.push_str(&symbols);
        for a in 0..policy.input_alphabet().size() {
            out.push(',');
            out.push_str(&sig17(policy.prob(s, a)));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| {
        eprintln!("error: cannot write policy dump {}: {e}", path.display());
        IO_EXIT
    })
}

pub fn cmd_capacity(
    spec: &Path,
    tol: Option<f64>,
    max_iter: Option<usize>,
    emit_policy: Option<&PathBuf>,
) -> i32 {
    let doc = match read_spec(spec) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let problem = match doc.build() {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let max_iter = max_iter.unwrap_or(100_000);
    match problem {
        Problem::Finite { channel, cost, .. } => {
            let solved: Result<DualSolveResult, CoreError> = match &cost {
                Some(c) => dual_search(&channel, c, tol.unwrap_or(1e-8), 1e-10, max_iter),
                None => relative_value_iteration(
                    &channel,
                    None,
                    0.0,
                    tol.unwrap_or(1e-10),
                    max_iter,
                    1e-12,
                    max_iter,
                )
                .map(|rvi| DualSolveResult {
                    s_star: 0.0,
                    j_star: rvi.j_star,
                    avg_cost: 0.0,
                    capacity_nats: rvi.j_star,
                    binding: false,
                    policy: rvi.policy,
                    rel_value: rvi.rel_value,
                    iterations: rvi.iterations,
                    span_residual: rvi.span_residual,
                    diagnostics: rvi.diagnostics,
                }),
            };
            let solved = match solved {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            let report = CapacityReport {
                kind: "finite",
                capacity_bits: solved.capacity_nats / LN_2,
                capacity_nats: solved.capacity_nats,
                s_star: solved.s_star,
                regime: if cost.is_none() {
                    "unconstrained".into()
                } else if solved.binding {
                    "active".into()
                } else {
                    "slack".into()
                },
                kappa: cost.as_ref().map(|c| c.kappa()),
                kappa_min: None,
                avg_cost: cost.as_ref().map(|_| solved.avg_cost),
                gamma_star: None,
                k_z_star: None,
                iterations: Some(solved.iterations),
                span_residual: Some(solved.span_residual),
                ergodic: Some(ErgodicReport {
                    irreducible: solved.diagnostics.irreducible,
                    aperiodic: solved.diagnostics.aperiodic,
                }),
            };
            print_report(&report);
            if let Some(path) = emit_policy {
                if let Err(code) = dump_policy(path, &solved.policy) {
                    return code;
                }
            }
            if !solved.diagnostics.ergodic() {
                eprintln!(
                    "error: ergodicity diagnostic failed (irreducible={}, aperiodic={}); \
                     the per-unit-time value may depend on the initial window",
                    solved.diagnostics.irreducible, solved.diagnostics.aperiodic
                );
                return 4;
            }
            0
        }
        Problem::GaussianScalar(params) => {
            let sol = match scalar_solve(&params) {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            if emit_policy.is_some() {
                eprintln!("note: --emit-policy applies to finite channels; ignored");
            }
            let report = CapacityReport {
                kind: "gaussianScalar",
                capacity_bits: sol.capacity_nats / LN_2,
                capacity_nats: sol.capacity_nats,
                s_star: sol.s,
                regime: sol.regime.as_str().into(),
                kappa: Some(params.kappa),
                kappa_min: Some(sol.kappa_min),
                avg_cost: Some(scalar_achieved_power(&params, &sol)),
                gamma_star: Some(vec![vec![sol.gamma_star]]),
                k_z_star: Some(vec![vec![sol.k_z_star]]),
                iterations: None,
                span_residual: None,
                ergodic: None,
            };
            print_report(&report);
            0
        }
        Problem::GaussianMatrix(params) => {
            let sol = match matrix_capacity_solve(&params, tol.unwrap_or(1e-10)) {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            if emit_policy.is_some() {
                eprintln!("note: --emit-policy applies to finite channels; ignored");
            }
            let avg = match matrix_achieved_power(&params, &sol.gamma_star, &sol.k_z_star) {
                Ok(a) => a,
                Err(e) => return fail(&e),
            };
            let report = CapacityReport {
                kind: "gaussianMatrix",
                capacity_bits: sol.capacity_nats / LN_2,
                capacity_nats: sol.capacity_nats,
                s_star: sol.s_star,
                regime: sol.regime.as_str().into(),
                kappa: Some(params.kappa),
                kappa_min: None,
                avg_cost: Some(avg),
                gamma_star: Some(mat_rows(&sol.gamma_star)),
                k_z_star: Some(mat_rows(&sol.k_z_star)),
                iterations: None,
                span_residual: None,
                ergodic: None,
            };
            print_report(&report);
            0
        }
    }
}

/// 17 significant digits, round-trip exact.
fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn cmd_sweep(
    spec: &Path,
    kappa_min: f64,
    kappa_max: f64,
    steps: usize,
    out: &Path,
    tol: Option<f64>,
    max_iter: Option<usize>,
) -> i32 {
    if steps < 2 || !(kappa_min <= kappa_max) || kappa_min < 0.0 {
        eprintln!("error: sweep requires 0 <= kappa-min <= kappa-max and steps >= 2");
        return 2;
    }
    let doc = match read_spec(spec) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let problem = match doc.build() {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let max_iter = max_iter.unwrap_or(100_000);
    let mut csv = String::from("kappa,capacity_bits,capacity_nats,s_star,kappa_min,avg_cost,regime\n");
    for i in 0..steps {
        let kappa = kappa_min + (kappa_max - kappa_min) * i as f64 / (steps as f64 - 1.0);
        let row = match &problem {
            Problem::Finite { channel, cost, .. } => {
                let Some(cost) = cost else {
                    eprintln!("error: sweep over kappa requires a transmission cost block");
                    return 2;
                };
                let cost = match cost.with_kappa(kappa) {
                    Ok(c) => c,
                    Err(e) => return fail(&e),
                };
                let sol = match dual_search(channel, &cost, tol.unwrap_or(1e-8), 1e-10, max_iter) {
                    Ok(s) => s,
                    Err(e) => return fail(&e),
                };
                format!(
                    "{},{},{},{},,{},{}\n",
                    sig17(kappa),
                    sig17(sol.capacity_nats / LN_2),
                    sig17(sol.capacity_nats),
                    sig17(sol.s_star),
                    sig17(sol.avg_cost),
                    if sol.binding { "active" } else { "slack" }
                )
            }
            Problem::GaussianScalar(params) => {
                let mut p = *params;
                p.kappa = kappa;
                let sol = match scalar_solve(&p) {
                    Ok(s) => s,
                    Err(e) => return fail(&e),
                };
                format!(
                    "{},{},{},{},{},{},{}\n",
                    sig17(kappa),
                    sig17(sol.capacity_nats / LN_2),
                    sig17(sol.capacity_nats),
                    sig17(sol.s),
                    sig17(sol.kappa_min),
                    sig17(scalar_achieved_power(&p, &sol)),
                    sol.regime.as_str()
                )
            }
            Problem::GaussianMatrix(params) => {
                let mut p = params.clone();
                p.kappa = kappa;
                let sol = match matrix_capacity_solve(&p, tol.unwrap_or(1e-10)) {
                    Ok(s) => s,
                    Err(e) => return fail(&e),
                };
                let avg = match matrix_achieved_power(&p, &sol.gamma_star, &sol.k_z_star) {
                    Ok(a) => a,
                    Err(e) => return fail(&e),
                };
                format!(
                    "{},{},{},{},,{},{}\n",
                    sig17(kappa),
                    sig17(sol.capacity_nats / LN_2),
                    sig17(sol.capacity_nats),
                    sig17(sol.s_star),
                    sig17(avg),
                    sol.regime.as_str()
                )
            }
        };
        csv.push_str(&row);
    }
    match std::fs::File::create(out).and_then(|mut f| f.write_all(csv.as_bytes())) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", out.display());
            IO_EXIT
        }
    }
}

pub fn cmd_verify(suite: &str) -> i32 {
    let results = match verify::run_suite(suite) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let mut failures = 0usize;
    for r in &results {
        println!(
            "[{}] {} - {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        if !r.pass {
            failures += 1;
        }
    }
    println!(
        "{} of {} checks passed",
        results.len() - failures,
        results.len()
    );
    if failures == 0 {
        0
    } else {
        1
    }
}
