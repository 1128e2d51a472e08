//! Report serialization and command implementations behind the binary.
//!
//! JSON is the sole interchange format; complex numbers are `[re, im]`
//! arrays and matrices are row-major entry lists. Exit codes are a stable
//! contract: 0 pass/unital, 1 usage or parse error, 2 scenario-verdict
//! failure, 3 non-unital check verdict.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channel::{unitality_both_methods, BipartiteUnitary, UnitalityReport};
use crate::linalg::{Complex64, ComplexMatrix, DimensionSplit, EQUALITY_TOL};
use crate::sampler::{h_theorem_sweep, EnvMode, SweepResult};
use crate::scenarios::{run_demon_cycle, run_heating_cooling, DemonConfig, ScenarioReport};
use crate::state::DensityMatrix;
use crate::{Error, Result};

const LN2: f64 = std::f64::consts::LN_2;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERDICT_FAILURE: i32 = 2;
pub const EXIT_NON_UNITAL: i32 = 3;

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

/// JSON wire form of a complex matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitDocument {
    pub dim_system: usize,
    pub dim_reservoir: usize,
}

impl MatrixDocument {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixDocument {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
            split: None,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }

    pub fn to_split(&self) -> Result<DimensionSplit> {
        let s = self
            .split
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("matrix document carries no dimension split".into()))?;
        DimensionSplit::new(s.dim_system, s.dim_reservoir)
    }
}

/// On-disk request for the `check` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRequest {
    pub unitary: MatrixDocument,
    pub env: MatrixDocument,
    #[serde(default)]
    pub tol: Option<f64>,
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixDocument::from_matrix(m)).expect("matrix serializes")
}

fn unitality_json(label: &str, rep: &UnitalityReport) -> Value {
    let per_pair = rep.per_pair_contributions.as_ref().map(|pairs| {
        pairs
            .iter()
            .map(|((j, jp), v)| {
                json!({"j": j, "j_prime": jp, "value": [v.re, v.im]})
            })
            .collect::<Vec<_>>()
    });
    json!({
        "label": label,
        "method": rep.method.as_str(),
        "defect": matrix_json(&rep.defect),
        "defect_norm": rep.defect_norm,
        "is_unital": rep.is_unital,
        "tolerance": rep.tolerance,
        "phi_of_identity": matrix_json(&rep.phi_of_identity()),
        "per_pair_contributions": per_pair,
    })
}

/// ScenarioReport as a JSON value with schema-stable key names.
pub fn scenario_report_json(report: &ScenarioReport) -> Value {
    json!({
        "scenario": report.name,
        "stages": report.stages.iter().map(|s| json!({
            "label": s.label,
            "joint_state": matrix_json(s.joint_state.matrix()),
            "system_reduced": matrix_json(s.system_reduced.matrix()),
            "env_reduced": matrix_json(s.env_reduced.matrix()),
            "system_entropy_nats": s.system_entropy_nats,
            "env_entropy_nats": s.env_entropy_nats,
        })).collect::<Vec<_>>(),
        "unitality": report.unitality.iter()
            .map(|(label, rep)| unitality_json(label, rep))
            .collect::<Vec<_>>(),
        "heat_extracted": report.heat_extracted,
        "work_bookkeeping": report.work_bookkeeping,
        "residual_env_entropy_nats": report.residual_env_entropy_nats,
        "verdicts": report.verdicts.iter().map(|v| json!({
            "name": v.name,
            "passed": v.passed,
            "detail": v.detail,
        })).collect::<Vec<_>>(),
        "all_passed": report.all_passed(),
    })
}

/// SweepResult as a JSON value.
pub fn sweep_result_json(result: &SweepResult) -> Value {
    json!({
        "dim_system": result.dim_system,
        "dim_reservoir": result.dim_reservoir,
        "env_mode": result.env_mode.as_str(),
        "seed": result.seed,
        "trials": result.trials,
        "unital_count": result.unital_count,
        "nonunital_count": result.nonunital_count,
        "max_method_disagreement": result.max_method_disagreement,
        "min_entropy_delta_unital": result.min_entropy_delta_unital,
        "violations": result.violations.iter().map(|v| json!({
            "trial_index": v.trial_index,
            "description": v.description,
        })).collect::<Vec<_>>(),
        "passed": result.passed(),
    })
}

/// 9 significant digits, matching the text-format contract.
fn num(x: f64) -> String {
    format!("{x:.8e}")
}

fn entropy_num(x: f64, kb_units: bool) -> String {
    if kb_units {
        format!("{} k_B ln2", num(x / LN2))
    } else {
        format!("{} nats", num(x))
    }
}

fn matrix_text(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        out.push_str("    [");
        for j in 0..m.cols() {
            let z = m.get(i, j);
            if j > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("{}{}{}i", num(z.re), if z.im < 0.0 { "" } else { "+" }, num(z.im)));
        }
        out.push_str("]\n");
    }
    out
}

fn unitality_text(label: &str, rep: &UnitalityReport) -> String {
    let mut out = format!(
        "  {label}: method={} defect_norm={} unital={}\n",
        rep.method.as_str(),
        num(rep.defect_norm),
        rep.is_unital
    );
    out.push_str("  Phi(1):\n");
    out.push_str(&matrix_text(&rep.phi_of_identity()));
    out
}

fn scenario_report_text(report: &ScenarioReport, kb_units: bool) -> String {
    let mut out = format!("scenario: {}\nstages:\n", report.name);
    for s in &report.stages {
        out.push_str(&format!(
            "  {:8} system S = {:24}  env S = {}\n",
            s.label,
            entropy_num(s.system_entropy_nats, kb_units),
            entropy_num(s.env_entropy_nats, kb_units),
        ));
    }
    out.push_str("unitality:\n");
    for (label, rep) in &report.unitality {
        out.push_str(&unitality_text(label, rep));
    }
    out.push_str(&format!("heat_extracted: {}\n", num(report.heat_extracted)));
    if let Some(w) = report.work_bookkeeping {
        out.push_str(&format!("work_bookkeeping: {}\n", num(w)));
    }
    if let Some(s) = report.residual_env_entropy_nats {
        out.push_str(&format!(
            "residual demon entropy: {} (must leave the cycle during reset)\n",
            entropy_num(s, kb_units)
        ));
    }
    out.push_str("verdicts:\n");
    for v in &report.verdicts {
        out.push_str(&format!(
            "  [{}] {} ({})\n",
            if v.passed { "pass" } else { "FAIL" },
            v.name,
            v.detail
        ));
    }
    out.push_str(&format!(
        "overall: {}\n",
        if report.all_passed() { "PASS" } else { "FAIL" }
    ));
    out
}

fn sweep_result_text(result: &SweepResult) -> String {
    let mut out = format!(
        "sweep: d_sys={} d_env={} env_mode={} seed={} trials={}\n",
        result.dim_system, result.dim_reservoir, result.env_mode.as_str(), result.seed, result.trials
    );
    out.push_str(&format!(
        "unital: {}  non-unital: {}\n",
        result.unital_count, result.nonunital_count
    ));
    out.push_str(&format!(
        "max method disagreement: {}\n",
        num(result.max_method_disagreement)
    ));
    match result.min_entropy_delta_unital {
        Some(d) => out.push_str(&format!("min entropy delta (unital trials): {}\n", num(d))),
        None => out.push_str("min entropy delta (unital trials): n/a\n"),
    }
    out.push_str(&format!("violations: {}\n", result.violations.len()));
    for v in &result.violations {
        out.push_str(&format!("  trial {}: {}\n", v.trial_index, v.description));
    }
    out.push_str(&format!(
        "overall: {}\n",
        if result.passed() { "PASS" } else { "FAIL" }
    ));
    out
}

fn render_scenario(
    report: &ScenarioReport,
    format: OutputFormat,
    kb_units: bool,
) -> (String, i32) {
    let text = match format {
        OutputFormat::Json => scenario_report_json(report).to_string(),
        OutputFormat::Text => scenario_report_text(report, kb_units),
    };
    let code = if report.all_passed() {
        EXIT_PASS
    } else {
        EXIT_VERDICT_FAILURE
    };
    (text, code)
}

/// `demon` subcommand body: run the cycle, render, pick the exit code.
pub fn cmd_demon(
    rho_ee: f64,
    temperature: f64,
    tol: f64,
    format: OutputFormat,
    kb_units: bool,
) -> Result<(String, i32)> {
    let cfg = DemonConfig {
        rho_ee,
        temperature,
        tol,
    };
    let report = run_demon_cycle(&cfg)?;
    Ok(render_scenario(&report, format, kb_units))
}

/// `swap` subcommand body.
pub fn cmd_swap(tol: f64, format: OutputFormat, kb_units: bool) -> Result<(String, i32)> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let report = run_heating_cooling(tol)?;
    Ok(render_scenario(&report, format, kb_units))
}

/// `check` subcommand body: both unitality routes on a user-supplied
/// dilation, exit 0 unital / 3 non-unital.
pub fn cmd_check(request: &CheckRequest, format: OutputFormat) -> Result<(String, i32)> {
    let tol = request.tol.unwrap_or(EQUALITY_TOL);
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let split = request.unitary.to_split()?;
    let u_matrix = request.unitary.to_matrix()?;
    let u = BipartiteUnitary::new(u_matrix, split, EQUALITY_TOL)?;
    let env = DensityMatrix::validate_default(request.env.to_matrix()?)?;

    let (direct, comm, disagreement) = unitality_both_methods(&u, &env, tol)?;
    let unital = direct.is_unital && comm.is_unital;

    let text = match format {
        OutputFormat::Json => json!({
            "direct": unitality_json("direct", &direct),
            "commutator": unitality_json("commutator", &comm),
            "disagreement": disagreement,
            "unital": unital,
        })
        .to_string(),
        OutputFormat::Text => {
            let mut out = String::new();
            out.push_str(&unitality_text("direct", &direct));
            out.push_str(&unitality_text("commutator", &comm));
            out.push_str(&format!("method disagreement: {}\n", num(disagreement)));
            out.push_str(&format!(
                "verdict: {}\n",
                if unital { "unital" } else { "non-unital" }
            ));
            out
        }
    };
    Ok((text, if unital { EXIT_PASS } else { EXIT_NON_UNITAL }))
}

/// `sweep` subcommand body, exit 0 iff no violations.
pub fn cmd_sweep(
    dim_sys: usize,
    dim_env: usize,
    trials: u64,
    env_mode: EnvMode,
    seed: u64,
    format: OutputFormat,
) -> Result<(String, i32)> {
    let result = h_theorem_sweep(dim_sys, dim_env, trials, env_mode, seed)?;
    let text = match format {
        OutputFormat::Json => sweep_result_json(&result).to_string(),
        OutputFormat::Text => sweep_result_text(&result),
    };
    Ok((text, if result.passed() { EXIT_PASS } else { EXIT_VERDICT_FAILURE }))
}
