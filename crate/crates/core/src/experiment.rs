//! Config-driven experiments: every task produces `report.json` plus
//! task-specific CSV files, held in memory until the run finishes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    antisymmetric_lower_bound, bound_report, curve_csv, phi_monotone_check,
    symmetry_breaking_criterion, upper_bound_min,
};
use crate::config::{ExperimentConfig, RearrangeSource, SweepVariable, Task};
use crate::eigen::{eigenvector_csv, l1_product_certificate, lambda1, uniqueness_certificate};
use crate::error::{OddsymError, Result};
use crate::mesh::GridFunction;
use crate::rearrange::{energy_table_csv, verify_rearrangement_with, MonotoneGrid};
use crate::solve1d::{
    derivative_comparison, hamiltonian_trace, multi_start_uniqueness, solution_csv,
    MultiStartReport, Solution,
};
use crate::weights::{check_hypotheses_lenient, HypothesisReport, Problem, DEFAULT_GRID};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Applicability {
    Certified,
    NotCertified,
    NotApplicable,
}

impl Applicability {
    fn from(b: bool) -> Self {
        if b {
            Applicability::Certified
        } else {
            Applicability::NotCertified
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Success,
    /// A hypothesis the task needs is not met; only the report is kept.
    Precondition,
    SolverFailure,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Success => 0,
            RunStatus::SolverFailure => 1,
            RunStatus::Precondition => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub status: RunStatus,
    pub message: Option<String>,
    /// `report.json` first, then CSV files; empty on solver failure.
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    pub fn artifact(&self, name: &str) -> Option<&str> {
        self.artifacts
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.contents.as_str())
    }
}

fn classify(e: &OddsymError) -> RunStatus {
    match e {
        OddsymError::Precondition(_)
        | OddsymError::InsufficientSmoothness { .. }
        | OddsymError::NotIntegrable(_)
        | OddsymError::FlatRegion { .. } => RunStatus::Precondition,
        _ => RunStatus::SolverFailure,
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Certified / not certified / not applicable for every result the crate checks.
pub fn theorem_applicability(p: &Problem, hyp: &HypothesisReport) -> BTreeMap<&'static str, Applicability> {
    let m = p.m();
    let positive = |b: bool| {
        if m > 0.0 {
            Applicability::from(b)
        } else {
            Applicability::NotApplicable
        }
    };
    let mut t = BTreeMap::new();
    t.insert("uniqueness_ab_monotone", positive(hyp.unique_by_ab_monotone(m)));
    t.insert("uniqueness_berestycki_nirenberg", positive(hyp.unique_by_bn(m)));
    t.insert("increasing_split_point", positive(hyp.increasing_by_muffin(m)));
    t.insert("increasing_double_well", positive(hyp.increasing_by_double_bound(m)));
    t.insert("rearrangement_inequalities", Applicability::from(hyp.rearrangement_applies()));
    t.insert(
        "symmetry_breaking",
        match symmetry_breaking_criterion(p) {
            Ok(s) => Applicability::from(s.certified),
            Err(_) => Applicability::NotApplicable,
        },
    );
    t.insert(
        "spectral_uniqueness",
        match uniqueness_certificate(p) {
            Ok(c) => Applicability::from(c.certified),
            Err(_) => Applicability::NotApplicable,
        },
    );
    t.insert(
        "interval_independent_uniqueness",
        match l1_product_certificate(p.a(), p.b(), p.potential()) {
            Ok(c) => Applicability::from(c.certified),
            Err(_) => Applicability::NotApplicable,
        },
    );
    t
}

#[derive(Serialize)]
struct SolutionSummary<'a> {
    preset: &'a str,
    energy: f64,
    residual_inf: f64,
    tolerance: f64,
    method: &'a str,
    newton_steps: usize,
    gradient_steps: usize,
    saddle_escapes: usize,
    hessian_negative: usize,
    local_min_spot_check: Option<bool>,
    diagnostics: &'a crate::solve1d::ShapeDiagnostics,
}

fn best_solution(r: &MultiStartReport) -> Option<(usize, &Solution)> {
    r.solutions
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.as_ref().map(|s| (i, s)))
        .min_by(|a, b| a.1.energy.total_cmp(&b.1.energy))
}

fn starts_csv(r: &MultiStartReport) -> String {
    let mut s = String::from("preset,converged,cluster,energy,u0,oddness_defect\n");
    for (st, sol) in r.starts.iter().zip(&r.solutions) {
        let (u0, odd) = sol
            .as_ref()
            .map_or((f64::NAN, f64::NAN), |x| (x.diagnostics.u_at_zero, x.diagnostics.oddness_defect));
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            st.preset,
            st.converged,
            st.cluster.map_or(String::new(), |c| c.to_string()),
            st.energy.map_or(String::new(), fmt_f),
            fmt_f(u0),
            fmt_f(odd)
        ));
    }
    s
}

struct TaskOutput {
    section: Value,
    csv: Vec<Artifact>,
    /// Set when a hypothesis the task relies on fails.
    precondition: Option<String>,
}

fn csv(name: &str, contents: String) -> Artifact {
    Artifact {
        name: name.into(),
        contents,
    }
}

fn minimize_task(cfg: &ExperimentConfig, p: &Problem) -> Result<TaskOutput> {
    let r = multi_start_uniqueness(p, &cfg.presets, cfg.mesh, cfg.seed)?;
    let (i, best) = best_solution(&r)
        .ok_or_else(|| OddsymError::Invariant("no preset converged".into()))?;
    let ham = hamiltonian_trace(p, best)?;
    let cmp = derivative_comparison(p, best);
    let summary = SolutionSummary {
        preset: cfg.presets[i].name(),
        energy: best.energy,
        residual_inf: best.residual_inf,
        tolerance: best.tolerance,
        method: &best.method,
        newton_steps: best.newton_steps,
        gradient_steps: best.gradient_steps,
        saddle_escapes: best.saddle_escapes,
        hessian_negative: best.hessian_negative,
        local_min_spot_check: best.local_min_spot_check,
        diagnostics: &best.diagnostics,
    };
    let section = json!({
        "multi_start": {
            "distinct_solutions": r.distinct_solutions,
            "uniqueness_certified": r.uniqueness_certified,
            "consistent": r.consistent,
            "starts": r.starts,
            "pairwise_gaps": r.pairwise_gaps,
        },
        "best": summary,
        "hamiltonian": {
            "max_drift": ham.max_drift,
            "max_drift_interior": ham.max_drift_interior,
            "split_point": ham.split_point,
            "unimodal": ham.unimodal,
            "unimodal_violation": ham.unimodal_violation,
        },
        "derivative_comparison": cmp,
    });
    Ok(TaskOutput {
        section,
        csv: vec![
            csv("solution.csv", solution_csv(p, &best.u)),
            csv("starts.csv", starts_csv(&r)),
        ],
        precondition: None,
    })
}

fn read_profile(path: &str, p: &Problem) -> Result<MonotoneGrid> {
    let text = std::fs::read_to_string(path)?;
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let mut it = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64> {
            s.and_then(|v| v.trim().parse::<f64>().ok()).ok_or_else(|| {
                OddsymError::InvalidInput(format!("{path}: bad row {}", i + 1))
            })
        };
        xs.push(parse(it.next())?);
        us.push(parse(it.next())?);
    }
    let n = xs.len().saturating_sub(1);
    let mesh = crate::mesh::Mesh::new(p.half_width(), n)?;
    MonotoneGrid::from_grid_function(&GridFunction::new(mesh, us)?)
}

fn rearrange_task(cfg: &ExperimentConfig, p: &Problem) -> Result<TaskOutput> {
    let (v, origin) = match &cfg.rearrange_source {
        RearrangeSource::Random => (
            MonotoneGrid::random_smooth(p.half_width(), p.m(), cfg.mesh, cfg.seed)?,
            "random".to_string(),
        ),
        RearrangeSource::File(path) => (read_profile(path, p)?, format!("file {path}")),
        RearrangeSource::Minimizer => {
            let r = multi_start_uniqueness(p, &cfg.presets[..1], cfg.mesh, cfg.seed)?;
            let sol = r.solutions[0]
                .as_ref()
                .ok_or_else(|| OddsymError::Invariant("minimizer did not converge".into()))?;
            let v = MonotoneGrid::from_grid_function(&sol.u).map_err(|e| {
                OddsymError::Precondition(format!("minimizer is not strictly increasing: {e}"))
            })?;
            (v, format!("minimizer from {}", cfg.presets[0].name()))
        }
    };
    let rep = verify_rearrangement_with(&v, p, cfg.rearrange_lambda_samples, cfg.rearrange_t_samples)?;
    let precondition = rep.warning.clone();
    let rows = energy_table_csv(&rep.rows);
    let mut section = serde_json::to_value(&rep).map_err(|e| OddsymError::Io(e.to_string()))?;
    if let Value::Object(m) = &mut section {
        m.remove("rows");
        m.insert("profile".into(), json!(origin));
    }
    Ok(TaskOutput {
        section,
        csv: vec![csv("rearrange.csv", rows)],
        precondition,
    })
}

fn bounds_task(cfg: &ExperimentConfig, p: &Problem) -> Result<TaskOutput> {
    let br = bound_report(p);
    let sb = symmetry_breaking_criterion(p)?;
    let r = multi_start_uniqueness(p, &cfg.presets, cfg.mesh, cfg.seed)?;
    let (_, best) = best_solution(&r)
        .ok_or_else(|| OddsymError::Invariant("no preset converged".into()))?;
    let e = best.energy;
    let upper = br.upper_bound.value;
    let mut out = vec![csv("upper_bound.csv", curve_csv("upper_bound", &br.upper_bound.samples))];
    if let Some(c) = &br.c_as {
        out.push(csv("psi.csv", curve_csv("psi", &c.samples)));
    }
    let phi = if cfg.bounds_lengths.is_empty() {
        Value::Null
    } else {
        let ph = phi_monotone_check(p, &cfg.bounds_lengths, cfg.mesh as f64 / (2.0 * p.half_width()))?;
        out.push(csv("phi.csv", curve_csv("phi", &ph.values).replacen("t,", "L,", 1)));
        serde_json::to_value(&ph).map_err(|x| OddsymError::Io(x.to_string()))?
    };
    let mut brv = serde_json::to_value(&br).map_err(|x| OddsymError::Io(x.to_string()))?;
    if let Value::Object(m) = &mut brv {
        if let Some(Value::Object(u)) = m.get_mut("upper_bound") {
            u.remove("samples");
        }
        if let Some(Value::Object(c)) = m.get_mut("c_as") {
            c.remove("samples");
        }
    }
    let section = json!({
        "bounds": brv,
        "symmetry_breaking": sb,
        "minimizer_energy": e,
        "minimizer_oddness_defect": best.diagnostics.oddness_defect,
        "sandwich": {
            "positive": e > 0.0,
            "below_upper_bound": e <= upper * (1.0 + 1e-9),
            "odd_minimizer_above_c_as": br.c_as.as_ref().map(|c| best.diagnostics.oddness_defect > 1e-6 || e >= c.value),
        },
        "phi_monotone": phi,
    });
    Ok(TaskOutput {
        section,
        csv: out,
        precondition: None,
    })
}

fn eigen_task(cfg: &ExperimentConfig, p: &Problem) -> Result<TaskOutput> {
    let e = lambda1(p, cfg.eigen_mesh)?;
    let cert = uniqueness_certificate(p)?;
    let l1 = l1_product_certificate(p.a(), p.b(), p.potential()).ok();
    let mut out = Vec::new();
    if let Some(v) = &e.eigenvector {
        out.push(csv("eigenvector.csv", eigenvector_csv(v)));
    }
    let section = json!({
        "eigen": e,
        "certificate": cert,
        "l1_product": l1,
    });
    Ok(TaskOutput {
        section,
        csv: out,
        precondition: None,
    })
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    value: f64,
    u0: f64,
    energy: f64,
    c_as: f64,
    upper_min: f64,
    certified: bool,
    distinct_solutions: usize,
}

fn sweep_point(cfg: &ExperimentConfig, value: f64) -> Result<SweepRow> {
    let p = match cfg.sweep_variable {
        SweepVariable::L => cfg.problem_with(value, cfg.m)?,
        SweepVariable::M => cfg.problem_with(cfg.half_width, value)?,
    };
    let r = multi_start_uniqueness(&p, &cfg.presets, cfg.mesh, cfg.seed)?;
    let (_, best) = best_solution(&r)
        .ok_or_else(|| OddsymError::Invariant(format!("no preset converged at {value}")))?;
    Ok(SweepRow {
        value,
        u0: best.diagnostics.u_at_zero,
        energy: best.energy,
        c_as: antisymmetric_lower_bound(&p).map_or(f64::NAN, |c| c.value),
        upper_min: upper_bound_min(&p).value,
        certified: symmetry_breaking_criterion(&p).is_ok_and(|s| s.certified),
        distinct_solutions: r.distinct_solutions,
    })
}

fn sweep_task(cfg: &ExperimentConfig) -> Result<TaskOutput> {
    let rows: Vec<SweepRow> = cfg
        .sweep_values
        .par_iter()
        .map(|&v| sweep_point(cfg, v))
        .collect::<Result<Vec<_>>>()?;
    let var = match cfg.sweep_variable {
        SweepVariable::L => "L",
        SweepVariable::M => "m",
    };
    let mut s = format!("{var},u0,energy,C_as,upper_min,certified\n");
    for r in &rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f(r.value),
            fmt_f(r.u0),
            fmt_f(r.energy),
            fmt_f(r.c_as),
            fmt_f(r.upper_min),
            r.certified
        ));
    }
    Ok(TaskOutput {
        section: json!({ "variable": var, "rows": rows }),
        csv: vec![csv("sweep.csv", s)],
        precondition: None,
    })
}

fn run_task(cfg: &ExperimentConfig, p: &Problem) -> Result<TaskOutput> {
    match cfg.task {
        Task::Audit => Ok(TaskOutput {
            section: Value::Null,
            csv: Vec::new(),
            precondition: None,
        }),
        Task::Minimize => minimize_task(cfg, p),
        Task::Rearrange => rearrange_task(cfg, p),
        Task::Bounds => bounds_task(cfg, p),
        Task::Eigen => eigen_task(cfg, p),
        Task::Sweep => sweep_task(cfg),
    }
}

fn report(cfg: &ExperimentConfig, status: RunStatus, body: Value) -> Artifact {
    let mut m = serde_json::Map::new();
    m.insert("name".into(), json!(cfg.name));
    m.insert("task".into(), json!(cfg.task.name()));
    m.insert("exercises".into(), json!(cfg.exercises));
    m.insert("status".into(), json!(status));
    m.insert("config".into(), json!(cfg.to_text()));
    if let Value::Object(b) = body {
        m.extend(b);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(m)).unwrap_or_else(|_| "{}".into());
    text.push('\n');
    Artifact {
        name: "report.json".into(),
        contents: text,
    }
}

/// Runs the configured task in memory.
pub fn execute(cfg: &ExperimentConfig) -> RunOutput {
    let inner = || -> std::result::Result<RunOutput, (RunStatus, String, Value)> {
        let fail = |e: OddsymError| (classify(&e), e.to_string(), Value::Null);
        let p = cfg.problem().map_err(fail)?;
        let hyp = check_hypotheses_lenient(&p, DEFAULT_GRID).map_err(fail)?;
        let theorems = theorem_applicability(&p, &hyp);
        let base = json!({ "hypotheses": hyp, "theorems": theorems });
        let t = run_task(cfg, &p).map_err(|e| (classify(&e), e.to_string(), base.clone()))?;
        let mut body = base;
        if let Value::Object(b) = &mut body {
            b.insert(cfg.task.name().into(), t.section);
            if let Some(w) = &t.precondition {
                b.insert("precondition".into(), json!(w));
            }
        }
        let status = if t.precondition.is_some() {
            RunStatus::Precondition
        } else {
            RunStatus::Success
        };
        let mut artifacts = vec![report(cfg, status, body)];
        if status == RunStatus::Success {
            artifacts.extend(t.csv);
        }
        Ok(RunOutput {
            status,
            message: t.precondition,
            artifacts,
        })
    };
    let run = || match inner() {
        Ok(o) => o,
        Err((status, msg, base)) => {
            let artifacts = if status == RunStatus::Precondition {
                let mut body = base;
                if !body.is_object() {
                    body = json!({});
                }
                if let Value::Object(b) = &mut body {
                    b.insert("precondition".into(), json!(msg));
                }
                vec![report(cfg, status, body)]
            } else {
                Vec::new()
            };
            RunOutput {
                status,
                message: Some(msg),
                artifacts,
            }
        }
    };
    match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

/// Writes all artifacts into `dir`; anything written is removed again if a
/// later write fails.
pub fn write_artifacts(dir: &Path, out: &RunOutput) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for a in &out.artifacts {
        let path = dir.join(&a.name);
        if let Err(e) = std::fs::write(&path, a.contents.as_bytes()) {
            for w in &written {
                let _ = std::fs::remove_file(w);
            }
            return Err(e.into());
        }
        written.push(path);
    }
    Ok(written)
}

/// Built-in configs, `(name, text)`.
pub fn preset_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("thm1_2_expquad", include_str!("../../../presets/thm1_2_expquad.conf")),
        ("example1_8_decay", include_str!("../../../presets/example1_8_decay.conf")),
        ("unweighted_heteroclinic", include_str!("../../../presets/unweighted_heteroclinic.conf")),
        ("nonodd_onset_sweep", include_str!("../../../presets/nonodd_onset_sweep.conf")),
        ("allen_cahn_bounds", include_str!("../../../presets/allen_cahn_bounds.conf")),
        ("expquad_supersolution", include_str!("../../../presets/expquad_supersolution.conf")),
        ("power_weights_small_domain", include_str!("../../../presets/power_weights_small_domain.conf")),
        ("rearrange_expquad", include_str!("../../../presets/rearrange_expquad.conf")),
        ("audit_expquad", include_str!("../../../presets/audit_expquad.conf")),
    ]
}

/// Reads a config from a path, trying `<path>.conf` and then the built-in
/// catalog by file stem.
pub fn load_config(path: &str) -> Result<ExperimentConfig> {
    let p = Path::new(path);
    let with_ext = PathBuf::from(format!("{path}.conf"));
    let text = if p.is_file() {
        std::fs::read_to_string(p)?
    } else if with_ext.is_file() {
        std::fs::read_to_string(&with_ext)?
    } else {
        let stem = p
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(path)
            .to_string();
        preset_catalog()
            .into_iter()
            .find(|(n, _)| *n == stem)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| OddsymError::Config(format!("no config file or preset named '{path}'")))?
    };
    ExperimentConfig::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_parses_and_is_annotated() {
        let cat = preset_catalog();
        assert!(cat.len() >= 6);
        for (name, text) in cat {
            let c = ExperimentConfig::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(c.name, name);
            assert!(!c.exercises.is_empty(), "{name}");
            assert!(c.problem().is_ok(), "{name}");
        }
    }

    #[test]
    fn audit_report_is_complete() {
        let cfg = load_config("audit_expquad").unwrap();
        let out = execute(&cfg);
        assert_eq!(out.status, RunStatus::Success);
        let v: Value = serde_json::from_str(out.artifact("report.json").unwrap()).unwrap();
        assert_eq!(v["hypotheses"]["log_convex_a"]["holds"], json!(true));
        assert!((v["hypotheses"]["log_convex_a"]["margin"].as_f64().unwrap() - 2.0).abs() < 1e-9);
        let t = v["theorems"].as_object().unwrap();
        assert_eq!(t.len(), 8);
        for (_, s) in t {
            let s = s.as_str().unwrap();
            assert!(["certified", "not_certified", "not_applicable"].contains(&s));
        }
    }

    #[test]
    fn precondition_failure_keeps_only_the_report() {
        // Tabulated potential: the spectral certificate needs G in C^2.
        let text = "task = eigen\nproblem.g.family = tabulated_even\n\
                    problem.g.nodes = 0, 0.5, 1, 2\nproblem.g.values = 0.25, 0.14, 0, 2.25\n";
        let out = execute(&ExperimentConfig::parse(text).unwrap());
        assert_eq!(out.status, RunStatus::Precondition);
        assert_eq!(out.artifacts.len(), 1);
        assert!(out.artifact("report.json").unwrap().contains("precondition"));
    }
}
