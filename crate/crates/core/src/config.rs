//! Flat `key = value` experiment configs with dotted sections.
//!
//! ```text
//! # comment
//! task = minimize
//! problem.L = 1
//! problem.a.family = exp_quadratic
//! problem.a.alpha = 1.0
//! presets = linear, odd_tanh, plus_one
//! ```
//!
//! Every key has a default; unknown or duplicate keys are errors.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{OddsymError, Result};
use crate::solve1d::Preset;
use crate::weights::{Potential, PotentialFamily, Problem, WeightFamily, WeightFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Audit,
    Minimize,
    Rearrange,
    Bounds,
    Eigen,
    Sweep,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::Audit,
        Task::Minimize,
        Task::Rearrange,
        Task::Bounds,
        Task::Eigen,
        Task::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Audit => "audit",
            Task::Minimize => "minimize",
            Task::Rearrange => "rearrange",
            Task::Bounds => "bounds",
            Task::Eigen => "eigen",
            Task::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    L,
    M,
}

/// Where the rearrange task takes its increasing profile from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RearrangeSource {
    /// Minimizer from the first preset.
    Minimizer,
    /// Seeded smooth random profile.
    Random,
    /// Solution CSV with columns `x,u,...`.
    File(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub description: String,
    /// The result the config exercises.
    pub exercises: String,
    pub task: Task,
    pub half_width: f64,
    pub m: f64,
    pub a: WeightFamily,
    pub b: WeightFamily,
    pub g: PotentialFamily,
    pub well: f64,
    pub mesh: usize,
    pub presets: Vec<Preset>,
    pub seed: u64,
    pub jobs: usize,
    pub out: Option<String>,
    pub rearrange_t_samples: usize,
    pub rearrange_lambda_samples: usize,
    pub rearrange_source: RearrangeSource,
    pub sweep_variable: SweepVariable,
    pub sweep_values: Vec<f64>,
    pub eigen_mesh: usize,
    pub bounds_lengths: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "experiment".into(),
            description: String::new(),
            exercises: String::new(),
            task: Task::Audit,
            half_width: 1.0,
            m: 1.0,
            a: WeightFamily::Constant { c: 1.0 },
            b: WeightFamily::Constant { c: 1.0 },
            g: PotentialFamily::Quartic { well: 1.0 },
            well: 1.0,
            mesh: 1024,
            presets: Preset::ALL.to_vec(),
            seed: 0,
            jobs: 0,
            out: None,
            rearrange_t_samples: crate::rearrange::DEFAULT_T_SAMPLES,
            rearrange_lambda_samples: crate::rearrange::DEFAULT_LAMBDA_SAMPLES,
            rearrange_source: RearrangeSource::Minimizer,
            sweep_variable: SweepVariable::L,
            sweep_values: Vec::new(),
            eigen_mesh: crate::eigen::DEFAULT_EIGEN_MESH,
            bounds_lengths: Vec::new(),
        }
    }
}

const TOP_KEYS: &[&str] = &[
    "name",
    "description",
    "exercises",
    "task",
    "mesh",
    "presets",
    "seed",
    "jobs",
    "out",
    "problem.L",
    "problem.m",
    "rearrange.t_samples",
    "rearrange.lambda_samples",
    "rearrange.source",
    "rearrange.input",
    "sweep.variable",
    "sweep.values",
    "eigen.mesh",
    "bounds.lengths",
];

const WEIGHT_PARAMS: &[&str] = &["family", "c", "alpha", "beta", "delta", "coeffs", "nodes", "values"];
const POTENTIAL_PARAMS: &[&str] = &["family", "well", "coeffs", "nodes", "values"];

struct Entry {
    line: usize,
    value: String,
}

struct Entries {
    map: BTreeMap<String, Entry>,
    used: std::collections::BTreeSet<String>,
}

fn err(line: usize, key: &str, msg: impl fmt::Display) -> OddsymError {
    OddsymError::Config(format!("line {line}, key '{key}': {msg}"))
}

impl Entries {
    fn raw(&mut self, key: &str) -> Option<(usize, String)> {
        let e = self.map.get(key)?;
        self.used.insert(key.to_string());
        Some((e.line, e.value.clone()))
    }

    fn get<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| err(line, key, format!("cannot parse '{v}': {e}"))),
        }
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => parse_list(&v)
                .map(Some)
                .map_err(|e| err(line, key, e)),
        }
    }

    fn line(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |e| e.line)
    }
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        return parse_number(inner).map(f64::sqrt);
    }
    t.parse::<f64>().map_err(|e| format!("cannot parse number '{t}': {e}"))
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_number).collect()
}

fn weight_family(e: &mut Entries, prefix: &str) -> Result<WeightFamily> {
    let fam_key = format!("{prefix}.family");
    let family: String = e.get(&fam_key)?.unwrap_or_else(|| "constant".into());
    let allowed: &[&str] = match family.as_str() {
        "constant" => &["c"],
        "exp_quadratic" => &["alpha"],
        "power_abs" => &["beta", "delta"],
        "polynomial" => &["coeffs"],
        "tabulated" => &["nodes", "values"],
        other => {
            return Err(err(
                e.line(&fam_key),
                &fam_key,
                format!("unknown weight family '{other}'"),
            ))
        }
    };
    for p in WEIGHT_PARAMS.iter().skip(1) {
        let k = format!("{prefix}.{p}");
        if e.map.contains_key(&k) && !allowed.contains(p) {
            return Err(err(e.line(&k), &k, format!("not a parameter of family {family}")));
        }
    }
    let num = |e: &mut Entries, p: &str, d: f64| -> Result<f64> {
        let k = format!("{prefix}.{p}");
        match e.raw(&k) {
            None => Ok(d),
            Some((line, v)) => parse_number(&v).map_err(|m| err(line, &k, m)),
        }
    };
    let list = |e: &mut Entries, p: &str| -> Result<Vec<f64>> {
        let k = format!("{prefix}.{p}");
        let line = e.line(&k);
        e.list(&k)?
            .ok_or_else(|| err(line, &k, format!("required by family {family}")))
    };
    Ok(match family.as_str() {
        "constant" => WeightFamily::Constant { c: num(e, "c", 1.0)? },
        "exp_quadratic" => WeightFamily::ExpQuadratic {
            alpha: num(e, "alpha", 1.0)?,
        },
        "power_abs" => WeightFamily::PowerAbs {
            beta: num(e, "beta", 1.0)?,
            delta: num(e, "delta", 1.0)?,
        },
        "polynomial" => WeightFamily::Polynomial {
            coeffs: list(e, "coeffs")?,
        },
        _ => {
            let nodes = list(e, "nodes")?;
            let values = list(e, "values")?;
            WeightFamily::Tabulated {
                interp: crate::quad::MonotoneCubic::new(nodes, values)?,
            }
        }
    })
}

fn potential_family(e: &mut Entries) -> Result<(PotentialFamily, f64)> {
    let prefix = "problem.g";
    let fam_key = format!("{prefix}.family");
    let family: String = e.get(&fam_key)?.unwrap_or_else(|| "quartic".into());
    let allowed: &[&str] = match family.as_str() {
        "quartic" => &["well"],
        "even_polynomial" => &["well", "coeffs"],
        "tabulated_even" => &["well", "nodes", "values"],
        other => {
            return Err(err(
                e.line(&fam_key),
                &fam_key,
                format!("unknown potential family '{other}'"),
            ))
        }
    };
    for p in POTENTIAL_PARAMS.iter().skip(1) {
        let k = format!("{prefix}.{p}");
        if e.map.contains_key(&k) && !allowed.contains(p) {
            return Err(err(e.line(&k), &k, format!("not a parameter of family {family}")));
        }
    }
    let well_key = format!("{prefix}.well");
    let well = match e.raw(&well_key) {
        None => 1.0,
        Some((line, v)) => parse_number(&v).map_err(|m| err(line, &well_key, m))?,
    };
    let mut list = |p: &str| -> Result<Vec<f64>> {
        let k = format!("{prefix}.{p}");
        let line = e.line(&k);
        e.list(&k)?
            .ok_or_else(|| err(line, &k, format!("required by family {family}")))
    };
    let fam = match family.as_str() {
        "quartic" => PotentialFamily::Quartic { well },
        "even_polynomial" => PotentialFamily::EvenPolynomial {
            coeffs: list("coeffs")?,
        },
        _ => {
            let nodes = list("nodes")?;
            let values = list("values")?;
            PotentialFamily::TabulatedEven {
                interp: crate::quad::MonotoneCubic::new(nodes, values)?,
            }
        }
    };
    Ok((fam, well))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, Entry> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| OddsymError::Config(format!("line {line}: expected 'key = value'")))?;
            let key = k.trim().to_string();
            if key.is_empty() {
                return Err(OddsymError::Config(format!("line {line}: empty key")));
            }
            let known = TOP_KEYS.contains(&key.as_str())
                || ["problem.a.", "problem.b."].iter().any(|p| {
                    key.strip_prefix(p).is_some_and(|r| WEIGHT_PARAMS.contains(&r))
                })
                || key
                    .strip_prefix("problem.g.")
                    .is_some_and(|r| POTENTIAL_PARAMS.contains(&r));
            if !known {
                return Err(err(line, &key, "unknown key"));
            }
            if let Some(prev) = map.get(&key) {
                return Err(err(line, &key, format!("duplicate of line {}", prev.line)));
            }
            map.insert(
                key,
                Entry {
                    line,
                    value: v.trim().to_string(),
                },
            );
        }
        let mut e = Entries {
            map,
            used: Default::default(),
        };
        let d = ExperimentConfig::default();
        let task = match e.raw("task") {
            None => d.task,
            Some((line, v)) => *Task::ALL
                .iter()
                .find(|t| t.name() == v)
                .ok_or_else(|| err(line, "task", format!("unknown task '{v}'")))?,
        };
        let presets = match e.raw("presets") {
            None => d.presets.clone(),
            Some((line, v)) => v
                .split(',')
                .map(Preset::parse)
                .collect::<Result<Vec<_>>>()
                .map_err(|x| err(line, "presets", x))?,
        };
        let num = |e: &mut Entries, k: &str, dv: f64| -> Result<f64> {
            match e.raw(k) {
                None => Ok(dv),
                Some((line, v)) => parse_number(&v).map_err(|m| err(line, k, m)),
            }
        };
        let half_width = num(&mut e, "problem.L", d.half_width)?;
        let m = num(&mut e, "problem.m", d.m)?;
        let a = weight_family(&mut e, "problem.a")?;
        let b = weight_family(&mut e, "problem.b")?;
        let (g, well) = potential_family(&mut e)?;
        let source = match (e.raw("rearrange.source"), e.raw("rearrange.input")) {
            (None, None) => RearrangeSource::Minimizer,
            (Some((_, s)), None) if s == "minimizer" => RearrangeSource::Minimizer,
            (Some((_, s)), None) if s == "random" => RearrangeSource::Random,
            (Some((_, s)), Some((_, path))) if s == "file" => RearrangeSource::File(path),
            (None, Some((_, path))) => RearrangeSource::File(path),
            (Some((line, s)), _) => {
                return Err(err(
                    line,
                    "rearrange.source",
                    format!("expected minimizer, random or file (with rearrange.input), got '{s}'"),
                ))
            }
        };
        let sweep_variable = match e.raw("sweep.variable") {
            None => d.sweep_variable,
            Some((_, v)) if v == "L" => SweepVariable::L,
            Some((_, v)) if v == "m" => SweepVariable::M,
            Some((line, v)) => {
                return Err(err(line, "sweep.variable", format!("expected L or m, got '{v}'")))
            }
        };
        let cfg = ExperimentConfig {
            name: e.get("name")?.unwrap_or(d.name),
            description: e.get("description")?.unwrap_or(d.description),
            exercises: e.get("exercises")?.unwrap_or(d.exercises),
            task,
            half_width,
            m,
            a,
            b,
            g,
            well,
            mesh: e.get("mesh")?.unwrap_or(d.mesh),
            presets,
            seed: e.get("seed")?.unwrap_or(d.seed),
            jobs: e.get("jobs")?.unwrap_or(d.jobs),
            out: e.get("out")?,
            rearrange_t_samples: e.get("rearrange.t_samples")?.unwrap_or(d.rearrange_t_samples),
            rearrange_lambda_samples: e
                .get("rearrange.lambda_samples")?
                .unwrap_or(d.rearrange_lambda_samples),
            rearrange_source: source,
            sweep_variable,
            sweep_values: e.list("sweep.values")?.unwrap_or(d.sweep_values),
            eigen_mesh: e.get("eigen.mesh")?.unwrap_or(d.eigen_mesh),
            bounds_lengths: e.list("bounds.lengths")?.unwrap_or(d.bounds_lengths),
        };
        if let Some(k) = e.map.keys().find(|k| !e.used.contains(*k)) {
            return Err(err(e.line(k), k, "unknown key"));
        }
        if cfg.task == Task::Sweep && cfg.sweep_values.is_empty() {
            return Err(err(e.line("sweep.values"), "sweep.values", "sweep task needs values"));
        }
        if cfg.presets.is_empty() {
            return Err(err(e.line("presets"), "presets", "need at least one preset"));
        }
        Ok(cfg)
    }

    pub fn problem(&self) -> Result<Problem> {
        self.problem_with(self.half_width, self.m)
    }

    pub fn problem_with(&self, half_width: f64, m: f64) -> Result<Problem> {
        Problem::new(
            half_width,
            m,
            WeightFn::new(self.a.clone(), half_width)?,
            WeightFn::new(self.b.clone(), half_width)?,
            Potential::new(self.g.clone(), self.well)?,
        )
    }

    /// Canonical text form; parsing it back gives an equal config.
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        out.push(format!("name = {}", self.name));
        if !self.description.is_empty() {
            out.push(format!("description = {}", self.description));
        }
        if !self.exercises.is_empty() {
            out.push(format!("exercises = {}", self.exercises));
        }
        out.push(format!("task = {}", self.task.name()));
        out.push(format!("problem.L = {:?}", self.half_width));
        out.push(format!("problem.m = {:?}", self.m));
        for (prefix, w) in [("problem.a", &self.a), ("problem.b", &self.b)] {
            match w {
                WeightFamily::Constant { c } => {
                    out.push(format!("{prefix}.family = constant"));
                    out.push(format!("{prefix}.c = {c:?}"));
                }
                WeightFamily::ExpQuadratic { alpha } => {
                    out.push(format!("{prefix}.family = exp_quadratic"));
                    out.push(format!("{prefix}.alpha = {alpha:?}"));
                }
                WeightFamily::PowerAbs { beta, delta } => {
                    out.push(format!("{prefix}.family = power_abs"));
                    out.push(format!("{prefix}.beta = {beta:?}"));
                    out.push(format!("{prefix}.delta = {delta:?}"));
                }
                WeightFamily::Polynomial { coeffs } => {
                    out.push(format!("{prefix}.family = polynomial"));
                    out.push(format!("{prefix}.coeffs = {}", list(coeffs)));
                }
                WeightFamily::Tabulated { interp } => {
                    out.push(format!("{prefix}.family = tabulated"));
                    out.push(format!("{prefix}.nodes = {}", list(interp.xs())));
                    out.push(format!("{prefix}.values = {}", list(interp.ys())));
                }
            }
        }
        match &self.g {
            PotentialFamily::Quartic { .. } => out.push("problem.g.family = quartic".into()),
            PotentialFamily::EvenPolynomial { coeffs } => {
                out.push("problem.g.family = even_polynomial".into());
                out.push(format!("problem.g.coeffs = {}", list(coeffs)));
            }
            PotentialFamily::TabulatedEven { interp } => {
                out.push("problem.g.family = tabulated_even".into());
                out.push(format!("problem.g.nodes = {}", list(interp.xs())));
                out.push(format!("problem.g.values = {}", list(interp.ys())));
            }
        }
        out.push(format!("problem.g.well = {:?}", self.well));
        out.push(format!("mesh = {}", self.mesh));
        out.push(format!(
            "presets = {}",
            self.presets.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
        ));
        out.push(format!("seed = {}", self.seed));
        out.push(format!("jobs = {}", self.jobs));
        if let Some(o) = &self.out {
            out.push(format!("out = {o}"));
        }
        out.push(format!("rearrange.t_samples = {}", self.rearrange_t_samples));
        out.push(format!("rearrange.lambda_samples = {}", self.rearrange_lambda_samples));
        match &self.rearrange_source {
            RearrangeSource::Minimizer => out.push("rearrange.source = minimizer".into()),
            RearrangeSource::Random => out.push("rearrange.source = random".into()),
            RearrangeSource::File(p) => {
                out.push("rearrange.source = file".into());
                out.push(format!("rearrange.input = {p}"));
            }
        }
        out.push(format!(
            "sweep.variable = {}",
            match self.sweep_variable {
                SweepVariable::L => "L",
                SweepVariable::M => "m",
            }
        ));
        out.push(format!("sweep.values = {}", list(&self.sweep_values)));
        out.push(format!("eigen.mesh = {}", self.eigen_mesh));
        out.push(format!("bounds.lengths = {}", list(&self.bounds_lengths)));
        let mut s = out.join("\n");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_round_trip() {
        let c = ExperimentConfig::parse("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        let text = "task = sweep # trailing\nproblem.L = 2\nproblem.m = 0.05\n\
                    problem.a.family = exp_quadratic\nproblem.a.alpha = 1.5\n\
                    problem.b.family = power_abs\nproblem.b.beta = -2\nproblem.b.delta = 1\n\
                    presets = plus_one, random\nsweep.values = 2, sqrt(8), 3\nseed = 7\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.task, Task::Sweep);
        assert_eq!(c.a, WeightFamily::ExpQuadratic { alpha: 1.5 });
        assert_eq!(c.sweep_values[1], 8f64.sqrt());
        assert_eq!(c.presets, vec![Preset::PlusOne, Preset::Random]);
        let back = ExperimentConfig::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert!(c.problem().is_ok());
    }

    #[test]
    fn errors_carry_line_and_key() {
        let e = ExperimentConfig::parse("task = audit\nproblem.x = 1\n").unwrap_err();
        assert!(e.to_string().contains("line 2") && e.to_string().contains("problem.x"));
        let e = ExperimentConfig::parse("mesh = 10\nmesh = 12\n").unwrap_err();
        assert!(e.to_string().contains("duplicate of line 1"));
        let e = ExperimentConfig::parse("problem.a.alpha = 2\n").unwrap_err();
        assert!(e.to_string().contains("not a parameter of family constant"));
        let e = ExperimentConfig::parse("\nproblem.L = two\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
        let e = ExperimentConfig::parse("task = dance\n").unwrap_err();
        assert!(e.to_string().contains("unknown task"));
        let e = ExperimentConfig::parse("no equals sign\n").unwrap_err();
        assert!(e.to_string().contains("line 1"));
        assert!(ExperimentConfig::parse("task = sweep\n").is_err());
    }
}
