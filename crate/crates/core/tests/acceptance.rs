//! Twelve acceptance criteria; each test prints one `PASS`/`FAIL` line.

use std::io::Write;
use std::time::Instant;

use oddsym_core::bounds::{bound_report, linear_energy_min, symmetry_breaking_criterion};
use oddsym_core::eigen::{anna_lower_bound, lambda1, uniqueness_certificate};
use oddsym_core::experiment::{execute, load_config, preset_catalog, write_artifacts, RunStatus};
use oddsym_core::config::ExperimentConfig;
use oddsym_core::rearrange::{verify_rearrangement_with, MonotoneGrid};
use oddsym_core::solve1d::{
    energy, energy_gradient, hamiltonian_trace, minimize, multi_start_uniqueness, Init,
    MinimizeOptions, Preset, CLUSTER_THRESHOLD,
};
use oddsym_core::tridiag::SymTridiag;
use oddsym_core::{GridFunction, Mesh, Potential, Problem, WeightFamily, WeightFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

type Outcome = Result<String, String>;

fn criterion(n: u32, name: &str, f: impl FnOnce() -> Outcome) {
    let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|_| Err("panicked".into()));
    let line = match &r {
        Ok(d) => format!("criterion {n:>2} PASS  {name}: {d}"),
        Err(d) => format!("criterion {n:>2} FAIL  {name}: {d}"),
    };
    let _ = writeln!(std::io::stdout().lock(), "{line}");
    assert!(r.is_ok(), "{line}");
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn family(a: WeightFamily, b: WeightFamily, l: f64, m: f64) -> Problem {
    Problem::from_families(l, m, a, b, Potential::quartic(1.0).unwrap()).unwrap()
}

fn expquad(l: f64, m: f64) -> Problem {
    family(
        WeightFamily::ExpQuadratic { alpha: 1.0 },
        WeightFamily::ExpQuadratic { alpha: 1.0 },
        l,
        m,
    )
}

#[test]
fn c01_heteroclinic_energy() {
    criterion(1, "heteroclinic energy", || {
        let p = Problem::allen_cahn(20.0, 1.0).unwrap();
        let t = Instant::now();
        let s = minimize(&p, &Init::Preset(Preset::OddTanh), 4096, &MinimizeOptions::default())
            .map_err(|e| e.to_string())?;
        let secs = t.elapsed().as_secs_f64();
        let exact = 2.0 * 2f64.sqrt() / 3.0;
        let err = (s.energy - exact).abs();
        check(err <= 1e-3 && secs < 5.0, format!("E = {:.9}, |E - 2sqrt2/3| = {err:.2e}, {secs:.2} s", s.energy))
    });
}

fn random_grids(seed: u64, count: usize) -> Vec<MonotoneGrid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| MonotoneGrid::random_smooth(1.0, 1.0, 1024, rng.random()).unwrap())
        .collect()
}

#[test]
fn c02_rearrangement_inequality() {
    criterion(2, "rearrangement inequality", || {
        let p = expquad(1.0, 1.0);
        let t = Instant::now();
        let reps: Vec<_> = random_grids(2, 50)
            .par_iter()
            .map(|v| verify_rearrangement_with(v, &p, 2049, 101))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let secs = t.elapsed().as_secs_f64();
        let excess = reps
            .iter()
            .map(|r| r.max_kinetic_excess / r.kinetic_at_one)
            .fold(0.0, f64::max);
        let convex = reps
            .iter()
            .map(|r| r.energy_min_second_difference / r.kinetic_at_one)
            .fold(f64::INFINITY, f64::min);
        check(
            excess <= 1e-8 && convex >= -1e-8 && secs < 10.0,
            format!("max (h(t)-h(1))/h(1) = {excess:.2e}, min d2E/h(1) = {convex:.2e}, {secs:.2} s"),
        )
    });
}

#[test]
fn c03_equidistribution() {
    criterion(3, "equidistribution", || {
        let grids = random_grids(3, 50);
        let mut worst: f64 = 0.0;
        for b in [WeightFamily::Constant { c: 1.0 }, WeightFamily::ExpQuadratic { alpha: 1.0 }] {
            let p = family(WeightFamily::ExpQuadratic { alpha: 1.0 }, b, 1.0, 1.0);
            let spread = grids
                .par_iter()
                .map(|v| verify_rearrangement_with(v, &p, 2049, 101).map(|r| r.potential_spread))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            worst = spread.into_iter().fold(worst, f64::max);
        }
        check(worst <= 1e-6, format!("max relative spread of int G(v^t) b = {worst:.2e}"))
    });
}

#[test]
fn c04_oddness_in_uniqueness_regime() {
    criterion(4, "oddness in the uniqueness regime", || {
        let p = expquad(1.0, 1.0);
        let r = multi_start_uniqueness(&p, &Preset::ALL, 1024, 0).map_err(|e| e.to_string())?;
        let sols: Vec<_> = r.solutions.iter().flatten().collect();
        let odd = sols.iter().map(|s| s.diagnostics.oddness_defect).fold(0.0, f64::max);
        let inc = sols.iter().all(|s| s.diagnostics.is_increasing);
        check(
            sols.len() == 6 && r.distinct_solutions == 1 && odd <= 1e-6 && inc,
            format!("{} converged, {} cluster(s), max oddness defect {odd:.1e}, increasing {inc}", sols.len(), r.distinct_solutions),
        )
    });
}

#[test]
fn c05_symmetry_breaking_onset() {
    criterion(5, "symmetry-breaking onset", || {
        for l in [1.0, 2.0, 2.5, 2.82, 8f64.sqrt(), 2.83, 3.0, 5.0, 10.0] {
            let s = symmetry_breaking_criterion(&Problem::allen_cahn(l, 1.0).unwrap())
                .map_err(|e| e.to_string())?;
            if s.certified != (l * l / 4.0 > 2.0) {
                return Err(format!("L = {l}: certified {} but L^2/4 = {}", s.certified, l * l / 4.0));
            }
        }
        let p = Problem::allen_cahn(10.0, 0.05).unwrap();
        let s = minimize(&p, &Init::Preset(Preset::PlusOne), 2048, &MinimizeOptions::default())
            .map_err(|e| e.to_string())?;
        let u0 = s.diagnostics.u_at_zero;
        let f = s.u.flipped();
        let gap = s.u.sup_distance(&f);
        let de = (energy(&p, &f).map_err(|e| e.to_string())? - s.energy).abs();
        check(
            u0.abs() > 0.05 && !s.diagnostics.is_increasing && gap > CLUSTER_THRESHOLD && de <= 1e-9,
            format!("certified iff L > 2sqrt2; L = 10, m = 0.05: u(0) = {u0:.6}, |u - u*| = {gap:.3}, |E(u*) - E(u)| = {de:.1e}"),
        )
    });
}

#[test]
fn c06_bound_sandwich() {
    criterion(6, "bound sandwich", || {
        let p = Problem::allen_cahn(10.0, 1.0).unwrap();
        let br = bound_report(&p);
        let cas = br.c_as.as_ref().ok_or("no C^as")?.value;
        let exact = 3.0 / (4.0 * 2f64.sqrt());
        let up = br.upper_bound.value;
        let s = minimize(&p, &Init::Preset(Preset::OddTanh), 2048, &MinimizeOptions::default())
            .map_err(|e| e.to_string())?;
        check(
            (cas - exact).abs() <= 1e-6 && up <= 2.5 && s.energy > 0.0 && s.energy <= up,
            format!("C^as = {cas:.9} (|.-3/(4sqrt2)| = {:.1e}), min upper = {up:.6}, E = {:.6}", (cas - exact).abs(), s.energy),
        )
    });
}

#[test]
fn c07_hamiltonian_identity() {
    criterion(7, "Hamiltonian identity", || {
        let mut out = Vec::new();
        for p in [Problem::allen_cahn(10.0, 1.0).unwrap(), expquad(1.0, 1.0)] {
            let mut drift = Vec::new();
            for n in [512, 1024, 2048] {
                let s = minimize(&p, &Init::Preset(Preset::OddTanh), n, &MinimizeOptions::default())
                    .map_err(|e| e.to_string())?;
                drift.push(hamiltonian_trace(&p, &s).map_err(|e| e.to_string())?.max_drift);
            }
            let orders: Vec<f64> = drift.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
            out.push((drift, orders));
        }
        let ok = out.iter().all(|(_, o)| o.iter().all(|&x| x >= 0.9));
        let msg = out
            .iter()
            .map(|(d, o)| format!("drift {:.2e} -> {:.2e}, orders {:.2}/{:.2}", d[0], d[2], o[0], o[1]))
            .collect::<Vec<_>>()
            .join("; ");
        check(ok, msg)
    });
}

#[test]
fn c08_eigenvalue_oracle() {
    criterion(8, "eigenvalue oracle", || {
        let p = Problem::allen_cahn(1.0, 1.0).unwrap();
        let r = lambda1(&p, 512).map_err(|e| e.to_string())?;
        let exact = std::f64::consts::PI.powi(2) / 4.0;
        let err = (r.lambda1 - exact).abs();
        let m_ok = (r.muckenhoupt_m - 0.5).abs() <= 1e-6;
        let q = expquad(1.0, 1.0);
        let anna = anna_lower_bound(&q).map_err(|e| e.to_string())?.value;
        let lq = lambda1(&q, 512).map_err(|e| e.to_string())?.lambda1;
        check(
            err <= 1e-4 && m_ok && r.in_bracket && anna == 1.0 && lq >= 1.0,
            format!(
                "lambda1 = {:.8} (err {err:.1e}), M = {:.6}, bracket [{:.4}, {:.4}], anna = {anna}, lambda1(expquad) = {lq:.6}",
                r.lambda1, r.muckenhoupt_m, r.bracket.0, r.bracket.1
            ),
        )
    });
}

#[test]
fn c09_certificate_soundness() {
    criterion(9, "certificate soundness", || {
        let mut certified = Vec::new();
        for (name, text) in preset_catalog() {
            let cfg = ExperimentConfig::parse(text).map_err(|e| e.to_string())?;
            if cfg.task == oddsym_core::config::Task::Sweep {
                continue;
            }
            let p = cfg.problem().map_err(|e| e.to_string())?;
            let Ok(c) = uniqueness_certificate(&p) else { continue };
            if !c.certified {
                continue;
            }
            let r = multi_start_uniqueness(&p, &Preset::ALL, cfg.mesh, cfg.seed).map_err(|e| e.to_string())?;
            let odd = r.solutions.iter().flatten().map(|s| s.diagnostics.oddness_defect).fold(0.0, f64::max);
            if r.distinct_solutions != 1 || odd > 1e-6 {
                return Err(format!("{name}: {} clusters, oddness {odd:.1e}", r.distinct_solutions));
            }
            certified.push(name);
        }
        check(!certified.is_empty(), format!("one cluster on every certified preset: {}", certified.join(", ")))
    });
}

/// P1 minimizer of `int a v'^2` with Gauss-2 element conductances.
fn fe_linear_min(a: &WeightFn, lo: f64, hi: f64, m1: f64, m2: f64, n: usize) -> (f64, Vec<f64>) {
    let h = (hi - lo) / n as f64;
    let g = 0.5 / 3f64.sqrt();
    let k: Vec<f64> = (0..n)
        .map(|e| {
            let c = lo + (e as f64 + 0.5) * h;
            0.5 * (a.eval(c - g * h) + a.eval(c + g * h)) / h
        })
        .collect();
    let diag: Vec<f64> = (1..n).map(|i| k[i - 1] + k[i]).collect();
    let off: Vec<f64> = (1..n - 1).map(|i| -k[i]).collect();
    let mut rhs = vec![0.0; n - 1];
    rhs[0] += k[0] * m1;
    rhs[n - 2] += k[n - 1] * m2;
    let inner = SymTridiag::new(diag, off).unwrap().solve(&rhs).unwrap();
    let mut v = vec![m1];
    v.extend(inner);
    v.push(m2);
    let e = (0..n).map(|i| k[i] * (v[i + 1] - v[i]).powi(2)).sum();
    (e, v)
}

#[test]
fn c10_linear_minimum() {
    criterion(10, "linear minimization closed form", || {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (mut worst_e, mut worst_u): (f64, f64) = (0.0, 0.0);
        for _ in 0..20 {
            let fam = match rng.random_range(0..4) {
                0 => WeightFamily::Constant { c: rng.random_range(0.2..3.0) },
                1 => WeightFamily::ExpQuadratic { alpha: rng.random_range(-1.0..1.0) },
                2 => WeightFamily::PowerAbs { beta: rng.random_range(-2.0..2.0), delta: rng.random_range(0.3..2.0) },
                _ => WeightFamily::Polynomial { coeffs: vec![1.0, 0.0, rng.random_range(0.0..1.0)] },
            };
            let a = WeightFn::new(fam, 2.0).unwrap();
            let lo = rng.random_range(-2.0..1.0);
            let hi = rng.random_range(lo + 0.2..2.0f64.max(lo + 0.3)).min(2.0);
            let (m1, m2) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let n = 4000;
            let exact = linear_energy_min(&a, (lo, hi), m1, m2, n).map_err(|e| e.to_string())?;
            let (e, v) = fe_linear_min(&a, lo, hi, m1, m2, n);
            worst_e = worst_e.max((e - exact.value).abs() / exact.value.max(1e-300));
            let scale = (m2 - m1).abs().max(1e-300);
            for (x, y) in v.iter().zip(&exact.minimizer) {
                worst_u = worst_u.max((x - y).abs() / scale);
            }
        }
        check(worst_e <= 1e-6 && worst_u <= 1e-6, format!("max relative energy gap {worst_e:.1e}, max pointwise gap {worst_u:.1e}"))
    });
}

#[test]
fn c11_gradient_correctness() {
    criterion(11, "gradient correctness", || {
        let instances = [
            Problem::allen_cahn(1.0, 1.0).unwrap(),
            expquad(1.0, 1.0),
            family(WeightFamily::Constant { c: 1.0 }, WeightFamily::PowerAbs { beta: -2.0, delta: 1.0 }, 3.0, 1.0),
            family(WeightFamily::PowerAbs { beta: 2.0, delta: 0.1 }, WeightFamily::PowerAbs { beta: 2.0, delta: 0.1 }, 0.5, 0.7),
            family(WeightFamily::Polynomial { coeffs: vec![1.0, 0.0, 0.5] }, WeightFamily::ExpQuadratic { alpha: -0.5 }, 2.0, 0.3),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        for p in &instances {
            let n = 200;
            let mesh = Mesh::new(p.half_width(), n).unwrap();
            let mut vals: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.2..1.2)).collect();
            vals[0] = -p.m();
            vals[n] = p.m();
            let u = GridFunction::new(mesh.clone(), vals).unwrap();
            let g = energy_gradient(p, &u).unwrap();
            for _ in 0..32 {
                let d: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
                let analytic: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
                let shifted = |s: f64| {
                    let mut v = u.values.clone();
                    for i in 1..n {
                        v[i] += s * d[i - 1];
                    }
                    energy(p, &GridFunction::new(mesh.clone(), v).unwrap()).unwrap()
                };
                let eps = 1e-5;
                let fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
                worst = worst.max((fd - analytic).abs() / analytic.abs().max(1e-8));
            }
        }
        check(worst <= 1e-6, format!("max relative error over 5 x 32 directions {worst:.1e}"))
    });
}

fn hashed_csvs(dir: &std::path::Path) -> Vec<(String, String)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            let h = Sha256::digest(std::fs::read(&p).unwrap());
            let hex: String = h.iter().map(|b| format!("{b:02x}")).collect();
            (p.file_name().unwrap().to_string_lossy().into_owned(), hex)
        })
        .collect();
    v.sort();
    v
}

#[test]
fn c12_determinism() {
    criterion(12, "determinism", || {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut runs = Vec::new();
        for k in 0..2 {
            let mut cfg = load_config("thm1_2_expquad").map_err(|e| e.to_string())?;
            cfg.seed = 7;
            cfg.jobs = 1 + 3 * k;
            let out = execute(&cfg);
            if out.status != RunStatus::Success {
                return Err(format!("run failed: {:?}", out.message));
            }
            let dir = tmp.path().join(format!("run{k}"));
            write_artifacts(&dir, &out).map_err(|e| e.to_string())?;
            runs.push(hashed_csvs(&dir));
        }
        check(
            runs[0] == runs[1] && runs[0].len() >= 2,
            format!(
                "{}",
                runs[0].iter().map(|(n, h)| format!("{n} {}", &h[..16])).collect::<Vec<_>>().join(", ")
            ),
        )
    });
}
