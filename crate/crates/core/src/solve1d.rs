//! Critical points and minimizers of the weighted energy: P1 finite elements
//! with damped Newton, and RK4 shooting. Also the Hamiltonian trace and the
//! shape diagnostics of converged solutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LastIterate, OddsymError, Result};
use crate::mesh::{GridFunction, Mesh};
use crate::quad::GAUSS2_ABSCISSA;
use crate::tridiag::SymTridiag;
use crate::weights::{check_hypotheses_lenient, sample_grid, Problem, DEFAULT_GRID};

/// Nodal basis values at the two Gauss points of the reference element.
const C_NEAR: f64 = 0.5 * (1.0 + GAUSS2_ABSCISSA);
const C_FAR: f64 = 0.5 * (1.0 - GAUSS2_ABSCISSA);

/// Sup-norm threshold under which two solutions count as the same.
pub const CLUSTER_THRESHOLD: f64 = 1e-4;

/// Problem data cached at the Gauss points of a mesh.
#[derive(Debug, Clone)]
pub struct Discretization<'a> {
    pub problem: &'a Problem,
    pub mesh: Mesh,
    /// `int_e a / h^2`.
    kin: Vec<f64>,
    /// `(h/2) b` at both Gauss points.
    wb: Vec<[f64; 2]>,
}

impl<'a> Discretization<'a> {
    pub fn new(problem: &'a Problem, n: usize) -> Result<Self> {
        let mesh = Mesh::new(problem.half_width(), n)?;
        let h = mesh.h();
        let mut kin = Vec::with_capacity(n);
        let mut wb = Vec::with_capacity(n);
        for e in 0..n {
            let [g1, g2] = mesh.gauss_points(e);
            let (a, b) = (problem.a(), problem.b());
            kin.push(0.5 * h * (a.eval(g1) + a.eval(g2)) / (h * h));
            wb.push([0.5 * h * b.eval(g1), 0.5 * h * b.eval(g2)]);
        }
        Ok(Discretization {
            problem,
            mesh,
            kin,
            wb,
        })
    }

    pub fn n(&self) -> usize {
        self.mesh.n
    }

    #[inline]
    fn gauss_values(u: &[f64], e: usize) -> [f64; 2] {
        [
            C_NEAR * u[e] + C_FAR * u[e + 1],
            C_FAR * u[e] + C_NEAR * u[e + 1],
        ]
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        let g = self.problem.potential();
        let mut total = 0.0;
        for e in 0..self.n() {
            let du = u[e + 1] - u[e];
            let [q1, q2] = Self::gauss_values(u, e);
            total += 0.5 * self.kin[e] * du * du
                + self.wb[e][0] * g.eval(q1)
                + self.wb[e][1] * g.eval(q2);
        }
        total
    }

    /// Gradient with respect to all `n + 1` nodal values.
    pub fn gradient_full(&self, u: &[f64]) -> Vec<f64> {
        let g = self.problem.potential();
        let mut grad = vec![0.0; self.n() + 1];
        for e in 0..self.n() {
            let du = u[e + 1] - u[e];
            let [q1, q2] = Self::gauss_values(u, e);
            let (d1, d2) = (self.wb[e][0] * g.d1(q1), self.wb[e][1] * g.d1(q2));
            let k = self.kin[e] * du;
            grad[e] += -k + (C_NEAR * d1 + C_FAR * d2);
            grad[e + 1] += k + (C_FAR * d1 + C_NEAR * d2);
        }
        grad
    }

    /// Gradient restricted to interior nodes `1..n`.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let full = self.gradient_full(u);
        full[1..self.n()].to_vec()
    }

    /// Hessian on the interior nodes.
    pub fn hessian(&self, u: &[f64]) -> SymTridiag {
        let n = self.n();
        let g = self.problem.potential();
        let mut diag = vec![0.0; n + 1];
        let mut off = vec![0.0; n];
        for e in 0..n {
            let [q1, q2] = Self::gauss_values(u, e);
            let (s1, s2) = (self.wb[e][0] * g.d2(q1), self.wb[e][1] * g.d2(q2));
            diag[e] += self.kin[e] + (C_NEAR * C_NEAR * s1 + C_FAR * C_FAR * s2);
            diag[e + 1] += self.kin[e] + (C_FAR * C_FAR * s1 + C_NEAR * C_NEAR * s2);
            off[e] += -self.kin[e] + C_NEAR * C_FAR * (s1 + s2);
        }
        SymTridiag {
            diag: diag[1..n].to_vec(),
            off: off[1..n - 1].to_vec(),
        }
    }

    /// Kinetic part of the Hessian, positive definite.
    pub fn stiffness(&self) -> SymTridiag {
        let n = self.n();
        SymTridiag {
            diag: (1..n).map(|i| self.kin[i - 1] + self.kin[i]).collect(),
            off: (1..n - 1).map(|i| -self.kin[i]).collect(),
        }
    }

    /// `max_i |grad_i| / h`, the strong-form residual at interior nodes.
    pub fn residual_inf(&self, u: &[f64]) -> f64 {
        let h = self.mesh.h();
        self.gradient(u).iter().fold(0.0f64, |m, g| m.max(g.abs())) / h
    }

    /// `max(1, max |b f(u)|)` at the nodes.
    pub fn residual_scale(&self, u: &[f64]) -> f64 {
        let (b, g) = (self.problem.b(), self.problem.potential());
        (0..=self.n())
            .map(|i| (b.eval(self.mesh.node(i)) * g.f(u[i])).abs())
            .fold(1.0, f64::max)
    }
}

/// `int 1/2 (u')^2 a + G(u) b` with two-point Gauss per element.
pub fn energy(p: &Problem, u: &GridFunction) -> Result<f64> {
    if u.mesh.half_width != p.half_width() {
        return Err(OddsymError::InvalidInput(
            "grid function mesh does not match the problem".into(),
        ));
    }
    Ok(Discretization::new(p, u.n())?.energy(&u.values))
}

/// Nodal gradient of [`energy`] at interior nodes.
pub fn energy_gradient(p: &Problem, u: &GridFunction) -> Result<Vec<f64>> {
    Ok(Discretization::new(p, u.n())?.gradient(&u.values))
}

/// Initial guesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Linear,
    OddTanh,
    PlusOne,
    MinusOne,
    Zero,
    Random,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Linear,
        Preset::OddTanh,
        Preset::PlusOne,
        Preset::MinusOne,
        Preset::Zero,
        Preset::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Linear => "linear",
            Preset::OddTanh => "odd_tanh",
            Preset::PlusOne => "plus_one",
            Preset::MinusOne => "minus_one",
            Preset::Zero => "zero",
            Preset::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Preset::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| OddsymError::InvalidInput(format!("unknown preset '{s}'")))
    }

    /// Nodal values pinned to `-m`, `m`. `plus_one` and `minus_one` fill the
    /// interior with `+M`, `-M` (the wells); `random` draws uniformly from
    /// `[-max(m, M), max(m, M)]`.
    pub fn build(self, p: &Problem, n: usize, seed: u64) -> Result<GridFunction> {
        let mesh = Mesh::new(p.half_width(), n)?;
        let (l, m, well) = (p.half_width(), p.m(), p.potential().well());
        let mut u = match self {
            Preset::Linear => GridFunction::from_fn(mesh, |x| m * x / l),
            Preset::OddTanh => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                GridFunction::from_fn(mesh, |x| m * (x * r).tanh() / (l * r).tanh())
            }
            Preset::PlusOne => GridFunction::pinned_constant(mesh, m, well),
            Preset::MinusOne => GridFunction::pinned_constant(mesh, m, -well),
            Preset::Zero => GridFunction::pinned_constant(mesh, m, 0.0),
            Preset::Random => {
                let amp = m.max(well);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut g = GridFunction::pinned_constant(mesh, m, 0.0);
                for v in g.values.iter_mut().take(n).skip(1) {
                    *v = rng.random_range(-amp..=amp);
                }
                g
            }
        };
        u.values[0] = -m;
        u.values[n] = m;
        Ok(u)
    }
}

#[derive(Debug, Clone)]
pub enum Init {
    Grid(GridFunction),
    Preset(Preset),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub max_newton: usize,
    pub max_gradient: usize,
    /// Converged when `residual_inf <= tol_factor * max(1, |b f(u)|_inf)`.
    pub tol_factor: f64,
    /// Leave saddle points along the lowest Hessian eigenvector.
    pub escape_saddles: bool,
    pub spot_check: bool,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_newton: 500,
            max_gradient: 10_000,
            tol_factor: 1e-9,
            escape_saddles: true,
            spot_check: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianSample {
    pub x: f64,
    pub value: f64,
    pub drift: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeDiagnostics {
    pub is_increasing: bool,
    pub zero_count: usize,
    pub zero_location: Option<f64>,
    pub oddness_defect: f64,
    pub derivative_at_zero: f64,
    pub u_at_zero: f64,
    pub max_abs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Solution {
    pub u: GridFunction,
    pub energy: f64,
    pub residual_inf: f64,
    pub tolerance: f64,
    pub hamiltonian_trace: Vec<HamiltonianSample>,
    pub diagnostics: ShapeDiagnostics,
    pub method: String,
    pub newton_steps: usize,
    pub gradient_steps: usize,
    pub saddle_escapes: usize,
    /// Negative eigenvalues of the discrete Hessian at the solution.
    pub hessian_negative: usize,
    pub local_min_spot_check: Option<bool>,
}

/// Eigenvalues above `-roundoff_shift` are treated as nonnegative: near
/// translation-invariant solutions the smallest one is below roundoff.
fn roundoff_shift(h: &SymTridiag) -> f64 {
    1e-12 * h.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()))
}

/// Negative eigenvalues of the Hessian beyond roundoff.
pub fn negative_count(h: &SymTridiag) -> usize {
    h.count_below(-roundoff_shift(h))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy_interior(u: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    let mut v = u.to_vec();
    for (i, di) in d.iter().enumerate() {
        v[i + 1] += t * di;
    }
    v
}

/// `-P S^{-1} P g(w)` with `P` projecting out the unit vector `v`.
fn soft_corrector(disc: &Discretization, s: &SymTridiag, v: &[f64], w: &[f64]) -> Option<Vec<f64>> {
    let project = |x: &mut Vec<f64>| {
        let c = dot(x, v);
        x.iter_mut().zip(v).for_each(|(xi, vi)| *xi -= c * vi);
    };
    let mut g = disc.gradient(w);
    project(&mut g);
    g.iter_mut().for_each(|x| *x = -*x);
    let mut c = s.solve_twisted(&g).ok()?;
    project(&mut c);
    Some(c)
}

/// Local minimization of the discrete energy from `init` on an `n`-element mesh.
pub fn minimize(p: &Problem, init: &Init, n: usize, opts: &MinimizeOptions) -> Result<Solution> {
    if n < 64 {
        return Err(OddsymError::InvalidInput(format!(
            "mesh must have n >= 64 elements, got {n}"
        )));
    }
    let disc = Discretization::new(p, n)?;
    let mut u = match init {
        Init::Grid(g) => {
            if g.n() != n || g.mesh.half_width != p.half_width() {
                return Err(OddsymError::InvalidInput(
                    "initial grid does not match the mesh".into(),
                ));
            }
            let mut v = g.values.clone();
            v[0] = -p.m();
            v[n] = p.m();
            v
        }
        Init::Preset(pr) => pr.build(p, n, opts.seed)?.values,
    };
    let stiff = disc.stiffness();
    let mut newton_steps = 0;
    let mut gradient_steps = 0;
    let mut escapes = 0;
    loop {
        descend(
            &disc,
            &stiff,
            &mut u,
            opts,
            &mut newton_steps,
            &mut gradient_steps,
        )?;
        let hess = disc.hessian(&u);
        let negative = negative_count(&hess);
        if negative == 0 || !opts.escape_saddles || escapes >= 8 {
            break;
        }
        let (_, mut v) = hess.lowest_eigenpair()?;
        let k = (0..v.len())
            .max_by(|&i, &j| v[i].abs().partial_cmp(&v[j].abs()).unwrap())
            .unwrap_or(0);
        let norm = v[k];
        v.iter_mut().for_each(|x| *x /= norm);
        let e0 = disc.energy(&u);
        let amp = p.m().max(p.potential().well());
        let mut moved = false;
        for scale in [0.1, 0.01, 1e-3, 1e-4] {
            let plus = axpy_interior(&u, scale * amp, &v);
            let minus = axpy_interior(&u, -scale * amp, &v);
            let (ep, em) = (disc.energy(&plus), disc.energy(&minus));
            if ep.min(em) < e0 {
                u = if ep <= em { plus } else { minus };
                moved = true;
                break;
            }
        }
        escapes += 1;
        if !moved {
            break;
        }
    }
    let residual = disc.residual_inf(&u);
    let tol = opts.tol_factor * disc.residual_scale(&u);
    let hess = disc.hessian(&u);
    let spot = if opts.spot_check {
        Some(spot_check_local_min(&disc, &u, opts.seed ^ 0x5eed))
    } else {
        None
    };
    let g = GridFunction::new(disc.mesh, u)?;
    let energy = disc.energy(&g.values);
    let trace = hamiltonian_samples(p, &g);
    let diagnostics = shape_diagnostics_of(&g, p.m());
    Ok(Solution {
        u: g,
        energy,
        residual_inf: residual,
        tolerance: tol,
        hamiltonian_trace: trace,
        diagnostics,
        method: "newton".into(),
        newton_steps,
        gradient_steps,
        saddle_escapes: escapes,
        hessian_negative: negative_count(&hess),
        local_min_spot_check: spot,
    })
}

fn descend(
    disc: &Discretization,
    stiff: &SymTridiag,
    u: &mut Vec<f64>,
    opts: &MinimizeOptions,
    newton_steps: &mut usize,
    gradient_steps: &mut usize,
) -> Result<()> {
    let h = disc.mesh.h();
    let mut e = disc.energy(u);
    let mut grad = disc.gradient(u);
    // Previous preconditioned-gradient step, for Barzilai-Borwein.
    let mut bb_prev: Option<(Vec<f64>, Vec<f64>)> = None;
    loop {
        let residual = max_abs(&grad) / h;
        let tol = opts.tol_factor * disc.residual_scale(u);
        if residual <= tol {
            return Ok(());
        }
        if *newton_steps >= opts.max_newton && *gradient_steps >= opts.max_gradient {
            return Err(OddsymError::NoConvergence {
                iterations: *newton_steps + *gradient_steps,
                residual,
                last: LastIterate(u.clone()),
            });
        }
        let hess = disc.hessian(u);
        let gnorm = max_abs(&grad);
        if *newton_steps < opts.max_newton {
            *newton_steps += 1;
            // Indefinite Hessians get a Levenberg shift past the lowest eigenvalue.
            let sigma = if negative_count(&hess) == 0 {
                0.0
            } else {
                let (lambda, _) = hess.lowest_eigenpair()?;
                2.0 * (-lambda).max(0.0) + roundoff_shift(&hess)
            };
            let mut shifted = hess.clone();
            shifted.diag.iter_mut().for_each(|d| *d += sigma);
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            if let Ok(d) = shifted.solve_twisted(&neg) {
                let slope = dot(&grad, &d);
                let mut soft: Option<Vec<f64>> = None;
                let mut t = 1.0;
                let mut accepted = false;
                for _ in 0..60 {
                    let mut trial = axpy_interior(u, t, &d);
                    let mut et = disc.energy(&trial);
                    if !(et <= e + 1e-4 * t * slope) {
                        // A soft mode bends the descent path; correct the stiff
                        // modes at fixed soft coordinate.
                        if soft.is_none() {
                            soft = shifted.lowest_eigenpair().ok().map(|(_, v)| v);
                        }
                        if let Some(v) = &soft {
                            if let Some(c) = soft_corrector(disc, &shifted, v, &trial) {
                                let tc = axpy_interior(&trial, 1.0, &c);
                                let ec = disc.energy(&tc);
                                if ec < et {
                                    trial = tc;
                                    et = ec;
                                }
                            }
                        }
                    }
                    if et <= e + 1e-4 * t * slope {
                        *u = trial;
                        accepted = true;
                        break;
                    }
                    // Roundoff regime: accept if the gradient shrinks.
                    if et <= e + 1e-13 * e.abs().max(1.0) {
                        let gt = disc.gradient(&trial);
                        if max_abs(&gt) < gnorm {
                            *u = trial;
                            accepted = true;
                            break;
                        }
                    }
                    t *= 0.5;
                }
                if accepted {
                    bb_prev = None;
                    e = disc.energy(u);
                    grad = disc.gradient(u);
                    continue;
                }
            }
        }
        if *gradient_steps >= opts.max_gradient {
            return Err(OddsymError::NoConvergence {
                iterations: *newton_steps + *gradient_steps,
                residual,
                last: LastIterate(u.clone()),
            });
        }
        *gradient_steps += 1;
        // Steepest descent in the H^1 metric of the stiffness matrix.
        let pg = stiff.solve_twisted(&grad)?;
        let d: Vec<f64> = pg.iter().map(|g| -g).collect();
        let mut t = match &bb_prev {
            Some((s, y)) => {
                let sy = dot(s, y);
                let sks = dot(s, &stiff.matvec(s));
                if sy > 0.0 {
                    sks / sy
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        let slope = dot(&grad, &d);
        let mut accepted = None;
        for _ in 0..60 {
            let trial = axpy_interior(u, t, &d);
            let et = disc.energy(&trial);
            if et <= e + 1e-4 * t * slope {
                accepted = Some(trial);
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some(trial) => {
                let ng = disc.gradient(&trial);
                let s: Vec<f64> = d.iter().map(|x| t * x).collect();
                let y: Vec<f64> = ng.iter().zip(&grad).map(|(a, b)| a - b).collect();
                bb_prev = Some((s, y));
                *u = trial;
            }
            None => {
                return Err(OddsymError::NoConvergence {
                    iterations: *newton_steps + *gradient_steps,
                    residual,
                    last: LastIterate(u.clone()),
                })
            }
        }
        e = disc.energy(u);
        grad = disc.gradient(u);
    }
}

fn spot_check_local_min(disc: &Discretization, u: &[f64], seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e0 = disc.energy(u);
    let slack = 1e-12 * e0.abs().max(1.0);
    (0..16).all(|_| {
        let d: Vec<f64> = (1..disc.n())
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        let trial = axpy_interior(u, 1e-6, &d);
        disc.energy(&trial) >= e0 - slack
    })
}

/// CSV `x,u,uprime,hamiltonian` at the nodes, `u'` by centered differences
/// (one-sided at the ends).
pub fn solution_csv(p: &Problem, u: &GridFunction) -> String {
    let mesh = u.mesh;
    let (n, h) = (mesh.n, mesh.h());
    let v = &u.values;
    let (a, b, g) = (p.a(), p.b(), p.potential());
    let mut s = String::from("x,u,uprime,hamiltonian\n");
    for i in 0..=n {
        let x = mesh.node(i);
        let up = if i == 0 {
            (v[1] - v[0]) / h
        } else if i == n {
            (v[n] - v[n - 1]) / h
        } else {
            (v[i + 1] - v[i - 1]) / (2.0 * h)
        };
        let av = a.eval(x);
        let ham = 0.5 * (av * up).powi(2) - av * b.eval(x) * g.eval(v[i]);
        s.push_str(&format!("{x:.16e},{:.16e},{up:.16e},{ham:.16e}\n", v[i]));
    }
    s
}

/// `H = 1/2 (a u')^2 - a b G(u)` at element midpoints, with the defect of
/// `dH/dx = -(ab)' G(u)` by centered differences.
pub fn hamiltonian_samples(p: &Problem, u: &GridFunction) -> Vec<HamiltonianSample> {
    let mesh = u.mesh;
    let n = mesh.n;
    let (a, b, g) = (p.a(), p.b(), p.potential());
    let mut xs = Vec::with_capacity(n);
    let mut hs = Vec::with_capacity(n);
    let mut gs = Vec::with_capacity(n);
    for e in 0..n {
        let x = 0.5 * (mesh.node(e) + mesh.node(e + 1));
        let up = u.slope(e);
        let uv = 0.5 * (u.values[e] + u.values[e + 1]);
        let av = a.eval(x);
        let ap = av * up;
        hs.push(0.5 * ap * ap - av * b.eval(x) * g.eval(uv));
        gs.push(g.eval(uv));
        xs.push(x);
    }
    let h = mesh.h();
    (0..n)
        .map(|e| {
            let dh = if n == 1 {
                0.0
            } else if e == 0 {
                (hs[1] - hs[0]) / h
            } else if e == n - 1 {
                (hs[n - 1] - hs[n - 2]) / h
            } else {
                (hs[e + 1] - hs[e - 1]) / (2.0 * h)
            };
            let x = xs[e];
            let abp = a.d1(x) * b.eval(x) + a.eval(x) * b.d1(x);
            HamiltonianSample {
                x,
                value: hs[e],
                drift: dh + abp * gs[e],
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianReport {
    pub samples: Vec<HamiltonianSample>,
    pub max_drift: f64,
    /// Interior max of the drift, away from the one-sided end samples.
    pub max_drift_interior: f64,
    pub split_point: Option<f64>,
    /// Whether the trace rises up to the split point and falls after it,
    /// within `10 h`; absent when the sign pattern of `(ab)'` or `G >= 0` fails.
    pub unimodal: Option<bool>,
    pub unimodal_violation: f64,
}

/// Hamiltonian trace along a converged solution.
pub fn hamiltonian_trace(p: &Problem, sol: &Solution) -> Result<HamiltonianReport> {
    let samples = hamiltonian_samples(p, &sol.u);
    let max_drift = samples.iter().fold(0.0f64, |m, s| m.max(s.drift.abs()));
    let k = samples.len();
    let max_drift_interior = samples[1..k - 1]
        .iter()
        .fold(0.0f64, |m, s| m.max(s.drift.abs()));
    let report = check_hypotheses_lenient(p, DEFAULT_GRID)?;
    let g = p.potential();
    let big_s = 3.0 * p.m().max(g.well());
    let g_nonneg = sample_grid(big_s, 4097)
        .iter()
        .all(|&s| g.eval(s) >= -1e-12);
    let h = sol.u.mesh.h();
    let (unimodal, violation) = match (report.muffin_x0, g_nonneg) {
        (Some(x0), true) => {
            let mut worst = 0.0f64;
            for w in samples.windows(2) {
                let dv = w[1].value - w[0].value;
                if w[1].x <= x0 {
                    worst = worst.max(-dv);
                } else if w[0].x >= x0 {
                    worst = worst.max(dv);
                }
            }
            (Some(worst <= 10.0 * h), worst)
        }
        _ => (None, 0.0),
    };
    Ok(HamiltonianReport {
        samples,
        max_drift,
        max_drift_interior,
        split_point: report.muffin_x0,
        unimodal,
        unimodal_violation: violation,
    })
}

fn shape_diagnostics_of(u: &GridFunction, m: f64) -> ShapeDiagnostics {
    let v = &u.values;
    let n = u.n();
    let ztol = 1e-10 * m.max(f64::MIN_POSITIVE);
    let is_increasing = v.windows(2).all(|w| w[1] - w[0] > -ztol);
    let sign = |x: f64| -> i8 {
        if x.abs() <= ztol {
            0
        } else if x > 0.0 {
            1
        } else {
            -1
        }
    };
    let mut zeros: Vec<f64> = Vec::new();
    let mut i = 0;
    let mut last_sign = 0i8;
    while i <= n {
        let s = sign(v[i]);
        if s == 0 {
            let start = i;
            while i <= n && sign(v[i]) == 0 {
                i += 1;
            }
            zeros.push(0.5 * (u.mesh.node(start) + u.mesh.node(i - 1)));
            last_sign = 0;
            continue;
        }
        if last_sign != 0 && s != last_sign {
            let (x0, x1) = (u.mesh.node(i - 1), u.mesh.node(i));
            let t = v[i - 1] / (v[i - 1] - v[i]);
            zeros.push(x0 + t * (x1 - x0));
        }
        last_sign = s;
        i += 1;
    }
    let zero_location = zeros
        .iter()
        .copied()
        .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    let h = u.mesh.h();
    let derivative_at_zero = if n % 2 == 0 && n >= 4 {
        let c = n / 2;
        let o1 = 0.5 * (v[c + 1] - v[c - 1]);
        let o2 = 0.5 * (v[c + 2] - v[c - 2]);
        (8.0 * o1 - o2) / (6.0 * h)
    } else {
        let x = 0.0;
        let e = (((x + u.mesh.half_width) / h).floor() as usize).min(n - 1);
        u.slope(e)
    };
    ShapeDiagnostics {
        is_increasing,
        zero_count: zeros.len(),
        zero_location,
        oddness_defect: u.oddness_defect(),
        derivative_at_zero,
        u_at_zero: u.eval(0.0),
        max_abs: max_abs(v),
    }
}

/// Shape of a converged solution.
pub fn shape_diagnostics(sol: &Solution) -> ShapeDiagnostics {
    let m = -sol.u.values[0];
    shape_diagnostics_of(&sol.u, m.max(sol.u.values[sol.u.n()]))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivativeComparison {
    /// `min_{0 < x <= L} (u*'(x) - u'(x))` over element midpoints.
    pub min_gap: f64,
    /// All hypotheses hold, so `min_gap > -1e-6` is binding.
    pub certified: bool,
    pub reason: Option<String>,
}

/// Compares the flipped derivative `u*'(x) = u'(-x)` with `u'(x)` on `(0, L]`.
pub fn derivative_comparison(p: &Problem, sol: &Solution) -> DerivativeComparison {
    let u = &sol.u;
    let n = u.n();
    let mut min_gap = f64::INFINITY;
    for e in 0..n {
        let x = 0.5 * (u.mesh.node(e) + u.mesh.node(e + 1));
        if x > 0.0 {
            let gap = u.slope(n - 1 - e) - u.slope(e);
            min_gap = min_gap.min(gap);
        }
    }
    let g = p.potential();
    let mut reasons = Vec::new();
    if !sol.diagnostics.is_increasing {
        reasons.push("solution not increasing".to_string());
    }
    if !(sol.diagnostics.u_at_zero > 0.0) {
        reasons.push("u(0) is not positive".to_string());
    }
    let m = p.m();
    let concave = (1..512).all(|k| match g.d3(m * k as f64 / 512.0) {
        Some(d3) => d3 >= -1e-12,
        None => false,
    });
    if !concave {
        reasons.push("f = -G' not certified concave on (0, m)".to_string());
    }
    let certified = reasons.is_empty();
    DerivativeComparison {
        min_gap,
        certified,
        reason: if certified {
            None
        } else {
            Some(reasons.join("; "))
        },
    }
}

struct Shooter<'a> {
    p: &'a Problem,
    /// Potential derivative expanded around `-m` (forward) and `+m` (backward).
    left_coeffs: Option<Vec<f64>>,
    right_coeffs: Option<Vec<f64>>,
    bound: f64,
}

fn shift_poly(c: &[f64], x0: f64) -> Vec<f64> {
    // Taylor coefficients of p(x0 + w) by repeated synthetic division.
    let mut a = c.to_vec();
    let n = a.len();
    let mut out = vec![0.0; n];
    for k in 0..n {
        let len = n - k;
        for i in (0..len - 1).rev() {
            a[i] += x0 * a[i + 1];
        }
        out[k] = a[0];
        a.remove(0);
    }
    out
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

enum Escape {
    Up,
    Down,
}

impl<'a> Shooter<'a> {
    fn new(p: &'a Problem) -> Self {
        let g = p.potential();
        let m = p.m();
        let dcoeffs = g.dense_coeffs().map(|c| {
            if c.len() <= 1 {
                vec![0.0]
            } else {
                c.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, &ck)| k as f64 * ck)
                    .collect::<Vec<f64>>()
            }
        });
        Shooter {
            p,
            left_coeffs: dcoeffs.as_ref().map(|c| shift_poly(c, -m)),
            right_coeffs: dcoeffs.as_ref().map(|c| shift_poly(c, m)),
            bound: 10.0 * m.max(g.well()),
        }
    }

    /// `G'` at `u = -m + w` (forward) or `u = m - w` (backward).
    #[inline]
    fn gprime(&self, w: f64, forward: bool) -> f64 {
        let m = self.p.m();
        match (forward, &self.left_coeffs, &self.right_coeffs) {
            (true, Some(c), _) => horner(c, w),
            (false, _, Some(c)) => horner(c, -w),
            (true, None, _) => self.p.potential().d1(-m + w),
            (false, _, None) => self.p.potential().d1(m - w),
        }
    }

    /// RK4 for `w' = q / a`, `q' = +-b G'(u)`, starting at `x = -+L` with
    /// `u' = s`, over `steps` steps ending at `x_end`. Returns samples every
    /// `stride` steps as `(u, a u')`.
    fn integrate(
        &self,
        s: f64,
        forward: bool,
        x_end: f64,
        steps: usize,
        stride: usize,
    ) -> std::result::Result<Vec<(f64, f64)>, (Escape, f64)> {
        let (a, b) = (self.p.a(), self.p.b());
        let l = self.p.half_width();
        let m = self.p.m();
        let x0 = if forward { -l } else { l };
        let h = (x_end - x0) / steps as f64;
        // In the backward chart w = m - u, so w' = -u'.
        let sign = if forward { 1.0 } else { -1.0 };
        let rhs = |x: f64, w: f64, q: f64| -> (f64, f64) {
            let dw = sign * q / a.eval(x);
            let dq = b.eval(x) * self.gprime(w, forward);
            (dw, dq)
        };
        let to_u = |w: f64| if forward { -m + w } else { m - w };
        let mut w = 0.0;
        let mut q = a.eval(x0) * s;
        let mut out = Vec::with_capacity(steps / stride.max(1) + 1);
        out.push((to_u(w), q));
        for k in 0..steps {
            let x = x0 + h * k as f64;
            let (k1w, k1q) = rhs(x, w, q);
            let (k2w, k2q) = rhs(x + 0.5 * h, w + 0.5 * h * k1w, q + 0.5 * h * k1q);
            let (k3w, k3q) = rhs(x + 0.5 * h, w + 0.5 * h * k2w, q + 0.5 * h * k2q);
            let (k4w, k4q) = rhs(x + h, w + h * k3w, q + h * k3q);
            w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
            q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            let uu = to_u(w);
            if !(uu.abs() <= self.bound) {
                let up = if uu.is_nan() { q > 0.0 } else { uu > 0.0 };
                return Err((if up { Escape::Up } else { Escape::Down }, x + h));
            }
            if stride > 0 && (k + 1) % stride == 0 {
                out.push((uu, q));
            }
        }
        if stride == 0 {
            out.push((to_u(w), q));
        }
        Ok(out)
    }

    /// `u_s(L) - m` for the forward trajectory; escapes count as `+-bound`.
    fn phi(&self, s: f64, steps: usize) -> f64 {
        let l = self.p.half_width();
        match self.integrate(s, true, l, steps, 0) {
            Ok(v) => v[v.len() - 1].0 - self.p.m(),
            Err((Escape::Up, _)) => self.bound,
            Err((Escape::Down, _)) => -self.bound,
        }
    }
}

/// Root of a bracketed scalar function: bisection while the endpoints are
/// escaped, then Illinois-modified secant steps.
fn bracket_root<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    bound: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo.abs() <= tol {
        return Ok((lo, flo));
    }
    if fhi.abs() <= tol {
        return Ok((hi, fhi));
    }
    if flo.signum() == fhi.signum() {
        return Err(OddsymError::NoSignChange { lo, hi });
    }
    let mut best = if flo.abs() < fhi.abs() {
        (lo, flo)
    } else {
        (hi, fhi)
    };
    let mut side = 0i8;
    for _ in 0..400 {
        let escaped = flo.abs() >= bound || fhi.abs() >= bound;
        let mut mid = if escaped {
            0.5 * (lo + hi)
        } else {
            (lo * fhi - hi * flo) / (fhi - flo)
        };
        if !(mid > lo.min(hi) && mid < lo.max(hi)) {
            mid = 0.5 * (lo + hi);
        }
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm.abs() <= tol {
            return Ok((mid, fm));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
            if side == -1 && fhi.abs() < bound {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            fhi = fm;
            if side == 1 && flo.abs() < bound {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(best)
}

/// Which boundary condition the shooting parameter is tuned against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShootMode {
    /// `Odd` for even weights, `Forward` otherwise.
    Auto,
    /// `u_s(L) = m`.
    Forward,
    /// `u_s(0) = 0`, then `u(x) = -u(-x)` on `(0, L]`.
    Odd,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShootOptions {
    pub slope_bracket: Option<(f64, f64)>,
    pub integrator_steps: usize,
    /// Mesh the returned solution lives on.
    pub mesh: usize,
    pub tol: f64,
    pub mode: ShootMode,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            slope_bracket: None,
            integrator_steps: 100_000,
            mesh: 4096,
            tol: 1e-10,
            mode: ShootMode::Auto,
        }
    }
}

/// Solves the Euler-Lagrange boundary value problem by RK4 shooting from `-L`.
///
/// The initial slope is bracketed (escaped trajectories count with the sign of
/// their escape) and refined by bisection and Illinois secant steps. On long
/// intervals `u_s(L)` barely depends on where the transition sits, so for even
/// problems the default tunes `u_s(0) = 0` instead and reflects.
pub fn shoot(p: &Problem, opts: &ShootOptions) -> Result<Solution> {
    let n = opts.mesh.max(2) + opts.mesh % 2;
    let per = opts.integrator_steps.div_ceil(n).max(1);
    let steps = per * n;
    let shooter = Shooter::new(p);
    let l = p.half_width();
    let (lo, hi) = opts.slope_bracket.unwrap_or_else(|| {
        let xs = sample_grid(l, 257);
        let amax = xs.iter().map(|&x| p.a().eval(x)).fold(0.0, f64::max);
        let amin = xs
            .iter()
            .map(|&x| p.a().eval(x))
            .fold(f64::INFINITY, f64::min);
        let s = 10.0 * p.m().max(p.potential().well()) / l * amax / amin;
        (-s, s)
    });
    let odd = match opts.mode {
        ShootMode::Auto => p.is_even(),
        ShootMode::Forward => false,
        ShootMode::Odd => true,
    };
    let mesh = Mesh::new(l, n)?;
    let (values, residual, method) = if odd {
        let half = steps / 2;
        let target = |s: f64| match shooter.integrate(s, true, 0.0, half, 0) {
            Ok(v) => v[v.len() - 1].0,
            Err((Escape::Up, _)) => shooter.bound,
            Err((Escape::Down, _)) => -shooter.bound,
        };
        let (s0, r) = bracket_root(target, lo, hi, shooter.bound, opts.tol)?;
        let traj = shooter
            .integrate(s0, true, 0.0, half, per)
            .map_err(|(_, x)| OddsymError::Escaped {
                bound: shooter.bound,
                x,
            })?;
        let c = n / 2;
        let mut v = vec![0.0; n + 1];
        for k in 0..c {
            v[k] = traj[k].0;
            v[n - k] = -traj[k].0;
        }
        v[c] = traj[c].0;
        v[0] = -p.m();
        v[n] = p.m();
        (v, r.abs(), "shooting_odd")
    } else {
        let (s0, phi) = bracket_root(|s| shooter.phi(s, steps), lo, hi, shooter.bound, opts.tol)?;
        let traj = shooter
            .integrate(s0, true, l, steps, per)
            .map_err(|(_, x)| OddsymError::Escaped {
                bound: shooter.bound,
                x,
            })?;
        let mut v: Vec<f64> = traj.iter().map(|t| t.0).collect();
        v[n] = p.m();
        (v, phi.abs(), "shooting")
    };
    let g = GridFunction::new(mesh, values)?;
    let disc = Discretization::new(p, n)?;
    let energy = disc.energy(&g.values);
    let trace = hamiltonian_samples(p, &g);
    let diagnostics = shape_diagnostics_of(&g, p.m());
    let hess = disc.hessian(&g.values);
    Ok(Solution {
        energy,
        residual_inf: residual,
        tolerance: opts.tol,
        hamiltonian_trace: trace,
        diagnostics,
        method: method.into(),
        newton_steps: 0,
        gradient_steps: 0,
        saddle_escapes: 0,
        hessian_negative: negative_count(&hess),
        local_min_spot_check: None,
        u: g,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartOutcome {
    pub preset: String,
    pub converged: bool,
    pub cluster: Option<usize>,
    pub energy: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiStartReport {
    pub distinct_solutions: usize,
    /// Sup-norm distances between converged starts, in preset order.
    pub pairwise_gaps: Vec<Vec<f64>>,
    pub starts: Vec<StartOutcome>,
    /// Hypotheses imply a unique solution.
    pub uniqueness_certified: bool,
    /// `distinct_solutions == 1` whenever uniqueness is certified.
    pub consistent: bool,
    #[serde(skip)]
    pub solutions: Vec<Option<Solution>>,
}

/// Greedy clustering under the sup norm: each solution joins the first
/// cluster whose representative lies within `threshold`.
pub fn cluster(solutions: &[&GridFunction], threshold: f64) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    let mut labels = Vec::with_capacity(solutions.len());
    for (i, s) in solutions.iter().enumerate() {
        match reps
            .iter()
            .position(|&r| solutions[r].sup_distance(s) <= threshold)
        {
            Some(c) => labels.push(c),
            None => {
                reps.push(i);
                labels.push(reps.len() - 1);
            }
        }
    }
    labels
}

/// Minimizes from every preset (in parallel) and counts distinct solutions.
pub fn multi_start_uniqueness(
    p: &Problem,
    presets: &[Preset],
    n: usize,
    seed: u64,
) -> Result<MultiStartReport> {
    let opts = MinimizeOptions {
        seed,
        ..MinimizeOptions::default()
    };
    let results: Vec<Result<Solution>> = presets
        .par_iter()
        .map(|&pr| minimize(p, &Init::Preset(pr), n, &opts))
        .collect();
    let mut starts = Vec::new();
    let mut solutions = Vec::new();
    for (pr, r) in presets.iter().zip(results) {
        match r {
            Ok(sol) if sol.residual_inf <= sol.tolerance => {
                starts.push(StartOutcome {
                    preset: pr.name().into(),
                    converged: true,
                    cluster: None,
                    energy: Some(sol.energy),
                    note: None,
                });
                solutions.push(Some(sol));
            }
            Ok(sol) => {
                starts.push(StartOutcome {
                    preset: pr.name().into(),
                    converged: false,
                    cluster: None,
                    energy: Some(sol.energy),
                    note: Some(format!("residual {:e} above tolerance", sol.residual_inf)),
                });
                solutions.push(None);
            }
            Err(e) => {
                starts.push(StartOutcome {
                    preset: pr.name().into(),
                    converged: false,
                    cluster: None,
                    energy: None,
                    note: Some(e.to_string()),
                });
                solutions.push(None);
            }
        }
    }
    let converged: Vec<(usize, &GridFunction)> = solutions
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.as_ref().map(|s| (i, &s.u)))
        .collect();
    let grids: Vec<&GridFunction> = converged.iter().map(|c| c.1).collect();
    let labels = cluster(&grids, CLUSTER_THRESHOLD);
    for ((i, _), l) in converged.iter().zip(&labels) {
        starts[*i].cluster = Some(*l);
    }
    let distinct = labels.iter().copied().max().map_or(0, |m| m + 1);
    let pairwise_gaps = grids
        .iter()
        .map(|a| grids.iter().map(|b| a.sup_distance(b)).collect())
        .collect();
    let hyp = check_hypotheses_lenient(p, DEFAULT_GRID)?;
    let certified = hyp.uniqueness_certified(p.m());
    Ok(MultiStartReport {
        distinct_solutions: distinct,
        pairwise_gaps,
        starts,
        uniqueness_certified: certified,
        consistent: !certified || distinct == 1,
        solutions,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CuttingCheck {
    pub energy_min: f64,
    pub energy_max: f64,
    pub energy_of_pointwise_min: f64,
    /// `u1 - u2` never changes sign strictly.
    pub ordered: bool,
}

/// Ordering alternative for two minimizers: compares `min(u1, u2)` with both.
pub fn cutting_check(p: &Problem, u1: &GridFunction, u2: &GridFunction) -> Result<CuttingCheck> {
    let disc = Discretization::new(p, u1.n())?;
    let lo: Vec<f64> = u1
        .values
        .iter()
        .zip(&u2.values)
        .map(|(a, b)| a.min(*b))
        .collect();
    let hi: Vec<f64> = u1
        .values
        .iter()
        .zip(&u2.values)
        .map(|(a, b)| a.max(*b))
        .collect();
    let tol = 1e-8;
    let pos = u1.values.iter().zip(&u2.values).any(|(a, b)| a - b > tol);
    let neg = u1.values.iter().zip(&u2.values).any(|(a, b)| b - a > tol);
    let e1 = disc.energy(&u1.values);
    let e2 = disc.energy(&u2.values);
    let _ = disc.energy(&hi);
    Ok(CuttingCheck {
        energy_min: e1.min(e2),
        energy_max: e1.max(e2),
        energy_of_pointwise_min: disc.energy(&lo),
        ordered: !(pos && neg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{Potential, WeightFamily};

    fn expq(l: f64) -> Problem {
        Problem::from_families(
            l,
            1.0,
            WeightFamily::ExpQuadratic { alpha: 1.0 },
            WeightFamily::ExpQuadratic { alpha: 1.0 },
            Potential::quartic(1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn energy_of_identity_on_unit_interval() {
        let p = Problem::allen_cahn(1.0, 1.0).unwrap();
        let u = GridFunction::from_fn(Mesh::new(1.0, 256).unwrap(), |x| x);
        let e = energy(&p, &u).unwrap();
        assert!((e - (1.0 + 4.0 / 15.0)).abs() < 1e-5, "{e}");
    }

    #[test]
    fn energy_of_zero_with_zero_data() {
        let p = Problem::allen_cahn(1.0, 0.0).unwrap();
        let u = GridFunction::pinned_constant(Mesh::new(1.0, 64).unwrap(), 0.0, 0.0);
        assert!((energy(&p, &u).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = expq(1.0);
        let u = Preset::Random.build(&p, 64, 3).unwrap();
        let d = Discretization::new(&p, 64).unwrap();
        let g = d.gradient(&u.values);
        for i in [1usize, 17, 32, 63] {
            let mut up = u.values.clone();
            let mut um = u.values.clone();
            up[i] += 1e-6;
            um[i] -= 1e-6;
            let fd = (d.energy(&up) - d.energy(&um)) / 2e-6;
            assert!(
                (fd - g[i - 1]).abs() < 1e-6 * g[i - 1].abs().max(1e-3),
                "{i}: {fd} vs {}",
                g[i - 1]
            );
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let p = expq(1.0);
        let u = Preset::OddTanh.build(&p, 64, 0).unwrap();
        let d = Discretization::new(&p, 64).unwrap();
        let h = d.hessian(&u.values);
        let mut dir = vec![0.0; 63];
        dir[20] = 1.0;
        let hv = h.matvec(&dir);
        let up = axpy_interior(&u.values, 1e-6, &dir);
        let um = axpy_interior(&u.values, -1e-6, &dir);
        let (gp, gm) = (d.gradient(&up), d.gradient(&um));
        for k in 18..23 {
            let fd = (gp[k] - gm[k]) / 2e-6;
            assert!((fd - hv[k]).abs() < 1e-5 * hv[k].abs().max(1.0));
        }
    }

    #[test]
    fn heteroclinic_energy() {
        let p = Problem::allen_cahn(20.0, 1.0).unwrap();
        let sol = minimize(
            &p,
            &Init::Preset(Preset::OddTanh),
            4096,
            &MinimizeOptions::default(),
        )
        .unwrap();
        let exact = 2.0 * 2f64.sqrt() / 3.0;
        assert!((sol.energy - exact).abs() < 1e-3, "{}", sol.energy);
        assert!(sol.residual_inf <= sol.tolerance);
        assert!(sol.diagnostics.is_increasing);
        assert!(
            sol.diagnostics.oddness_defect < 1e-12,
            "{} {} {} {}",
            sol.diagnostics.oddness_defect,
            sol.newton_steps,
            sol.gradient_steps,
            sol.saddle_escapes
        );
        assert_eq!(sol.hessian_negative, 0);
    }

    #[test]
    fn linear_start_escapes_odd_saddle_when_symmetry_breaks() {
        let p = Problem::allen_cahn(10.0, 0.05).unwrap();
        let sol = minimize(
            &p,
            &Init::Preset(Preset::Linear),
            512,
            &MinimizeOptions::default(),
        )
        .unwrap();
        assert!(sol.residual_inf <= sol.tolerance);
        assert_eq!(sol.hessian_negative, 0);
        assert!(sol.diagnostics.u_at_zero.abs() > 0.5);
    }

    #[test]
    fn shooting_linear_problem() {
        let g = Potential::even_polynomial(vec![0.0], 1.0).unwrap();
        let p = Problem::from_families(
            1.0,
            1.0,
            WeightFamily::ExpQuadratic { alpha: 1.0 },
            WeightFamily::Constant { c: 1.0 },
            g,
        )
        .unwrap();
        let sol = shoot(
            &p,
            &ShootOptions {
                integrator_steps: 4096,
                mesh: 256,
                ..ShootOptions::default()
            },
        )
        .unwrap();
        let c = p.int_inv_a(1.0);
        for i in (0..=256).step_by(16) {
            let x = sol.u.mesh.node(i);
            assert!((sol.u.values[i] - p.int_inv_a(x) / c).abs() < 1e-8);
        }
    }

    #[test]
    fn shift_poly_taylor() {
        let c = vec![1.0, -2.0, 0.0, 3.0];
        let s = shift_poly(&c, 0.7);
        for &w in &[-0.3, 0.0, 0.4] {
            assert!((horner(&s, w) - horner(&c, 0.7 + w)).abs() < 1e-13);
        }
    }

    #[test]
    fn shape_of_odd_function() {
        let mesh = Mesh::new(1.0, 128).unwrap();
        let u = GridFunction::from_fn(mesh, |x| x * x * x + x);
        let d = shape_diagnostics_of(&u, 2.0);
        assert!(d.is_increasing);
        assert_eq!(d.zero_count, 1);
        assert!(d.zero_location.unwrap().abs() <= mesh.h());
        assert!((d.derivative_at_zero - 1.0).abs() < 1e-12);
        let w = GridFunction::from_fn(mesh, |x| (3.0 * x).sin() + 0.5 * x);
        let dw = shape_diagnostics_of(&w, 1.0);
        assert!(!dw.is_increasing);
        assert_eq!(dw.zero_count % 2, 1);
    }

    #[test]
    fn clustering_is_greedy() {
        let mesh = Mesh::new(1.0, 4).unwrap();
        let a = GridFunction::from_fn(mesh, |x| x);
        let b = GridFunction::from_fn(mesh, |x| x + 1e-6);
        let c = GridFunction::from_fn(mesh, |x| -x);
        assert_eq!(cluster(&[&a, &b, &c, &a], 1e-4), vec![0, 0, 1, 0]);
    }
}
