//! Continuous odd rearrangement `v -> v^t` of increasing functions with
//! respect to a weight `b`, and the energies along the family.
//!
//! With `B(x) = int_0^x b` and `rho = v^{-1}`, the family is
//! `rho^t = B^{-1}(t B(rho) + (1 - t) B(rho*))`, `rho*(l) = -rho(-l)`.
//! Energies are evaluated in the chart `y = B(x)`, where `B(rho^t)` is
//! affine in `t`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OddsymError, Result};
use crate::mesh::GridFunction;
use crate::quad::PrefixIntegral;
use crate::weights::{check_hypotheses_lenient, Potential, Problem, WeightFn, DEFAULT_GRID};

pub const DEFAULT_LAMBDA_SAMPLES: usize = 2049;
pub const DEFAULT_T_SAMPLES: usize = 101;
/// Relative slope below which the inverse counts as ill-conditioned.
pub const FLAT_SLOPE_FACTOR: f64 = 1e-8;
pub const EQUALITY_TOL: f64 = 1e-6;

/// Strictly increasing sampled function on `[-L, L]` with `v(-L) = -m`,
/// `v(L) = m`, interpolated linearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneGrid {
    nodes: Vec<f64>,
    values: Vec<f64>,
    min_slope: f64,
}

impl MonotoneGrid {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        if n < 2 || values.len() != n {
            return Err(OddsymError::InvalidInput(format!(
                "monotone grid needs matching node/value arrays of length >= 2 (got {} and {})",
                n,
                values.len()
            )));
        }
        if nodes.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(OddsymError::InvalidInput("monotone grid entries must be finite".into()));
        }
        if nodes[0] != -nodes[n - 1] || nodes[n - 1] <= 0.0 {
            return Err(OddsymError::InvalidInput(format!(
                "nodes must span a symmetric interval, got [{}, {}]",
                nodes[0],
                nodes[n - 1]
            )));
        }
        if values[0] != -values[n - 1] {
            return Err(OddsymError::InvalidInput(format!(
                "boundary values must be -m and m, got {} and {}",
                values[0],
                values[n - 1]
            )));
        }
        let mut min_slope = f64::INFINITY;
        for i in 0..n - 1 {
            let dx = nodes[i + 1] - nodes[i];
            if dx <= 0.0 {
                return Err(OddsymError::InvalidInput(format!("nodes not increasing at index {i}")));
            }
            let s = (values[i + 1] - values[i]) / dx;
            if s <= 0.0 {
                return Err(OddsymError::InvalidInput(format!(
                    "values not strictly increasing at index {i} (slope {s:e})"
                )));
            }
            min_slope = min_slope.min(s);
        }
        Ok(MonotoneGrid {
            nodes,
            values,
            min_slope,
        })
    }

    /// Samples `f` on `n + 1` uniform nodes; endpoint values are replaced by `-m`, `m`
    /// with `m = f(L)`.
    pub fn from_fn<F: Fn(f64) -> f64>(half_width: f64, n: usize, f: F) -> Result<Self> {
        if n < 1 {
            return Err(OddsymError::InvalidInput("need at least one interval".into()));
        }
        let nodes: Vec<f64> = (0..=n)
            .map(|i| half_width * (2.0 * i as f64 - n as f64) / n as f64)
            .collect();
        let m = f(half_width);
        let mut values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        values[0] = -m;
        values[n] = m;
        Self::new(nodes, values)
    }

    /// Seeded smooth increasing profile `-m + 2m F(s)`, `s = (x + L) / 2L`,
    /// with `F' = 1 + sum_k c_k cos(k pi s)` and `sum |c_k| <= 0.9`.
    pub fn random_smooth(half_width: f64, m: f64, n: usize, seed: u64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(OddsymError::InvalidInput(format!("random profile needs m > 0, got {m}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = 6;
        let raw: Vec<f64> = (0..modes).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let total: f64 = raw.iter().map(|c| c.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
        let scale = rng.random_range(0.3..=0.9) / total;
        let c: Vec<f64> = raw.iter().map(|x| x * scale).collect();
        Self::from_fn(half_width, n, |x| {
            let s = (x + half_width) / (2.0 * half_width);
            let f = s + c
                .iter()
                .enumerate()
                .map(|(k, ck)| {
                    let w = (k + 1) as f64 * std::f64::consts::PI;
                    ck * (w * s).sin() / w
                })
                .sum::<f64>();
            if x == half_width {
                m
            } else {
                -m + 2.0 * m * f
            }
        })
    }

    pub fn from_grid_function(u: &GridFunction) -> Result<Self> {
        Self::new(u.mesh.nodes(), u.values.clone())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn min_slope(&self) -> f64 {
        self.min_slope
    }

    pub fn half_width(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn m(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Linear interpolation, clamped outside the nodes.
    pub fn eval(&self, x: f64) -> f64 {
        interp(&self.nodes, &self.values, x)
    }

    /// The inverse `rho` of the interpolant, clamped to `[-m, m]`.
    pub fn inverse(&self, lambda: f64) -> f64 {
        interp(&self.values, &self.nodes, lambda)
    }

    /// `x -> -v(-x)`, on the nodes `-x_{n-i}`.
    pub fn flipped(&self) -> Self {
        let n = self.nodes.len();
        MonotoneGrid {
            nodes: (0..n).map(|i| -self.nodes[n - 1 - i]).collect(),
            values: (0..n).map(|i| -self.values[n - 1 - i]).collect(),
            min_slope: self.min_slope,
        }
    }

    /// `max |v(x) + v(-x)|` over the nodes.
    pub fn oddness_defect(&self) -> f64 {
        self.nodes
            .iter()
            .map(|&x| (self.eval(x) + self.eval(-x)).abs())
            .fold(0.0, f64::max)
    }
}

/// Piecewise-linear interpolation through increasing `xs`.
fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

/// `B(x) = int_0^x b` and its inverse.
#[derive(Debug, Clone)]
enum Chart {
    /// `b` constant: `B(x) = c x`.
    Scaled(f64),
    Prefix(PrefixIntegral),
}

impl Chart {
    fn forward(&self, x: f64) -> f64 {
        match self {
            Chart::Scaled(c) => c * x,
            Chart::Prefix(p) => p.eval(x),
        }
    }

    fn inverse(&self, y: f64) -> f64 {
        match self {
            Chart::Scaled(c) => {
                if *c == 1.0 {
                    y
                } else {
                    y / c
                }
            }
            Chart::Prefix(p) => p.inverse(y),
        }
    }
}

/// The family `{v^t : t in [0, 1]}` sampled on a uniform `lambda` grid.
#[derive(Debug, Clone)]
pub struct RearrangementFamily {
    base: MonotoneGrid,
    b: WeightFn,
    chart: Chart,
    lambdas: Vec<f64>,
    rho: Vec<f64>,
    rho_star: Vec<f64>,
    /// `B(rho)` and `B(rho*)`.
    b_rho: Vec<f64>,
    b_rho_star: Vec<f64>,
}

/// `K` symmetric samples `m (2j - (K-1)) / (K-1)` of `[-m, m]`.
pub fn lambda_grid(m: f64, k: usize) -> Vec<f64> {
    let d = (k - 1) as f64;
    (0..k).map(|j| m * (2.0 * j as f64 - d) / d).collect()
}

pub fn flipped(v: &MonotoneGrid) -> MonotoneGrid {
    v.flipped()
}

pub fn build_family(v: &MonotoneGrid, b: &WeightFn, k: usize) -> Result<RearrangementFamily> {
    if k < 101 {
        return Err(OddsymError::InvalidInput(format!("need K >= 101 lambda samples, got {k}")));
    }
    let (l, m) = (v.half_width(), v.m());
    if m <= 0.0 {
        return Err(OddsymError::InvalidInput(format!("boundary value must be positive, got {m}")));
    }
    let threshold = FLAT_SLOPE_FACTOR * (2.0 * m) / (2.0 * l);
    if v.min_slope() < threshold {
        return Err(OddsymError::FlatRegion {
            min_slope: v.min_slope(),
            threshold,
        });
    }
    if b.half_width() < l * (1.0 - 1e-12) {
        return Err(OddsymError::InvalidInput(format!(
            "weight defined on [-{}, {}] but the grid spans [-{l}, {l}]",
            b.half_width(),
            b.half_width()
        )));
    }
    let chart = match b.is_constant() {
        Some(c) => Chart::Scaled(c),
        None => {
            let bw = b.clone();
            Chart::Prefix(PrefixIntegral::build(
                move |x| bw.eval(x),
                l,
                crate::weights::PREFIX_PANELS,
                crate::weights::PREFIX_REL_TOL,
            )?)
        }
    };
    let lambdas = lambda_grid(m, k);
    let mut rho: Vec<f64> = lambdas.iter().map(|&lam| v.inverse(lam)).collect();
    rho[0] = -l;
    rho[k - 1] = l;
    let rho_star: Vec<f64> = (0..k).map(|j| -rho[k - 1 - j]).collect();
    let b_rho: Vec<f64> = rho.iter().map(|&x| chart.forward(x)).collect();
    let b_rho_star: Vec<f64> = rho_star.iter().map(|&x| chart.forward(x)).collect();
    Ok(RearrangementFamily {
        base: v.clone(),
        b: b.clone(),
        chart,
        lambdas,
        rho,
        rho_star,
        b_rho,
        b_rho_star,
    })
}

/// Symmetric composite weights: Simpson for odd `K`, trapezoid otherwise.
fn quadrature_weights(k: usize, step: f64) -> Vec<f64> {
    let mut w = vec![step; k];
    if k % 2 == 1 {
        for (j, wj) in w.iter_mut().enumerate() {
            *wj = step / 3.0 * if j == 0 || j == k - 1 { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
        }
    } else {
        w[0] = 0.5 * step;
        w[k - 1] = 0.5 * step;
    }
    w
}

/// `sum_j w_j f_j`, adding mirrored terms first so that reflected data sum to
/// the same bits.
fn paired_sum(w: &[f64], f: &[f64]) -> f64 {
    let k = f.len();
    let mut total = 0.0;
    for j in 0..k / 2 {
        total += w[j] * f[j] + w[k - 1 - j] * f[k - 1 - j];
    }
    if k % 2 == 1 {
        total += w[k / 2] * f[k / 2];
    }
    total
}

/// Centered differences, one-sided at the ends.
fn derivative(ys: &[f64], step: f64) -> Vec<f64> {
    let k = ys.len();
    (0..k)
        .map(|j| {
            if j == 0 {
                (ys[1] - ys[0]) / step
            } else if j == k - 1 {
                (ys[k - 1] - ys[k - 2]) / step
            } else {
                (ys[j + 1] - ys[j - 1]) / (2.0 * step)
            }
        })
        .collect()
}

impl RearrangementFamily {
    pub fn base(&self) -> &MonotoneGrid {
        &self.base
    }

    pub fn weight(&self) -> &WeightFn {
        &self.b
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn rho_star(&self) -> &[f64] {
        &self.rho_star
    }

    pub fn m(&self) -> f64 {
        self.base.m()
    }

    pub fn half_width(&self) -> f64 {
        self.base.half_width()
    }

    fn step(&self) -> f64 {
        2.0 * self.m() / (self.lambdas.len() - 1) as f64
    }

    /// `B(x)` for the family's weight.
    pub fn b_chart(&self, x: f64) -> f64 {
        self.chart.forward(x)
    }

    /// `B(rho^t)` at every sample.
    pub fn b_rho_t(&self, t: f64) -> Vec<f64> {
        if t == 1.0 {
            return self.b_rho.clone();
        }
        if t == 0.0 {
            return self.b_rho_star.clone();
        }
        self.b_rho
            .iter()
            .zip(&self.b_rho_star)
            .map(|(r, s)| t * r + (1.0 - t) * s)
            .collect()
    }

    /// `(B(rho^t))' = t b(rho) rho' + (1 - t) b(rho*) rho*'` with `rho'` by
    /// centered differences.
    pub fn b_rho_t_derivative(&self, t: f64) -> Vec<f64> {
        let step = self.step();
        let d = derivative(&self.rho, step);
        let ds = derivative(&self.rho_star, step);
        let k = self.lambdas.len();
        (0..k)
            .map(|j| {
                let f1 = self.b.eval(self.rho[j]) * d[j];
                let f0 = self.b.eval(self.rho_star[j]) * ds[j];
                if t == 1.0 {
                    f1
                } else if t == 0.0 {
                    f0
                } else {
                    t * f1 + (1.0 - t) * f0
                }
            })
            .collect()
    }

    /// `rho^t` at every sample; exact copies of `rho`, `rho*` at `t = 1, 0`.
    pub fn rho_t_samples(&self, t: f64) -> Vec<f64> {
        if t == 1.0 {
            return self.rho.clone();
        }
        if t == 0.0 {
            return self.rho_star.clone();
        }
        let k = self.lambdas.len();
        let l = self.half_width();
        let mut out: Vec<f64> = self.b_rho_t(t).iter().map(|&y| self.chart.inverse(y)).collect();
        out[0] = -l;
        out[k - 1] = l;
        out
    }

    /// `rho^t(lambda)` at an arbitrary `lambda` in `[-m, m]`.
    pub fn rho_t(&self, t: f64, lambda: f64) -> f64 {
        let r = self.base.inverse(lambda);
        if t == 1.0 {
            return r;
        }
        let rs = -self.base.inverse(-lambda);
        if t == 0.0 {
            return rs;
        }
        self.chart
            .inverse(t * self.chart.forward(r) + (1.0 - t) * self.chart.forward(rs))
    }

    pub fn v_t(&self, t: f64) -> Result<MonotoneGrid> {
        MonotoneGrid::new(self.rho_t_samples(t), self.lambdas.clone())
    }

    /// `int G(v^t) b dx`, written as `int G(l) d(B(rho^t))` and integrated by
    /// parts.
    pub fn potential_energy(&self, g: &Potential, t: f64) -> f64 {
        let k = self.lambdas.len();
        let y = self.b_rho_t(t);
        let w = quadrature_weights(k, self.step());
        let integrand: Vec<f64> = (0..k).map(|j| g.d1(self.lambdas[j]) * y[j]).collect();
        let m = self.m();
        g.eval(m) * y[k - 1] - g.eval(-m) * y[0] - paired_sum(&w, &integrand)
    }

    /// `h(t) = int (dv^t/dx)^2 a dx = int a b (rho^t) / (B(rho^t))' dl`.
    pub fn kinetic_energy(&self, a: &WeightFn, t: f64) -> Result<f64> {
        let k = self.lambdas.len();
        let step = self.step();
        let x = self.rho_t_samples(t);
        let dy = self.b_rho_t_derivative(t);
        let mut f = Vec::with_capacity(k);
        for j in 0..k {
            if !(dy[j] > 0.0) {
                return Err(OddsymError::Invariant(format!(
                    "rearranged inverse not increasing at lambda = {} (t = {t})",
                    self.lambdas[j]
                )));
            }
            f.push(a.eval(x[j]) * self.b.eval(x[j]) / dy[j]);
        }
        Ok(paired_sum(&quadrature_weights(k, step), &f))
    }

    /// `E(v^t) = h(t)/2 + int G(v^t) b`.
    pub fn total_energy(&self, a: &WeightFn, g: &Potential, t: f64) -> Result<f64> {
        Ok(0.5 * self.kinetic_energy(a, t)? + self.potential_energy(g, t))
    }

    /// `max_l | b({-l < v^t < l}) - (B(rho(l)) - B(rho(-l))) |` over `l >= 0`.
    pub fn equidistribution_defect(&self, t: f64) -> f64 {
        let k = self.lambdas.len();
        let x = self.rho_t_samples(t);
        (k / 2..k)
            .map(|j| {
                let measured = self.chart.forward(x[j]) - self.chart.forward(x[k - 1 - j]);
                let target = self.b_rho[j] - self.b_rho[k - 1 - j];
                (measured - target).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Rows `(t, h(t), E(v^t))` on `ts`.
    pub fn energy_table(&self, a: &WeightFn, g: &Potential, ts: &[f64]) -> Result<Vec<EnergyRow>> {
        ts.par_iter()
            .map(|&t| {
                let kinetic = self.kinetic_energy(a, t)?;
                Ok(EnergyRow {
                    t,
                    kinetic,
                    total: 0.5 * kinetic + self.potential_energy(g, t),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub t: f64,
    pub kinetic: f64,
    pub total: f64,
}

/// CSV with header `t,kinetic,total`.
pub fn energy_table_csv(rows: &[EnergyRow]) -> String {
    let mut s = String::from("t,kinetic,total\n");
    for r in rows {
        s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", r.t, r.kinetic, r.total));
    }
    s
}

/// Uniform grid of `n` points on `[0, 1]` with exact endpoints.
pub fn t_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn min_second_difference(ys: &[f64]) -> f64 {
    ys.windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangementReport {
    /// Hypotheses hold, so the inequalities are binding.
    pub binding: bool,
    pub warning: Option<String>,
    pub kinetic_at_one: f64,
    /// `max_t h(t) - h(1)`.
    pub max_kinetic_excess: f64,
    pub kinetic_inequality: bool,
    pub kinetic_min_second_difference: f64,
    pub energy_min_second_difference: f64,
    pub energy_convex: bool,
    /// `h(1/2) < h(1)` beyond the equality tolerance.
    pub strict_at_half: bool,
    /// Some interior `t` has `h(t) = h(1)` to the equality tolerance.
    pub equality_case: bool,
    pub oddness_defect: f64,
    /// Equality only for an (almost) odd `v`.
    pub equality_consistent: bool,
    /// `max_t |P(t) - P(1)| / max(1, |P(1)|)` for the potential part.
    pub potential_spread: f64,
    pub max_equidistribution_defect: f64,
    pub rows: Vec<EnergyRow>,
}

/// Checks the rearrangement inequalities and convexity of `t -> E(v^t)` for `v`
/// against the weights of `p`.
pub fn verify_rearrangement(v: &MonotoneGrid, p: &Problem) -> Result<RearrangementReport> {
    verify_rearrangement_with(v, p, DEFAULT_LAMBDA_SAMPLES, DEFAULT_T_SAMPLES)
}

/// As [`verify_rearrangement`] with `k` level samples and `t_samples` values of `t`.
pub fn verify_rearrangement_with(
    v: &MonotoneGrid,
    p: &Problem,
    k: usize,
    t_samples: usize,
) -> Result<RearrangementReport> {
    if t_samples < 3 {
        return Err(OddsymError::InvalidInput("need at least 3 values of t".into()));
    }
    let l = p.half_width();
    if (v.half_width() - l).abs() > 1e-12 * l || (v.m() - p.m()).abs() > 1e-12 * p.m().max(1.0) {
        return Err(OddsymError::InvalidInput(format!(
            "grid spans [-{}, {}] with m = {}, problem has L = {l}, m = {}",
            v.half_width(),
            v.half_width(),
            v.m(),
            p.m()
        )));
    }
    let report = check_hypotheses_lenient(p, DEFAULT_GRID)?;
    let binding = report.rearrangement_applies();
    let warning = (!binding).then(|| {
        format!(
            "hypothesis (sqrt-convexity of a~ / monotone (sqrt(ab))'/b) not satisfied; theorem not applicable (sqrt_convex margin {:e}, evenness {})",
            report.sqrt_convex.margin,
            report.all_even()
        )
    });
    let fam = build_family(v, p.b(), k)?;
    let ts = t_grid(t_samples);
    let rows = fam.energy_table(p.a(), p.potential(), &ts)?;
    let h1 = rows[rows.len() - 1].kinetic;
    let hs: Vec<f64> = rows.iter().map(|r| r.kinetic).collect();
    let es: Vec<f64> = rows.iter().map(|r| r.total).collect();
    let max_excess = hs.iter().map(|h| h - h1).fold(f64::NEG_INFINITY, f64::max);
    let kin_d2 = min_second_difference(&hs);
    let en_d2 = min_second_difference(&es);
    let half = hs[(hs.len() - 1) / 2];
    let equality_case = hs[1..hs.len() - 1]
        .iter()
        .any(|h| (h - h1).abs() <= EQUALITY_TOL * h1.abs());
    let oddness = v.oddness_defect();
    let p1 = fam.potential_energy(p.potential(), 1.0);
    let spread = ts
        .iter()
        .map(|&t| (fam.potential_energy(p.potential(), t) - p1).abs())
        .fold(0.0, f64::max)
        / p1.abs().max(1.0);
    let equi = ts
        .iter()
        .map(|&t| fam.equidistribution_defect(t))
        .fold(0.0, f64::max);
    Ok(RearrangementReport {
        binding,
        warning,
        kinetic_at_one: h1,
        max_kinetic_excess: max_excess,
        kinetic_inequality: max_excess <= 1e-8 * h1,
        kinetic_min_second_difference: kin_d2,
        energy_min_second_difference: en_d2,
        energy_convex: en_d2 >= -1e-8 * h1,
        strict_at_half: half < h1 * (1.0 - EQUALITY_TOL),
        equality_case,
        oddness_defect: oddness,
        equality_consistent: !equality_case || oddness <= EQUALITY_TOL,
        potential_spread: spread,
        max_equidistribution_defect: equi,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    fn quadratic_grid(n: usize) -> MonotoneGrid {
        MonotoneGrid::from_fn(1.0, n, |x| 2.0 * ((x + 1.0) / 2.0).powi(2) - 1.0).unwrap()
    }

    fn one() -> WeightFn {
        WeightFn::constant(1.0, 1.0).unwrap()
    }

    #[test]
    fn flipped_quadratic_and_involution() {
        let v = quadratic_grid(64);
        let w = v.flipped();
        for &x in &[-0.7f64, -0.1, 0.3, 0.9] {
            let exact = 1.0 - 2.0 * ((1.0 - x) / 2.0).powi(2);
            assert!((w.eval(x) - exact).abs() < 1e-3);
        }
        assert_eq!(w.flipped(), v);
        let id = MonotoneGrid::from_fn(1.0, 10, |x| x).unwrap();
        assert_eq!(id.flipped(), id);
        let asym = MonotoneGrid::new(vec![-1.0, -0.2, 0.5, 1.0], vec![-1.0, 0.0, 0.3, 1.0]).unwrap();
        assert_eq!(asym.flipped().nodes(), &[-1.0, -0.5, 0.2, 1.0]);
    }

    #[test]
    fn closed_form_inverse_for_quadratic() {
        let v = quadratic_grid(8192);
        let fam = build_family(&v, &one(), 2049).unwrap();
        for &lam in &[-0.5f64, 0.0, 0.5] {
            let rho = (2.0 * (lam + 1.0)).sqrt() - 1.0;
            let half = ((2.0 * (1.0 + lam)).sqrt() - (2.0 * (1.0 - lam)).sqrt()) / 2.0;
            assert!((fam.rho_t(1.0, lam) - rho).abs() < 1e-6);
            assert!((fam.rho_t(0.5, lam) - half).abs() < 1e-6);
        }
        let r = fam.rho_t_samples(0.5);
        let k = r.len();
        for j in 0..k {
            assert!((r[j] + r[k - 1 - j]).abs() <= 1e-10);
        }
    }

    #[test]
    fn constant_weight_is_exact_convex_combination() {
        let v = quadratic_grid(100);
        let fam = build_family(&v, &one(), 101).unwrap();
        let r = fam.rho_t_samples(0.3);
        for j in 0..101 {
            assert_eq!(r[j], 0.3 * fam.rho()[j] + 0.7 * fam.rho_star()[j]);
        }
        assert_eq!(fam.rho_t_samples(1.0), fam.rho());
        assert_eq!(fam.rho_t_samples(0.0), fam.rho_star());
    }

    #[test]
    fn identity_is_fixed() {
        let v = MonotoneGrid::from_fn(1.0, 50, |x| x).unwrap();
        let fam = build_family(&v, &WeightFn::exp_quadratic(1.0, 1.0).unwrap(), 201).unwrap();
        for t in [0.0, 0.25, 0.5, 0.9] {
            for (j, x) in fam.rho_t_samples(t).iter().enumerate() {
                assert!((x - fam.lambdas()[j]).abs() < 1e-12);
            }
        }
        let h = fam.kinetic_energy(&one(), 0.4).unwrap();
        assert!((h - 2.0).abs() < 1e-10, "{h}");
    }

    #[test]
    fn potential_invariant_in_t() {
        let g = Potential::quartic(1.0).unwrap();
        let v = quadratic_grid(4096);
        let oracle = integrate(|x| g.eval(v.eval(x)), -1.0, 1.0, 1e-13);
        for b in [one(), WeightFn::exp_quadratic(1.0, 1.0).unwrap()] {
            let fam = build_family(&v, &b, 2049).unwrap();
            let p1 = fam.potential_energy(&g, 1.0);
            for t in [0.0, 0.3, 0.5] {
                assert!((fam.potential_energy(&g, t) - p1).abs() <= 1e-6 * p1);
            }
            let oracle_b = integrate(|x| g.eval(v.eval(x)) * b.eval(x), -1.0, 1.0, 1e-13);
            assert!((p1 - oracle_b).abs() <= 1e-6 * oracle_b, "{p1} {oracle_b}");
        }
        assert!(oracle > 0.0);
    }

    #[test]
    fn kinetic_symmetry_and_convexity() {
        let v = quadratic_grid(4096);
        let a = WeightFn::exp_quadratic(1.0, 1.0).unwrap();
        let fam = build_family(&v, &one(), 2049).unwrap();
        assert_eq!(fam.kinetic_energy(&a, 0.0).unwrap(), fam.kinetic_energy(&a, 1.0).unwrap());
        let rows = fam.energy_table(&a, &Potential::quartic(1.0).unwrap(), &t_grid(101)).unwrap();
        let hs: Vec<f64> = rows.iter().map(|r| r.kinetic).collect();
        let h1 = hs[100];
        assert!(hs.iter().all(|h| *h <= h1 * (1.0 + 1e-12)));
        assert!(min_second_difference(&hs) >= -1e-8 * h1);
        let direct = integrate(|x| a.eval(x) * ((x + 1.0) / 1.0).powi(2), -1.0, 1.0, 1e-13);
        assert!((h1 - direct).abs() <= 1e-4 * direct, "{h1} {direct}");
    }

    #[test]
    fn equidistribution_holds() {
        let v = quadratic_grid(1000);
        let fam = build_family(&v, &WeightFn::exp_quadratic(1.0, 1.0).unwrap(), 501).unwrap();
        for t in [0.0, 0.2, 0.5, 0.8, 1.0] {
            assert!(fam.equidistribution_defect(t) <= 1e-8);
            assert!(fam.v_t(t).is_ok());
        }
    }

    #[test]
    fn flat_input_rejected() {
        let v = MonotoneGrid::new(vec![-1.0, 0.0, 0.5, 1.0], vec![-1.0, 0.0, 1e-12, 1.0]).unwrap();
        assert!(matches!(build_family(&v, &one(), 101), Err(OddsymError::FlatRegion { .. })));
    }

    #[test]
    fn theorem_report_cases() {
        let p = Problem::from_families(
            1.0,
            1.0,
            crate::WeightFamily::Constant { c: 1.0 },
            crate::WeightFamily::Constant { c: 1.0 },
            Potential::quartic(1.0).unwrap(),
        )
        .unwrap();
        let r = verify_rearrangement(&quadratic_grid(2048), &p).unwrap();
        assert!(r.binding && r.kinetic_inequality && r.energy_convex && r.strict_at_half);
        assert!(r.equality_consistent);
        let odd = MonotoneGrid::from_fn(1.0, 2048, |x| x.powi(3) * 0.5 + 0.5 * x).unwrap();
        let r = verify_rearrangement(&odd, &p).unwrap();
        assert!(r.equality_case && r.oddness_defect == 0.0 && r.equality_consistent);
        let pw = crate::WeightFamily::PowerAbs { beta: 2.0, delta: 1.0 };
        let q = Problem::from_families(1.0, 1.0, pw.clone(), pw, Potential::quartic(1.0).unwrap()).unwrap();
        let r = verify_rearrangement(&quadratic_grid(2048), &q).unwrap();
        assert!(!r.binding && r.warning.is_some());
    }
}
