//! The first weighted Dirichlet eigenvalue `lambda_1(a, b, I)`, its closed-form
//! lower bounds, the Muckenhoupt bracket, and uniqueness certificates built on
//! `lambda_1 >= -G''(0)`.

use serde::{Deserialize, Serialize};

use crate::error::{OddsymError, Result};
use crate::mesh::{GridFunction, Mesh};
use crate::quad::integrate_real_line;
use crate::tridiag::SymTridiag;
use crate::weights::{sample_grid, Potential, PotentialFamily, Problem, WeightFamily, WeightFn, DEFAULT_GRID};

pub const MIN_EIGEN_MESH: usize = 128;
pub const DEFAULT_EIGEN_MESH: usize = 512;
pub const MAX_POWER_ITERATIONS: usize = 10_000;
pub const RAYLEIGH_TOL: f64 = 1e-12;
pub const MUCKENHOUPT_GRID: usize = 2048;
/// Slack on the bracket ends for discretization error.
pub const BRACKET_SLACK: f64 = 0.05;
pub const ANNA_AGREEMENT_TOL: f64 = 1e-10;
/// `G'' - G''(0)` is not tested for `|s|` below this.
pub const STRICTNESS_EXCLUSION: f64 = 1e-6;
pub const STRICTNESS_SAMPLES: usize = 8193;
pub const L1_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenResult {
    /// Extrapolated from meshes `n` and `2n`.
    pub lambda1: f64,
    pub lambda1_coarse: f64,
    pub lambda1_fine: f64,
    pub mesh: usize,
    pub iterations: usize,
    /// Unit sup norm, positive, zero at both ends.
    #[serde(skip)]
    pub eigenvector: Option<GridFunction>,
    pub eigenvector_positive: bool,
    pub muckenhoupt_m: f64,
    pub bracket: (f64, f64),
    pub in_bracket: bool,
    /// Absent for tabulated weights.
    pub lower_bound_anna: Option<f64>,
    pub g2_at_zero: f64,
    pub semistable: bool,
}

/// P1 stiffness (weight `a`) and consistent mass (weight `b`) on interior nodes,
/// both by 2-point Gauss.
fn assemble(p: &Problem, n: usize) -> Result<(Mesh, SymTridiag, SymTridiag)> {
    let mesh = Mesh::new(p.half_width(), n)?;
    let h = mesh.h();
    let (a, b) = (p.a(), p.b());
    let c_near = 0.5 * (1.0 + crate::quad::GAUSS2_ABSCISSA);
    let c_far = 0.5 * (1.0 - crate::quad::GAUSS2_ABSCISSA);
    let mut kd = vec![0.0; n + 1];
    let mut ko = vec![0.0; n];
    let mut md = vec![0.0; n + 1];
    let mut mo = vec![0.0; n];
    for e in 0..n {
        let [g1, g2] = mesh.gauss_points(e);
        let k = 0.5 * (a.eval(g1) + a.eval(g2)) / h;
        let (w1, w2) = (0.5 * h * b.eval(g1), 0.5 * h * b.eval(g2));
        kd[e] += k;
        kd[e + 1] += k;
        ko[e] -= k;
        md[e] += c_near * c_near * w1 + c_far * c_far * w2;
        md[e + 1] += c_far * c_far * w1 + c_near * c_near * w2;
        mo[e] += c_near * c_far * (w1 + w2);
    }
    let stiff = SymTridiag::new(kd[1..n].to_vec(), ko[1..n - 1].to_vec())?;
    let mass = SymTridiag::new(md[1..n].to_vec(), mo[1..n - 1].to_vec())?;
    Ok((mesh, stiff, mass))
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Smallest eigenvalue of `K x = lambda M x` by inverse power iteration.
fn inverse_power(k: &SymTridiag, m: &SymTridiag) -> Result<(f64, Vec<f64>, usize)> {
    let n = k.len();
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let s = (i as f64 + 1.0) / (n as f64 + 1.0);
            s * (1.0 - s)
        })
        .collect();
    let mut prev = f64::INFINITY;
    for it in 1..=MAX_POWER_ITERATIONS {
        let mx = m.matvec(&x);
        let mut y = k.solve(&mx)?;
        let norm = dot(&y, &m.matvec(&y)).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(OddsymError::Invariant("inverse iteration collapsed".into()));
        }
        y.iter_mut().for_each(|v| *v /= norm);
        let rq = dot(&y, &k.matvec(&y));
        x = y;
        if (rq - prev).abs() <= RAYLEIGH_TOL * rq.abs() {
            return Ok((rq, x, it));
        }
        prev = rq;
    }
    Err(OddsymError::NoConvergence {
        iterations: MAX_POWER_ITERATIONS,
        residual: prev,
        last: crate::error::LastIterate(x),
    })
}

/// `lambda_1` on an `n`-element mesh, Richardson-extrapolated with `2n`.
pub fn lambda1(p: &Problem, n: usize) -> Result<EigenResult> {
    if n < MIN_EIGEN_MESH {
        return Err(OddsymError::InvalidInput(format!(
            "eigen mesh must have n >= {MIN_EIGEN_MESH} elements, got {n}"
        )));
    }
    let (mesh, k1, m1) = assemble(p, n)?;
    let (coarse, v, it1) = inverse_power(&k1, &m1)?;
    let (_, k2, m2) = assemble(p, 2 * n)?;
    let (fine, _, it2) = inverse_power(&k2, &m2)?;
    let extrapolated = (4.0 * fine - coarse) / 3.0;

    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let peak = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    values.extend(v.iter().map(|x| sign * x / peak));
    values.push(0.0);
    let positive = values[1..n].iter().all(|x| *x > 0.0);
    let eigenvector = GridFunction::new(mesh, values)?;

    let big_m = muckenhoupt_constant(p, MUCKENHOUPT_GRID)?;
    let bracket = (1.0 / (16.0 * big_m), 4.0 / big_m);
    let in_bracket = extrapolated >= bracket.0 * (1.0 - BRACKET_SLACK)
        && extrapolated <= bracket.1 * (1.0 + BRACKET_SLACK);
    let anna = match anna_lower_bound(p) {
        Ok(r) => Some(r.value),
        Err(OddsymError::InsufficientSmoothness { .. }) => None,
        Err(e) => return Err(e),
    };
    let g2 = p.potential().d2(0.0);
    Ok(EigenResult {
        lambda1: extrapolated,
        lambda1_coarse: coarse,
        lambda1_fine: fine,
        mesh: n,
        iterations: it1 + it2,
        eigenvector: Some(eigenvector),
        eigenvector_positive: positive,
        muckenhoupt_m: big_m,
        bracket,
        in_bracket,
        lower_bound_anna: anna,
        g2_at_zero: g2,
        semistable: extrapolated >= -g2,
    })
}

/// `sup_{alpha < beta} (int_alpha^beta b)(int_{max(|alpha|,|beta|)}^L 1/a)`.
pub fn muckenhoupt_constant(p: &Problem, grid: usize) -> Result<f64> {
    if grid < 3 {
        return Err(OddsymError::InvalidInput("muckenhoupt grid needs >= 3 points".into()));
    }
    let l = p.half_width();
    let full = p.int_inv_a(l);
    let value = |al: f64, be: f64| -> f64 {
        let (lo, hi) = (al.min(be).max(-l), al.max(be).min(l));
        let c = lo.abs().max(hi.abs());
        (p.int_b(hi) - p.int_b(lo)) * (full - p.int_inv_a(c))
    };
    let xs = sample_grid(l, grid);
    let pb: Vec<f64> = xs.iter().map(|&x| p.int_b(x)).collect();
    let tail: Vec<f64> = xs.iter().map(|&x| full - p.int_inv_a(x.abs())).collect();
    let mut best = (0.0f64, 0usize, 0usize);
    for i in 0..grid {
        for j in i + 1..grid {
            let c = if xs[i].abs() >= xs[j].abs() { i } else { j };
            let v = (pb[j] - pb[i]) * tail[c];
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    let (mut bv, mut al, mut be) = (best.0, xs[best.1], xs[best.2]);
    let mut delta = 2.0 * (xs[1] - xs[0]);
    let steps = 16;
    for _ in 0..8 {
        let (a0, b0) = (al, be);
        for i in 0..=steps {
            let ai = a0 - delta + 2.0 * delta * i as f64 / steps as f64;
            for j in 0..=steps {
                let bj = b0 - delta + 2.0 * delta * j as f64 / steps as f64;
                if ai >= bj {
                    continue;
                }
                let v = value(ai, bj);
                if v > bv {
                    (bv, al, be) = (v, ai.max(-l), bj.min(l));
                }
            }
        }
        delta /= 4.0;
    }
    Ok(bv)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnaBound {
    /// `1/4 inf {2 (a b'/b^2)' + a (b')^2 / b^3}` over the grid.
    pub value: f64,
    pub argmin: f64,
    /// `inf (sqrt a)'' / sqrt a`, when `a` and `b` coincide.
    pub sqrt_form: Option<f64>,
}

/// Closed-form lower bound on `lambda_1` from the ground-state substitution.
pub fn anna_lower_bound(p: &Problem) -> Result<AnnaBound> {
    let (a, b) = (p.a(), p.b());
    if a.is_tabulated() || b.is_tabulated() {
        return Err(OddsymError::InsufficientSmoothness {
            condition: "lower bound on lambda_1".into(),
        });
    }
    let xs = sample_grid(p.half_width(), DEFAULT_GRID);
    let mut value = f64::INFINITY;
    let mut argmin = 0.0;
    for &x in &xs {
        let (av, bv) = (a.eval(x), b.eval(x));
        let (la, lb, lbb) = (a.d1(x) / av, b.d1(x) / bv, b.d2(x) / bv);
        let q = 0.25 * (av / bv) * (2.0 * la * lb + 2.0 * lbb - 3.0 * lb * lb);
        if q < value {
            value = q;
            argmin = x;
        }
    }
    let sqrt_form = if a.family() == b.family() {
        let mut s = f64::INFINITY;
        for &x in &xs {
            let av = a.eval(x);
            let (la, laa) = (a.d1(x) / av, a.d2(x) / av);
            s = s.min(0.5 * laa - 0.25 * la * la);
        }
        if (s - value).abs() > ANNA_AGREEMENT_TOL * value.abs().max(1.0) {
            return Err(OddsymError::Invariant(format!(
                "closed-form bounds disagree: {value} vs {s}"
            )));
        }
        Some(s)
    } else {
        None
    };
    Ok(AnnaBound {
        value,
        argmin,
        sqrt_form,
    })
}

/// Bound from the positive supersolution `exp(-alpha x^2)` when
/// `a = b = exp(alpha x^2)`: `lambda_1 >= 2 alpha` in one dimension.
pub fn supersolution_bound(p: &Problem) -> Option<f64> {
    match (p.a().family(), p.b().family()) {
        (WeightFamily::ExpQuadratic { alpha: x }, WeightFamily::ExpQuadratic { alpha: y })
            if x == y && *x > 0.0 =>
        {
            Some(2.0 * x)
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialForms {
    pub scaling_exponent: f64,
    pub lambda1_critical: Option<f64>,
}

/// Power weights `a = |x|^alpha`, `b = |x|^beta` in dimension `n_dim`:
/// `lambda_1(tau Omega) = tau^(alpha - beta - 2) lambda_1(Omega)`, and the
/// scale-free value `(N - 2 + alpha)^2 / 4` when `alpha - beta = 2`.
pub fn radial_closed_forms(alpha: f64, beta: f64, n_dim: usize) -> Result<RadialForms> {
    if n_dim == 0 || !alpha.is_finite() || !beta.is_finite() {
        return Err(OddsymError::InvalidInput(
            "radial forms need finite exponents and N >= 1".into(),
        ));
    }
    let nd = n_dim as f64;
    let critical = alpha - beta == 2.0;
    if critical && !(alpha > 2.0 - nd && beta > -nd) {
        return Err(OddsymError::InvalidInput(format!(
            "critical radial form needs alpha > {} and beta > {}, got ({alpha}, {beta})",
            2.0 - nd,
            -nd
        )));
    }
    Ok(RadialForms {
        scaling_exponent: alpha - beta - 2.0,
        lambda1_critical: critical.then(|| (nd - 2.0 + alpha).powi(2) / 4.0),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct L1Certificate {
    pub certified: bool,
    /// `1 / (16 |1/a|_1 |b|_1)`.
    pub lhs: f64,
    pub norm_inv_a: f64,
    pub norm_b: f64,
    pub threshold: f64,
}

fn inv_integrable(w: &WeightFn) -> bool {
    match w.family() {
        WeightFamily::ExpQuadratic { alpha } => *alpha > 0.0,
        WeightFamily::PowerAbs { beta, delta } => *beta > 1.0 && *delta > 0.0,
        _ => false,
    }
}

fn integrable(w: &WeightFn) -> bool {
    match w.family() {
        WeightFamily::ExpQuadratic { alpha } => *alpha < 0.0,
        WeightFamily::PowerAbs { beta, delta } => *beta < -1.0 && *delta > 0.0,
        _ => false,
    }
}

/// Interval-independent certificate for weights with `1/a, b` in `L^1(R)`.
pub fn l1_product_certificate(a: &WeightFn, b: &WeightFn, g: &Potential) -> Result<L1Certificate> {
    if !inv_integrable(a) {
        return Err(OddsymError::NotIntegrable(format!("1/a for a = {}", a.name())));
    }
    if !integrable(b) {
        return Err(OddsymError::NotIntegrable(format!("b = {}", b.name())));
    }
    let norm_inv_a = integrate_real_line(|x| 1.0 / a.eval(x), 1e-13);
    let norm_b = integrate_real_line(|x| b.eval(x), 1e-13);
    let lhs = 1.0 / (16.0 * norm_inv_a * norm_b);
    let threshold = -g.d2(0.0);
    Ok(L1Certificate {
        certified: lhs >= threshold - L1_TOL * threshold.abs().max(lhs),
        lhs,
        norm_inv_a,
        norm_b,
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    AnnaBound,
    RadialClosedForm,
    L1Product,
    Lambda1Numeric,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::AnnaBound => "anna_bound",
            Route::RadialClosedForm => "radial_closed_form",
            Route::L1Product => "l1_product",
            Route::Lambda1Numeric => "lambda1_numeric",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RouteValue {
    pub route: Route,
    /// Lower bound (or estimate) of `lambda_1`.
    pub value: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Strictness {
    pub holds: bool,
    /// `min (G''(s) - G''(0))` over the sampled set.
    pub min_margin: f64,
    pub worst_s: f64,
    /// Margin at `|s| = STRICTNESS_EXCLUSION`.
    pub boundary_margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniquenessCertificate {
    pub certified: bool,
    pub route: Option<Route>,
    pub margin: f64,
    pub strictness: Strictness,
    /// `G' <= 0` below `-M` and `G' >= 0` above `M`, sampled on `[M, 3M]`.
    pub coercive_potential: bool,
    /// Certified, with even data: the unique critical point is odd.
    pub antisymmetric: bool,
    pub routes: Vec<RouteValue>,
    pub reason: Option<String>,
}

fn strictness(g: &Potential) -> Strictness {
    let big = 3.0 * g.well();
    let g0 = g.d2(0.0);
    let mut min_margin = f64::INFINITY;
    let mut worst_s = 0.0;
    for s in sample_grid(big, STRICTNESS_SAMPLES) {
        if s.abs() < STRICTNESS_EXCLUSION {
            continue;
        }
        let d = g.d2(s) - g0;
        if d < min_margin {
            min_margin = d;
            worst_s = s;
        }
    }
    let boundary_margin = (g.d2(STRICTNESS_EXCLUSION) - g0).min(g.d2(-STRICTNESS_EXCLUSION) - g0);
    Strictness {
        holds: min_margin > 0.0 && boundary_margin > 0.0,
        min_margin,
        worst_s,
        boundary_margin,
    }
}

/// Radial route for pure power weights; `PowerAbs` with `delta = 0` and
/// `a = |x|^(beta + 2)`, `b = |x|^beta`.
fn radial_value(p: &Problem) -> Option<f64> {
    match (p.a().family(), p.b().family()) {
        (
            WeightFamily::PowerAbs { beta: al, delta: da },
            WeightFamily::PowerAbs { beta: be, delta: db },
        ) if *da == 0.0 && *db == 0.0 => radial_closed_forms(*al, *be, 1).ok()?.lambda1_critical,
        _ => None,
    }
}

/// Certificate of a unique (and, for even data, odd) critical point from
/// `lambda_1 >= -G''(0) > -G''(s)`, trying closed forms before numerics.
pub fn uniqueness_certificate(p: &Problem) -> Result<UniquenessCertificate> {
    let g = p.potential();
    if matches!(g.family(), PotentialFamily::TabulatedEven { .. }) {
        return Err(OddsymError::InsufficientSmoothness {
            condition: "strictness of G''".into(),
        });
    }
    let strict = strictness(g);
    let big = g.well();
    let coercive = sample_grid(3.0 * big, STRICTNESS_SAMPLES)
        .into_iter()
        .filter(|s| s.abs() > big)
        .all(|s| g.d1(s) * s.signum() >= 0.0);
    let g0 = g.d2(0.0);
    let even = p.is_even();
    let mut routes = Vec::new();
    let mut chosen = None;
    let push = |route: Route, value: f64, routes: &mut Vec<RouteValue>| {
        let margin = value + g0;
        routes.push(RouteValue { route, value, margin });
        margin >= 0.0
    };
    if !(strict.holds && coercive) {
        let reason = if !strict.holds {
            format!(
                "G'' - G''(0) = {:e} at s = {} is not positive",
                strict.min_margin.min(strict.boundary_margin),
                strict.worst_s
            )
        } else {
            "G' has the wrong sign beyond the wells".to_string()
        };
        return Ok(UniquenessCertificate {
            certified: false,
            route: None,
            margin: f64::NAN,
            strictness: strict,
            coercive_potential: coercive,
            antisymmetric: false,
            routes,
            reason: Some(reason),
        });
    }
    if let Ok(anna) = anna_lower_bound(p) {
        let v = supersolution_bound(p).map_or(anna.value, |s| s.max(anna.value));
        if push(Route::AnnaBound, v, &mut routes) {
            chosen = Some(Route::AnnaBound);
        }
    }
    if chosen.is_none() {
        if let Some(v) = radial_value(p) {
            if push(Route::RadialClosedForm, v, &mut routes) {
                chosen = Some(Route::RadialClosedForm);
            }
        }
    }
    if chosen.is_none() {
        if let Ok(c) = l1_product_certificate(p.a(), p.b(), g) {
            routes.push(RouteValue {
                route: Route::L1Product,
                value: c.lhs,
                margin: c.lhs + g0,
            });
            if c.certified {
                chosen = Some(Route::L1Product);
            }
        }
    }
    if chosen.is_none() {
        let e = lambda1(p, DEFAULT_EIGEN_MESH)?;
        if push(Route::Lambda1Numeric, e.lambda1, &mut routes) {
            chosen = Some(Route::Lambda1Numeric);
        }
    }
    let margin = match chosen {
        Some(r) => routes.iter().find(|v| v.route == r).map(|v| v.margin).unwrap_or(f64::NAN),
        None => routes.iter().map(|v| v.margin).fold(f64::NEG_INFINITY, f64::max),
    };
    Ok(UniquenessCertificate {
        certified: chosen.is_some(),
        route: chosen,
        margin,
        strictness: strict,
        coercive_potential: coercive,
        antisymmetric: chosen.is_some() && even,
        routes,
        reason: chosen.is_none().then(|| "lambda_1 below -G''(0) on every route".to_string()),
    })
}

/// CSV `x,xi` of a computed eigenvector.
pub fn eigenvector_csv(v: &GridFunction) -> String {
    let mut s = String::from("x,xi\n");
    for (i, val) in v.values.iter().enumerate() {
        s.push_str(&format!("{:.16e},{:.16e}\n", v.mesh.node(i), val));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn problem(l: f64, a: WeightFn, b: WeightFn) -> Problem {
        Problem::new(l, 1.0, a, b, Potential::quartic(1.0).unwrap()).unwrap()
    }

    fn exp_quad(l: f64, alpha: f64) -> Problem {
        problem(
            l,
            WeightFn::exp_quadratic(alpha, l).unwrap(),
            WeightFn::exp_quadratic(alpha, l).unwrap(),
        )
    }

    #[test]
    fn dirichlet_laplacian_eigenvalue() {
        let p = Problem::allen_cahn(1.0, 1.0).unwrap();
        let e = lambda1(&p, 128).unwrap();
        assert!((e.lambda1 - PI * PI / 4.0).abs() < 1e-4, "{}", e.lambda1);
        assert!(e.lambda1_coarse > e.lambda1_fine && e.lambda1_fine > e.lambda1 - 1e-9);
        assert!(e.eigenvector_positive);
        assert!((e.muckenhoupt_m - 0.5).abs() < 1e-12);
        assert!(e.in_bracket);
        assert!((e.bracket.0 - 0.125).abs() < 1e-12 && (e.bracket.1 - 8.0).abs() < 1e-10);
        assert!(e.semistable);
        let q = Problem::allen_cahn(2.0, 1.0).unwrap();
        let e2 = lambda1(&q, 128).unwrap();
        assert!((e2.lambda1 - 0.25 * e.lambda1).abs() < 1e-6);
    }

    #[test]
    fn muckenhoupt_constant_weights_and_homogeneity() {
        for l in [0.5, 1.0, 3.0] {
            let p = Problem::allen_cahn(l, 1.0).unwrap();
            let m = muckenhoupt_constant(&p, 256).unwrap();
            assert!((m - l * l / 2.0).abs() < 1e-10 * l * l, "{m}");
        }
        let k = 3.0;
        let p = problem(1.0, WeightFn::constant(1.0, 1.0).unwrap(), WeightFn::constant(k, 1.0).unwrap());
        let e = lambda1(&p, 128).unwrap();
        assert!((e.muckenhoupt_m - k * 0.5).abs() < 1e-10);
        assert!((e.lambda1 - PI * PI / (4.0 * k)).abs() < 1e-4);
        assert!(e.in_bracket);
    }

    #[test]
    fn anna_bound_exp_quadratic() {
        for alpha in [0.5, 1.0, 2.0] {
            let p = exp_quad(1.0, alpha);
            let b = anna_lower_bound(&p).unwrap();
            assert_eq!(b.value, alpha);
            assert!((b.sqrt_form.unwrap() - alpha).abs() < 1e-12);
            let e = lambda1(&p, 256).unwrap();
            assert!(e.lambda1 >= alpha && e.lambda1 >= 2.0 * alpha - 1e-6);
            assert!(e.in_bracket);
        }
        let c = problem(1.0, WeightFn::constant(2.0, 1.0).unwrap(), WeightFn::constant(2.0, 1.0).unwrap());
        assert_eq!(anna_lower_bound(&c).unwrap().value, 0.0);
        let mixed = problem(1.0, WeightFn::constant(1.0, 1.0).unwrap(), WeightFn::exp_quadratic(1.0, 1.0).unwrap());
        let b = anna_lower_bound(&mixed).unwrap();
        // (4 - 4x^2) e^{-x^2} / 4 vanishes at the ends.
        assert!(b.value.abs() < 1e-12 && b.sqrt_form.is_none());
        assert!(lambda1(&mixed, 256).unwrap().lambda1 >= b.value);
    }

    #[test]
    fn tabulated_weight_has_no_closed_bound() {
        let xs: Vec<f64> = (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 + x * x).collect();
        let t = WeightFn::tabulated(xs, ys, 1.0).unwrap();
        let p = problem(1.0, t.clone(), t);
        assert!(matches!(
            anna_lower_bound(&p),
            Err(OddsymError::InsufficientSmoothness { .. })
        ));
        assert!(lambda1(&p, 128).unwrap().lower_bound_anna.is_none());
    }

    #[test]
    fn radial_forms() {
        let r = radial_closed_forms(2.0, 0.0, 8).unwrap();
        assert_eq!(r.lambda1_critical, Some(16.0));
        assert_eq!(r.scaling_exponent, 0.0);
        let r = radial_closed_forms(0.7, 0.7, 3).unwrap();
        assert_eq!(r.scaling_exponent, -2.0);
        assert!(r.lambda1_critical.is_none());
        assert!(radial_closed_forms(0.5, -1.5, 1).is_err());
        assert!(radial_closed_forms(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn l1_certificate_gaussian_equality() {
        let a = WeightFn::exp_quadratic(1.0, 1.0).unwrap();
        let b = WeightFn::exp_quadratic(-1.0, 1.0).unwrap();
        let c = 1.0 / (16.0 * PI);
        // G = c/2 (1 - s^2)^2 / ... with G''(0) = -c: coefficients of s^0, s^2, s^4.
        let g = Potential::even_polynomial(vec![c / 4.0, -c / 2.0, c / 4.0], 1.0).unwrap();
        assert!((g.d2(0.0) + c).abs() < 1e-18);
        let cert = l1_product_certificate(&a, &b, &g).unwrap();
        assert!((cert.norm_inv_a - PI.sqrt()).abs() < 1e-11);
        assert!((cert.norm_b - PI.sqrt()).abs() < 1e-11);
        assert!(cert.certified && (cert.lhs - c).abs() < 1e-12);
        let convex = Potential::even_polynomial(vec![0.0, 1.0], 1.0).unwrap();
        assert!(l1_product_certificate(&a, &b, &convex).unwrap().certified);
        let one = WeightFn::constant(1.0, 1.0).unwrap();
        assert!(matches!(
            l1_product_certificate(&one, &one, &g),
            Err(OddsymError::NotIntegrable(_))
        ));
        let pa = WeightFn::power_abs(3.0, 1.0, 1.0).unwrap();
        let pb = WeightFn::power_abs(-2.0, 1.0, 1.0).unwrap();
        let cert = l1_product_certificate(&pa, &pb, &g).unwrap();
        // 2/(beta - 1) for delta = 1.
        assert!((cert.norm_inv_a - 1.0).abs() < 1e-9 && (cert.norm_b - 2.0).abs() < 1e-9);
    }

    #[test]
    fn certificates_on_reference_instances() {
        let c = uniqueness_certificate(&exp_quad(1.0, 1.0)).unwrap();
        assert!(c.certified && c.route == Some(Route::AnnaBound) && c.antisymmetric);
        assert!((c.margin - 1.0).abs() < 1e-12);
        let c = uniqueness_certificate(&exp_quad(3.0, 0.5)).unwrap();
        assert!(c.certified && c.margin.abs() < 1e-12);
        let c = uniqueness_certificate(&Problem::allen_cahn(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(c.route, Some(Route::Lambda1Numeric));
        assert!((c.margin - (PI * PI / 4.0 - 1.0)).abs() < 1e-4);
        let c = uniqueness_certificate(&Problem::allen_cahn(4.0, 1.0).unwrap()).unwrap();
        assert!(!c.certified && c.reason.is_some());
        assert!((c.margin - (PI * PI / 64.0 - 1.0)).abs() < 1e-4);
    }

    #[test]
    fn flat_second_derivative_is_not_certifiable() {
        // G'' = -1 everywhere.
        let g = Potential::even_polynomial(vec![1.0, -0.5], 1.0).unwrap();
        let p = Problem::allen_cahn(0.5, 1.0).unwrap().with_potential(g);
        let c = uniqueness_certificate(&p).unwrap();
        assert!(!c.certified && !c.strictness.holds);
        assert!(c.reason.unwrap().contains("not positive"));
    }
}
