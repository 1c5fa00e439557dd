//! Closed-form energy bounds: the linear Dirichlet minimum, the upper bound
//! over the free parameter `t`, the lower bound `C^as` for odd competitors,
//! the symmetry-breaking criterion, window scans for weight families and the
//! monotonicity of `L -> Phi_m(L)`.
//!
//! All formulas use the normalized potential `G - G(M)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OddsymError, Result};
use crate::quad::{golden_section_min, integrate, PrefixIntegral};
use crate::solve1d::{minimize, Init, MinimizeOptions, Preset};
use crate::weights::{Potential, Problem, WeightFn};

/// Samples used for sup/inf of `G` before golden-section refinement.
pub const POTENTIAL_SAMPLES: usize = 4097;
pub const UPPER_T_SAMPLES: usize = 1025;
pub const CAS_LOG_SAMPLES: usize = 481;
const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearEnergyMin {
    /// `(m2 - m1)^2 / int 1/a`.
    pub value: f64,
    pub int_inv_a: f64,
    pub nodes: Vec<f64>,
    /// `m1 + (m2 - m1) int_alpha^x 1/a / int_alpha^beta 1/a` at `nodes`.
    pub minimizer: Vec<f64>,
}

/// Minimum of `int_alpha^beta a v'^2` with `v(alpha) = m1`, `v(beta) = m2`,
/// and the minimizer on `n + 1` uniform nodes.
pub fn linear_energy_min(
    a: &WeightFn,
    interval: (f64, f64),
    m1: f64,
    m2: f64,
    n: usize,
) -> Result<LinearEnergyMin> {
    let (alpha, beta) = interval;
    if !(alpha < beta) {
        return Err(OddsymError::InvalidInput(format!(
            "interval must satisfy alpha < beta, got ({alpha}, {beta})"
        )));
    }
    if n < 1 {
        return Err(OddsymError::InvalidInput("need at least one element".into()));
    }
    let nodes: Vec<f64> = (0..=n)
        .map(|i| alpha + (beta - alpha) * i as f64 / n as f64)
        .collect();
    let mut cum = vec![0.0; n + 1];
    for i in 0..n {
        let piece = integrate(|x| 1.0 / a.eval(x), nodes[i], nodes[i + 1], QUAD_TOL / n as f64);
        cum[i + 1] = cum[i] + piece;
    }
    let total = cum[n];
    if !(total > 0.0 && total.is_finite()) {
        return Err(OddsymError::NotIntegrable(format!("int 1/a over ({alpha}, {beta}) = {total}")));
    }
    let minimizer = cum.iter().map(|c| m1 + (m2 - m1) * c / total).collect();
    Ok(LinearEnergyMin {
        value: (m2 - m1) * (m2 - m1) / total,
        int_inv_a: total,
        nodes,
        minimizer,
    })
}

/// `sup` (or `inf`) of `g` on `[lo, hi]` by sampling and golden-section polish.
fn extremum<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, maximize: bool) -> (f64, f64) {
    if hi <= lo {
        return (lo, g(lo));
    }
    let n = POTENTIAL_SAMPLES;
    let sign = if maximize { -1.0 } else { 1.0 };
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let (k, _) = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, sign * g(x)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let a = xs[k.saturating_sub(1)];
    let b = xs[(k + 1).min(n - 1)];
    let (x, v) = golden_section_min(|x| sign * g(x), a, b, 1e-12);
    let sampled = sign * g(xs[k]);
    if v < sampled {
        (x, sign * v)
    } else {
        (xs[k], sign * sampled)
    }
}

/// Normalized potential `G - G(M)`.
fn normalized(g: &Potential) -> impl Fn(f64) -> f64 + '_ {
    let gm = g.eval(g.well());
    move |s| g.eval(s) - gm
}

/// `G_1 = sup_{(-m, max(m, M))} (G - G(M))`, over the closed interval.
pub fn g1(p: &Problem) -> f64 {
    let g = p.potential();
    let mbar = p.m().max(g.well());
    extremum(normalized(g), -p.m(), mbar, true).1
}

/// `m_0 = min(m, M) / 2` and `G_0 = inf_{(0, m_0)} (G - G(M))`.
pub fn m0_g0(p: &Problem) -> (f64, f64) {
    let g = p.potential();
    let m0 = 0.5 * p.m().min(g.well());
    (m0, extremum(normalized(g), 0.0, m0, false).1)
}

/// `int_0^t w` with `t` possibly beyond the tabulated range of `prefix`.
fn cumulative<F: Fn(f64) -> f64>(prefix: &PrefixIntegral, w: F, t: f64) -> f64 {
    let l = prefix.half_width();
    if t <= l {
        prefix.eval(t)
    } else {
        prefix.eval(l) + integrate(w, l, t, QUAD_TOL * t.max(1.0))
    }
}

/// `(M^2 + m^2) / int_t^L 1/a + 2 G_1 int_t^L b`.
pub fn upper_bound_phi(p: &Problem, t: f64) -> Result<f64> {
    let l = p.half_width();
    if !(0.0..l).contains(&t) {
        return Err(OddsymError::InvalidInput(format!("t must lie in [0, {l}), got {t}")));
    }
    Ok(upper_bound_with(p, g1(p), t))
}

fn upper_bound_with(p: &Problem, g1: f64, t: f64) -> f64 {
    let l = p.half_width();
    let mm = p.potential().well();
    let inv_a = p.int_inv_a(l) - p.int_inv_a(t);
    let b = p.int_b(l) - p.int_b(t);
    (mm * mm + p.m() * p.m()) / inv_a + 2.0 * g1 * b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMin {
    pub argmin: f64,
    pub value: f64,
    /// `(t, value)` samples.
    pub samples: Vec<(f64, f64)>,
}

/// Upper bound on `UPPER_T_SAMPLES` points of `[0, L)`, with its minimum.
pub fn upper_bound_min(p: &Problem) -> CurveMin {
    let l = p.half_width();
    let g1 = g1(p);
    let n = UPPER_T_SAMPLES;
    let samples: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = l * i as f64 / n as f64;
            (t, upper_bound_with(p, g1, t))
        })
        .collect();
    let (argmin, value) = samples
        .iter()
        .copied()
        .fold((0.0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
    CurveMin {
        argmin,
        value,
        samples,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CasReport {
    pub value: f64,
    pub argmin: f64,
    pub m0: f64,
    pub g0: f64,
    /// Largest `t` searched: `10 L` for closed-form weights, `L` for tabulated ones.
    pub horizon: f64,
    /// `(t, psi(t))` on the log grid.
    pub samples: Vec<(f64, f64)>,
}

/// `C^as = inf_{t > 0} m_0^2 / int_0^t 1/a + 2 G_0 int_0^t b`.
pub fn antisymmetric_lower_bound(p: &Problem) -> Result<CasReport> {
    if p.m() <= 0.0 {
        return Err(OddsymError::Precondition(
            "the lower bound for odd competitors needs m > 0".into(),
        ));
    }
    let (m0, g0) = m0_g0(p);
    if !(g0 > 0.0) {
        return Err(OddsymError::Precondition(format!(
            "potential violates the normalization: G not strictly above G(M) on [0,M) (G_0 = {g0:e})"
        )));
    }
    let l = p.half_width();
    let (a, b) = (p.a(), p.b());
    let extend = a.extendable() && b.extendable();
    let horizon = if extend { 10.0 * l } else { l };
    let psi = |t: f64| {
        let ia = cumulative(p.prefix_inv_a(), |x| 1.0 / a.eval(x), t);
        let ib = cumulative(p.prefix_b(), |x| b.eval(x), t);
        let v = m0 * m0 / ia + 2.0 * g0 * ib;
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let n = CAS_LOG_SAMPLES;
    let lo = 1e-6 * l;
    let ratio = (horizon / lo).ln();
    let ts: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                horizon
            } else {
                lo * (ratio * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect();
    let samples: Vec<(f64, f64)> = ts.par_iter().map(|&t| (t, psi(t))).collect();
    let (k, _) = samples
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, c)| if c.1 < b.1 { (i, c.1) } else { b });
    let left = ts[k.saturating_sub(1)];
    let right = ts[(k + 1).min(n - 1)];
    let (t, v) = golden_section_min(psi, left, right, 1e-8);
    let (argmin, value) = if v <= samples[k].1 { (t, v) } else { samples[k] };
    Ok(CasReport {
        value,
        argmin,
        m0,
        g0,
        horizon,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryBreaking {
    /// `sup_t (int_t^L 1/a)(int_0^t b)`.
    pub lhs: f64,
    pub argmax: f64,
    /// `M^2 / (2 G(0))`.
    pub threshold: f64,
    pub certified: bool,
    /// `min_t` upper bound, when computed.
    pub upper_bound_min: f64,
    /// `C^as`, absent for `m = 0`.
    pub c_as: Option<f64>,
    /// `min_t` upper bound `< C^as`: minimizers are not odd.
    pub non_odd_certified: bool,
}

/// Criterion for non-odd minimizers at small `m`, plus the comparison of the
/// upper bound with `C^as`.
pub fn symmetry_breaking_criterion(p: &Problem) -> Result<SymmetryBreaking> {
    let g = p.potential();
    let mm = g.well();
    let gn = normalized(g);
    let g0 = gn(0.0);
    if !(g0 > 0.0) {
        return Err(OddsymError::Precondition(format!(
            "normalized G(0) must be positive, got {g0:e}"
        )));
    }
    let (_, peak) = extremum(&gn, 0.0, mm, true);
    if peak > g0 * (1.0 + 1e-12) {
        return Err(OddsymError::Precondition(format!(
            "G(s) <= G(0) fails on (0, M): sup is {peak:e} > G(0) = {g0:e}"
        )));
    }
    let l = p.half_width();
    let prod = |t: f64| (p.int_inv_a(l) - p.int_inv_a(t)) * p.int_b(t);
    let n = UPPER_T_SAMPLES;
    let ts: Vec<f64> = (1..n).map(|i| l * i as f64 / n as f64).collect();
    let (k, _) = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| (i, prod(t)))
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    let (t, v) = golden_section_min(
        |t| -prod(t),
        ts[k.saturating_sub(1)],
        ts[(k + 1).min(ts.len() - 1)],
        1e-10,
    );
    let (argmax, lhs) = if -v >= prod(ts[k]) { (t, -v) } else { (ts[k], prod(ts[k])) };
    let threshold = mm * mm / (2.0 * g0);
    let upper = upper_bound_min(p).value;
    let c_as = if p.m() > 0.0 {
        antisymmetric_lower_bound(p).ok().map(|r| r.value)
    } else {
        None
    };
    Ok(SymmetryBreaking {
        lhs,
        argmax,
        threshold,
        certified: lhs > threshold,
        upper_bound_min: upper,
        c_as,
        non_odd_certified: c_as.is_some_and(|c| upper < c),
    })
}

/// All bound quantities for one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub upper_bound: CurveMin,
    pub c_as: Option<CasReport>,
    #[serde(rename = "G1")]
    pub g1: f64,
    #[serde(rename = "G0")]
    pub g0: f64,
    pub m0: f64,
    #[serde(rename = "Mbar")]
    pub mbar: f64,
    pub symmetry_breaking_certified: bool,
}

pub fn bound_report(p: &Problem) -> BoundReport {
    let upper = upper_bound_min(p);
    let c_as = antisymmetric_lower_bound(p).ok();
    let (m0, g0) = m0_g0(p);
    let certified = c_as.as_ref().is_some_and(|c| upper.value < c.value);
    BoundReport {
        upper_bound: upper,
        c_as,
        g1: g1(p),
        g0,
        m0,
        mbar: p.m().max(p.potential().well()),
        symmetry_breaking_certified: certified,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x: f64,
    pub w: f64,
    pub int_inv_a: f64,
    pub int_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub windows: Vec<Window>,
    /// Windows not dominated in (larger `int 1/a`, smaller `int b`).
    pub pareto: Vec<Window>,
    /// `(eps, best int 1/a with int b <= eps, best / eps)`.
    pub best: Vec<(f64, f64, f64)>,
    /// `best / eps` grows by [`SCAN_GROWTH`] at each smaller `eps`.
    pub unbounded_trend: bool,
}

pub const SCAN_EPSILONS: [f64; 3] = [1.0, 0.1, 0.01];
/// Growth factor of `best / eps` per step of [`SCAN_EPSILONS`].
pub const SCAN_GROWTH: f64 = 2.0;

/// Scans windows `[x, x + w]`, `x` on `x_samples` points of `[0, horizon]`,
/// for intervals with large `int 1/a` and small `int b`.
pub fn interval_sequence_scan(
    a: &WeightFn,
    b: &WeightFn,
    horizon: f64,
    window_grid: &[f64],
    x_samples: usize,
) -> Result<ScanReport> {
    if !a.extendable() || !b.extendable() {
        return Err(OddsymError::InvalidInput(
            "window scan needs closed-form weights defined on the whole line".into(),
        ));
    }
    if !(horizon > 0.0) || window_grid.is_empty() || window_grid.iter().any(|w| !(*w > 0.0)) || x_samples < 2 {
        return Err(OddsymError::InvalidInput(
            "scan needs a positive horizon, positive window widths and at least two x samples".into(),
        ));
    }
    let xs: Vec<f64> = (0..x_samples)
        .map(|i| horizon * i as f64 / (x_samples - 1) as f64)
        .collect();
    // Cumulative integrals over the sorted window endpoints.
    let mut breaks: Vec<f64> = xs
        .iter()
        .flat_map(|&x| std::iter::once(x).chain(window_grid.iter().map(move |&w| x + w)))
        .collect();
    breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
    breaks.dedup();
    let segment = |f: &(dyn Fn(f64) -> f64 + Sync), lo: f64, hi: f64| {
        let crude = crate::quad::gauss2(&f, lo, hi).abs();
        if !crude.is_finite() {
            return f64::INFINITY;
        }
        integrate(f, lo, hi, 1e-13 * crude.max(f64::MIN_POSITIVE))
    };
    let inv_a = |s: f64| 1.0 / a.eval(s);
    let bw = |s: f64| b.eval(s);
    let pieces: Vec<(f64, f64)> = breaks
        .par_windows(2)
        .map(|w| (segment(&inv_a, w[0], w[1]), segment(&bw, w[0], w[1])))
        .collect();
    let mut cum = vec![(0.0, 0.0); breaks.len()];
    for (i, (pa, pb)) in pieces.iter().enumerate() {
        cum[i + 1] = (cum[i].0 + pa, cum[i].1 + pb);
    }
    let at = |x: f64| {
        let i = breaks.partition_point(|&v| v < x);
        cum[i]
    };
    let windows: Vec<Window> = xs
        .iter()
        .flat_map(|&x| window_grid.iter().map(move |&w| (x, w)))
        .map(|(x, w)| {
            let (a0, b0) = at(x);
            let (a1, b1) = at(x + w);
            let ib = if b1.is_finite() { b1 - b0 } else { f64::INFINITY };
            Window {
                x,
                w,
                int_inv_a: a1 - a0,
                int_b: ib,
            }
        })
        .collect();
    let mut sorted = windows.clone();
    sorted.sort_by(|p, q| {
        p.int_b
            .partial_cmp(&q.int_b)
            .unwrap()
            .then(q.int_inv_a.partial_cmp(&p.int_inv_a).unwrap())
    });
    let mut pareto = Vec::new();
    let mut best_so_far = f64::NEG_INFINITY;
    for w in sorted {
        if w.int_inv_a > best_so_far {
            best_so_far = w.int_inv_a;
            pareto.push(w);
        }
    }
    let best: Vec<(f64, f64, f64)> = SCAN_EPSILONS
        .iter()
        .map(|&eps| {
            let top = windows
                .iter()
                .filter(|w| w.int_b <= eps)
                .map(|w| w.int_inv_a)
                .fold(0.0, f64::max);
            (eps, top, top / eps)
        })
        .collect();
    let unbounded_trend = best.iter().all(|b| b.1 > 0.0)
        && best.windows(2).all(|w| w[1].2 >= SCAN_GROWTH * w[0].2);
    Ok(ScanReport {
        windows,
        pareto,
        best,
        unbounded_trend,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiMonotone {
    /// `(L, Phi_m(L))`.
    pub values: Vec<(f64, f64)>,
    /// Largest increase `Phi(L_{k+1}) - Phi(L_k)`, clamped at 0.
    pub max_increase: f64,
    pub nonincreasing: bool,
}

/// Slack allowed in the monotonicity of `Phi_m`.
pub const PHI_SLACK: f64 = 1e-6;

/// `Phi_m(L)` as the least energy over several starts at `elements_per_unit`
/// elements per unit length.
pub fn phi_monotone_check(p: &Problem, lengths: &[f64], elements_per_unit: f64) -> Result<PhiMonotone> {
    if lengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OddsymError::InvalidInput("L list must be strictly increasing".into()));
    }
    let starts = [Preset::OddTanh, Preset::PlusOne, Preset::MinusOne, Preset::Linear];
    let mut values = Vec::with_capacity(lengths.len());
    for &l in lengths {
        let q = p.with_half_width(l)?;
        let mut n = (2.0 * l * elements_per_unit).ceil() as usize;
        n = n.max(64);
        n += n % 2;
        let energies: Vec<Result<f64>> = starts
            .par_iter()
            .map(|&s| minimize(&q, &Init::Preset(s), n, &MinimizeOptions::default()).map(|sol| sol.energy))
            .collect();
        let mut best = f64::INFINITY;
        let mut last_err = None;
        for e in energies {
            match e {
                Ok(v) => best = best.min(v),
                Err(err) => last_err = Some(err),
            }
        }
        if !best.is_finite() {
            return Err(last_err.unwrap_or_else(|| OddsymError::Invariant("no start converged".into())));
        }
        values.push((l, best));
    }
    let max_increase = values
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .fold(0.0f64, f64::max);
    let scale = values.iter().map(|v| v.1.abs()).fold(1.0, f64::max);
    Ok(PhiMonotone {
        nonincreasing: max_increase <= PHI_SLACK * scale,
        max_increase,
        values,
    })
}

/// `t,<name>` CSV of a sampled curve.
pub fn curve_csv(name: &str, samples: &[(f64, f64)]) -> String {
    let mut s = format!("t,{name}\n");
    for (t, v) in samples {
        s.push_str(&format!("{t:.16e},{v:.16e}\n"));
    }
    s
}

/// `x,w,int_inv_a,int_b` CSV of a window scan.
pub fn scan_csv(windows: &[Window]) -> String {
    let mut s = String::from("x,w,int_inv_a,int_b\n");
    for w in windows {
        s.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            w.x, w.w, w.int_inv_a, w.int_b
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightFamily;

    fn flat(l: f64, m: f64) -> Problem {
        Problem::allen_cahn(l, m).unwrap()
    }

    #[test]
    fn linear_minimum_closed_forms() {
        let one = WeightFn::constant(1.0, 1.0).unwrap();
        let r = linear_energy_min(&one, (0.0, 1.0), 0.0, 1.0, 10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        for (x, u) in r.nodes.iter().zip(&r.minimizer) {
            assert!((x - u).abs() < 1e-14);
        }
        let ex = WeightFn::new(WeightFamily::Polynomial { coeffs: vec![1.0] }, 1.0).unwrap();
        assert!(linear_energy_min(&ex, (1.0, 0.0), 0.0, 1.0, 4).is_err());
        let r = linear_energy_min(&one, (0.0, 1.0), 0.3, 0.3, 4).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.minimizer.iter().all(|&u| u == 0.3));
    }

    #[test]
    fn upper_bound_example() {
        let p = flat(10.0, 1.0);
        let v = upper_bound_phi(&p, 9.0).unwrap();
        assert!((v - 2.5).abs() < 1e-10, "{v}");
        assert!(upper_bound_phi(&p, 10.0).is_err());
        assert!(upper_bound_phi(&p, 9.999999).unwrap() > 1e5);
    }

    #[test]
    fn cas_closed_form_and_scaling() {
        let p = flat(10.0, 1.0);
        let r = antisymmetric_lower_bound(&p).unwrap();
        let exact = 3.0 / (4.0 * 2f64.sqrt());
        assert!((r.value - exact).abs() < 1e-10 * exact, "{} {exact}", r.value);
        assert!((r.g0 - 9.0 / 64.0).abs() < 1e-14);
        let q = Problem::from_families(
            10.0,
            1.0,
            WeightFamily::Constant { c: 1.0 },
            WeightFamily::Constant { c: 2.0 },
            Potential::quartic(1.0).unwrap(),
        )
        .unwrap();
        let r2 = antisymmetric_lower_bound(&q).unwrap();
        assert!((r2.value / r.value - 2f64.sqrt()).abs() < 1e-9);
        assert!(antisymmetric_lower_bound(&flat(10.0, 0.0)).is_err());
    }

    #[test]
    fn criterion_threshold() {
        let r = symmetry_breaking_criterion(&flat(10.0, 0.05)).unwrap();
        assert!((r.lhs - 25.0).abs() < 1e-9 && r.threshold == 2.0 && r.certified);
        let r = symmetry_breaking_criterion(&flat(2.0, 0.05)).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-9 && !r.certified);
        let l = 2.0 * 2f64.sqrt();
        assert!(!symmetry_breaking_criterion(&flat(l * 0.999, 0.0)).unwrap().certified);
        assert!(symmetry_breaking_criterion(&flat(l * 1.001, 0.0)).unwrap().certified);
    }

    #[test]
    fn scan_trends() {
        let widths: Vec<f64> = (0..12).map(|k| 2f64.powi(k - 2)).collect();
        let one = WeightFn::constant(1.0, 1.0).unwrap();
        let decay = WeightFn::power_abs(-2.0, 1.0, 1.0).unwrap();
        let r = interval_sequence_scan(&one, &decay, 4000.0, &widths, 201).unwrap();
        assert!(r.unbounded_trend, "{:?}", r.best);
        let r = interval_sequence_scan(&one, &one, 4000.0, &widths, 201).unwrap();
        assert!(!r.unbounded_trend);
        assert!(r.windows.iter().all(|w| (w.int_b - w.int_inv_a).abs() < 1e-9 * w.w));
        let e = WeightFn::exp_quadratic(1.0, 1.0).unwrap();
        let r = interval_sequence_scan(&e, &e, 20.0, &widths, 101).unwrap();
        assert!(!r.unbounded_trend);
        assert!(r.windows.iter().all(|w| w.int_b >= w.int_inv_a * (1.0 - 1e-9)));
    }

    #[test]
    fn phi_decreases_to_heteroclinic() {
        let r = phi_monotone_check(&flat(2.0, 1.0), &[2.0, 5.0, 10.0, 20.0], 100.0).unwrap();
        assert!(r.nonincreasing, "{:?}", r.values);
        let limit = 2.0 * 2f64.sqrt() / 3.0;
        assert!((r.values[3].1 - limit).abs() < 1e-4);
        let single = phi_monotone_check(&flat(2.0, 1.0), &[3.0], 50.0).unwrap();
        assert!(single.nonincreasing);
    }
}
