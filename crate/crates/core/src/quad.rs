//! Quadrature and monotone interpolation primitives.
//!
//! Everything here works on plain `f64` closures so the weight and potential
//! types can share it without trait gymnastics.

use serde::{Deserialize, Serialize};

use crate::error::OddsymError;

/// Abscissa of the two-point Gauss-Legendre rule on `[-1, 1]`.
pub const GAUSS2_ABSCISSA: f64 = 0.577_350_269_189_625_8;

const GL5_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

/// Two-point Gauss rule on a single panel.
#[inline]
pub fn gauss2<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    half * (f(mid - half * GAUSS2_ABSCISSA) + f(mid + half * GAUSS2_ABSCISSA))
}

fn gl5<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    whole: f64,
    tol: f64,
    prev_err: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (lo + hi);
    let left = gl5(f, lo, mid);
    let right = gl5(f, mid, hi);
    let refined = left + right;
    if !refined.is_finite() {
        return refined;
    }
    let err = (refined - whole).abs();
    // Stop on stagnation.
    if depth == 0 || err <= tol.max(1e-15 * refined.abs()) || err >= prev_err {
        return refined;
    }
    adapt(f, lo, mid, left, 0.5 * tol, err, depth - 1) + adapt(f, mid, hi, right, 0.5 * tol, err, depth - 1)
}

/// Adaptive five-point Gauss-Legendre quadrature with interval bisection.
///
/// `tol` is an absolute error target; the rule stops refining once a panel
/// agrees with its two halves to within its share of `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    if lo == hi {
        return 0.0;
    }
    if hi < lo {
        return -integrate(f, hi, lo, tol);
    }
    let pieces = 16;
    let h = (hi - lo) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let a = lo + h * k as f64;
            let b = if k + 1 == pieces {
                hi
            } else {
                lo + h * (k + 1) as f64
            };
            let whole = gl5(&f, a, b);
            adapt(&f, a, b, whole, tol / pieces as f64, f64::INFINITY, 40)
        })
        .sum()
}

/// Integral over `[1, inf)` through the substitution `x = 1/s`.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: F, tol: f64) -> f64 {
    integrate(
        |s: f64| {
            if s <= 0.0 {
                0.0
            } else {
                f(1.0 / s) / (s * s)
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integral over the whole real line, split at `|x| = 1`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, tol: f64) -> f64 {
    let core = integrate(&f, -1.0, 1.0, tol);
    let right = integrate_tail(&f, tol);
    let left = integrate_tail(|x| f(-x), tol);
    core + left + right
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is below `rel_tol * max(|x|, tiny)`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * c.abs().max(d.abs()).max(1e-300) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Cumulative integral `x -> int_0^x f` tabulated on a symmetric uniform grid
/// over `[-half_width, half_width]`.
///
/// The table is built outward from the origin, so an even integrand yields a
/// bitwise odd primitive. Between nodes the primitive is evaluated by cubic
/// Hermite interpolation using the integrand values as slopes.
#[derive(Debug, Clone)]
pub struct PrefixIntegral {
    half_width: f64,
    panels: usize,
    h: f64,
    /// Primitive at node `i`, indexed from `-half_width`.
    cum: Vec<f64>,
    /// Integrand at node `i`.
    slope: Vec<f64>,
    /// Table is exactly antisymmetric about the origin.
    odd: bool,
}

impl PrefixIntegral {
    /// Builds the table with at least `min_panels` panels (rounded up to an even
    /// count), doubling until two successive tables agree to `rel_tol`.
    pub fn build<F: Fn(f64) -> f64>(
        f: F,
        half_width: f64,
        min_panels: usize,
        rel_tol: f64,
    ) -> Result<Self, OddsymError> {
        let mut panels = min_panels.max(2);
        if panels % 2 == 1 {
            panels += 1;
        }
        let mut coarse = Self::build_fixed(&f, half_width, panels);
        loop {
            let fine = Self::build_fixed(&f, half_width, 2 * panels);
            let scale = fine
                .cum
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
                .max(f64::MIN_POSITIVE);
            let err = coarse
                .cum
                .iter()
                .enumerate()
                .map(|(i, c)| (c - fine.cum[2 * i]).abs())
                .fold(0.0f64, f64::max);
            if err <= rel_tol * scale {
                return Ok(fine);
            }
            if panels >= 1 << 21 {
                return Err(OddsymError::Quadrature(format!(
                    "prefix integral did not reach relative accuracy {rel_tol:e} (estimate {:e})",
                    err / scale
                )));
            }
            panels *= 2;
            coarse = fine;
        }
    }

    fn build_fixed<F: Fn(f64) -> f64>(f: &F, half_width: f64, panels: usize) -> Self {
        let half = panels / 2;
        let node = |i: usize| half_width * (2.0 * i as f64 - panels as f64) / panels as f64;
        let mut cum = vec![0.0; panels + 1];
        for i in half..panels {
            cum[i + 1] = cum[i] + gauss2(f, node(i), node(i + 1));
        }
        for i in (0..half).rev() {
            cum[i] = cum[i + 1] - gauss2(f, node(i), node(i + 1));
        }
        let slope: Vec<f64> = (0..=panels).map(|i| f(node(i))).collect();
        let odd = (0..=half)
            .all(|k| cum[half + k] == -cum[half - k] && slope[half + k] == slope[half - k]);
        PrefixIntegral {
            odd,
            half_width,
            panels,
            h: 2.0 * half_width / panels as f64,
            cum,
            slope,
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    /// Node coordinate `i` of the underlying grid.
    pub fn node(&self, i: usize) -> f64 {
        self.half_width * (2.0 * i as f64 - self.panels as f64) / self.panels as f64
    }

    pub fn node_values(&self) -> &[f64] {
        &self.cum
    }

    /// `int_0^x f`, with `x` clamped to the tabulated range.
    ///
    /// Each panel is parametrized from its end nearer the origin, so an odd
    /// table evaluates to a bitwise odd function.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(-self.half_width, self.half_width);
        let c = self.panels / 2;
        let s = x.abs() / self.h;
        let k = (s.floor() as usize).min(c - 1);
        let tau = (s - k as f64).clamp(0.0, 1.0);
        if x >= 0.0 {
            let i = c + k;
            hermite(
                self.cum[i],
                self.cum[i + 1],
                self.slope[i] * self.h,
                self.slope[i + 1] * self.h,
                tau,
            )
        } else {
            let i = c - k;
            hermite(
                self.cum[i],
                self.cum[i - 1],
                -(self.slope[i] * self.h),
                -(self.slope[i - 1] * self.h),
                tau,
            )
        }
    }

    /// `int_lo^hi f`.
    pub fn between(&self, lo: f64, hi: f64) -> f64 {
        self.eval(hi) - self.eval(lo)
    }

    /// Inverse of the primitive for a positive integrand.
    pub fn inverse(&self, y: f64) -> f64 {
        if self.odd && y < 0.0 {
            return -self.inverse(-y);
        }
        let lo_val = self.cum[0];
        let hi_val = self.cum[self.panels];
        if y <= lo_val {
            return -self.half_width;
        }
        if y >= hi_val {
            return self.half_width;
        }
        // Locate the panel, then Newton safeguarded by bisection inside it.
        let i = match self.cum.binary_search_by(|v| v.partial_cmp(&y).unwrap()) {
            Ok(k) => return self.node(k),
            Err(k) => k - 1,
        };
        let (c0, c1) = (self.cum[i], self.cum[i + 1]);
        let (d0, d1) = (self.slope[i] * self.h, self.slope[i + 1] * self.h);
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let mut tau = ((y - c0) / (c1 - c0)).clamp(0.0, 1.0);
        for _ in 0..60 {
            let val = hermite(c0, c1, d0, d1, tau) - y;
            if val == 0.0 {
                break;
            }
            if val > 0.0 {
                b = tau;
            } else {
                a = tau;
            }
            let der = hermite_d(c0, c1, d0, d1, tau);
            let newton = if der > 0.0 { tau - val / der } else { f64::NAN };
            if newton >= a && newton <= b && (newton - tau).abs() <= 64.0 * f64::EPSILON {
                tau = newton;
                break;
            }
            tau = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
        }
        self.node(i) + tau * self.h
    }
}

#[inline]
fn hermite(p0: f64, p1: f64, m0: f64, m1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * p0
        + (t3 - 2.0 * t2 + t) * m0
        + (-2.0 * t3 + 3.0 * t2) * p1
        + (t3 - t2) * m1
}

#[inline]
fn hermite_d(p0: f64, p1: f64, m0: f64, m1: f64, t: f64) -> f64 {
    let t2 = t * t;
    (6.0 * t2 - 6.0 * t) * p0
        + (3.0 * t2 - 4.0 * t + 1.0) * m0
        + (-6.0 * t2 + 6.0 * t) * p1
        + (3.0 * t2 - 2.0 * t) * m1
}

/// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes).
///
/// Preserves monotonicity of the data on each interval and never overshoots a
/// local extremum, so positive data stays positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, OddsymError> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(OddsymError::InvalidInput(
                "monotone cubic needs at least two (x, y) pairs of equal length".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(OddsymError::InvalidInput(
                "monotone cubic nodes must be strictly increasing".into(),
            ));
        }
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ds = vec![0.0; n];
        if n == 2 {
            ds[0] = delta[0];
            ds[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            ds[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            ds[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(MonotoneCubic { xs, ys, ds })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let n = self.xs.len();
        let x = x.clamp(self.xs[0], self.xs[n - 1]);
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(k) => k.min(n - 2),
            Err(k) => (k - 1).min(n - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        (i, ((x - self.xs[i]) / h).clamp(0.0, 1.0), h)
    }

    /// Value; constant extrapolation outside the node range.
    pub fn eval(&self, x: f64) -> f64 {
        let (i, t, h) = self.locate(x);
        hermite(
            self.ys[i],
            self.ys[i + 1],
            self.ds[i] * h,
            self.ds[i + 1] * h,
            t,
        )
    }

    /// First derivative of the interpolant (zero outside the node range).
    pub fn d1(&self, x: f64) -> f64 {
        if x < self.xs[0] || x > self.xs[self.xs.len() - 1] {
            return 0.0;
        }
        let (i, t, h) = self.locate(x);
        hermite_d(
            self.ys[i],
            self.ys[i + 1],
            self.ds[i] * h,
            self.ds[i + 1] * h,
            t,
        ) / h
    }

    /// Second derivative of the interpolant; discontinuous across nodes.
    pub fn d2(&self, x: f64) -> f64 {
        if x < self.xs[0] || x > self.xs[self.xs.len() - 1] {
            return 0.0;
        }
        let (i, t, h) = self.locate(x);
        let (p0, p1, m0, m1) = (
            self.ys[i],
            self.ys[i + 1],
            self.ds[i] * h,
            self.ds[i + 1] * h,
        );
        ((12.0 * t - 6.0) * p0
            + (6.0 * t - 4.0) * m0
            + (-12.0 * t + 6.0) * p1
            + (6.0 * t - 2.0) * m1)
            / (h * h)
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss2_is_exact_for_cubics() {
        let f = |x: f64| 3.0 * x * x * x - x * x + 2.0;
        let exact = |x: f64| 0.75 * x.powi(4) - x.powi(3) / 3.0 + 2.0 * x;
        assert!((gauss2(&f, -0.3, 1.7) - (exact(1.7) - exact(-0.3))).abs() < 1e-14);
    }

    #[test]
    fn adaptive_quadrature_gaussian() {
        let v = integrate_real_line(|x| (-x * x).exp(), 1e-13);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11, "{v}");
    }

    #[test]
    fn prefix_integral_of_even_function_is_odd() {
        let p = PrefixIntegral::build(|x: f64| (x * x).exp(), 1.0, 64, 1e-12).unwrap();
        for &x in &[0.1, 0.37, 0.999] {
            assert_eq!(p.eval(x), -p.eval(-x));
        }
        assert_eq!(p.eval(0.0), 0.0);
        let exact = integrate(|x: f64| (x * x).exp(), 0.0, 0.37, 1e-14);
        assert!((p.eval(0.37) - exact).abs() < 1e-11);
    }

    #[test]
    fn prefix_inverse_round_trips() {
        let p = PrefixIntegral::build(|x: f64| 1.0 + x * x, 2.0, 128, 1e-12).unwrap();
        for k in 0..50 {
            let x = -2.0 + 4.0 * k as f64 / 49.0;
            assert!((p.inverse(p.eval(x)) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_cubic_preserves_monotone_data() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys = vec![0.0, 0.0, 0.1, 0.1, 2.0, 2.0, 2.1, 5.0, 5.0, 5.0];
        let m = MonotoneCubic::new(xs, ys).unwrap();
        let mut prev = m.eval(0.0);
        for k in 1..=900 {
            let v = m.eval(k as f64 * 0.01);
            assert!(v >= prev - 1e-14);
            prev = v;
        }
    }

    #[test]
    fn monotone_cubic_reproduces_lines() {
        let xs = vec![0.0, 0.5, 1.5, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let m = MonotoneCubic::new(xs, ys).unwrap();
        assert!((m.eval(2.2) - 5.4).abs() < 1e-14);
        assert!((m.d1(2.2) - 2.0).abs() < 1e-13);
        assert!(m.d2(2.2).abs() < 1e-12);
    }
}
