//! Weights `a`, `b`, the double-well potential `G`, and the full variational
//! instance together with its structural hypotheses.

use serde::{Deserialize, Serialize};

use crate::error::{OddsymError, Result};
use crate::mesh::{energy_on_nodes, GridFunction};
use crate::quad::{MonotoneCubic, PrefixIntegral};

/// Verdict tolerance for margins computed from exact derivatives.
pub const EXACT_TOL: f64 = 1e-10;
/// Verdict tolerance for margins computed by finite differences.
pub const FD_TOL: f64 = 1e-6;
/// Default sample count for hypothesis checks.
pub const DEFAULT_GRID: usize = 2049;

const POSITIVITY_SAMPLES: usize = 2049;
const EVEN_TOL: f64 = 1e-12;

/// Closed families of positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightFamily {
    /// `c`
    Constant { c: f64 },
    /// `exp(alpha x^2)`
    ExpQuadratic { alpha: f64 },
    /// `(|x| + delta)^beta`
    PowerAbs { beta: f64, delta: f64 },
    /// `sum c_k x^k`
    Polynomial { coeffs: Vec<f64> },
    /// Monotone cubic through sampled data.
    Tabulated { interp: MonotoneCubic },
}

/// A positive weight on `[-L, L]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFn {
    family: WeightFamily,
    half_width: f64,
    even: bool,
}

impl WeightFn {
    pub fn new(family: WeightFamily, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(OddsymError::InvalidInput(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        match &family {
            WeightFamily::Constant { c } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(OddsymError::InvalidInput(format!(
                        "constant weight must be positive, got {c}"
                    )));
                }
            }
            WeightFamily::ExpQuadratic { alpha } => {
                if !alpha.is_finite() || alpha * half_width * half_width > 700.0 {
                    return Err(OddsymError::InvalidInput(format!(
                        "exp_quadratic weight with alpha {alpha} overflows on [-{half_width}, {half_width}]"
                    )));
                }
            }
            WeightFamily::PowerAbs { beta, delta } => {
                if !(beta.is_finite() && delta.is_finite() && *delta >= 0.0) {
                    return Err(OddsymError::InvalidInput(
                        "power_abs needs finite beta and delta >= 0".into(),
                    ));
                }
                if *delta == 0.0 && *beta != 0.0 {
                    return Err(OddsymError::InvalidInput(format!(
                        "power_abs with delta = 0 and beta = {beta} degenerates at the origin"
                    )));
                }
            }
            WeightFamily::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(OddsymError::InvalidInput(
                        "polynomial weight needs finite coefficients".into(),
                    ));
                }
            }
            WeightFamily::Tabulated { interp } => {
                let xs = interp.xs();
                if xs[0] > -half_width + 1e-9 * half_width {
                    return Err(OddsymError::InvalidInput(
                        "tabulated weight does not cover [-L, L]".into(),
                    ));
                }
                if xs[xs.len() - 1] < half_width - 1e-9 * half_width {
                    return Err(OddsymError::InvalidInput(
                        "tabulated weight does not cover [-L, L]".into(),
                    ));
                }
                if interp.ys().iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(OddsymError::InvalidInput(
                        "tabulated weight values must be positive".into(),
                    ));
                }
            }
        }
        let mut w = WeightFn {
            family,
            half_width,
            even: false,
        };
        let n = if matches!(w.family, WeightFamily::Polynomial { .. }) {
            2 * POSITIVITY_SAMPLES - 1
        } else {
            POSITIVITY_SAMPLES
        };
        for x in sample_grid(half_width, n) {
            let v = w.eval(x);
            if !(v > 0.0 && v.is_finite()) {
                return Err(OddsymError::InvalidInput(format!(
                    "weight not positive at x = {x} (value {v})"
                )));
            }
        }
        w.even = w.evenness_defect(DEFAULT_GRID) <= EVEN_TOL;
        Ok(w)
    }

    pub fn constant(c: f64, half_width: f64) -> Result<Self> {
        Self::new(WeightFamily::Constant { c }, half_width)
    }

    pub fn exp_quadratic(alpha: f64, half_width: f64) -> Result<Self> {
        Self::new(WeightFamily::ExpQuadratic { alpha }, half_width)
    }

    pub fn power_abs(beta: f64, delta: f64, half_width: f64) -> Result<Self> {
        Self::new(WeightFamily::PowerAbs { beta, delta }, half_width)
    }

    pub fn polynomial(coeffs: Vec<f64>, half_width: f64) -> Result<Self> {
        Self::new(WeightFamily::Polynomial { coeffs }, half_width)
    }

    pub fn tabulated(nodes: Vec<f64>, values: Vec<f64>, half_width: f64) -> Result<Self> {
        Self::new(
            WeightFamily::Tabulated {
                interp: MonotoneCubic::new(nodes, values)?,
            },
            half_width,
        )
    }

    /// Same family on another interval.
    pub fn with_half_width(&self, half_width: f64) -> Result<Self> {
        Self::new(self.family.clone(), half_width)
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self.family {
            WeightFamily::Constant { c } => Some(c),
            _ => None,
        }
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.family, WeightFamily::Tabulated { .. })
    }

    /// Whether the closed form makes sense on all of the real line.
    pub fn extendable(&self) -> bool {
        !self.is_tabulated()
    }

    pub fn name(&self) -> String {
        match &self.family {
            WeightFamily::Constant { c } => format!("constant({c})"),
            WeightFamily::ExpQuadratic { alpha } => format!("exp_quadratic({alpha})"),
            WeightFamily::PowerAbs { beta, delta } => format!("power_abs({beta}, {delta})"),
            WeightFamily::Polynomial { coeffs } => format!("polynomial({coeffs:?})"),
            WeightFamily::Tabulated { interp } => format!("tabulated({} nodes)", interp.xs().len()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Constant { c } => *c,
            WeightFamily::ExpQuadratic { alpha } => (alpha * x * x).exp(),
            WeightFamily::PowerAbs { beta, delta } => (x.abs() + delta).powf(*beta),
            WeightFamily::Polynomial { coeffs } => horner(coeffs, x),
            WeightFamily::Tabulated { interp } => interp.eval(x),
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Constant { .. } => 0.0,
            WeightFamily::ExpQuadratic { alpha } => 2.0 * alpha * x * (alpha * x * x).exp(),
            WeightFamily::PowerAbs { beta, delta } => {
                if x == 0.0 || *beta == 0.0 {
                    0.0
                } else {
                    beta * x.signum() * (x.abs() + delta).powf(beta - 1.0)
                }
            }
            WeightFamily::Polynomial { coeffs } => horner(&derivative(coeffs), x),
            WeightFamily::Tabulated { interp } => interp.d1(x),
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Constant { .. } => 0.0,
            WeightFamily::ExpQuadratic { alpha } => {
                (2.0 * alpha + 4.0 * alpha * alpha * x * x) * (alpha * x * x).exp()
            }
            WeightFamily::PowerAbs { beta, delta } => {
                beta * (beta - 1.0) * (x.abs() + delta).powf(beta - 2.0)
            }
            WeightFamily::Polynomial { coeffs } => horner(&derivative(&derivative(coeffs)), x),
            WeightFamily::Tabulated { interp } => interp.d2(x),
        }
    }

    /// `max |w(x) - w(-x)| / |w(x)|` over `n` samples.
    pub fn evenness_defect(&self, n: usize) -> f64 {
        sample_grid(self.half_width, n)
            .into_iter()
            .map(|x| {
                let v = self.eval(x);
                (v - self.eval(-x)).abs() / v.abs()
            })
            .fold(0.0, f64::max)
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect()
}

/// `n` equispaced samples of `[-L, L]`, exactly symmetric.
pub fn sample_grid(half_width: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| half_width * (2.0 * i as f64 - (n - 1) as f64) / (n - 1) as f64)
        .collect()
}

/// Even double-well potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PotentialFamily {
    /// `(M^2 - s^2)^2 / 4`
    Quartic { well: f64 },
    /// `sum c_k s^(2k)`
    EvenPolynomial { coeffs: Vec<f64> },
    /// `G(s) = g(|s|)` with `g` a monotone cubic through data on `[0, S]`.
    TabulatedEven { interp: MonotoneCubic },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    family: PotentialFamily,
    well: f64,
}

impl Potential {
    /// `well` is the location `M > 0` of the wells.
    pub fn new(family: PotentialFamily, well: f64) -> Result<Self> {
        if !(well > 0.0 && well.is_finite()) {
            return Err(OddsymError::InvalidInput(format!(
                "well location must be positive, got {well}"
            )));
        }
        match &family {
            PotentialFamily::Quartic { well: w } => {
                if (w - well).abs() > 0.0 {
                    return Err(OddsymError::InvalidInput("quartic well mismatch".into()));
                }
            }
            PotentialFamily::EvenPolynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(OddsymError::InvalidInput(
                        "even polynomial needs finite coefficients".into(),
                    ));
                }
            }
            PotentialFamily::TabulatedEven { interp } => {
                if interp.xs()[0] != 0.0 {
                    return Err(OddsymError::InvalidInput(
                        "tabulated even potential must start at s = 0".into(),
                    ));
                }
            }
        }
        Ok(Potential { family, well })
    }

    pub fn quartic(well: f64) -> Result<Self> {
        Self::new(PotentialFamily::Quartic { well }, well)
    }

    /// `coeffs[k]` multiplies `s^(2k)`.
    pub fn even_polynomial(coeffs: Vec<f64>, well: f64) -> Result<Self> {
        Self::new(PotentialFamily::EvenPolynomial { coeffs }, well)
    }

    pub fn tabulated_even(nodes: Vec<f64>, values: Vec<f64>, well: f64) -> Result<Self> {
        Self::new(
            PotentialFamily::TabulatedEven {
                interp: MonotoneCubic::new(nodes, values)?,
            },
            well,
        )
    }

    /// Verifies the double-well shape: `G >= G(M)` on `[-3M, 3M]`.
    pub fn check_double_well(&self) -> Result<()> {
        let gm = self.eval(self.well);
        for s in sample_grid(3.0 * self.well, 4097) {
            if self.eval(s) < gm - EXACT_TOL * gm.abs().max(1.0) {
                return Err(OddsymError::InvalidInput(format!(
                    "G({s}) = {} is below G(M) = {gm}",
                    self.eval(s)
                )));
            }
        }
        Ok(())
    }

    pub fn family(&self) -> &PotentialFamily {
        &self.family
    }

    pub fn well(&self) -> f64 {
        self.well
    }

    pub fn name(&self) -> String {
        match &self.family {
            PotentialFamily::Quartic { well } => format!("quartic({well})"),
            PotentialFamily::EvenPolynomial { coeffs } => format!("even_polynomial({coeffs:?})"),
            PotentialFamily::TabulatedEven { interp } => {
                format!("tabulated_even({} nodes)", interp.xs().len())
            }
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match &self.family {
            PotentialFamily::Quartic { well } => {
                let d = well * well - s * s;
                0.25 * d * d
            }
            PotentialFamily::EvenPolynomial { coeffs } => horner(coeffs, s * s),
            PotentialFamily::TabulatedEven { interp } => interp.eval(s.abs()),
        }
    }

    /// `G'(s)`.
    pub fn d1(&self, s: f64) -> f64 {
        match &self.family {
            PotentialFamily::Quartic { well } => s * s * s - well * well * s,
            PotentialFamily::EvenPolynomial { coeffs } => {
                2.0 * s * horner(&derivative(coeffs), s * s)
            }
            PotentialFamily::TabulatedEven { interp } => {
                if s == 0.0 {
                    0.0
                } else {
                    s.signum() * interp.d1(s.abs())
                }
            }
        }
    }

    pub fn d2(&self, s: f64) -> f64 {
        match &self.family {
            PotentialFamily::Quartic { well } => 3.0 * s * s - well * well,
            PotentialFamily::EvenPolynomial { coeffs } => {
                let d = derivative(coeffs);
                let dd = derivative(&d);
                2.0 * horner(&d, s * s) + 4.0 * s * s * horner(&dd, s * s)
            }
            PotentialFamily::TabulatedEven { interp } => interp.d2(s.abs()),
        }
    }

    /// `G'''(s)` where the family provides it.
    pub fn d3(&self, s: f64) -> Option<f64> {
        match &self.family {
            PotentialFamily::Quartic { .. } => Some(6.0 * s),
            PotentialFamily::EvenPolynomial { .. } => {
                let c = self.dense_coeffs()?;
                Some(horner(&derivative(&derivative(&derivative(&c))), s))
            }
            PotentialFamily::TabulatedEven { .. } => None,
        }
    }

    /// The nonlinearity `f = -G'`.
    #[inline]
    pub fn f(&self, s: f64) -> f64 {
        -self.d1(s)
    }

    /// Coefficients in powers of `s` for polynomial families.
    pub fn dense_coeffs(&self) -> Option<Vec<f64>> {
        match &self.family {
            PotentialFamily::Quartic { well } => {
                let m2 = well * well;
                Some(vec![0.25 * m2 * m2, 0.0, -0.5 * m2, 0.0, 0.25])
            }
            PotentialFamily::EvenPolynomial { coeffs } => {
                let mut c = vec![0.0; 2 * coeffs.len() - 1];
                for (k, &ck) in coeffs.iter().enumerate() {
                    c[2 * k] = ck;
                }
                Some(c)
            }
            PotentialFamily::TabulatedEven { .. } => None,
        }
    }
}

/// Serializable description of a [`Problem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub m: f64,
    pub a: WeightFamily,
    pub b: WeightFamily,
    #[serde(rename = "G")]
    pub g: PotentialFamily,
    #[serde(rename = "M")]
    pub well: f64,
}

/// The instance `(L, m, a, b, G)` with prefix integrals of `1/a`, `b` and
/// `sqrt(b/a)` measured from the origin.
#[derive(Debug, Clone)]
pub struct Problem {
    half_width: f64,
    m: f64,
    a: WeightFn,
    b: WeightFn,
    g: Potential,
    int_inv_a: PrefixIntegral,
    int_b: PrefixIntegral,
    int_sqrt_ba: PrefixIntegral,
}

pub const PREFIX_PANELS: usize = 4096;
pub const PREFIX_REL_TOL: f64 = 1e-10;

impl Problem {
    pub fn new(half_width: f64, m: f64, a: WeightFn, b: WeightFn, g: Potential) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(OddsymError::InvalidInput(format!(
                "boundary value m must be >= 0, got {m}"
            )));
        }
        if a.half_width() != half_width || b.half_width() != half_width {
            return Err(OddsymError::InvalidInput(format!(
                "weights built for half widths {} and {}, problem has {half_width}",
                a.half_width(),
                b.half_width()
            )));
        }
        let int_inv_a = PrefixIntegral::build(
            |x| 1.0 / a.eval(x),
            half_width,
            PREFIX_PANELS,
            PREFIX_REL_TOL,
        )?;
        let int_b =
            PrefixIntegral::build(|x| b.eval(x), half_width, PREFIX_PANELS, PREFIX_REL_TOL)?;
        let int_sqrt_ba = PrefixIntegral::build(
            |x| (b.eval(x) / a.eval(x)).sqrt(),
            half_width,
            PREFIX_PANELS,
            PREFIX_REL_TOL,
        )?;
        for p in [&int_inv_a, &int_b, &int_sqrt_ba] {
            if p.node_values().windows(2).any(|w| !(w[1] > w[0])) {
                return Err(OddsymError::Invariant(
                    "prefix integral not strictly increasing".into(),
                ));
            }
        }
        Ok(Problem {
            half_width,
            m,
            a,
            b,
            g,
            int_inv_a,
            int_b,
            int_sqrt_ba,
        })
    }

    /// Builds both weights on `[-L, L]` from their families.
    pub fn from_families(
        half_width: f64,
        m: f64,
        a: WeightFamily,
        b: WeightFamily,
        g: Potential,
    ) -> Result<Self> {
        Self::new(
            half_width,
            m,
            WeightFn::new(a, half_width)?,
            WeightFn::new(b, half_width)?,
            g,
        )
    }

    pub fn from_spec(spec: &ProblemSpec) -> Result<Self> {
        Self::from_families(
            spec.half_width,
            spec.m,
            spec.a.clone(),
            spec.b.clone(),
            Potential::new(spec.g.clone(), spec.well)?,
        )
    }

    /// `a = b = 1`, `G = (1 - s^2)^2 / 4`.
    pub fn allen_cahn(half_width: f64, m: f64) -> Result<Self> {
        Self::from_families(
            half_width,
            m,
            WeightFamily::Constant { c: 1.0 },
            WeightFamily::Constant { c: 1.0 },
            Potential::quartic(1.0)?,
        )
    }

    pub fn spec(&self) -> ProblemSpec {
        ProblemSpec {
            half_width: self.half_width,
            m: self.m,
            a: self.a.family().clone(),
            b: self.b.family().clone(),
            g: self.g.family().clone(),
            well: self.g.well(),
        }
    }

    pub fn with_half_width(&self, half_width: f64) -> Result<Self> {
        Self::new(
            half_width,
            self.m,
            self.a.with_half_width(half_width)?,
            self.b.with_half_width(half_width)?,
            self.g.clone(),
        )
    }

    pub fn with_m(&self, m: f64) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(OddsymError::InvalidInput(format!(
                "boundary value m must be >= 0, got {m}"
            )));
        }
        let mut p = self.clone();
        p.m = m;
        Ok(p)
    }

    pub fn with_potential(&self, g: Potential) -> Self {
        let mut p = self.clone();
        p.g = g;
        p
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn a(&self) -> &WeightFn {
        &self.a
    }

    pub fn b(&self) -> &WeightFn {
        &self.b
    }

    pub fn potential(&self) -> &Potential {
        &self.g
    }

    /// `int_0^x 1/a`.
    pub fn int_inv_a(&self, x: f64) -> f64 {
        self.int_inv_a.eval(x)
    }

    /// `int_0^x b`.
    pub fn int_b(&self, x: f64) -> f64 {
        self.int_b.eval(x)
    }

    /// `int_0^x sqrt(b/a)`.
    pub fn int_sqrt_ba(&self, x: f64) -> f64 {
        self.int_sqrt_ba.eval(x)
    }

    pub fn prefix_inv_a(&self) -> &PrefixIntegral {
        &self.int_inv_a
    }

    pub fn prefix_b(&self) -> &PrefixIntegral {
        &self.int_b
    }

    pub fn prefix_sqrt_ba(&self) -> &PrefixIntegral {
        &self.int_sqrt_ba
    }

    pub fn is_even(&self) -> bool {
        self.a.is_even() && self.b.is_even()
    }
}

/// A named boolean verdict with the signed margin it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub margin: f64,
}

impl Verdict {
    fn from_margin(margin: f64, tol: f64) -> Self {
        Verdict {
            holds: margin >= -tol,
            margin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub even_a: Verdict,
    pub even_b: Verdict,
    #[serde(rename = "even_G")]
    pub even_g: Verdict,
    /// inf of `(log a)''`.
    pub log_convex_a: Verdict,
    /// inf of `(sqrt(a~))''` in the chart where `b~ = 1`.
    pub sqrt_convex: Verdict,
    /// Monotonicity defect of `(sqrt(ab))'/b`.
    pub berestycki_niren: Verdict,
    /// inf of `(ab)'` on `(0, L)`.
    pub ab_increasing: Verdict,
    /// Smallest admissible split point of the sign pattern of `(ab)'`.
    pub muffin_x0: Option<f64>,
    /// Double-well condition with the potential's own `M`.
    pub double_bis: Verdict,
    #[serde(rename = "G_above_Gm")]
    pub g_above_gm: Verdict,
    #[serde(rename = "Gprime_nonpos_on_0m")]
    pub gprime_nonpos_on_0m: Verdict,
    pub finite_difference: bool,
    pub tolerance: f64,
    pub grid_points: usize,
}

impl HypothesisReport {
    pub fn all_even(&self) -> bool {
        self.even_a.holds && self.even_b.holds && self.even_g.holds
    }

    /// Uniqueness, oddness and monotonicity under `(ab)' >= 0`.
    pub fn unique_by_ab_monotone(&self, m: f64) -> bool {
        m > 0.0
            && self.all_even()
            && self.ab_increasing.holds
            && self.g_above_gm.holds
            && self.gprime_nonpos_on_0m.holds
    }

    /// Uniqueness under the Berestycki-Nirenberg condition.
    pub fn unique_by_bn(&self, m: f64) -> bool {
        m > 0.0 && self.berestycki_niren.holds && self.g_above_gm.holds
    }

    /// Every solution increasing, first alternative.
    pub fn increasing_by_muffin(&self, m: f64) -> bool {
        m > 0.0 && self.muffin_x0.is_some() && self.g_above_gm.holds
    }

    /// Every solution increasing, second alternative.
    pub fn increasing_by_double_bound(&self, m: f64) -> bool {
        m > 0.0 && self.muffin_x0.is_some() && self.double_bis.holds
    }

    /// Rearrangement inequalities applicable.
    pub fn rearrangement_applies(&self) -> bool {
        self.all_even() && self.sqrt_convex.holds
    }

    pub fn uniqueness_certified(&self, m: f64) -> bool {
        self.unique_by_ab_monotone(m) || self.unique_by_bn(m)
    }
}

fn require_smooth(p: &Problem, condition: &str) -> Result<()> {
    if p.a().is_tabulated() || p.b().is_tabulated() {
        return Err(OddsymError::InsufficientSmoothness {
            condition: condition.to_string(),
        });
    }
    Ok(())
}

/// Evaluates every structural hypothesis on `grid_points` samples of `[-L, L]`.
pub fn check_hypotheses(p: &Problem, grid_points: usize) -> Result<HypothesisReport> {
    if grid_points < 101 {
        return Err(OddsymError::InvalidInput(format!(
            "grid_points must be >= 101, got {grid_points}"
        )));
    }
    require_smooth(p, "log_convex_a")?;
    require_smooth(p, "sqrt_convex")?;
    require_smooth(p, "berestycki_niren")?;
    Ok(build_report(p, grid_points, true))
}

/// Like [`check_hypotheses`] but tolerates tabulated weights: second-order
/// conditions are then reported as failing with a `-inf` margin and the
/// first-order ones fall back to centered finite differences.
pub fn check_hypotheses_lenient(p: &Problem, grid_points: usize) -> Result<HypothesisReport> {
    if grid_points < 101 {
        return Err(OddsymError::InvalidInput(format!(
            "grid_points must be >= 101, got {grid_points}"
        )));
    }
    let smooth = !(p.a().is_tabulated() || p.b().is_tabulated());
    Ok(build_report(p, grid_points, smooth))
}

fn build_report(p: &Problem, grid_points: usize, smooth: bool) -> HypothesisReport {
    let l = p.half_width();
    let m = p.m();
    let (a, b, g) = (p.a(), p.b(), p.potential());
    let xs = sample_grid(l, grid_points);
    let fd_step = 2.0 * l / (8.0 * grid_points as f64);
    let tol = if smooth { EXACT_TOL } else { FD_TOL };

    let even = |w: &WeightFn| Verdict::from_margin(-w.evenness_defect(grid_points), tol);
    let big_s = 3.0 * m.max(g.well());
    let ss = sample_grid(big_s, 4097);
    let even_g = Verdict::from_margin(
        -ss.iter()
            .map(|&s| (g.eval(s) - g.eval(-s)).abs() / g.eval(s).abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max),
        tol,
    );

    let ab_prime = |x: f64| -> f64 {
        if smooth {
            a.d1(x) * b.eval(x) + a.eval(x) * b.d1(x)
        } else {
            let xp = (x + fd_step).min(l);
            let xm = (x - fd_step).max(-l);
            (a.eval(xp) * b.eval(xp) - a.eval(xm) * b.eval(xm)) / (xp - xm)
        }
    };

    let (log_convex_a, sqrt_convex, berestycki_niren) = if smooth {
        let mut lc = f64::INFINITY;
        let mut sc = f64::INFINITY;
        let mut bn = f64::INFINITY;
        let mut prev: Option<(f64, f64, f64)> = None;
        for &x in &xs {
            let (av, a1, a2) = (a.eval(x), a.d1(x), a.d2(x));
            let (bv, b1, b2) = (b.eval(x), b.d1(x), b.d2(x));
            let la = a1 / av;
            lc = lc.min(a2 / av - la * la);
            let pp = av * bv;
            let p1 = a1 * bv + av * b1;
            let p2 = a2 * bv + 2.0 * a1 * b1 + av * b2;
            let sq = pp.sqrt();
            let sq1 = p1 / (2.0 * sq);
            let sq2 = p2 / (2.0 * sq) - p1 * p1 / (4.0 * pp * sq);
            let q = sq1 / bv;
            let q1 = (sq2 * bv - sq1 * b1) / (bv * bv);
            bn = bn.min(q1);
            sc = sc.min(q1 / bv);
            if let Some((xp, lap, qp)) = prev {
                lc = lc.min((la - lap) / (x - xp));
                bn = bn.min((q - qp) / (x - xp));
                sc = sc.min((q - qp) / p.prefix_b().between(xp, x));
            }
            prev = Some((x, la, q));
        }
        (
            Verdict::from_margin(lc, tol),
            Verdict::from_margin(sc, tol),
            Verdict::from_margin(bn, tol),
        )
    } else {
        let unavailable = Verdict {
            holds: false,
            margin: f64::NEG_INFINITY,
        };
        (unavailable, unavailable, unavailable)
    };

    let abp: Vec<f64> = xs.iter().map(|&x| ab_prime(x)).collect();
    let ab_inc = xs
        .iter()
        .zip(&abp)
        .filter(|(x, _)| **x > 0.0 && **x < l)
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    let ab_increasing = Verdict::from_margin(if ab_inc.is_finite() { ab_inc } else { 0.0 }, tol);

    // Split point: first sample k with (ab)' <= tol on (-L, x_k] and >= -tol on [x_k, L).
    let n = xs.len();
    let mut ok_left = vec![true; n];
    for k in 1..n {
        ok_left[k] = ok_left[k - 1] && abp[k] <= tol;
    }
    // Both ends of [-L, L] are excluded from the open half-intervals.
    let mut ok_right = vec![true; n];
    for k in (0..n - 1).rev() {
        let here = k == 0 || abp[k] >= -tol;
        ok_right[k] = ok_right[k + 1] && here;
    }
    let muffin_x0 = (0..n).find(|&k| ok_left[k] && ok_right[k]).map(|k| xs[k]);

    let gm = g.eval(m);
    let g_above_gm = Verdict::from_margin(
        ss.iter()
            .map(|&s| g.eval(s) - gm)
            .fold(f64::INFINITY, f64::min),
        tol,
    );
    let gprime_nonpos = if m > 0.0 {
        let mut worst = f64::INFINITY;
        for k in 1..4096 {
            let s = m * k as f64 / 4096.0;
            worst = worst.min(-g.d1(s));
        }
        worst
    } else {
        0.0
    };
    let gprime_nonpos_on_0m = Verdict::from_margin(gprime_nonpos, tol);

    let well = g.well();
    let gw = g.eval(well);
    let mut db = m - well;
    for &s in &sample_grid(well, 2049) {
        db = db.min(g.eval(s) - gw);
    }
    if big_s > well {
        for k in 1..=4096 {
            let s = well + (big_s - well) * k as f64 / 4096.0;
            db = db.min(g.d1(s)).min(-g.d1(-s));
        }
    }
    let double_bis = Verdict::from_margin(db, tol);

    HypothesisReport {
        even_a: even(a),
        even_b: even(b),
        even_g,
        log_convex_a,
        sqrt_convex,
        berestycki_niren,
        ab_increasing,
        muffin_x0,
        double_bis,
        g_above_gm,
        gprime_nonpos_on_0m,
        finite_difference: !smooth,
        tolerance: tol,
        grid_points,
    }
}

/// Change of variables of the independent variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    /// `y = int_0^x sqrt(b/a)`, after which `a~ = b~`.
    Gamma1,
    /// `y = int_0^x b`, after which `b~ = 1`.
    Gamma2,
}

impl Transform {
    fn is_identity(self, p: &Problem) -> bool {
        match self {
            Transform::Gamma1 => p.a().family() == p.b().family(),
            Transform::Gamma2 => p.b().family() == &WeightFamily::Constant { c: 1.0 },
        }
    }

    fn prefix<'a>(self, p: &'a Problem) -> &'a PrefixIntegral {
        match self {
            Transform::Gamma1 => p.prefix_sqrt_ba(),
            Transform::Gamma2 => p.prefix_b(),
        }
    }
}

/// The problem written in the variable `y = gamma(x)`: `a~ = (a gamma') o gamma^-1`,
/// `b~ = (b / gamma') o gamma^-1` on `(-gamma(L), gamma(L))`.
pub fn change_of_variables(p: &Problem, which: Transform) -> Result<Problem> {
    if which.is_identity(p) {
        return Ok(p.clone());
    }
    if let (Some(ca), Some(cb)) = (p.a().is_constant(), p.b().is_constant()) {
        let (scale, at, bt) = match which {
            Transform::Gamma1 => ((cb / ca).sqrt(), (ca * cb).sqrt(), (ca * cb).sqrt()),
            Transform::Gamma2 => (cb, ca * cb, 1.0),
        };
        let l = p.half_width() * scale;
        return Problem::from_families(
            l,
            p.m(),
            WeightFamily::Constant { c: at },
            WeightFamily::Constant { c: bt },
            p.potential().clone(),
        );
    }
    let prefix = which.prefix(p);
    let l_new = prefix.eval(p.half_width());
    let l_left = -prefix.eval(-p.half_width());
    if (l_new - l_left).abs() > 1e-9 * l_new {
        return Err(OddsymError::InvalidInput(
            "change of variables needs even weights (image interval not symmetric)".into(),
        ));
    }
    let n = prefix.panels();
    let mut ys: Vec<f64> = prefix.node_values().to_vec();
    ys[0] = -l_new;
    ys[n] = l_new;
    let (a, b) = (p.a(), p.b());
    let xs: Vec<f64> = (0..=n).map(|i| prefix.node(i)).collect();
    let a_new: Vec<f64> = xs
        .iter()
        .map(|&x| match which {
            Transform::Gamma1 => (a.eval(x) * b.eval(x)).sqrt(),
            Transform::Gamma2 => a.eval(x) * b.eval(x),
        })
        .collect();
    let at = WeightFn::tabulated(ys.clone(), a_new.clone(), l_new)?;
    let bt = match which {
        Transform::Gamma1 => WeightFn::new(at.family().clone(), l_new)?,
        Transform::Gamma2 => WeightFn::constant(1.0, l_new)?,
    };
    Problem::new(l_new, p.m(), at, bt, p.potential().clone())
}

/// Energy of `u` before and after the change of variables; an error if they
/// disagree beyond `1e-6 max(1, before)`.
pub fn evaluate_transform_equivalence(
    p: &Problem,
    u: &GridFunction,
    which: Transform,
) -> Result<(f64, f64)> {
    if u.mesh.half_width != p.half_width() {
        return Err(OddsymError::InvalidInput(
            "grid function mesh does not match the problem".into(),
        ));
    }
    let xs = u.mesh.nodes();
    let before = energy_on_nodes(&xs, &u.values, p.a(), p.b(), p.potential());
    let q = change_of_variables(p, which)?;
    let after = if which.is_identity(p) {
        energy_on_nodes(&xs, &u.values, q.a(), q.b(), q.potential())
    } else {
        let prefix = which.prefix(p);
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| prefix.eval(x).clamp(-q.half_width(), q.half_width()))
            .collect();
        energy_on_nodes(&ys, &u.values, q.a(), q.b(), q.potential())
    };
    if (before - after).abs() > 1e-6 * before.abs().max(1.0) {
        return Err(OddsymError::TransformMismatch { before, after });
    }
    Ok((before, after))
}
