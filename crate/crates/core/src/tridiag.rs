//! Symmetric tridiagonal matrices: factorization, solves, inertia and the
//! lowest eigenpair.

use crate::error::{OddsymError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(OddsymError::InvalidInput(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                off.len()
            )));
        }
        Ok(SymTridiag { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// Pivots `d` of `T - shift I = L D L^T`. A zero pivot is nudged so the
    /// recurrence can continue, which is the usual convention for Sturm counts.
    pub fn pivots(&self, shift: f64) -> Vec<f64> {
        let n = self.len();
        let mut d = vec![0.0; n];
        let scale = self
            .diag
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        for i in 0..n {
            let mut p = self.diag[i] - shift;
            if i > 0 {
                p -= self.off[i - 1] * self.off[i - 1] / d[i - 1];
            }
            if p == 0.0 {
                p = -f64::EPSILON * scale;
            }
            d[i] = p;
        }
        d
    }

    /// Number of eigenvalues strictly below `shift`.
    pub fn count_below(&self, shift: f64) -> usize {
        self.pivots(shift).iter().filter(|&&p| p < 0.0).count()
    }

    /// Solves `(T - shift I) x = rhs` by `L D L^T`; no pivoting.
    pub fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        let d = self.pivots(shift);
        if d.iter().any(|p| !p.is_finite()) {
            return Err(OddsymError::Invariant(
                "tridiagonal factorization broke down".into(),
            ));
        }
        let mut y = rhs.to_vec();
        for i in 1..n {
            y[i] -= self.off[i - 1] / d[i - 1] * y[i - 1];
        }
        let mut x = vec![0.0; n];
        x[n - 1] = y[n - 1] / d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (y[i] - self.off[i] * x[i + 1]) / d[i];
        }
        Ok(x)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solve_shifted(0.0, rhs)
    }

    /// Solves `T x = rhs` by a twisted factorization that eliminates from
    /// both ends towards the middle row. For a persymmetric `T` the two
    /// sweeps perform mirrored arithmetic, so an antisymmetric right-hand side
    /// gives a bitwise antisymmetric solution.
    pub fn solve_twisted(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        let k = n / 2;
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..k {
            if i == 0 {
                d[i] = self.diag[i];
                y[i] = rhs[i];
            } else {
                d[i] = self.diag[i] - self.off[i - 1] * self.off[i - 1] / d[i - 1];
                y[i] = rhs[i] - (self.off[i - 1] / d[i - 1]) * y[i - 1];
            }
        }
        for i in (k + 1..n).rev() {
            if i == n - 1 {
                d[i] = self.diag[i];
                y[i] = rhs[i];
            } else {
                d[i] = self.diag[i] - self.off[i] * self.off[i] / d[i + 1];
                y[i] = rhs[i] - (self.off[i] / d[i + 1]) * y[i + 1];
            }
        }
        let mut gamma = self.diag[k];
        let mut r = rhs[k];
        if k > 0 {
            gamma -= self.off[k - 1] * self.off[k - 1] / d[k - 1];
            r -= (self.off[k - 1] / d[k - 1]) * y[k - 1];
        }
        if k + 1 < n {
            gamma -= self.off[k] * self.off[k] / d[k + 1];
            r -= (self.off[k] / d[k + 1]) * y[k + 1];
        }
        let mut x = vec![0.0; n];
        x[k] = r / gamma;
        for i in (0..k).rev() {
            x[i] = (y[i] - self.off[i] * x[i + 1]) / d[i];
        }
        for i in k + 1..n {
            x[i] = (y[i] - self.off[i - 1] * x[i - 1]) / d[i];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(OddsymError::Invariant(
                "twisted factorization broke down".into(),
            ));
        }
        Ok(x)
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Smallest eigenvalue by Sturm bisection, then its eigenvector by
    /// inverse iteration (unit Euclidean norm).
    pub fn lowest_eigenpair(&self) -> Result<(f64, Vec<f64>)> {
        let n = self.len();
        let (mut lo, mut hi) = self.gershgorin();
        let width = (hi - lo).abs().max(f64::MIN_POSITIVE);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * width.max(lo.abs()) {
                break;
            }
        }
        let lambda = 0.5 * (lo + hi);
        let shift = lambda - 1e-10 * width;
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64)
            .collect();
        for _ in 0..8 {
            v = self.solve_shifted(shift, &v)?;
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(OddsymError::Invariant(
                    "inverse iteration lost the eigenvector".into(),
                ));
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        let tv = self.matvec(&v);
        let rq = v.iter().zip(&tv).map(|(a, b)| a * b).sum::<f64>();
        Ok((rq, v))
    }
}
