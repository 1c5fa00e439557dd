//! Uniform symmetric meshes and nodal functions on them.

use serde::{Deserialize, Serialize};

use crate::error::{OddsymError, Result};
use crate::quad::GAUSS2_ABSCISSA;
use crate::weights::{Potential, WeightFn};

/// Uniform mesh of `n` elements on `[-L, L]`, nodes `x_i = L (2i - n) / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub half_width: f64,
    pub n: usize,
}

impl Mesh {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(OddsymError::InvalidInput(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if n < 2 {
            return Err(OddsymError::InvalidInput(
                "mesh needs at least two elements".into(),
            ));
        }
        Ok(Mesh { half_width, n })
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.half_width * (2.0 * i as f64 - self.n as f64) / self.n as f64
    }

    #[inline]
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }

    /// The two Gauss points of element `e`.
    #[inline]
    pub fn gauss_points(&self, e: usize) -> [f64; 2] {
        let mid = 0.5 * (self.node(e) + self.node(e + 1));
        let half = 0.5 * self.h();
        [mid - half * GAUSS2_ABSCISSA, mid + half * GAUSS2_ABSCISSA]
    }
}

/// Nodal values of a continuous piecewise-linear function on a [`Mesh`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub mesh: Mesh,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n + 1 {
            return Err(OddsymError::InvalidInput(format!(
                "expected {} nodal values, got {}",
                mesh.n + 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(OddsymError::InvalidInput(
                "nodal values must be finite".into(),
            ));
        }
        Ok(GridFunction { mesh, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(mesh: Mesh, f: F) -> Self {
        GridFunction {
            mesh,
            values: (0..=mesh.n).map(|i| f(mesh.node(i))).collect(),
        }
    }

    /// Function with the boundary values `-m, m` and `interior` everywhere else.
    pub fn pinned_constant(mesh: Mesh, m: f64, interior: f64) -> Self {
        let mut values = vec![interior; mesh.n + 1];
        values[0] = -m;
        values[mesh.n] = m;
        GridFunction { mesh, values }
    }

    pub fn n(&self) -> usize {
        self.mesh.n
    }

    /// Piecewise-linear evaluation (clamped to the mesh).
    pub fn eval(&self, x: f64) -> f64 {
        let s = (x + self.mesh.half_width) / self.mesh.h();
        if s <= 0.0 {
            return self.values[0];
        }
        let i = (s.floor() as usize).min(self.mesh.n - 1);
        let t = (s - i as f64).clamp(0.0, 1.0);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// `x -> -u(-x)` on the same symmetric mesh.
    pub fn flipped(&self) -> Self {
        let n = self.mesh.n;
        GridFunction {
            mesh: self.mesh,
            values: (0..=n).map(|i| -self.values[n - i]).collect(),
        }
    }

    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn oddness_defect(&self) -> f64 {
        self.sup_distance(&self.flipped())
    }

    /// Slope on element `e`.
    #[inline]
    pub fn slope(&self, e: usize) -> f64 {
        (self.values[e + 1] - self.values[e]) / self.mesh.h()
    }
}

/// Energy `int 1/2 (u')^2 a + G(u) b` of the piecewise-linear interpolant of
/// `(xs, us)` with two-point Gauss on every element.
pub fn energy_on_nodes(xs: &[f64], us: &[f64], a: &WeightFn, b: &WeightFn, g: &Potential) -> f64 {
    let mut total = 0.0;
    for e in 0..xs.len() - 1 {
        let h = xs[e + 1] - xs[e];
        let du = us[e + 1] - us[e];
        let slope = du / h;
        let mid = 0.5 * (xs[e] + xs[e + 1]);
        let umid = 0.5 * (us[e] + us[e + 1]);
        let mut acc = 0.0;
        for s in [-GAUSS2_ABSCISSA, GAUSS2_ABSCISSA] {
            let x = mid + 0.5 * h * s;
            let u = umid + 0.5 * du * s;
            acc += 0.5 * slope * slope * a.eval(x) + g.eval(u) * b.eval(x);
        }
        total += 0.5 * h * acc;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_is_symmetric() {
        let m = Mesh::new(3.0, 10).unwrap();
        for i in 0..=10 {
            assert_eq!(m.node(i), -m.node(10 - i));
        }
        assert_eq!(m.node(5), 0.0);
    }

    #[test]
    fn flipped_twice_is_identity() {
        let m = Mesh::new(1.0, 8).unwrap();
        let u = GridFunction::from_fn(m, |x| x * x * x + 0.3 * x * x);
        assert_eq!(u.flipped().flipped(), u);
        let odd = GridFunction::from_fn(m, |x| x);
        assert_eq!(odd.oddness_defect(), 0.0);
    }

    #[test]
    fn eval_interpolates() {
        let m = Mesh::new(1.0, 4).unwrap();
        let u = GridFunction::from_fn(m, |x| 2.0 * x);
        assert!((u.eval(0.3) - 0.6).abs() < 1e-15);
        assert_eq!(u.eval(-5.0), -2.0);
        assert_eq!(u.eval(5.0), 2.0);
    }
}
