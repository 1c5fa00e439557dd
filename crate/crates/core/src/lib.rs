//! Weighted one-dimensional double-well energies
//! `E(u) = int_{-L}^{L} 1/2 (u')^2 a + G(u) b` with `u(-L) = -m`, `u(L) = m`:
//! minimizers, the continuous odd rearrangement, energy bounds,
//! eigenvalue certificates and an experiment runner.

pub mod bounds;
pub mod config;
pub mod eigen;
pub mod error;
pub mod experiment;
pub mod mesh;
pub mod quad;
pub mod rearrange;
pub mod solve1d;
pub mod tridiag;
pub mod weights;

pub use error::{OddsymError, Result};
pub use mesh::{GridFunction, Mesh};
pub use rearrange::{build_family, MonotoneGrid, RearrangementFamily};
pub use weights::{
    change_of_variables, check_hypotheses, check_hypotheses_lenient,
    evaluate_transform_equivalence, HypothesisReport, Potential, PotentialFamily, Problem,
    ProblemSpec, Transform, Verdict, WeightFamily, WeightFn,
};
