//! Vector fields of the planar Newtonian N-body problem (unit masses, unit
//! gravitational constant) and the Taylor-coefficient recurrences that drive
//! the integrators.

mod harmonic;
mod invariants;
mod planar;

use thiserror::Error;

use crate::interval::{IntervalMatrix, IntervalVector};
use crate::scalar::{Jet, Scalar};

pub use harmonic::HarmonicField;
pub use invariants::{invariants, Invariants};
pub use planar::{Coupling, Interaction, Layout, PlanarSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("collision enclosure: distance between bodies {0} and {1} may vanish")]
    CollisionEnclosure(usize, usize),
    #[error("state has dimension {got}, field expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// An autonomous polynomial-rational vector field `x' = f(x)`.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;

    /// Normalized Taylor coefficients `x^(k)(0) / k!`, `k = 0..=order`, of the
    /// solution through `x`. Layer 0 is `x` itself.
    fn taylor<S: Scalar>(&self, x: &[S], order: usize) -> Result<Vec<Vec<S>>, DynamicsError>;

    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>, DynamicsError> {
        Ok(self.taylor(x, 1)?.swap_remove(1))
    }

    /// Enclosure of `Df` over the box `x`.
    fn jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix, DynamicsError> {
        let f = self.eval(&Jet::seed(x))?;
        let n = x.len();
        let mut m = IntervalMatrix::zeros(n, n);
        for (i, fi) in f.iter().enumerate() {
            for j in 0..n {
                m[(i, j)] = fi.d[j];
            }
        }
        Ok(m)
    }

    fn check_dim(&self, got: usize) -> Result<(), DynamicsError> {
        if got == self.dim() {
            Ok(())
        } else {
            Err(DynamicsError::DimensionMismatch {
                expected: self.dim(),
                got,
            })
        }
    }
}
