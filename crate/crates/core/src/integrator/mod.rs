//! Rigorous Taylor integration with Lohner-type set propagation (C0 and C1)
//! and rigorous Poincaré maps, plus a plain floating-point counterpart.

mod expansion;
mod lohner;
pub mod nonrigorous;
mod poincare;
mod section;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsError, VectorField};
use crate::interval::{Interval, IntervalError, IntervalMatrix, IntervalVector};

pub use expansion::{rough_enclosure, StepExpansion};
pub use lohner::{LohnerSet, VariationSet};
pub use poincare::{PoincareResult, DEFAULT_BUDGET_TIME};
pub use section::{CrossingDirection, Section};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("could not validate a rough enclosure with step {h}")]
    RoughEnclosureFailure { h: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("no crossing of the section within {steps} steps")]
    NoCrossing { steps: usize },
    #[error("crossing near t = {t} is not transversal or could not be isolated")]
    NonTransversal { t: f64 },
    #[error("invalid step size {0}")]
    InvalidStep(f64),
    #[error("C1 propagation requested on an expansion computed in C0 mode")]
    MissingDerivative,
    #[error("enclosure blew up")]
    Blowup,
}

/// Whether the derivative with respect to initial conditions is propagated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    C0,
    C1,
}

/// One integration step.
#[derive(Debug, Clone)]
pub struct EnclosureStep {
    pub t_prev: f64,
    pub t: f64,
    /// Rigorous enclosure of the real end time (step sizes are exact
    /// binary64 values, their running sum is not).
    pub time: Interval,
    /// Enclosure of the set at `t`.
    pub tight: IntervalVector,
    /// Enclosure of the trajectory over `[t_prev, t]`.
    pub whole: IntervalVector,
    /// Enclosure of the propagated derivative at `t` (C1 mode).
    pub transition: Option<IntervalMatrix>,
}

/// Fixed-order Taylor integrator over a vector field.
#[derive(Debug, Clone, Copy)]
pub struct Integrator<'a, F> {
    pub field: &'a F,
    pub order: usize,
    pub mode: Mode,
}

impl<'a, F: VectorField> Integrator<'a, F> {
    pub fn new(field: &'a F, order: usize, mode: Mode) -> Self {
        Integrator { field, order, mode }
    }

    pub fn expand(&self, set: &LohnerSet, h: f64) -> Result<StepExpansion, IntegratorError> {
        StepExpansion::compute(
            self.field,
            &set.center,
            set.offset(),
            h,
            self.order,
            self.mode,
        )
    }

    fn check_mode(&self, set: &LohnerSet) -> Result<(), IntegratorError> {
        if set.variation.is_some() && self.mode == Mode::C0 {
            Err(IntegratorError::MissingDerivative)
        } else {
            Ok(())
        }
    }

    /// One step of length `h` starting at time `t`.
    pub fn step(
        &self,
        set: &LohnerSet,
        t: Interval,
        h: f64,
    ) -> Result<(LohnerSet, EnclosureStep), IntegratorError> {
        self.check_mode(set)?;
        let exp = self.expand(set, h)?;
        let next = set.advance(&exp, h)?;
        let time = t + Interval::point(h);
        let rec = EnclosureStep {
            t_prev: t.mid(),
            t: time.mid(),
            time,
            tight: next.hull(),
            whole: exp.whole(),
            transition: next.transition_hull(),
        };
        Ok((next, rec))
    }

    /// Integrates to time `total`; the last step is shortened to land on it
    /// up to the rounding recorded in [`EnclosureStep::time`].
    pub fn flow(
        &self,
        set: &LohnerSet,
        total: f64,
        h: f64,
    ) -> Result<(LohnerSet, Vec<EnclosureStep>), IntegratorError> {
        if !(h > 0.0) || total < 0.0 {
            return Err(IntegratorError::InvalidStep(h));
        }
        let mut cur = set.clone();
        let mut steps = Vec::new();
        let mut t = Interval::ZERO;
        loop {
            let remaining = total - t.mid();
            if remaining <= total * 1e-14 {
                break;
            }
            let hk = if remaining <= h * (1.0 + 1e-12) {
                remaining
            } else {
                h
            };
            let (next, rec) = self.step(&cur, t, hk)?;
            t = rec.time;
            cur = next;
            steps.push(rec);
        }
        Ok((cur, steps))
    }
}
