use std::sync::Mutex;

use nalgebra::DMatrix;

use super::{ChoreoError, ChoreographyProblem, ProblemKind};
use crate::integrator::{
    nonrigorous, CrossingDirection, EnclosureStep, Integrator, LohnerSet, Mode, DEFAULT_BUDGET_TIME,
};
use crate::interval::{Interval, IntervalMatrix, IntervalVector};
use crate::rootfind::{CertifiableMap, RootfindError};

/// What one rigorous evaluation of `Phi` produced besides its value.
#[derive(Debug, Clone)]
pub struct PhiRecord {
    /// Enclosure of the state on the section.
    pub crossing_state: IntervalVector,
    pub crossing_time: Interval,
    pub steps: Vec<EnclosureStep>,
    /// For the Eight: whether `x_1` is bounded away from zero on the
    /// section, which the reduction relies on.
    pub x1_nonzero: Option<bool>,
}

/// `Phi = R o P o E` with rigorous enclosures.
///
/// Point values are integrated in C0 mode with step `h_point`, Jacobians over
/// boxes in C1 mode with `h_set`.
#[derive(Debug)]
pub struct PhiMap<'a> {
    pub problem: &'a ChoreographyProblem,
    pub h_point: f64,
    pub h_set: f64,
    pub order: usize,
    last_point: Mutex<Option<PhiRecord>>,
    last_set: Mutex<Option<PhiRecord>>,
}

impl<'a> PhiMap<'a> {
    pub fn new(problem: &'a ChoreographyProblem, h_point: f64, h_set: f64, order: usize) -> Self {
        PhiMap {
            problem,
            h_point,
            h_set,
            order,
            last_point: Mutex::new(None),
            last_set: Mutex::new(None),
        }
    }

    pub fn last_point(&self) -> Option<PhiRecord> {
        self.last_point.lock().ok()?.clone()
    }

    pub fn last_set(&self) -> Option<PhiRecord> {
        self.last_set.lock().ok()?.clone()
    }

    fn record(
        &self,
        state: IntervalVector,
        time: Interval,
        steps: Vec<EnclosureStep>,
    ) -> PhiRecord {
        let x1_nonzero =
            (self.problem.kind() == ProblemKind::Eight).then(|| !state[0].contains_zero());
        PhiRecord {
            crossing_state: state,
            crossing_time: time,
            steps,
            x1_nonzero,
        }
    }

    /// Rigorous `Phi` at a point, with the full record.
    pub fn eval_point_record(&self, x: &[f64]) -> Result<(IntervalVector, PhiRecord), ChoreoError> {
        let start = self.problem.embed(x)?;
        let integ = Integrator::new(self.problem.system(), self.order, Mode::C0);
        let res = integ.poincare_map(
            &LohnerSet::from_point(&start),
            self.problem.section(),
            CrossingDirection::Either,
            self.h_point,
        )?;
        let value = IntervalVector::new(self.problem.reduce(res.state.as_slice())?);
        Ok((value, self.record(res.state, res.time, res.steps)))
    }

    /// Rigorous `Phi` and `DPhi` over a box, with the full record.
    pub fn eval_set_record(
        &self,
        x: &IntervalVector,
    ) -> Result<(IntervalVector, IntervalMatrix, PhiRecord), ChoreoError> {
        let (set, _) = self.initial_set(x)?;
        let integ = Integrator::new(self.problem.system(), self.order, Mode::C1);
        let res = integ.poincare_map(
            &set,
            self.problem.section(),
            CrossingDirection::Either,
            self.h_set,
        )?;
        let dp = res
            .derivative
            .clone()
            .ok_or(crate::integrator::IntegratorError::MissingDerivative)?;
        let dr = self.problem.reduce_derivative(res.state.as_slice())?;
        let value = IntervalVector::new(self.problem.reduce(res.state.as_slice())?);
        let jac = dr.mul(&dp);
        Ok((value, jac, self.record(res.state, res.time, res.steps)))
    }

    /// `E([X])` as the doubleton `E(x_bar) + DE ([X] - x_bar)`, carrying
    /// `DE` as the derivative seed.
    pub fn initial_set(&self, x: &IntervalVector) -> Result<(LohnerSet, Vec<f64>), ChoreoError> {
        let x_bar = x.mid();
        let center = self.problem.embed(&x_bar)?;
        let de = self.problem.embed_derivative();
        let r0: IntervalVector = x
            .iter()
            .zip(&x_bar)
            .map(|(a, c)| *a - Interval::point(*c))
            .collect();
        let n = center.len();
        let set = LohnerSet::parametrized(center, de.clone(), r0, IntervalVector::zeros(n))
            .with_variation(de);
        Ok((set, x_bar))
    }
}

fn to_rootfind(e: ChoreoError) -> RootfindError {
    match e {
        ChoreoError::Integrator(e) => RootfindError::Integrator(e),
        ChoreoError::Rootfind(e) => e,
        other => RootfindError::InvalidJob(other.to_string()),
    }
}

impl CertifiableMap for PhiMap<'_> {
    fn dim(&self) -> usize {
        self.problem.reduced_dim()
    }

    fn eval_point(&self, x: &[f64]) -> Result<IntervalVector, RootfindError> {
        let (value, rec) = self.eval_point_record(x).map_err(to_rootfind)?;
        if let Ok(mut slot) = self.last_point.lock() {
            *slot = Some(rec);
        }
        Ok(value)
    }

    fn eval_jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix, RootfindError> {
        let (_, jac, rec) = self.eval_set_record(x).map_err(to_rootfind)?;
        if let Ok(mut slot) = self.last_set.lock() {
            *slot = Some(rec);
        }
        Ok(jac)
    }
}

/// Nonrigorous `Phi` and `DPhi` at a point.
#[derive(Debug, Clone)]
pub struct PointPhi {
    pub value: Vec<f64>,
    pub jacobian: DMatrix<f64>,
    pub crossing_state: Vec<f64>,
    pub time: f64,
}

impl ChoreographyProblem {
    pub fn phi_point(&self, x: &[f64], h: f64, order: usize) -> Result<PointPhi, ChoreoError> {
        let start = self.embed(x)?;
        let de = self.embed_derivative();
        let ret = nonrigorous::first_return_c1(
            self.system(),
            &start,
            &de,
            self.section(),
            CrossingDirection::Either,
            h,
            order,
            DEFAULT_BUDGET_TIME,
        )?;
        let dr = self.reduce_derivative_point(&ret.state)?;
        let dp = ret.derivative.expect("C1 return carries a derivative");
        Ok(PointPhi {
            value: self.reduce(&ret.state)?,
            jacobian: dr * dp,
            crossing_state: ret.state,
            time: ret.time,
        })
    }

    /// Nonrigorous preconditioner `DPhi(x_bar)^-1` for the Krawczyk operator.
    pub fn preconditioner(
        &self,
        x: &[f64],
        h: f64,
        order: usize,
    ) -> Result<DMatrix<f64>, ChoreoError> {
        let p = self.phi_point(x, h, order)?;
        p.jacobian
            .try_inverse()
            .ok_or_else(|| ChoreoError::Unsupported("singular DPhi at the candidate".into()))
    }
}

/// Plain Newton iteration on the nonrigorous `Phi`, stopping once
/// `|Phi| < 1e-12` or after `iters` steps.
pub fn refine_candidate(
    problem: &ChoreographyProblem,
    guess: &[f64],
    iters: usize,
    h: f64,
    order: usize,
) -> Result<Vec<f64>, ChoreoError> {
    let mut x = guess.to_vec();
    let mut residual = f64::INFINITY;
    for it in 0..iters {
        let p = match problem.phi_point(&x, h, order) {
            Ok(p) => p,
            Err(ChoreoError::Integrator(_)) if it > 0 => {
                return Err(ChoreoError::Diverged {
                    iterations: it,
                    residual,
                });
            }
            Err(e) => return Err(e),
        };
        residual = p.value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual < 1e-12 {
            return Ok(x);
        }
        let step = p
            .jacobian
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(&p.value))
            .ok_or(ChoreoError::Diverged {
                iterations: it,
                residual,
            })?;
        for (xi, si) in x.iter_mut().zip(step.iter()) {
            *xi -= si;
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(ChoreoError::Diverged {
                iterations: it + 1,
                residual,
            });
        }
    }
    let p = problem.phi_point(&x, h, order)?;
    residual = p.value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if residual < 1e-9 {
        Ok(x)
    } else {
        Err(ChoreoError::Diverged {
            iterations: iters,
            residual,
        })
    }
}
