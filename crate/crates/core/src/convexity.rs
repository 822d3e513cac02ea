//! Rigorous check that the lobes of the Eight are convex.
//!
//! Over each step enclosure `Q_k` every body's path is written as a graph
//! over one coordinate and the sign of its second derivative is checked.
//! The only admitted inflection is the body starting at the origin, on the
//! first step, where the second derivative must be monotone instead.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::choreo::{ChoreoError, ChoreographyProblem, PhiMap, ProblemKind};
use crate::dynamics::{DynamicsError, PlanarSystem, VectorField};
use crate::integrator::{CrossingDirection, Integrator, IntegratorError, LohnerSet, Mode};
use crate::interval::{Interval, IntervalVector};

#[derive(Debug, Error)]
pub enum ConvexityError {
    #[error("body {body}: neither coordinate is monotone in time over the step")]
    NotAGraph { body: usize },
    #[error("step {step}, body {body}: {reason}")]
    StepTooCoarse {
        step: usize,
        body: usize,
        reason: String,
    },
    #[error("convexity is only claimed for the Eight, not {0}")]
    Unsupported(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Choreo(#[from] ChoreoError),
}

/// Which coordinate serves as the graph parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// `y` as a function of `x`; needs `dx/dt != 0`.
    YOfX,
    /// `x` as a function of `y`; needs `dy/dt != 0`.
    XOfY,
}

/// First three time derivatives of one body's position over a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeDerivatives {
    pub x: [Interval; 3],
    pub y: [Interval; 3],
}

impl TimeDerivatives {
    /// Derivatives over the box `q` from the order-3 Taylor coefficients of
    /// `system`.
    pub fn over(
        system: &PlanarSystem,
        q: &IntervalVector,
        body: usize,
    ) -> Result<Self, DynamicsError> {
        let c = system.taylor(q.as_slice(), 3)?;
        let comp = |axis: usize| {
            let i = system.pos_index(body, axis);
            [c[1][i], c[2][i].scale(2.0), c[3][i].scale(6.0)]
        };
        Ok(TimeDerivatives {
            x: comp(0),
            y: comp(1),
        })
    }

    fn swapped(&self) -> Self {
        TimeDerivatives {
            x: self.y,
            y: self.x,
        }
    }
}

/// Derivatives of the path as a graph along `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphDerivatives {
    pub axis: Axis,
    /// Time derivative of the parameter coordinate.
    pub rate: Interval,
    pub d1: Interval,
    pub d2: Interval,
    pub d3: Interval,
}

/// `d/dx`, `d2/dx2`, `d3/dx3` of `y(t(x))` (or the mirror), by the chain rule.
pub fn graph_derivatives(td: &TimeDerivatives, axis: Axis) -> Option<GraphDerivatives> {
    let td = match axis {
        Axis::YOfX => *td,
        Axis::XOfY => td.swapped(),
    };
    let [xd, xdd, xddd] = td.x;
    let [yd, ydd, yddd] = td.y;
    let inv = xd.recip().ok()?;
    let inv2 = inv.sqr();
    let d1 = yd * inv;
    let d2 = (ydd - xdd * d1) * inv2;
    let d3 = (yddd - xddd * d1) * inv2 * inv - (xdd * d2).scale(3.0) * inv2;
    Some(GraphDerivatives {
        axis,
        rate: xd,
        d1,
        d2,
        d3,
    })
}

/// The condition that settled one body on one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `y(x)` with second derivative of constant sign.
    Conv1,
    /// `x(y)` with second derivative of constant sign.
    Conv2,
    /// `y(x)` with an inflection and monotone second derivative.
    Conv3,
    /// `x(y)` with an inflection and monotone second derivative.
    Conv4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyCheck {
    pub body: usize,
    pub time: TimeDerivatives,
    pub y_of_x: Option<GraphDerivatives>,
    pub x_of_y: Option<GraphDerivatives>,
    pub condition: Condition,
}

impl BodyCheck {
    pub fn chosen(&self) -> Option<&GraphDerivatives> {
        match self.condition {
            Condition::Conv1 | Condition::Conv3 => self.y_of_x.as_ref(),
            Condition::Conv2 | Condition::Conv4 => self.x_of_y.as_ref(),
        }
    }
}

/// Checks one body over the step enclosure `q`. With `inflection` set the
/// body is known to pass an inflection point inside `q` and only the
/// monotone-second-derivative conditions are accepted.
pub fn check_step(
    system: &PlanarSystem,
    q: &IntervalVector,
    step: usize,
    body: usize,
    inflection: bool,
) -> Result<BodyCheck, ConvexityError> {
    let time = TimeDerivatives::over(system, q, body)?;
    let y_of_x = graph_derivatives(&time, Axis::YOfX);
    let x_of_y = graph_derivatives(&time, Axis::XOfY);
    if y_of_x.is_none() && x_of_y.is_none() {
        return Err(ConvexityError::StepTooCoarse {
            step,
            body,
            reason: ConvexityError::NotAGraph { body }.to_string(),
        });
    }
    let passes = |g: &Option<GraphDerivatives>| match g {
        Some(g) if inflection => g.d2.contains_zero() && !g.d3.contains_zero(),
        Some(g) => !g.d2.contains_zero(),
        None => false,
    };
    let condition = match (passes(&y_of_x), passes(&x_of_y), inflection) {
        (true, _, false) => Condition::Conv1,
        (false, true, false) => Condition::Conv2,
        (true, _, true) => Condition::Conv3,
        (false, true, true) => Condition::Conv4,
        (false, false, _) => {
            return Err(ConvexityError::StepTooCoarse {
                step,
                body,
                reason: "second derivative sign is not resolved on either axis".into(),
            })
        }
    };
    Ok(BodyCheck {
        body,
        time,
        y_of_x,
        x_of_y,
        condition,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based step number.
    pub index: usize,
    pub t_prev: f64,
    pub t: f64,
    pub bodies: Vec<BodyCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConvexityVerdict {
    Pass,
    Fail {
        step: usize,
        body: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub h: f64,
    pub order: usize,
    pub step_count: usize,
    pub verdict: ConvexityVerdict,
    pub steps: Vec<StepRecord>,
}

impl ConvexityCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == ConvexityVerdict::Pass
    }

    pub fn step(&self, index: usize) -> Option<&StepRecord> {
        self.steps.iter().find(|s| s.index == index)
    }
}

/// Follows `E([X])` to the section and checks every body on every step.
/// Stops at the first step that cannot be settled.
pub fn verify_convexity(
    problem: &ChoreographyProblem,
    x: &IntervalVector,
    h: f64,
    order: usize,
) -> Result<ConvexityCertificate, ConvexityError> {
    if problem.kind() != ProblemKind::Eight {
        return Err(ConvexityError::Unsupported(problem.name()));
    }
    let phi = PhiMap::new(problem, h, h, order);
    let (set, _) = phi.initial_set(x)?;
    let de = problem.embed_derivative();
    let system = problem.system();
    // A body sits at the origin for every parameter when both its centre
    // coordinates and their rows of DE vanish.
    let pinned = |i: usize| set.center[i] == 0.0 && de.row(i).iter().all(|v| *v == 0.0);
    let at_origin: Vec<bool> = (0..system.n_bodies())
        .map(|b| pinned(system.pos_index(b, 0)) && pinned(system.pos_index(b, 1)))
        .collect();
    let integ = Integrator::new(system, order, Mode::C0);
    let set = LohnerSet {
        variation: None,
        ..set
    };
    let res = integ.poincare_map(&set, problem.section(), CrossingDirection::Either, h)?;

    let mut steps = Vec::with_capacity(res.steps.len());
    let mut verdict = ConvexityVerdict::Pass;
    'steps: for (k, st) in res.steps.iter().enumerate() {
        let mut bodies = Vec::new();
        for (b, &origin) in at_origin.iter().enumerate() {
            match check_step(system, &st.whole, k + 1, b, origin && k == 0) {
                Ok(c) => bodies.push(c),
                Err(ConvexityError::StepTooCoarse { step, body, reason }) => {
                    verdict = ConvexityVerdict::Fail { step, body, reason };
                    break 'steps;
                }
                Err(e) => return Err(e),
            }
        }
        steps.push(StepRecord {
            index: k + 1,
            t_prev: st.t_prev,
            t: st.t,
            bodies,
        });
    }
    Ok(ConvexityCertificate {
        h,
        order,
        step_count: res.steps.len(),
        verdict,
        steps,
    })
}
