//! Interval Newton and Krawczyk operators and the iterative certification
//! loop for zeros of C1 maps.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::IntegratorError;
use crate::interval::{solve_linear, Interval, IntervalError, IntervalMatrix, IntervalVector};

/// Default iteration cap of [`certify`].
pub const DEFAULT_MAX_ITER: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootfindError {
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error("invalid certification job: {0}")]
    InvalidJob(String),
}

/// A map `F: R^n -> R^n` with rigorous value and Jacobian enclosures.
pub trait CertifiableMap {
    fn dim(&self) -> usize;
    /// Enclosure of `F(x)` at a point.
    fn eval_point(&self, x: &[f64]) -> Result<IntervalVector, RootfindError>;
    /// Enclosure of `{DF(y) : y in x}`.
    fn eval_jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix, RootfindError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Newton,
    Krawczyk,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "newton" => Ok(Method::Newton),
            "krawczyk" => Ok(Method::Krawczyk),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    UniqueZero,
    NoZero,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct CertificationJob {
    pub x_bar: Vec<f64>,
    pub x: IntervalVector,
    pub method: Method,
    /// Krawczyk preconditioner; defaults to the inverse of `mid DF([X])`.
    pub c: Option<DMatrix<f64>>,
    pub max_iter: usize,
}

impl CertificationJob {
    /// The box `x_bar +- delta` in every component.
    pub fn around(x_bar: &[f64], delta: f64, method: Method) -> Self {
        CertificationJob {
            x_bar: x_bar.to_vec(),
            x: IntervalVector::around(x_bar, delta),
            method,
            c: None,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn with_preconditioner(mut self, c: DMatrix<f64>) -> Self {
        self.c = Some(c);
        self
    }

    fn validate(&self, n: usize) -> Result<(), RootfindError> {
        if self.x_bar.len() != n || self.x.len() != n {
            return Err(RootfindError::InvalidJob(format!(
                "dimension {} / {} for a map of dimension {n}",
                self.x_bar.len(),
                self.x.len()
            )));
        }
        if !self.x.contains(&self.x_bar) {
            return Err(RootfindError::InvalidJob("x_bar outside [X]".into()));
        }
        if let Some(c) = &self.c {
            if c.nrows() != n || c.ncols() != n {
                return Err(RootfindError::InvalidJob("preconditioner shape".into()));
            }
        }
        if self.max_iter == 0 {
            return Err(RootfindError::InvalidJob(
                "max_iter must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One pass of the certification loop.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub x_bar: Vec<f64>,
    pub x: IntervalVector,
    pub value: IntervalVector,
    pub jacobian: IntervalMatrix,
    pub preconditioner: Option<DMatrix<f64>>,
    pub image: IntervalVector,
}

#[derive(Debug, Clone)]
pub struct CertificationOutcome {
    pub verdict: Verdict,
    pub operator_image: Option<IntervalVector>,
    pub refined_box: IntervalVector,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    /// Why the outcome is inconclusive, if it is.
    pub cause: Option<String>,
    /// `max_i diam(T_i) / diam(X_i)` of the last image.
    pub inflation_ratio: Option<f64>,
}

/// `N(x_bar, [X]) = x_bar - [DF([X])]^-1 F(x_bar)`.
pub fn newton_operator(
    x_bar: &[f64],
    value: &IntervalVector,
    jacobian: &IntervalMatrix,
) -> Result<IntervalVector, IntervalError> {
    let step = solve_linear(jacobian, value)?;
    Ok(x_bar
        .iter()
        .zip(step.iter())
        .map(|(x, s)| Interval::point(*x) - *s)
        .collect())
}

/// `K(x_bar, [X]) = x_bar - C F(x_bar) + (I - C [DF([X])]) ([X] - x_bar)`.
pub fn krawczyk_operator(
    x_bar: &[f64],
    x: &IntervalVector,
    value: &IntervalVector,
    jacobian: &IntervalMatrix,
    c: &DMatrix<f64>,
) -> IntervalVector {
    let n = x_bar.len();
    let ci = IntervalMatrix::from_point(c);
    let cf = ci.mul_vec(value);
    let residual = IntervalMatrix::identity(n).sub(&ci.mul(jacobian));
    let offset: Vec<Interval> = x
        .iter()
        .zip(x_bar)
        .map(|(a, b)| *a - Interval::point(*b))
        .collect();
    let contraction = residual.mul_vec(&offset);
    (0..n)
        .map(|i| Interval::point(x_bar[i]) - cf[i] + contraction[i])
        .collect()
}

fn inflation_ratio(image: &IntervalVector, x: &IntervalVector) -> f64 {
    image
        .iter()
        .zip(x.iter())
        .map(|(t, b)| {
            if b.diam() > 0.0 {
                t.diam() / b.diam()
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

/// Runs the certification loop: accept on `T ⊂ int [X]`, reject on
/// `T ∩ [X] = ∅`, give up when `[X] ⊆ T`, otherwise shrink to `[X] ∩ T`.
///
/// Errors from the map (integration failures) are returned as `Err`; a
/// singular Jacobian enclosure yields an inconclusive outcome.
pub fn certify<M: CertifiableMap + ?Sized>(
    map: &M,
    job: &CertificationJob,
) -> Result<CertificationOutcome, RootfindError> {
    job.validate(map.dim())?;
    let mut x_bar = job.x_bar.clone();
    let mut x = job.x.clone();
    let mut trace = Vec::new();
    let inconclusive =
        |x: IntervalVector, trace: Vec<IterationRecord>, image, cause: String, ratio| {
            Ok(CertificationOutcome {
                verdict: Verdict::Inconclusive,
                operator_image: image,
                refined_box: x,
                iterations: trace.len(),
                trace,
                cause: Some(cause),
                inflation_ratio: ratio,
            })
        };
    for _ in 0..job.max_iter {
        let value = map.eval_point(&x_bar)?;
        let jacobian = map.eval_jacobian(&x)?;
        let (image, preconditioner) = match job.method {
            Method::Newton => match newton_operator(&x_bar, &value, &jacobian) {
                Ok(img) => (img, None),
                Err(e @ IntervalError::SingularEnclosure) => {
                    return inconclusive(x, trace, None, e.to_string(), None);
                }
                Err(e) => return Err(e.into()),
            },
            Method::Krawczyk => {
                let c = match &job.c {
                    Some(c) if trace.is_empty() => c.clone(),
                    _ => match jacobian.mid().try_inverse() {
                        Some(c) => c,
                        None => {
                            return inconclusive(
                                x,
                                trace,
                                None,
                                "singular midpoint Jacobian".into(),
                                None,
                            );
                        }
                    },
                };
                (
                    krawczyk_operator(&x_bar, &x, &value, &jacobian, &c),
                    Some(c),
                )
            }
        };
        if !image.is_finite() {
            return inconclusive(x, trace, None, "non-finite operator image".into(), None);
        }
        let ratio = inflation_ratio(&image, &x);
        trace.push(IterationRecord {
            x_bar: x_bar.clone(),
            x: x.clone(),
            value,
            jacobian,
            preconditioner,
            image: image.clone(),
        });
        if image.subset_interior(&x) {
            return Ok(CertificationOutcome {
                verdict: Verdict::UniqueZero,
                operator_image: Some(image),
                refined_box: x,
                iterations: trace.len(),
                trace,
                cause: None,
                inflation_ratio: Some(ratio),
            });
        }
        if image.disjoint(&x) {
            return Ok(CertificationOutcome {
                verdict: Verdict::NoZero,
                operator_image: Some(image),
                refined_box: x,
                iterations: trace.len(),
                trace,
                cause: None,
                inflation_ratio: Some(ratio),
            });
        }
        if x.subset(&image) {
            let cause = format!("operator image contains the box (inflation ratio {ratio:.3e}); change integration parameters");
            return inconclusive(x, trace, Some(image), cause, Some(ratio));
        }
        let shrunk = x.intersect(&image)?;
        if shrunk == x {
            return inconclusive(x, trace, Some(image), "no progress".into(), Some(ratio));
        }
        x = shrunk;
        x_bar = x.mid();
    }
    let last = trace.last().map(|r| r.image.clone());
    let ratio = last.as_ref().map(|img| inflation_ratio(img, &x));
    inconclusive(
        x,
        trace,
        last,
        format!("iteration limit {} reached", job.max_iter),
        ratio,
    )
}
