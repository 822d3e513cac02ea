//! Plain floating-point Taylor integration, used for candidate refinement,
//! preconditioners and drawing.

use nalgebra::DMatrix;

use super::{CrossingDirection, IntegratorError, Section};
use crate::dynamics::VectorField;
use crate::scalar::{Jet, Scalar};

/// Default order of the floating-point Taylor method.
pub const DEFAULT_ORDER: usize = 20;

const NEWTON_STEPS: usize = 50;

/// Nonrigorous first return to a section.
#[derive(Debug, Clone)]
pub struct PointReturn {
    pub state: Vec<f64>,
    pub time: f64,
    /// `DP(x) S` for the seed `S` supplied by the caller.
    pub derivative: Option<DMatrix<f64>>,
}

fn horner<S: Scalar>(coeffs: &[Vec<S>], s: f64) -> Vec<S> {
    let mut acc = coeffs[coeffs.len() - 1].clone();
    for c in coeffs[..coeffs.len() - 1].iter().rev() {
        for (a, ck) in acc.iter_mut().zip(c) {
            *a = a.scale(s).add(ck);
        }
    }
    acc
}

fn horner_f64(coeffs: &[Vec<f64>], s: f64) -> (Vec<f64>, Vec<f64>) {
    let n = coeffs[0].len();
    let mut x = vec![0.0; n];
    let mut dx = vec![0.0; n];
    for c in coeffs.iter().rev() {
        for i in 0..n {
            dx[i] = dx[i] * s + x[i];
            x[i] = x[i] * s + c[i];
        }
    }
    (x, dx)
}

fn check_finite<S: Scalar>(x: &[S]) -> Result<(), IntegratorError> {
    if x.iter().all(|v| v.mid_value().is_finite()) {
        Ok(())
    } else {
        Err(IntegratorError::Blowup)
    }
}

/// Flows `x` for time `total` with steps of at most `h`.
pub fn flow<F: VectorField, S: Scalar>(
    field: &F,
    x: &[S],
    total: f64,
    h: f64,
    order: usize,
) -> Result<Vec<S>, IntegratorError> {
    if !(h > 0.0 && h.is_finite()) || total < 0.0 {
        return Err(IntegratorError::InvalidStep(h));
    }
    let mut cur = x.to_vec();
    let mut t = 0.0;
    while total - t > total * 1e-15 {
        let hk = h.min(total - t);
        cur = horner(&field.taylor(&cur, order)?, hk);
        check_finite(&cur)?;
        t += hk;
    }
    Ok(cur)
}

/// Samples of the trajectory every `h` time units up to `total`.
pub fn trajectory<F: VectorField>(
    field: &F,
    x: &[f64],
    total: f64,
    h: f64,
    order: usize,
) -> Result<Vec<(f64, Vec<f64>)>, IntegratorError> {
    if !(h > 0.0 && h.is_finite()) || total < 0.0 {
        return Err(IntegratorError::InvalidStep(h));
    }
    let mut out = vec![(0.0, x.to_vec())];
    let mut cur = x.to_vec();
    let mut t = 0.0;
    while total - t > total * 1e-15 {
        let hk = h.min(total - t);
        cur = horner(&field.taylor(&cur, order)?, hk);
        check_finite(&cur)?;
        t += hk;
        out.push((t, cur.clone()));
    }
    Ok(out)
}

/// Generic first crossing: returns `phi(tau, x)` at the crossing time `tau`
/// (not corrected for the dependence of `tau` on `x`) and `tau` itself.
fn crossing<F: VectorField, S: Scalar>(
    field: &F,
    x: &[S],
    section: &Section,
    direction: CrossingDirection,
    h: f64,
    order: usize,
    max_time: f64,
) -> Result<(Vec<S>, f64), IntegratorError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(IntegratorError::InvalidStep(h));
    }
    let mids = |v: &[S]| v.iter().map(Scalar::mid_value).collect::<Vec<f64>>();
    let g0 = section.value(&mids(x));
    let positive_before = match direction {
        CrossingDirection::PlusToMinus if g0 > 0.0 => true,
        CrossingDirection::MinusToPlus if g0 < 0.0 => false,
        CrossingDirection::Either if g0 != 0.0 => g0 > 0.0,
        _ => return Err(IntegratorError::NonTransversal { t: 0.0 }),
    };
    let before = |g: f64| if positive_before { g > 0.0 } else { g < 0.0 };

    let max_steps = (max_time / h).ceil() as usize;
    let mut cur = x.to_vec();
    let mut t = 0.0;
    for _ in 0..max_steps {
        let coeffs = field.taylor(&cur, order)?;
        let mid_coeffs: Vec<Vec<f64>> = coeffs.iter().map(|c| mids(c)).collect();
        let g_at = |s: f64| section.value(&horner_f64(&mid_coeffs, s).0);
        if before(g_at(h)) {
            cur = horner(&coeffs, h);
            check_finite(&cur)?;
            t += h;
            continue;
        }
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if before(g_at(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut tau = 0.5 * (lo + hi);
        for _ in 0..NEWTON_STEPS {
            let (y, dy) = horner_f64(&mid_coeffs, tau);
            let rate: f64 = section
                .gradient(&y)
                .iter()
                .zip(&dy)
                .map(|(a, b)| a * b)
                .sum();
            if rate == 0.0 {
                return Err(IntegratorError::NonTransversal { t: t + tau });
            }
            let step = section.value(&y) / rate;
            tau -= step;
            if step.abs() <= 1e-16 * (1.0 + tau.abs()) {
                break;
            }
        }
        let state = horner(&coeffs, tau);
        check_finite(&state)?;
        return Ok((state, t + tau));
    }
    Err(IntegratorError::NoCrossing { steps: max_steps })
}

/// First crossing of `section` from the point `x`.
pub fn first_return<F: VectorField>(
    field: &F,
    x: &[f64],
    section: &Section,
    direction: CrossingDirection,
    h: f64,
    order: usize,
    max_time: f64,
) -> Result<PointReturn, IntegratorError> {
    let (state, time) = crossing(field, x, section, direction, h, order, max_time)?;
    Ok(PointReturn {
        state,
        time,
        derivative: None,
    })
}

/// First crossing together with `DP(x) seed`, where `P` is the map to the
/// section with the crossing time depending on `x`.
#[allow(clippy::too_many_arguments)]
pub fn first_return_c1<F: VectorField>(
    field: &F,
    x: &[f64],
    seed: &DMatrix<f64>,
    section: &Section,
    direction: CrossingDirection,
    h: f64,
    order: usize,
    max_time: f64,
) -> Result<PointReturn, IntegratorError> {
    let n = x.len();
    let m = seed.ncols();
    let jets: Vec<Jet<f64>> = (0..n)
        .map(|i| Jet {
            v: x[i],
            d: (0..m).map(|j| seed[(i, j)]).collect(),
        })
        .collect();
    let (state, time) = crossing(field, &jets, section, direction, h, order, max_time)?;
    let y: Vec<f64> = state.iter().map(|j| j.v).collect();
    let f = field.eval(&y)?;
    let dg = section.gradient(&y);
    let denom: f64 = dg.iter().zip(&f).map(|(a, b)| a * b).sum();
    if denom == 0.0 || !denom.is_finite() {
        return Err(IntegratorError::NonTransversal { t: time });
    }
    let v = DMatrix::from_fn(n, m, |i, j| state[i].d[j]);
    let mut dp = v.clone();
    for j in 0..m {
        let w: f64 = (0..n).map(|i| dg[i] * v[(i, j)]).sum();
        for i in 0..n {
            dp[(i, j)] -= f[i] * w / denom;
        }
    }
    Ok(PointReturn {
        state: y,
        time,
        derivative: Some(dp),
    })
}
