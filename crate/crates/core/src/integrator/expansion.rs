use super::{IntegratorError, Mode};
use crate::dynamics::VectorField;
use crate::interval::{Interval, IntervalMatrix, IntervalVector};
use crate::scalar::Jet;

const ROUGH_ATTEMPTS: usize = 20;
const ROUGH_FACTOR: f64 = 1.5;

/// Everything one Taylor step knows about the flow over `[0, h]`, relative
/// to the start of the step.
#[derive(Debug, Clone)]
pub struct StepExpansion {
    pub h: f64,
    pub order: usize,
    /// `T_k(x_hat)`, `k = 0..=order`, at the thin reference point.
    pub center: Vec<Vec<Interval>>,
    /// `T_k([X])` over the hull of the starting set.
    pub hull: Vec<Vec<Interval>>,
    /// `D T_k([X])`.
    pub hull_jac: Vec<IntervalMatrix>,
    /// `T_{order+1}(Q)` over the rough enclosure.
    pub remainder: Vec<Interval>,
    /// `D T_{order+1}(Q)` and the bound `W` on `D phi_s` for `s` in
    /// `[0, h]` (C1 mode only).
    pub remainder_jac: Option<(IntervalMatrix, IntervalMatrix)>,
    /// Rough enclosure `Q` of the trajectory over `[0, h]`.
    pub rough: IntervalVector,
    /// Enclosure of `x - x_hat` over the starting set.
    pub offset: IntervalVector,
}

/// Validated a priori enclosure of `phi([0, h], x)` by first-order Picard
/// iteration with geometric inflation.
pub fn rough_enclosure<F: VectorField>(
    field: &F,
    x: &IntervalVector,
    h: f64,
) -> Result<IntervalVector, IntegratorError> {
    let span = Interval::new(0.0, h).map_err(|_| IntegratorError::InvalidStep(h))?;
    let fx = field.eval(x)?;
    let guess: IntervalVector = x.iter().zip(&fx).map(|(a, b)| *a + span * *b).collect();
    let mut q: IntervalVector = guess
        .iter()
        .map(|a| a.inflate(ROUGH_FACTOR, 1e-9 * (1.0 + a.mag())))
        .collect();
    for _ in 0..ROUGH_ATTEMPTS {
        let fq = field.eval(&q)?;
        let y: IntervalVector = x.iter().zip(&fq).map(|(a, b)| *a + span * *b).collect();
        if !y.is_finite() {
            break;
        }
        if y.subset_interior(&q) {
            return Ok(y);
        }
        q = y
            .iter()
            .map(|a| a.inflate(ROUGH_FACTOR, 1e-9 * (1.0 + a.mag())))
            .collect();
    }
    Err(IntegratorError::RoughEnclosureFailure { h })
}

fn jets_to_layers(layers: Vec<Vec<Jet<Interval>>>) -> (Vec<Vec<Interval>>, Vec<IntervalMatrix>) {
    let mut vals = Vec::with_capacity(layers.len());
    let mut jacs = Vec::with_capacity(layers.len());
    for layer in layers {
        let n = layer.len();
        let m = layer.first().map_or(0, |j| j.d.len());
        let mut jac = IntervalMatrix::zeros(n, m);
        let mut val = Vec::with_capacity(n);
        for (i, j) in layer.into_iter().enumerate() {
            for (c, d) in j.d.iter().enumerate() {
                jac[(i, c)] = *d;
            }
            val.push(j.v);
        }
        vals.push(val);
        jacs.push(jac);
    }
    (vals, jacs)
}

/// Horner evaluation of `sum_k c_k s^k` for interval vectors.
pub(crate) fn poly_eval(coeffs: &[&[Interval]], s: Interval) -> Vec<Interval> {
    let mut acc = coeffs[coeffs.len() - 1].to_vec();
    for c in coeffs[..coeffs.len() - 1].iter().rev() {
        for (a, ck) in acc.iter_mut().zip(c.iter()) {
            *a = *a * s + *ck;
        }
    }
    acc
}

fn matrix_poly_eval(coeffs: &[IntervalMatrix], s: Interval) -> IntervalMatrix {
    let mut acc = coeffs[coeffs.len() - 1].clone();
    for c in coeffs[..coeffs.len() - 1].iter().rev() {
        acc = acc.scale(s).add(c);
    }
    acc
}

impl StepExpansion {
    pub fn compute<F: VectorField>(
        field: &F,
        center: &[f64],
        offset: IntervalVector,
        h: f64,
        order: usize,
        mode: Mode,
    ) -> Result<Self, IntegratorError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(IntegratorError::InvalidStep(h));
        }
        let center_iv: Vec<Interval> = center.iter().map(|&c| Interval::point(c)).collect();
        let hull: IntervalVector = center_iv
            .iter()
            .zip(offset.iter())
            .map(|(c, o)| *c + *o)
            .collect();
        let rough = rough_enclosure(field, &hull, h)?;
        let center_coeffs = field.taylor(&center_iv, order)?;
        let (hull_vals, hull_jac) = jets_to_layers(field.taylor(&Jet::seed(&hull), order)?);
        let (remainder, remainder_jac) = match mode {
            Mode::C0 => (
                field
                    .taylor(rough.as_slice(), order + 1)?
                    .swap_remove(order + 1),
                None,
            ),
            Mode::C1 => {
                let (vals, jacs) = jets_to_layers(field.taylor(&Jet::seed(&rough), order + 1)?);
                let w = flow_derivative_bound(&jacs[1], h)?;
                (vals[order + 1].clone(), Some((jacs[order + 1].clone(), w)))
            }
        };
        Ok(StepExpansion {
            h,
            order,
            center: center_coeffs,
            hull: hull_vals,
            hull_jac,
            remainder,
            remainder_jac,
            rough,
            offset,
        })
    }

    pub fn span(&self) -> Interval {
        Interval::new(0.0, self.h).unwrap_or(Interval::ZERO)
    }

    fn coeff_refs<'a>(layers: &'a [Vec<Interval>], rem: &'a [Interval]) -> Vec<&'a [Interval]> {
        layers
            .iter()
            .map(Vec::as_slice)
            .chain(std::iter::once(rem))
            .collect()
    }

    /// Enclosure of `phi(s, x_hat)` for `s` inside `[0, h]`.
    pub fn center_at(&self, s: Interval) -> Vec<Interval> {
        poly_eval(&Self::coeff_refs(&self.center, &self.remainder), s)
    }

    /// Enclosure of `D_x` of the Taylor polynomial (without remainder).
    pub fn polynomial_jacobian(&self, s: Interval) -> IntervalMatrix {
        matrix_poly_eval(&self.hull_jac, s)
    }

    /// Enclosure of `phi(s, X)` over the whole starting set.
    pub fn state_at(&self, s: Interval) -> IntervalVector {
        let mean_value: Vec<Interval> = {
            let base = self.center_at(s);
            let lin = self.polynomial_jacobian(s).mul_vec(&self.offset);
            base.iter().zip(lin.iter()).map(|(a, b)| *a + *b).collect()
        };
        let direct = poly_eval(&Self::coeff_refs(&self.hull, &self.remainder), s);
        let inside_step = s.lo() >= 0.0 && s.hi() <= self.h;
        mean_value
            .iter()
            .zip(&direct)
            .zip(self.rough.iter())
            .map(|((a, b), q)| {
                let t = a.intersect(b).unwrap_or(*a);
                if inside_step {
                    t.intersect(q).unwrap_or(t)
                } else {
                    t
                }
            })
            .collect()
    }

    /// Enclosure of the trajectory over the whole step.
    pub fn whole(&self) -> IntervalVector {
        self.state_at(self.span())
    }

    /// Enclosure of `D phi_s` over the starting set (C1 mode).
    pub fn transition_at(&self, s: Interval) -> Option<IntervalMatrix> {
        let (rem_jac, w) = self.remainder_jac.as_ref()?;
        let poly = self.polynomial_jacobian(s);
        let sp = s.powi(self.order as u32 + 1);
        Some(poly.add(&rem_jac.mul(w).scale(sp)))
    }
}

/// Entry bounds on `D phi_s`, `s` in `[0, h]`, from `J(Q)`:
/// `D phi_s in I + [0,h] J(Q) [-e, e]` with `e = 1/(1 - hL) >= exp(hL)`.
fn flow_derivative_bound(j: &IntervalMatrix, h: f64) -> Result<IntervalMatrix, IntegratorError> {
    let n = j.rows();
    let l = j.norm_inf();
    let hl = (Interval::point(h) * Interval::point(l)).hi();
    if !(hl < 0.5) {
        return Err(IntegratorError::RoughEnclosureFailure { h });
    }
    let e = Interval::ONE
        .checked_div(&(Interval::ONE - Interval::point(hl)))
        .map_err(|_| IntegratorError::RoughEnclosureFailure { h })?
        .hi();
    let mut bound = IntervalMatrix::zeros(n, n);
    let ee = Interval::new(-e, e).map_err(|_| IntegratorError::RoughEnclosureFailure { h })?;
    for r in 0..n {
        for c in 0..n {
            bound[(r, c)] = ee;
        }
    }
    let span = Interval::new(0.0, h).map_err(|_| IntegratorError::InvalidStep(h))?;
    Ok(IntervalMatrix::identity(n).add(&j.mul(&bound).scale(span)))
}
