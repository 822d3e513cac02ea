use nalgebra::DMatrix;

use super::expansion::StepExpansion;
use super::IntegratorError;
use crate::interval::{Interval, IntervalMatrix, IntervalVector};

/// Doubleton set `x_hat + C r0 + B r` with point `x_hat`, `C`, `B` and
/// interval vectors `r0` (frozen initial box) and `r` (accumulated errors).
#[derive(Debug, Clone)]
pub struct LohnerSet {
    pub center: Vec<f64>,
    pub c: DMatrix<f64>,
    pub r0: IntervalVector,
    pub b: DMatrix<f64>,
    pub r: IntervalVector,
    pub variation: Option<VariationSet>,
}

/// Matrix set `V_hat + B R` enclosing the derivative of the flow composed
/// with the seed matrix the propagation started from.
#[derive(Debug, Clone)]
pub struct VariationSet {
    pub center: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub r: IntervalMatrix,
}

impl VariationSet {
    pub fn new(seed: DMatrix<f64>) -> Self {
        let n = seed.nrows();
        let m = seed.ncols();
        VariationSet {
            center: seed,
            b: DMatrix::identity(n, n),
            r: IntervalMatrix::zeros(n, m),
        }
    }

    pub fn hull(&self) -> IntervalMatrix {
        IntervalMatrix::from_point(&self.center)
            .add(&IntervalMatrix::from_point(&self.b).mul(&self.r))
    }
}

impl LohnerSet {
    pub fn from_point(x: &[f64]) -> Self {
        let n = x.len();
        LohnerSet {
            center: x.to_vec(),
            c: DMatrix::zeros(n, 0),
            r0: IntervalVector::new(Vec::new()),
            b: DMatrix::identity(n, n),
            r: IntervalVector::zeros(n),
            variation: None,
        }
    }

    pub fn from_box(x: &IntervalVector) -> Self {
        let center = x.mid();
        let r = x
            .iter()
            .zip(&center)
            .map(|(a, c)| *a - Interval::point(*c))
            .collect();
        let n = x.len();
        LohnerSet {
            center,
            c: DMatrix::zeros(n, 0),
            r0: IntervalVector::new(Vec::new()),
            b: DMatrix::identity(n, n),
            r,
            variation: None,
        }
    }

    /// The set `x_hat + C r0 + r` (with `B = I`).
    pub fn parametrized(
        center: Vec<f64>,
        c: DMatrix<f64>,
        r0: IntervalVector,
        r: IntervalVector,
    ) -> Self {
        let n = center.len();
        LohnerSet {
            center,
            c,
            r0,
            b: DMatrix::identity(n, n),
            r,
            variation: None,
        }
    }

    /// Enables C1 propagation starting from `seed` (identity, or the
    /// derivative of an embedding).
    pub fn with_variation(mut self, seed: DMatrix<f64>) -> Self {
        self.variation = Some(VariationSet::new(seed));
        self
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Enclosure of `x - x_hat`.
    pub fn offset(&self) -> IntervalVector {
        let a = IntervalMatrix::from_point(&self.c).mul_vec(&self.r0);
        let b = IntervalMatrix::from_point(&self.b).mul_vec(&self.r);
        &a + &b
    }

    pub fn hull(&self) -> IntervalVector {
        let off = self.offset();
        self.center
            .iter()
            .zip(off.iter())
            .map(|(c, o)| Interval::point(*c) + *o)
            .collect()
    }

    pub fn transition_hull(&self) -> Option<IntervalMatrix> {
        self.variation.as_ref().map(VariationSet::hull)
    }

    /// The set after time `s` of the step described by `exp`.
    pub fn advance(&self, exp: &StepExpansion, s: f64) -> Result<LohnerSet, IntegratorError> {
        let si = Interval::point(s);
        let y = exp.center_at(si);
        let a = exp.polynomial_jacobian(si);
        let center: Vec<f64> = y.iter().map(Interval::mid).collect();
        let y_rest: IntervalVector = y
            .iter()
            .zip(&center)
            .map(|(v, c)| *v - Interval::point(*c))
            .collect();

        let ac = a.mul_point(&self.c);
        let c_new = ac.mid();
        let dc = ac.sub(&IntervalMatrix::from_point(&c_new));
        let ab = a.mul_point(&self.b);
        let b_new = reorthonormalize(&ab.mid(), &self.r);
        let b_inv = orthonormal_inverse(&b_new)?;
        let carried = b_inv.mul(&ab).mul_vec(&self.r);
        let fresh_err = &y_rest + &dc.mul_vec(&self.r0);
        let fresh = b_inv.mul_vec(&fresh_err);
        let r_new = &carried + &fresh;

        let variation = match (&self.variation, exp.remainder_jac.as_ref()) {
            (Some(v), Some((rem_jac, w))) => {
                let sp = si.powi(exp.order as u32 + 1);
                let m = a.add(&rem_jac.mul(w).scale(sp));
                Some(advance_variation(v, &m)?)
            }
            (Some(_), None) => return Err(IntegratorError::MissingDerivative),
            (None, _) => None,
        };
        let out = LohnerSet {
            center,
            c: c_new,
            r0: self.r0.clone(),
            b: b_new,
            r: r_new,
            variation,
        };
        if !out.r.is_finite() {
            return Err(IntegratorError::Blowup);
        }
        Ok(out)
    }
}

fn advance_variation(
    v: &VariationSet,
    m: &IntervalMatrix,
) -> Result<VariationSet, IntegratorError> {
    let mv = m.mul_point(&v.center);
    let center = mv.mid();
    let rest = mv.sub(&IntervalMatrix::from_point(&center));
    let mb = m.mul_point(&v.b);
    let weights: IntervalVector = (0..v.r.rows())
        .map(|i| {
            let w = v.r.row(i).iter().map(Interval::rad).fold(0.0, f64::max);
            Interval::around(0.0, w)
        })
        .collect();
    let b = reorthonormalize(&mb.mid(), &weights);
    let b_inv = orthonormal_inverse(&b)?;
    let r = b_inv.mul(&mb).mul(&v.r).add(&b_inv.mul(&rest));
    if !r.is_finite() {
        return Err(IntegratorError::Blowup);
    }
    Ok(VariationSet { center, b, r })
}

/// Orthonormal frame from the QR factorization of `m`, with columns taken in
/// decreasing order of `|m_j| rad(r_j)` so the dominant error direction is
/// kept exactly.
fn reorthonormalize(m: &DMatrix<f64>, r: &IntervalVector) -> DMatrix<f64> {
    let n = m.ncols();
    let mut order: Vec<usize> = (0..n).collect();
    let weight = |j: usize| m.column(j).norm() * r[j].rad();
    order.sort_by(|&i, &j| {
        weight(j)
            .partial_cmp(&weight(i))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let permuted = DMatrix::from_fn(m.nrows(), n, |i, j| m[(i, order[j])]);
    permuted.qr().q()
}

/// Enclosure of `Q^-1` for a numerically orthonormal `Q`:
/// `(Q^T Q)^-1 in I + E + [-e, e]` with `E = I - Q^T Q`, `e = |E|^2 / (1 - |E|)`.
fn orthonormal_inverse(q: &DMatrix<f64>) -> Result<IntervalMatrix, IntegratorError> {
    let n = q.nrows();
    let qi = IntervalMatrix::from_point(q);
    let qt = qi.transpose();
    let e = IntervalMatrix::identity(n).sub(&qt.mul(&qi));
    let eps = e.norm_inf();
    if !(eps < 0.5) {
        return Err(IntegratorError::Blowup);
    }
    let eps_i = Interval::point(eps);
    let tail = (eps_i * eps_i)
        .checked_div(&(Interval::ONE - eps_i))
        .map_err(|_| IntegratorError::Blowup)?
        .hi();
    let mut corr = IntervalMatrix::identity(n).add(&e);
    let band = Interval::around(0.0, tail);
    for i in 0..n {
        for j in 0..n {
            corr[(i, j)] += band;
        }
    }
    Ok(corr.mul(&qt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_inverse_encloses_transpose() {
        let theta: f64 = 0.3;
        let q =
            DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
        let inv = orthonormal_inverse(&q).unwrap();
        assert!(inv.contains_point(&q.transpose()));
        assert!(inv.max_diam() < 1e-14);
    }
}
