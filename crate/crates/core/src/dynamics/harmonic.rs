use super::{DynamicsError, VectorField};
use crate::scalar::Scalar;

/// `x' = v, v' = -x` on the plane `(x, v)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HarmonicField;

impl VectorField for HarmonicField {
    fn dim(&self) -> usize {
        2
    }

    fn taylor<S: Scalar>(&self, x: &[S], order: usize) -> Result<Vec<Vec<S>>, DynamicsError> {
        self.check_dim(x.len())?;
        let mut c = vec![x.to_vec()];
        for k in 0..order {
            let d = (k + 1) as u32;
            let next = vec![c[k][1].div_int(d), c[k][0].neg().div_int(d)];
            c.push(next);
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_of_cosine() {
        let c = HarmonicField.taylor(&[1.0f64, 0.0], 4).unwrap();
        let x: Vec<f64> = c.iter().map(|l| l[0]).collect();
        assert_eq!(x, vec![1.0, 0.0, -0.5, 0.0, 1.0 / 24.0]);
    }
}
