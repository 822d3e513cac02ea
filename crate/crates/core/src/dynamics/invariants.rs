use super::{DynamicsError, PlanarSystem};
use crate::scalar::Scalar;

/// First integrals of the full (unfolded) system.
#[derive(Debug, Clone, PartialEq)]
pub struct Invariants<S> {
    pub energy: S,
    pub angular_momentum: S,
    pub momentum: [S; 2],
    pub center_of_mass: [S; 2],
}

/// Energy, angular momentum, linear momentum and mass sum of `x`.
pub fn invariants<S: Scalar>(sys: &PlanarSystem, x: &[S]) -> Result<Invariants<S>, DynamicsError> {
    let full = sys.expand_full(x);
    let n = full.len() / 4;
    let zero = x[0].zero_like();
    let mut kinetic = zero.clone();
    let mut potential = zero.clone();
    let mut ang = zero.clone();
    let mut mom = [zero.clone(), zero.clone()];
    let mut com = [zero.clone(), zero.clone()];
    for i in 0..n {
        let b = &full[4 * i..4 * i + 4];
        kinetic.mul_acc(&b[2], &b[2]);
        kinetic.mul_acc(&b[3], &b[3]);
        ang.mul_acc(&b[0], &b[3]);
        ang.mul_acc(&b[1].neg(), &b[2]);
        mom[0].add_assign(&b[2]);
        mom[1].add_assign(&b[3]);
        com[0].add_assign(&b[0]);
        com[1].add_assign(&b[1]);
        for j in i + 1..n {
            let dx = full[4 * j].sub(&b[0]);
            let dy = full[4 * j + 1].sub(&b[1]);
            let mut d = dx.mul(&dx);
            d.mul_acc(&dy, &dy);
            let inv_r = d
                .sqrt()
                .and_then(|r| r.recip())
                .ok_or(DynamicsError::CollisionEnclosure(i, j))?;
            potential.add_assign(&inv_r);
        }
    }
    Ok(Invariants {
        energy: kinetic.scale(0.5).sub(&potential),
        angular_momentum: ang,
        momentum: mom,
        center_of_mass: com,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Layout;

    #[test]
    fn circular_pair() {
        let sys = PlanarSystem::nbody(2, Layout::PerBody);
        let v = 0.5f64.sqrt();
        let inv = invariants(&sys, &[0.5, 0.0, 0.0, v, -0.5, 0.0, 0.0, -v]).unwrap();
        assert!((inv.energy - (0.5 - 1.0)).abs() < 1e-15);
        assert!((inv.angular_momentum - v).abs() < 1e-15);
        assert_eq!(inv.momentum, [0.0, 0.0]);
    }
}
