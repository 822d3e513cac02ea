use serde::{Deserialize, Serialize};

use crate::interval::{Interval, IntervalVector};
use crate::scalar::{Jet, Scalar};

/// A Poincaré section `{x : g(x) = 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Section {
    /// `g = sum_i c_i x_i`
    Linear(Vec<(usize, f64)>),
    /// `g = <q, v>`: position orthogonal to velocity.
    Orthogonal { pos: [usize; 2], vel: [usize; 2] },
}

/// Which sign change of `g` counts as a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CrossingDirection {
    PlusToMinus,
    MinusToPlus,
    /// Whichever sign change comes first.
    #[default]
    Either,
}

impl Section {
    pub fn coordinate(i: usize) -> Self {
        Section::Linear(vec![(i, 1.0)])
    }

    pub fn difference(i: usize, j: usize) -> Self {
        Section::Linear(vec![(i, 1.0), (j, -1.0)])
    }

    pub fn value<S: Scalar>(&self, x: &[S]) -> S {
        match self {
            Section::Linear(terms) => {
                let mut acc = x[0].zero_like();
                for &(i, c) in terms {
                    acc.add_assign(&x[i].scale(c));
                }
                acc
            }
            Section::Orthogonal { pos, vel } => {
                let mut acc = x[pos[0]].mul(&x[vel[0]]);
                acc.mul_acc(&x[pos[1]], &x[vel[1]]);
                acc
            }
        }
    }

    pub fn gradient<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let seeded = Jet::seed(x);
        self.value(&seeded).d
    }

    /// Enclosure of `dg . f`, the time derivative of `g` along the flow.
    pub fn rate(&self, x: &IntervalVector, f: &[Interval]) -> Interval {
        self.gradient(x.as_slice())
            .iter()
            .zip(f)
            .fold(Interval::ZERO, |acc, (a, b)| acc + *a * *b)
    }
}
