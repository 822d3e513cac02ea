//! Choreography problems: embeddings `E`, reductions `R`, sections and the
//! map `Phi = R o P o E` whose zeros are symmetric periodic orbits.

mod phi;
mod unfold;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{Layout, PlanarSystem};
use crate::integrator::{IntegratorError, Section};
use crate::interval::{Interval, IntervalMatrix};
use crate::rootfind::{Method, RootfindError};
use crate::scalar::{Jet, Scalar};

pub use phi::{refine_candidate, PhiMap, PhiRecord, PointPhi};
pub use unfold::{unfold, Curve, CurveSample, Frame, Junction, Reversor};

/// Size parameter of the SuperEight.
pub const GERVER_A: f64 = 0.157029944461;
/// Size parameter of the six-body chain.
pub const CHAIN6_A: f64 = 1.887041548253914;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChoreoError {
    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported problem: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Rootfind(#[from] RootfindError),
    #[error("Newton refinement diverged after {iterations} iterations (|Phi| = {residual:e})")]
    Diverged { iterations: usize, residual: f64 },
    #[error("symmetry copies do not glue at t = {time}: residual {residual:e}")]
    GluingMismatch { time: f64, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "lowercase")]
pub enum ProblemKind {
    Eight,
    Gerver,
    /// Six-body chain integrated on the antipodally reduced system.
    Chain6,
    /// Doubly symmetric chain of `n` bodies on the full system.
    Chain {
        n: usize,
    },
}

/// Parameters the published proofs were run with.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub x_bar: Vec<f64>,
    pub delta: f64,
    pub method: Method,
    pub h_point: f64,
    pub h_set: f64,
    pub order: usize,
}

#[derive(Debug, Clone)]
pub struct ChoreographyProblem {
    kind: ProblemKind,
    a: f64,
    system: PlanarSystem,
    section: Section,
}

impl ChoreographyProblem {
    pub fn eight() -> Self {
        ChoreographyProblem {
            kind: ProblemKind::Eight,
            a: 1.0,
            system: PlanarSystem::nbody(3, Layout::PositionsFirst),
            section: Section::Orthogonal {
                pos: [0, 1],
                vel: [6, 7],
            },
        }
    }

    pub fn gerver(a: f64) -> Self {
        ChoreographyProblem {
            kind: ProblemKind::Gerver,
            a,
            system: PlanarSystem::nbody(4, Layout::PerBody),
            section: Section::difference(4, 0),
        }
    }

    pub fn chain6(a: f64) -> Self {
        ChoreographyProblem {
            kind: ProblemKind::Chain6,
            a,
            system: PlanarSystem::antipodal_six(),
            section: Section::coordinate(5),
        }
    }

    /// General chain with `n = 4k` or `n = 4k + 2` bodies, `n >= 4`.
    pub fn chain(n: usize, a: f64) -> Result<Self, ChoreoError> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(ChoreoError::Unsupported(format!("chain with {n} bodies")));
        }
        let k = n / 4;
        let section = if n.is_multiple_of(4) {
            Section::difference(4 * k, 4 * (k - 1))
        } else {
            Section::coordinate(4 * k + 1)
        };
        Ok(ChoreographyProblem {
            kind: ProblemKind::Chain { n },
            a,
            system: PlanarSystem::nbody(n, Layout::PerBody),
            section,
        })
    }

    /// Looks a problem up by name (`eight`, `gerver`, `chain6`, `chain`).
    pub fn by_name(name: &str, bodies: Option<usize>, a: Option<f64>) -> Result<Self, ChoreoError> {
        match name {
            "eight" => Ok(Self::eight()),
            "gerver" => Ok(Self::gerver(a.unwrap_or(GERVER_A))),
            "chain6" => Ok(Self::chain6(a.unwrap_or(CHAIN6_A))),
            "chain" => {
                let n = bodies
                    .ok_or_else(|| ChoreoError::Unsupported("chain needs a body count".into()))?;
                let default_a = if n == 6 { CHAIN6_A } else { GERVER_A };
                Self::chain(n, a.unwrap_or(default_a))
            }
            other => Err(ChoreoError::Unsupported(other.to_string())),
        }
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn name(&self) -> String {
        match self.kind {
            ProblemKind::Eight => "eight".into(),
            ProblemKind::Gerver => "gerver".into(),
            ProblemKind::Chain6 => "chain6".into(),
            ProblemKind::Chain { n } => format!("chain{n}"),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn system(&self) -> &PlanarSystem {
        &self.system
    }

    pub fn section(&self) -> &Section {
        &self.section
    }

    /// Number of bodies of the choreography (six for the reduced chain).
    pub fn bodies(&self) -> usize {
        match self.kind {
            ProblemKind::Eight => 3,
            ProblemKind::Gerver => 4,
            ProblemKind::Chain6 => 6,
            ProblemKind::Chain { n } => n,
        }
    }

    pub fn reduced_dim(&self) -> usize {
        match self.kind {
            ProblemKind::Eight => 2,
            _ => self.bodies() - 1,
        }
    }

    pub fn state_dim(&self) -> usize {
        4 * self.system.n_bodies()
    }

    /// Full period over the integrated time to the section.
    pub fn period_factor(&self) -> f64 {
        match self.kind {
            ProblemKind::Eight => 12.0,
            _ => 2.0 * self.bodies() as f64,
        }
    }

    /// The parameters of the published computer-assisted proof.
    pub fn reference(&self) -> Option<Reference> {
        match self.kind {
            ProblemKind::Eight => Some(Reference {
                x_bar: vec![0.347116768716, 0.532724944657],
                delta: 1e-6,
                method: Method::Newton,
                h_point: 0.01,
                h_set: 0.01,
                order: 7,
            }),
            ProblemKind::Gerver if self.a == GERVER_A => Some(Reference {
                x_bar: vec![1.382857, 1.87193510824, 0.584872579881],
                delta: 1e-7,
                method: Method::Krawczyk,
                h_point: 0.002,
                h_set: 0.002,
                order: 6,
            }),
            ProblemKind::Chain6 if self.a == CHAIN6_A => Some(Reference {
                x_bar: vec![
                    -0.635277524319,
                    0.140342838651,
                    0.797833002006,
                    0.100637737317,
                    -2.03152227864,
                ],
                delta: 1e-9,
                method: Method::Krawczyk,
                h_point: 0.0025,
                h_set: 0.001,
                order: 9,
            }),
            _ => None,
        }
    }

    fn check_len(expected: usize, got: usize) -> Result<(), ChoreoError> {
        if expected == got {
            Ok(())
        } else {
            Err(ChoreoError::DimensionMismatch { expected, got })
        }
    }

    /// `E`: reduced parameters to the full initial state.
    pub fn embed<S: Scalar>(&self, p: &[S]) -> Result<Vec<S>, ChoreoError> {
        Self::check_len(self.reduced_dim(), p.len())?;
        let zero = p[0].zero_like();
        let a = p[0].constant_like(self.a);
        let neg = |s: &S| s.neg();
        Ok(match self.kind {
            ProblemKind::Eight => {
                let (v, u) = (&p[0], &p[1]);
                let one = p[0].constant_like(1.0);
                vec![
                    one.clone(),
                    zero.clone(),
                    neg(&one),
                    zero.clone(),
                    zero.clone(),
                    zero,
                    v.clone(),
                    u.clone(),
                    v.clone(),
                    u.clone(),
                    v.scale(-2.0),
                    u.scale(-2.0),
                ]
            }
            ProblemKind::Gerver => {
                let (x1, vx0, vy1) = (&p[0], &p[1], &p[2]);
                let blocks = [
                    [zero.clone(), a.clone(), vx0.clone(), zero.clone()],
                    [x1.clone(), zero.clone(), zero.clone(), vy1.clone()],
                ];
                with_antipodes(&blocks)
            }
            ProblemKind::Chain6 => chain_blocks(p, zero, a, 6)
                .into_iter()
                .take(3)
                .flatten()
                .collect(),
            ProblemKind::Chain { n } => chain_blocks(p, zero, a, n).into_iter().flatten().collect(),
        })
    }

    /// `R`: symmetry defect of a state on the section.
    pub fn reduce<S: Scalar>(&self, s: &[S]) -> Result<Vec<S>, ChoreoError> {
        Self::check_len(self.state_dim(), s.len())?;
        let b = |i: usize| self.system.body(s, i);
        Ok(match self.kind {
            ProblemKind::Eight => {
                let q1 = b(0);
                let q2 = b(1);
                let q3 = b(2);
                let sq = |p: &[S; 4], q: &[S; 4]| {
                    let dx = p[0].sub(&q[0]);
                    let dy = p[1].sub(&q[1]);
                    let mut d = dx.mul(&dx);
                    d.mul_acc(&dy, &dy);
                    d
                };
                let dist = sq(&q2, &q1).sub(&sq(&q3, &q1));
                let wx = q2[2].sub(&q3[2]);
                let wy = q2[3].sub(&q3[3]);
                let cross = wx.mul(&q1[1]).sub(&wy.mul(&q1[0]));
                vec![cross, dist]
            }
            ProblemKind::Gerver => chain_reduce(&b, 4),
            ProblemKind::Chain6 => chain_reduce(&b, 6),
            ProblemKind::Chain { n } => chain_reduce(&b, n),
        })
    }

    /// `DE`, a constant matrix of zeros and small integers.
    pub fn embed_derivative(&self) -> DMatrix<f64> {
        let d = self.reduced_dim();
        let probe = Jet::seed(&vec![0.0f64; d]);
        let e = self.embed(&probe).expect("reduced dimension");
        DMatrix::from_fn(e.len(), d, |i, j| e[i].d[j])
    }

    /// Enclosure of `DR` over a state enclosure.
    pub fn reduce_derivative(&self, s: &[Interval]) -> Result<IntervalMatrix, ChoreoError> {
        let r = self.reduce(&Jet::seed(s))?;
        let rows = r.into_iter().map(|j| j.d).collect();
        Ok(IntervalMatrix::from_rows(rows).map_err(RootfindError::from)?)
    }

    /// Point `DR` at a state.
    pub fn reduce_derivative_point(&self, s: &[f64]) -> Result<DMatrix<f64>, ChoreoError> {
        let r = self.reduce(&Jet::seed(s))?;
        let n = s.len();
        Ok(DMatrix::from_fn(r.len(), n, |i, j| r[i].d[j]))
    }
}

fn negate<S: Scalar>(b: &[S; 4]) -> [S; 4] {
    [b[0].neg(), b[1].neg(), b[2].neg(), b[3].neg()]
}

/// Reflection of a body block across the X axis: `(x, -y, -vx, vy)`.
fn mirror<S: Scalar>(b: &[S; 4]) -> [S; 4] {
    [b[0].clone(), b[1].neg(), b[2].neg(), b[3].clone()]
}

fn with_antipodes<S: Scalar>(half: &[[S; 4]]) -> Vec<S> {
    half.iter()
        .cloned()
        .chain(half.iter().map(negate))
        .flatten()
        .collect()
}

/// Body blocks of the chain embedding for `n = 4k` or `n = 4k + 2`.
fn chain_blocks<S: Scalar>(p: &[S], zero: S, a: S, n: usize) -> Vec<[S; 4]> {
    let k = n / 4;
    let mut half: Vec<[S; 4]> = vec![[zero.clone(), a, p[0].clone(), zero.clone()]];
    let free = if n.is_multiple_of(4) { k - 1 } else { k };
    for i in 0..free {
        let o = 1 + 4 * i;
        half.push([
            p[o].clone(),
            p[o + 1].clone(),
            p[o + 2].clone(),
            p[o + 3].clone(),
        ]);
    }
    if n.is_multiple_of(4) {
        let o = 1 + 4 * (k - 1);
        half.push([p[o].clone(), zero.clone(), zero, p[o + 1].clone()]);
    }
    // Bodies k+1 .. n/2-1 mirror bodies k-1 .. 1 (n = 4k) or k .. 1 (n = 4k+2).
    let top = half.len() - 1;
    let start = if n.is_multiple_of(4) { top - 1 } else { top };
    for j in (1..=start).rev() {
        let m = mirror(&half[j]);
        half.push(m);
    }
    debug_assert_eq!(half.len(), n / 2);
    let mut all = half.clone();
    all.extend(half.iter().map(negate));
    all
}

/// `R` for chains: every listed pair of bodies must be mirror images across
/// the X axis (the coordinate fixed by the section is skipped), and for
/// `n = 4k + 2` body `k` must have zero horizontal velocity. A zero of `R`
/// therefore means the state on the section is fixed by the time-reversing
/// reflection `(x, y, vx, vy) -> (x, -y, -vx, vy)` with the pairs swapped,
/// which together with the symmetry built into `E` gives the doubly
/// symmetric orbit. Only this direction is used by the proofs.
fn chain_reduce<S: Scalar>(b: &impl Fn(usize) -> [S; 4], n: usize) -> Vec<S> {
    let k = n / 4;
    // pair (i, j) must satisfy x_i = x_j, y_i = -y_j, vx_i = -vx_j, vy_i = vy_j
    let pair = |i: usize, j: usize, with_x: bool| {
        let (p, q) = (b(i), b(j));
        let mut v = Vec::with_capacity(4);
        if with_x {
            v.push(p[0].sub(&q[0]));
        }
        v.push(p[1].add(&q[1]));
        v.push(p[2].add(&q[2]));
        v.push(p[3].sub(&q[3]));
        v
    };
    if n.is_multiple_of(4) {
        let mut out = pair(k, k - 1, false);
        for i in 0..k.saturating_sub(1) {
            out.extend(pair(i, 2 * k - i - 1, true));
        }
        out
    } else {
        let mut out = vec![b(k)[2].clone()];
        for i in 0..k {
            out.extend(pair(i, 2 * k - i, true));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_embedding() {
        let e = ChoreographyProblem::eight()
            .embed(&[0.347116768716, 0.532724944657])
            .unwrap();
        assert_eq!(
            e,
            vec![
                1.0,
                0.0,
                -1.0,
                0.0,
                0.0,
                0.0,
                0.347116768716,
                0.532724944657,
                0.347116768716,
                0.532724944657,
                -0.694233537432,
                -1.065449889314
            ]
        );
        let z = ChoreographyProblem::eight().embed(&[0.0, 0.0]).unwrap();
        assert!(z[6..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gerver_matches_general_four_chain() {
        let g = ChoreographyProblem::gerver(GERVER_A);
        let c = ChoreographyProblem::chain(4, GERVER_A).unwrap();
        let eg = g.embed(&[1.382857, 1.87193510824, 0.584872579881]).unwrap();
        let ec = c.embed(&[1.87193510824, 1.382857, 0.584872579881]).unwrap();
        assert_eq!(eg, ec);
        let a = GERVER_A;
        #[rustfmt::skip]
        let want = [0.0, a, 1.87193510824, 0.0, 1.382857, 0.0, 0.0, 0.584872579881,
                    0.0, -a, -1.87193510824, 0.0, -1.382857, 0.0, 0.0, -0.584872579881];
        assert_eq!(eg, want);
    }

    #[test]
    fn chain6_matches_general_six_chain() {
        let r = ChoreographyProblem::chain6(CHAIN6_A);
        let full = ChoreographyProblem::chain(6, CHAIN6_A).unwrap();
        let p = [
            -0.635277524319,
            0.140342838651,
            0.797833002006,
            0.100637737317,
            -2.03152227864,
        ];
        let er = r.embed(&p).unwrap();
        let a = CHAIN6_A;
        #[rustfmt::skip]
        let want = [0.0, a, p[0], 0.0, p[1], p[2], p[3], p[4], p[1], -p[2], -p[3], p[4]];
        assert_eq!(er, want);
        assert_eq!(r.system().expand_full(&er), full.embed(&p).unwrap());
    }

    #[test]
    fn center_of_mass_vanishes() {
        for prob in [
            ChoreographyProblem::eight(),
            ChoreographyProblem::gerver(GERVER_A),
            ChoreographyProblem::chain(4, 0.3).unwrap(),
            ChoreographyProblem::chain(6, 0.3).unwrap(),
            ChoreographyProblem::chain(8, 0.3).unwrap(),
            ChoreographyProblem::chain(10, 0.3).unwrap(),
        ] {
            let p: Vec<f64> = (0..prob.reduced_dim())
                .map(|i| 0.1 + 0.37 * i as f64)
                .collect();
            let e = prob.system().expand_full(&prob.embed(&p).unwrap());
            let n = prob.bodies();
            if prob.kind() == ProblemKind::Eight {
                for c in 0..4 {
                    let s: f64 = e.iter().skip(c).step_by(4).sum();
                    assert_eq!(s, 0.0);
                }
                continue;
            }
            // bodies i and i + n/2 are antipodal, so their sum is exactly zero
            for i in 0..n / 2 {
                for c in 0..4 {
                    assert_eq!(
                        e[4 * i + c] + e[4 * (i + n / 2) + c],
                        0.0,
                        "{} body {i}",
                        prob.name()
                    );
                }
            }
        }
    }

    #[test]
    fn reduce_vanishes_on_symmetric_states() {
        // Eight: q1 on the X axis, isosceles, q2' = q3' mirrored.
        let eight = ChoreographyProblem::eight();
        let s = [
            1.0, 0.0, -0.5, 0.5, -0.5, -0.5, 0.0, 0.3, 0.2, -0.15, -0.2, -0.15,
        ];
        assert_eq!(eight.reduce(&s).unwrap(), vec![0.0, 0.0]);
        // Gerver: y1 = -y0, vx1 = -vx0, vy1 = vy0.
        let g = ChoreographyProblem::gerver(GERVER_A);
        let mut s = vec![0.0; 16];
        s[..8].copy_from_slice(&[0.7, 0.2, 0.4, -1.1, 0.7, -0.2, -0.4, -1.1]);
        assert_eq!(g.reduce(&s).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn derivative_patterns() {
        let de = ChoreographyProblem::eight().embed_derivative();
        assert_eq!(de.nrows(), 12);
        assert_eq!(de[(6, 0)], 1.0);
        assert_eq!(de[(10, 0)], -2.0);
        assert_eq!(de[(11, 1)], -2.0);
        assert_eq!(de.column(0).iter().filter(|v| **v != 0.0).count(), 3);

        let g = ChoreographyProblem::gerver(GERVER_A);
        let de = g.embed_derivative();
        assert_eq!(de[(4, 0)], 1.0);
        assert_eq!(de[(12, 0)], -1.0);
        assert_eq!(de[(2, 1)], 1.0);
        assert_eq!(de[(7, 2)], 1.0);
        let dr = g.reduce_derivative_point(&[0.0; 16]).unwrap();
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(3, 16, &[
            0., 1., 0., 0., 0., 1., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.,
            0., 0., 1., 0., 0., 0., 1., 0., 0., 0., 0., 0., 0., 0., 0., 0.,
            0., 0., 0., -1., 0., 0., 0., 1., 0., 0., 0., 0., 0., 0., 0., 0.,
        ]);
        assert_eq!(dr, want);

        let c6 = ChoreographyProblem::chain6(CHAIN6_A);
        let dr = c6.reduce_derivative_point(&[0.0; 12]).unwrap();
        assert_eq!(dr[(0, 6)], 1.0);
        assert_eq!(dr[(1, 0)], 1.0);
        assert_eq!(dr[(1, 8)], -1.0);
        assert_eq!(dr[(4, 3)], 1.0);
        assert_eq!(dr[(4, 11)], -1.0);
    }

    #[test]
    fn dimensions() {
        let c8 = ChoreographyProblem::chain(8, 1.0).unwrap();
        assert_eq!(c8.reduced_dim(), 7);
        assert_eq!(c8.embed(&[0.1; 7]).unwrap().len(), 32);
        assert_eq!(c8.reduce(&vec![0.0; 32]).unwrap().len(), 7);
        assert!(matches!(
            c8.embed(&[0.1; 3]),
            Err(ChoreoError::DimensionMismatch {
                expected: 7,
                got: 3
            })
        ));
        assert!(ChoreographyProblem::chain(5, 1.0).is_err());
    }
}
