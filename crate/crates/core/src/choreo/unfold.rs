//! Reconstruction of the whole periodic orbit from the segment between the
//! two symmetric configurations.
//!
//! Both ends of the segment are fixed points of time-reversing symmetries
//! `M0` (at `t = 0`) and `M1` (at the section, `t = t1`):
//! `x(-s) = M0 x(s)` and `x(t1 + s) = M1 x(t1 - s)`. Their product
//! `G = M1 M0` shifts time by `2 t1`, and `G` has finite order, which closes
//! the orbit.

use serde::{Deserialize, Serialize};

use super::{ChoreoError, ChoreographyProblem, ProblemKind};
use crate::integrator::{nonrigorous, CrossingDirection, Integrator, Mode, DEFAULT_BUDGET_TIME};
use crate::interval::{Interval, IntervalVector};
use crate::scalar::Scalar;

/// Time-reversing symmetry of the full system: body `i` becomes
/// `(A q_{perm(i)}, -A v_{perm(i)})`.
#[derive(Debug, Clone)]
pub struct Reversor {
    pub perm: Vec<usize>,
    pub a: [[Interval; 2]; 2],
}

impl Reversor {
    /// Acts on a state in per-body order.
    pub fn apply<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let mut out = Vec::with_capacity(x.len());
        let lin = |u: &S, v: &S, row: usize| {
            let mut r = u.enclosure_like(self.a[row][0]).mul(u);
            r.mul_acc(&v.enclosure_like(self.a[row][1]), v);
            r
        };
        for &j in &self.perm {
            let b = &x[4 * j..4 * j + 4];
            out.push(lin(&b[0], &b[1], 0));
            out.push(lin(&b[0], &b[1], 1));
            out.push(lin(&b[2], &b[3], 0).neg());
            out.push(lin(&b[2], &b[3], 1).neg());
        }
        out
    }
}

fn diag(a: f64, b: f64) -> [[Interval; 2]; 2] {
    [
        [Interval::point(a), Interval::ZERO],
        [Interval::ZERO, Interval::point(b)],
    ]
}

/// Reflection across the line through the origin and `(x, y)`.
fn reflection(x: Interval, y: Interval) -> Result<[[Interval; 2]; 2], ChoreoError> {
    let r2 = x.sqr() + y.sqr();
    let inv = r2.recip().map_err(|e| ChoreoError::Rootfind(e.into()))?;
    let c = (x.sqr() - y.sqr()) * inv;
    let s = (x * y).scale(2.0) * inv;
    Ok([[c, s], [s, -c]])
}

impl ChoreographyProblem {
    /// The reversing symmetries at `t = 0` and at the section, given the
    /// (full, per-body) crossing state.
    pub fn reversors(&self, crossing: &[Interval]) -> Result<(Reversor, Reversor), ChoreoError> {
        match self.kind() {
            ProblemKind::Eight => {
                let m0 = Reversor {
                    perm: vec![1, 0, 2],
                    a: diag(-1.0, -1.0),
                };
                let m1 = Reversor {
                    perm: vec![0, 2, 1],
                    a: reflection(crossing[0], crossing[1])?,
                };
                Ok((m0, m1))
            }
            _ => {
                let n = self.bodies();
                let half = n / 2;
                let m0 = Reversor {
                    perm: (0..n).map(|i| (half + n - i) % n).collect(),
                    a: diag(1.0, -1.0),
                };
                let m1 = Reversor {
                    perm: (0..n).map(|i| (half + 2 * n - i - 1) % n).collect(),
                    a: diag(1.0, -1.0),
                };
                Ok((m0, m1))
            }
        }
    }

    /// Number of `2 t1` shifts in one period.
    pub fn shift_order(&self) -> usize {
        match self.kind() {
            ProblemKind::Eight => 6,
            _ => self.bodies(),
        }
    }

    /// Full per-body state.
    pub fn full_state<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.system().expand_full(x)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSample {
    pub t: f64,
    /// Positions of all bodies.
    pub positions: Vec<[f64; 2]>,
}

/// Gluing residual at one junction; a valid orbit has zero in every
/// component.
#[derive(Debug, Clone)]
pub struct Junction {
    pub label: String,
    pub time: f64,
    pub residual: IntervalVector,
}

impl Junction {
    pub fn contains_zero(&self) -> bool {
        self.residual.iter().all(Interval::contains_zero)
    }

    pub fn magnitude(&self) -> f64 {
        self.residual.iter().map(Interval::mag).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub bodies: usize,
    pub period: Interval,
    pub samples: Vec<CurveSample>,
    pub junctions: Vec<Junction>,
}

/// Whether to report the curve in the frame the computation runs in or in
/// the conventional frame (Eight rotated so its symmetry axes are the
/// coordinate axes; six-chain with axes swapped back and a quarter-period
/// time shift).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    Computation,
    #[default]
    Original,
}

fn sub(a: &[Interval], b: &[Interval]) -> IntervalVector {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

/// Unfolds the orbit through the certified box `x` in reduced space.
///
/// Junction residuals come from a rigorous C0 integration of `E([X])`; the
/// samples come from a floating-point trajectory from `mid [X]` with
/// `per_segment` samples on `[0, t1]`.
pub fn unfold(
    problem: &ChoreographyProblem,
    x: &IntervalVector,
    h: f64,
    order: usize,
    per_segment: usize,
    frame: Frame,
) -> Result<Curve, ChoreoError> {
    let phi = super::PhiMap::new(problem, h, h, order);
    let (set, x_mid) = phi.initial_set(x)?;
    let integ = Integrator::new(problem.system(), order, Mode::C0);
    let start_enc = set.hull();
    let res = integ.poincare_map(
        &crate::integrator::LohnerSet {
            variation: None,
            ..set
        },
        problem.section(),
        CrossingDirection::Either,
        h,
    )?;
    let cross_full = problem.full_state(res.state.as_slice());
    let start_full = problem.full_state(start_enc.as_slice());
    let (m0, m1) = problem.reversors(&cross_full)?;

    let t1 = res.time;
    let mut junctions = vec![
        Junction {
            label: "t = 0".into(),
            time: 0.0,
            residual: sub(&start_full, &m0.apply(&start_full)),
        },
        Junction {
            label: "section".into(),
            time: t1.mid(),
            residual: sub(&cross_full, &m1.apply(&cross_full)),
        },
    ];
    let mut closed = start_full.clone();
    for _ in 0..problem.shift_order() {
        closed = m1.apply(&m0.apply(&closed));
    }
    let period = t1 * Interval::point(problem.period_factor());
    junctions.push(Junction {
        label: "period".into(),
        time: period.mid(),
        residual: sub(&closed, &start_full),
    });
    for j in &junctions {
        if !j.contains_zero() {
            return Err(ChoreoError::GluingMismatch {
                time: j.time,
                residual: j.magnitude(),
            });
        }
    }

    // Floating-point samples.
    let start = problem.embed(&x_mid)?;
    let ret = nonrigorous::first_return(
        problem.system(),
        &start,
        problem.section(),
        CrossingDirection::Either,
        h,
        nonrigorous::DEFAULT_ORDER,
        DEFAULT_BUDGET_TIME,
    )?;
    let per_segment = per_segment.max(1);
    let dt = ret.time / per_segment as f64;
    let mut seg: Vec<(f64, Vec<f64>)> = nonrigorous::trajectory(
        problem.system(),
        &start,
        ret.time,
        dt,
        nonrigorous::DEFAULT_ORDER,
    )?
    .into_iter()
    .map(|(t, s)| (t, problem.full_state(&s)))
    .collect();
    if let Some(last) = seg.last_mut() {
        last.1 = problem.full_state(&ret.state);
        last.0 = ret.time;
    }
    let m1p = {
        let cp = problem.full_state(&ret.state);
        let iv: Vec<Interval> = cp.iter().map(|v| Interval::point(*v)).collect();
        problem.reversors(&iv)?.1
    };
    let t1p = ret.time;
    let mut base: Vec<(f64, Vec<f64>)> = seg.clone();
    for (t, s) in seg.iter().rev().skip(1) {
        base.push((2.0 * t1p - t, m1p.apply(s)));
    }
    let mut all: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut piece = base.clone();
    for k in 0..problem.shift_order() {
        let shift = 2.0 * t1p * k as f64;
        let skip = usize::from(k > 0);
        all.extend(piece.iter().skip(skip).map(|(t, s)| (t + shift, s.clone())));
        piece = piece
            .iter()
            .map(|(t, s)| (*t, m1p.apply(&m0.apply(s))))
            .collect();
    }

    let bodies = problem.bodies();
    let period_p = t1p * problem.period_factor();
    let mut samples: Vec<CurveSample> = all
        .into_iter()
        .map(|(t, s)| CurveSample {
            t,
            positions: (0..bodies).map(|i| [s[4 * i], s[4 * i + 1]]).collect(),
        })
        .collect();

    if frame == Frame::Original {
        match problem.kind() {
            ProblemKind::Eight => {
                let cp = problem.full_state(&ret.state);
                let theta = cp[1].atan2(cp[0]);
                let (sn, cs) = (-theta).sin_cos();
                for smp in &mut samples {
                    for p in &mut smp.positions {
                        *p = [cs * p[0] - sn * p[1], sn * p[0] + cs * p[1]];
                    }
                }
            }
            ProblemKind::Chain6 => {
                for smp in &mut samples {
                    for p in &mut smp.positions {
                        *p = [p[1], p[0]];
                    }
                    smp.t = (smp.t + 0.25 * period_p) % period_p;
                }
                samples.sort_by(|a, b| a.t.total_cmp(&b.t));
            }
            _ => {}
        }
    }

    Ok(Curve {
        bodies,
        period,
        samples,
        junctions,
    })
}

impl Curve {
    /// Plain-text table: `t x_0 y_0 x_1 y_1 ...` per line.
    pub fn to_table(&self) -> String {
        let mut out = String::from("# t");
        for i in 0..self.bodies {
            out.push_str(&format!(" x{i} y{i}"));
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{:.17e}", s.t));
            for p in &s.positions {
                out.push_str(&format!(" {:.17e} {:.17e}", p[0], p[1]));
            }
            out.push('\n');
        }
        out
    }
}
