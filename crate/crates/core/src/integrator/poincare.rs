use super::expansion::StepExpansion;
use super::{CrossingDirection, EnclosureStep, Integrator, IntegratorError, LohnerSet, Section};
use crate::dynamics::VectorField;
use crate::interval::{Interval, IntervalMatrix, IntervalVector};

/// Integration time after which a missing crossing is reported.
pub const DEFAULT_BUDGET_TIME: f64 = 10.0;

const PRESIGN_BUDGET: usize = 200;
const ISOLATION_ATTEMPTS: usize = 7;
const ROOT_SAMPLES: usize = 32;

/// Rigorous image of a set under the first-return map to a section.
#[derive(Debug, Clone)]
pub struct PoincareResult {
    /// Enclosure of `P(x)` over the set.
    pub state: IntervalVector,
    /// Enclosure of `DP(x) V` where `V` is the propagated seed (C1 mode).
    pub derivative: Option<IntervalMatrix>,
    /// Enclosure of the return time.
    pub time: Interval,
    /// Full steps followed by the partial step that ends on the section.
    pub steps: Vec<EnclosureStep>,
}

#[derive(Clone, Copy)]
struct Sign {
    positive_before: bool,
}

impl Sign {
    fn before(self, g: Interval) -> bool {
        if self.positive_before {
            g.lo() > 0.0
        } else {
            g.hi() < 0.0
        }
    }

    fn toward(self, rate: Interval) -> bool {
        if self.positive_before {
            rate.hi() < 0.0
        } else {
            rate.lo() > 0.0
        }
    }

    fn before_f64(self, g: f64) -> bool {
        if self.positive_before {
            g > 0.0
        } else {
            g < 0.0
        }
    }
}

fn interval(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap_or_else(|_| Interval::point(lo))
}

impl<F: VectorField> Integrator<'_, F> {
    /// First crossing of `section` from `set`, with the default time budget.
    pub fn poincare_map(
        &self,
        set: &LohnerSet,
        section: &Section,
        direction: CrossingDirection,
        h: f64,
    ) -> Result<PoincareResult, IntegratorError> {
        let budget = (DEFAULT_BUDGET_TIME / h).ceil() as usize;
        self.poincare_map_with_budget(set, section, direction, h, budget)
    }

    pub fn poincare_map_with_budget(
        &self,
        set: &LohnerSet,
        section: &Section,
        direction: CrossingDirection,
        h: f64,
        max_steps: usize,
    ) -> Result<PoincareResult, IntegratorError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(IntegratorError::InvalidStep(h));
        }
        let g0 = section.value(set.hull().as_slice());
        let sign = match direction {
            CrossingDirection::PlusToMinus if g0.lo() > 0.0 => Sign {
                positive_before: true,
            },
            CrossingDirection::MinusToPlus if g0.hi() < 0.0 => Sign {
                positive_before: false,
            },
            CrossingDirection::Either if g0.lo() > 0.0 => Sign {
                positive_before: true,
            },
            CrossingDirection::Either if g0.hi() < 0.0 => Sign {
                positive_before: false,
            },
            _ => return Err(IntegratorError::NonTransversal { t: 0.0 }),
        };

        let mut cur = set.clone();
        let mut t = Interval::ZERO;
        let mut steps = Vec::new();
        for _ in 0..max_steps {
            let exp = self.expand(&cur, h)?;
            let whole = exp.whole();
            let committed = sign.before(section.value(whole.as_slice())) || {
                let tau = self.center_root(&exp, section, sign, h);
                match tau {
                    Some(tau) if tau <= h => false,
                    _ => self.prove_presign(&exp, section, sign, 0.0, h),
                }
            };
            if committed {
                let next = cur.advance(&exp, h)?;
                let time = t + Interval::point(h);
                steps.push(EnclosureStep {
                    t_prev: t.mid(),
                    t: time.mid(),
                    time,
                    tight: next.hull(),
                    whole,
                    transition: next.transition_hull(),
                });
                cur = next;
                t = time;
                continue;
            }
            let tau_star = self
                .center_root(&exp, section, sign, 2.0 * h)
                .ok_or(IntegratorError::NonTransversal { t: t.mid() })?;
            let (exp, tau) = self.isolate(&cur, exp, section, sign, tau_star, t.mid())?;
            return self.finish(&cur, &exp, section, tau, t, steps);
        }
        Err(IntegratorError::NoCrossing { steps: max_steps })
    }

    /// Nonrigorous first sign change of `g` along the centre polynomial on
    /// `[0, horizon]`.
    fn center_root(
        &self,
        exp: &StepExpansion,
        section: &Section,
        sign: Sign,
        horizon: f64,
    ) -> Option<f64> {
        let coeffs: Vec<Vec<f64>> = exp
            .center
            .iter()
            .map(|l| l.iter().map(Interval::mid).collect())
            .collect();
        let eval = |s: f64| -> (f64, f64) {
            let n = coeffs[0].len();
            let mut x = vec![0.0; n];
            let mut dx = vec![0.0; n];
            for c in coeffs.iter().rev() {
                for i in 0..n {
                    dx[i] = dx[i] * s + x[i];
                    x[i] = x[i] * s + c[i];
                }
            }
            let g = section.value(&x);
            let dg = section.gradient(&x);
            let rate = dg.iter().zip(&dx).map(|(a, b)| a * b).sum();
            (g, rate)
        };
        let mut prev = 0.0;
        for i in 1..=ROOT_SAMPLES {
            let s = horizon * i as f64 / ROOT_SAMPLES as f64;
            let (g, _) = eval(s);
            if !sign.before_f64(g) {
                let (mut lo, mut hi) = (prev, s);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if sign.before_f64(eval(mid).0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 4.0 * f64::EPSILON * hi.max(1e-300) {
                        break;
                    }
                }
                let mut root = 0.5 * (lo + hi);
                for _ in 0..3 {
                    let (g, rate) = eval(root);
                    if rate == 0.0 {
                        break;
                    }
                    let next = root - g / rate;
                    if !(next >= prev && next <= s) {
                        break;
                    }
                    root = next;
                }
                return Some(root);
            }
            prev = s;
        }
        None
    }

    /// Proves that `g` keeps its pre-crossing sign for `s` in `[a, b]`.
    fn prove_presign(
        &self,
        exp: &StepExpansion,
        section: &Section,
        sign: Sign,
        a: f64,
        b: f64,
    ) -> bool {
        let mut stack = vec![(a, b)];
        let mut evaluations = 0;
        while let Some((lo, hi)) = stack.pop() {
            evaluations += 1;
            if evaluations > PRESIGN_BUDGET {
                return false;
            }
            let piece = exp.state_at(interval(lo, hi));
            if sign.before(section.value(piece.as_slice())) {
                continue;
            }
            if let Ok(f) = self.field.eval(piece.as_slice()) {
                let end = exp.state_at(Interval::point(hi));
                if sign.toward(section.rate(&piece, &f))
                    && sign.before(section.value(end.as_slice()))
                {
                    continue;
                }
            }
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                return false;
            }
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
        true
    }

    /// Interval Newton in time around `tau_star`; returns the (possibly
    /// lengthened) expansion and the crossing-time enclosure relative to
    /// the step start.
    fn isolate(
        &self,
        set: &LohnerSet,
        mut exp: StepExpansion,
        section: &Section,
        sign: Sign,
        tau_star: f64,
        t_start: f64,
    ) -> Result<(StepExpansion, Interval), IntegratorError> {
        let fail = IntegratorError::NonTransversal {
            t: t_start + tau_star,
        };
        let at_star =
            |e: &StepExpansion| section.value(e.state_at(Interval::point(tau_star)).as_slice());
        let mut eta = {
            let x = exp.state_at(Interval::point(tau_star));
            let f = self.field.eval(x.as_slice())?;
            let rate = section.rate(&x, &f).mig();
            let g = section.value(x.as_slice());
            let from_width = if rate > 0.0 {
                4.0 * g.rad() / rate
            } else {
                0.0
            };
            from_width.max(1e-12 * tau_star.max(1.0))
        };
        for _ in 0..ISOLATION_ATTEMPTS {
            if tau_star + eta > exp.h {
                exp = self.expand(set, tau_star + 2.0 * eta)?;
            }
            let lo = (tau_star - eta).max(0.0);
            let hi = tau_star + eta;
            let window = interval(lo, hi);
            let piece = exp.state_at(window);
            let f = self.field.eval(piece.as_slice())?;
            let rate = section.rate(&piece, &f);
            if sign.toward(rate) {
                let g = at_star(&exp);
                let newton = Interval::point(tau_star) - g.checked_div(&rate)?;
                if newton.lo() > lo && newton.hi() < hi {
                    if lo == 0.0 || self.prove_presign(&exp, section, sign, 0.0, lo) {
                        return Ok((exp, newton));
                    }
                    return Err(fail);
                }
            }
            eta *= 8.0;
        }
        Err(fail)
    }

    fn finish(
        &self,
        set: &LohnerSet,
        exp: &StepExpansion,
        section: &Section,
        tau: Interval,
        t: Interval,
        mut steps: Vec<EnclosureStep>,
    ) -> Result<PoincareResult, IntegratorError> {
        let tau_hat = tau.mid();
        let at_hat = exp.state_at(Interval::point(tau_hat));
        let over = exp.state_at(tau);
        let f_over = self.field.eval(over.as_slice())?;
        let dt = tau - Interval::point(tau_hat);
        let state: IntervalVector = at_hat
            .iter()
            .zip(&f_over)
            .zip(over.iter())
            .map(|((a, f), o)| {
                let mv = *a + *f * dt;
                mv.intersect(o).unwrap_or(mv)
            })
            .collect();

        let derivative = match (set.transition_hull(), exp.transition_at(tau)) {
            (Some(v0), Some(m)) => {
                let v = m.mul(&v0);
                let f = self.field.eval(state.as_slice())?;
                let dg = section.gradient(state.as_slice());
                let denom = dg
                    .iter()
                    .zip(&f)
                    .fold(Interval::ZERO, |acc, (a, b)| acc + *a * *b);
                if denom.contains_zero() {
                    return Err(IntegratorError::NonTransversal {
                        t: t.mid() + tau_hat,
                    });
                }
                let mut out = v.clone();
                for j in 0..v.cols() {
                    let w = (0..v.rows()).fold(Interval::ZERO, |acc, i| acc + dg[i] * v[(i, j)]);
                    for i in 0..v.rows() {
                        let corr = f[i].checked_div(&denom)? * w;
                        out[(i, j)] = v[(i, j)] - corr;
                    }
                }
                Some(out)
            }
            _ => None,
        };

        let time = t + tau;
        steps.push(EnclosureStep {
            t_prev: t.mid(),
            t: time.mid(),
            time,
            tight: state.clone(),
            whole: exp.state_at(interval(0.0, tau.hi())),
            transition: derivative.clone(),
        });
        Ok(PoincareResult {
            state,
            derivative,
            time,
            steps,
        })
    }
}
