use serde::{Deserialize, Serialize};

use super::{DynamicsError, VectorField};
use crate::interval::{Interval, IntervalMatrix};
use crate::scalar::Scalar;

/// Ordering of the state components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// `x_1, y_1, ..., x_n, y_n, vx_1, vy_1, ..., vx_n, vy_n`
    PositionsFirst,
    /// `x_1, y_1, vx_1, vy_1, x_2, ...`
    PerBody,
}

/// How a pair of integrated bodies attract each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// Ordinary pair: `delta = q_b - q_a`, `a` gains `delta/r^3`, `b` loses it.
    Direct,
    /// Body `a` against the antipodal image `-q_b` of an implicit body (and
    /// vice versa). With `a == b` the body feels its own image.
    Mirror,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interaction {
    pub a: usize,
    pub b: usize,
    pub coupling: Coupling,
}

/// A planar gravitational system of unit masses.
#[derive(Debug, Clone)]
pub struct PlanarSystem {
    n_bodies: usize,
    layout: Layout,
    interactions: Vec<Interaction>,
    antipodal: bool,
}

impl PlanarSystem {
    /// All `n(n-1)/2` pairs interact.
    pub fn nbody(n_bodies: usize, layout: Layout) -> Self {
        let mut interactions = Vec::new();
        for a in 0..n_bodies {
            for b in a + 1..n_bodies {
                interactions.push(Interaction {
                    a,
                    b,
                    coupling: Coupling::Direct,
                });
            }
        }
        PlanarSystem {
            n_bodies,
            layout,
            interactions,
            antipodal: false,
        }
    }

    /// Three integrated bodies standing for six, with `q_{i+3} = -q_i`.
    pub fn antipodal_six() -> Self {
        let mut interactions = Vec::new();
        for a in 0..3 {
            for b in a + 1..3 {
                interactions.push(Interaction {
                    a,
                    b,
                    coupling: Coupling::Direct,
                });
                interactions.push(Interaction {
                    a,
                    b,
                    coupling: Coupling::Mirror,
                });
            }
            interactions.push(Interaction {
                a,
                b: a,
                coupling: Coupling::Mirror,
            });
        }
        PlanarSystem {
            n_bodies: 3,
            layout: Layout::PerBody,
            interactions,
            antipodal: true,
        }
    }

    /// Bodies that do not interact (straight-line motion).
    pub fn free(n_bodies: usize, layout: Layout) -> Self {
        PlanarSystem {
            n_bodies,
            layout,
            interactions: Vec::new(),
            antipodal: false,
        }
    }

    pub fn n_bodies(&self) -> usize {
        self.n_bodies
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    /// Whether the state stores half of an antipodally symmetric system.
    pub fn is_antipodal(&self) -> bool {
        self.antipodal
    }

    #[inline]
    pub fn pos_index(&self, body: usize, axis: usize) -> usize {
        match self.layout {
            Layout::PositionsFirst => 2 * body + axis,
            Layout::PerBody => 4 * body + axis,
        }
    }

    #[inline]
    pub fn vel_index(&self, body: usize, axis: usize) -> usize {
        match self.layout {
            Layout::PositionsFirst => 2 * self.n_bodies + 2 * body + axis,
            Layout::PerBody => 4 * body + 2 + axis,
        }
    }

    /// `(x, y, vx, vy)` of one body.
    pub fn body<S: Clone>(&self, x: &[S], i: usize) -> [S; 4] {
        [
            x[self.pos_index(i, 0)].clone(),
            x[self.pos_index(i, 1)].clone(),
            x[self.vel_index(i, 0)].clone(),
            x[self.vel_index(i, 1)].clone(),
        ]
    }

    /// The full system in [`Layout::PerBody`] order, unfolding antipodal
    /// images when present.
    pub fn expand_full<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let mut out = Vec::with_capacity(4 * self.n_bodies * if self.antipodal { 2 } else { 1 });
        for i in 0..self.n_bodies {
            out.extend(self.body(x, i));
        }
        if self.antipodal {
            for i in 0..self.n_bodies {
                out.extend(self.body(x, i).iter().map(S::neg));
            }
        }
        out
    }

    // delta vector of an interaction at coefficient layer `c`.
    #[inline]
    fn delta<S: Scalar>(&self, it: &Interaction, c: &[S], axis: usize) -> S {
        let qa = &c[self.pos_index(it.a, axis)];
        let qb = &c[self.pos_index(it.b, axis)];
        match it.coupling {
            Coupling::Direct => qb.sub(qa),
            Coupling::Mirror if it.a == it.b => qa.scale(-2.0),
            Coupling::Mirror => qa.add(qb).neg(),
        }
    }

    #[inline]
    fn apply_force<S: Scalar>(&self, it: &Interaction, acc: &mut [Vec<S>], f: [S; 2]) {
        match it.coupling {
            Coupling::Direct => {
                for ax in 0..2 {
                    acc[it.a][ax].add_assign(&f[ax]);
                    let neg = f[ax].neg();
                    acc[it.b][ax].add_assign(&neg);
                }
            }
            Coupling::Mirror => {
                for ax in 0..2 {
                    acc[it.a][ax].add_assign(&f[ax]);
                    if it.b != it.a {
                        acc[it.b][ax].add_assign(&f[ax]);
                    }
                }
            }
        }
    }

    /// Analytic Jacobian of the field, row-major `dim x dim`.
    ///
    /// For `delta` with `r = |delta|` the force `delta / r^3` has derivative
    /// `K = r^-3 I - 3 r^-5 delta delta^T` with respect to `delta`.
    pub fn jacobian_analytic<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>, DynamicsError> {
        self.check_dim(x.len())?;
        let n = self.dim();
        let zero = x[0].zero_like();
        let mut j = vec![zero; n * n];
        for b in 0..self.n_bodies {
            for ax in 0..2 {
                j[self.pos_index(b, ax) * n + self.vel_index(b, ax)] = x[0].constant_like(1.0);
            }
        }
        for it in &self.interactions {
            let dx = self.delta(it, x, 0);
            let dy = self.delta(it, x, 1);
            let mut d = dx.mul(&dx);
            d.mul_acc(&dy, &dy);
            if !d.definitely_positive() {
                return Err(DynamicsError::CollisionEnclosure(it.a, it.b));
            }
            let inv_d = d
                .recip()
                .ok_or(DynamicsError::CollisionEnclosure(it.a, it.b))?;
            let s = d
                .sqrt()
                .and_then(|r| r.mul(&d).recip())
                .ok_or(DynamicsError::CollisionEnclosure(it.a, it.b))?;
            let t = s.mul(&inv_d).scale(-3.0);
            let del = [dx, dy];
            let mut k = [
                [s.zero_like(), s.zero_like()],
                [s.zero_like(), s.zero_like()],
            ];
            for p in 0..2 {
                for q in 0..2 {
                    let mut e = t.mul(&del[p]).mul(&del[q]);
                    if p == q {
                        e.add_assign(&s);
                    }
                    k[p][q] = e;
                }
            }
            // (target body, source body, sign) triples of dF/dq blocks
            let blocks: Vec<(usize, usize, f64)> = match it.coupling {
                Coupling::Direct => vec![
                    (it.a, it.b, 1.0),
                    (it.a, it.a, -1.0),
                    (it.b, it.b, -1.0),
                    (it.b, it.a, 1.0),
                ],
                Coupling::Mirror if it.a == it.b => vec![(it.a, it.a, -2.0)],
                Coupling::Mirror => vec![
                    (it.a, it.a, -1.0),
                    (it.a, it.b, -1.0),
                    (it.b, it.a, -1.0),
                    (it.b, it.b, -1.0),
                ],
            };
            for (target, source, sign) in blocks {
                for (p, kp) in k.iter().enumerate() {
                    for (q, kpq) in kp.iter().enumerate() {
                        let row = self.vel_index(target, p);
                        let col = self.pos_index(source, q);
                        let v = kpq.scale(sign);
                        j[row * n + col].add_assign(&v);
                    }
                }
            }
        }
        Ok(j)
    }

    /// Derivative of the first-variation equation: `J(x) * v` for a
    /// `dim x cols` matrix `v`.
    pub fn variational_field(
        &self,
        x: &[Interval],
        v: &IntervalMatrix,
    ) -> Result<IntervalMatrix, DynamicsError> {
        let n = self.dim();
        let j = self.jacobian_analytic(x)?;
        let mut jm = IntervalMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                jm[(r, c)] = j[r * n + c];
            }
        }
        Ok(jm.mul(v))
    }
}

impl VectorField for PlanarSystem {
    fn dim(&self) -> usize {
        4 * self.n_bodies
    }

    fn taylor<S: Scalar>(&self, x: &[S], order: usize) -> Result<Vec<Vec<S>>, DynamicsError> {
        self.check_dim(x.len())?;
        let nb = self.n_bodies;
        let zero = x[0].zero_like();
        let ni = self.interactions.len();
        let mut c: Vec<Vec<S>> = Vec::with_capacity(order + 1);
        c.push(x.to_vec());
        // per interaction: delta (x and y), d = |delta|^2 and s = d^(-3/2) series
        let mut dx: Vec<Vec<S>> = vec![Vec::with_capacity(order); ni];
        let mut dy: Vec<Vec<S>> = vec![Vec::with_capacity(order); ni];
        let mut dd: Vec<Vec<S>> = vec![Vec::with_capacity(order); ni];
        let mut ss: Vec<Vec<S>> = vec![Vec::with_capacity(order); ni];
        let mut inv_d0: Vec<S> = Vec::with_capacity(ni);

        for k in 0..order {
            let mut acc: Vec<Vec<S>> = vec![vec![zero.clone(), zero.clone()]; nb];
            for (idx, it) in self.interactions.iter().enumerate() {
                dx[idx].push(self.delta(it, &c[k], 0));
                dy[idx].push(self.delta(it, &c[k], 1));
                let (ex, ey) = (&dx[idx], &dy[idx]);
                let mut d = zero.clone();
                for m in 0..=k {
                    d.mul_acc(&ex[m], &ex[k - m]);
                    d.mul_acc(&ey[m], &ey[k - m]);
                }
                let s = if k == 0 {
                    if !d.definitely_positive() {
                        return Err(DynamicsError::CollisionEnclosure(it.a, it.b));
                    }
                    let collision = || DynamicsError::CollisionEnclosure(it.a, it.b);
                    inv_d0.push(d.recip().ok_or_else(collision)?);
                    d.sqrt()
                        .and_then(|r| r.mul(&d).recip())
                        .ok_or_else(collision)?
                } else {
                    // k d0 s_k = sum_{m=1..k} (-3/2 m - (k - m)) d_m s_{k-m}
                    let mut sum = zero.clone();
                    let sd = &ss[idx];
                    let ddi = &dd[idx];
                    for m in 1..k {
                        let coef = -0.5 * m as f64 - k as f64;
                        sum.mul_acc(&ddi[m].scale(coef), &sd[k - m]);
                    }
                    let coef = -0.5 * k as f64 - k as f64;
                    sum.mul_acc(&d.scale(coef), &sd[0]);
                    sum.mul(&inv_d0[idx]).div_int(k as u32)
                };
                dd[idx].push(d);
                ss[idx].push(s);
                let sd = &ss[idx];
                let mut f = [zero.clone(), zero.clone()];
                for m in 0..=k {
                    f[0].mul_acc(&ex[m], &sd[k - m]);
                    f[1].mul_acc(&ey[m], &sd[k - m]);
                }
                self.apply_force(it, &mut acc, f);
            }
            let kk = (k + 1) as u32;
            let mut next = vec![zero.clone(); x.len()];
            for b in 0..nb {
                for ax in 0..2 {
                    next[self.pos_index(b, ax)] = c[k][self.vel_index(b, ax)].div_int(kk);
                    next[self.vel_index(b, ax)] = acc[b][ax].div_int(kk);
                }
            }
            c.push(next);
        }
        Ok(c)
    }
}
