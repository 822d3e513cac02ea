//! Number types the Taylor recurrences are generic over: plain `f64`,
//! rigorous [`Interval`], and forward-mode first-order jets of either.

use std::fmt::Debug;

use crate::interval::Interval;

pub trait Scalar: Clone + Debug + Send + Sync {
    /// The constant `c` in the same shape as `self` (same jet length).
    fn constant_like(&self, c: f64) -> Self;
    /// A constant known only as an enclosure. Point types take the midpoint.
    fn enclosure_like(&self, c: Interval) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplication by a binary64 constant.
    fn scale(&self, c: f64) -> Self;
    fn div_int(&self, k: u32) -> Self;
    fn add_assign(&mut self, o: &Self);
    /// `self += a * b`
    fn mul_acc(&mut self, a: &Self, b: &Self);
    /// `None` when the value may be zero.
    fn recip(&self) -> Option<Self>;
    /// `None` when the value may be negative.
    fn sqrt(&self) -> Option<Self>;
    fn definitely_positive(&self) -> bool;
    /// A representative point value (the midpoint for enclosures).
    fn mid_value(&self) -> f64;

    fn zero_like(&self) -> Self {
        self.constant_like(0.0)
    }
}

impl Scalar for f64 {
    #[inline]
    fn constant_like(&self, c: f64) -> f64 {
        c
    }
    #[inline]
    fn enclosure_like(&self, c: Interval) -> f64 {
        c.mid()
    }
    #[inline]
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    #[inline]
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    #[inline]
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    #[inline]
    fn neg(&self) -> f64 {
        -self
    }
    #[inline]
    fn scale(&self, c: f64) -> f64 {
        self * c
    }
    #[inline]
    fn div_int(&self, k: u32) -> f64 {
        self / k as f64
    }
    #[inline]
    fn add_assign(&mut self, o: &f64) {
        *self += o;
    }
    #[inline]
    fn mul_acc(&mut self, a: &f64, b: &f64) {
        *self = a.mul_add(*b, *self);
    }
    #[inline]
    fn recip(&self) -> Option<f64> {
        (*self != 0.0 && self.is_finite()).then(|| 1.0 / self)
    }
    #[inline]
    fn sqrt(&self) -> Option<f64> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }
    #[inline]
    fn definitely_positive(&self) -> bool {
        *self > 0.0
    }
    #[inline]
    fn mid_value(&self) -> f64 {
        *self
    }
}

impl Scalar for Interval {
    #[inline]
    fn constant_like(&self, c: f64) -> Interval {
        Interval::point(c)
    }
    #[inline]
    fn enclosure_like(&self, c: Interval) -> Interval {
        c
    }
    #[inline]
    fn add(&self, o: &Interval) -> Interval {
        *self + *o
    }
    #[inline]
    fn sub(&self, o: &Interval) -> Interval {
        *self - *o
    }
    #[inline]
    fn mul(&self, o: &Interval) -> Interval {
        *self * *o
    }
    #[inline]
    fn neg(&self) -> Interval {
        -*self
    }
    #[inline]
    fn scale(&self, c: f64) -> Interval {
        Interval::scale(self, c)
    }
    #[inline]
    fn div_int(&self, k: u32) -> Interval {
        Interval::div_int(self, k)
    }
    #[inline]
    fn add_assign(&mut self, o: &Interval) {
        *self += *o;
    }
    #[inline]
    fn mul_acc(&mut self, a: &Interval, b: &Interval) {
        *self += *a * *b;
    }
    #[inline]
    fn recip(&self) -> Option<Interval> {
        Interval::recip(self).ok().filter(Interval::is_finite)
    }
    #[inline]
    fn sqrt(&self) -> Option<Interval> {
        Interval::sqrt(self).ok()
    }
    #[inline]
    fn definitely_positive(&self) -> bool {
        self.lo() > 0.0
    }
    #[inline]
    fn mid_value(&self) -> f64 {
        self.mid()
    }
}

/// Value plus gradient with respect to a fixed set of seed variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<S> {
    pub v: S,
    pub d: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(v: S, n: usize) -> Self {
        let z = v.zero_like();
        Jet { v, d: vec![z; n] }
    }

    /// The `i`-th of `n` independent variables, with value `v`.
    pub fn variable(v: S, i: usize, n: usize) -> Self {
        let mut j = Self::constant(v, n);
        j.d[i] = j.v.constant_like(1.0);
        j
    }

    /// Seeds `x[i]` as variable `i`.
    pub fn seed(x: &[S]) -> Vec<Self> {
        let n = x.len();
        x.iter()
            .enumerate()
            .map(|(i, v)| Self::variable(v.clone(), i, n))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    fn map_d(&self, f: impl Fn(&S) -> S) -> Vec<S> {
        self.d.iter().map(f).collect()
    }
}

impl<S: Scalar> Scalar for Jet<S> {
    fn constant_like(&self, c: f64) -> Self {
        Jet::constant(self.v.constant_like(c), self.d.len())
    }
    fn enclosure_like(&self, c: Interval) -> Self {
        Jet::constant(self.v.enclosure_like(c), self.d.len())
    }
    fn add(&self, o: &Self) -> Self {
        Jet {
            v: self.v.add(&o.v),
            d: self.d.iter().zip(&o.d).map(|(a, b)| a.add(b)).collect(),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        Jet {
            v: self.v.sub(&o.v),
            d: self.d.iter().zip(&o.d).map(|(a, b)| a.sub(b)).collect(),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        Jet {
            v: self.v.mul(&o.v),
            d: self
                .d
                .iter()
                .zip(&o.d)
                .map(|(a, b)| {
                    let mut t = a.mul(&o.v);
                    t.mul_acc(&self.v, b);
                    t
                })
                .collect(),
        }
    }
    fn neg(&self) -> Self {
        Jet {
            v: self.v.neg(),
            d: self.map_d(S::neg),
        }
    }
    fn scale(&self, c: f64) -> Self {
        Jet {
            v: self.v.scale(c),
            d: self.map_d(|a| a.scale(c)),
        }
    }
    fn div_int(&self, k: u32) -> Self {
        Jet {
            v: self.v.div_int(k),
            d: self.map_d(|a| a.div_int(k)),
        }
    }
    fn add_assign(&mut self, o: &Self) {
        self.v.add_assign(&o.v);
        for (a, b) in self.d.iter_mut().zip(&o.d) {
            a.add_assign(b);
        }
    }
    fn mul_acc(&mut self, a: &Self, b: &Self) {
        self.v.mul_acc(&a.v, &b.v);
        for ((s, da), db) in self.d.iter_mut().zip(&a.d).zip(&b.d) {
            s.mul_acc(da, &b.v);
            s.mul_acc(&a.v, db);
        }
    }
    fn recip(&self) -> Option<Self> {
        let r = self.v.recip()?;
        let minus_r2 = r.mul(&r).neg();
        Some(Jet {
            d: self.map_d(|a| a.mul(&minus_r2)),
            v: r,
        })
    }
    fn sqrt(&self) -> Option<Self> {
        let s = self.v.sqrt()?;
        let half_inv = s.recip()?.scale(0.5);
        Some(Jet {
            d: self.map_d(|a| a.mul(&half_inv)),
            v: s,
        })
    }
    fn definitely_positive(&self) -> bool {
        self.v.definitely_positive()
    }
    fn mid_value(&self) -> f64 {
        self.v.mid_value()
    }
}
