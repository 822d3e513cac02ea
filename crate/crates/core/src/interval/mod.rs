//! Outward-rounded interval arithmetic over binary64 endpoints.
//!
//! Every operation returns an interval containing the exact real result for
//! all arguments drawn from its operands. Endpoints are rounded outward by the
//! process-wide [`rounding::backend`].

pub mod hexfloat;
mod matrix;
pub mod rounding;
mod vector;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use matrix::{solve_linear, IntervalMatrix};
pub use rounding::{backend, RoundingBackend};
pub use vector::IntervalVector;

use rounding as r;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("invalid interval endpoints [{lo}, {hi}]")]
    InvalidEndpoints { lo: f64, hi: f64 },
    #[error("division by an interval containing zero")]
    DivisionByZeroInterval,
    #[error("square root of an interval with negative part")]
    NegativeSqrt,
    #[error("intersection is empty")]
    EmptyIntersection,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("enclosure of the linear system is singular (pivot contains zero)")]
    SingularEnclosure,
    #[error("cannot parse interval literal {0:?}")]
    Parse(String),
}

/// A closed interval `[lo, hi]` of reals with finite binary64 endpoints.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(String, String)", into = "(String, String)")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError::InvalidEndpoints { lo, hi })
        }
    }

    /// Thin interval `[x, x]`. `x` must be finite.
    #[inline]
    pub fn point(x: f64) -> Self {
        debug_assert!(x.is_finite());
        Interval { lo: x, hi: x }
    }

    // Unchecked constructor for results of outward-rounded arithmetic. May
    // carry infinite endpoints after overflow; `is_finite` reports that.
    #[inline]
    pub(crate) fn raw(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// `[center - radius, center + radius]` rounded outward.
    pub fn around(center: f64, radius: f64) -> Self {
        let m = backend();
        Interval {
            lo: r::sub_down(center, radius, m),
            hi: r::add_up(center, radius, m),
        }
    }

    /// Encloses the real number written as a decimal literal.
    ///
    /// Integers below 2^53 are exact; anything else is widened to the
    /// neighbours of the nearest binary64 value, e.g. `"0.1"` becomes
    /// `[nextdown(0.1), nextup(0.1)]`.
    pub fn from_decimal(text: &str) -> Result<Self, IntervalError> {
        let t = text.trim();
        let x: f64 = t
            .parse()
            .map_err(|_| IntervalError::Parse(text.to_string()))?;
        if !x.is_finite() {
            return Err(IntervalError::Parse(text.to_string()));
        }
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        let is_integer = !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit());
        if is_integer && x.abs() <= 9_007_199_254_740_992.0 {
            return Ok(Interval::point(x));
        }
        Ok(Interval {
            lo: x.next_down(),
            hi: x.next_up(),
        })
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_thin(&self) -> bool {
        self.lo == self.hi
    }

    /// Midpoint rounded to nearest; always lies inside the interval.
    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Diameter `hi - lo`, rounded up.
    pub fn diam(&self) -> f64 {
        r::sub_up(self.hi, self.lo, backend())
    }

    /// Upper bound of the radius about [`Interval::mid`].
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        let mode = backend();
        r::sub_up(m, self.lo, mode).max(r::sub_up(self.hi, m, mode))
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    pub fn subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Inclusion in the topological interior of `other`.
    pub fn subset_interior(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn disjoint(&self, other: &Interval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        !self.disjoint(other)
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Result<Interval, IntervalError> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError::EmptyIntersection)
        }
    }

    pub fn sqr(&self) -> Interval {
        let m = backend();
        if self.lo >= 0.0 {
            Interval::raw(
                r::mul_down(self.lo, self.lo, m),
                r::mul_up(self.hi, self.hi, m),
            )
        } else if self.hi <= 0.0 {
            Interval::raw(
                r::mul_down(self.hi, self.hi, m),
                r::mul_up(self.lo, self.lo, m),
            )
        } else {
            let a = self.mag();
            Interval::raw(0.0, r::mul_up(a, a, m))
        }
    }

    pub fn sqrt(&self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::NegativeSqrt);
        }
        let m = backend();
        Ok(Interval::raw(
            r::sqrt_down(self.lo, m),
            r::sqrt_up(self.hi, m),
        ))
    }

    pub fn checked_div(&self, rhs: &Interval) -> Result<Interval, IntervalError> {
        if rhs.contains_zero() {
            return Err(IntervalError::DivisionByZeroInterval);
        }
        let m = backend();
        let cands = [
            (self.lo, rhs.lo),
            (self.lo, rhs.hi),
            (self.hi, rhs.lo),
            (self.hi, rhs.hi),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in cands {
            lo = lo.min(r::div_down(a, b, m));
            hi = hi.max(r::div_up(a, b, m));
        }
        Ok(Interval::raw(lo, hi))
    }

    pub fn recip(&self) -> Result<Interval, IntervalError> {
        Interval::ONE.checked_div(self)
    }

    /// Division by a nonzero integer (exact divisor).
    pub fn div_int(&self, k: u32) -> Interval {
        debug_assert!(k > 0);
        let m = backend();
        let d = k as f64;
        Interval::raw(r::div_down(self.lo, d, m), r::div_up(self.hi, d, m))
    }

    /// Multiplication by an exactly representable scalar.
    pub fn scale(&self, c: f64) -> Interval {
        let m = backend();
        if c >= 0.0 {
            Interval::raw(r::mul_down(self.lo, c, m), r::mul_up(self.hi, c, m))
        } else {
            Interval::raw(r::mul_down(self.hi, c, m), r::mul_up(self.lo, c, m))
        }
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: u32) -> Interval {
        match n {
            0 => Interval::ONE,
            1 => *self,
            2 => self.sqr(),
            _ => {
                let half = self.powi(n / 2).sqr();
                if n.is_multiple_of(2) {
                    half
                } else {
                    half * *self
                }
            }
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval::raw(0.0, self.mag())
        }
    }

    /// Enlarges the interval by `factor` about its midpoint plus `abs` on each side.
    pub fn inflate(&self, factor: f64, abs: f64) -> Interval {
        let c = self.mid();
        let rad = self.rad() * factor + abs;
        Interval::around(c, rad).hull(self)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[{:.*}, {:.*}]", p, self.lo, p, self.hi),
            None => write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi),
        }
    }
}

impl TryFrom<(String, String)> for Interval {
    type Error = IntervalError;

    fn try_from((lo, hi): (String, String)) -> Result<Self, Self::Error> {
        let lo = hexfloat::parse(&lo).map_err(|_| IntervalError::Parse(lo.clone()))?;
        let hi = hexfloat::parse(&hi).map_err(|_| IntervalError::Parse(hi.clone()))?;
        Interval::new(lo, hi)
    }
}

impl From<Interval> for (String, String) {
    fn from(x: Interval) -> Self {
        (hexfloat::format(x.lo), hexfloat::format(x.hi))
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        let m = backend();
        Interval::raw(
            r::add_down(self.lo, rhs.lo, m),
            r::add_up(self.hi, rhs.hi, m),
        )
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        let m = backend();
        Interval::raw(
            r::sub_down(self.lo, rhs.hi, m),
            r::sub_up(self.hi, rhs.lo, m),
        )
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let m = backend();
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        if a >= 0.0 && c >= 0.0 {
            return Interval::raw(r::mul_down(a, c, m), r::mul_up(b, d, m));
        }
        if b <= 0.0 && d <= 0.0 {
            return Interval::raw(r::mul_down(b, d, m), r::mul_up(a, c, m));
        }
        if a >= 0.0 && d <= 0.0 {
            return Interval::raw(r::mul_down(b, c, m), r::mul_up(a, d, m));
        }
        if b <= 0.0 && c >= 0.0 {
            return Interval::raw(r::mul_down(a, d, m), r::mul_up(b, c, m));
        }
        let lo = r::mul_down(a, d, m)
            .min(r::mul_down(b, c, m))
            .min(r::mul_down(a, c, m))
            .min(r::mul_down(b, d, m));
        let hi = r::mul_up(a, c, m)
            .max(r::mul_up(b, d, m))
            .max(r::mul_up(a, d, m))
            .max(r::mul_up(b, c, m));
        Interval::raw(lo, hi)
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval::raw(-self.hi, -self.lo)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self.scale(rhs)
    }
}

impl AddAssign for Interval {
    #[inline]
    fn add_assign(&mut self, rhs: Interval) {
        *self = *self + rhs;
    }
}

impl SubAssign for Interval {
    #[inline]
    fn sub_assign(&mut self, rhs: Interval) {
        *self = *self - rhs;
    }
}

/// Applies one of the four basic operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn interval_arith(a: Interval, b: Interval, op: ArithOp) -> Result<Interval, IntervalError> {
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.checked_div(&b),
    }
}
