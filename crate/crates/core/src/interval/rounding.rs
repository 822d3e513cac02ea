//! Directed rounding of binary64 operations.
//!
//! Two backends produce outward-rounded endpoints:
//!
//! * [`RoundingBackend::Nudge`] computes every operation in round-to-nearest
//!   and moves the result one representable number outward. Portable and
//!   bit-reproducible, at the price of one ulp per endpoint.
//! * [`RoundingBackend::Directed`] returns the correctly rounded result in the
//!   requested direction, i.e. exactly what a switched hardware rounding mode
//!   would give. The rounding error of the round-to-nearest result is
//!   recovered with error-free transformations (TwoSum, FMA residuals), so no
//!   floating-point environment state is touched.
//!
//! The backend is chosen once per process from `CHOREO_ROUNDING`
//! (`nudge` or `hardware`); the default is `nudge`.

use std::sync::OnceLock;

/// Name of the environment variable selecting the backend.
pub const ROUNDING_ENV: &str = "CHOREO_ROUNDING";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundingBackend {
    Nudge,
    Directed,
}

impl RoundingBackend {
    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "nudge" => Some(RoundingBackend::Nudge),
            "hardware" | "directed" => Some(RoundingBackend::Directed),
            _ => None,
        }
    }

    /// Name as accepted by `CHOREO_ROUNDING`.
    pub fn name(self) -> &'static str {
        match self {
            RoundingBackend::Nudge => "nudge",
            RoundingBackend::Directed => "hardware",
        }
    }
}

static BACKEND: OnceLock<RoundingBackend> = OnceLock::new();

/// Backend used by all interval operations of this process.
#[inline]
pub fn backend() -> RoundingBackend {
    *BACKEND.get_or_init(|| {
        std::env::var(ROUNDING_ENV)
            .ok()
            .and_then(|v| RoundingBackend::from_name(&v))
            .unwrap_or(RoundingBackend::Nudge)
    })
}

// Below this magnitude FMA residuals may be inexact (subnormal range), so the
// directed backend falls back to nudging.
const TINY: f64 = 1.0e-290;

#[inline]
fn down(x: f64) -> f64 {
    if x.is_nan() {
        x
    } else {
        x.next_down()
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x.is_nan() {
        x
    } else {
        x.next_up()
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Rounds `a + b` toward negative infinity.
#[inline]
pub fn add_down(a: f64, b: f64, mode: RoundingBackend) -> f64 {
    match mode {
        RoundingBackend::Nudge => down(a + b),
        RoundingBackend::Directed => {
            let (s, e) = two_sum(a, b);
            if !s.is_finite() {
                return if s == f64::INFINITY { f64::MAX } else { s };
            }
            if e < 0.0 {
                s.next_down()
            } else {
                s
            }
        }
    }
}

/// Rounds `a + b` toward positive infinity.
#[inline]
pub fn add_up(a: f64, b: f64, mode: RoundingBackend) -> f64 {
    match mode {
        RoundingBackend::Nudge => up(a + b),
        RoundingBackend::Directed => {
            let (s, e) = two_sum(a, b);
            if !s.is_finite() {
                return if s == f64::NEG_INFINITY { f64::MIN } else { s };
            }
            if e > 0.0 {
                s.next_up()
            } else {
                s
            }
        }
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64, mode: RoundingBackend) -> f64 {
    add_down(a, -b, mode)
}

#[inline]
pub fn sub_up(a: f64, b: f64, mode: RoundingBackend) -> f64 {
    add_up(a, -b, mode)
}

#[inline]
pub fn mul_down(a: f64, b: f64, mode: RoundingBackend) -> f64 {
    let p = a * b;
    match mode {
        RoundingBackend::Nudge => down(p),
        RoundingBackend::Directed => {
            if !p.is_finite() {
                return if p == f64::INFINITY { f64::MAX } else { p };
            }
            if p.abs() < TINY {
                return if a == 0.0 || b == 0.0 { p } else { down(p) };
            }
            if a.mul_add(b, -p) < 0.0 {
                p.next_down()
            } else {
                p
            }
        }
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64, mode: RoundingBackend) -> f64 {
    let p = a * b;
    match mode {
        RoundingBackend::Nudge => up(p),
        RoundingBackend::Directed => {
            if !p.is_finite() {
                return if p == f64::NEG_INFINITY { f64::MIN } else { p };
            }
            if p.abs() < TINY {
                return if a == 0.0 || b == 0.0 { p } else { up(p) };
            }
            if a.mul_add(b, -p) > 0.0 {
                p.next_up()
            } else {
                p
            }
        }
    }
}

// Sign of the exact a/b - q, for a correctly rounded quotient q.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> f64 {
    let r = (-q).mul_add(b, a);
    if r == 0.0 {
        0.0
    } else if (r > 0.0) == (b > 0.0) {
        1.0
    } else {
        -1.0
    }
}

#[inline]
pub fn div_down(a: f64, b: f64, mode: RoundingBackend) -> f64 {
    let q = a / b;
    match mode {
        RoundingBackend::Nudge => down(q),
        RoundingBackend::Directed => {
            if !q.is_finite() {
                return if q == f64::INFINITY { f64::MAX } else { q };
            }
            if q.abs() < TINY || a.abs() < TINY {
                return if a == 0.0 { q } else { down(q) };
            }
            if div_residual_sign(a, b, q) < 0.0 {
                q.next_down()
            } else {
                q
            }
        }
    }
}

#[inline]
pub fn div_up(a: f64, b: f64, mode: RoundingBackend) -> f64 {
    let q = a / b;
    match mode {
        RoundingBackend::Nudge => up(q),
        RoundingBackend::Directed => {
            if !q.is_finite() {
                return if q == f64::NEG_INFINITY { f64::MIN } else { q };
            }
            if q.abs() < TINY || a.abs() < TINY {
                return if a == 0.0 { q } else { up(q) };
            }
            if div_residual_sign(a, b, q) > 0.0 {
                q.next_up()
            } else {
                q
            }
        }
    }
}

#[inline]
pub fn sqrt_down(a: f64, mode: RoundingBackend) -> f64 {
    let s = a.sqrt();
    match mode {
        RoundingBackend::Nudge => {
            if s == 0.0 {
                0.0
            } else {
                down(s)
            }
        }
        RoundingBackend::Directed => {
            if a < TINY {
                return if a == 0.0 { 0.0 } else { down(s).max(0.0) };
            }
            if (-s).mul_add(s, a) < 0.0 {
                s.next_down()
            } else {
                s
            }
        }
    }
}

#[inline]
pub fn sqrt_up(a: f64, mode: RoundingBackend) -> f64 {
    let s = a.sqrt();
    match mode {
        RoundingBackend::Nudge => {
            if a == 0.0 {
                0.0
            } else {
                up(s)
            }
        }
        RoundingBackend::Directed => {
            if a < TINY {
                return if a == 0.0 { 0.0 } else { up(s) };
            }
            if (-s).mul_add(s, a) > 0.0 {
                s.next_up()
            } else {
                s
            }
        }
    }
}
