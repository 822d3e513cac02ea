//! Exact containment checks and random interval generators shared by the
//! property suites.

use choreo_core::interval::Interval;
use num::BigRational;
use rand::Rng;

/// Whether `iv` contains the real number `approx + e`, where `e` is known
/// only by its sign.
pub fn holds(iv: Interval, approx: f64, err_sign: f64) -> bool {
    let above_lo = approx > iv.lo() || (approx == iv.lo() && err_sign >= 0.0);
    let below_hi = approx < iv.hi() || (approx == iv.hi() && err_sign <= 0.0);
    above_lo && below_hi
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

pub fn exact_sum(iv: Interval, a: f64, b: f64) -> bool {
    let (s, e) = two_sum(a, b);
    holds(iv, s, e)
}

pub fn exact_product(iv: Interval, a: f64, b: f64) -> bool {
    let p = a * b;
    holds(iv, p, a.mul_add(b, -p))
}

pub fn exact_quotient(iv: Interval, a: f64, b: f64) -> bool {
    let q = a / b;
    let r = (-q).mul_add(b, a);
    holds(iv, q, r * b.signum())
}

pub fn exact_sqrt(iv: Interval, a: f64) -> bool {
    let s = a.sqrt();
    holds(iv, s, (-s).mul_add(s, a))
}

/// Whether the exact `X (Y + Z)` lies in `enclosure`, the computed
/// `X Y + X Z`. Two outward-rounded evaluations are not comparable in
/// general, so the left side is evaluated in rational arithmetic.
pub fn exact_subdistributive(x: Interval, y: Interval, z: Interval, enclosure: Interval) -> bool {
    let q = |v: f64| BigRational::from_float(v).expect("finite endpoint");
    let sum = [q(y.lo()) + q(z.lo()), q(y.hi()) + q(z.hi())];
    let products: Vec<BigRational> = [q(x.lo()), q(x.hi())]
        .iter()
        .flat_map(|a| sum.iter().map(move |b| a * b))
        .collect();
    let lo = products.iter().min().unwrap();
    let hi = products.iter().max().unwrap();
    q(enclosure.lo()) <= *lo && *hi <= q(enclosure.hi())
}

/// Endpoint with magnitude in `[1e-3, 1e3]`, an integer, or zero: keeps
/// FMA residuals exact.
pub fn endpoint<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..10) {
        0 => 0.0,
        1 => rng.random_range(-20i32..=20) as f64,
        _ => {
            let mag = 10f64.powf(rng.random_range(-3.0..3.0));
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        }
    }
}

pub fn interval<R: Rng>(rng: &mut R) -> Interval {
    let a = endpoint(rng);
    match rng.random_range(0..4) {
        0 => Interval::point(a),
        1 => {
            let w = a.abs().max(1e-3) * 10f64.powf(rng.random_range(-15.0..-1.0));
            Interval::new(a, a + w).unwrap()
        }
        _ => {
            let b = endpoint(rng);
            Interval::new(a.min(b), a.max(b)).unwrap()
        }
    }
}

pub fn point_in<R: Rng>(rng: &mut R, iv: Interval) -> f64 {
    match rng.random_range(0..4) {
        0 => iv.lo(),
        1 => iv.hi(),
        _ => {
            let t: f64 = rng.random();
            (iv.lo() + t * (iv.hi() - iv.lo())).clamp(iv.lo(), iv.hi())
        }
    }
}

pub fn sub_interval<R: Rng>(rng: &mut R, iv: Interval) -> Interval {
    let a = point_in(rng, iv);
    let b = point_in(rng, iv);
    Interval::new(a.min(b), a.max(b)).unwrap()
}

/// Outcome of the randomized interval algebra suite.
#[derive(Debug, Default)]
pub struct AlgebraReport {
    pub cases: usize,
    pub soundness: Vec<String>,
    pub monotonicity: Vec<String>,
    pub subdistributivity: Vec<String>,
}

impl AlgebraReport {
    pub fn violations(&self) -> usize {
        self.soundness.len() + self.monotonicity.len() + self.subdistributivity.len()
    }
}

// Keeps the first 20 messages; later violations are only counted.
fn note(list: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok && list.len() < 20 {
        list.push(what());
    } else if !ok {
        list.push(String::new());
    }
}

/// One case: random `X, Y, Z`, points in them and sub-intervals of them.
pub fn algebra_case<R: Rng>(rng: &mut R, report: &mut AlgebraReport) {
    let (x, y, z) = (interval(rng), interval(rng), interval(rng));
    let (a, b) = (point_in(rng, x), point_in(rng, y));
    report.cases += 1;

    let s = &mut report.soundness;
    note(s, exact_sum(x + y, a, b), || {
        format!("{a} + {b} not in {x} + {y}")
    });
    note(s, exact_sum(x - y, a, -b), || {
        format!("{a} - {b} not in {x} - {y}")
    });
    note(s, exact_product(x * y, a, b), || {
        format!("{a} * {b} not in {x} * {y}")
    });
    note(s, exact_product(x.sqr(), a, a), || {
        format!("{a}^2 not in sqr {x}")
    });
    note(s, (-x).contains(-a), || format!("-{a} not in -{x}"));
    note(s, x.abs().contains(a.abs()), || {
        format!("|{a}| not in abs {x}")
    });
    if let Ok(q) = x.checked_div(&y) {
        note(s, exact_quotient(q, a, b), || {
            format!("{a} / {b} not in {x} / {y}")
        });
    } else {
        note(s, y.contains_zero(), || format!("division by {y} refused"));
    }
    if let Ok(r) = x.sqrt() {
        note(s, exact_sqrt(r, a), || format!("sqrt {a} not in sqrt {x}"));
    } else {
        note(s, x.lo() < 0.0, || format!("sqrt of {x} refused"));
    }

    let (xs, ys) = (sub_interval(rng, x), sub_interval(rng, y));
    let m = &mut report.monotonicity;
    note(m, (xs + ys).subset(&(x + y)), || {
        format!("+ not monotone on {xs} in {x}, {ys} in {y}")
    });
    note(m, (xs - ys).subset(&(x - y)), || {
        format!("- not monotone on {xs} in {x}, {ys} in {y}")
    });
    note(m, (xs * ys).subset(&(x * y)), || {
        format!("* not monotone on {xs} in {x}, {ys} in {y}")
    });
    note(m, xs.sqr().subset(&x.sqr()), || {
        format!("sqr not monotone on {xs} in {x}")
    });
    note(m, xs.powi(3).subset(&x.powi(3)), || {
        format!("cube not monotone on {xs} in {x}")
    });
    if let (Ok(q), Ok(qs)) = (x.checked_div(&y), xs.checked_div(&ys)) {
        note(m, qs.subset(&q), || {
            format!("/ not monotone on {xs} in {x}, {ys} in {y}")
        });
    }
    if let (Ok(r), Ok(rs)) = (x.sqrt(), xs.sqrt()) {
        note(m, rs.subset(&r), || {
            format!("sqrt not monotone on {xs} in {x}")
        });
    }

    let d = &mut report.subdistributivity;
    note(d, exact_subdistributive(x, y, z, x * y + x * z), || {
        format!("X(Y+Z) not in XY+XZ for {x}, {y}, {z}")
    });
}
