// Published enclosures are kept digit for digit.
#![allow(clippy::excessive_precision)]

use choreo_core::choreo::{
    refine_candidate, unfold, ChoreoError, ChoreographyProblem, Frame, PhiMap, CHAIN6_A, GERVER_A,
};
use choreo_core::interval::{Interval, IntervalMatrix, IntervalVector};
use choreo_core::rootfind::{certify, CertificationJob, Method, Verdict};

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn ivec(b: &[(f64, f64)]) -> IntervalVector {
    IntervalVector::new(b.iter().map(|&(l, h)| iv(l, h)).collect())
}

fn imat(rows: &[&[(f64, f64)]]) -> IntervalMatrix {
    IntervalMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&(l, h)| iv(l, h)).collect())
            .collect(),
    )
    .unwrap()
}

fn assert_overlaps(got: &IntervalVector, want: &IntervalVector, what: &str) {
    for (i, (g, w)) in got.iter().zip(want.iter()).enumerate() {
        assert!(g.overlaps(w), "{what}[{i}]: {g:?} vs {w:?}");
    }
}

fn assert_matrix_overlaps(got: &IntervalMatrix, want: &IntervalMatrix, what: &str) {
    for i in 0..want.rows() {
        for j in 0..want.cols() {
            assert!(
                got[(i, j)].overlaps(&want[(i, j)]),
                "{what}[{i},{j}]: {:?} vs {:?}",
                got[(i, j)],
                want[(i, j)]
            );
        }
    }
}

#[test]
fn eight_newton_replay() {
    let p = ChoreographyProblem::eight();
    let r = p.reference().unwrap();
    let map = PhiMap::new(&p, r.h_point, r.h_set, r.order);
    let out = certify(
        &map,
        &CertificationJob::around(&r.x_bar, r.delta, Method::Newton),
    )
    .unwrap();
    assert_eq!(out.verdict, Verdict::UniqueZero);
    assert!(out.iterations <= 2);
    let rec = &out.trace[0];
    let phi = ivec(&[(-2.107029e-06, -2.106467e-06), (2.974991e-06, 2.976034e-06)]);
    assert_overlaps(&rec.value, &phi, "Phi");
    assert!(rec.value.max_diam() <= 1e-8);
    let dphi = imat(&[
        &[(17.622624, 17.643043), (1.809772, 1.827325)],
        &[(-24.868548, -24.848432), (-10.056629, -10.039221)],
    ]);
    assert_matrix_overlaps(&rec.jacobian, &dphi, "DPhi");
    let n = ivec(&[
        (0.347116886243943, 0.347116889993313),
        (0.532724941587373, 0.532724949187495),
    ]);
    assert_overlaps(&rec.image, &n, "N");
    assert!(rec.image.subset(&rec.x));
    assert_eq!(map.last_set().unwrap().x1_nonzero, Some(true));
}

#[test]
fn gerver_krawczyk_replay() {
    let p = ChoreographyProblem::gerver(GERVER_A);
    let r = p.reference().unwrap();
    let c = p.preconditioner(&r.x_bar, r.h_point, 20).unwrap();
    let table_c = [
        [-2.15400, 0.257911, 0.786925],
        [-0.08163, 0.293713, 0.043565],
        [0.939059, -0.10027, 0.158399],
    ];
    for (i, row) in table_c.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert!((c[(i, j)] - v).abs() < 1e-5, "C[{i},{j}] = {}", c[(i, j)]);
        }
    }
    let map = PhiMap::new(&p, r.h_point, r.h_set, r.order);
    let job = CertificationJob::around(&r.x_bar, r.delta, Method::Krawczyk).with_preconditioner(c);
    let out = certify(&map, &job).unwrap();
    assert_eq!(out.verdict, Verdict::UniqueZero);
    let rec = &out.trace[0];
    let phi = ivec(&[
        (-2.87020e-09, -2.26613e-09),
        (-1.21155e-08, -1.06812e-08),
        (-5.45542e-08, -5.10016e-08),
    ]);
    assert_overlaps(&rec.value, &phi, "Phi");
    let dphi = imat(&[
        &[(-0.1664, -0.1657), (0.39070, 0.39119), (0.71771, 0.71790)],
        &[(-0.1764, -0.1750), (3.52548, 3.52654), (-0.0968, -0.0964)],
        &[(0.87189, 0.87534), (-0.0867, -0.0842), (1.99599, 1.99697)],
    ]);
    assert_matrix_overlaps(&rec.jacobian, &dphi, "DPhi");
    let k = ivec(&[
        (1.382857036247056692, 1.382857041633411832),
        (1.871935113301492981, 1.871935114053588922),
        (0.5848725887384301769, 0.5848725902808686872),
    ]);
    assert_overlaps(&rec.image, &k, "K");
    assert!(rec.image.subset_interior(&rec.x));
    assert!(rec.image.max_diam() <= 1e-7);
}

#[test]
fn chain6_krawczyk_replay() {
    let p = ChoreographyProblem::chain6(CHAIN6_A);
    let r = p.reference().unwrap();
    let c = p.preconditioner(&r.x_bar, r.h_point, 20).unwrap();
    let map = PhiMap::new(&p, r.h_point, r.h_set, r.order);
    let job = CertificationJob::around(&r.x_bar, r.delta, Method::Krawczyk).with_preconditioner(c);
    let out = certify(&map, &job).unwrap();
    assert_eq!(out.verdict, Verdict::UniqueZero);
    let rec = &out.trace[0];
    let phi = ivec(&[
        (-3.1311957909658e-11, 3.156277062700585e-11),
        (-4.528821762050939e-12, 4.574757239694804e-12),
        (-1.063704679893362e-11, 1.051470022161993e-11),
        (-3.084105193451592e-11, 3.117495150917193e-11),
        (-1.203726007759087e-11, 1.193112275643671e-11),
    ]);
    assert_overlaps(&rec.value, &phi, "Phi");
    assert!(rec.value.max_diam() <= 1e-10);
    let k = ivec(&[
        (-0.6352775243616679557, -0.6352775242763283314),
        (0.1403428386430521646, 0.1403428386590999943),
        (0.797833001999263769, 0.797833002012834469),
        (0.10063773728817425324, 0.1006377373457752189),
        (-2.031522278710178764, -2.031522278575771612),
    ]);
    assert_overlaps(&rec.image, &k, "K");
    assert!(rec.image.subset_interior(&rec.x));
}

#[test]
fn refiner_finds_the_eight() {
    let p = ChoreographyProblem::eight();
    let x = refine_candidate(&p, &[0.35, 0.53], 20, 0.01, 20).unwrap();
    // The zero itself lies about 1.2e-7 from the published candidate, inside
    // the Newton image box.
    assert!(
        iv(0.347116886243943, 0.347116889993313).contains(x[0]),
        "{x:?}"
    );
    assert!(
        iv(0.532724941587373, 0.532724949187495).contains(x[1]),
        "{x:?}"
    );
    let phi = p.phi_point(&x, 0.01, 20).unwrap();
    assert!(phi.value.iter().all(|v| v.abs() < 1e-9));
}

#[test]
fn refiner_fixes_gerver_candidate() {
    let p = ChoreographyProblem::gerver(GERVER_A);
    let r = p.reference().unwrap();
    let phi = p.phi_point(&r.x_bar, r.h_point, 20).unwrap();
    assert!(phi.value.iter().all(|v| v.abs() < 1e-7));
    let x = refine_candidate(&p, &r.x_bar, 10, r.h_point, 20).unwrap();
    for (a, b) in x.iter().zip(&r.x_bar) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn refiner_rejects_garbage() {
    let p = ChoreographyProblem::eight();
    assert!(refine_candidate(&p, &[10.0, 10.0], 10, 0.01, 20).is_err());
}

#[test]
fn eight_unfolds_to_closed_symmetric_curve() {
    let p = ChoreographyProblem::eight();
    let r = p.reference().unwrap();
    let x = IntervalVector::around(&r.x_bar, r.delta);
    let curve = unfold(&p, &x, r.h_point, r.order, 40, Frame::Original).unwrap();
    assert_eq!(curve.junctions.len(), 3);
    assert!(curve.junctions.iter().all(|j| j.contains_zero()));
    assert!(
        (curve.period.mid() - 6.3259).abs() < 1e-3,
        "{:?}",
        curve.period
    );
    let first = &curve.samples[0];
    let last = curve.samples.last().unwrap();
    assert!((last.t - curve.period.mid()).abs() < 1e-9);
    for (a, b) in first.positions.iter().zip(&last.positions) {
        assert!((a[0] - b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6);
    }
    // Choreography: the bodies follow each other with T/3 lags, and the curve is
    // symmetric about both axes in the original frame.
    let n = curve.samples.len() - 1;
    assert_eq!(n % 3, 0);
    let lag = |body: usize, shift: usize| {
        (0..n).all(|k| {
            let a = curve.samples[k].positions[body];
            let b = curve.samples[(k + shift) % n].positions[0];
            (a[0] - b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6
        })
    };
    assert!(lag(1, n / 3) && lag(2, 2 * n / 3) || lag(1, 2 * n / 3) && lag(2, n / 3));
    let xs: Vec<f64> = curve.samples.iter().map(|s| s.positions[0][0]).collect();
    let ys: Vec<f64> = curve.samples.iter().map(|s| s.positions[0][1]).collect();
    let max = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max);
    let min = |v: &[f64]| v.iter().cloned().fold(f64::MAX, f64::min);
    assert!((max(&xs) + min(&xs)).abs() < 1e-6);
    assert!((max(&ys) + min(&ys)).abs() < 1e-6);
    assert!(max(&xs) > 1.0 && max(&ys) < 0.5);
}

#[test]
fn chain6_unfolds_with_antipodal_bodies() {
    let p = ChoreographyProblem::chain6(CHAIN6_A);
    let r = p.reference().unwrap();
    let x = IntervalVector::around(&r.x_bar, r.delta);
    let curve = unfold(&p, &x, r.h_point, r.order, 10, Frame::Original).unwrap();
    assert_eq!(curve.bodies, 6);
    assert!(curve.junctions.iter().all(|j| j.contains_zero()));
    for s in &curve.samples {
        for i in 0..3 {
            let (a, b) = (s.positions[i], s.positions[i + 3]);
            assert!((a[0] + b[0]).abs() < 1e-9 && (a[1] + b[1]).abs() < 1e-9);
        }
    }
    let table = curve.to_table();
    assert!(table.starts_with("# t x0 y0"));
    assert_eq!(table.lines().count(), curve.samples.len() + 1);
}

#[test]
fn unfold_rejects_non_orbit() {
    let p = ChoreographyProblem::eight();
    let x = IntervalVector::around(&[0.36, 0.52], 1e-6);
    match unfold(&p, &x, 0.01, 7, 10, Frame::Computation) {
        Err(ChoreoError::GluingMismatch { .. }) => {}
        other => panic!("expected gluing mismatch, got {other:?}"),
    }
}
