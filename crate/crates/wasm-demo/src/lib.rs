//! Browser bindings: integrate a candidate orbit, certify it with a chosen
//! box radius and unfold the certified segment into the closed curve.

use choreo_core::certificate::{prove, ProofCertificate, ProofParameters, ProofRequest};
use choreo_core::choreo::{unfold, ChoreographyProblem, Frame};
use choreo_core::integrator::nonrigorous;
use choreo_core::rootfind::{Verdict, DEFAULT_MAX_ITER};
use wasm_bindgen::prelude::*;

fn problem(system: &str) -> Result<ChoreographyProblem, JsError> {
    ChoreographyProblem::by_name(system, None, None).map_err(|e| JsError::new(&e.to_string()))
}

fn js<E: std::fmt::Display>(e: E) -> JsError {
    JsError::new(&e.to_string())
}

/// Published candidate zero for `system`.
#[wasm_bindgen]
pub fn candidate(system: &str) -> Result<Vec<f64>, JsError> {
    let p = problem(system)?;
    p.reference()
        .map(|r| r.x_bar)
        .ok_or_else(|| JsError::new("no published candidate"))
}

/// Sampled positions of every body, `[x0, y0, x1, y1, ...]` per sample.
#[wasm_bindgen(getter_with_clone)]
pub struct Orbit {
    pub bodies: usize,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    /// Largest gluing residual (zero for a certified orbit, absent for a
    /// plain trajectory).
    pub residual: Option<f64>,
}

/// Floating-point trajectory of `E(params)` over `[0, total]`.
#[wasm_bindgen]
pub fn integrate(system: &str, params: &[f64], total: f64, h: f64) -> Result<Orbit, JsError> {
    let p = problem(system)?;
    let state = p.embed(params).map_err(js)?;
    let sys = p.system();
    let traj =
        nonrigorous::trajectory(sys, &state, total, h, nonrigorous::DEFAULT_ORDER).map_err(js)?;
    let n = sys.n_bodies();
    let mut times = Vec::with_capacity(traj.len());
    let mut positions = Vec::with_capacity(traj.len() * 2 * n);
    for (t, x) in &traj {
        times.push(*t);
        for b in 0..n {
            positions.push(x[sys.pos_index(b, 0)]);
            positions.push(x[sys.pos_index(b, 1)]);
        }
    }
    Ok(Orbit {
        bodies: n,
        times,
        positions,
        residual: None,
    })
}

/// Outcome of one certification run.
#[wasm_bindgen]
pub struct Proof {
    problem: ChoreographyProblem,
    cert: ProofCertificate,
}

#[wasm_bindgen]
impl Proof {
    #[wasm_bindgen(getter)]
    pub fn verdict(&self) -> String {
        format!("{:?}", self.cert.verdict)
    }

    #[wasm_bindgen(getter)]
    pub fn cause(&self) -> Option<String> {
        self.cert.cause.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.cert.iterations
    }

    /// Box `[X]` as `[lo0, hi0, lo1, hi1, ...]`.
    #[wasm_bindgen(getter, js_name = box)]
    pub fn x(&self) -> Vec<f64> {
        self.cert.x.iter().flat_map(|c| [c.lo(), c.hi()]).collect()
    }

    /// Operator image of the last iteration, same layout as `box`.
    #[wasm_bindgen(getter)]
    pub fn image(&self) -> Vec<f64> {
        self.cert
            .image
            .as_ref()
            .map(|v| v.iter().flat_map(|c| [c.lo(), c.hi()]).collect())
            .unwrap_or_default()
    }

    /// The certificate in its text form.
    pub fn toml(&self) -> Result<String, JsError> {
        self.cert.to_toml().map_err(js)
    }

    /// Unfolds the certified segment into the whole periodic orbit.
    pub fn curve(&self, per_segment: usize) -> Result<Orbit, JsError> {
        if self.cert.verdict != Verdict::UniqueZero {
            return Err(JsError::new("only a certified box can be unfolded"));
        }
        let x = self
            .cert
            .image
            .clone()
            .unwrap_or_else(|| self.cert.x.clone());
        let p = &self.cert.parameters;
        let curve = unfold(
            &self.problem,
            &x,
            p.h_point,
            p.order,
            per_segment,
            Frame::Original,
        )
        .map_err(js)?;
        Ok(Orbit {
            bodies: curve.bodies,
            times: curve.samples.iter().map(|s| s.t).collect(),
            positions: curve
                .samples
                .iter()
                .flat_map(|s| s.positions.iter().flatten().copied())
                .collect(),
            residual: Some(
                curve
                    .junctions
                    .iter()
                    .map(|j| j.magnitude())
                    .fold(0.0, f64::max),
            ),
        })
    }
}

/// Certifies the zero of `Phi` in the box `params ± delta` with the
/// published method and step sizes.
#[wasm_bindgen]
pub fn certify(system: &str, params: &[f64], delta: f64) -> Result<Proof, JsError> {
    let problem = problem(system)?;
    if params.len() != problem.reduced_dim() {
        return Err(JsError::new(&format!(
            "expected {} parameters",
            problem.reduced_dim()
        )));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(JsError::new("delta must be positive"));
    }
    let r = problem
        .reference()
        .ok_or_else(|| JsError::new("no published run parameters"))?;
    let parameters = ProofParameters {
        h_point: r.h_point,
        h_set: r.h_set,
        order: r.order,
        delta,
        max_iter: DEFAULT_MAX_ITER,
    };
    let req = ProofRequest::new(problem.clone(), r.method, params.to_vec(), parameters);
    let cert = prove(&req).map_err(js)?;
    Ok(Proof { problem, cert })
}
