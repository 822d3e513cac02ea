//! Proof certificates: everything needed to re-check a certification verdict
//! from the stored intervals alone.
//!
//! Certificates are TOML documents. Every real number that takes part in a
//! check is stored as a hexadecimal float so the text round-trips bit for
//! bit; a decimal rendering follows as comments.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::choreo::{ChoreoError, ChoreographyProblem, PhiMap};
use crate::interval::{hexfloat, rounding, Interval, IntervalMatrix, IntervalVector};
use crate::rootfind::{
    certify, krawczyk_operator, newton_operator, CertificationJob, CertificationOutcome,
    IterationRecord, Method, RootfindError, Verdict, DEFAULT_MAX_ITER,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Choreo(#[from] ChoreoError),
    #[error(transparent)]
    Rootfind(#[from] RootfindError),
    #[error("certificate syntax: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("certificate serialization: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("inconsistent certificate: {0}")]
    Inconsistent(String),
}

/// A binary64 value serialized as a hexadecimal float string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Hex(pub f64);

impl TryFrom<String> for Hex {
    type Error = hexfloat::HexFloatError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        hexfloat::parse(&s).map(Hex)
    }
}

impl From<Hex> for String {
    fn from(h: Hex) -> String {
        hexfloat::format(h.0)
    }
}

fn hex_vec(v: &[f64]) -> Vec<Hex> {
    v.iter().copied().map(Hex).collect()
}

fn unhex(v: &[Hex]) -> Vec<f64> {
    v.iter().map(|h| h.0).collect()
}

fn hex_matrix(m: &DMatrix<f64>) -> Vec<Vec<Hex>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Hex(m[(i, j)])).collect())
        .collect()
}

fn unhex_matrix(rows: &[Vec<Hex>]) -> Result<DMatrix<f64>, CertificateError> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(CertificateError::Inconsistent(
            "ragged preconditioner".into(),
        ));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j].0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemId {
    pub system: String,
    pub bodies: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<Hex>,
}

impl ProblemId {
    pub fn of(problem: &ChoreographyProblem) -> Self {
        use crate::choreo::ProblemKind;
        let system = match problem.kind() {
            ProblemKind::Chain { .. } => "chain".to_string(),
            _ => problem.name(),
        };
        ProblemId {
            system,
            bodies: problem.bodies(),
            a: (problem.kind() != ProblemKind::Eight).then(|| Hex(problem.a())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofParameters {
    pub h_point: f64,
    pub h_set: f64,
    pub order: usize,
    pub delta: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub rounding: String,
    pub version: String,
    pub arch: String,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            rounding: rounding::backend().name().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            arch: std::env::consts::ARCH.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub x_bar: Vec<Hex>,
    pub x: IntervalVector,
    pub value: IntervalVector,
    pub jacobian: IntervalMatrix,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub preconditioner: Option<Vec<Vec<Hex>>>,
    pub image: IntervalVector,
}

impl From<&IterationRecord> for TraceEntry {
    fn from(r: &IterationRecord) -> Self {
        TraceEntry {
            x_bar: hex_vec(&r.x_bar),
            x: r.x.clone(),
            value: r.value.clone(),
            jacobian: r.jacobian.clone(),
            preconditioner: r.preconditioner.as_ref().map(hex_matrix),
            image: r.image.clone(),
        }
    }
}

/// Crossing data of the last set evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingInfo {
    pub time: Interval,
    pub steps: usize,
    /// Eight only: `x_1 != 0` on the crossing enclosure.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x1_nonzero: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofCertificate {
    pub schema_version: u32,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cause: Option<String>,
    pub method: Method,
    pub iterations: usize,
    pub wall_clock_seconds: f64,
    /// Run time of the original computation on 2002-era hardware, kept for
    /// reference only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference_seconds: Option<f64>,
    pub problem: ProblemId,
    pub parameters: ProofParameters,
    pub environment: Environment,
    pub candidate: Vec<Hex>,
    pub x: IntervalVector,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi: Option<IntervalVector>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub jacobian: Option<IntervalMatrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub preconditioner: Option<Vec<Vec<Hex>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub image: Option<IntervalVector>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub crossing: Option<CrossingInfo>,
    #[serde(default)]
    pub trace: Vec<TraceEntry>,
}

/// Inputs of one existence proof.
#[derive(Debug, Clone)]
pub struct ProofRequest {
    pub problem: ChoreographyProblem,
    pub method: Method,
    pub x_bar: Vec<f64>,
    pub x: IntervalVector,
    pub parameters: ProofParameters,
    /// Krawczyk preconditioner; computed at `x_bar` when absent.
    pub preconditioner: Option<DMatrix<f64>>,
}

impl ProofRequest {
    pub fn new(
        problem: ChoreographyProblem,
        method: Method,
        x_bar: Vec<f64>,
        parameters: ProofParameters,
    ) -> Self {
        let x = IntervalVector::around(&x_bar, parameters.delta);
        ProofRequest {
            problem,
            method,
            x_bar,
            x,
            parameters,
            preconditioner: None,
        }
    }

    /// The published run for `problem`, if there is one.
    pub fn reference(problem: ChoreographyProblem) -> Option<Self> {
        let r = problem.reference()?;
        let params = ProofParameters {
            h_point: r.h_point,
            h_set: r.h_set,
            order: r.order,
            delta: r.delta,
            max_iter: DEFAULT_MAX_ITER,
        };
        Some(ProofRequest::new(problem, r.method, r.x_bar, params))
    }

    /// Replaces the box by an arbitrary one containing `x_bar`.
    pub fn with_box(mut self, x: IntervalVector) -> Self {
        self.x = x;
        self
    }
}

/// Published run times (seconds) for the replayed proofs.
fn reference_seconds(problem: &ChoreographyProblem) -> Option<f64> {
    use crate::choreo::ProblemKind;
    match problem.kind() {
        ProblemKind::Eight => Some(2.66),
        ProblemKind::Gerver => Some(30.5),
        ProblemKind::Chain6 => Some(57.5),
        ProblemKind::Chain { .. } => None,
    }
}

/// Wall-clock timer; `wasm32-unknown-unknown` has no clock, so it reads 0
/// there and the host measures instead.
#[cfg(not(target_arch = "wasm32"))]
fn stopwatch() -> impl Fn() -> f64 {
    let start = std::time::Instant::now();
    move || start.elapsed().as_secs_f64()
}

#[cfg(target_arch = "wasm32")]
fn stopwatch() -> impl Fn() -> f64 {
    || 0.0
}

/// Runs the certification and assembles its certificate.
pub fn prove(req: &ProofRequest) -> Result<ProofCertificate, CertificateError> {
    let elapsed = stopwatch();
    let p = &req.parameters;
    let map = PhiMap::new(&req.problem, p.h_point, p.h_set, p.order);
    let mut job = CertificationJob {
        x_bar: req.x_bar.clone(),
        x: req.x.clone(),
        method: req.method,
        c: None,
        max_iter: p.max_iter,
    };
    if req.method == Method::Krawczyk {
        let c = match &req.preconditioner {
            Some(c) => c.clone(),
            None => req.problem.preconditioner(
                &req.x_bar,
                p.h_point,
                crate::integrator::nonrigorous::DEFAULT_ORDER,
            )?,
        };
        job = job.with_preconditioner(c);
    }
    let outcome = certify(&map, &job)?;
    let crossing = map.last_set().map(|r| CrossingInfo {
        time: r.crossing_time,
        steps: r.steps.len(),
        x1_nonzero: r.x1_nonzero,
    });
    Ok(assemble(req, outcome, crossing, elapsed()))
}

fn assemble(
    req: &ProofRequest,
    outcome: CertificationOutcome,
    crossing: Option<CrossingInfo>,
    seconds: f64,
) -> ProofCertificate {
    let last = outcome.trace.last();
    ProofCertificate {
        schema_version: SCHEMA_VERSION,
        verdict: outcome.verdict,
        cause: outcome.cause.clone(),
        method: req.method,
        iterations: outcome.iterations,
        wall_clock_seconds: seconds,
        reference_seconds: reference_seconds(&req.problem),
        problem: ProblemId::of(&req.problem),
        parameters: req.parameters,
        environment: Environment::current(),
        candidate: hex_vec(&req.x_bar),
        x: req.x.clone(),
        phi: last.map(|r| r.value.clone()),
        jacobian: last.map(|r| r.jacobian.clone()),
        preconditioner: last.and_then(|r| r.preconditioner.as_ref()).map(hex_matrix),
        image: outcome.operator_image.clone(),
        crossing,
        trace: outcome.trace.iter().map(TraceEntry::from).collect(),
    }
}

/// Result of re-checking a certificate without integration.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    /// Verdict implied by the stored intervals.
    pub verdict: Verdict,
    /// Whether it agrees with the stored verdict.
    pub agrees: bool,
    /// Per-iteration notes (inclusions found, recomputed images).
    pub notes: Vec<String>,
}

/// Re-derives the verdict from the stored trace: recomputes every operator
/// image from the stored value and Jacobian enclosures, checks it is
/// bit-identical to the stored one, checks the shrink chain, and applies the
/// inclusion rule to the last image.
pub fn verify(cert: &ProofCertificate) -> Result<VerifyReport, CertificateError> {
    if cert.schema_version != SCHEMA_VERSION {
        return Err(CertificateError::Schema(cert.schema_version));
    }
    let bad = |m: String| Err(CertificateError::Inconsistent(m));
    let mut notes = Vec::new();
    let mut expected_x = cert.x.clone();
    let mut verdict = Verdict::Inconclusive;
    for (k, e) in cert.trace.iter().enumerate() {
        let x_bar = unhex(&e.x_bar);
        if e.x != expected_x {
            return bad(format!(
                "iteration {k}: box differs from the shrink of the previous one"
            ));
        }
        if !e.x.contains(&x_bar) {
            return bad(format!("iteration {k}: x_bar outside the box"));
        }
        let image = match cert.method {
            Method::Newton => {
                newton_operator(&x_bar, &e.value, &e.jacobian).map_err(RootfindError::from)?
            }
            Method::Krawczyk => {
                let c = e.preconditioner.as_ref().ok_or_else(|| {
                    CertificateError::Inconsistent(format!("iteration {k}: missing C"))
                })?;
                krawczyk_operator(&x_bar, &e.x, &e.value, &e.jacobian, &unhex_matrix(c)?)
            }
        };
        if image != e.image {
            return bad(format!(
                "iteration {k}: stored operator image does not match recomputation"
            ));
        }
        if image.subset_interior(&e.x) {
            verdict = Verdict::UniqueZero;
            notes.push(format!(
                "iteration {k}: image inside the interior of the box"
            ));
            if k + 1 != cert.trace.len() {
                return bad("trace continues after an inclusion".into());
            }
        } else if image.disjoint(&e.x) {
            verdict = Verdict::NoZero;
            notes.push(format!("iteration {k}: image disjoint from the box"));
            if k + 1 != cert.trace.len() {
                return bad("trace continues after a disjointness".into());
            }
        } else {
            notes.push(format!("iteration {k}: no decision, box shrunk"));
            expected_x = e.x.intersect(&image).map_err(RootfindError::from)?;
        }
    }
    if let (Some(img), Some(last)) = (&cert.image, cert.trace.last()) {
        if *img != last.image {
            return bad("top-level image differs from the last trace image".into());
        }
    }
    Ok(VerifyReport {
        verdict,
        agrees: verdict == cert.verdict,
        notes,
    })
}

impl ProofCertificate {
    pub fn to_toml(&self) -> Result<String, CertificateError> {
        let mut text = toml::to_string(self)?;
        text.push_str(&self.decimal_comments());
        Ok(text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CertificateError> {
        let cert: ProofCertificate = toml::from_str(text)?;
        if cert.schema_version != SCHEMA_VERSION {
            return Err(CertificateError::Schema(cert.schema_version));
        }
        Ok(cert)
    }

    pub fn candidate(&self) -> Vec<f64> {
        unhex(&self.candidate)
    }

    /// The problem the certificate was produced for.
    pub fn problem(&self) -> Result<ChoreographyProblem, CertificateError> {
        Ok(ChoreographyProblem::by_name(
            &self.problem.system,
            Some(self.problem.bodies),
            self.problem.a.map(|h| h.0),
        )?)
    }

    fn decimal_comments(&self) -> String {
        let mut out = String::from("\n# Decimal rendering (informative only)\n");
        let _ = writeln!(
            out,
            "# verdict = {:?}, iterations = {}",
            self.verdict, self.iterations
        );
        let vector = |out: &mut String, name: &str, v: &IntervalVector| {
            for (i, c) in v.iter().enumerate() {
                let _ = writeln!(out, "# {name}[{i}] = {c}");
            }
        };
        let _ = writeln!(
            out,
            "# candidate = ({})",
            self.candidate()
                .iter()
                .map(|v| format!("{v:e}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
        vector(&mut out, "x", &self.x);
        if let Some(v) = &self.phi {
            vector(&mut out, "phi", v);
        }
        if let Some(m) = &self.jacobian {
            for i in 0..m.rows() {
                let row: Vec<String> = m.row(i).iter().map(|c| c.to_string()).collect();
                let _ = writeln!(out, "# jacobian[{i}] = {}", row.join(" "));
            }
        }
        if let Some(v) = &self.image {
            vector(&mut out, "image", v);
            let d: Vec<String> = v.diam().iter().map(|d| format!("{d:.3e}")).collect();
            let _ = writeln!(out, "# diam image = ({})", d.join(", "));
        }
        if let Some(c) = &self.crossing {
            let _ = writeln!(out, "# crossing time = {}, steps = {}", c.time, c.steps);
        }
        out
    }
}
