//! `choreo`: refine candidates, replay the existence proofs, check convexity
//! and export curves.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use choreo_core::certificate::{
    prove, verify, CertificateError, ProofCertificate, ProofParameters, ProofRequest,
};
use choreo_core::choreo::{
    refine_candidate, unfold, ChoreoError, ChoreographyProblem, Frame, ProblemKind,
};
use choreo_core::convexity::{verify_convexity, ConvexityCertificate, ConvexityVerdict};
use choreo_core::interval::hexfloat;
use choreo_core::rootfind::{Method, RootfindError, Verdict, DEFAULT_MAX_ITER};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_NO_ZERO: u8 = 3;
const EXIT_INTEGRATOR: u8 = 4;
const EXIT_USAGE: u8 = 64;

/// Retries with the step size halved after an inconclusive or failed run.
const RETRIES: usize = 3;

#[derive(Parser)]
#[command(
    name = "choreo",
    version,
    about = "Computer-assisted proofs for N-body choreographies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nonrigorous Newton refinement of a candidate zero of Phi.
    Refine(RefineArgs),
    /// Certify a zero of Phi and write a proof certificate.
    Prove(ProveArgs),
    /// Check convexity of the lobes of the Eight.
    Convexity(ConvexityArgs),
    /// Unfold a certified segment into the whole closed curve.
    EmitCurve(CurveArgs),
    /// Re-check a certificate from its stored intervals.
    Verify(VerifyArgs),
    /// Replay the Eight, Gerver and six-chain proofs.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemName {
    Eight,
    Gerver,
    Chain6,
    Chain,
}

impl SystemName {
    fn as_str(self) -> &'static str {
        match self {
            SystemName::Eight => "eight",
            SystemName::Gerver => "gerver",
            SystemName::Chain6 => "chain6",
            SystemName::Chain => "chain",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodName {
    Newton,
    Krawczyk,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Method {
        match m {
            MethodName::Newton => Method::Newton,
            MethodName::Krawczyk => Method::Krawczyk,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum FrameName {
    #[default]
    Original,
    Computation,
}

#[derive(Args)]
struct SystemArgs {
    #[arg(long, value_enum)]
    system: SystemName,
    /// Number of bodies (with `--system chain`).
    #[arg(long)]
    bodies: Option<usize>,
    /// Chain parameter a.
    #[arg(long)]
    a: Option<f64>,
}

impl SystemArgs {
    fn problem(&self) -> anyhow::Result<ChoreographyProblem> {
        if matches!(self.system, SystemName::Chain) && self.bodies.is_none() {
            return Err(usage("--system chain needs --bodies"));
        }
        Ok(ChoreographyProblem::by_name(
            self.system.as_str(),
            self.bodies,
            self.a,
        )?)
    }
}

#[derive(Args)]
struct RefineArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Starting guess, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    guess: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    iters: usize,
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    #[arg(long, default_value_t = 20)]
    order: usize,
}

#[derive(Args)]
struct ProveArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, value_enum)]
    method: Option<MethodName>,
    /// Step size for both point and set evaluations.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    h_point: Option<f64>,
    #[arg(long)]
    h_set: Option<f64>,
    #[arg(long)]
    order: Option<usize>,
    /// Half width of the box around the candidate.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Candidate zero, comma separated; defaults to the published one.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x_bar: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat a NoZero verdict as success.
    #[arg(long)]
    expect_no_zero: bool,
}

#[derive(Args)]
struct ConvexityArgs {
    /// Existence certificate of the Eight.
    #[arg(long)]
    cert: Option<PathBuf>,
    /// Refuse to produce the existence certificate inline.
    #[arg(long)]
    no_inline: bool,
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    #[arg(long, default_value_t = 7)]
    order: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    cert: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Samples per segment between the symmetric configurations.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, value_enum, default_value_t)]
    frame: FrameName,
}

#[derive(Args)]
struct VerifyArgs {
    cert: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for the certificates.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: &str) -> anyhow::Error {
    anyhow!(UsageError(msg.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Refine(a) => refine(a),
        Command::Prove(a) => prove_cmd(a),
        Command::Convexity(a) => convexity(a),
        Command::EmitCurve(a) => emit_curve(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Replay(a) => replay(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (kind, code) = classify(&e);
            eprintln!("choreo: {kind}: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn classify(e: &anyhow::Error) -> (&'static str, u8) {
    if e.downcast_ref::<UsageError>().is_some() {
        return ("usage", EXIT_USAGE);
    }
    let integrator = match e.downcast_ref::<CertificateError>() {
        Some(CertificateError::Choreo(ChoreoError::Integrator(_)))
        | Some(CertificateError::Rootfind(RootfindError::Integrator(_))) => true,
        _ => matches!(
            e.downcast_ref::<ChoreoError>(),
            Some(ChoreoError::Integrator(_))
        ),
    };
    if integrator {
        ("integrator", EXIT_INTEGRATOR)
    } else {
        ("error", 1)
    }
}

fn verdict_code(v: Verdict, expect_no_zero: bool) -> u8 {
    match (v, expect_no_zero) {
        (Verdict::UniqueZero, false) | (Verdict::NoZero, true) => 0,
        (Verdict::NoZero, false) => EXIT_NO_ZERO,
        (Verdict::UniqueZero, true) => EXIT_NO_ZERO,
        (Verdict::Inconclusive, _) => EXIT_INCONCLUSIVE,
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn refine(a: RefineArgs) -> anyhow::Result<u8> {
    let problem = a.system.problem()?;
    let guess = if a.guess.is_empty() {
        problem
            .reference()
            .map(|r| r.x_bar)
            .ok_or_else(|| usage("--guess is required for this system"))?
    } else {
        a.guess
    };
    if guess.len() != problem.reduced_dim() {
        return Err(usage(&format!(
            "--guess needs {} values",
            problem.reduced_dim()
        )));
    }
    let x = refine_candidate(&problem, &guess, a.iters, a.h, a.order)?;
    let phi = problem.phi_point(&x, a.h, a.order)?;
    let joined = |v: &[String]| v.join(",");
    println!(
        "x_bar = {}",
        joined(&x.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>())
    );
    println!(
        "hex   = {}",
        joined(&x.iter().map(|v| hexfloat::format(*v)).collect::<Vec<_>>())
    );
    println!(
        "|Phi| = {:.3e}",
        phi.value.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    );
    println!("t1    = {:.17e}", phi.time);
    Ok(0)
}

fn request(a: &ProveArgs) -> anyhow::Result<ProofRequest> {
    let problem = a.system.problem()?;
    let reference = problem.reference();
    let x_bar = if a.x_bar.is_empty() {
        reference
            .as_ref()
            .map(|r| r.x_bar.clone())
            .ok_or_else(|| usage("--x-bar is required for this system (see `choreo refine`)"))?
    } else {
        a.x_bar.clone()
    };
    if x_bar.len() != problem.reduced_dim() {
        return Err(usage(&format!(
            "--x-bar needs {} values",
            problem.reduced_dim()
        )));
    }
    let h_default = reference
        .as_ref()
        .map(|r| (r.h_point, r.h_set))
        .unwrap_or((0.002, 0.002));
    let h_point = a.h_point.or(a.h).unwrap_or(h_default.0);
    let h_set = a.h_set.or(a.h).unwrap_or(h_default.1);
    let parameters = ProofParameters {
        h_point,
        h_set,
        order: a.order.or(reference.as_ref().map(|r| r.order)).unwrap_or(8),
        delta: a
            .delta
            .or(reference.as_ref().map(|r| r.delta))
            .unwrap_or(1e-7),
        max_iter: a.max_iter.unwrap_or(DEFAULT_MAX_ITER),
    };
    let positive = |v: f64| v.is_finite() && v > 0.0;
    if ![parameters.delta, h_point, h_set].into_iter().all(positive) {
        return Err(usage("--delta and step sizes must be positive"));
    }
    let method = a
        .method
        .map(Method::from)
        .or(reference.as_ref().map(|r| r.method))
        .unwrap_or(Method::Krawczyk);
    Ok(ProofRequest::new(problem, method, x_bar, parameters))
}

/// Runs the proof, halving both step sizes after an inconclusive verdict
/// or an integration failure.
fn prove_with_retries(mut req: ProofRequest) -> Result<ProofCertificate, CertificateError> {
    let mut attempt = 0;
    loop {
        let result = prove(&req);
        let retry = match &result {
            Ok(c) => c.verdict == Verdict::Inconclusive,
            Err(CertificateError::Choreo(ChoreoError::Integrator(_)))
            | Err(CertificateError::Rootfind(RootfindError::Integrator(_))) => true,
            Err(_) => false,
        };
        if !retry || attempt == RETRIES {
            return result;
        }
        attempt += 1;
        req.parameters.h_point /= 2.0;
        req.parameters.h_set /= 2.0;
        eprintln!(
            "choreo: retry {attempt}/{RETRIES} with h_point = {}, h_set = {}",
            req.parameters.h_point, req.parameters.h_set
        );
    }
}

fn summarize(cert: &ProofCertificate) {
    println!(
        "system     {} ({} bodies)",
        cert.problem.system, cert.problem.bodies
    );
    println!(
        "method     {:?}, {} iteration(s)",
        cert.method, cert.iterations
    );
    println!("verdict    {:?}", cert.verdict);
    if let Some(cause) = &cert.cause {
        println!("cause      {cause}");
    }
    if let Some(img) = &cert.image {
        for (i, c) in img.iter().enumerate() {
            println!("image[{i}]   {c}  diam {:.3e}", c.diam());
        }
    }
    if let Some(c) = &cert.crossing {
        println!("crossing   t = {}, {} steps", c.time, c.steps);
    }
    println!("time       {:.2} s", cert.wall_clock_seconds);
}

fn prove_cmd(a: ProveArgs) -> anyhow::Result<u8> {
    let req = request(&a)?;
    let cert = prove_with_retries(req)?;
    summarize(&cert);
    if let Some(out) = &a.out {
        fs::write(out, cert.to_toml()?).with_context(|| format!("writing {}", out.display()))?;
    }
    let code = verdict_code(cert.verdict, a.expect_no_zero);
    if code != 0 {
        eprintln!(
            "choreo: {}: {}",
            match cert.verdict {
                Verdict::Inconclusive => "inconclusive",
                Verdict::NoZero => "no-zero",
                Verdict::UniqueZero => "unexpected-zero",
            },
            cert.cause
                .as_deref()
                .unwrap_or("verdict differs from the expected one")
        );
    }
    Ok(code)
}

fn read_certificate(path: &Path) -> anyhow::Result<ProofCertificate> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ProofCertificate::from_toml(&text)?)
}

/// Loads a certificate and re-checks it; only a verified UniqueZero passes.
fn certified(path: &Path) -> anyhow::Result<ProofCertificate> {
    let cert = read_certificate(path)?;
    let report = verify(&cert)?;
    if !report.agrees || cert.verdict != Verdict::UniqueZero {
        bail!("{} does not certify a unique zero", path.display());
    }
    Ok(cert)
}

fn convexity(a: ConvexityArgs) -> anyhow::Result<u8> {
    let cert = match (&a.cert, a.no_inline) {
        (Some(p), _) => certified(p)?,
        (None, true) => return Err(usage("--no-inline needs --cert FILE")),
        (None, false) => {
            let req = ProofRequest::reference(ChoreographyProblem::eight())
                .expect("the Eight has a reference run");
            let cert = prove(&req)?;
            if cert.verdict != Verdict::UniqueZero {
                bail!("inline existence proof was not conclusive");
            }
            cert
        }
    };
    let problem = cert.problem()?;
    if problem.kind() != ProblemKind::Eight {
        return Err(usage("convexity is checked for the Eight only"));
    }
    let result = verify_convexity(&problem, &cert.x, a.h, a.order)?;
    print_convexity(&result);
    if let Some(out) = &a.out {
        fs::write(out, toml::to_string(&result)?)
            .with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(if result.passed() {
        0
    } else {
        EXIT_INCONCLUSIVE
    })
}

fn print_convexity(c: &ConvexityCertificate) {
    println!("steps      {}", c.step_count);
    for s in &c.steps {
        let conds: Vec<String> = s
            .bodies
            .iter()
            .map(|b| format!("{:?}", b.condition))
            .collect();
        println!(
            "step {:3} [{:.4}, {:.4}] {}",
            s.index,
            s.t_prev,
            s.t,
            conds.join(" ")
        );
    }
    match &c.verdict {
        ConvexityVerdict::Pass => println!("verdict    pass"),
        ConvexityVerdict::Fail { step, body, reason } => {
            println!("verdict    fail at step {step}, body {body}: {reason}")
        }
    }
}

fn emit_curve(a: CurveArgs) -> anyhow::Result<u8> {
    let cert = certified(&a.cert)?;
    let problem = cert.problem()?;
    let x = cert.image.clone().unwrap_or_else(|| cert.x.clone());
    let frame = match a.frame {
        FrameName::Original => Frame::Original,
        FrameName::Computation => Frame::Computation,
    };
    let curve = unfold(
        &problem,
        &x,
        cert.parameters.h_point,
        cert.parameters.order,
        a.samples,
        frame,
    )?;
    eprintln!(
        "choreo: period {} ({} samples); junction residuals {}",
        curve.period,
        curve.samples.len(),
        curve
            .junctions
            .iter()
            .map(|j| format!("{} {:.1e}", j.label, j.magnitude()))
            .collect::<Vec<_>>()
            .join(", ")
    );
    write_or_print(a.out.as_deref(), &curve.to_table())?;
    Ok(0)
}

fn verify_cmd(a: VerifyArgs) -> anyhow::Result<u8> {
    let cert = read_certificate(&a.cert)?;
    let report = verify(&cert)?;
    for n in &report.notes {
        println!("{n}");
    }
    println!("stored verdict   {:?}", cert.verdict);
    println!("derived verdict  {:?}", report.verdict);
    if report.agrees {
        println!("certificate verified");
        Ok(0)
    } else {
        eprintln!("choreo: mismatch: stored verdict is not supported by the stored intervals");
        Ok(1)
    }
}

fn replay(a: ReplayArgs) -> anyhow::Result<u8> {
    use choreo_core::choreo::{CHAIN6_A, GERVER_A};
    use rayon::prelude::*;

    let problems = [
        ChoreographyProblem::eight(),
        ChoreographyProblem::gerver(GERVER_A),
        ChoreographyProblem::chain6(CHAIN6_A),
    ];
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.max(1))
        .build()?;
    let results: Vec<_> = pool.install(|| {
        problems
            .par_iter()
            .map(|p| {
                let req = ProofRequest::reference(p.clone())
                    .expect("replayed problems have reference runs");
                (p.name(), prove_with_retries(req))
            })
            .collect()
    });
    let mut code = 0;
    for (name, result) in results {
        match result {
            Ok(cert) => {
                println!(
                    "{name:8} {:?} in {} iteration(s), {:.2} s",
                    cert.verdict, cert.iterations, cert.wall_clock_seconds
                );
                if let Some(dir) = &a.out_dir {
                    fs::create_dir_all(dir)?;
                    let path = dir.join(format!("{name}.toml"));
                    fs::write(&path, cert.to_toml()?)
                        .with_context(|| format!("writing {}", path.display()))?;
                }
                code = code.max(verdict_code(cert.verdict, false));
            }
            Err(e) => {
                println!("{name:8} failed: {e}");
                code = code.max(EXIT_INTEGRATOR);
            }
        }
    }
    Ok(code)
}
