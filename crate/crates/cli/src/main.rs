use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C;
use serde_json::json;
use transeig::forward::{
    evaluate_e, extract_gamma_d, find_eigenvalues, sample_dispersion, Dispersion, SchrodingerDispersion, SearchWindow,
    WaveDispersion,
};
use transeig::io;
use transeig::liouville::{to_potential_with, travel_time};
use transeig::profiles::{
    balanced_profile, bump_profile, example_profile, ExampleName, ExampleParams, Potential, RadialProfile,
};
use transeig::reconstruct::{
    classify_regime, demonstrate_nonuniqueness, estimate_gamma, reconstruct_a_eq_b_with, reconstruct_a_lt_b_with,
    reconstruct_potential_with, PipelineConfig, ReconstructionResult, Regime,
};
use transeig::samples::{uniform_grid, SpectralSamples, Symmetry};
use transeig::{Error, IntegratorConfig};

#[derive(Parser)]
#[command(name = "transeig", version, about = "Transmission eigenvalues: forward computation and reconstruction")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "TRANSEIG_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in profile or potential file.
    Example(ExampleCmd),
    /// Sample D(k) (or D~(k) with --schrodinger) on a uniform grid.
    Forward(ForwardCmd),
    /// Tabulate the zeros of D with multiplicities, d and gamma.
    Eigs(EigsCmd),
    /// Liouville transform a profile into a potential.
    Transform(TransformCmd),
    /// Recover a profile or potential from a sample file or eigenvalue table.
    Reconstruct(ReconstructCmd),
    /// Run the closed-form oracle suite.
    Validate(ValidateCmd),
    /// Show two media with the same E(k) but different (gamma, a).
    Nonuniqueness(NonuniquenessCmd),
}

#[derive(Args)]
struct Medium {
    /// Profile file (transeig-profile/1).
    #[arg(long, conflicts_with = "potential")]
    profile: Option<PathBuf>,
    /// Potential file (transeig-potential/1); implies --schrodinger.
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Treat the input as a Schrödinger potential.
    #[arg(long)]
    schrodinger: bool,
}

#[derive(Args)]
struct GridArgs {
    /// Largest |k| on the grid.
    #[arg(long, default_value_t = 50.0)]
    kmax: f64,
    /// Number of grid points (odd).
    #[arg(long = "n-points", default_value_t = 2001)]
    n_points: usize,
}

#[derive(Args)]
struct ExampleCmd {
    /// ex61, ex62_first, ex62_second, ex63, bump, balanced, delta, square_well.
    name: String,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 2.0)]
    eps: f64,
    /// The c parameter of ex61/ex63, or the weight of the delta potential.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Support bound of the delta and square-well potentials.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Depth of the square well.
    #[arg(long, default_value_t = 9.0)]
    depth: f64,
    /// Amplitude of the bump or balanced profile.
    #[arg(long, default_value_t = 0.5)]
    amp: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ForwardCmd {
    #[command(flatten)]
    medium: Medium,
    #[command(flatten)]
    grid: GridArgs,
    /// Divide by gamma and write E(k) instead of D(k).
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct EigsCmd {
    #[command(flatten)]
    medium: Medium,
    /// Search window |Re k| <= kmax (defaults to 40/L).
    #[arg(long)]
    kmax: Option<f64>,
    /// Search window |Im k| <= im_band (defaults to 20/L).
    #[arg(long)]
    im_band: Option<f64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct TransformCmd {
    #[arg(long)]
    profile: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    ALtB,
    AEqB,
    Schrodinger,
}

#[derive(Args)]
struct ReconstructCmd {
    /// Sample file (transeig-samples/1) holding D, E or Dtilde.
    #[arg(long, conflicts_with = "eigs")]
    input: Option<PathBuf>,
    /// Eigenvalue table (transeig-eigs/1); E is sampled from the product.
    #[arg(long)]
    eigs: Option<PathBuf>,
    /// Support bound b for an eigenvalue table.
    #[arg(long)]
    b: Option<f64>,
    /// Gamma to convert D samples to E (estimated from small k if absent).
    #[arg(long)]
    gamma: Option<f64>,
    /// Skip classification.
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Grid half-width for sampling an eigenvalue table (defaults to the table's window).
    #[arg(long)]
    kmax: Option<f64>,
    /// Grid size for sampling an eigenvalue table.
    #[arg(long = "n-points", default_value_t = 4001)]
    n_points: usize,
    /// Nyström steps on [0, a].
    #[arg(long, default_value_t = 256)]
    steps: usize,
    /// Recovered profile or potential.
    #[arg(short, long)]
    output: PathBuf,
    /// Per-stage diagnostics (JSON).
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    /// Plot-ready curve of rho(x) or V(y).
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateCmd {
    /// Run a single group.
    #[arg(long)]
    only: Option<String>,
}

#[derive(Args)]
struct NonuniquenessCmd {
    #[arg(long, default_value_t = 1.0)]
    b: f64,
}

/// A failure tagged with the stage it happened in.
struct Failure {
    stage: &'static str,
    error: Error,
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for transeig::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|error| Failure { stage, error })
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Parse(_) | Error::BadParams(_) => 4,
        Error::Unsupported(_) => 5,
        _ => 6,
    }
}

fn positive(name: &str, v: f64) -> transeig::Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::BadParams(format!("{name} must be positive, got {v}")))
    }
}

fn grid(g: &GridArgs) -> transeig::Result<Vec<f64>> {
    positive("kmax", g.kmax)?;
    if g.n_points < 3 || g.n_points.is_multiple_of(2) {
        return Err(Error::BadParams(format!("n-points must be odd and at least 3, got {}", g.n_points)));
    }
    Ok(uniform_grid(g.kmax, g.n_points))
}

enum Loaded {
    Wave(RadialProfile),
    Schrodinger(Potential),
}

fn load(m: &Medium) -> Result<Loaded, Failure> {
    match (&m.profile, &m.potential) {
        (Some(p), None) if !m.schrodinger => {
            let text = io::read_file(p).stage("read")?;
            Ok(Loaded::Wave(io::profile_from_str(&text).stage("parse")?))
        }
        (Some(p), None) => {
            let text = io::read_file(p).stage("read")?;
            let prof = io::profile_from_str(&text).stage("parse")?;
            Ok(Loaded::Schrodinger(transeig::liouville::to_potential(&prof).stage("transform")?))
        }
        (None, Some(v)) => {
            let text = io::read_file(v).stage("read")?;
            Ok(Loaded::Schrodinger(io::potential_from_str(&text).stage("parse")?))
        }
        _ => Err(Failure { stage: "arguments", error: Error::BadParams("give --profile or --potential".into()) }),
    }
}

fn dispersion(m: &Loaded, cfg: IntegratorConfig) -> (Box<dyn Dispersion>, f64, &'static str) {
    match m {
        Loaded::Wave(p) => (Box::new(WaveDispersion::new(p, cfg)), p.b(), "D"),
        Loaded::Schrodinger(v) => (Box::new(SchrodingerDispersion::new(v, cfg)), v.a, "Dtilde"),
    }
}

fn cmd_example(c: &ExampleCmd) -> Result<serde_json::Value, Failure> {
    let params = ExampleParams { b: c.b, eps: c.eps, c: c.c };
    let text = match c.name.as_str() {
        "bump" => io::profile_to_string(&bump_profile(c.b, c.amp, 0.5 * c.b, 0.4 * c.b).stage("build")?),
        "balanced" => io::profile_to_string(&balanced_profile(c.b, c.amp).stage("build")?),
        "delta" => io::potential_to_string(&Potential::delta_at_edge(positive("a", c.a).stage("build")?, c.c)),
        "square_well" => io::potential_to_string(&Potential::square_well(positive("a", c.a).stage("build")?, -c.depth)),
        name => {
            let n: ExampleName = name.parse().stage("arguments")?;
            io::profile_to_string(&example_profile(n, params).stage("build")?)
        }
    };
    io::write_file(&c.output, &text).stage("write")?;
    Ok(json!({ "example": c.name, "output": c.output }))
}

fn cmd_forward(c: &ForwardCmd) -> Result<serde_json::Value, Failure> {
    let medium = load(&c.medium)?;
    let g = grid(&c.grid).stage("arguments")?;
    let mut cfg = IntegratorConfig::default();
    if let Some(t) = c.rel_tol {
        cfg.rel_tol = positive("rel-tol", t).stage("arguments")?;
    }
    let (d, support, mut quantity) = dispersion(&medium, cfg);
    let mut s = sample_dispersion(d.as_ref(), g).stage("forward")?;
    let mut extra = vec![];
    if c.normalize {
        let (order, gamma) = extract_gamma_d(d.as_ref(), 0.25 / d.length_scale()).stage("gamma")?;
        s = s.map(Symmetry::EvenInK, |_, v| v / gamma);
        quantity = if quantity == "D" { "E" } else { "Etilde" };
        extra.push(("gamma".to_string(), format!("{gamma:e}")));
        extra.push(("d".to_string(), order.to_string()));
    }
    let file = io::SampleFile { quantity: quantity.into(), support, samples: s, extra };
    io::write_file(&c.output, &io::samples_to_string(&file)).stage("write")?;
    Ok(json!({ "quantity": quantity, "support": support, "n": file.samples.len(), "output": c.output }))
}

fn cmd_eigs(c: &EigsCmd) -> Result<serde_json::Value, Failure> {
    let medium = load(&c.medium)?;
    let (d, _, _) = dispersion(&medium, IntegratorConfig::default());
    let mut window = SearchWindow::for_length(d.length_scale());
    if let Some(k) = c.kmax {
        window.k_max = positive("kmax", k).stage("arguments")?;
    }
    if let Some(b) = c.im_band {
        window.im_band = positive("im-band", b).stage("arguments")?;
    }
    let es = find_eigenvalues(d.as_ref(), window).stage("eigenvalues")?;
    io::write_file(&c.output, &io::eigs_to_string(&es)).stage("write")?;
    Ok(json!({ "d": es.d, "gamma": es.gamma, "zeros": es.zeros.len(), "output": c.output }))
}

fn cmd_transform(c: &TransformCmd) -> Result<serde_json::Value, Failure> {
    let text = io::read_file(&c.profile).stage("read")?;
    let p = io::profile_from_str(&text).stage("parse")?;
    let map = travel_time(&p).stage("travel_time")?;
    let v = to_potential_with(&p, &map).stage("transform")?;
    io::write_file(&c.output, &io::potential_to_string(&v)).stage("write")?;
    Ok(json!({ "a": map.a(), "b": p.b(), "output": c.output }))
}

/// E samples on a uniform grid from the truncated product over a table.
fn e_from_table(es: &transeig::EigenvalueSet, g: Vec<f64>) -> transeig::Result<(SpectralSamples, f64)> {
    let trunc = es.representatives().len();
    let mut worst = 0.0f64;
    let s = SpectralSamples::from_fn(g.clone(), Symmetry::EvenInK, |k| Ok(evaluate_e(es, C::new(k, 0.0), trunc).0))?;
    for k in g.iter().filter(|k| **k >= 0.0) {
        worst = worst.max(evaluate_e(es, C::new(*k, 0.0), trunc).1);
    }
    Ok((s.map(Symmetry::EvenInK, |_, v| C::new(v.re, 0.0)), worst))
}

fn cmd_reconstruct(c: &ReconstructCmd) -> Result<serde_json::Value, Failure> {
    let cfg = PipelineConfig { nystrom_steps: c.steps, ..PipelineConfig::default() };
    if c.steps < 16 || !c.steps.is_multiple_of(2) {
        return Err(Failure { stage: "arguments", error: Error::BadParams("--steps must be even and at least 16".into()) });
    }
    let mut notes = vec![];
    let (quantity, support, samples) = match (&c.input, &c.eigs) {
        (Some(path), None) => {
            let f = io::samples_from_str(&io::read_file(path).stage("read")?).stage("parse")?;
            (f.quantity, f.support, f.samples)
        }
        (None, Some(path)) => {
            let es = io::eigs_from_str(&io::read_file(path).stage("read")?).stage("parse")?;
            let b = c.b.ok_or_else(|| Failure { stage: "arguments", error: Error::BadParams("--eigs needs --b".into()) })?;
            let g = grid(&GridArgs { kmax: c.kmax.unwrap_or(es.window.k_max), n_points: c.n_points }).stage("arguments")?;
            let (e, trunc) = e_from_table(&es, g).stage("product")?;
            notes.push(json!({ "stage": "product_truncation", "value": trunc }));
            match c.gamma {
                Some(gm) => ("D".to_string(), b, e.map(Symmetry::EvenInK, |_, v| v * gm)),
                None => ("E".to_string(), b, e),
            }
        }
        _ => return Err(Failure { stage: "arguments", error: Error::BadParams("give --input or --eigs".into()) }),
    };
    let regime = match (c.regime, quantity.as_str()) {
        (Some(RegimeArg::ALtB), _) => Regime::ALtB,
        (Some(RegimeArg::AEqB), _) => Regime::AEqB,
        (Some(RegimeArg::Schrodinger), _) | (None, "Dtilde") => Regime::Schrodinger,
        (None, "E") => Regime::ALtB,
        (None, "D") => classify_regime(&samples, support).stage("classify")?,
        (None, q) => return Err(Failure { stage: "parse", error: Error::Parse(format!("unknown quantity {q:?}")) }),
    };
    let result: ReconstructionResult = match regime {
        Regime::ALtB => {
            let e = if quantity == "D" {
                let gamma = c.gamma.unwrap_or_else(|| estimate_gamma(&samples));
                if gamma == 0.0 {
                    return Err(Failure { stage: "gamma", error: Error::GammaZero });
                }
                notes.push(json!({ "stage": "gamma_used", "value": gamma }));
                samples.map(Symmetry::EvenInK, |_, v| v / gamma)
            } else {
                samples
            };
            reconstruct_a_lt_b_with(&e, support, cfg).stage("reconstruct_a_lt_b")?
        }
        Regime::AEqB => reconstruct_a_eq_b_with(&samples, support, cfg).stage("reconstruct_a_eq_b")?,
        Regime::Schrodinger => reconstruct_potential_with(&samples, support, cfg).stage("reconstruct_potential")?,
    };
    let text = match &result.profile {
        Some(p) => io::profile_to_string(p),
        None => io::potential_to_string(&result.potential),
    };
    io::write_file(&c.output, &text).stage("write")?;
    let mut diags: Vec<serde_json::Value> =
        result.diagnostics.iter().map(|d| json!({ "stage": d.stage, "value": d.value })).collect();
    diags.extend(notes);
    let summary = json!({
        "regime": result.regime.as_str(),
        "a_recovered": result.a_recovered,
        "gamma_recovered": result.gamma_recovered,
        "point_parts": result.potential.points,
        "diagnostics": diags,
    });
    if let Some(path) = &c.diagnostics {
        io::write_file(path, &(serde_json::to_string_pretty(&summary).expect("json") + "\n")).stage("write")?;
    }
    if let Some(path) = &c.curve {
        let text = match &result.profile {
            Some(p) => {
                let x: Vec<f64> = (0..=1000).map(|i| p.b() * i as f64 / 1000.0).collect();
                let y: Vec<f64> = x.iter().map(|&x| p.rho(x)).collect();
                io::curve_to_string("rho", &[("b", format!("{:e}", p.b()))], &x, &y)
            }
            None => {
                let v = &result.potential;
                let x: Vec<f64> = (0..=1000).map(|i| v.a * i as f64 / 1000.0).collect();
                let y: Vec<f64> = x.iter().map(|&y| v.smooth(y)).collect();
                let pts: Vec<String> = v.points.iter().map(|p| format!("{:e}, {:e}", p.y, p.weight)).collect();
                io::curve_to_string("V", &[("a", format!("{:e}", v.a)), ("point", pts.join("; "))], &x, &y)
            }
        };
        io::write_file(path, &text).stage("write")?;
    }
    Ok(summary)
}

fn cmd_validate(c: &ValidateCmd) -> Result<bool, Failure> {
    let checks = transeig::validate::run(c.only.as_deref()).stage("validate")?;
    let mut all = true;
    for ch in &checks {
        all &= ch.passed;
        println!(
            "{} {:<13} {:<48} measured {:.3e} tol {:.0e} [{:.1} s] {}",
            if ch.passed { "PASS" } else { "FAIL" },
            ch.group,
            ch.name,
            ch.measured,
            ch.tolerance,
            ch.seconds,
            ch.detail
        );
    }
    println!("{} of {} checks passed", checks.iter().filter(|c| c.passed).count(), checks.len());
    Ok(all)
}

fn report(f: Failure) -> ExitCode {
    let rec = json!({ "stage": f.stage, "code": f.error.code(), "message": f.error.to_string() });
    eprintln!("{rec}");
    ExitCode::from(exit_code(&f.error))
}

fn print(v: serde_json::Value) -> ExitCode {
    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    ExitCode::SUCCESS
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    Ok(match &cli.command {
        Command::Example(c) => print(cmd_example(c)?),
        Command::Forward(c) => print(cmd_forward(c)?),
        Command::Eigs(c) => print(cmd_eigs(c)?),
        Command::Transform(c) => print(cmd_transform(c)?),
        Command::Reconstruct(c) => print(cmd_reconstruct(c)?),
        Command::Validate(c) => {
            if cmd_validate(c)? {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Nonuniqueness(c) => {
            let r = demonstrate_nonuniqueness(positive("b", c.b).stage("arguments")?).stage("nonuniqueness")?;
            print(serde_json::to_value(r).expect("json"))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            return report(Failure { stage: "arguments", error: Error::BadParams("thread count must be positive".into()) });
        }
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(f) => report(f),
    }
}
