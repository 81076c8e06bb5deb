//! `cohfrac` — coherence quantifiers from the command line.
//!
//! Subcommands: `state gen`, `measure`, `simulate`, `verify`. States travel
//! as JSON files, batch results as CSV, everything deterministic for fixed
//! flags. Exit codes: 0 success, 1 validation error, 2 numerical failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cohfrac_core::channels::PhaseVector;
use cohfrac_core::error::CoherenceError;
use cohfrac_core::experiments::{self, format_g12, VerificationReport};
use cohfrac_core::linalg::CVec;
use cohfrac_core::measures::{self, CfConfig, SdpConfig};
use cohfrac_core::states::{self, McmsParams, PureState};
use cohfrac_core::io;
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "cohfrac", version, about = "Coherence quantifiers of density matrices")]
struct Cli {
    /// Worker thread cap (default: COHFRAC_THREADS env var, else all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// State file operations
    State {
        #[command(subcommand)]
        command: StateCommand,
    },
    /// Compute measures of a single state file
    Measure(MeasureArgs),
    /// Batch gap simulation across dimensions, CSV output
    Simulate(SimulateArgs),
    /// Run a verification suite
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum StateCommand {
    /// Generate a state file
    Gen(StateGenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StateKind {
    Pure,
    Mcms,
    Random,
    MubMixed,
}

#[derive(Args)]
struct StateGenArgs {
    #[arg(long, value_enum)]
    kind: StateKind,
    /// Dimension (pure, mcms, random)
    #[arg(long)]
    d: Option<usize>,
    /// MCMS mixing parameter in [0,1]
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// MUB index 1..3 (mub-mixed)
    #[arg(long)]
    basis: Option<usize>,
    /// Comma-separated spectrum, e.g. 0.5,0.3,0.2 (mub-mixed)
    #[arg(long, value_delimiter = ',')]
    evals: Option<Vec<f64>>,
    /// Comma-separated real amplitudes (pure); im parts via --amps-im
    #[arg(long, value_delimiter = ',')]
    amps_re: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    amps_im: Option<Vec<f64>>,
    /// Phases for a maximally coherent pure state (pure, alternative to amplitudes)
    #[arg(long, value_delimiter = ',')]
    phases: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureKind {
    Cf,
    Cr,
    Cl1,
    Mu,
    Gap,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    input: PathBuf,
    /// Subset of {cf, cr, cl1, mu, gap}
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![MeasureKind::Cf, MeasureKind::Cr, MeasureKind::Cl1])]
    measures: Vec<MeasureKind>,
    #[command(flatten)]
    solver: SolverArgs,
}

/// Optimizer/solver overrides shared by measure, simulate and verify.
#[derive(Args, Clone)]
struct SolverArgs {
    /// Random starts for the C_F optimizer (default max(50, 20(d-1)))
    #[arg(long)]
    starts: Option<usize>,
    /// Seed for the C_F optimizer start points
    #[arg(long, default_value_t = 0)]
    opt_seed: u64,
    /// Local-ascent iteration cap
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
    /// Gradient sup-norm stopping tolerance
    #[arg(long, default_value_t = 1e-10)]
    gradient_tol: f64,
    /// SDP duality-gap target (d * mu at termination)
    #[arg(long, default_value_t = 1e-9)]
    gap_tol: f64,
    /// SDP Newton decrement tolerance
    #[arg(long, default_value_t = 1e-10)]
    newton_tol: f64,
}

impl SolverArgs {
    fn validate(&self) -> Result<(), String> {
        if self.max_iterations == 0 {
            return Err("--max-iterations must be >= 1".into());
        }
        for (name, v) in [
            ("--gradient-tol", self.gradient_tol),
            ("--gap-tol", self.gap_tol),
            ("--newton-tol", self.newton_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        Ok(())
    }

    fn cf_config(&self) -> CfConfig {
        CfConfig {
            starts: self.starts,
            seed: self.opt_seed,
            max_iterations: self.max_iterations,
            gradient_tol: self.gradient_tol,
            ..CfConfig::default()
        }
    }

    fn sdp_config(&self) -> SdpConfig {
        SdpConfig {
            gap_tol: self.gap_tol,
            newton_tol: self.newton_tol,
            ..SdpConfig::default()
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Dimensions to scan, e.g. 4,5,6
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Theorem1,
    Theorem3,
    Bounds,
    Gradient,
    SdpCertificate,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimension for the theorem1 suite (default: run d = 3, 4, 5)
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = cli.threads.or_else(|| {
        std::env::var("COHFRAC_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(EXIT_VALIDATION);
        }
        // ignore failure if a pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &CoherenceError) -> u8 {
    match e {
        CoherenceError::SolverNonConvergence { .. }
        | CoherenceError::SingularDiagonal { .. }
        | CoherenceError::VerificationFailed(_) => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

fn invalid(msg: impl Into<String>) -> CoherenceError {
    CoherenceError::InvalidParameter(msg.into())
}

fn run(command: Command) -> Result<(), CoherenceError> {
    match command {
        Command::State {
            command: StateCommand::Gen(args),
        } => cmd_state_gen(args),
        Command::Measure(args) => cmd_measure(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn cmd_state_gen(args: StateGenArgs) -> Result<(), CoherenceError> {
    match args.kind {
        StateKind::Pure => {
            let psi = build_pure(&args)?;
            io::write_pure(&args.out, &psi)?;
        }
        StateKind::Mcms => {
            let d = args.d.ok_or_else(|| invalid("--d required for mcms"))?;
            let p = args.p.ok_or_else(|| invalid("--p required for mcms"))?;
            let rho = states::mcms_state(McmsParams::new(d, p)?)?;
            io::write_density(&args.out, &rho)?;
        }
        StateKind::Random => {
            let d = args.d.ok_or_else(|| invalid("--d required for random"))?;
            let rho = states::random_density(d, args.seed)?;
            io::write_density(&args.out, &rho)?;
        }
        StateKind::MubMixed => {
            let basis = args
                .basis
                .ok_or_else(|| invalid("--basis required for mub-mixed"))?;
            let evals = args
                .evals
                .as_deref()
                .ok_or_else(|| invalid("--evals required for mub-mixed"))?;
            let evals: [f64; 3] = evals
                .try_into()
                .map_err(|_| invalid("--evals must have exactly 3 entries"))?;
            let rho = states::mub_mixed_state(basis, evals)?;
            io::write_density(&args.out, &rho)?;
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn build_pure(args: &StateGenArgs) -> Result<PureState, CoherenceError> {
    if let Some(re) = &args.amps_re {
        let im = args.amps_im.clone().unwrap_or_else(|| vec![0.0; re.len()]);
        if im.len() != re.len() {
            return Err(invalid("--amps-re and --amps-im lengths differ"));
        }
        let amps = CVec::from_fn(re.len(), |i, _| Complex64::new(re[i], im[i]));
        return PureState::new(amps);
    }
    let d = args
        .d
        .ok_or_else(|| invalid("--d or --amps-re required for pure"))?;
    let phases = match &args.phases {
        Some(p) => {
            if p.len() != d {
                return Err(invalid(format!("--phases must have {d} entries")));
            }
            Some(PhaseVector::new(p.clone())?)
        }
        None => None,
    };
    states::maximally_coherent(d, phases.as_ref())
}

fn cmd_measure(args: MeasureArgs) -> Result<(), CoherenceError> {
    args.solver.validate().map_err(invalid)?;
    let rho = io::read_density(&args.input)?;
    let d = rho.dim();
    let cf_config = args.solver.cf_config();
    let sdp_config = args.solver.sdp_config();

    let mut json = serde_json::Map::new();
    json.insert("dim".into(), d.into());

    let wants = |k: MeasureKind| args.measures.contains(&k);
    let mut cf_report = None;
    let mut cr_report = None;

    if wants(MeasureKind::Cf) || wants(MeasureKind::Gap) {
        cf_report = Some(measures::coherence_fraction(&rho, &cf_config)?);
    }
    if wants(MeasureKind::Cr) || wants(MeasureKind::Gap) {
        cr_report = Some(measures::robustness(&rho, &sdp_config)?);
    }

    if wants(MeasureKind::Cf) {
        let r = cf_report.as_ref().unwrap();
        println!("cf = {}", format_g12(r.value));
        println!(
            "  optimal phases: [{}]  (starts: {})",
            r.optimal_phases
                .thetas()
                .iter()
                .map(|t| format!("{t:.6}"))
                .collect::<Vec<_>>()
                .join(", "),
            r.starts_used
        );
        json.insert("cf".into(), r.value.into());
        json.insert(
            "cf_optimal_phases".into(),
            r.optimal_phases.thetas().to_vec().into(),
        );
    }
    if wants(MeasureKind::Cr) {
        let r = cr_report.as_ref().unwrap();
        println!("cr = {}", format_g12(r.value));
        println!(
            "  normalized: {}  duality gap: {}",
            format_g12(r.normalized),
            format_g12(r.duality_gap)
        );
        json.insert("cr".into(), r.value.into());
        json.insert("cr_bar".into(), r.normalized.into());
        json.insert("cr_duality_gap".into(), r.duality_gap.into());
    }
    if wants(MeasureKind::Cl1) {
        let v = measures::c_l1(&rho);
        println!("cl1 = {}", format_g12(v));
        json.insert("cl1".into(), v.into());
        json.insert("cl1_bar".into(), ((1.0 + v) / d as f64).into());
    }
    if wants(MeasureKind::Mu) {
        let v = measures::mu_d(&rho)?;
        println!("mu_d = {}", format_g12(v));
        json.insert("mu_d".into(), v.into());
    }
    if wants(MeasureKind::Gap) {
        let cf = cf_report.as_ref().unwrap().value;
        let cr_bar = cr_report.as_ref().unwrap().normalized;
        let gap = (cr_bar - cf) / cr_bar;
        println!("gap = {}", format_g12(gap));
        json.insert("gap".into(), gap.into());
    }

    println!("{}", serde_json::Value::Object(json));
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CoherenceError> {
    args.solver.validate().map_err(invalid)?;
    if args.dims.is_empty() {
        return Err(invalid("--dims must list at least one dimension"));
    }
    let records = experiments::run_gap_simulation(
        &args.dims,
        args.samples,
        args.seed,
        &args.solver.cf_config(),
        &args.solver.sdp_config(),
    )?;
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            experiments::write_csv(&records, std::io::BufWriter::new(file))?;
            println!("wrote {} records to {}", records.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            experiments::write_csv(&records, stdout.lock())?;
        }
    }

    let mut out = std::io::stderr();
    let _ = writeln!(out, "dim        n      max_gap           mean_gap          neg");
    for s in experiments::summarize(&records) {
        let _ = writeln!(
            out,
            "{:<5} {:>6}  {:>16}  {:>16}  {:>3}",
            s.dim,
            s.n,
            format_g12(s.max_gap),
            format_g12(s.mean_gap),
            s.negative_count
        );
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CoherenceError> {
    args.solver.validate().map_err(invalid)?;
    let cf = args.solver.cf_config();
    let sdp = args.solver.sdp_config();
    let reports: Vec<VerificationReport> = match args.suite {
        Suite::Theorem1 => {
            let dims = match args.d {
                Some(d) => vec![d],
                None => vec![3, 4, 5],
            };
            dims.into_iter()
                .map(|d| experiments::verify_theorem1(args.samples, d, args.seed, &cf, &sdp))
                .collect::<Result<_, _>>()?
        }
        Suite::Theorem3 => vec![experiments::verify_theorem3(args.samples, args.seed, &cf, &sdp)?],
        Suite::Bounds => vec![experiments::verify_bounds(args.samples, args.seed, &cf)?],
        Suite::Gradient => vec![experiments::verify_gradient(
            args.samples.div_euclid(5).max(1),
            args.seed,
        )?],
        Suite::SdpCertificate => vec![experiments::verify_sdp_certificate(
            args.samples,
            args.seed,
            &sdp,
        )?],
    };

    let mut all_pass = true;
    for report in &reports {
        for check in &report.checks {
            println!(
                "[{}] {} ({}): max deviation {} vs tolerance {} -> {}",
                report.name,
                check.name,
                report.samples,
                format_g12(check.max_deviation),
                format_g12(check.tolerance),
                if check.pass { "pass" } else { "FAIL" }
            );
        }
        all_pass &= report.pass;
    }
    if all_pass {
        Ok(())
    } else {
        let failed: Vec<&str> = reports
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.name.as_str())
            .collect();
        Err(CoherenceError::VerificationFailed(failed.join(", ")))
    }
}
