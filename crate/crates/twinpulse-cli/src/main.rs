//! Command-line surface of the twinpulse toolkit: sequence construction,
//! excitation profiles, identity verification, profile comparison,
//! bandwidths, and envelope integration, emitting CSV/JSON artifacts.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use twinpulse::analysis::{
    analytic_bandwidth, compare, numeric_bandwidth, profile, EpsGrid,
};
use twinpulse::identity::{
    chebyshev_closed_form, chebyshev_cos_product, verify_appendix, z_n_closed_form,
    CHEBYSHEV_REL_TOL, ZN_CLOSED_FORM_TOL,
};
use twinpulse::sequence::{
    build_twin, reference_sequence, CompositeSequence, Family, ReferenceName,
};
use twinpulse::su2::{PulseArea, Su2Matrix};
use twinpulse::waveform::{integrate, Envelope};

#[derive(Parser)]
#[command(
    name = "twinpulse",
    version,
    about = "Twin composite pi-pulse sequences: construction, profiles, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the pulse table of a sequence (areas and phases in units of pi)
    Phases(PhasesArgs),
    /// Write the excitation profile of a sequence over an epsilon grid
    Profile(ProfileArgs),
    /// Run the identity checks and write a report array; exits 1 on failure
    Verify(VerifyArgs),
    /// Compare two sequences pointwise and by threshold bandwidth
    Compare(CompareArgs),
    /// High-fidelity bandwidth of a sequence at a threshold
    Bandwidth(BandwidthArgs),
    /// Integrate a sampled envelope and report the resulting propagator
    Integrate(IntegrateArgs),
}

/// Ways to name a sequence; exactly one must be given.
#[derive(Args)]
struct SeqSpec {
    /// Twin family: type1, type2, or type3 (requires --n)
    #[arg(long)]
    family: Option<String>,
    /// Twin parameter N (at least 2)
    #[arg(long)]
    n: Option<u32>,
    /// Reference sequence: L1, L2, L3plus, L3minus, L4
    #[arg(long = "ref")]
    reference: Option<String>,
    /// Load a sequence from a JSON file
    #[arg(long)]
    file: Option<PathBuf>,
    /// The bare single pi pulse
    #[arg(long)]
    single_pulse: bool,
}

#[derive(Args)]
struct GridSpec {
    #[arg(long, default_value_t = -1.0)]
    eps_min: f64,
    #[arg(long, default_value_t = 1.0)]
    eps_max: f64,
    #[arg(long, default_value_t = 2001)]
    points: usize,
}

#[derive(Args)]
struct PhasesArgs {
    #[command(flatten)]
    seq: SeqSpec,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    seq: SeqSpec,
    #[command(flatten)]
    grid: GridSpec,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Twin family whose identity reports to produce for n = 2..=n-max
    #[arg(long)]
    family: Option<String>,
    /// Check the closed-form product identities for n = 1..=n-max instead
    #[arg(long)]
    chebyshev: bool,
    #[arg(long, default_value_t = 12)]
    n_max: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// First sequence, e.g. type1:3, L3plus, single, file:seq.json
    #[arg(long)]
    a: String,
    /// Second sequence, same forms as --a
    #[arg(long)]
    b: String,
    #[command(flatten)]
    grid: GridSpec,
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BandwidthArgs {
    #[command(flatten)]
    seq: SeqSpec,
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Envelope CSV file with a `t,omega` header
    #[arg(long)]
    envelope: PathBuf,
    /// Drive phase in units of pi
    #[arg(long, default_value_t = 0.0)]
    phase: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Io(String),
    VerificationFailed,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::VerificationFailed => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<twinpulse::Error> for CliError {
    fn from(e: twinpulse::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Io(msg) => eprintln!("error: {msg}"),
                CliError::VerificationFailed => eprintln!("error: verification failed"),
            }
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Phases(args) => {
            let seq = resolve_seq(&args.seq)?;
            println!("{}", seq.pulse_table());
            Ok(())
        }
        Command::Profile(args) => {
            let seq = resolve_seq(&args.seq)?;
            let table = profile(&seq, &grid_of(&args.grid)?);
            let text = match args.format.as_str() {
                "csv" => table.to_csv_string(),
                "json" => pretty(&table),
                other => return Err(CliError::Usage(format!("unknown format `{other}`"))),
            };
            write_output(args.out.as_deref(), &text)
        }
        Command::Verify(args) => run_verify(args),
        Command::Compare(args) => {
            let a = parse_compact_spec(&args.a)?;
            let b = parse_compact_spec(&args.b)?;
            if !(args.threshold > 0.0 && args.threshold < 1.0) {
                return Err(CliError::Usage(format!(
                    "threshold must lie strictly between 0 and 1, got {}",
                    args.threshold
                )));
            }
            let report = compare(&a, &b, &grid_of(&args.grid)?, args.threshold)?;
            write_output(args.out.as_deref(), &pretty(&report))
        }
        Command::Bandwidth(args) => {
            let seq = resolve_seq(&args.seq)?;
            let numeric = numeric_bandwidth(&seq, args.threshold)?;
            let closed = match (seq.family(), seq.n_parameter()) {
                (Some(family), Some(n)) => {
                    Some(analytic_bandwidth(family, n, args.threshold)?)
                }
                _ => None,
            };
            let out = json!({
                "sequence": seq.label().to_string(),
                "threshold": args.threshold,
                "epsilon_star": numeric,
                "epsilon_star_closed_form": closed,
            });
            write_output(args.out.as_deref(), &pretty(&out))
        }
        Command::Integrate(args) => {
            let text = fs::read_to_string(&args.envelope)
                .map_err(|e| CliError::Io(format!("{}: {e}", args.envelope.display())))?;
            let envelope = Envelope::from_csv(&text)?;
            let phase = args.phase * std::f64::consts::PI;
            let u = integrate(&envelope, phase);
            let reference = Su2Matrix::from_area(envelope.area()).phase_shifted(phase);
            let distance = ((u.a - reference.a).norm().powi(2)
                + (u.b - reference.b).norm().powi(2))
            .sqrt();
            let out = json!({
                "area_radians": envelope.area(),
                "area_over_pi": envelope.area() / std::f64::consts::PI,
                "phase_radians": phase,
                "a": [u.a.re, u.a.im],
                "b": [u.b.re, u.b.im],
                "transition_probability": u.transition_probability(),
                "unitarity_defect": u.unitarity_defect(),
                "distance_from_area_propagator": distance,
            });
            write_output(args.out.as_deref(), &pretty(&out))
        }
    }
}

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    if args.chebyshev == args.family.is_some() {
        return Err(CliError::Usage(
            "give exactly one of --family or --chebyshev".into(),
        ));
    }
    let mut all_passed = true;
    let text = if args.chebyshev {
        let mut entries = Vec::new();
        for n in 1..=args.n_max {
            let product = chebyshev_cos_product(n);
            let closed = chebyshev_closed_form(n);
            let rel = (product - closed).abs() / closed;
            let zn = (n >= 2).then(|| z_n_closed_form(n).expect("n >= 2"));
            let zn_err = zn.map(|v| (v - 1.0).abs());
            let passed =
                rel < CHEBYSHEV_REL_TOL && zn_err.is_none_or(|e| e < ZN_CLOSED_FORM_TOL);
            all_passed &= passed;
            entries.push(json!({
                "n": n,
                "cos_product": product,
                "closed_form": closed,
                "relative_residual": rel,
                "z_n": zn,
                "z_n_error": zn_err,
                "passed": passed,
            }));
        }
        pretty(&entries)
    } else {
        let family = Family::from_str(args.family.as_deref().expect("checked above"))?;
        if args.n_max < 2 {
            return Err(CliError::Usage(format!(
                "--n-max must be at least 2, got {}",
                args.n_max
            )));
        }
        let mut reports = Vec::new();
        for n in 2..=args.n_max {
            match verify_appendix(family, n) {
                Ok(report) => {
                    all_passed &= report.passed;
                    reports.push(serde_json::to_value(&report).expect("report serializes"));
                }
                Err(e) => {
                    all_passed = false;
                    reports.push(json!({
                        "family": family.to_string(),
                        "n": n,
                        "passed": false,
                        "error": e.to_string(),
                    }));
                }
            }
        }
        pretty(&reports)
    };
    write_output(args.out.as_deref(), &text)?;
    if all_passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

fn grid_of(spec: &GridSpec) -> Result<EpsGrid, CliError> {
    Ok(EpsGrid::uniform(spec.eps_min, spec.eps_max, spec.points)?)
}

fn resolve_seq(spec: &SeqSpec) -> Result<CompositeSequence, CliError> {
    let mut given = 0;
    given += spec.family.is_some() as u32;
    given += spec.reference.is_some() as u32;
    given += spec.file.is_some() as u32;
    given += spec.single_pulse as u32;
    if given != 1 {
        return Err(CliError::Usage(
            "give exactly one of --family/--n, --ref, --file, --single-pulse".into(),
        ));
    }
    if spec.n.is_some() && spec.family.is_none() {
        return Err(CliError::Usage("--n only applies to --family".into()));
    }
    if let Some(family) = &spec.family {
        let family = Family::from_str(family)?;
        let n = spec
            .n
            .ok_or_else(|| CliError::Usage("--family requires --n".into()))?;
        return Ok(build_twin(family, n)?);
    }
    if let Some(name) = &spec.reference {
        return Ok(reference_sequence(ReferenceName::from_str(name)?));
    }
    if let Some(path) = &spec.file {
        return load_sequence(path);
    }
    Ok(CompositeSequence::single_pulse(PulseArea::B))
}

/// Compact sequence spec for `compare`: `type1:3`, `L3plus`, `single`,
/// or `file:seq.json`.
fn parse_compact_spec(s: &str) -> Result<CompositeSequence, CliError> {
    if s.eq_ignore_ascii_case("single") {
        return Ok(CompositeSequence::single_pulse(PulseArea::B));
    }
    if let Some(path) = s.strip_prefix("file:") {
        return load_sequence(Path::new(path));
    }
    if let Some((family, n)) = s.split_once(':') {
        let family = Family::from_str(family)?;
        let n: u32 = n
            .parse()
            .map_err(|_| CliError::Usage(format!("bad twin parameter in `{s}`")))?;
        return Ok(build_twin(family, n)?);
    }
    Ok(reference_sequence(ReferenceName::from_str(s)?))
}

fn load_sequence(path: &Path) -> Result<CompositeSequence, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(CompositeSequence::from_json(&text)?)
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
