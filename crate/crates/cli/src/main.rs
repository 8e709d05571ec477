//! `qsearch`: run qudit Grover searches, print schedules and check pulses.

mod output;

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qudit_search::engine::{run_search, DiffusionPath, ExperimentConfig, FChoice};
use qudit_search::fgate::{coupling_design, validate_f};
use qudit_search::multipod::{pulse_check, verify_f_pulse, PulseJob, PulseShape};
use qudit_search::schedule::{canonical_schedule, custom_schedule, deterministic_schedule, SearchSchedule};
use qudit_search::state::QuditShape;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use output::{sig, write_output};

const DIGITS: usize = 12;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl From<qudit_search::Error> for CliError {
    fn from(e: qudit_search::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser)]
#[command(name = "qsearch", version, about = "Qudit Grover search simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a search and write the marked-state population after every step.
    Search(SearchArgs),
    /// Print the phase-matched schedule for a database size.
    Schedule(ScheduleArgs),
    /// Simulate a multipod pulse and fit the resulting reflection.
    PulseCheck(PulseArgs),
    /// Check that a generalized Hadamard is unitary with an equal-moduli first column.
    ValidateF(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Deterministic,
    Pi,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
enum Diffusion {
    Direct,
    Gates,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Shape {
    Sech,
    Gaussian,
}

/// `householder`, `dft`, `random:SEED` or `pulse`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FArg {
    Householder,
    Dft,
    Random(u64),
    Pulse,
}

impl FArg {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "householder" => Ok(FArg::Householder),
            "dft" => Ok(FArg::Dft),
            "pulse" => Ok(FArg::Pulse),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed.parse().map(FArg::Random).map_err(|_| format!("invalid seed in '{s}'")),
                None => Err(format!("unknown F '{s}', expected householder, dft, random:SEED or pulse")),
            },
        }
    }

    fn choice(self, d: usize) -> CliResult<FChoice> {
        Ok(match self {
            FArg::Householder => FChoice::Householder,
            FArg::Dft => FChoice::Dft,
            FArg::Random(seed) => FChoice::RandomPhase(seed),
            FArg::Pulse => {
                let report = verify_f_pulse(d)?;
                if !report.pass {
                    return Err(CliError::Runtime(format!(
                        "pulse-derived F deviates from the target by {:.3e}",
                        report.deviation
                    )));
                }
                FChoice::Gate(report.gate)
            }
        })
    }
}

impl fmt::Display for FArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FArg::Householder => f.write_str("householder"),
            FArg::Dft => f.write_str("dft"),
            FArg::Random(seed) => write!(f, "random:{seed}"),
            FArg::Pulse => f.write_str("pulse"),
        }
    }
}

fn parse_radians(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if t.ends_with("deg") || t.ends_with('°') {
        return Err("angles are taken in radians only; degrees are not accepted".into());
    }
    match t.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("'{s}' is not a finite angle in radians")),
    }
}

fn parse_finite(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("'{s}' is not a finite number")),
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// JSON file with any of the flag names as keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Levels per qudit.
    #[arg(long)]
    d: Option<usize>,
    /// Number of qudits.
    #[arg(long)]
    n: Option<usize>,
    /// Flat index of the marked item (default 0).
    #[arg(long, conflicts_with = "sweep")]
    marked: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Phase in radians, custom mode only.
    #[arg(long, value_parser = parse_radians, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Number of steps to record, overriding the schedule.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_parser = FArg::parse)]
    f: Option<FArg>,
    #[arg(long, value_enum)]
    diffusion: Option<Diffusion>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated marked indices, run in parallel.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct SearchFile {
    d: Option<usize>,
    n: Option<usize>,
    marked: Option<usize>,
    mode: Option<Mode>,
    phi: Option<f64>,
    steps: Option<usize>,
    f: Option<String>,
    diffusion: Option<Diffusion>,
    format: Option<Format>,
    out: Option<PathBuf>,
    sweep: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    /// Database size.
    #[arg(long = "N", conflicts_with_all = ["d", "n", "sweep"])]
    size: Option<usize>,
    #[arg(long, requires = "n")]
    d: Option<usize>,
    #[arg(long, requires = "d")]
    n: Option<usize>,
    /// Comma-separated database sizes.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["d", "n"])]
    sweep: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PulseArgs {
    #[arg(long)]
    d: usize,
    /// Detuning times pulse width.
    #[arg(long = "deltaT", default_value_t = 0.0, value_parser = parse_finite, allow_hyphen_values = true)]
    delta_t: f64,
    /// Pulse area in radians.
    #[arg(long, default_value_t = 2.0 * PI, value_parser = parse_radians)]
    area: f64,
    #[arg(long, value_enum, default_value = "sech")]
    shape: Shape,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_parser = FArg::parse, default_value = "householder")]
    f: FArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Fully resolved `search` invocation.
#[derive(Debug)]
struct SearchRequest {
    shape: QuditShape,
    marked: Vec<usize>,
    swept: bool,
    schedule: SearchSchedule,
    f: FArg,
    diffusion: Diffusion,
    format: Format,
    out: Option<PathBuf>,
}

fn load_config(path: &Path) -> CliResult<SearchFile> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

fn resolve_search(args: SearchArgs) -> CliResult<SearchRequest> {
    let file = match &args.config {
        Some(path) => load_config(path)?,
        None => SearchFile::default(),
    };
    let d = args.d.or(file.d).ok_or_else(|| usage("--d is required"))?;
    let n = args.n.or(file.n).ok_or_else(|| usage("--n is required"))?;
    let shape = QuditShape::new(d, n)?;

    let (marked, swept) = match (args.marked, args.sweep) {
        (Some(m), _) => (vec![m], false),
        (None, Some(list)) => (list, true),
        (None, None) => match (file.marked, file.sweep) {
            (Some(_), Some(_)) => return Err(usage("config sets both marked and sweep")),
            (Some(m), None) => (vec![m], false),
            (None, Some(list)) => (list, true),
            (None, None) => (vec![0], false),
        },
    };
    if marked.is_empty() {
        return Err(usage("--sweep needs at least one marked index"));
    }
    for &m in &marked {
        shape.index(m)?;
    }

    let mode = args.mode.or(file.mode).unwrap_or(Mode::Deterministic);
    let phi = args.phi.or(file.phi);
    let steps = args.steps.or(file.steps);
    let size = shape.size();
    let schedule = match mode {
        Mode::Deterministic | Mode::Pi if phi.is_some() => {
            return Err(usage("--phi is only meaningful with --mode custom"));
        }
        Mode::Deterministic => deterministic_schedule(size)?,
        Mode::Pi => canonical_schedule(size)?,
        Mode::Custom => {
            let phi = phi.ok_or_else(|| usage("--mode custom requires --phi"))?;
            let default_steps = canonical_schedule(size)?.steps;
            custom_schedule(size, phi, default_steps)?
        }
    };
    let schedule = match steps {
        Some(k) => schedule.with_steps(k),
        None => schedule,
    };

    let f = match (args.f, file.f) {
        (Some(f), _) => f,
        (None, Some(s)) => FArg::parse(&s).map_err(usage)?,
        (None, None) => FArg::Householder,
    };
    Ok(SearchRequest {
        shape,
        marked,
        swept,
        schedule,
        f,
        diffusion: args.diffusion.or(file.diffusion).unwrap_or(Diffusion::Direct),
        format: args.format.or(file.format).unwrap_or(Format::Csv),
        out: args.out.or(file.out),
    })
}

fn search(args: SearchArgs) -> CliResult<()> {
    let req = resolve_search(args)?;
    let f = req.f.choice(req.shape.d())?;
    let diffusion = match req.diffusion {
        Diffusion::Direct => DiffusionPath::Direct,
        Diffusion::Gates => DiffusionPath::ViaGates,
    };
    let runs = req
        .marked
        .par_iter()
        .map(|&m| {
            let cfg = ExperimentConfig::new(req.shape, req.shape.index(m)?, req.schedule)?
                .with_f(f.clone())
                .with_diffusion(diffusion);
            run_search(&cfg).map(|t| (m, t))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let text = match req.format {
        Format::Csv => {
            let mut s = String::from(if req.swept { "marked,step,population\n" } else { "step,population\n" });
            for (m, t) in &runs {
                for (k, p) in t.populations.iter().enumerate() {
                    if req.swept {
                        s.push_str(&format!("{m},"));
                    }
                    s.push_str(&format!("{k},{}\n", sig(*p, DIGITS)));
                }
            }
            s
        }
        Format::Json => {
            let docs: Vec<_> = runs
                .iter()
                .map(|(m, t)| {
                    json!({
                        "config": {
                            "d": req.shape.d(),
                            "n": req.shape.n(),
                            "marked": m,
                            "f": req.f.to_string(),
                            "diffusion": req.diffusion,
                        },
                        "schedule": req.schedule,
                        "trajectory": t.populations,
                        "peak_step": t.peak_step,
                        "peak_population": t.peak_population,
                    })
                })
                .collect();
            let doc = if req.swept { json!(docs) } else { docs.into_iter().next().expect("one run") };
            to_json(&doc)
        }
    };
    emit(&text, req.out.as_deref())
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    write_output(text, out).map_err(|e| CliError::Runtime(format!("cannot write output: {e}")))
}

fn schedule(args: ScheduleArgs) -> CliResult<()> {
    let (sizes, swept) = match (args.size, args.d, args.n, args.sweep) {
        (Some(size), ..) => (vec![size], false),
        (None, Some(d), Some(n), _) => (vec![QuditShape::new(d, n)?.size()], false),
        (None, _, _, Some(list)) if !list.is_empty() => (list, true),
        _ => return Err(usage("give --N, --d and --n, or --sweep")),
    };
    let rows = sizes
        .par_iter()
        .map(|&size| Ok((deterministic_schedule(size)?, canonical_schedule(size)?.steps)))
        .collect::<qudit_search::Result<Vec<_>>>()?;

    let text = match args.format {
        Format::Csv => {
            let mut s = String::from("N,beta,j,phi,n_g,canonical_steps\n");
            for (sch, canonical) in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    sch.n_items,
                    sig(sch.beta, DIGITS),
                    sch.j,
                    sig(sch.phi, DIGITS),
                    sch.steps,
                    canonical
                ));
            }
            s
        }
        Format::Json => {
            let docs: Vec<_> = rows
                .iter()
                .map(|(sch, canonical)| {
                    json!({
                        "N": sch.n_items,
                        "beta": sch.beta,
                        "j": sch.j,
                        "phi": sch.phi,
                        "n_g": sch.steps,
                        "canonical_steps": canonical,
                    })
                })
                .collect();
            let doc = if swept { json!(docs) } else { docs.into_iter().next().expect("one row") };
            to_json(&doc)
        }
    };
    emit(&text, args.out.as_deref())
}

fn pulse(args: PulseArgs) -> CliResult<()> {
    let shape = match args.shape {
        Shape::Sech => PulseShape::Sech,
        Shape::Gaussian => PulseShape::Gaussian,
    };
    let job = PulseJob::new(coupling_design(args.d)?.as_complex(), args.delta_t, 1.0, shape, args.area)?;
    let report = pulse_check(&job)?;
    let text = match args.format {
        Format::Csv => {
            let analytic = report.analytic_phase.map(|p| sig(p, DIGITS)).unwrap_or_default();
            format!(
                "d,delta_t,area,shape,phi,phi_analytic,residual,leakage,unitarity_defect\n{},{},{},{},{},{},{},{},{}\n",
                report.d,
                sig(report.detuning_t, DIGITS),
                sig(report.area, DIGITS),
                match args.shape {
                    Shape::Sech => "sech",
                    Shape::Gaussian => "gaussian",
                },
                sig(report.phase, DIGITS),
                analytic,
                sig(report.residual, DIGITS),
                sig(report.leakage, DIGITS),
                sig(report.unitarity_defect, DIGITS),
            )
        }
        Format::Json => to_json(&serde_json::to_value(&report).expect("report serializes")),
    };
    emit(&text, args.out.as_deref())?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("reflection fit residual {:.3e} exceeds tolerance", report.residual)))
    }
}

fn validate(args: ValidateArgs) -> CliResult<()> {
    let gate = args.f.choice(args.d)?.build(args.d)?;
    let report = validate_f(gate.matrix())?;
    let text = match args.format {
        Format::Csv => format!(
            "d,f,unitarity_defect,column_moduli_deviation,pass\n{},{},{},{},{}\n",
            report.d,
            args.f,
            sig(report.unitarity_defect, DIGITS),
            sig(report.column_moduli_deviation, DIGITS),
            report.pass
        ),
        Format::Json => {
            let mut value = serde_json::to_value(report).expect("report serializes");
            value["f"] = json!(args.f.to_string());
            to_json(&value)
        }
    };
    emit(&text, args.out.as_deref())?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("{} fails validation for d = {}", args.f, args.d)))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Search(args) => search(args),
        Command::Schedule(args) => schedule(args),
        Command::PulseCheck(args) => pulse(args),
        Command::ValidateF(args) => validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
