//! Command-line front end.
//!
//! Exit codes: 0 success, 2 net budget exhausted or vacuous threshold,
//! 3 invalid device, 4 certificate precondition failure, 1 anything else
//! (including a certificate that does not pass).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::bounds::{self, BoundParams};
use crate::device::{self, ProgrammableDevice};
use crate::error::Error;
use crate::io::{self, DeviceFile, IoError, NetFile, ProgramsFile};
use crate::linalg::PureState;
use crate::packing::{self, DEFAULT_STOP_AFTER};
use crate::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_INVALID_DEVICE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "upmlab", version, about = "Lower-bound laboratory for programmable quantum measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a separated net of pure states (or the raw sphere packing).
    Net(NetArgs),
    /// Tabulate closed-form ancilla-dimension bounds.
    Bound(BoundArgs),
    /// Search programs for every target of a net and report the worst error.
    Eval(EvalArgs),
    /// Run the rank certificate on a device, net and program list.
    Certify(CertifyArgs),
    /// Net size and bounds across a grid of errors.
    Scaling(ScalingArgs),
    /// Write a device file (and optionally its exact programs).
    Device(DeviceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Root seed for every random draw.
    #[arg(long, env = "UPM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override, `name=value` (povm, eig_residual, rank_cutoff, arithmetic, strict_slack).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NetArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = DEFAULT_STOP_AFTER)]
    pub stop_after: usize,
    /// Emit the underlying real sphere packing instead of the state net.
    #[arg(long)]
    pub raw: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long, conflicts_with = "delta_grid")]
    pub delta: Option<f64>,
    /// `start:end:log10` or `start:end:linear[:count]`.
    #[arg(long)]
    pub delta_grid: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub device: PathBuf,
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub device: PathBuf,
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub programs: PathBuf,
    #[arg(long)]
    pub delta: f64,
    /// POVM element anchoring the argument (0-based).
    #[arg(long, default_value_t = 0)]
    pub element: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_grid: String,
    #[arg(long, default_value_t = DEFAULT_STOP_AFTER)]
    pub stop_after: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeviceKind {
    /// One stored observable per net state, selected by basis programs.
    Clock,
    /// `F^j = 1/d`, independent of the program.
    Trivial,
    /// Random POVM on the joint space.
    Random,
}

#[derive(Debug, Args)]
pub struct DeviceArgs {
    #[arg(long, value_enum)]
    pub kind: DeviceKind,
    /// Net file (clock devices).
    #[arg(long)]
    pub net: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Where to write the exact programs of a clock device.
    #[arg(long)]
    pub programs_out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Settings resolved from the flags shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_common(c: &CommonArgs) -> Result<Self, CliError> {
        let mut tol = Tolerances::default();
        for spec in &c.tol {
            let (name, value) = spec
                .split_once('=')
                .ok_or_else(|| CliError::other(format!("tolerance `{spec}` is not NAME=VALUE")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| CliError::other(format!("tolerance `{spec}` has a non-numeric value")))?;
            if !(value >= 0.0) {
                return Err(CliError::other(format!("tolerance `{spec}` must be nonnegative")));
            }
            let slot = match name {
                "povm" => &mut tol.povm,
                "eig_residual" => &mut tol.eig_residual,
                "rank_cutoff" => &mut tol.rank_cutoff,
                "arithmetic" => &mut tol.arithmetic,
                "strict_slack" => &mut tol.strict_slack,
                _ => return Err(CliError::other(format!("unknown tolerance `{name}`"))),
            };
            *slot = value;
        }
        Ok(Self { seed: c.seed, tolerances: tol, out: c.out.clone() })
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    fn other(message: impl Into<String>) -> Self {
        Self::new(EXIT_OTHER, message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::other(e.to_string())
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        Self::other(e.to_string())
    }
}

/// Output produced by a command: the artifact text and its exit code.
struct Output {
    text: String,
    code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_OTHER } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok((out, cfg)) => {
            if let Err(e) = emit(&out.text, cfg.out.as_deref(), stdout) {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_OTHER;
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

fn dispatch(cmd: &Command) -> Result<(Output, RunConfig), CliError> {
    match cmd {
        Command::Net(a) => {
            let cfg = RunConfig::from_common(&a.common)?;
            Ok((cmd_net(a, &cfg)?, cfg))
        }
        Command::Bound(a) => {
            let cfg = RunConfig::from_common(&a.common)?;
            Ok((cmd_bound(a)?, cfg))
        }
        Command::Eval(a) => {
            let cfg = RunConfig::from_common(&a.common)?;
            Ok((cmd_eval(a, &cfg)?, cfg))
        }
        Command::Certify(a) => {
            let cfg = RunConfig::from_common(&a.common)?;
            Ok((cmd_certify(a, &cfg)?, cfg))
        }
        Command::Scaling(a) => {
            let cfg = RunConfig::from_common(&a.common)?;
            Ok((cmd_scaling(a, &cfg)?, cfg))
        }
        Command::Device(a) => {
            let cfg = RunConfig::from_common(&a.common)?;
            Ok((cmd_device(a, &cfg)?, cfg))
        }
    }
}

fn net_error(e: Error) -> CliError {
    match e {
        Error::VacuousThreshold { .. } | Error::BudgetExhausted { .. } => CliError::new(EXIT_BUDGET, e.to_string()),
        other => other.into(),
    }
}

fn cmd_net(a: &NetArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    if a.raw {
        let raw = raw_packing(a.d, a.delta, cfg.seed, a.stop_after).map_err(net_error)?;
        return Ok(Output { text: io::to_json(&raw), code: EXIT_OK });
    }
    let net = packing::build_state_net(a.d, a.delta, cfg.seed, a.stop_after).map_err(net_error)?;
    Ok(Output { text: io::to_json(&NetFile::from_net(&net)), code: EXIT_OK })
}

/// The sphere packing `net` builds its states from, with the same budget rule.
fn raw_packing(d: usize, delta: f64, seed: u64, stop_after: usize) -> crate::Result<packing::PackingNet> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("state nets need d >= 2, got {d}")));
    }
    let t = bounds::net_threshold(d as u32, delta);
    if t.vacuous {
        return Err(Error::VacuousThreshold { threshold: t.value });
    }
    let target = packing::state_net_target(d, delta)?;
    if d == 2 {
        let min_dist = (4.0 * t.value).min(1.0 + t.value);
        packing::certified_packing(3, min_dist, seed, stop_after, false, target)
    } else {
        let min_dist = 2.0 * t.value * (1.0 + packing::SEPARATION_MARGIN);
        packing::certified_packing(d, min_dist, seed, stop_after, true, 2.0 * target)
    }
}

/// Parses `start:end:log10` (one point per decade) or `start:end:linear[:count]`
/// (default 10 points). An empty string is the empty grid.
pub fn parse_delta_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::other(format!("invalid delta grid `{spec}`"));
    if parts.len() < 3 || parts.len() > 4 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let end: f64 = parts[1].parse().map_err(|_| bad())?;
    if !(start > 0.0 && end > 0.0) {
        return Err(CliError::other(format!("delta grid `{spec}` needs positive endpoints")));
    }
    match parts[2] {
        "log10" => {
            if parts.len() != 3 {
                return Err(bad());
            }
            let decades = (end / start).log10();
            let steps = decades.abs().round();
            if (decades.abs() - steps).abs() > 1e-9 {
                return Err(CliError::other(format!("log10 grid `{spec}` must span whole decades")));
            }
            let sign = if decades < 0.0 { -1 } else { 1 };
            // shift the decimal exponent so grid points parse exactly
            let text = format!("{start:e}");
            let (mantissa, exp) = text.split_once('e').ok_or_else(bad)?;
            let exp: i32 = exp.parse().map_err(|_| bad())?;
            (0..=steps as i32)
                .map(|k| format!("{mantissa}e{}", exp + sign * k).parse::<f64>().map_err(|_| bad()))
                .collect()
        }
        "linear" => {
            let count: usize = match parts.get(3) {
                Some(c) => c.parse().map_err(|_| bad())?,
                None => 10,
            };
            Ok(match count {
                0 => Vec::new(),
                1 => vec![start],
                _ => (0..count).map(|k| start + (end - start) * k as f64 / (count - 1) as f64).collect(),
            })
        }
        _ => Err(bad()),
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_bound(a: &BoundArgs) -> Result<Output, CliError> {
    let deltas = match (&a.delta, &a.delta_grid) {
        (Some(d), None) => vec![*d],
        (None, Some(g)) => parse_delta_grid(g)?,
        _ => return Err(CliError::other("bound needs exactly one of --delta or --delta-grid")),
    };
    let mut text = String::from("d,delta,formula,m_bound,threshold,vacuous\n");
    for delta in deltas {
        let row = BoundParams::new(a.d, delta)?.evaluate()?;
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            row.d,
            fmt_f64(row.delta),
            row.formula.as_str(),
            row.m_bound,
            fmt_f64(row.threshold),
            row.vacuous
        );
    }
    Ok(Output { text, code: EXIT_OK })
}

fn load_device(path: &Path, tol: &Tolerances) -> Result<ProgrammableDevice, CliError> {
    let file: DeviceFile = io::read_json(path)?;
    file.to_device(tol.povm)
        .map_err(|e| CliError::new(EXIT_INVALID_DEVICE, format!("{}: invalid device: {e}", path.display())))
}

fn load_net(path: &Path, code: i32) -> Result<packing::StateNet, CliError> {
    let file: NetFile = io::read_json(path)?;
    file.to_net().map_err(|e| match e {
        Error::ThresholdViolated { .. } => CliError::new(code, format!("{}: {e}", path.display())),
        other => CliError::other(format!("{}: {other}", path.display())),
    })
}

fn cmd_eval(a: &EvalArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    let dev = load_device(&a.device, &cfg.tolerances)?;
    let net = load_net(&a.net, EXIT_OTHER)?;
    let report = device::evaluate_upm(&dev, &net, a.restarts, cfg.seed)?;
    Ok(Output { text: io::to_json(&report), code: EXIT_OK })
}

fn cmd_certify(a: &CertifyArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    let dev = load_device(&a.device, &cfg.tolerances)?;
    let net = load_net(&a.net, EXIT_PRECONDITION)?;
    let programs_file: ProgramsFile = io::read_json(&a.programs)?;
    let programs = programs_file.to_programs()?;
    if programs.len() != net.count() {
        return Err(CliError::new(
            EXIT_PRECONDITION,
            format!("{} programs supplied for a net of {} states", programs.len(), net.count()),
        ));
    }
    let opts = device::CertificateOptions { element: a.element, tolerances: cfg.tolerances };
    let cert = device::theorem1_certificate_with(&dev, &net, a.delta, &programs, &opts).map_err(|e| match e {
        Error::ThresholdViolated { .. } | Error::DimensionMismatch { .. } => {
            CliError::new(EXIT_PRECONDITION, e.to_string())
        }
        other => other.into(),
    })?;
    let code = if cert.pass { EXIT_OK } else { EXIT_OTHER };
    Ok(Output { text: io::to_json(&cert), code })
}

fn cmd_scaling(a: &ScalingArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    let deltas = parse_delta_grid(&a.delta_grid)?;
    if a.d < 2 {
        return Err(CliError::other(format!("scaling needs d >= 2, got {}", a.d)));
    }
    let rows: Vec<String> = deltas
        .par_iter()
        .map(|&delta| scaling_row(a.d, delta, cfg.seed, a.stop_after))
        .collect();
    let mut text = String::from("delta,A,m_bound_net,m_bound_formula,threshold,min_pairwise_D,status\n");
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    Ok(Output { text, code: EXIT_OK })
}

fn scaling_row(d: usize, delta: f64, seed: u64, stop_after: usize) -> String {
    let threshold = bounds::net_threshold(d as u32, delta).value;
    let formula = BoundParams::new(d as u32, delta).and_then(|p| p.evaluate()).map(|r| r.m_bound);
    let net = packing::build_state_net(d, delta, seed, stop_after);
    match (net, formula) {
        (Ok(net), Ok(formula)) => {
            let a = net.count() as u64;
            let m_net = bounds::theorem1_bound(a, d as u64).unwrap_or(0);
            format!(
                "{},{},{},{},{},{},ok",
                fmt_f64(delta),
                a,
                m_net,
                formula,
                fmt_f64(threshold),
                fmt_f64(net.min_pairwise_d)
            )
        }
        (Err(e), _) | (_, Err(e)) => {
            let status = match e {
                Error::VacuousThreshold { .. } => "vacuous".to_string(),
                Error::BudgetExhausted { .. } => "budget_exhausted".to_string(),
                other => format!("error: {}", other.to_string().replace(',', ";")),
            };
            format!("{},,,,{},,{}", fmt_f64(delta), fmt_f64(threshold), status)
        }
    }
}

fn cmd_device(a: &DeviceArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| CliError::other(format!("--{name} is required")));
    let dev = match a.kind {
        DeviceKind::Clock => {
            let path = a.net.as_ref().ok_or_else(|| CliError::other("--net is required for clock devices"))?;
            let net = load_net(path, EXIT_OTHER)?;
            let dev = ProgrammableDevice::clock_for_net(&net, cfg.seed)?;
            if let Some(p) = &a.programs_out {
                let programs: Vec<PureState> = (0..net.count()).map(|k| PureState::basis(net.count(), k)).collect();
                std::fs::write(p, io::to_json(&ProgramsFile::from_programs(net.count(), &programs)))
                    .map_err(|e| CliError::other(format!("{}: {e}", p.display())))?;
            }
            dev
        }
        DeviceKind::Trivial => {
            let d = need(a.d, "d")?;
            ProgrammableDevice::trivial(d, need(a.m, "m")?, d)?
        }
        DeviceKind::Random => {
            let d = need(a.d, "d")?;
            ProgrammableDevice::random(d, need(a.m, "m")?, d, cfg.seed)?
        }
    };
    Ok(Output { text: io::to_json(&DeviceFile::from_device(&dev)), code: EXIT_OK })
}
