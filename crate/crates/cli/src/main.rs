use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twolevel_mimo::beamforming::Codebook;
use twolevel_mimo::geometry::{reflection_height_for_elevation, ScenarioConfig};
use twolevel_mimo::harness::*;
use twolevel_mimo::{Error, Result};

/// Elevation of the reflected path at the default power-sweep height.
const ALIGNED_ELEVATION_DEG: f64 = 14.48;

#[derive(Parser)]
#[command(name = "twolevel", version, about = "Two-level spatial multiplexing mmWave link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured scenario at a single height and power.
    Simulate(SimulateArgs),
    /// Sweep the transmitter/receiver height.
    SweepHeight(HeightArgs),
    /// Sweep the total transmit power.
    SweepPower(PowerArgs),
    /// Print the link budget.
    LinkBudget(ConfigArgs),
    /// Dump the normalized elevation pattern of every codeword.
    Pattern(PatternArgs),
    /// Print the built-in scenario as JSON.
    DefaultConfig,
}

#[derive(Args)]
struct ConfigArgs {
    /// Scenario JSON; the built-in 60 GHz backhaul scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Candidate second-beam phases in radians, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta2: Option<Vec<f64>>,
    /// Reference system "N,P" for the normalized columns.
    #[arg(long)]
    normalize: Option<SystemTag>,
    /// Divide singular values by the reference system's largest one.
    #[arg(long)]
    normalize_sigma: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct HeightArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 5.0)]
    start: f64,
    #[arg(long, default_value_t = 35.0)]
    stop: f64,
    #[arg(long)]
    step: Option<f64>,
    /// Use the 0.5 mm step that resolves the capacity oscillation.
    #[arg(long, conflicts_with = "step")]
    fine_grid: bool,
}

#[derive(Args)]
struct PowerArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    start: f64,
    #[arg(long, default_value_t = 25.0, allow_hyphen_values = true)]
    stop: f64,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Height in meters; defaults to the height where the reflection leaves at 14.48°.
    #[arg(long)]
    height: Option<f64>,
}

#[derive(Args)]
struct PatternArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Angular step in degrees.
    #[arg(long, default_value_t = 0.5)]
    step_deg: f64,
}

fn load(args: &ConfigArgs) -> Result<ScenarioConfig> {
    let cfg = match &args.config {
        Some(path) => load_scenario(path)?,
        None => ScenarioConfig::backhaul_60ghz(),
    };
    for w in cfg.regime_warnings() {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn apply_common(spec: &mut SweepSpec, common: &Common, cfg: &ScenarioConfig) {
    if let Some(b) = &common.beta2 {
        spec.beam_candidates = b.clone();
    }
    spec.normalization = common.normalize.unwrap_or(SystemTag::new(cfg.n_subarrays, 1));
    spec.normalize_singular_values = common.normalize_sigma;
}

fn write_rows(rows: &[SweepRow], out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    write_sweep_csv(rows, &mut w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let c = &args.common;
            let cfg = load(&c.config)?;
            let mut spec = SweepSpec::height(cfg.height, cfg.height, DEFAULT_HEIGHT_STEP);
            apply_common(&mut spec, c, &cfg);
            let rows = run_height_sweep(&cfg, &spec)?;
            if let Some(best) = rows.iter().max_by(|a, b| a.capacity_bps_hz.total_cmp(&b.capacity_bps_hz)) {
                eprintln!(
                    "best beta2 {:.4} rad: {:.4} b/s/Hz ({} streams)",
                    best.beta2_rad.unwrap_or(0.0),
                    best.capacity_bps_hz,
                    best.n_streams
                );
            }
            write_rows(&rows, c.out.as_deref())
        }
        Command::SweepHeight(args) => {
            let c = &args.common;
            let cfg = load(&c.config)?;
            let step = match (args.fine_grid, args.step) {
                (true, _) => FINE_HEIGHT_STEP,
                (false, Some(s)) => s,
                (false, None) => DEFAULT_HEIGHT_STEP,
            };
            let mut spec = SweepSpec::height(args.start, args.stop, step);
            apply_common(&mut spec, c, &cfg);
            write_rows(&run_height_sweep(&cfg, &spec)?, c.out.as_deref())
        }
        Command::SweepPower(args) => {
            let c = &args.common;
            let mut cfg = load(&c.config)?;
            cfg.height = args
                .height
                .unwrap_or_else(|| reflection_height_for_elevation(cfg.link_distance, ALIGNED_ELEVATION_DEG.to_radians()));
            let mut spec = SweepSpec::tx_power(args.start, args.stop, args.step);
            apply_common(&mut spec, c, &cfg);
            write_rows(&run_power_sweep(&cfg, &spec)?, c.out.as_deref())
        }
        Command::LinkBudget(args) => {
            let cfg = load(&args)?;
            write!(io::stdout().lock(), "{}", link_budget_report(&cfg)?)?;
            Ok(())
        }
        Command::Pattern(args) => {
            let cfg = load(&args.config)?;
            if !(args.step_deg.is_finite() && args.step_deg > 0.0) {
                return Err(twolevel_mimo::ConfigError::new("step_deg", "must be finite and > 0").into());
            }
            let rows = pattern_dump(&Codebook::elevation_default(cfg.subarray_side), &cfg.layout(), args.step_deg);
            let mut w = output(args.out.as_deref())?;
            write_pattern_csv(&rows, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::DefaultConfig => {
            writeln!(io::stdout().lock(), "{}", scenario_to_json(&ScenarioConfig::backhaul_60ghz()))?;
            Ok(())
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    if err.is_config() {
        2
    } else if err.is_numerical() {
        3
    } else {
        1
    }
}

/// A closed downstream pipe (e.g. `| head`) is not a failure.
fn is_broken_pipe(err: &Error) -> bool {
    match err {
        Error::Io(e) => e.kind() == io::ErrorKind::BrokenPipe,
        Error::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe),
        _ => false,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
