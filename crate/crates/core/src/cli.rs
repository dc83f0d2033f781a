//! Command-line front end. Exit codes: 0 success, 2 invalid input, 1 analysis failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::abtmac::{self, AbtmacParams};
use crate::analytic::{evaluate, ModelPoint};
use crate::design::{
    admissible_band, dominant_pole_distance, minimize_overhead, optimal_payload, recommended_rate,
    tolerable_ratio_bounds, DEFAULT_DELAY_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::legacy::DcfParams;
use crate::report::{self, PayloadChoice, Units};
use crate::scenario::{load_timing, Scenario};
use crate::sim::{self, PayloadModel, Policy, SimConfig};
use crate::timing::{AccessMode, TimingParams};

#[derive(Debug, Parser)]
#[command(
    name = "abtmac",
    version,
    about = "802.11 DCF backoff tuning: model, design and simulation"
)]
pub struct Cli {
    /// Base seed for simulations (overrides the scenario file)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for CSV artifacts; CSV goes to stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with a [timing] table
    #[arg(long, global = true)]
    pub timing_config: Option<PathBuf>,
    /// Unit for delays in the output
    #[arg(long, global = true, default_value = "slots", value_parser = ["slots", "us"])]
    pub units: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fluid-model metrics over a rate sweep
    Analyze(SweepArgs),
    /// Dominant-pole distance over a rate sweep
    Stability(SweepArgs),
    /// Robustness tables with and without RTS/CTS, next to reference values
    Tables {
        /// 2 = with RTS/CTS, 3 = without; both when omitted
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        table: Option<u8>,
    },
    /// Recommended operating point and CW_min per station count
    Design {
        #[arg(long, default_value = "rts")]
        mode: String,
        /// Override the recommended rate
        #[arg(long)]
        lambda: Option<f64>,
        /// Station counts, `a:b:step` or `a:b`
        #[arg(long, default_value = "10:100:10")]
        m: String,
        /// Also print the intermediate values of the CW_min procedure
        #[arg(long)]
        abtmac: bool,
    },
    /// Legacy DCF self-consistent rate against ABTMAC, per station count
    Baseline {
        #[arg(long, default_value = "10:100:10")]
        m: String,
        #[arg(long, default_value_t = 34.0)]
        payload: f64,
    },
    /// Run the contention simulator
    Simulate(SimulateArgs),
    /// Print version and random-number generator identifier
    Version,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "rts")]
    pub mode: String,
    /// `start:end:step` or a single rate
    #[arg(long, default_value = "0.1:1.0:0.01")]
    pub lambda: String,
    /// Payload in slots, or `balanced` for the collision/idle balanced payload
    /// of each rate (basic access). Default: 34 with RTS/CTS, balanced without.
    #[arg(long)]
    pub payload: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML scenario; flags below are ignored when given
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub m: u32,
    #[arg(long, default_value = "rts")]
    pub mode: String,
    /// abtmac | legacy
    #[arg(long, default_value = "abtmac")]
    pub policy: String,
    /// ABTMAC target rate; defaults to the recommended rate of the mode
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 34.0)]
    pub payload: f64,
    /// slots
    #[arg(long, default_value_t = 1.0e6)]
    pub duration: f64,
    /// Overrides the scenario's replication count
    #[arg(long)]
    pub replications: Option<u32>,
    /// Run the estimation-error and payload sensitivity experiments
    #[arg(long)]
    pub sensitivity: bool,
    /// Write the first replicate's channel events as JSON lines
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn execute<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

struct Ctx<'a> {
    out: Option<&'a Path>,
    units: Units,
    timing: TimingParams,
    timing_overridden: bool,
}

impl Ctx<'_> {
    fn emit<T: Serialize>(&self, stdout: &mut dyn Write, name: &str, rows: &[T]) -> Result<()> {
        match self.out {
            Some(dir) => {
                std::fs::create_dir_all(dir)
                    .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
                let path = dir.join(name);
                report::write_csv_file(&path, rows)?;
                writeln!(stdout, "wrote {}", path.display())?;
                Ok(())
            }
            None => report::write_csv(&mut *stdout, rows),
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let (timing, timing_overridden) = match &cli.timing_config {
        Some(p) => (load_timing(p)?, true),
        None => (TimingParams::default(), false),
    };
    let ctx = Ctx {
        out: cli.out.as_deref(),
        units: cli.units.parse()?,
        timing,
        timing_overridden,
    };
    let d = ctx.timing.slot_durations()?;
    match &cli.command {
        Command::Analyze(a) => {
            let (mode, grid, payload) = sweep_inputs(a)?;
            let rows: Vec<_> = report::analyze_sweep(&grid, mode, payload, &d)?
                .into_iter()
                .map(|r| r.in_units(ctx.units, &ctx.timing))
                .collect();
            ctx.emit(stdout, "analyze.csv", &rows)
        }
        Command::Stability(a) => {
            let (mode, grid, payload) = sweep_inputs(a)?;
            let rows = report::stability_sweep(&grid, mode, payload, &d)?;
            ctx.emit(stdout, "stability.csv", &rows)
        }
        Command::Tables { table } => {
            if table.is_none_or(|t| t == 2) {
                let mut rows = report::rts_table(&d)?;
                for r in &mut rows {
                    r.delay = ctx.units.apply(r.delay, &ctx.timing);
                    r.reference_delay = ctx.units.apply(r.reference_delay, &ctx.timing);
                    r.delay_delta = r.delay - r.reference_delay;
                }
                ctx.emit(stdout, "table2.csv", &rows)?;
            }
            if table.is_none_or(|t| t == 3) {
                let mut rows = report::basic_table(&d)?;
                for r in &mut rows {
                    r.delay = ctx.units.apply(r.delay, &ctx.timing);
                    r.reference_delay = ctx.units.apply(r.reference_delay, &ctx.timing);
                    r.delay_delta = r.delay - r.reference_delay;
                }
                ctx.emit(stdout, "table3.csv", &rows)?;
            }
            Ok(())
        }
        Command::Design {
            mode,
            lambda,
            m,
            abtmac,
        } => design(&ctx, stdout, mode, *lambda, m, *abtmac),
        Command::Baseline { m, payload } => {
            let stations = report::parse_int_range("m", m)?;
            let mut rows = report::baseline_sweep(&stations, *payload, &DcfParams::default(), &d)?;
            for r in &mut rows {
                for v in [
                    &mut r.legacy_delay_rts,
                    &mut r.legacy_delay_basic,
                    &mut r.abtmac_delay_rts,
                    &mut r.abtmac_delay_basic,
                ] {
                    *v = ctx.units.apply(*v, &ctx.timing);
                }
            }
            ctx.emit(stdout, "baseline.csv", &rows)
        }
        Command::Simulate(a) => simulate(&ctx, stdout, a, cli.seed),
        Command::Version => {
            writeln!(stdout, "abtmac {}", env!("CARGO_PKG_VERSION"))?;
            writeln!(stdout, "rng {}", sim::RNG_ALGORITHM)?;
            Ok(())
        }
    }
}

fn parse_mode(s: &str) -> Result<AccessMode> {
    s.parse()
}

fn sweep_inputs(a: &SweepArgs) -> Result<(AccessMode, Vec<f64>, PayloadChoice)> {
    let mode = parse_mode(&a.mode)?;
    let grid = report::parse_sweep(&a.lambda)?;
    let payload = match a.payload.as_deref() {
        None if mode == AccessMode::BasicAccess => PayloadChoice::Balanced,
        None => PayloadChoice::Fixed(34.0),
        Some("balanced") => PayloadChoice::Balanced,
        Some(s) => PayloadChoice::Fixed(s.parse().map_err(|_| {
            Error::invalid(
                "payload",
                format!("expected slots or `balanced`, got `{s}`"),
            )
        })?),
    };
    Ok((mode, grid, payload))
}

#[derive(Debug, Serialize)]
struct CwRow {
    station_count: u32,
    mean_backoff: f64,
    transmit_probability: f64,
    mean_window: f64,
    cw_min_exact: f64,
    cw_min: u32,
}

fn design(
    ctx: &Ctx,
    stdout: &mut dyn Write,
    mode: &str,
    lambda: Option<f64>,
    m: &str,
    verbose: bool,
) -> Result<()> {
    let mode = parse_mode(mode)?;
    let d = ctx.timing.slot_durations()?;
    let (rec_lambda, rec_payload) = recommended_rate(mode);
    let lambda = lambda.unwrap_or(rec_lambda);
    let payload = match mode {
        AccessMode::BasicAccess if lambda == rec_lambda => rec_payload.unwrap_or(34.0),
        AccessMode::BasicAccess => optimal_payload(lambda, &d)?.round(),
        AccessMode::RtsCts => 34.0,
    };
    let pt = ModelPoint::new(lambda, payload, mode)?;
    let metrics = evaluate(&pt, &d)?;
    let pole = dominant_pole_distance(&pt, &d)?;
    let bounds = tolerable_ratio_bounds(&pt, &d, DEFAULT_DELAY_TOLERANCE)?;
    let (lo, hi) = admissible_band(mode);
    let joint = minimize_overhead(mode, None, &d)?;

    let u = ctx.units;
    writeln!(stdout, "mode = {mode}")?;
    writeln!(stdout, "lambda = {lambda}")?;
    match mode {
        AccessMode::BasicAccess => writeln!(
            stdout,
            "payload = {payload} slots (balanced {:.2})",
            optimal_payload(lambda, &d)?
        )?,
        AccessMode::RtsCts => writeln!(stdout, "payload = {payload} slots")?,
    }
    writeln!(stdout, "admissible rate band = [{lo}, {hi}]")?;
    writeln!(stdout, "throughput = {:.4}", metrics.throughput)?;
    writeln!(
        stdout,
        "mean access delay = {:.3} {}",
        u.apply(metrics.delay, &ctx.timing),
        u.label()
    )?;
    writeln!(stdout, "pole distance = {:.5} 1/slot", pole.pole_distance)?;
    writeln!(
        stdout,
        "tolerable estimate ratio = [{:.3}, {:.3}] at {}% delay growth",
        bounds.min_ratio,
        bounds.max_ratio,
        DEFAULT_DELAY_TOLERANCE * 100.0
    )?;
    match joint.payload {
        Some(x) => writeln!(
            stdout,
            "overhead minimum: lambda = {:.4}, payload = {:.2}, overhead = {:.3}",
            joint.lambda, x, joint.overhead
        )?,
        None => writeln!(
            stdout,
            "overhead minimum: lambda = {:.4}, overhead = {:.3}",
            joint.lambda, joint.overhead
        )?,
    }

    let params = AbtmacParams::with_target(lambda);
    let mut rows = Vec::new();
    for count in report::parse_int_range("m", m)? {
        let exact = abtmac::cw_min_exact(&params, count)?;
        let cw = abtmac::cw_min(&params, count)?;
        let b = count as f64 / lambda;
        rows.push(CwRow {
            station_count: count,
            mean_backoff: b,
            transmit_probability: 1.0 / (b + 1.0),
            mean_window: 2.0 * b + 1.0,
            cw_min_exact: exact,
            cw_min: cw,
        });
    }
    for r in &rows {
        if verbose {
            writeln!(
                stdout,
                "M = {}: b = {:.3}, P_t = {:.5}, E[CW] = {:.3}, bound = {:.3}, CW_min = {}",
                r.station_count,
                r.mean_backoff,
                r.transmit_probability,
                r.mean_window,
                r.cw_min_exact,
                r.cw_min
            )?;
        } else {
            writeln!(stdout, "M = {}: CW_min = {}", r.station_count, r.cw_min)?;
        }
    }
    if ctx.out.is_some() {
        ctx.emit(stdout, "design.csv", &rows)?;
    }
    Ok(())
}

fn simulate(ctx: &Ctx, stdout: &mut dyn Write, a: &SimulateArgs, seed: Option<u64>) -> Result<()> {
    let (mut cfg, scenario_reps) = match &a.config {
        Some(path) => {
            let s = Scenario::load(path)?;
            (s.sim_config()?, s.sim.replications)
        }
        None => {
            let mode = parse_mode(&a.mode)?;
            let policy = match a.policy.as_str() {
                "abtmac" => Policy::abtmac(a.lambda.unwrap_or(recommended_rate(mode).0)),
                "legacy" if a.lambda.is_some() => {
                    return Err(Error::invalid(
                        "lambda",
                        "the legacy policy has no target rate",
                    ))
                }
                "legacy" => Policy::legacy(),
                other => {
                    return Err(Error::invalid(
                        "policy",
                        format!("expected `abtmac` or `legacy`, got `{other}`"),
                    ))
                }
            };
            let mut c =
                SimConfig::saturated(a.m, mode, policy, a.payload).with_duration(a.duration);
            c.payload = PayloadModel::fixed(a.payload);
            (c, 1)
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if ctx.timing_overridden {
        cfg.timing = ctx.timing;
    }
    cfg.validate()?;
    let reps = a.replications.unwrap_or(scenario_reps);
    if reps < 1 {
        return Err(Error::invalid("replications", "must be at least 1"));
    }

    if let Some(path) = &a.trace {
        let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(f);
        sim::run_traced(&cfg, &mut w)?;
        w.flush()?;
    }

    if a.sensitivity {
        let n = reps.max(2);
        let table =
            sim::sensitivity_suite(&cfg, &[0.5, 1.0, 1.5], &[34.0, 102.0, 410.0, 820.0], n)?;
        return ctx.emit(stdout, "sensitivity.csv", &report::sensitivity_rows(&table));
    }

    if reps == 1 {
        let m = sim::run(&cfg)?;
        let row = report::SimRow::new(&cfg, 0, &m, ctx.units);
        return ctx.emit(stdout, "simulate.csv", &[row]);
    }
    let r = sim::run_replicated(&cfg, reps)?;
    let rows: Vec<_> = r
        .runs
        .iter()
        .enumerate()
        .map(|(i, m)| report::SimRow::new(&cfg, i as u32, m, ctx.units))
        .collect();
    ctx.emit(stdout, "simulate.csv", &rows)?;
    let summary = report::summary_rows(&r, ctx.units, &cfg.timing);
    match ctx.out {
        Some(_) => ctx.emit(stdout, "summary.csv", &summary),
        None => {
            writeln!(stdout)?;
            report::write_csv(&mut *stdout, &summary)
        }
    }
}
