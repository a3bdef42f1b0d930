use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fasris_cli::{output, sweep, CliResult, Mode, SweepSpec};
use fasris_core::analytic::QuadratureOrders;

#[derive(Parser, Debug)]
#[command(
    name = "fasris",
    version,
    about = "Average secure BLER sweeps and validation reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the configured axis and write one CSV row per value.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Add a wall-clock column (ms per point); breaks byte stability.
        #[arg(long)]
        timing: bool,
    },
    /// Compare analytic and Monte Carlo results point by point.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// K-S distance between the CLT gain model and simulated port gains.
    Ks {
        #[command(flatten)]
        common: Common,
    },
    /// High-power ceiling against the full pipeline.
    Ceiling {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Experiment file (key = value); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Monte Carlo draws per point.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Gauss-Chebyshev order used for every integral.
    #[arg(long)]
    order: Option<usize>,
}

impl Common {
    fn spec(&self) -> CliResult<SweepSpec> {
        let mut spec = match &self.config {
            Some(path) => SweepSpec::load(path)?,
            None => SweepSpec::default(),
        };
        if let Some(m) = self.mode {
            spec.mode = m;
        }
        if let Some(n) = self.samples {
            spec.mc_samples = Some(n);
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(o) = self.order {
            spec.orders = QuadratureOrders::uniform(o);
        }
        Ok(spec)
    }

    fn output(&self) -> CliResult<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Sweep { common, timing } => {
            let spec = common.spec()?;
            let rows = sweep::run_sweep(&spec)?;
            let mut out = common.output()?;
            output::write_sweep(&mut out, &spec, &rows, timing)?;
            out.flush()?;
            let mut code = 0;
            for r in &rows {
                if let Some(e) = &r.error {
                    eprintln!("{} = {}: {}", spec.axis, r.value, e.message);
                    code = code.max(if e.numerical { 2 } else { 1 });
                }
            }
            Ok(code)
        }
        Command::Validate { common } => {
            let spec = common.spec()?;
            let checks = sweep::run_validation(&spec)?;
            let mut out = common.output()?;
            output::write_validation(&mut out, &spec, &checks, &spec.points())?;
            out.flush()?;
            let passed = checks
                .iter()
                .filter(|c| matches!(c, Ok(c) if c.pass))
                .count();
            eprintln!(
                "validate: {passed} of {} points within the agreement band",
                checks.len()
            );
            Ok(
                if checks.iter().any(|c| matches!(c, Err(e) if e.numerical)) {
                    2
                } else {
                    0
                },
            )
        }
        Command::Ks { common } => {
            let spec = common.spec()?;
            let rows = sweep::run_ks(&spec)?;
            let mut out = common.output()?;
            output::write_ks(&mut out, &spec, &rows)?;
            out.flush()?;
            Ok(0)
        }
        Command::Ceiling { common } => {
            let spec = common.spec()?;
            let report = sweep::run_ceiling(&spec)?;
            let mut out = common.output()?;
            output::write_ceiling(&mut out, &spec, &report)?;
            out.flush()?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
