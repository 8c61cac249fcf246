//! Command-line front end. `run` never exits the process; it returns the exit status so the
//! whole driver can be exercised in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use tfspde_core::special::{mittag_leffler, MLParams};

use crate::config::RunConfig;
use crate::error::AppError;
use crate::experiment::{converge_space, converge_time, default_workers, solve};
use crate::report::{emit_report, solve_report};
use crate::selftest;

#[derive(Debug, Parser)]
#[command(name = "tfspde", version, about = "Exponential-integrator solver for time-fractional stochastic PDEs with jumps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; built-in defaults when absent
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// overrides the configured seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// size of the sample thread pool (results do not depend on it)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// output directory; overrides `[output] dir`
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one sample path and write the trajectory
    Solve,
    /// Strong-error study over a ladder of step sizes
    ConvergeTime,
    /// Strong-error study over a ladder of nested meshes
    ConvergeSpace,
    /// Evaluate E_{alpha,beta}(z)
    Mlf {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// Run the built-in consistency checks
    Selftest,
}

fn load(cli: &Cli) -> Result<RunConfig, AppError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.clone();
    }
    Ok(cfg)
}

fn say(out: &mut dyn Write, line: impl std::fmt::Display) -> Result<(), AppError> {
    writeln!(out, "{line}").map_err(|e| AppError::io("<stdout>", e))
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), AppError> {
    let workers = cli.workers.unwrap_or_else(default_workers);
    match &cli.command {
        Command::Mlf { alpha, beta, z } => {
            let p = MLParams::new(*alpha, *beta).map_err(AppError::validation)?;
            say(out, mittag_leffler(p, *z)?)
        }
        Command::Selftest => {
            let checks = selftest::run_all();
            let failed = checks.iter().filter(|c| !c.pass).count();
            for c in &checks {
                say(out, c)?;
            }
            let total: f64 = checks.iter().map(|c| c.seconds).sum();
            say(out, format!("{} checks, {failed} failed, {total:.1}s", checks.len()))?;
            if failed > 0 {
                return Err(AppError::Failed(format!("{failed} self-test check(s) failed")));
            }
            Ok(())
        }
        Command::Solve => {
            let cfg = load(cli)?;
            let outcome = solve(&cfg)?;
            if !outcome.advisory.pass {
                let _ = writeln!(err, "{}", outcome.advisory.message);
            }
            for path in solve_report(&cfg, &outcome).write(&cfg.output.dir)? {
                say(out, format!("wrote {}", path.display()))?;
            }
            Ok(())
        }
        Command::ConvergeTime | Command::ConvergeSpace => {
            let cfg = load(cli)?;
            let (name, outcome) = match cli.command {
                Command::ConvergeTime => ("converge-time", converge_time(&cfg, workers)?),
                _ => ("converge-space", converge_space(&cfg, workers)?),
            };
            if !outcome.advisory.pass {
                let _ = writeln!(err, "{}", outcome.advisory.message);
            }
            for (sample, reason) in &outcome.aborted {
                let _ = writeln!(err, "sample {sample} aborted: {reason}");
            }
            for r in &outcome.records {
                say(out, format!("resolution {:<12} error {:.6e} (stderr of mean square {:.2e}, {} samples)", r.resolution, r.error, r.stderr, r.samples))?;
            }
            let f = &outcome.fit;
            let se = f.slope_stderr.map_or("n/a".to_string(), |s| format!("{s:.4}"));
            say(out, format!("measured rate {:.4} (s.e. {se}), predicted {:.4}", f.slope, outcome.predicted_rate))?;
            for path in emit_report(&cfg, name, &outcome, &cfg.output.dir)? {
                say(out, format!("wrote {}", path.display()))?;
            }
            Ok(())
        }
    }
}

/// Parse `args` (program name first), run, and return the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.category());
            e.exit_code()
        }
    }
}
