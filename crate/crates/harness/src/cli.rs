use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use crate::config::PartialConfig;
use crate::run::{run_and_write, sidecar_path};
use crate::{HarnessError, HarnessResult, THREADS_ENV};

/// Exponential Runge-Kutta solver for the BGK and Boltzmann equations
/// (1D in space, 2D in velocity).
#[derive(Debug, Parser)]
#[command(name = "exprk", version)]
struct Args {
    /// Config file with `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// smooth, sod or mixing
    #[arg(long)]
    scenario: Option<String>,
    /// exprk-f or exprk-v
    #[arg(long)]
    scheme: Option<String>,
    /// euler1, midpoint2, heun2, heun3 or ssprk3
    #[arg(long)]
    tableau: Option<String>,
    /// bgk, spectral or direct
    #[arg(long)]
    collision: Option<String>,
    /// Initial data of the smooth problem: two-stream or maxwellian
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    /// Velocity nodes per dimension
    #[arg(long)]
    nv: Option<String>,
    /// Velocity box half-width L
    #[arg(long)]
    cutoff: Option<String>,
    #[arg(long)]
    cfl: Option<String>,
    /// Knudsen number (floor of the profile for mixing)
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    tfinal: Option<String>,
    /// Output CSV path; a `.meta` sidecar is written next to it
    #[arg(long)]
    out: Option<String>,
    /// weno3, weno5 or upwind1
    #[arg(long)]
    weno: Option<String>,
    #[arg(long = "mu-safety")]
    mu_safety: Option<String>,
}

impl Args {
    fn overrides(&self) -> HarnessResult<PartialConfig> {
        let mut p = PartialConfig::default();
        let pairs = [
            ("scenario", &self.scenario),
            ("scheme", &self.scheme),
            ("tableau", &self.tableau),
            ("collision", &self.collision),
            ("initial", &self.initial),
            ("nx", &self.nx),
            ("nv", &self.nv),
            ("cutoff", &self.cutoff),
            ("cfl", &self.cfl),
            ("eps", &self.eps),
            ("tfinal", &self.tfinal),
            ("out", &self.out),
            ("weno", &self.weno),
            ("mu_safety", &self.mu_safety),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                p.set(k, v).map_err(|e| HarnessError::Config(format!("--{}: {e}", k.replace('_', "-"))))?;
            }
        }
        Ok(p)
    }
}

fn configure_threads() -> HarnessResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| HarnessError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    // a pool built earlier in this process wins
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(args: Args) -> HarnessResult<()> {
    configure_threads()?;
    let base = match &args.config {
        Some(path) => PartialConfig::load(path)?,
        None => PartialConfig::default(),
    };
    let cfg = base.merge(args.overrides()?).finish()?;
    let out = run_and_write(&cfg)?;
    println!(
        "{} {} {} nx={} nv={}: {} steps to t={}, wrote {} and {}",
        cfg.scenario,
        cfg.scheme.name(),
        cfg.collision.name(),
        cfg.nx,
        cfg.nv,
        out.trajectory.steps,
        out.trajectory.times.last().copied().unwrap_or(0.0),
        cfg.out.display(),
        sidecar_path(&cfg.out).display()
    );
    if out.trajectory.clamped_cells > 0 {
        eprintln!("warning: {} cell temperatures clamped", out.trajectory.clamped_cells);
    }
    Ok(())
}

/// Parses `argv` (program name first), runs, and returns the exit code:
/// 0 on success, 1 on configuration errors, 2 on numerical failure.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
