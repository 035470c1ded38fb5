use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use holodfrc::orchestrator::RunOptions;
use holodfrc::scenario::ScenarioConfig;
use holodfrc_harness::{load_scenario, parse_modes, run_convergence, run_sweep, ConvergenceOptions, Result, SweepSpec};

#[derive(Parser)]
#[command(name = "holodfrc", version, about = "Wideband holographic-surface DFRC beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// 5×5 surface, 10×10 RIS, 16 subcarriers, 3 users.
    Default,
    /// 4×4 surface, 6×6 RIS, 8 subcarriers, 2 users, 2 clutter patches.
    Desk,
    /// 4×4 surface with the full RIS.
    Sweep,
}

#[derive(Args)]
struct Common {
    /// TOML scenario; overrides --preset.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Comma-separated mode names, or `all`.
    #[arg(long, default_value = "all")]
    modes: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Dump inner solver iterations.
    #[arg(long)]
    trace: bool,
    /// Record wall-clock times (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Frozen amplitudes in the random-surface modes are drawn uniformly instead of all ones.
    #[arg(long)]
    uniform_random_rhs: bool,
}

impl Common {
    fn scenario(&self, fallback: Preset) -> Result<ScenarioConfig> {
        if let Some(path) = &self.scenario {
            return load_scenario(path);
        }
        Ok(match self.preset.unwrap_or(fallback) {
            Preset::Default => ScenarioConfig::default(),
            Preset::Desk => ScenarioConfig::desk(),
            Preset::Sweep => ScenarioConfig::sweep_baseline(),
        })
    }

    fn run_options(&self) -> RunOptions {
        RunOptions { uniform_random_rhs: self.uniform_random_rhs }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Convergence traces of several modes on one channel realization.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte-Carlo sweep of one scenario parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// power_dbw, eps_dir, n_ris_side, n_rhs_side, eta_db or num_users.
        #[arg(long)]
        param: String,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Master seed from which trial seeds are derived.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, seed } => {
            let cfg = common.scenario(Preset::Default)?;
            let modes = parse_modes(&common.modes)?;
            let opts = ConvergenceOptions { trace: common.trace, timing: common.timing, run: common.run_options() };
            let out = run_convergence(&cfg, &modes, seed, &opts)?;
            out.write(&common.out)?;
            for r in &out.records {
                eprintln!(
                    "{:<26} min radar SINR {:>8.3} dB  iterations {:>2}  feasible {}",
                    r.mode,
                    r.min_radar_sinr_db(),
                    r.iterations,
                    r.report.feasible
                );
            }
        }
        Command::Sweep { common, param, values, trials, seed, jobs } => {
            let cfg = common.scenario(Preset::Sweep)?;
            let mut spec = SweepSpec::new(param.parse()?, values, trials, parse_modes(&common.modes)?);
            spec.master_seed = seed;
            spec.timing = common.timing;
            spec.run = common.run_options();
            spec.jobs = jobs;
            let out = run_sweep(&cfg, &spec)?;
            out.write(&common.out)?;
            eprintln!("{} runs written to {}", out.records.len(), common.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
