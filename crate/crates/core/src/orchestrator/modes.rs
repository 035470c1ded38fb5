//! The six comparison modes and end-to-end runs.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::metrics::{SinrReport, SystemModel};
use crate::scenario::ScenarioConfig;

use super::am::{am_loop, initial_state, AmOptions, AmOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RhsMode {
    /// Amplitudes frozen (all ones unless uniform random draws are requested).
    Random,
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RisMode {
    /// RIS absent: all RIS channel contributions are zeroed.
    None,
    /// Random phases held fixed.
    Random,
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub rhs: RhsMode,
    pub ris: RisMode,
}

impl Default for Mode {
    fn default() -> Self {
        Self { rhs: RhsMode::Optimal, ris: RisMode::Optimal }
    }
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode { rhs: RhsMode::Optimal, ris: RisMode::Optimal },
        Mode { rhs: RhsMode::Optimal, ris: RisMode::Random },
        Mode { rhs: RhsMode::Optimal, ris: RisMode::None },
        Mode { rhs: RhsMode::Random, ris: RisMode::Optimal },
        Mode { rhs: RhsMode::Random, ris: RisMode::Random },
        Mode { rhs: RhsMode::Random, ris: RisMode::None },
    ];

    pub fn name(&self) -> &'static str {
        match (self.rhs, self.ris) {
            (RhsMode::Optimal, RisMode::Optimal) => "optimal-rhs_optimal-ris",
            (RhsMode::Optimal, RisMode::Random) => "optimal-rhs_random-ris",
            (RhsMode::Optimal, RisMode::None) => "optimal-rhs_no-ris",
            (RhsMode::Random, RisMode::Optimal) => "random-rhs_optimal-ris",
            (RhsMode::Random, RisMode::Random) => "random-rhs_random-ris",
            (RhsMode::Random, RisMode::None) => "random-rhs_no-ris",
        }
    }

    /// AM options with the blocks this mode leaves frozen switched off.
    pub fn am_options(&self, cfg: &ScenarioConfig) -> AmOptions {
        let mut o = AmOptions::from_solver(&cfg.solver);
        o.optimize_amplitudes = self.rhs == RhsMode::Optimal;
        o.optimize_phases = self.ris == RisMode::Optimal;
        o
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .iter()
            .find(|m| m.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode `{s}`")))
    }
}

/// Extra switches for [`run_mode_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    /// Random-RHS modes draw amplitudes uniformly in `[0, 1]` instead of all ones.
    pub uniform_random_rhs: bool,
}

#[derive(Debug, Clone)]
pub struct ModeRun {
    pub mode: Mode,
    pub seed: u64,
    pub outcome: AmOutcome,
    pub report: SinrReport,
}

/// Seed of the random starting point for a trial; shared by all modes.
fn init_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Run one mode on a given channel realization.
pub fn run_mode_with(
    cfg: &ScenarioConfig,
    channels: &ChannelSet,
    seed: u64,
    mode: Mode,
    run: RunOptions,
) -> Result<ModeRun> {
    let channels = if mode.ris == RisMode::None { channels.without_ris() } else { channels.clone() };
    let model = SystemModel::new(cfg, channels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(init_seed(seed));
    let n_b = model.channels.n_bs();
    // draw the uniform amplitudes first so the phase and precoder draws stay paired across modes
    let uniform = DVector::from_fn(n_b, |_, _| rng.random::<f64>());
    let m = if mode.rhs == RhsMode::Random && run.uniform_random_rhs { uniform } else { DVector::from_element(n_b, 1.0) };
    let init = initial_state(&model, m, &mut rng)?;
    let outcome = am_loop(&model, init, &mode.am_options(cfg))?;
    let report = outcome.report.clone();
    Ok(ModeRun { mode, seed, outcome, report })
}

/// Synthesize the channels for `seed` and run one mode.
pub fn run_mode(cfg: &ScenarioConfig, seed: u64, mode: Mode) -> Result<ModeRun> {
    let channels = ChannelSet::synthesize(cfg, seed)?;
    run_mode_with(cfg, &channels, seed, mode, RunOptions::default())
}
