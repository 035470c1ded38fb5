//! Monte-Carlo parameter sweeps.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use holodfrc::channel::ChannelSet;
use holodfrc::orchestrator::{run_mode_with, Mode, RunOptions};
use holodfrc::scenario::{ArraySpec, ScenarioConfig};

use crate::convergence::{write_report, RunRecord};
use crate::csv::{emit_csv, num, CsvTable};
use crate::{io_err, scenario_hash, trial_seed, HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Per-subcarrier transmit budget in dBW.
    PowerDbw,
    /// Path-loss exponent of the direct radar links.
    EpsDir,
    NRisSide,
    NRhsSide,
    EtaDb,
    NumUsers,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] =
        [Self::PowerDbw, Self::EpsDir, Self::NRisSide, Self::NRhsSide, Self::EtaDb, Self::NumUsers];

    pub fn name(&self) -> &'static str {
        match self {
            Self::PowerDbw => "power_dbw",
            Self::EpsDir => "eps_dir",
            Self::NRisSide => "n_ris_side",
            Self::NRhsSide => "n_rhs_side",
            Self::EtaDb => "eta_db",
            Self::NumUsers => "num_users",
        }
    }

    fn integer(value: f64, name: &str) -> Result<usize> {
        if value >= 1.0 && value.fract() == 0.0 && value < 1e6 {
            Ok(value as usize)
        } else {
            Err(HarnessError::Usage(format!("{name} needs a positive integer, got {value}")))
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(&self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        match self {
            Self::PowerDbw => cfg.power.per_subcarrier_dbw = value,
            Self::EpsDir => cfg.channel.exponents.radar_direct = value,
            Self::NRisSide => {
                let n = Self::integer(value, self.name())?;
                cfg.arrays.ris = ArraySpec::square(n, cfg.arrays.ris.spacing_wavelengths);
            }
            Self::NRhsSide => {
                let n = Self::integer(value, self.name())?;
                cfg.arrays.rhs = ArraySpec::square(n, cfg.arrays.rhs.spacing_wavelengths);
            }
            Self::EtaDb => cfg.comm.eta_db = value,
            Self::NumUsers => cfg.set_num_users(Self::integer(value, self.name())?),
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .find(|p| p.name() == s)
            .copied()
            .ok_or_else(|| HarnessError::Usage(format!("unknown sweep parameter `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    /// Channel realizations per point.
    pub trials: usize,
    pub modes: Vec<Mode>,
    pub master_seed: u64,
    pub timing: bool,
    pub run: RunOptions,
    /// Worker threads; trials are independent.
    pub jobs: usize,
}

impl SweepSpec {
    pub fn new(param: SweepParam, values: Vec<f64>, trials: usize, modes: Vec<Mode>) -> Self {
        Self { param, values, trials, modes, master_seed: 0, timing: false, run: RunOptions::default(), jobs: 1 }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(HarnessError::Usage("sweep needs at least one value".into()));
        }
        if self.trials == 0 {
            return Err(HarnessError::Usage("sweep needs at least one trial".into()));
        }
        if self.modes.is_empty() {
            return Err(HarnessError::Usage("sweep needs at least one mode".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub modes: Vec<Mode>,
    /// Ordered by value, then trial, then mode.
    pub records: Vec<RunRecord>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl SweepResult {
    /// Final min-radar SINR (dB) of every trial at one point.
    pub fn samples(&self, value: f64, mode: Mode) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.value == Some(value) && r.mode == mode.name())
            .map(RunRecord::min_radar_sinr_db)
            .collect()
    }

    /// Mean and sample standard deviation over trials.
    pub fn aggregate(&self, value: f64, mode: Mode) -> (f64, f64) {
        mean_std(&self.samples(value, mode))
    }

    /// `param, value, mode, aggregate, min_radar_sinr_db` with a mean and a std row per point.
    pub fn table(&self) -> CsvTable {
        let mut table = CsvTable::new(["param", "value", "mode", "aggregate", "min_radar_sinr_db"]);
        for &v in &self.values {
            for &mode in &self.modes {
                let (mean, std) = self.aggregate(v, mode);
                for (agg, x) in [("mean", mean), ("std", std)] {
                    table.push(vec![self.param.name().into(), num(v), mode.name().into(), agg.into(), num(x)]);
                }
            }
        }
        table
    }

    /// Write `sweep_<param>.csv` and `report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        emit_csv(&self.table(), &dir.join(format!("sweep_{}.csv", self.param.name())))?;
        write_report(&dir.join("report.json"), &self.records)
    }
}

/// Run every (value, trial, mode) combination. Channels are redrawn per trial
/// and shared by the modes of that trial; trial `i` uses the same seed at every value.
pub fn run_sweep(base: &ScenarioConfig, spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let cfgs = spec.values.iter().map(|v| spec.param.apply(base, *v)).collect::<Result<Vec<_>>>()?;
    let hashes: Vec<String> = cfgs.iter().map(scenario_hash).collect();
    let jobs: Vec<(usize, u64)> =
        (0..spec.values.len()).flat_map(|vi| (0..spec.trials).map(move |t| (vi, t as u64))).collect();

    let run_job = |&(vi, trial): &(usize, u64)| -> Result<Vec<RunRecord>> {
        let seed = trial_seed(spec.master_seed, trial);
        let channels = ChannelSet::synthesize(&cfgs[vi], seed)?;
        spec.modes
            .iter()
            .map(|&mode| {
                let run = run_mode_with(&cfgs[vi], &channels, seed, mode, spec.run)?;
                Ok(RunRecord::from_run(&hashes[vi], Some(spec.values[vi]), &run, spec.timing))
            })
            .collect()
    };

    let slots: Mutex<Vec<Option<Result<Vec<RunRecord>>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= jobs.len() {
            break;
        }
        let out = run_job(&jobs[i]);
        slots.lock().expect("sweep worker panicked")[i] = Some(out);
    };
    let threads = spec.jobs.clamp(1, jobs.len());
    if threads == 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(worker);
            }
        });
    }

    let mut records = Vec::with_capacity(jobs.len() * spec.modes.len());
    for slot in slots.into_inner().expect("sweep worker panicked") {
        records.extend(slot.expect("every job runs")?);
    }
    Ok(SweepResult { param: spec.param, values: spec.values.clone(), modes: spec.modes.clone(), records })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_round_trip_and_apply() {
        for p in SweepParam::ALL {
            assert_eq!(p.name().parse::<SweepParam>().unwrap(), p);
        }
        let base = ScenarioConfig::desk();
        assert_eq!(SweepParam::NRisSide.apply(&base, 3.0).unwrap().arrays.ris.nx, 3);
        assert_eq!(SweepParam::NumUsers.apply(&base, 4.0).unwrap().num_users(), 4);
        assert_eq!(SweepParam::EtaDb.apply(&base, 12.0).unwrap().comm.eta_db, 12.0);
        assert!(SweepParam::NRisSide.apply(&base, 2.5).is_err());
        assert!(SweepParam::NumUsers.apply(&base, 0.0).is_err());
    }

    #[test]
    fn mean_and_sample_std() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
