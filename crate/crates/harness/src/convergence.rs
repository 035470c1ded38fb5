//! Per-iteration traces of every mode on one shared channel realization.

use std::path::Path;

use holodfrc::channel::ChannelSet;
use holodfrc::metrics::SinrReport;
use holodfrc::orchestrator::{run_mode_with, InnerRow, Mode, ModeRun, RunOptions, TraceRow};
use holodfrc::scenario::{linear_to_db, ScenarioConfig};
use serde::Serialize;

use crate::csv::{emit_csv, num, CsvTable};
use crate::{io_err, scenario_hash, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConvergenceOptions {
    /// Keep inner solver iterations.
    pub trace: bool,
    /// Record wall-clock times; otherwise they are written as zero so output is reproducible.
    pub timing: bool,
    pub run: RunOptions,
}

/// Final outcome of one (seed, mode, parameter value) run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub scenario_hash: String,
    pub seed: u64,
    pub mode: String,
    pub value: Option<f64>,
    pub report: SinrReport,
    pub iterations: usize,
    pub converged: bool,
    pub comm_enforced: bool,
    pub wall_ms: f64,
    pub diagnostics: Vec<String>,
}

impl RunRecord {
    pub(crate) fn from_run(hash: &str, value: Option<f64>, run: &ModeRun, timing: bool) -> Self {
        let out = &run.outcome;
        Self {
            scenario_hash: hash.to_string(),
            seed: run.seed,
            mode: run.mode.name().to_string(),
            value,
            report: run.report.clone(),
            iterations: out.iterations,
            converged: out.converged,
            comm_enforced: out.comm_enforced,
            wall_ms: if timing { out.trace.last().map_or(0.0, |r| r.wall_ms) } else { 0.0 },
            diagnostics: out.diagnostics.clone(),
        }
    }

    pub fn min_radar_sinr_db(&self) -> f64 {
        linear_to_db(self.report.min_radar)
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceRun {
    pub scenario_hash: String,
    pub seed: u64,
    pub traces: Vec<(Mode, Vec<TraceRow>)>,
    pub inner: Vec<(Mode, Vec<InnerRow>)>,
    pub records: Vec<RunRecord>,
}

/// Run every mode in `modes` on the channels drawn from `seed`.
pub fn run_convergence(cfg: &ScenarioConfig, modes: &[Mode], seed: u64, opts: &ConvergenceOptions) -> Result<ConvergenceRun> {
    let hash = scenario_hash(cfg);
    let channels = ChannelSet::synthesize(cfg, seed)?;
    let mut traces = Vec::new();
    let mut inner = Vec::new();
    let mut records = Vec::new();
    for &mode in modes {
        let run = run_mode_with(cfg, &channels, seed, mode, opts.run)?;
        records.push(RunRecord::from_run(&hash, None, &run, opts.timing));
        let mut rows = run.outcome.trace.clone();
        if !opts.timing {
            rows.iter_mut().for_each(|r| r.wall_ms = 0.0);
        }
        traces.push((mode, rows));
        if opts.trace {
            inner.push((mode, run.outcome.inner.clone()));
        }
    }
    Ok(ConvergenceRun { scenario_hash: hash, seed, traces, inner, records })
}

impl ConvergenceRun {
    /// `mode, outer_iter, min_radar_sinr_db, radar_sinr_db_t*, comm_sinr_db_u*, p4_accepted, wall_ms`.
    pub fn table(&self) -> CsvTable {
        let targets = self.traces.first().and_then(|(_, r)| r.first()).map_or(0, |r| r.radar.len());
        let users = self.traces.first().and_then(|(_, r)| r.first()).map_or(0, |r| r.comm_sum_avg.len());
        let mut header = vec!["mode".to_string(), "outer_iter".into(), "min_radar_sinr_db".into()];
        header.extend((0..targets).map(|t| format!("radar_sinr_db_t{t}")));
        header.extend((0..users).map(|u| format!("comm_sinr_db_u{u}")));
        header.extend(["p4_accepted".to_string(), "wall_ms".into()]);
        let mut table = CsvTable::new(header);
        for (mode, rows) in &self.traces {
            for r in rows {
                let mut row = vec![mode.name().to_string(), r.outer_iter.to_string(), num(linear_to_db(r.min_radar))];
                row.extend(r.radar.iter().map(|v| num(linear_to_db(*v))));
                row.extend(r.comm_sum_avg.iter().map(|v| num(linear_to_db(*v))));
                row.push(match r.p4_accepted {
                    Some(true) => "1".into(),
                    Some(false) => "0".into(),
                    None => String::new(),
                });
                row.push(num(r.wall_ms));
                table.push(row);
            }
        }
        table
    }

    /// `mode, outer_iter, block, inner_iter, value`.
    pub fn inner_table(&self) -> CsvTable {
        let mut table = CsvTable::new(["mode", "outer_iter", "block", "inner_iter", "value"]);
        for (mode, rows) in &self.inner {
            for r in rows {
                table.push(vec![
                    mode.name().to_string(),
                    r.outer_iter.to_string(),
                    r.block.to_string(),
                    r.inner_iter.to_string(),
                    num(r.value),
                ]);
            }
        }
        table
    }

    /// Write `convergence.csv`, `report.json` and, with tracing, `inner.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        emit_csv(&self.table(), &dir.join("convergence.csv"))?;
        if !self.inner.is_empty() {
            emit_csv(&self.inner_table(), &dir.join("inner.csv"))?;
        }
        write_report(&dir.join("report.json"), &self.records)
    }
}

pub(crate) fn write_report(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut text = serde_json::to_string_pretty(records)?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}
