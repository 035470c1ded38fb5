//! Alternating maximization over filters, precoders, amplitudes and phases.

use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;

use crate::channel::complex_normal;
use crate::error::Result;
use crate::holographic::scale_to_power_budget;
use crate::linalg::{cis, CMat, CVec};
use crate::metrics::{comm_feasible, min_radar_sinr, power_feasible, BeamformerState, SinrReport, SystemModel};
use crate::scenario::SolverConfig;
use crate::solvers::{CadmmOptions, DinkelbachOptions};

use super::{p1, p2, p3, p4};

#[derive(Debug, Clone, PartialEq)]
pub struct AmOptions {
    pub optimize_amplitudes: bool,
    pub optimize_phases: bool,
    pub max_iter: usize,
    pub zeta3: f64,
    pub restoration_max_iter: usize,
    pub dinkelbach: DinkelbachOptions,
    pub cadmm: CadmmOptions,
}

impl AmOptions {
    pub fn from_solver(s: &SolverConfig) -> Self {
        Self {
            optimize_amplitudes: true,
            optimize_phases: true,
            max_iter: s.am_max_iter,
            zeta3: s.zeta3,
            restoration_max_iter: s.restoration_max_iter,
            dinkelbach: DinkelbachOptions { zeta: s.zeta1, max_iter: s.dinkelbach_max_iter, ..Default::default() },
            cadmm: CadmmOptions {
                rho: s.rho,
                beta: s.rho,
                zeta: s.zeta2,
                max_iter: s.cadmm_max_iter,
                rsd_step: s.rsd_step,
                rsd_iters: s.rsd_max_iter,
            },
        }
    }
}

impl Default for AmOptions {
    fn default() -> Self {
        Self::from_solver(&SolverConfig::default())
    }
}

/// State after each outer iteration (row 0 is the initial state).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TraceRow {
    pub outer_iter: usize,
    pub min_radar: f64,
    pub radar: Vec<f64>,
    pub comm_sum_avg: Vec<f64>,
    /// `None` when the phase block is not optimized in this run.
    pub p4_accepted: Option<bool>,
    pub wall_ms: f64,
}

/// One inner solver iteration.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct InnerRow {
    pub outer_iter: usize,
    pub block: &'static str,
    pub inner_iter: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct AmOutcome {
    pub state: BeamformerState,
    pub report: SinrReport,
    pub trace: Vec<TraceRow>,
    pub inner: Vec<InnerRow>,
    pub iterations: usize,
    pub converged: bool,
    /// Whether the user constraints were enforced (restoration succeeded).
    pub comm_enforced: bool,
    pub diagnostics: Vec<String>,
}

/// Random starting point: uniform phases, complex Gaussian precoders scaled
/// into the power budget, given amplitudes, filters from P1.
pub fn initial_state<R: Rng + ?Sized>(model: &SystemModel, m: DVector<f64>, rng: &mut R) -> Result<BeamformerState> {
    let n_r = model.channels.n_ris();
    let phi = CVec::from_fn(n_r, |_, _| cis(rng.random::<f64>() * 2.0 * std::f64::consts::PI));
    let (n_rf, users) = (model.num_feeds(), model.num_users());
    let mut f = Vec::with_capacity(model.num_subcarriers());
    for k in 0..model.num_subcarriers() {
        let raw = CMat::from_fn(n_rf, users, |_, _| complex_normal(rng));
        f.push(scale_to_power_budget(&raw, &m, &model.rhs_response[k], model.power_budget)?);
    }
    let mut state = BeamformerState { f, m, phi, w_radar: Vec::new(), w_comm: Vec::new() };
    p1::update_filters(model, &mut state)?;
    Ok(state)
}

fn snapshot(model: &SystemModel, state: &BeamformerState, iter: usize, p4: Option<bool>, start: &Instant) -> Result<TraceRow> {
    let r = SinrReport::evaluate(model, state)?;
    Ok(TraceRow {
        outer_iter: iter,
        min_radar: r.min_radar,
        radar: r.radar,
        comm_sum_avg: r.comm_sum_avg,
        p4_accepted: p4,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// A candidate block update is kept only if the worst radar SINR does not
/// drop, power stays within budget and, when enforced, every user keeps `η`.
fn acceptable(model: &SystemModel, cand: &BeamformerState, floor: f64, enforce_comm: bool) -> bool {
    match min_radar_sinr(model, cand) {
        Ok((v, _)) => v >= floor && power_feasible(model, cand) && (!enforce_comm || comm_feasible(model, cand)),
        Err(_) => false,
    }
}

fn push_inner(inner: &mut Vec<InnerRow>, outer: usize, block: &'static str, values: &[f64]) {
    inner.extend(values.iter().enumerate().map(|(i, v)| InnerRow { outer_iter: outer, block, inner_iter: i, value: *v }));
}

/// Run the alternating maximization from `init`.
pub fn am_loop(model: &SystemModel, init: BeamformerState, opts: &AmOptions) -> Result<AmOutcome> {
    let start = Instant::now();
    let mut state = init;
    let mut diagnostics = Vec::new();
    let mut inner = Vec::new();
    p1::update_filters(model, &mut state)?;

    // bring the users above their threshold before maximizing the radar objective
    let mut rounds = 0;
    while !comm_feasible(model, &state) && rounds < opts.restoration_max_iter {
        rounds += 1;
        match p2::restore_comm_p2(model, &state, &opts.dinkelbach) {
            Ok((f, out)) => {
                push_inner(&mut inner, 0, "restore", &out.lambdas);
                let mut cand = state.clone();
                cand.f = f;
                p1::update_filters(model, &mut cand)?;
                if out.lambdas.len() < 2 {
                    state = cand;
                    break;
                }
                state = cand;
            }
            Err(e) => {
                diagnostics.push(format!("restoration step failed: {e}"));
                break;
            }
        }
    }
    let comm_enforced = comm_feasible(model, &state);
    if !comm_enforced {
        diagnostics.push(format!("user SINR threshold not reached after {rounds} restoration rounds; running without user constraints"));
    }

    let p4_flag = |accepted: bool| if opts.optimize_phases { Some(accepted) } else { None };
    let mut trace = vec![snapshot(model, &state, 0, p4_flag(false), &start)?];
    let mut converged = false;
    let mut iterations = 0;
    for l in 1..=opts.max_iter {
        iterations = l;
        let prev = trace.last().unwrap().min_radar;

        p1::update_filters(model, &mut state)?;

        let floor = min_radar_sinr(model, &state)?.0;
        match p2::solve_p2(model, &state, comm_enforced, &opts.dinkelbach) {
            Ok((f, out)) => {
                push_inner(&mut inner, l, "p2", &out.lambdas);
                let mut cand = state.clone();
                cand.f = f;
                if acceptable(model, &cand, floor, comm_enforced) {
                    state = cand;
                }
            }
            Err(e) => diagnostics.push(format!("iteration {l}: precoder update skipped: {e}")),
        }

        if opts.optimize_amplitudes {
            let floor = min_radar_sinr(model, &state)?.0;
            match p3::solve_p3(model, &state, comm_enforced, &opts.dinkelbach) {
                Ok((m, out)) => {
                    push_inner(&mut inner, l, "p3", &out.lambdas);
                    let mut cand = state.clone();
                    cand.m = m;
                    if acceptable(model, &cand, floor, comm_enforced) {
                        state = cand;
                    }
                }
                Err(e) => diagnostics.push(format!("iteration {l}: amplitude update skipped: {e}")),
            }
        }

        let mut p4_accepted = false;
        if opts.optimize_phases {
            let floor = min_radar_sinr(model, &state)?.0;
            let out = p4::solve_p4(model, &state, comm_enforced, &opts.cadmm);
            push_inner(&mut inner, l, "p4", &out.lambdas);
            let mut cand = state.clone();
            cand.phi = out.phi;
            if cand.phi != state.phi && acceptable(model, &cand, floor, comm_enforced) {
                state = cand;
                p4_accepted = true;
            }
        }

        let row = snapshot(model, &state, l, p4_flag(p4_accepted), &start)?;
        let delta = row.min_radar - prev;
        trace.push(row);
        if delta * delta <= opts.zeta3 {
            converged = true;
            break;
        }
    }

    let report = SinrReport::evaluate(model, &state)?;
    Ok(AmOutcome { state, report, trace, inner, iterations, converged, comm_enforced, diagnostics })
}
