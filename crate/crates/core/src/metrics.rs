//! Radar and communication SINR figures of merit.

use nalgebra::DVector;

use crate::channel::{ChannelSet, Scatterer};
use crate::error::{invalid, Result};
use crate::holographic::{radiated, transmit_power, RhsSurface};
use crate::linalg::{norm_sqr, CMat, CVec, C64};
use crate::scenario::ScenarioConfig;

/// Channels plus the fixed physical quantities that every metric needs.
#[derive(Debug, Clone)]
pub struct SystemModel {
    pub channels: ChannelSet,
    /// RHS responses `V_k`, one per subcarrier.
    pub rhs_response: Vec<CMat>,
    pub radar_noise: f64,
    pub comm_noise: f64,
    pub power_budget: f64,
    /// Linear per-user threshold `η`.
    pub eta: f64,
}

impl SystemModel {
    pub fn new(cfg: &ScenarioConfig, channels: ChannelSet) -> Result<Self> {
        let surface = rhs_surface(cfg)?;
        let grid = cfg.grid();
        let rhs_response = (0..grid.count).map(|k| surface.response(grid.wavelength(k))).collect::<Result<_>>()?;
        Ok(Self {
            channels,
            rhs_response,
            radar_noise: cfg.radar_noise_w(),
            comm_noise: cfg.comm_noise_w(),
            power_budget: cfg.power_budget_w(),
            eta: cfg.eta(),
        })
    }

    pub fn num_subcarriers(&self) -> usize {
        self.rhs_response.len()
    }
    pub fn num_feeds(&self) -> usize {
        self.rhs_response[0].ncols()
    }
    pub fn num_users(&self) -> usize {
        self.channels.num_users()
    }
    pub fn num_targets(&self) -> usize {
        self.channels.num_targets()
    }
    /// Threshold on the unnormalized ratio `Σ_k a_k / Σ_k b_k`, `K·η`.
    pub fn eta_hat(&self) -> f64 {
        self.num_subcarriers() as f64 * self.eta
    }
}

/// Surface described by the scenario (explicit or default edge feeds).
pub fn rhs_surface(cfg: &ScenarioConfig) -> Result<RhsSurface> {
    let geometry = cfg.rhs_geometry();
    if cfg.rhs.feed_positions.is_empty() {
        RhsSurface::with_edge_feeds(geometry, cfg.rhs.feeds, cfg.rhs.refractive_index)
    } else {
        RhsSurface::new(geometry, cfg.rhs.feed_positions.clone(), cfg.rhs.refractive_index)
    }
}

/// The five decision blocks. Filters are stacked over subcarriers:
/// `w_radar[t]` has length `N_B·K`, `w_comm[u]` has length `N_U·K`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerState {
    pub f: Vec<CMat>,
    pub m: DVector<f64>,
    pub phi: CVec,
    pub w_radar: Vec<CVec>,
    pub w_comm: Vec<CVec>,
}

impl BeamformerState {
    /// Subcarrier-`k` slice of a stacked filter of per-subcarrier length `n`.
    pub fn block(w: &CVec, k: usize, n: usize) -> CVec {
        w.rows(k * n, n).into_owned()
    }

    /// Radiated signal `diag(m)·V_k·F_k`.
    pub fn radiated(&self, model: &SystemModel, k: usize) -> CMat {
        radiated(&self.m, &model.rhs_response[k], &self.f[k])
    }

    /// Per-subcarrier radiated power.
    pub fn powers(&self, model: &SystemModel) -> Vec<f64> {
        (0..model.num_subcarriers())
            .map(|k| transmit_power(&self.m, &model.rhs_response[k], &self.f[k]).unwrap_or(f64::INFINITY))
            .collect()
    }
}

/// Per-subcarrier numerator and denominator of user `u`'s SINR.
/// Subcarriers with an all-zero combiner contribute `(0, 0)`.
pub fn comm_terms(model: &SystemModel, state: &BeamformerState, u: usize) -> (Vec<f64>, Vec<f64>) {
    let n_u = model.channels.n_user();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for k in 0..model.num_subcarriers() {
        let w = BeamformerState::block(&state.w_comm[u], k, n_u);
        let wn = norm_sqr(&w);
        if wn == 0.0 {
            a.push(0.0);
            b.push(0.0);
            continue;
        }
        let h = model.channels.comm_channel(u, k, &state.phi);
        let y = w.adjoint() * h * state.radiated(model, k);
        let total: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        let sig = y[(0, u)].norm_sqr();
        a.push(sig);
        b.push(total - sig + model.comm_noise * wn);
    }
    (a, b)
}

/// SINR of user `u` on subcarrier `k`.
pub fn comm_sinr_subcarrier(model: &SystemModel, state: &BeamformerState, u: usize, k: usize) -> Result<f64> {
    let n_u = model.channels.n_user();
    let w = BeamformerState::block(&state.w_comm[u], k, n_u);
    if norm_sqr(&w) == 0.0 {
        return Err(invalid(format!("combiner of user {u} is zero on subcarrier {k}")));
    }
    let h = model.channels.comm_channel(u, k, &state.phi);
    let y = w.adjoint() * h * state.radiated(model, k);
    let total: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    let sig = y[(0, u)].norm_sqr();
    Ok(sig / (total - sig + model.comm_noise * norm_sqr(&w)))
}

/// Mean of the per-subcarrier SINRs; subcarriers with a zero combiner count as zero.
pub fn comm_sinr_average(model: &SystemModel, state: &BeamformerState, u: usize) -> f64 {
    let (a, b) = comm_terms(model, state, u);
    let k = a.len() as f64;
    a.iter().zip(&b).map(|(x, y)| if *y > 0.0 { x / y } else { 0.0 }).sum::<f64>() / k
}

/// `(1/K)·Σ a_k / Σ b_k`.
pub fn comm_sinr_sum_average(model: &SystemModel, state: &BeamformerState, u: usize) -> f64 {
    let (a, b) = comm_terms(model, state, u);
    sum_average(&a, &b)
}

fn sum_average(a: &[f64], b: &[f64]) -> f64 {
    let den: f64 = b.iter().sum();
    if den <= 0.0 {
        return 0.0;
    }
    a.iter().sum::<f64>() / den / a.len() as f64
}

fn mean_of_ratios(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x / y).sum::<f64>() / a.len() as f64
}

/// Whether the sum-average of `a/b` lower-bounds the average, up to `tol` relative.
pub fn sum_average_bound_holds(a: &[f64], b: &[f64], tol: f64) -> Result<bool> {
    if a.len() != b.len() || a.is_empty() {
        return Err(invalid("sum_average_bound_holds needs equal nonempty inputs"));
    }
    if a.iter().any(|x| *x < 0.0) || b.iter().any(|x| *x <= 0.0) {
        return Err(invalid("sum_average_bound_holds needs a >= 0 and b > 0"));
    }
    let lhs = sum_average(a, b);
    let rhs = mean_of_ratios(a, b);
    Ok(lhs <= rhs + tol * rhs.abs().max(f64::MIN_POSITIVE))
}

/// Per-subcarrier numerator and denominator of target `t`'s radar SINR.
pub fn radar_terms(model: &SystemModel, state: &BeamformerState, t: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let ch = &model.channels;
    let n_b = ch.n_bs();
    let mut num = Vec::new();
    let mut den = Vec::new();
    let others = ch.interferers(t);
    for k in 0..model.num_subcarriers() {
        let w = BeamformerState::block(&state.w_radar[t], k, n_b);
        let x = state.radiated(model, k);
        let echo = |s: Scatterer| -> f64 {
            let (_, _, alpha) = ch.scatterer(s, k);
            let v = ch.radar_path(s, k, &state.phi);
            let gain = w.dotc(&v).norm_sqr();
            let reflect = norm_sqr(&(x.transpose() * &v));
            alpha * alpha * gain * reflect
        };
        num.push(echo(Scatterer::Target(t)));
        den.push(others.iter().map(|s| echo(*s)).sum::<f64>() + model.radar_noise * norm_sqr(&w));
    }
    if state.w_radar[t].iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Err(invalid(format!("radar filter of target {t} is zero")));
    }
    Ok((num, den))
}

/// Radar SINR of target `t`: summed echo power over summed interference plus noise.
pub fn radar_sinr(model: &SystemModel, state: &BeamformerState, t: usize) -> Result<f64> {
    let (num, den) = radar_terms(model, state, t)?;
    Ok(num.iter().sum::<f64>() / den.iter().sum::<f64>())
}

/// Smallest radar SINR and the first target attaining it.
pub fn min_radar_sinr(model: &SystemModel, state: &BeamformerState) -> Result<(f64, usize)> {
    let mut best = (f64::INFINITY, 0);
    for t in 0..model.num_targets() {
        let s = radar_sinr(model, state, t)?;
        if s < best.0 {
            best = (s, t);
        }
    }
    Ok(best)
}

/// Relative slack granted to the power check.
pub const POWER_TOL: f64 = 1e-8;
/// Slack of the user-SINR check, in dB.
pub const COMM_TOL_DB: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SinrReport {
    pub radar: Vec<f64>,
    pub comm_sum_avg: Vec<f64>,
    pub comm_avg: Vec<f64>,
    pub min_radar: f64,
    pub argmin_radar: usize,
    /// Power, amplitude-box, unit-modulus and user-SINR constraints all hold.
    pub feasible: bool,
}

impl SinrReport {
    pub fn evaluate(model: &SystemModel, state: &BeamformerState) -> Result<Self> {
        let radar = (0..model.num_targets()).map(|t| radar_sinr(model, state, t)).collect::<Result<Vec<_>>>()?;
        let (min_radar, argmin_radar) = min_radar_sinr(model, state)?;
        let comm_sum_avg: Vec<f64> = (0..model.num_users()).map(|u| comm_sinr_sum_average(model, state, u)).collect();
        let comm_avg = (0..model.num_users()).map(|u| comm_sinr_average(model, state, u)).collect();
        let feasible = power_feasible(model, state)
            && comm_feasible_values(&comm_sum_avg, model.eta)
            && state.m.iter().all(|v| (0.0..=1.0).contains(v))
            && state.phi.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12);
        Ok(Self { radar, comm_sum_avg, comm_avg, min_radar, argmin_radar, feasible })
    }
}

pub fn power_feasible(model: &SystemModel, state: &BeamformerState) -> bool {
    state.powers(model).iter().all(|p| *p <= model.power_budget * (1.0 + POWER_TOL))
}

fn comm_feasible_values(sum_avg: &[f64], eta: f64) -> bool {
    let floor = eta * 10f64.powf(-COMM_TOL_DB / 10.0);
    sum_avg.iter().all(|s| *s >= floor)
}

/// Every user meets `η` in the sum-average sense, within [`COMM_TOL_DB`].
pub fn comm_feasible(model: &SystemModel, state: &BeamformerState) -> bool {
    let s: Vec<f64> = (0..model.num_users()).map(|u| comm_sinr_sum_average(model, state, u)).collect();
    comm_feasible_values(&s, model.eta)
}
