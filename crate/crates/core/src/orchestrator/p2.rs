//! Digital precoders `F_k`.
//!
//! Unknown: `f = [vec(F_1); …; vec(F_K)]`, entry `(k, u, i)` at
//! `k·n_rf·U + u·n_rf + i`, scaled as `f = √P·y` and embedded as real
//! `[Re y; Im y]`.

use crate::channel::Scatterer;
use crate::error::Result;
use crate::linalg::{embed_vec, norm_sqr, unembed_vec, CMat, CVec, RVec, C64};
use crate::metrics::{BeamformerState, SystemModel};
use crate::solvers::{dinkelbach, DinkelbachOptions, DinkelbachResult, SquareSum};

use super::assembly::{budget_constraint, push_abs2, FractionalData};

struct Layout {
    k: usize,
    n_rf: usize,
    users: usize,
}

impl Layout {
    fn of(model: &SystemModel) -> Self {
        Self { k: model.num_subcarriers(), n_rf: model.num_feeds(), users: model.num_users() }
    }
    fn len(&self) -> usize {
        self.k * self.n_rf * self.users
    }
    fn idx(&self, k: usize, u: usize, i: usize) -> usize {
        (k * self.users + u) * self.n_rf + i
    }
}

/// Scale between `f` and the optimization variable.
fn variable_scale(model: &SystemModel) -> f64 {
    model.power_budget.sqrt()
}

pub fn pack_precoders(model: &SystemModel, f: &[CMat]) -> RVec {
    let l = Layout::of(model);
    let s = variable_scale(model);
    let mut x = CVec::zeros(l.len());
    for (k, fk) in f.iter().enumerate() {
        for u in 0..l.users {
            for i in 0..l.n_rf {
                x[l.idx(k, u, i)] = fk[(i, u)] / s;
            }
        }
    }
    embed_vec(&x)
}

pub fn unpack_precoders(model: &SystemModel, y: &RVec) -> Vec<CMat> {
    let l = Layout::of(model);
    let s = variable_scale(model);
    let x = unembed_vec(y);
    (0..l.k).map(|k| CMat::from_fn(l.n_rf, l.users, |i, u| x[l.idx(k, u, i)] * s)).collect()
}

/// Radar ratios, user constraints and per-subcarrier power rows in the precoder variable.
pub(crate) fn assemble_p2(model: &SystemModel, state: &BeamformerState) -> FractionalData {
    let ch = &model.channels;
    let l = Layout::of(model);
    let n = l.len();
    let s = variable_scale(model);
    let (n_b, n_u) = (ch.n_bs(), ch.n_user());
    let mv: Vec<CMat> = (0..l.k)
        .map(|k| {
            let mut v = model.rhs_response[k].clone();
            for (p, mut row) in v.row_iter_mut().enumerate() {
                row *= C64::new(state.m[p], 0.0);
            }
            v
        })
        .collect();

    let mut num = Vec::new();
    let mut den = Vec::new();
    for t in 0..ch.num_targets() {
        let mut sig = SquareSum::new(2 * n);
        let mut int = SquareSum::new(2 * n);
        for k in 0..l.k {
            let w = BeamformerState::block(&state.w_radar[t], k, n_b);
            if norm_sqr(&w) == 0.0 {
                continue;
            }
            let add = |sc: Scatterer, target: &mut SquareSum| {
                let (_, _, alpha) = ch.scatterer(sc, k);
                let v = ch.radar_path(sc, k, &state.phi);
                let coef = alpha * alpha * w.dotc(&v).norm_sqr();
                let row = v.transpose() * &mv[k];
                for u in 0..l.users {
                    let coeffs: Vec<(usize, C64)> = (0..l.n_rf).map(|i| (l.idx(k, u, i), row[i] * s)).collect();
                    push_abs2(target, coef, C64::new(0.0, 0.0), &coeffs, Some(n));
                }
            };
            add(Scatterer::Target(t), &mut sig);
            for sc in ch.interferers(t) {
                add(sc, &mut int);
            }
        }
        int.constant = model.radar_noise * norm_sqr(&state.w_radar[t]);
        num.push(sig);
        den.push(int);
    }

    let mut comm_num = Vec::new();
    let mut comm_den = Vec::new();
    for u in 0..l.users {
        let mut sig = SquareSum::new(2 * n);
        let mut int = SquareSum::new(2 * n);
        for k in 0..l.k {
            let w = BeamformerState::block(&state.w_comm[u], k, n_u);
            if norm_sqr(&w) == 0.0 {
                continue;
            }
            let row = w.adjoint() * ch.comm_channel(u, k, &state.phi) * &mv[k];
            for j in 0..l.users {
                let coeffs: Vec<(usize, C64)> = (0..l.n_rf).map(|i| (l.idx(k, j, i), row[i] * s)).collect();
                push_abs2(if j == u { &mut sig } else { &mut int }, 1.0, C64::new(0.0, 0.0), &coeffs, Some(n));
            }
        }
        int.constant = model.comm_noise * norm_sqr(&state.w_comm[u]);
        comm_num.push(sig);
        comm_den.push(int);
    }

    let constraints = (0..l.k)
        .map(|k| {
            let mut pw = SquareSum::new(2 * n);
            for p in 0..n_b {
                for u in 0..l.users {
                    let coeffs: Vec<(usize, C64)> = (0..l.n_rf).map(|i| (l.idx(k, u, i), mv[k][(p, i)] * s)).collect();
                    push_abs2(&mut pw, 1.0, C64::new(0.0, 0.0), &coeffs, Some(n));
                }
            }
            budget_constraint(&pw, model.power_budget)
        })
        .collect();

    FractionalData { dim: 2 * n, num, den, comm_num, comm_den, eta_hat: model.eta_hat(), constraints }
}

/// Precoders maximizing the minorized worst radar ratio (one Dinkelbach run).
pub fn solve_p2(
    model: &SystemModel,
    state: &BeamformerState,
    enforce_comm: bool,
    opts: &DinkelbachOptions,
) -> Result<(Vec<CMat>, DinkelbachResult)> {
    let data = assemble_p2(model, state);
    let y0 = pack_precoders(model, &state.f);
    let out = dinkelbach(&data.surrogate(&y0, enforce_comm), &y0, opts)?;
    Ok((unpack_precoders(model, &out.y), out))
}

/// Precoders improving the worst user-SINR margin `min_u N_u/(η̂·D_u)`; used to
/// restore the user constraints before the main loop.
pub fn restore_comm_p2(
    model: &SystemModel,
    state: &BeamformerState,
    opts: &DinkelbachOptions,
) -> Result<(Vec<CMat>, DinkelbachResult)> {
    let data = assemble_p2(model, state);
    let y0 = pack_precoders(model, &state.f);
    let out = dinkelbach(&data.comm_surrogate(&y0), &y0, opts)?;
    Ok((unpack_precoders(model, &out.y), out))
}
