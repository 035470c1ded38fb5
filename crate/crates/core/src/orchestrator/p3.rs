//! Holographic amplitudes `m ∈ [0, 1]^{N_B}`.

use nalgebra::DVector;

use crate::channel::Scatterer;
use crate::error::Result;
use crate::linalg::{norm_sqr, CMat, RVec, C64};
use crate::metrics::{BeamformerState, SystemModel};
use crate::solvers::{dinkelbach, DinkelbachOptions, DinkelbachResult, Quadratic, SquareSum};

use super::assembly::{budget_constraint, push_abs2, FractionalData};

/// Radar ratios, user constraints, power rows and the amplitude box in `m`.
pub(crate) fn assemble_p3(model: &SystemModel, state: &BeamformerState) -> FractionalData {
    let ch = &model.channels;
    let kk = model.num_subcarriers();
    let users = model.num_users();
    let (n_b, n_u) = (ch.n_bs(), ch.n_user());
    let vf: Vec<CMat> = (0..kk).map(|k| &model.rhs_response[k] * &state.f[k]).collect();

    let mut num = Vec::new();
    let mut den = Vec::new();
    for t in 0..ch.num_targets() {
        let mut sig = SquareSum::new(n_b);
        let mut int = SquareSum::new(n_b);
        for k in 0..kk {
            let w = BeamformerState::block(&state.w_radar[t], k, n_b);
            if norm_sqr(&w) == 0.0 {
                continue;
            }
            let add = |sc: Scatterer, target: &mut SquareSum| {
                let (_, _, alpha) = ch.scatterer(sc, k);
                let v = ch.radar_path(sc, k, &state.phi);
                let coef = alpha * alpha * w.dotc(&v).norm_sqr();
                for u in 0..users {
                    let coeffs: Vec<(usize, C64)> = (0..n_b).map(|p| (p, v[p] * vf[k][(p, u)])).collect();
                    push_abs2(target, coef, C64::new(0.0, 0.0), &coeffs, None);
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
    for u in 0..users {
        let mut sig = SquareSum::new(n_b);
        let mut int = SquareSum::new(n_b);
        for k in 0..kk {
            let w = BeamformerState::block(&state.w_comm[u], k, n_u);
            if norm_sqr(&w) == 0.0 {
                continue;
            }
            let row = w.adjoint() * ch.comm_channel(u, k, &state.phi);
            for j in 0..users {
                let coeffs: Vec<(usize, C64)> = (0..n_b).map(|p| (p, row[p] * vf[k][(p, j)])).collect();
                push_abs2(if j == u { &mut sig } else { &mut int }, 1.0, C64::new(0.0, 0.0), &coeffs, None);
            }
        }
        int.constant = model.comm_noise * norm_sqr(&state.w_comm[u]);
        comm_num.push(sig);
        comm_den.push(int);
    }

    let mut constraints: Vec<Quadratic> = (0..kk)
        .map(|k| {
            let mut pw = SquareSum::new(n_b);
            for p in 0..n_b {
                let row_energy: f64 = vf[k].row(p).iter().map(|z| z.norm_sqr()).sum();
                pw.push(row_energy, 0.0, vec![(p, 1.0)]);
            }
            budget_constraint(&pw, model.power_budget)
        })
        .collect();
    for p in 0..n_b {
        let mut e = RVec::zeros(n_b);
        e[p] = 0.5;
        constraints.push(Quadratic::affine(e.clone(), -1.0));
        constraints.push(Quadratic::affine(-e, 0.0));
    }
    FractionalData { dim: n_b, num, den, comm_num, comm_den, eta_hat: model.eta_hat(), constraints }
}

/// Amplitudes maximizing the minorized worst radar ratio.
pub fn solve_p3(
    model: &SystemModel,
    state: &BeamformerState,
    enforce_comm: bool,
    opts: &DinkelbachOptions,
) -> Result<(DVector<f64>, DinkelbachResult)> {
    let data = assemble_p3(model, state);
    let y0 = state.m.clone();
    let out = dinkelbach(&data.surrogate(&y0, enforce_comm), &y0, opts)?;
    let m = out.y.map(|v| v.clamp(0.0, 1.0));
    Ok((m, out))
}
