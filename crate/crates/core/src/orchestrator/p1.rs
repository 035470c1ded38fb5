//! Receive filters: radar filters `w_t` and user combiners `w_u`.
//!
//! Both SINRs are ratios of block-diagonal (over subcarriers) quadratic forms
//! in the stacked filter, so the stacked maximizer concentrates on the
//! subcarrier with the largest per-block generalized eigenvalue.

use crate::channel::Scatterer;
use crate::error::Result;
use crate::linalg::{add_rank_one, norm_sqr, CMat, CVec, C64};
use crate::metrics::{BeamformerState, SystemModel};
use crate::solvers::grq_max;

/// Per-subcarrier `(signal, interference)` blocks, noise excluded.
#[derive(Debug, Clone)]
pub struct P1Blocks {
    pub radar: Vec<Vec<(CMat, CMat)>>,
    pub comm: Vec<Vec<(CMat, CMat)>>,
}

pub fn assemble_p1(model: &SystemModel, state: &BeamformerState) -> P1Blocks {
    let ch = &model.channels;
    let (n_b, n_u) = (ch.n_bs(), ch.n_user());
    let kk = model.num_subcarriers();
    let xs: Vec<CMat> = (0..kk).map(|k| state.radiated(model, k)).collect();

    let echo = |s: Scatterer, k: usize, q: &mut CMat| {
        let (_, _, alpha) = ch.scatterer(s, k);
        let v = ch.radar_path(s, k, &state.phi);
        let reflect = norm_sqr(&(xs[k].transpose() * &v));
        add_rank_one(q, &v, alpha * alpha * reflect);
    };
    let radar = (0..ch.num_targets())
        .map(|t| {
            (0..kk)
                .map(|k| {
                    let mut sig = CMat::zeros(n_b, n_b);
                    echo(Scatterer::Target(t), k, &mut sig);
                    let mut int = CMat::zeros(n_b, n_b);
                    for s in ch.interferers(t) {
                        echo(s, k, &mut int);
                    }
                    (sig, int)
                })
                .collect()
        })
        .collect();

    let comm = (0..ch.num_users())
        .map(|u| {
            (0..kk)
                .map(|k| {
                    let y = ch.comm_channel(u, k, &state.phi) * &xs[k];
                    let mut sig = CMat::zeros(n_u, n_u);
                    let mut int = CMat::zeros(n_u, n_u);
                    for j in 0..y.ncols() {
                        let col = y.column(j).into_owned();
                        add_rank_one(if j == u { &mut sig } else { &mut int }, &col, 1.0);
                    }
                    (sig, int)
                })
                .collect()
        })
        .collect();
    P1Blocks { radar, comm }
}

/// Stacked maximizer of `Σ_k w_kᴴA_kw_k / Σ_k w_kᴴ(B_k + σ²I)w_k`.
/// Ties between subcarriers go to the lowest index.
fn stacked_grq(blocks: &[(CMat, CMat)], noise: f64) -> Result<(f64, CVec)> {
    let n = blocks[0].0.nrows();
    let mut best: Option<(f64, usize, CVec)> = None;
    for (k, (a, b)) in blocks.iter().enumerate() {
        let denom = b + CMat::identity(n, n) * C64::new(noise, 0.0);
        let (lambda, w) = grq_max(a, &denom)?;
        if best.as_ref().is_none_or(|(l, _, _)| lambda > *l) {
            best = Some((lambda, k, w));
        }
    }
    let (lambda, k, w) = best.expect("at least one subcarrier");
    let mut stacked = CVec::zeros(n * blocks.len());
    stacked.rows_mut(k * n, n).copy_from(&w);
    Ok((lambda, stacked))
}

/// Optimal filters for the given blocks: `(w_radar, w_comm)`.
pub fn solve_p1(model: &SystemModel, blocks: &P1Blocks) -> Result<(Vec<CVec>, Vec<CVec>)> {
    let radar = blocks.radar.iter().map(|b| stacked_grq(b, model.radar_noise).map(|r| r.1)).collect::<Result<_>>()?;
    let comm = blocks.comm.iter().map(|b| stacked_grq(b, model.comm_noise).map(|r| r.1)).collect::<Result<_>>()?;
    Ok((radar, comm))
}

/// Replace the filters of `state` by the P1 optimum.
pub fn update_filters(model: &SystemModel, state: &mut BeamformerState) -> Result<()> {
    let (wr, wc) = solve_p1(model, &assemble_p1(model, state))?;
    state.w_radar = wr;
    state.w_comm = wc;
    Ok(())
}
