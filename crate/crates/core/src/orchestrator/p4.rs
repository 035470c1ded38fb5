//! RIS phases `φ`.
//!
//! With every other block fixed the radar SINR is a ratio of quartics in `φ`.
//! The echo seen by filter `w` from a scatterer with path
//! `v(φ) = h + Gᵀ·diag(b)·φ` factors as `|wᴴv(φ)|²·‖Xᵀv(φ)‖²`; the first
//! factor is taken in the copy `φ` and the second in the consensus copy `ψ`.

use crate::channel::Scatterer;
use crate::linalg::{hermitian_max_eigenvalue, norm_sqr, CMat, CVec, C64};
use crate::metrics::{BeamformerState, SystemModel};
use crate::solvers::cadmm::LinearConstraint;
use crate::solvers::{cadmm_phase, Bilinear, CadmmOptions, CadmmResult, ComplexAffine, ManifoldProblem, Product, SquaredSum};

/// `a0 + γᴴφ` for `wᴴ·v(φ)`: `a0 = wᴴh`, `γ = conj(b) ⊙ (conj(G)·w)`.
fn filter_response(w: &CVec, h: &CVec, b: &CVec, g: &CMat) -> ComplexAffine {
    let gw = g.map(|z| z.conj()) * w;
    ComplexAffine { a0: w.dotc(h), gamma: b.map(|z| z.conj()).component_mul(&gw) }
}

/// Rows of `Xᵀ·v(ψ)`, one per user stream.
fn reflected_streams(x: &CMat, h: &CVec, b: &CVec, g: &CMat) -> Vec<ComplexAffine> {
    (0..x.ncols())
        .map(|u| {
            let xu = x.column(u).into_owned();
            // xuᵀ·(h + Gᵀ·diag(b)·ψ) = xuᵀh + (G·xu ⊙ b)ᵀ·ψ
            let lin = (g * &xu).component_mul(b);
            ComplexAffine { a0: xu.dot(h), gamma: lin.map(|z| z.conj()) }
        })
        .collect()
}

/// Radar branches `(f_t, g_t)`, each scaled by `N_R / g_t` at the current
/// phases so that a single element moves the ratio by O(1) against the unit
/// consensus penalty.
pub fn radar_branches(model: &SystemModel, state: &BeamformerState) -> Vec<(Bilinear, Bilinear)> {
    let ch = &model.channels;
    let n_b = ch.n_bs();
    let n_r = ch.n_ris() as f64;
    let xs: Vec<CMat> = (0..model.num_subcarriers()).map(|k| state.radiated(model, k)).collect();
    (0..ch.num_targets())
        .map(|t| {
            let mut num = Bilinear::default();
            let mut den = Bilinear { products: Vec::new(), constant: model.radar_noise * norm_sqr(&state.w_radar[t]) };
            for (k, x) in xs.iter().enumerate() {
                let w = BeamformerState::block(&state.w_radar[t], k, n_b);
                if norm_sqr(&w) == 0.0 {
                    continue;
                }
                let add = |sc: Scatterer, target: &mut Bilinear| {
                    let (h, b, alpha) = ch.scatterer(sc, k);
                    target.products.push(Product {
                        coef: alpha * alpha,
                        left: filter_response(&w, h, b, &ch.g[k]),
                        right: reflected_streams(x, h, b, &ch.g[k]),
                    });
                };
                add(Scatterer::Target(t), &mut num);
                for sc in ch.interferers(t) {
                    add(sc, &mut den);
                }
            }
            let s = den.value(&state.phi, &state.phi);
            if s > 0.0 {
                num.scale(n_r / s);
                den.scale(n_r / s);
            }
            (num, den)
        })
        .collect()
}

/// User `u`'s summed signal and interference-plus-noise as quadratics in `φ`.
pub fn comm_quadratics(model: &SystemModel, state: &BeamformerState, u: usize) -> (SquaredSum, SquaredSum) {
    let ch = &model.channels;
    let n_u = ch.n_user();
    let mut sig = SquaredSum::default();
    let mut int = SquaredSum { terms: Vec::new(), constant: model.comm_noise * norm_sqr(&state.w_comm[u]) };
    for k in 0..model.num_subcarriers() {
        let w = BeamformerState::block(&state.w_comm[u], k, n_u);
        if norm_sqr(&w) == 0.0 {
            continue;
        }
        let x = state.radiated(model, k);
        let direct = w.adjoint() * &ch.h_dir[u][k] * &x;
        let hw = ch.h_ris[u][k].adjoint() * &w;
        let gx = &ch.g[k] * &x;
        for j in 0..x.ncols() {
            // wᴴ(H_dir + H_ris·diag(φ)·G)x_j = wᴴH_dir·x_j + Σ_i conj(hw_i)·(G·x_j)_i·φ_i
            let gamma = CVec::from_fn(hw.len(), |i, _| hw[i] * gx[(i, j)].conj());
            let term = (1.0, ComplexAffine { a0: direct[(0, j)], gamma });
            if j == u {
                sig.terms.push(term);
            } else {
                int.terms.push(term);
            }
        }
    }
    (sig, int)
}

/// Affine inner approximation of `N_u(φ) ≥ η̂·D_u(φ)` around `φ_l`, valid on
/// the manifold and tight at `φ_l`.
///
/// `N_u` is replaced by its tangent minorizer. For `D_u = φᴴQφ + 2Re(cᴴφ) + d`
/// the bound `φᴴQφ ≤ 2λN − 2Re(((λI − Q)φ_l)ᴴφ) − φ_lᴴQφ_l`, with `λ = λ_max(Q)`
/// and `‖φ‖² = ‖φ_l‖² = N`, gives an affine majorizer. The resulting row
/// `η̂·D̂_u − N̂_u ≤ 0` is divided by `η̂·D_u(φ_l)`.
pub fn comm_constraint(model: &SystemModel, state: &BeamformerState, u: usize) -> LinearConstraint {
    let phi = &state.phi;
    let n = phi.len();
    let eta_hat = model.eta_hat();
    let (sig, int) = comm_quadratics(model, state, u);
    let (c_n, d_n) = sig.minorize(phi, n);

    let q = int.hessian_matrix(n);
    let lmax = hermitian_max_eigenvalue(&q).max(0.0);
    let qphi = &q * phi;
    let quad0 = phi.dotc(&qphi).re;
    let mut c_d = CVec::zeros(n);
    let mut d_d = int.constant;
    for (w, a) in &int.terms {
        c_d.axpy(a.a0 * *w, &a.gamma, C64::new(1.0, 0.0));
        d_d += w * a.a0.norm_sqr();
    }
    let slope = &c_d - (phi * C64::new(lmax, 0.0) - &qphi);
    let offset = 2.0 * lmax * n as f64 - quad0 + d_d;

    let scale = eta_hat * int.value(phi).max(f64::MIN_POSITIVE);
    let p = (slope * C64::new(eta_hat, 0.0) - c_n) / C64::new(scale, 0.0);
    let p0 = -(eta_hat * offset - d_n) / scale;
    LinearConstraint { p, p0 }
}

pub fn assemble_p4(model: &SystemModel, state: &BeamformerState, enforce_comm: bool) -> ManifoldProblem {
    let constraints = if enforce_comm {
        (0..model.num_users()).map(|u| comm_constraint(model, state, u)).collect()
    } else {
        Vec::new()
    };
    ManifoldProblem { branches: radar_branches(model, state), constraints }
}

/// Run C-ADMM from the current phases.
pub fn solve_p4(model: &SystemModel, state: &BeamformerState, enforce_comm: bool, opts: &CadmmOptions) -> CadmmResult {
    cadmm_phase(&assemble_p4(model, state, enforce_comm), &state.phi, opts)
}
