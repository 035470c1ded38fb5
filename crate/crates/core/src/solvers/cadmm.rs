//! Consensus-ADMM for max-min ratios of quartic functions of unit-modulus phases.
//!
//! Each numerator and denominator is written as a function `f(φ, ψ)` that is a
//! convex quadratic in either argument when the other is fixed, with
//! `f(φ, φ)` the true value. The variable is duplicated (`φ = ψ`), both copies
//! are updated by Riemannian steepest descent, and the consensus and the
//! linear user constraints are enforced through multipliers.

use crate::linalg::{norm_sqr, re_dot, CVec, C64};

use super::rsd::{rsd_unit_modulus, ComplexAffine, ManifoldObjective, SquaredSum};

/// `coef·|left(φ)|²·Σ_j |right_j(ψ)|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub coef: f64,
    pub left: ComplexAffine,
    pub right: Vec<ComplexAffine>,
}

/// Sum of [`Product`]s plus a constant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Bilinear {
    pub products: Vec<Product>,
    pub constant: f64,
}

impl Bilinear {
    pub fn value(&self, phi: &CVec, psi: &CVec) -> f64 {
        self.products
            .iter()
            .map(|p| p.coef * p.left.eval(phi).norm_sqr() * p.right.iter().map(|r| r.eval(psi).norm_sqr()).sum::<f64>())
            .sum::<f64>()
            + self.constant
    }

    /// The quadratic in `φ` obtained by fixing `ψ`.
    pub fn in_first(&self, psi: &CVec) -> SquaredSum {
        SquaredSum {
            terms: self
                .products
                .iter()
                .map(|p| (p.coef * p.right.iter().map(|r| r.eval(psi).norm_sqr()).sum::<f64>(), p.left.clone()))
                .collect(),
            constant: self.constant,
        }
    }

    /// The quadratic in `ψ` obtained by fixing `φ`.
    pub fn in_second(&self, phi: &CVec) -> SquaredSum {
        let mut terms = Vec::new();
        for p in &self.products {
            let w = p.coef * p.left.eval(phi).norm_sqr();
            terms.extend(p.right.iter().map(|r| (w, r.clone())));
        }
        SquaredSum { terms, constant: self.constant }
    }

    pub fn scale(&mut self, s: f64) {
        for p in &mut self.products {
            p.coef *= s;
        }
        self.constant *= s;
    }
}

/// `2·Re(pᴴφ) − p0 ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub p: CVec,
    pub p0: f64,
}

impl LinearConstraint {
    pub fn value(&self, phi: &CVec) -> f64 {
        2.0 * re_dot(&self.p, phi) - self.p0
    }
}

/// `max_φ min_t f_t(φ,φ)/g_t(φ,φ)` over unit-modulus `φ` with linear side constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldProblem {
    /// `(numerator, denominator)` per branch.
    pub branches: Vec<(Bilinear, Bilinear)>,
    pub constraints: Vec<LinearConstraint>,
}

impl ManifoldProblem {
    fn ratio_at(&self, phi: &CVec, psi: &CVec) -> f64 {
        self.branches.iter().map(|(f, g)| f.value(phi, psi) / g.value(phi, psi)).fold(f64::INFINITY, f64::min)
    }

    /// Worst true ratio `min_t f_t(φ,φ)/g_t(φ,φ)`.
    pub fn min_ratio(&self, phi: &CVec) -> f64 {
        self.ratio_at(phi, phi)
    }

    pub fn max_violation(&self, phi: &CVec) -> f64 {
        self.constraints.iter().map(|c| c.value(phi)).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CadmmOptions {
    pub rho: f64,
    /// Step of the constraint-multiplier ascent.
    pub beta: f64,
    pub zeta: f64,
    pub max_iter: usize,
    pub rsd_step: f64,
    pub rsd_iters: usize,
}

impl Default for CadmmOptions {
    fn default() -> Self {
        Self { rho: 1.0, beta: 1.0, zeta: 1e-6, max_iter: 24, rsd_step: 3.98, rsd_iters: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CadmmResult {
    /// Best constraint-satisfying iterate (the start point if none improved on it).
    pub phi: CVec,
    pub ratio: f64,
    pub start_ratio: f64,
    pub iterations: usize,
    /// `λ` at the start of every iteration.
    pub lambdas: Vec<f64>,
    /// `‖φ_l − φ_{l−1}‖²` per iteration.
    pub steps: Vec<f64>,
}

/// Penalized partial Lagrangian in one copy of the variable, negated for minimization.
struct Subproblem<'a> {
    /// Tangent minorizers of the numerators, weighted by `z`: `2·Re(linᴴx)`.
    lin: CVec,
    /// `Σ z_t·λ·g_t(x)`.
    quads: Vec<(f64, SquaredSum)>,
    /// `+Re(shiftᴴx)`.
    shift: CVec,
    center: &'a CVec,
    rho: f64,
    constraints: &'a [LinearConstraint],
    multipliers: &'a [f64],
}

impl ManifoldObjective for Subproblem<'_> {
    fn value(&self, x: &CVec) -> f64 {
        let mut v = -2.0 * re_dot(&self.lin, x) + re_dot(&self.shift, x);
        v += self.quads.iter().map(|(w, q)| w * q.value(x)).sum::<f64>();
        v += 0.5 * self.rho * norm_sqr(&(x - self.center));
        for (c, m) in self.constraints.iter().zip(self.multipliers) {
            let cv = c.value(x);
            v += m * cv + 0.5 * self.rho * cv.max(0.0).powi(2);
        }
        v
    }

    fn gradient(&self, x: &CVec) -> CVec {
        let mut g = &self.shift - &self.lin * C64::new(2.0, 0.0);
        for (w, q) in &self.quads {
            g.axpy(C64::new(*w, 0.0), &q.gradient(x), C64::new(1.0, 0.0));
        }
        g.axpy(C64::new(self.rho, 0.0), &(x - self.center), C64::new(1.0, 0.0));
        for (c, m) in self.constraints.iter().zip(self.multipliers) {
            let weight = m + self.rho * c.value(x).max(0.0);
            if weight != 0.0 {
                g.axpy(C64::new(2.0 * weight, 0.0), &c.p, C64::new(1.0, 0.0));
            }
        }
        g
    }
}

/// Branch weights: uniform over the branches within a relative `1e-6` of the worst.
fn worst_branch_weights(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let hits: Vec<bool> = values.iter().map(|v| *v - lo <= 1e-6 * spread).collect();
    let n = hits.iter().filter(|h| **h).count() as f64;
    hits.iter().map(|h| if *h { 1.0 / n } else { 0.0 }).collect()
}

/// Run consensus-ADMM from `phi0` (assumed unit-modulus).
pub fn cadmm_phase(problem: &ManifoldProblem, phi0: &CVec, opts: &CadmmOptions) -> CadmmResult {
    let n = phi0.len();
    let feasible = |x: &CVec| problem.max_violation(x) <= 1e-12;
    let start_ratio = problem.min_ratio(phi0);
    let mut best = (phi0.clone(), start_ratio, feasible(phi0));
    let mut phi = phi0.clone();
    let mut psi = phi0.clone();
    let mut u = CVec::zeros(n);
    let mut w = vec![0.0; problem.constraints.len()];
    let mut lambdas = Vec::new();
    let mut steps = Vec::new();
    let mut iterations = 0;

    for _ in 0..opts.max_iter {
        iterations += 1;
        let lambda = problem.ratio_at(&phi, &psi);
        lambdas.push(lambda);
        let gaps: Vec<f64> =
            problem.branches.iter().map(|(f, g)| f.value(&phi, &psi) - lambda * g.value(&phi, &psi)).collect();
        let z = worst_branch_weights(&gaps);

        // φ-update with ψ fixed
        let mut lin = CVec::zeros(n);
        let mut quads = Vec::new();
        for ((f, g), zt) in problem.branches.iter().zip(&z) {
            if *zt == 0.0 {
                continue;
            }
            let (c, _) = f.in_first(&psi).minorize(&phi, n);
            lin.axpy(C64::new(*zt, 0.0), &c, C64::new(1.0, 0.0));
            quads.push((zt * lambda, g.in_first(&psi)));
        }
        let sub = Subproblem {
            lin,
            quads,
            shift: u.clone(),
            center: &psi,
            rho: opts.rho,
            constraints: &problem.constraints,
            multipliers: &w,
        };
        let new_phi = rsd_unit_modulus(&sub, &phi, opts.rsd_step, opts.rsd_iters).phi;

        // ψ-update with φ fixed
        let mut lin = CVec::zeros(n);
        let mut quads = Vec::new();
        for ((f, g), zt) in problem.branches.iter().zip(&z) {
            if *zt == 0.0 {
                continue;
            }
            let (c, _) = f.in_second(&new_phi).minorize(&psi, n);
            lin.axpy(C64::new(*zt, 0.0), &c, C64::new(1.0, 0.0));
            quads.push((zt * lambda, g.in_second(&new_phi)));
        }
        let sub = Subproblem {
            lin,
            quads,
            shift: -&u,
            center: &new_phi,
            rho: opts.rho,
            constraints: &[],
            multipliers: &[],
        };
        psi = rsd_unit_modulus(&sub, &psi, opts.rsd_step, opts.rsd_iters).phi;

        u += (&new_phi - &psi) * C64::new(opts.rho, 0.0);
        for (wi, c) in w.iter_mut().zip(&problem.constraints) {
            *wi = (*wi + opts.beta * c.value(&new_phi).max(0.0)).max(0.0);
        }

        let step = norm_sqr(&(&new_phi - &phi));
        steps.push(step);
        phi = new_phi;
        for cand in [&phi, &psi] {
            if feasible(cand) {
                let r = problem.min_ratio(cand);
                if !best.2 || r > best.1 {
                    best = (cand.clone(), r, true);
                }
            }
        }
        if step <= opts.zeta {
            break;
        }
    }
    CadmmResult { phi: best.0, ratio: best.1, start_ratio, iterations, lambdas, steps }
}
