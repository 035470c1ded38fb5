//! Riemannian steepest descent on the complex circle manifold `{φ : |φ_i| = 1}`.

use crate::linalg::{CMat, CVec, C64};

/// Smooth real function of a complex vector. The gradient follows the
/// convention `df = Re(gᴴ·dφ)`.
pub trait ManifoldObjective {
    fn value(&self, phi: &CVec) -> f64;
    fn gradient(&self, phi: &CVec) -> CVec;
}

/// Scalar affine map `a0 + γᴴx`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexAffine {
    pub a0: C64,
    pub gamma: CVec,
}

impl ComplexAffine {
    pub fn eval(&self, x: &CVec) -> C64 {
        self.a0 + self.gamma.dotc(x)
    }
}

/// `Σ weight·|a0 + γᴴx|² + constant`, a convex quadratic kept in factored form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SquaredSum {
    pub terms: Vec<(f64, ComplexAffine)>,
    pub constant: f64,
}

impl SquaredSum {
    pub fn value(&self, x: &CVec) -> f64 {
        self.terms.iter().map(|(w, a)| w * a.eval(x).norm_sqr()).sum::<f64>() + self.constant
    }

    pub fn gradient(&self, x: &CVec) -> CVec {
        let mut g = CVec::zeros(x.len());
        for (w, a) in &self.terms {
            let e = a.eval(x);
            g.axpy(e * (2.0 * w), &a.gamma, ONE);
        }
        g
    }

    /// Tangent minorizer at `x0`, returned as `(c, d)` with value `2·Re(cᴴx) + d`.
    pub fn minorize(&self, x0: &CVec, dim: usize) -> (CVec, f64) {
        let mut c = CVec::zeros(dim);
        let mut d = self.constant;
        for (w, a) in &self.terms {
            // |e|² ≥ 2·Re(conj(e0)·e) − |e0|²
            let e0 = a.eval(x0);
            c.axpy(e0 * *w, &a.gamma, ONE);
            d += w * (2.0 * (e0.conj() * a.a0).re - e0.norm_sqr());
        }
        (c, d)
    }

    /// Dense Hermitian matrix `Q` of the quadratic part.
    pub fn hessian_matrix(&self, dim: usize) -> CMat {
        let mut q = CMat::zeros(dim, dim);
        for (w, a) in &self.terms {
            crate::linalg::add_rank_one(&mut q, &a.gamma, *w);
        }
        q
    }
}

impl ManifoldObjective for SquaredSum {
    fn value(&self, phi: &CVec) -> f64 {
        SquaredSum::value(self, phi)
    }

    fn gradient(&self, phi: &CVec) -> CVec {
        SquaredSum::gradient(self, phi)
    }
}

const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct RsdResult {
    pub phi: CVec,
    /// Objective at the start point followed by one entry per accepted step.
    pub values: Vec<f64>,
}

/// Project `g` onto the tangent space at `phi`.
pub fn riemannian_gradient(g: &CVec, phi: &CVec) -> CVec {
    CVec::from_fn(phi.len(), |i, _| g[i] - phi[i] * (g[i] * phi[i].conj()).re)
}

/// Per-entry normalization to unit modulus; zero entries map to 1.
pub fn retract(x: &CVec) -> CVec {
    x.map(|z| {
        let r = z.norm();
        if r > 0.0 {
            z / r
        } else {
            ONE
        }
    })
}

/// Minimize `obj` over the unit-modulus manifold from `phi0`.
///
/// Each iteration tries `step` and halves it until the objective decreases;
/// the loop ends early when no decrease is found or the gradient vanishes.
pub fn rsd_unit_modulus(obj: &dyn ManifoldObjective, phi0: &CVec, step: f64, iters: usize) -> RsdResult {
    let mut phi = retract(phi0);
    let mut value = obj.value(&phi);
    let mut values = vec![value];
    for _ in 0..iters {
        let rg = riemannian_gradient(&obj.gradient(&phi), &phi);
        let gn = rg.norm();
        if !(gn > 1e-14 * (1.0 + value.abs())) {
            break;
        }
        let mut s = step;
        let mut moved = false;
        for _ in 0..60 {
            let trial = retract(&(&phi - &rg * C64::new(s, 0.0)));
            let tv = obj.value(&trial);
            if tv < value {
                phi = trial;
                value = tv;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if !moved {
            break;
        }
        values.push(value);
    }
    RsdResult { phi, values }
}
