//! Max-min of concave quadratics under convex quadratic constraints, solved in
//! epigraph form with a primal-dual interior-point method.
//!
//! Everything here is real. Complex unknowns enter through
//! [`crate::linalg::embed_hermitian`] / [`crate::linalg::embed_vec`].

use nalgebra::linalg::{Cholesky, LU};

use crate::error::{invalid, Error, Result};
use crate::linalg::{RMat, RVec};

/// `yᵀPy + 2qᵀy + r`; `p = None` means an affine function.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    pub p: Option<RMat>,
    pub q: RVec,
    pub r: f64,
}

impl Quadratic {
    pub fn new(p: RMat, q: RVec, r: f64) -> Self {
        Self { p: Some(p), q, r }
    }

    pub fn affine(q: RVec, r: f64) -> Self {
        Self { p: None, q, r }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn value(&self, y: &RVec) -> f64 {
        let lin = 2.0 * self.q.dot(y) + self.r;
        match &self.p {
            Some(p) => y.dot(&(p * y)) + lin,
            None => lin,
        }
    }

    pub fn gradient(&self, y: &RVec) -> RVec {
        match &self.p {
            Some(p) => (p * y + &self.q) * 2.0,
            None => &self.q * 2.0,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { p: self.p.as_ref().map(|p| p * s), q: &self.q * s, r: self.r * s }
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &Quadratic, s: f64) -> Self {
        let p = match (&self.p, &other.p) {
            (Some(a), Some(b)) => Some(a + b * s),
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b * s),
            (None, None) => None,
        };
        Self { p, q: &self.q + &other.q * s, r: self.r + other.r * s }
    }

    pub fn with_constant(mut self, r: f64) -> Self {
        self.r += r;
        self
    }
}

/// `Σ weight·(c + aᵀy)² + constant` with sparse real `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareSum {
    pub dim: usize,
    pub terms: Vec<(f64, f64, Vec<(usize, f64)>)>,
    pub constant: f64,
}

impl SquareSum {
    pub fn new(dim: usize) -> Self {
        Self { dim, terms: Vec::new(), constant: 0.0 }
    }

    pub fn push(&mut self, weight: f64, c: f64, a: Vec<(usize, f64)>) {
        self.terms.push((weight, c, a));
    }

    fn lin(c: f64, a: &[(usize, f64)], y: &RVec) -> f64 {
        c + a.iter().map(|(i, v)| v * y[*i]).sum::<f64>()
    }

    pub fn value(&self, y: &RVec) -> f64 {
        self.terms.iter().map(|(w, c, a)| w * Self::lin(*c, a, y).powi(2)).sum::<f64>() + self.constant
    }

    pub fn to_quadratic(&self) -> Quadratic {
        let mut p = RMat::zeros(self.dim, self.dim);
        let mut q = RVec::zeros(self.dim);
        let mut r = self.constant;
        for (w, c, a) in &self.terms {
            for (i, vi) in a {
                q[*i] += w * c * vi;
                for (j, vj) in a {
                    p[(*i, *j)] += w * vi * vj;
                }
            }
            r += w * c * c;
        }
        Quadratic::new(p, q, r)
    }

    /// Tangent minorizer at `y0` (valid for nonnegative weights).
    pub fn minorize(&self, y0: &RVec) -> Quadratic {
        let mut q = RVec::zeros(self.dim);
        let mut r = self.constant;
        for (w, c, a) in &self.terms {
            let e0 = Self::lin(*c, a, y0);
            // (c + aᵀy)² ≥ 2·e0·(c + aᵀy) − e0²
            for (i, vi) in a {
                q[*i] += w * e0 * vi;
            }
            r += w * (2.0 * e0 * c - e0 * e0);
        }
        Quadratic::affine(q, r)
    }

    pub fn scale(&mut self, s: f64) {
        for t in &mut self.terms {
            t.0 *= s;
        }
        self.constant *= s;
    }
}

/// `max_y min_t branches[t](y)` subject to `constraints[i](y) ≤ 0`.
/// Branches must be concave, constraints convex.
#[derive(Debug, Clone, PartialEq)]
pub struct EpigraphProblem {
    pub dim: usize,
    pub branches: Vec<Quadratic>,
    pub constraints: Vec<Quadratic>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcqpOptions {
    pub tol_gap: f64,
    pub tol_feas: f64,
    pub max_iter: usize,
    pub mu: f64,
}

impl Default for QcqpOptions {
    fn default() -> Self {
        Self { tol_gap: 1e-10, tol_feas: 1e-10, max_iter: 600, mu: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcqpSolution {
    pub y: RVec,
    /// `min_t branches[t](y)`.
    pub objective: f64,
    pub iterations: usize,
    pub max_violation: f64,
    pub converged: bool,
}

impl EpigraphProblem {
    pub fn objective(&self, y: &RVec) -> f64 {
        self.branches.iter().map(|b| b.value(y)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_violation(&self, y: &RVec) -> f64 {
        self.constraints.iter().map(|c| c.value(y)).fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        if self.branches.is_empty() {
            return Err(invalid("epigraph problem needs at least one branch"));
        }
        if self.branches.iter().chain(&self.constraints).any(|q| q.dim() != self.dim) {
            return Err(invalid("quadratic dimension mismatch"));
        }
        Ok(())
    }
}

/// Inequality `yᵀPy + 2qᵀy + last·z_n + r ≤ 0` on `z = (y, z_n)`.
struct Ineq<'a> {
    quad: std::borrow::Cow<'a, Quadratic>,
    last: f64,
}

impl Ineq<'_> {
    fn value(&self, z: &RVec, n: usize) -> f64 {
        let y = z.rows(0, n).into_owned();
        self.quad.value(&y) + self.last * z[n]
    }

    fn gradient(&self, z: &RVec, n: usize) -> RVec {
        let y = z.rows(0, n).into_owned();
        let g = self.quad.gradient(&y);
        let mut out = RVec::zeros(n + 1);
        out.rows_mut(0, n).copy_from(&g);
        out[n] = self.last;
        out
    }
}

struct IpmOutcome {
    z: RVec,
    iterations: usize,
    converged: bool,
}

/// Log-barrier interior-point iterations minimizing `z_n` (`sign = 1`) or
/// `-z_n` (`sign = -1`) from a strictly feasible `z0`. `stop` is checked after
/// every Newton step.
fn barrier(
    n: usize,
    sign: f64,
    ineqs: &[Ineq<'_>],
    z0: RVec,
    opts: &QcqpOptions,
    stop: &dyn Fn(&RVec) -> bool,
) -> Result<IpmOutcome> {
    let m = ineqs.len().max(1) as f64;
    let dim = n + 1;
    let mut c = RVec::zeros(dim);
    c[n] = sign;
    let mut z = z0;
    let values = |z: &RVec| -> Vec<f64> { ineqs.iter().map(|g| g.value(z, n)).collect() };
    let mut f = values(&z);
    if f.iter().any(|v| *v >= 0.0) {
        return Err(Error::Numerical("interior-point start is not strictly feasible".into()));
    }
    let (alpha, beta) = (0.01, 0.5);
    let phi = |z: &RVec, f: &[f64], t: f64| -> f64 { t * c.dot(z) - f.iter().map(|v| (-v).ln()).sum::<f64>() };

    let mut t = 1.0f64;
    let mut steps = 0;
    loop {
        // centering
        loop {
            if steps >= opts.max_iter {
                return Ok(IpmOutcome { z, iterations: steps, converged: false });
            }
            let mut grad = &c * t;
            let mut h = RMat::zeros(dim, dim);
            for (i, g) in ineqs.iter().enumerate() {
                let gi = g.gradient(&z, n);
                let inv = -1.0 / f[i];
                grad += &gi * inv;
                h.ger(inv * inv, &gi, &gi, 1.0);
                if let Some(p) = &g.quad.p {
                    let mut blk = h.view_mut((0, 0), (n, n));
                    blk += p * (2.0 * inv);
                }
            }
            let scale = (0..dim).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
            for i in 0..dim {
                h[(i, i)] += 1e-13 * scale;
            }
            let dz = match Cholesky::new(h.clone()) {
                Some(ch) => ch.solve(&-&grad),
                None => LU::new(h).solve(&-&grad).ok_or_else(|| Error::Numerical("singular Newton system".into()))?,
            };
            let slope = grad.dot(&dz);
            if -slope / 2.0 <= opts.tol_feas {
                break;
            }
            let phi0 = phi(&z, &f, t);
            let mut step = 1.0;
            let mut moved = false;
            while step > 1e-14 {
                let zt = &z + &dz * step;
                let ft = values(&zt);
                if ft.iter().all(|v| *v < 0.0) {
                    let phit = phi(&zt, &ft, t);
                    if phit <= phi0 + alpha * step * slope {
                        // below roundoff the barrier value stops carrying information
                        moved = phi0 - phit > 1e-14 * (1.0 + phi0.abs());
                        z = zt;
                        f = ft;
                        break;
                    }
                }
                step *= beta;
            }
            steps += 1;
            if stop(&z) {
                return Ok(IpmOutcome { z, iterations: steps, converged: true });
            }
            if !moved {
                break;
            }
        }
        if m / t <= opts.tol_gap {
            return Ok(IpmOutcome { z, iterations: steps, converged: true });
        }
        t *= opts.mu;
    }
}

/// Find a strictly feasible point of `constraints(y) ≤ 0`, starting from `y0`.
pub fn find_interior_point(constraints: &[Quadratic], y0: &RVec, opts: &QcqpOptions) -> Result<RVec> {
    let n = y0.len();
    let worst = constraints.iter().map(|c| c.value(y0)).fold(f64::NEG_INFINITY, f64::max);
    if worst < -1e-7 || constraints.is_empty() {
        return Ok(y0.clone());
    }
    // min σ  s.t.  c_i(y) ≤ σ,  σ ≥ -1
    let mut ineqs: Vec<Ineq<'_>> =
        constraints.iter().map(|q| Ineq { quad: std::borrow::Cow::Borrowed(q), last: -1.0 }).collect();
    ineqs.push(Ineq { quad: std::borrow::Cow::Owned(Quadratic::affine(RVec::zeros(n), -1.0)), last: -1.0 });
    let mut z0 = RVec::zeros(n + 1);
    z0.rows_mut(0, n).copy_from(y0);
    z0[n] = worst.max(0.0) + 1.0;
    let out = barrier(n, 1.0, &ineqs, z0, opts, &|z: &RVec| z[n] < -0.5)?;
    let sigma = out.z[n];
    if sigma >= -1e-10 {
        return Err(Error::Infeasible(format!("constraints have no interior (phase-one optimum {sigma:.3e})")));
    }
    Ok(out.z.rows(0, n).into_owned())
}

/// Solve `max_y min_t branches[t](y)` subject to `constraints(y) ≤ 0`.
///
/// `y0` seeds the phase-one search; it need not be feasible.
pub fn solve_epigraph_qcqp(problem: &EpigraphProblem, y0: &RVec, opts: &QcqpOptions) -> Result<QcqpSolution> {
    problem.validate()?;
    if y0.len() != problem.dim {
        return Err(invalid("starting point dimension mismatch"));
    }
    let n = problem.dim;
    let y_int = find_interior_point(&problem.constraints, y0, opts)?;
    // branch t:  s - b_t(y) ≤ 0
    let negated: Vec<Quadratic> = problem.branches.iter().map(|b| b.scaled(-1.0)).collect();
    let mut ineqs: Vec<Ineq<'_>> = negated.into_iter().map(|q| Ineq { quad: std::borrow::Cow::Owned(q), last: 1.0 }).collect();
    ineqs.extend(problem.constraints.iter().map(|q| Ineq { quad: std::borrow::Cow::Borrowed(q), last: 0.0 }));
    let obj0 = problem.objective(&y_int);
    let mut z0 = RVec::zeros(n + 1);
    z0.rows_mut(0, n).copy_from(&y_int);
    z0[n] = obj0 - 0.1 * (1.0 + obj0.abs());
    let out = barrier(n, -1.0, &ineqs, z0, opts, &|_| false)?;
    let y = out.z.rows(0, n).into_owned();
    Ok(QcqpSolution {
        objective: problem.objective(&y),
        max_violation: problem.max_violation(&y),
        y,
        iterations: out.iterations,
        converged: out.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(n: usize, radius2: f64) -> Quadratic {
        Quadratic::new(RMat::identity(n, n), RVec::zeros(n), -radius2)
    }

    #[test]
    fn linear_objective_over_ball() {
        let c = RVec::from_vec(vec![3.0, -4.0]);
        let p = EpigraphProblem {
            dim: 2,
            branches: vec![Quadratic::affine(&c * 0.5, 0.0)],
            constraints: vec![ball(2, 1.0)],
        };
        let sol = solve_epigraph_qcqp(&p, &RVec::zeros(2), &QcqpOptions::default()).unwrap();
        assert!(sol.converged);
        assert!((sol.y[0] - 0.6).abs() < 1e-6 && (sol.y[1] + 0.8).abs() < 1e-6);
        assert!((sol.objective - 5.0).abs() < 1e-8);
        assert!(sol.max_violation <= 1e-8);
    }

    #[test]
    fn concave_bowl_peaks_at_origin() {
        let p = EpigraphProblem {
            dim: 3,
            branches: vec![Quadratic::new(-RMat::identity(3, 3) * 2.0, RVec::zeros(3), 0.0)],
            constraints: vec![],
        };
        let sol = solve_epigraph_qcqp(&p, &RVec::from_element(3, 1.0), &QcqpOptions::default()).unwrap();
        assert!(sol.y.norm() < 1e-5, "{sol:?}");
    }

    #[test]
    fn phase_one_reports_infeasibility() {
        // ‖y‖² ≤ 1 and y₀ ≥ 2
        let p = EpigraphProblem {
            dim: 2,
            branches: vec![Quadratic::affine(RVec::zeros(2), 0.0)],
            constraints: vec![ball(2, 1.0), Quadratic::affine(RVec::from_vec(vec![-0.5, 0.0]), 2.0)],
        };
        let err = solve_epigraph_qcqp(&p, &RVec::zeros(2), &QcqpOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn square_sum_minorizer_is_tight() {
        let mut s = SquareSum::new(3);
        s.push(2.0, 0.5, vec![(0, 1.0), (2, -1.0)]);
        s.push(1.0, -1.0, vec![(1, 3.0)]);
        s.constant = 0.25;
        let y0 = RVec::from_vec(vec![0.2, -0.4, 1.0]);
        let y1 = RVec::from_vec(vec![-1.0, 0.3, 0.5]);
        let q = s.to_quadratic();
        assert!((q.value(&y1) - s.value(&y1)).abs() < 1e-12);
        let lo = s.minorize(&y0);
        assert!((lo.value(&y0) - s.value(&y0)).abs() < 1e-12);
        assert!(lo.value(&y1) <= s.value(&y1) + 1e-12);
    }
}
