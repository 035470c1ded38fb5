use crate::error::{invalid, Result};
use crate::linalg::RVec;

use super::qcqp::{solve_epigraph_qcqp, EpigraphProblem, QcqpOptions, Quadratic};

/// One ratio `num(y) / den(y)`; `num` concave (usually affine), `den` convex and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalBranch {
    pub num: Quadratic,
    pub den: Quadratic,
}

/// `max_y min_t num_t(y)/den_t(y)` subject to `constraints(y) ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalProblem {
    pub dim: usize,
    pub branches: Vec<FractionalBranch>,
    pub constraints: Vec<Quadratic>,
}

impl FractionalProblem {
    /// Worst ratio at `y`.
    pub fn min_ratio(&self, y: &RVec) -> f64 {
        self.branches.iter().map(|b| b.num.value(y) / b.den.value(y)).fold(f64::INFINITY, f64::min)
    }

    fn parametric(&self, lambda: f64) -> EpigraphProblem {
        EpigraphProblem {
            dim: self.dim,
            branches: self.branches.iter().map(|b| b.num.add_scaled(&b.den, -lambda)).collect(),
            constraints: self.constraints.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DinkelbachOptions {
    /// Stop once the parametric optimum `F(λ)` falls to this value.
    pub zeta: f64,
    pub max_iter: usize,
    pub qcqp: QcqpOptions,
}

impl Default for DinkelbachOptions {
    fn default() -> Self {
        Self { zeta: 1e-6, max_iter: 20, qcqp: QcqpOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DinkelbachResult {
    pub y: RVec,
    pub lambda: f64,
    /// `λ` at the start point followed by one entry per accepted iterate.
    pub lambdas: Vec<f64>,
    /// Parametric optima `F(λ_l)`.
    pub f_values: Vec<f64>,
    pub iterations: usize,
}

/// Generalized Dinkelbach iteration for max-min fractional programs.
///
/// `y0` must satisfy the constraints. Iterates are accepted only if the worst
/// ratio does not drop, so the returned `lambdas` are nondecreasing.
pub fn dinkelbach(problem: &FractionalProblem, y0: &RVec, opts: &DinkelbachOptions) -> Result<DinkelbachResult> {
    if problem.branches.is_empty() {
        return Err(invalid("fractional problem needs at least one branch"));
    }
    if problem.branches.iter().any(|b| !(b.den.value(y0) > 0.0)) {
        return Err(invalid("denominators must be positive at the start point"));
    }
    let mut y = y0.clone();
    let mut lambda = problem.min_ratio(&y);
    let mut lambdas = vec![lambda];
    let mut f_values = Vec::new();
    let mut iterations = 0;
    for _ in 0..opts.max_iter {
        iterations += 1;
        // a negative ratio would make `num - λ·den` convex; the zero parameter keeps it concave
        let sol = solve_epigraph_qcqp(&problem.parametric(lambda.max(0.0)), &y, &opts.qcqp)?;
        f_values.push(sol.objective);
        let next = problem.min_ratio(&sol.y);
        if !(next >= lambda) || problem.branches.iter().any(|b| !(b.den.value(&sol.y) > 0.0)) {
            break;
        }
        y = sol.y;
        lambda = next;
        lambdas.push(lambda);
        if sol.objective <= opts.zeta {
            break;
        }
    }
    Ok(DinkelbachResult { y, lambda, lambdas, f_values, iterations })
}
