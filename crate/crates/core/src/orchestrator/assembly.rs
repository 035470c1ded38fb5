//! Shared plumbing for the precoder and amplitude subproblems: real embedding
//! of squared complex affine forms and construction of the normalized
//! fractional program.

use crate::linalg::{RVec, C64};
use crate::solvers::{FractionalBranch, FractionalProblem, Quadratic, SquareSum};

/// Add `weight·|a0 + Σ c_i·x_i|²` to `ss`.
///
/// With `complex_dim = Some(n)` the unknowns are complex and stored as
/// `y = [Re x; Im x]` (length `2n`); with `None` they are real.
pub(crate) fn push_abs2(ss: &mut SquareSum, weight: f64, a0: C64, coeffs: &[(usize, C64)], complex_dim: Option<usize>) {
    if weight == 0.0 {
        return;
    }
    let (mut re, mut im) = (Vec::new(), Vec::new());
    for (i, c) in coeffs {
        match complex_dim {
            Some(n) => {
                re.push((*i, c.re));
                re.push((*i + n, -c.im));
                im.push((*i, c.im));
                im.push((*i + n, c.re));
            }
            None => {
                re.push((*i, c.re));
                im.push((*i, c.im));
            }
        }
    }
    ss.push(weight, a0.re, re);
    ss.push(weight, a0.im, im);
}

/// Ratios `num_t/den_t` and user constraints `N_u ≥ η̂·D_u`, in a common variable.
pub(crate) struct FractionalData {
    pub dim: usize,
    pub num: Vec<SquareSum>,
    pub den: Vec<SquareSum>,
    pub comm_num: Vec<SquareSum>,
    pub comm_den: Vec<SquareSum>,
    pub eta_hat: f64,
    /// Extra convex constraints `c(y) ≤ 0`, already normalized.
    pub constraints: Vec<Quadratic>,
}

impl FractionalData {
    /// Build the surrogate program around `y0`: numerators and the user-constraint
    /// numerators are replaced by their tangent minorizers, and every row is
    /// divided by its value at `y0` so all quantities are of order one.
    pub fn surrogate(&self, y0: &RVec, enforce_comm: bool) -> FractionalProblem {
        let branches = self
            .num
            .iter()
            .zip(&self.den)
            .map(|(n, d)| {
                let s = d.value(y0).max(f64::MIN_POSITIVE);
                FractionalBranch { num: n.minorize(y0).scaled(1.0 / s), den: d.to_quadratic().scaled(1.0 / s) }
            })
            .collect();
        let mut constraints = self.constraints.clone();
        if enforce_comm {
            for (n, d) in self.comm_num.iter().zip(&self.comm_den) {
                let s = self.eta_hat * d.value(y0).max(f64::MIN_POSITIVE);
                let q = d.to_quadratic().scaled(self.eta_hat).add_scaled(&n.minorize(y0), -1.0);
                constraints.push(q.scaled(1.0 / s));
            }
        }
        FractionalProblem { dim: self.dim, branches, constraints }
    }

    /// Program maximizing `min_u N_u / (η̂·D_u)` under the extra constraints only.
    pub fn comm_surrogate(&self, y0: &RVec) -> FractionalProblem {
        let branches = self
            .comm_num
            .iter()
            .zip(&self.comm_den)
            .map(|(n, d)| {
                let s = self.eta_hat * d.value(y0).max(f64::MIN_POSITIVE);
                FractionalBranch {
                    num: n.minorize(y0).scaled(1.0 / s),
                    den: d.to_quadratic().scaled(self.eta_hat / s),
                }
            })
            .collect();
        FractionalProblem { dim: self.dim, branches, constraints: self.constraints.clone() }
    }
}

/// `(Σ_terms − budget)/budget ≤ 0`.
pub(crate) fn budget_constraint(ss: &SquareSum, budget: f64) -> Quadratic {
    ss.to_quadratic().with_constant(-budget).scaled(1.0 / budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVec;

    #[test]
    fn complex_embedding_matches_direct_evaluation() {
        let n = 3;
        let x = CVec::from_vec(vec![C64::new(0.5, -1.0), C64::new(2.0, 0.3), C64::new(-0.7, 0.9)]);
        let y = crate::linalg::embed_vec(&x);
        let coeffs = vec![(0, C64::new(1.0, 2.0)), (2, C64::new(-0.5, 0.25))];
        let a0 = C64::new(0.1, -0.2);
        let mut ss = SquareSum::new(2 * n);
        push_abs2(&mut ss, 1.5, a0, &coeffs, Some(n));
        let direct = 1.5 * (a0 + coeffs[0].1 * x[0] + coeffs[1].1 * x[2]).norm_sqr();
        assert!((ss.value(&y) - direct).abs() < 1e-12);
    }

    #[test]
    fn real_embedding_matches_direct_evaluation() {
        let m = RVec::from_vec(vec![0.2, 0.9]);
        let coeffs = vec![(0, C64::new(1.0, -1.0)), (1, C64::new(0.3, 2.0))];
        let mut ss = SquareSum::new(2);
        push_abs2(&mut ss, 2.0, C64::new(0.0, 1.0), &coeffs, None);
        let direct = 2.0 * (C64::new(0.0, 1.0) + coeffs[0].1 * 0.2 + coeffs[1].1 * 0.9).norm_sqr();
        assert!((ss.value(&m) - direct).abs() < 1e-12);
    }
}
