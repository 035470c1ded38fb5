use nalgebra::linalg::{Cholesky, SymmetricEigen};

use crate::error::{invalid, Result};
use crate::linalg::{hermitize, CMat, CVec, C64};

/// Maximize the generalized Rayleigh quotient `wᴴAw / wᴴBw`.
///
/// Returns the largest eigenvalue of `B⁻¹A` and a unit-norm maximizer. The
/// pencil is reduced to a Hermitian problem through the Cholesky factor of `B`.
pub fn grq_max(a: &CMat, b: &CMat) -> Result<(f64, CVec)> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(invalid("grq_max needs square matrices of equal size"));
    }
    let mut bh = b.clone();
    hermitize(&mut bh);
    let chol = Cholesky::new(bh).ok_or_else(|| invalid("denominator matrix is not positive definite"))?;
    let l = chol.l();
    // complex square roots let Cholesky succeed on some indefinite inputs
    if l.diagonal().iter().any(|d| !(d.re > 0.0) || d.im.abs() > 1e-12 * d.re) {
        return Err(invalid("denominator matrix is not positive definite"));
    }
    // C = L⁻¹ A L⁻ᴴ
    let left = l.solve_lower_triangular(a).ok_or_else(|| invalid("singular Cholesky factor"))?;
    let mut c = l
        .solve_lower_triangular(&left.adjoint())
        .ok_or_else(|| invalid("singular Cholesky factor"))?
        .adjoint();
    hermitize(&mut c);
    let eig = SymmetricEigen::new(c);
    let (idx, lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    let y = eig.eigenvectors.column(idx).into_owned();
    let w = l.adjoint().solve_upper_triangular(&y).ok_or_else(|| invalid("singular Cholesky factor"))?;
    let norm = w.norm();
    let mut w = w / C64::new(norm, 0.0);
    // fix the phase so the first significant entry is real and positive
    if let Some(p) = w.iter().find(|z| z.norm() > 1e-12).copied() {
        w *= p.conj() / C64::new(p.norm(), 0.0);
    }
    Ok((lambda, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::herm_form;

    #[test]
    fn identity_pencil() {
        let i = CMat::identity(3, 3);
        let (l, w) = grq_max(&i, &i).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        assert!((w.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_numerator_selects_largest_entry() {
        let a = CMat::from_diagonal(&CVec::from_vec(vec![1.0, 2.0, 3.0].into_iter().map(|x| C64::new(x, 0.0)).collect()));
        let (l, w) = grq_max(&a, &CMat::identity(3, 3)).unwrap();
        assert!((l - 3.0).abs() < 1e-12);
        assert!((w[2].norm() - 1.0).abs() < 1e-12);
        assert!((herm_form(&a, &w) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_denominator() {
        let b = CMat::from_diagonal(&CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]));
        assert!(grq_max(&CMat::identity(2, 2), &b).is_err());
    }
}
