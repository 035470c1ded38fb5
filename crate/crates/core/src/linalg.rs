//! Small dense complex linear-algebra helpers shared by the model and the solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Unit-modulus phasor `exp(j·angle)`.
#[inline]
pub fn cis(angle: f64) -> C64 {
    C64::from_polar(1.0, angle)
}

/// Outer product `a·bᵀ` (plain transpose, no conjugation).
pub fn outer_t(a: &CVec, b: &CVec) -> CMat {
    a * b.transpose()
}

/// Kronecker product of two vectors, `a ⊗ b`, with `a` as the slow index.
pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i * b.len() + j] = ai * bj;
        }
    }
    out
}

/// Squared Euclidean norm of a complex vector.
#[inline]
pub fn norm_sqr(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Squared Frobenius norm of a complex matrix.
#[inline]
pub fn fro_sqr(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Real part of `aᴴ b`.
#[inline]
pub fn re_dot(a: &CVec, b: &CVec) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Hermitian form `xᴴ Q x`, real part only (Q is assumed Hermitian).
pub fn herm_form(q: &CMat, x: &CVec) -> f64 {
    re_dot(x, &(q * x))
}

/// Real embedding of a Hermitian matrix: `xᴴ Q x = yᵀ Q_r y` for `y = [Re x; Im x]`.
pub fn embed_hermitian(q: &CMat) -> RMat {
    let n = q.nrows();
    let mut out = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = q[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
            out[(i + n, j + n)] = z.re;
        }
    }
    out
}

/// Real embedding of a complex vector, `[Re v; Im v]`.
pub fn embed_vec(v: &CVec) -> RVec {
    let n = v.len();
    RVec::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

/// Inverse of [`embed_vec`].
pub fn unembed_vec(y: &RVec) -> CVec {
    let n = y.len() / 2;
    CVec::from_fn(n, |i, _| C64::new(y[i], y[i + n]))
}

/// Symmetrize in place, `Q ← (Q + Qᴴ)/2`.
pub fn hermitize(q: &mut CMat) {
    let n = q.nrows();
    for i in 0..n {
        q[(i, i)] = C64::new(q[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (q[(i, j)] + q[(j, i)].conj()) * 0.5;
            q[(i, j)] = avg;
            q[(j, i)] = avg.conj();
        }
    }
}

/// Rank-one Hermitian update `Q += s·a aᴴ`.
pub fn add_rank_one(q: &mut CMat, a: &CVec, s: f64) {
    let n = a.len();
    for j in 0..n {
        let aj = a[j].conj() * s;
        if aj == ZERO {
            continue;
        }
        for i in 0..n {
            q[(i, j)] += a[i] * aj;
        }
    }
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_max_eigenvalue(q: &CMat) -> f64 {
    if q.nrows() == 0 {
        return 0.0;
    }
    q.symmetric_eigenvalues().iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}
