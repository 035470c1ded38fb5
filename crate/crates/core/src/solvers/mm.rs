use crate::linalg::{herm_form, re_dot, CMat, CVec};

/// Affine lower bound `2·Re(cᴴx) + constant` of a convex quadratic.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSurrogate {
    pub c: CVec,
    pub constant: f64,
}

impl AffineSurrogate {
    pub fn eval(&self, x: &CVec) -> f64 {
        2.0 * re_dot(&self.c, x) + self.constant
    }
}

/// Tangent minorizer of `xᴴHx` at `x_prev` (H positive semidefinite):
/// `xᴴHx ≥ 2·Re(x_prevᴴ H x) − x_prevᴴ H x_prev`, tight at `x_prev`.
pub fn mm_minorize(h: &CMat, x_prev: &CVec) -> AffineSurrogate {
    AffineSurrogate { c: h * x_prev, constant: -herm_form(h, x_prev) }
}
