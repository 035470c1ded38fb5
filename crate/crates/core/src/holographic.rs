//! Reconfigurable holographic surface: feed-to-element responses, amplitude
//! weights and per-subcarrier radiated power.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{invalid, Result};
use crate::geometry::ArrayGeometry;
use crate::linalg::{cis, CMat, RMat};

/// Holographic surface driven by `n_rf` feeds embedded in its plane.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsSurface {
    pub geometry: ArrayGeometry,
    pub feed_positions: Vec<[f64; 2]>,
    pub refractive_index: f64,
}

impl RhsSurface {
    pub fn new(geometry: ArrayGeometry, feed_positions: Vec<[f64; 2]>, refractive_index: f64) -> Result<Self> {
        geometry.validate()?;
        if feed_positions.is_empty() {
            return Err(invalid("surface needs at least one feed"));
        }
        if !(refractive_index >= 1.0) {
            return Err(invalid(format!("refractive index {refractive_index} < 1")));
        }
        Ok(Self { geometry, feed_positions, refractive_index })
    }

    /// Feeds evenly spaced along the x edge of the surface at `y = 0`.
    pub fn with_edge_feeds(geometry: ArrayGeometry, n_rf: usize, refractive_index: f64) -> Result<Self> {
        Self::new(geometry, edge_feed_positions(&geometry, n_rf), refractive_index)
    }

    pub fn num_elements(&self) -> usize {
        self.geometry.len()
    }

    pub fn num_feeds(&self) -> usize {
        self.feed_positions.len()
    }

    /// In-plane element-to-feed distances, `N_B × n_rf`.
    pub fn feed_distances(&self) -> RMat {
        RMat::from_fn(self.num_elements(), self.num_feeds(), |p, q| {
            let e = self.geometry.element_position(p);
            let f = self.feed_positions[q];
            (e[0] - f[0]).hypot(e[1] - f[1])
        })
    }

    /// Response `V_k(p, q) = exp(-j·2π·γ·D_pq/λ_k)`.
    pub fn response(&self, wavelength: f64) -> Result<CMat> {
        if !(wavelength > 0.0) {
            return Err(invalid("wavelength must be positive"));
        }
        let k = -2.0 * PI * self.refractive_index / wavelength;
        Ok(self.feed_distances().map(|d| cis(k * d)))
    }
}

/// Default feed layout: `n` points spread over the x extent of the surface at `y = 0`.
pub fn edge_feed_positions(geometry: &ArrayGeometry, n: usize) -> Vec<[f64; 2]> {
    let extent = (geometry.n_x.saturating_sub(1)) as f64 * geometry.d_x;
    match n {
        0 => Vec::new(),
        1 => vec![[extent / 2.0, 0.0]],
        _ => (0..n).map(|q| [extent * q as f64 / (n - 1) as f64, 0.0]).collect(),
    }
}

/// Amplitude weights `m ∈ [0, 1]^{N_B}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolographicWeights(pub DVector<f64>);

impl HolographicWeights {
    pub fn new(m: DVector<f64>) -> Result<Self> {
        if m.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(invalid("holographic weights must lie in [0, 1]"));
        }
        Ok(Self(m))
    }

    pub fn ones(n: usize) -> Self {
        Self(DVector::from_element(n, 1.0))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `diag(m)·V_k·F_k`, the signal leaving the surface on one subcarrier.
pub fn radiated(m: &DVector<f64>, v: &CMat, f: &CMat) -> CMat {
    let mut x = v * f;
    for (i, mut row) in x.row_iter_mut().enumerate() {
        row *= num_complex::Complex64::new(m[i], 0.0);
    }
    x
}

/// Radiated power `‖diag(m)·V_k·F_k‖_F²`.
pub fn transmit_power(m: &DVector<f64>, v: &CMat, f: &CMat) -> Result<f64> {
    if m.len() != v.nrows() || v.ncols() != f.nrows() {
        return Err(invalid(format!(
            "dimension mismatch: m {} , V {}x{}, F {}x{}",
            m.len(),
            v.nrows(),
            v.ncols(),
            f.nrows(),
            f.ncols()
        )));
    }
    Ok(crate::linalg::fro_sqr(&radiated(m, v, f)))
}

/// Scale `F_k` down so the radiated power meets `budget`; never scales up.
pub fn scale_to_power_budget(f: &CMat, m: &DVector<f64>, v: &CMat, budget: f64) -> Result<CMat> {
    let power = transmit_power(m, v, f)?;
    if power > budget && power > 0.0 {
        Ok(f * num_complex::Complex64::new((budget / power).sqrt(), 0.0))
    } else {
        Ok(f.clone())
    }
}
