//! Uniform planar arrays and wideband space-frequency steering vectors.
//!
//! Every array (base-station surface, RIS, user terminal) is a UPA lying in
//! its local x-y plane. Element `(i, j)` sits at `(i·d_x, j·d_y)` and the flat
//! element index is `i·n_y + j`, which is the ordering produced by the
//! Kronecker product `a_x ⊗ a_y`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{cis, kron_vec, CVec};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Uniform planar array: element counts and spacings along x and y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub n_x: usize,
    pub n_y: usize,
    pub d_x: f64,
    pub d_y: f64,
}

impl ArrayGeometry {
    pub fn new(n_x: usize, n_y: usize, d_x: f64, d_y: f64) -> Result<Self> {
        let g = Self { n_x, n_y, d_x, d_y };
        g.validate()?;
        Ok(g)
    }

    /// Square `side × side` array with equal spacing.
    pub fn square(side: usize, spacing: f64) -> Result<Self> {
        Self::new(side, side, spacing, spacing)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 || self.n_y == 0 {
            return Err(invalid(format!("array needs at least one element per axis, got {}x{}", self.n_x, self.n_y)));
        }
        if !(self.d_x > 0.0 && self.d_y > 0.0) {
            return Err(invalid(format!("array spacing must be positive, got ({}, {})", self.d_x, self.d_y)));
        }
        Ok(())
    }

    /// Total element count `n_x·n_y`.
    pub fn len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// In-plane coordinates of element `p` (flat index).
    pub fn element_position(&self, p: usize) -> [f64; 2] {
        let i = p / self.n_y;
        let j = p % self.n_y;
        [i as f64 * self.d_x, j as f64 * self.d_y]
    }
}

/// Azimuth `θ ∈ [0, 2π]` and elevation `ψ ∈ [0, π/2]`, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnglePair {
    pub azimuth: f64,
    pub elevation: f64,
}

impl AnglePair {
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self> {
        if !(0.0..=2.0 * PI).contains(&azimuth) {
            return Err(invalid(format!("azimuth {azimuth} outside [0, 2π]")));
        }
        if !(0.0..=FRAC_PI_2).contains(&elevation) {
            return Err(invalid(format!("elevation {elevation} outside [0, π/2]")));
        }
        Ok(Self { azimuth, elevation })
    }
}

/// OFDM subcarrier grid: `f_k = f_c + k·Δf` for `k = 1..=K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubcarrierGrid {
    pub carrier_hz: f64,
    pub spacing_hz: f64,
    pub count: usize,
}

impl SubcarrierGrid {
    pub fn new(carrier_hz: f64, spacing_hz: f64, count: usize) -> Result<Self> {
        let g = Self { carrier_hz, spacing_hz, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(invalid("subcarrier count must be positive"));
        }
        if !(self.carrier_hz > 0.0) {
            return Err(invalid("carrier frequency must be positive"));
        }
        if (1..=self.count).any(|k| self.frequency(k - 1) <= 0.0) {
            return Err(invalid("every subcarrier frequency must be positive"));
        }
        Ok(())
    }

    /// Frequency of the subcarrier at zero-based position `idx` (i.e. `k = idx + 1`).
    pub fn frequency(&self, idx: usize) -> f64 {
        self.carrier_hz + (idx + 1) as f64 * self.spacing_hz
    }

    /// Wavelength `c / f_k` of the subcarrier at zero-based position `idx`.
    pub fn wavelength(&self, idx: usize) -> f64 {
        SPEED_OF_LIGHT / self.frequency(idx)
    }

    pub fn carrier_wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }
}

/// Direction cosines scaled by the element spacings, `(μ_x, μ_y)` in meters.
pub fn direction_cosines(angles: AnglePair, d_x: f64, d_y: f64) -> (f64, f64) {
    let cos_el = angles.elevation.cos();
    (
        d_x * angles.azimuth.cos() * cos_el,
        d_y * angles.azimuth.sin() * cos_el,
    )
}

/// Single-axis steering vector with entries `exp(-j·2π·i·μ/λ)`, `i = 0..n`.
pub fn axis_steering(n: usize, mu: f64, wavelength: f64) -> Result<CVec> {
    if n == 0 {
        return Err(invalid("axis steering vector needs n >= 1"));
    }
    if !(wavelength > 0.0) {
        return Err(invalid("wavelength must be positive"));
    }
    let step = -2.0 * PI * mu / wavelength;
    Ok(CVec::from_fn(n, |i, _| cis(step * i as f64)))
}

/// Wideband UPA steering vector `a_x(f_k) ⊗ a_y(f_k)` of length `n_x·n_y`.
pub fn upa_steering(geom: &ArrayGeometry, freq_hz: f64, angles: AnglePair) -> Result<CVec> {
    if !(freq_hz > 0.0) {
        return Err(invalid("frequency must be positive"));
    }
    let wavelength = SPEED_OF_LIGHT / freq_hz;
    let (mu_x, mu_y) = direction_cosines(angles, geom.d_x, geom.d_y);
    let ax = axis_steering(geom.n_x, mu_x, wavelength)?;
    let ay = axis_steering(geom.n_y, mu_y, wavelength)?;
    Ok(kron_vec(&ax, &ay))
}

/// Azimuth/elevation of `to` as seen from `from`.
///
/// Arrays face the upper half-space, so elevations below the horizon are
/// clamped to zero.
pub fn angles_between(from: [f64; 3], to: [f64; 3]) -> Result<AnglePair> {
    let dx = to[0] - from[0];
    let dy = to[1] - from[1];
    let dz = to[2] - from[2];
    if dx == 0.0 && dy == 0.0 && dz == 0.0 {
        return Err(invalid("cannot take angles between coincident points"));
    }
    let mut azimuth = dy.atan2(dx);
    if azimuth < 0.0 {
        azimuth += 2.0 * PI;
    }
    let elevation = dz.atan2(dx.hypot(dy)).clamp(0.0, FRAC_PI_2);
    Ok(AnglePair { azimuth, elevation })
}

/// Euclidean distance between two points.
pub fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
