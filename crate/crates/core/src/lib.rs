//! Wideband RIS-aided holographic dual-function radar-communication beamforming.
//!
//! The crate builds the frequency-domain physical model (planar arrays,
//! OFDM subcarriers, Rician user links, an RIS and a holographic surface at
//! the base station), evaluates radar and user SINRs, and maximizes the
//! worst-case radar SINR by alternating over four blocks: receive filters,
//! digital precoders, holographic amplitudes and RIS phases.
//!
//! ```no_run
//! use holodfrc::{orchestrator::{run_mode, Mode}, scenario::ScenarioConfig};
//!
//! let cfg = ScenarioConfig::desk();
//! let run = run_mode(&cfg, 7, Mode::default()).unwrap();
//! println!("min radar SINR {:.2} dB", 10.0 * run.report.min_radar.log10());
//! ```

pub mod channel;
pub mod error;
pub mod geometry;
pub mod holographic;
pub mod linalg;
pub mod metrics;
pub mod orchestrator;
pub mod scenario;
pub mod solvers;

pub use error::{Error, Result};
