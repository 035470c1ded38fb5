//! Subproblem assembly and the alternating-maximization driver.

pub mod am;
mod assembly;
pub mod modes;
pub mod p1;
pub mod p2;
pub mod p3;
pub mod p4;

pub use am::{am_loop, initial_state, AmOptions, AmOutcome, InnerRow, TraceRow};
pub use modes::{run_mode, run_mode_with, Mode, ModeRun, RhsMode, RisMode, RunOptions};
