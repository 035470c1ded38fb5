//! Numerical kernels shared by the four subproblems.

pub mod cadmm;
pub mod dinkelbach;
pub mod grq;
pub mod mm;
pub mod qcqp;
pub mod rsd;

pub use cadmm::{cadmm_phase, Bilinear, CadmmOptions, CadmmResult, ManifoldProblem, Product};
pub use dinkelbach::{dinkelbach, DinkelbachOptions, DinkelbachResult, FractionalBranch, FractionalProblem};
pub use grq::grq_max;
pub use mm::{mm_minorize, AffineSurrogate};
pub use qcqp::{solve_epigraph_qcqp, EpigraphProblem, QcqpOptions, QcqpSolution, Quadratic, SquareSum};
pub use rsd::{rsd_unit_modulus, ComplexAffine, ManifoldObjective, RsdResult, SquaredSum};
