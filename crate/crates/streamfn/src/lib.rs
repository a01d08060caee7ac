//! Finite element solver for the steady incompressible Navier-Stokes
//! equations on the unit square, posed in the stream-function (biharmonic)
//! formulation and discretized with Bogner-Fox-Schmit C1 rectangles.
//!
//! Two solution drivers are provided: the classical one-level approach
//! (Newton's method on a single mesh) and a two-level method that solves
//! the nonlinear problem on a coarse mesh only and then performs a single
//! linearized solve on a nested fine mesh. A CLI wraps both, together with
//! the driven-cavity benchmark and convergence studies.

pub mod assembly;
pub mod cli;
pub mod element;
pub mod field;
pub mod mesh;
pub mod problems;
pub mod solvers;
pub mod sparse;

/// Input and precondition violations surfaced by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidArgument(String),
    /// Jacobi preconditioning hit a zero diagonal entry.
    ZeroDiagonal { row: usize },
    /// Prolongation between meshes that do not nest.
    NonNested { coarse: (usize, usize), fine: (usize, usize) },
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "{msg}"),
            Error::ZeroDiagonal { row } => write!(f, "zero diagonal entry at row {row}"),
            Error::NonNested { coarse, fine } => write!(
                f,
                "fine mesh {}x{} does not nest coarse mesh {}x{}",
                fine.0, fine.1, coarse.0, coarse.1
            ),
        }
    }
}

impl std::error::Error for Error {}

pub use assembly::{BoundarySpec, DofVector, FeSpace};
pub use element::{gauss_rule, physical_scaling, shape_eval, DofKind, QuadratureRule};
pub use field::{hermite_interpolant, DiscreteField, PointEval};
pub use mesh::{build_uniform, classify_boundary, refine_halve, BoundaryInfo, RectMesh};
pub use problems::{
    error_norms, manufactured_f, sample_field, velocity_profile, CavityProblem, ErrorReport,
    ManufacturedProblem, ProfileLine,
};
pub use solvers::{
    prolongate, scaling_h_for_h_coarse, solve_one_level, solve_two_level, ElementKind,
    NewtonConfig, SolveStats, TwoLevelConfig,
};
pub use sparse::{bicgstab, jacobi_precondition, spmv, CsrMatrix, SolveReport, SolverConfig};
