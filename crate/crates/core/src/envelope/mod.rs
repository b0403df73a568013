//! Discrete Perron–Bremermann envelope for the homogeneous complex
//! Monge–Ampère equation on S¹-symmetric Hartogs domains.

mod analysis;
mod boundary;
mod grid;
mod io;
mod solver;
pub mod stencil;

pub use analysis::{
    check_c_validity, comparison_check, harmonic_minorant_check, ma_certificate, sharper_constant_ma, slice_fiber,
    Comparison, FibreProfile, SharperConstant, C_VALIDITY_SAMPLES,
};
pub use boundary::{impose_boundary, BoundaryData, BoundaryValues, CustomBoundary, Wave};
pub use grid::{make_grid, Axes, Grid3, NodeKind};
pub use io::{read_field, sidecar_path, write_fibre_csv, write_field, FieldSidecar};
pub use solver::{solve_envelope, EnvelopeSolution, Initialization, SolveOptions, SolverDiagnostics};
pub use stencil::{ExitRule, StencilSpec};
