//! Sharper L²-extension constants from the origin of a planar domain:
//! Green functions, radial fibre functions, Hartogs lifts, a discrete
//! Monge–Ampère envelope solver and weighted least-norm extensions.

// `!(x > 0.0)` is used on purpose so that NaN lands in the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bergman;
pub mod domain;
pub mod envelope;
pub mod error;
pub mod hartogs;
pub mod quadrature;
pub mod radial;
pub mod report;
pub mod weight;

pub use bergman::{gram, min_extension, stabilised_extension, MinExtension, StabilisedExtension};
pub use domain::{DomainKind, PlanarDomain};
pub use envelope::{
    comparison_check, harmonic_minorant_check, impose_boundary, make_grid, sharper_constant_ma, slice_fiber,
    solve_envelope, BoundaryData, EnvelopeSolution, Grid3, NodeKind, SolveOptions, StencilSpec,
};
pub use error::{Error, Result};
pub use hartogs::{
    verify_certificate, CertificateProvenance, CertificateReport, GreenTypeCertificate, HartogsDomain, LeviReport,
};
pub use quadrature::{Integral, QuadratureSpec};
pub use radial::{green_type_radial, prop31_check, regularize, sharper_constant_radial, RadialProfile};
pub use report::{run, sweep_c, BoundsReport, RunConfig, SweepReport};
pub use weight::WeightField;
