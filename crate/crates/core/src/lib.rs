//! Numerical verification of metallic Riemannian structures and almost
//! quadratic φ-structures.
//!
//! The library builds charts with symbolic metrics, evaluates all tensor
//! calculus (Christoffel symbols, covariant derivatives, Lie brackets,
//! Nijenhuis torsion, Riemann curvature) pointwise with exact second-order
//! jets, and checks the defining identities of metallic structures, almost
//! quadratic φ-structures, warped-product Kenmotsu/cosymplectic manifolds,
//! and quadratic φ-hypersurfaces over deterministically sampled points.

// Index loops mirror the tensor index notation.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod expr;
pub mod hypersurface;
pub mod report;
pub mod sample;
pub mod structures;
pub mod tensor;
pub mod warped;

pub use error::{Error, Result};
pub use expr::{eval_jet2, eval_value, parse, Expr, Jet2};
pub use hypersurface::{
    curvature_xi_check, frame_feasibility, golden_cone_fixture, golden_line_fixture,
    golden_plane_fixture, kenmotsu_hypersurface_check, killing_check, metallic_sphere_fixture,
    verify_geometry, verify_structure_equations, Hypersurface, InducedFields,
};
pub use report::{CheckResult, ResidualStat, VerificationReport};
pub use sample::Sampling;
pub use structures::{
    associated_metric, metallic_from_product, metallic_number, product_from_metallic,
    spectral_projectors, verify_associated_metric, verify_integrable, verify_locally_metallic,
    verify_metallic, verify_quadratic_phi, verify_spectral, AlmostProductStructure,
    AssociatedMetricConstants, MetallicStructure, QuadraticPhiStructure, Sign,
    SpectralProjectors,
};
pub use tensor::{
    christoffel, covariant_derivative_11, lie_bracket, nijenhuis, riemann, ChartedManifold,
    OneForm, PointFrame, TensorField11, VectorField,
};
pub use warped::{
    flat_metallic_fiber, nijenhuis_phi_check, non_parallel_fiber, sphere_fiber,
    verify_connection_formulas, verify_induced_phi, verify_kenmotsu, verify_warped_kenmotsu,
    InducedQuadraticStructure, WarpedProduct,
};
