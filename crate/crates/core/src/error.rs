use thiserror::Error;

/// Everything that can go wrong while parsing, evaluating, or verifying.
///
/// Verification *failures* are not errors: they come back as failed entries
/// inside a [`crate::report::VerificationReport`]. Errors are the cases where
/// a computation cannot produce a meaningful result at all.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable `{name}` (chart coordinates: {coords:?})")]
    UnknownVariable { name: String, coords: Vec<String> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular metric at point {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("complex spectrum: a^2 + 4b = {discriminant} < 0, eigenvalues are not real")]
    ComplexSpectrum { discriminant: f64 },

    #[error("warping function is not positive at t = {t} (f = {value})")]
    NonPositiveWarping { t: f64, value: f64 },

    #[error("fiber carries no metallic structure")]
    MissingFiberStructure,

    #[error("fiber is not locally metallic: max |nabla J| = {residual} exceeds tol {tol}")]
    FiberNotLocallyMetallic { residual: f64, tol: f64 },

    #[error("degenerate immersion at parameter point {point:?}: embedding Jacobian rank < {expected_rank}")]
    DegenerateImmersion { point: Vec<f64>, expected_rank: usize },

    #[error("frame condition violated at {point:?}: <J nu, nu> = {j_nu_nu} (want p = {p}), |tan(J nu)| = {tan_norm} (want q = {q})")]
    FrameConditionViolated {
        point: Vec<f64>,
        j_nu_nu: f64,
        p: f64,
        tan_norm: f64,
        q: f64,
    },

    #[error("ambient metallic structure has q = {q}; induced phi-structures require q = 1")]
    QNotOne { q: u32 },

    #[error("structure is not Kenmotsu: nabla-phi identity residual {residual} with beta = {beta} exceeds tol {tol}")]
    NotKenmotsu { residual: f64, beta: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
