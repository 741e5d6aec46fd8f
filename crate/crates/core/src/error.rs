use crate::linalg::C64;

/// Errors raised by the toolkit.
///
/// Failed checks are not errors: constraint reports, residual reports and
/// classifications carry their own pass/fail data. Errors are reserved for
/// inputs that cannot be processed and for numerical degeneracies.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("expected a {expected_rows}x{expected_cols} matrix, got {rows}x{cols}")]
    Shape {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid chain geometry: {0}")]
    Geometry(String),
    #[error("entries outside the 33-vertex pattern are nonzero at {positions:?}")]
    PatternViolation { positions: Vec<(usize, usize)> },
    #[error("solvability constraints violated: {violated:?}")]
    ConstraintsNotSatisfied { violated: Vec<&'static str> },
    #[error("the Hecke system needs m24*m42 != 0 (m24 = {m24}, m42 = {m42})")]
    ZeroHopping { m24: C64, m42: C64 },
    #[error("m24 and m42 both vanish; the energy does not depend on the rapidities")]
    BothHoppingsZero,
    #[error("no mu satisfies T^2 = mu T (relative residual {residual:e})")]
    NotProportional { residual: f64 },
    #[error("invalid parameters for {family}: {reason}")]
    InvalidParameters { family: String, reason: String },
    #[error("degenerate Hecke branch: {0}")]
    DegenerateX(String),
    #[error("gauge matrix is singular (det = {det})")]
    SingularG { det: C64 },
    #[error("Lambda(z2, z1) is singular (det = {det}, reciprocal condition {rcond:e})")]
    SingularLambda { det: C64, rcond: f64 },
    #[error("rapidities must be nonzero")]
    ZeroRapidity,
    #[error("degenerate change of variables: {0}")]
    DegenerateChangeOfVariable(String),
    #[error("operation requires the {expected} case")]
    WrongCase { expected: &'static str },
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    EigNoConvergence { iterations: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("eigenvector branch lost (best overlap {overlap:.3})")]
    BranchCollision { overlap: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by numerical degeneracy rather than bad input.
    pub fn is_numerical_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::DegenerateX(_)
                | Error::SingularLambda { .. }
                | Error::SingularG { .. }
                | Error::DegenerateChangeOfVariable(_)
                | Error::EigNoConvergence { .. }
                | Error::Singular
                | Error::NoConvergence(_)
                | Error::BranchCollision { .. }
                | Error::NotProportional { .. }
        )
    }
}
