use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },

    #[error("operator cannot be normalized to an involution (|K^2 - 1| = {residual:.3e})")]
    NotNormalizable { residual: f64 },

    #[error("matrix is singular to tolerance (sigma_min/sigma_max = {ratio:.3e})")]
    Singular { ratio: f64 },

    #[error("matrix has non-finite entries")]
    NotFinite,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("input is not an involution (|f^2 - 1| = {residual:.3e})")]
    NotInvolution { residual: f64 },

    #[error("transform is not a symmetric pair with invertible sum and difference")]
    NotSymmetricPair,

    #[error("algebra carries no grading")]
    NoGrading,

    #[error("scalar parameter must be nonzero")]
    ZeroScalar,

    #[error("operator norm must be strictly smaller than one (got {norm:.6})")]
    NormTooLarge { norm: f64 },

    #[error("Connes identities violated (max residual {residual:.3e})")]
    NotMoebius { residual: f64 },

    #[error("coefficients do not commute with the representation (residual {residual:.3e})")]
    NotInCommutant { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("module failed validation: {0}")]
    InvalidModule(String),

    #[error("involution is not compatible: {0}")]
    NotCompatible(String),

    #[error("isotropic subspace and its image fail to span (smallest singular value ratio {gap:.3e})")]
    DegenerateSplit { gap: f64 },

    #[error("groupoid endpoints do not match (residual {residual:.3e})")]
    EndpointMismatch { residual: f64 },

    #[error("metric is not positive definite at quadrature node {node}")]
    NotSpd { node: usize },

    #[error("singular value decomposition did not converge")]
    SvdFailed,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
