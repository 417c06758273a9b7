use num_complex::Complex64;
use thiserror::Error;

/// Every failure the kernels can report.
///
/// Variant names are part of the CLI contract: they surface verbatim in the
/// `error` field of structured error output.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("argument {u} is within the pole guard of a lattice point")]
    PoleAtLattice { u: Complex64 },
    #[error("point ({x}, {y}) is off the cubic y^2 = x^3 - x (residual {residual:e})")]
    NotOnCubic {
        x: Complex64,
        y: Complex64,
        residual: f64,
    },
    #[error("{what} did not converge")]
    NoConvergence { what: &'static str },
    #[error("division by t with |t| = {t_abs:e} on the non-physical branch")]
    DivisionNearZero { t_abs: f64 },
    #[error("point with Y = {y} is a branch point of the curve")]
    BranchPoint { y: Complex64 },
    #[error("uniformization denominator vanishes at t = {t}")]
    UniformizationPole { t: Complex64 },
    #[error("both roots of the Snell quadratic sit on |t| = 1 (|t_in| = {t_abs})")]
    UnitModulusRoot { t_abs: f64 },
    #[error("limiting-absorption parameter must be positive, got {eps}")]
    DegenerateEps { eps: f64 },
    #[error("Snell quadratic has a double root (discriminant {disc:e})")]
    DoubleRoot { disc: f64 },
    #[error("orbit derivative vanishes at t = {t}")]
    ZeroOrbitDerivative { t: Complex64 },
    #[error("mode matrix M_U,{k} is singular (det {det:e})")]
    SingularModeMatrix { k: u8, det: f64 },
    #[error("pole point lies on the basepoint fibre (|Y + sqrt 2| = {d:e})")]
    ShiftSingularity { d: f64 },
    #[error("evaluation point {u} is within the pole guard of a forcing pole")]
    EvaluationAtPole { u: Complex64 },
    #[error("spectral point {zeta} coincides with the incident pole")]
    IncidentPole { zeta: Complex64 },
    #[error("direction theta = {theta} is within {dist:e} of a scattered pole image")]
    NearPoleDirection { theta: f64, dist: f64 },
    #[error("epsilon extrapolation residual {residual:e} exceeds {limit:e}")]
    ExtrapolationUnstable { residual: f64, limit: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value in output field `{0}`")]
    NonFiniteOutput(String),
}

impl Error {
    /// Stable taxonomy name, used by the CLI and the C ABI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::PoleAtLattice { .. } => "PoleAtLattice",
            Error::NotOnCubic { .. } => "NotOnCubic",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DivisionNearZero { .. } => "DivisionNearZero",
            Error::BranchPoint { .. } => "BranchPoint",
            Error::UniformizationPole { .. } => "UniformizationPole",
            Error::UnitModulusRoot { .. } => "UnitModulusRoot",
            Error::DegenerateEps { .. } => "DegenerateEps",
            Error::DoubleRoot { .. } => "DoubleRoot",
            Error::ZeroOrbitDerivative { .. } => "ZeroOrbitDerivative",
            Error::SingularModeMatrix { .. } => "SingularModeMatrix",
            Error::ShiftSingularity { .. } => "ShiftSingularity",
            Error::EvaluationAtPole { .. } => "EvaluationAtPole",
            Error::IncidentPole { .. } => "IncidentPole",
            Error::NearPoleDirection { .. } => "NearPoleDirection",
            Error::ExtrapolationUnstable { .. } => "ExtrapolationUnstable",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NonFiniteOutput(_) => "NonFiniteOutput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
