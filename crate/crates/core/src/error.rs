use thiserror::Error;

use crate::dual::DualScalar;

/// Every failure the library can report. Each variant maps to a stable
/// name (see [`Error::name`]) used by the command-line front end.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("division by a pure dual number {divisor:?} (zero divisor)")]
    PureDualDivisor { divisor: DualScalar },

    #[error("square root needs a positive real part, got {value:?}")]
    NonPositiveRealPart { value: DualScalar },

    #[error("dual angle undefined: cosine real part {cosine} is within tolerance of +-1 (parallel lines)")]
    AngleSingularity { cosine: f64 },

    #[error("non-finite value produced by {op}")]
    NumericBreakdown { op: &'static str },

    #[error("real part of the dual vector has norm {norm}, below the zero tolerance")]
    ZeroRealPart { norm: f64 },

    #[error("invalid line: {reason}")]
    InvalidLine { reason: String },

    #[error("dual vector is not on the dual unit sphere (residual {residual:e}){}", at_param(*.param))]
    NotOnDualSphere { residual: f64, param: Option<f64> },

    #[error("curve is not regular at t = {t} (speed {speed:e})")]
    IrregularCurve { t: f64, speed: f64 },

    #[error("curvature vanishes at t = {t} (kappa = {kappa:e}); Frenet frame undefined")]
    VanishingCurvature { t: f64, kappa: f64 },

    #[error("curvature profile is not positive at s = {s} (kappa = {kappa:e})")]
    ProfileSingularity { s: f64, kappa: f64 },

    #[error("profile does not provide derivative of order {order}")]
    ProfileNotDifferentiable { order: usize },

    #[error("frame drift {drift:e} in one step at s = {s} exceeds the limit; reduce the step")]
    StepTooLarge { s: f64, drift: f64 },

    #[error("offset constant {lambda:?} is pure dual")]
    PureDualLambda { lambda: DualScalar },

    #[error("partner curve degenerates (max speed {max_speed:e})")]
    DegeneratePartner { max_speed: f64 },

    #[error("no monotone correspondence between the curves: {reason}")]
    NoCorrespondence { reason: String },

    #[error("generated pair failed validation: {failed:?}")]
    PairValidationFailed { failed: Vec<String> },

    #[error("invalid ruled surface patch: {reason}")]
    InvalidPatch { reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn at_param(p: Option<f64>) -> String {
    match p {
        Some(s) => format!(" at s = {s}"),
        None => String::new(),
    }
}

impl Error {
    /// Structured name of the error kind.
    pub fn name(&self) -> &'static str {
        match self {
            Error::PureDualDivisor { .. } => "PureDualDivisor",
            Error::NonPositiveRealPart { .. } => "NonPositiveRealPart",
            Error::AngleSingularity { .. } => "AngleSingularity",
            Error::NumericBreakdown { .. } => "NumericBreakdown",
            Error::ZeroRealPart { .. } => "ZeroRealPart",
            Error::InvalidLine { .. } => "InvalidLine",
            Error::NotOnDualSphere { .. } => "NotOnDualSphere",
            Error::IrregularCurve { .. } => "IrregularCurve",
            Error::VanishingCurvature { .. } => "VanishingCurvature",
            Error::ProfileSingularity { .. } => "ProfileSingularity",
            Error::ProfileNotDifferentiable { .. } => "ProfileNotDifferentiable",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::PureDualLambda { .. } => "PureDualLambda",
            Error::DegeneratePartner { .. } => "DegeneratePartner",
            Error::NoCorrespondence { .. } => "NoCorrespondence",
            Error::PairValidationFailed { .. } => "PairValidationFailed",
            Error::InvalidPatch { .. } => "InvalidPatch",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
