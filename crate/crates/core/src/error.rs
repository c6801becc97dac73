use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Non-vanishing conditions that make a family quasi-minimal rather than minimal.
///
/// The `as_str` text is the fixed message table used by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `F(t) != 0` for the pseudo-Euclidean families.
    ForcingNonVanishing,
    /// `b''-b != 0` for the trigonometric pseudo-sphere family.
    TrigAdmissible,
    /// `b''+b != 0` for the hyperbolic pseudo-sphere family.
    HypAdmissible,
    /// `b''-kappa*int(kappa*b')-b != 0` for the timelike-curve family.
    TimelikeCurveAdmissible,
    /// `b''-kappa*int(kappa*b')+b != 0` for the spacelike-curve family.
    SpacelikeCurveAdmissible,
    /// `kappa != 0` for the generating curve.
    CurvatureNonVanishing,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::ForcingNonVanishing => "F(t) != 0",
            Condition::TrigAdmissible => "b''-b != 0",
            Condition::HypAdmissible => "b''+b != 0",
            Condition::TimelikeCurveAdmissible => "b''-kappa*int(kappa*b')-b != 0",
            Condition::SpacelikeCurveAdmissible => "b''-kappa*int(kappa*b')+b != 0",
            Condition::CurvatureNonVanishing => "kappa != 0",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid signature: dim {dim}, index {index}")]
    InvalidSignature { dim: usize, index: usize },

    #[error("vector is not lightlike (relative self-pairing {0:e})")]
    NotLightlike(f64),

    #[error("normal plane has no second independent null direction")]
    DegeneratePlane,

    #[error("singular point at (s, t) = ({s}, {t}): {reason}")]
    SingularPoint { s: f64, t: f64, reason: String },

    #[error("non-finite value while evaluating {what} at {at}")]
    NonFinite { what: &'static str, at: f64 },

    #[error("evaluation failed inside the stencil at (s, t) = ({s}, {t})")]
    EvaluationFailure { s: f64, t: f64 },

    #[error("not quasi-minimal: {0}")]
    NotQuasiMinimal(String),

    #[error("relative null space is spanned by a lightlike direction")]
    DegenerateNullSpace,

    #[error("relative null space has dimension {0}, expected 1")]
    NullityMismatch(usize),

    #[error("inadmissible family: condition {condition} violated at t = {t} (value {value:e})")]
    InadmissibleFamily {
        condition: Condition,
        t: f64,
        value: f64,
    },

    #[error(
        "inadmissible curve: condition {} violated at t = {t} (kappa = {kappa:e})",
        Condition::CurvatureNonVanishing
    )]
    VanishingCurvature { t: f64, kappa: f64 },

    #[error("curve is not arc-length parametrized at t = {t} (<a',a'> = {value})")]
    NotArcLength { t: f64, value: f64 },

    #[error("curve has the wrong causal type at t = {t}")]
    WrongCausalType { t: f64 },

    #[error("curve leaves the de Sitter plane at t = {t} (<a,a> = {value})")]
    OffQuadric { t: f64, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// The violated admissibility condition, for family-level rejections.
    pub fn condition(&self) -> Option<Condition> {
        match self {
            Error::InadmissibleFamily { condition, .. } => Some(*condition),
            Error::VanishingCurvature { .. } => Some(Condition::CurvatureNonVanishing),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
