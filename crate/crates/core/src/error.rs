// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

use thiserror::Error;

/// Errors raised by the extraction pipeline and the constructions built on it.
///
/// The genericity variants (`DegenerateCritical` through `AmbiguousBasePoint`)
/// mean the input sits on or too near the discriminant; they are the ones the
/// CLI maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("function has no critical points (constant up to tolerance)")]
    ConstantFunction,
    #[error("degenerate critical point near t = {t:.9}: |f''| = {second:.3e}")]
    DegenerateCritical { t: f64, second: f64 },
    #[error("critical values collide: {a:.12} vs {b:.12}")]
    ValueCollision { a: f64, b: f64 },
    #[error("critical points do not alternate between minima and maxima")]
    BrokenAlternation,
    #[error("immersion margin too small: {margin:.3e}")]
    ImmersionMarginTooSmall { margin: f64 },
    #[error("non-transverse double point at (t1, t2) = ({t1:.9}, {t2:.9})")]
    NonTransverseDoublePoint { t1: f64, t2: f64 },
    #[error("double point on the x0-axis at (t1, t2) = ({t1:.9}, {t2:.9}), |x1| = {x1:.3e}")]
    AxisDoublePoint { t1: f64, t2: f64, x1: f64 },
    #[error("holonomic space curve is not embedded: {count} crossings with |x2 gap| below tolerance")]
    NotEmbedded { count: usize },
    #[error("minimal-x1 base point is not unique")]
    AmbiguousBasePoint,

    #[error("perturbation failed after {attempts} attempts")]
    PerturbationFailed { attempts: usize },
    #[error("Morse profiles differ: {left} vs {right} minima")]
    MismatchedProfiles { left: usize, right: usize },
    #[error("immersion lost along the family at s = {s:.6}, t = {t:.6}")]
    ImmersionLost { s: f64, t: f64 },

    #[error("arc indices coincide")]
    SameArc,
    #[error("arcs lie in different half-planes")]
    MixedHalfPlanes,

    #[error("two events coincide near s = {s:.9}")]
    UnresolvedEvent { s: f64 },
    #[error("invariance violated at s = {s:.9}: {detail}")]
    InvarianceViolation { s: f64, detail: String },
    #[error("range generation failed for (W, S) = ({w}, {s})")]
    GenerationFailed { w: i64, s: i64 },
    #[error("braid normalization failed: {0}")]
    NormalizationFailed(String),
    #[error("no distinguishing pair found within budget")]
    NotFound,
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("front census mismatch: constructed {constructed:?} vs closed form {closed:?}")]
    CensusMismatch { constructed: [u64; 5], closed: [u64; 5] },
    #[error("cusp difference is odd")]
    ParityError,
    #[error("bound violated: {0}")]
    BoundViolated(String),

    #[error("too many crossings for the state sum: {0}")]
    TooManyCrossings(usize),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that report a non-generic input rather than a bad file
    /// or an internal failure.
    pub fn is_genericity(&self) -> bool {
        matches!(
            self,
            Error::ConstantFunction
                | Error::DegenerateCritical { .. }
                | Error::ValueCollision { .. }
                | Error::BrokenAlternation
                | Error::ImmersionMarginTooSmall { .. }
                | Error::NonTransverseDoublePoint { .. }
                | Error::AxisDoublePoint { .. }
                | Error::NotEmbedded { .. }
                | Error::AmbiguousBasePoint
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
