use thiserror::Error;

use crate::complex::Face;

pub type Result<T> = std::result::Result<T, HdxError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HdxError {
    #[error("facet list is empty")]
    EmptyFacets,
    #[error("facet {0} repeats a vertex")]
    RepeatedVertex(Face),
    #[error("duplicate facet {0}")]
    DuplicateFacet(Face),
    #[error("facet {face} has dimension {found}, expected {expected}")]
    MixedDimensions {
        face: Face,
        expected: isize,
        found: isize,
    },
    #[error("facet weight {value} at position {index} is not positive")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("expected {expected} facet weights, got {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("face {0} is not in the complex")]
    FaceNotFound(Face),
    #[error("dimension {dim} outside the admissible range {lo}..={hi}")]
    DimensionOutOfRange { dim: isize, lo: isize, hi: isize },
    #[error("link of top-dimensional face {0} is empty")]
    TopFaceLink(Face),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cochain belongs to a different complex")]
    ComplexMismatch,
    #[error(
        "operator is not self-adjoint under the weighted inner product (max asymmetry {max_asymmetry:e})"
    )]
    NotSelfAdjoint { max_asymmetry: f64 },
    #[error("1-skeleton of the link of {face} is disconnected")]
    Disconnected { face: Face },
    #[error("operator has a negative eigenvalue {value:e}")]
    NegativeEigenvalue { value: f64 },
    #[error("cochain is not in the image of the lift (residual {residual:e})")]
    NotInImage { residual: f64 },
    #[error("cochain is not {level}-level (residual {residual:e})")]
    NotLevel { level: isize, residual: f64 },
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl HdxError {
    /// Errors that signal an unmet theorem hypothesis rather than bad input.
    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(
            self,
            HdxError::Disconnected { .. } | HdxError::Hypothesis(_) | HdxError::NotLevel { .. }
        )
    }
}
