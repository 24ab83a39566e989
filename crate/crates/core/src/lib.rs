//! Spectral toolkit for weighted pure simplicial complexes.
//!
//! The crate builds complexes with their recursive weight function, the
//! averaging operators between cochain dimensions, the up-down, down-up and
//! non-lazy walks, orthogonal level decompositions of cochains, and numerical
//! certificates for the walk-contraction bounds that local spectral expansion
//! implies.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`). The `*64`
//! aliases below are what the command-line tool and the tests use.

pub mod cochain;
pub mod complex;
pub mod error;
pub mod generate;
pub mod io;
pub mod level;
mod linalg;
pub mod operators;
pub mod oriented;
pub mod scalar;
pub mod spectral;
pub mod verify;

pub use cochain::{Cochain, LinOp};
pub use complex::{Face, PureComplex};
pub use error::{HdxError, Result};
pub use level::{LevelBasis, LevelDecomposition, ProperLevels, Viewer};
pub use oriented::{BalanceReport, OrientedCochain};
pub use scalar::Scalar;
pub use spectral::{GammaProfile, Spectrum};
pub use verify::{BoundReport, LambdaTable, TheoremContext};

pub type Complex64 = PureComplex<f64>;
pub type Complex32 = PureComplex<f32>;
pub type Cochain64 = Cochain<f64>;
pub type Cochain32 = Cochain<f32>;
pub type LinOp64 = LinOp<f64>;
pub type GammaProfile64 = GammaProfile<f64>;
pub type LevelDecomposition64 = LevelDecomposition<f64>;
pub type BoundReport64 = BoundReport<f64>;
