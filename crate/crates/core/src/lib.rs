//! Numerical algebraic geometry driven by sup-norms on spheres.
//!
//! Polynomial systems are dense homogeneous tuples over ℝ or ℂ ([`poly`]). On top of them sit
//! certified sup-norms ([`norms`]), condition numbers and distances to singular systems
//! ([`condition`]), a grid-and-nerve Betti number pipeline ([`homology`]), an interval
//! subdivision for plane/space curves ([`pv`]), a linear homotopy solver ([`homotopy`]) and
//! random ensembles with the statistical experiments built from them ([`ensembles`]).

pub mod document;
pub mod error;
pub mod eval;
pub mod ensembles;
pub mod grid;
pub mod homology;
pub mod homotopy;
pub mod linalg;
pub mod multiindex;
pub mod norms;
pub mod condition;
pub mod poly;
pub mod pv;
pub mod random;
pub mod scalar;

pub use document::{AnySystem, PolyDocument};
pub use error::{NagError, Result};
pub use norms::CertifiedNorm;
pub use poly::{AffinePoly, HomogeneousPoly, PolySystem};
pub use scalar::{Field, Scalar};
