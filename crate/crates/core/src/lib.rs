//! Projections, their canonical pair form, the gap metric, geodesics in the
//! space of projections, and the orthogonality-type relations between them.

pub mod error;
pub mod geodesics;
pub mod halmos;
pub mod isometry;
pub mod json;
pub mod linalg;
pub mod metric;
pub mod projection;
pub mod relations;
pub mod sampling;

pub use error::{Error, Result};
pub use halmos::{halmos_decompose, BlockDims, HalmosForm};
pub use projection::{Projection, ScalarField, SubspaceBasis};
