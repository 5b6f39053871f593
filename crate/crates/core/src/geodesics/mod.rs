//! Curves of projections that realize the gap metric, and the midpoint sets
//! they pass through.

pub mod branching;
pub mod edmon;
pub mod midpoint;
pub mod path;
pub mod reparam;
pub mod three_point;

pub use branching::{branching_pair, branching_pair_in_frame, separation_grid, BranchConfig, BranchParams, Branching};
pub use edmon::{edmon_extract, EdmonCertificate, EdmonResiduals};
pub use midpoint::{midpoint_element, midpoint_feasible, MidpointSpec};
pub use path::{geodesic, uniform_grid, GeodesicPath, PathBlock};
pub use reparam::{ReparamConstraints, ReparamFunction, ReparamJson};
pub use three_point::{three_point_geodesic, uniqueness_probe, UniquenessProbe};
