//! Discrete inclusions `w_{k+1} ∈ F(w_k)`: polyline maps, exhaustive path
//! enumeration with classification, fixed points and grid summaries.

mod fixed;
mod paths;
mod pwl;

pub use fixed::{find_fixed_points, membership_residual};
pub use paths::{
    classify_grid, iterate_paths, replay, successors, walk_paths, GridSummary, GridVerdict, InclusionPath, Memo,
    PathClass, PathOptions, PathSet, StartSummary,
};
pub use pwl::{make_zorro, PiecewiseLinearMap};
