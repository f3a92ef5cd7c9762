//! Convex geometry for compact polytopes in vertex representation.
//!
//! Exact hull, H-representation and fan routines are two-dimensional. In
//! higher dimension polytopes are handled through their vertex lists,
//! support functions and direction grids.

mod grid;
mod hull;
pub(crate) mod linalg;
mod metric;
mod nearest;
mod polytope;
mod vector;

pub use grid::DirectionGrid;
pub use hull::{convex_hull_2d, v_to_h_2d};
pub use metric::{
    contains, hausdorff_distance, hausdorff_grid_estimate, grid_resolution_bound,
    minkowski_average, one_sided_hausdorff, support_function,
};
pub use nearest::{nearest_point, point_distance, NearestPoint, DEFAULT_DISTANCE_TOL};
pub use polytope::{Facet, Polytope, CANON_TOL};
pub use vector::Vector;
