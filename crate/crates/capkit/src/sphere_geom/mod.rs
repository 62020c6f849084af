//! Support-function calculus for convex bodies: direction grids, catalog
//! shapes, Wulff shapes, Minkowski combinations, curvature and the classical
//! functionals (volume, mean width, Hausdorff distance).

mod body;
mod grid;
mod support;

pub use body::{
    best_fit_ball, hausdorff_distance, hausdorff_of_supports, mean_width, mean_width_of_support,
    steiner_point, volume, wulff_body, Body, BodyDerivedJson, BodyJson,
};
pub use grid::{make_direction_grid, DirectionGrid, MIN_RESOLUTION};
pub use support::{
    catalog_support, minkowski_combine, perturbed_support, spectral_derivatives, ShapeSpec,
    SupportExpr, SupportVector,
};
