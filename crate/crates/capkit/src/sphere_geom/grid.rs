//! Direction grids on the unit sphere with quadrature weights.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::scalar::Real;

pub const MIN_RESOLUTION: usize = 16;

/// Quasi-uniform unit directions with quadrature weights summing to the
/// surface measure of S^(n-1). For n = 2 the grid is the uniform angular
/// grid theta_i = 2 pi i / N; for n = 3 a golden-angle spiral.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid<R: Real> {
    n: usize,
    dirs: Vec<Point<R>>,
    weights: Vec<R>,
    /// Angles of the n = 2 grid (empty for n = 3).
    thetas: Vec<R>,
}

impl<R: Real> DirectionGrid<R> {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn directions(&self) -> &[Point<R>] {
        &self.dirs
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn thetas(&self) -> &[R] {
        &self.thetas
    }

    /// Surface measure of S^(n-1): 2 pi or 4 pi.
    pub fn sphere_measure(&self) -> R {
        match self.n {
            2 => R::lit(2.0) * R::PI(),
            _ => R::lit(4.0) * R::PI(),
        }
    }
}

/// Build a direction grid; `resolution` is the node count.
pub fn make_direction_grid<R: Real>(n: usize, resolution: usize) -> Result<Arc<DirectionGrid<R>>> {
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::ResolutionTooSmall(resolution, MIN_RESOLUTION));
    }
    let grid = match n {
        2 => {
            let two_pi = R::lit(2.0) * R::PI();
            let nf = R::from_usize_(resolution);
            let thetas: Vec<R> = (0..resolution)
                .map(|i| two_pi * R::from_usize_(i) / nf)
                .collect();
            let dirs = thetas
                .iter()
                .map(|&t| [t.cos(), t.sin(), R::zero()])
                .collect();
            let w = two_pi / nf;
            DirectionGrid {
                n,
                dirs,
                weights: vec![w; resolution],
                thetas,
            }
        }
        _ => {
            // golden-angle spiral: equal-area latitudes, uniform weights
            let golden = R::PI() * (R::lit(3.0) - R::lit(5.0).sqrt());
            let nf = R::from_usize_(resolution);
            let mut dirs = Vec::with_capacity(resolution);
            for k in 0..resolution {
                let kf = R::from_usize_(k);
                let z = R::one() - (R::lit(2.0) * kf + R::one()) / nf;
                let r = (R::one() - z * z).max(R::zero()).sqrt();
                let phi = golden * kf;
                dirs.push([r * phi.cos(), r * phi.sin(), z]);
            }
            let w = R::lit(4.0) * R::PI() / nf;
            DirectionGrid {
                n,
                dirs,
                weights: vec![w; resolution],
                thetas: Vec::new(),
            }
        }
    };
    Ok(Arc::new(grid))
}
