//! Convex bodies derived from certified support functions: boundary mesh,
//! curvature, surface quadrature, and the classical geometric functionals.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::{self, Point};
use crate::scalar::Real;

use super::support::SupportVector;

/// Boundary data of the Wulff shape of a certified support function. Node i
/// carries the boundary point sigma_i with outward normal v_i (the grid
/// direction), Gauss curvature G_i and surface quadrature weight s_i.
#[derive(Debug, Clone)]
pub struct Body<R: Real> {
    support: SupportVector<R>,
    sigma: Vec<Point<R>>,
    gauss: Vec<R>,
    area_w: Vec<R>,
}

impl<R: Real> Body<R> {
    pub fn support(&self) -> &SupportVector<R> {
        &self.support
    }

    pub fn dimension(&self) -> usize {
        self.support.dimension()
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn boundary_points(&self) -> &[Point<R>] {
        &self.sigma
    }

    pub fn normals(&self) -> &[Point<R>] {
        self.support.grid().directions()
    }

    pub fn gauss_curvature(&self) -> &[R] {
        &self.gauss
    }

    pub fn area_weights(&self) -> &[R] {
        &self.area_w
    }

    /// Inradius about the origin: min_i h_i.
    pub fn inradius(&self) -> R {
        self.support.min_value()
    }

    /// Surface area: sum of quadrature weights.
    pub fn surface_area(&self) -> R {
        self.area_w.iter().cloned().sum()
    }
}

/// Derive the boundary mesh of the Wulff shape of `h`.
///
/// n = 2: sigma = h v + h' v_perp, curvature radius h'' + h, weight
/// (h'' + h) dtheta. n = 3: sigma is the gradient of the one-homogeneous
/// extension; principal radii are the eigenvalues of its tangential Hessian;
/// the weight is det (radii product) times the direction weight.
pub fn wulff_body<R: Real>(h: &SupportVector<R>) -> Result<Body<R>> {
    h.certify()?;
    let grid = h.grid().clone();
    let m = grid.len();
    let mut sigma = Vec::with_capacity(m);
    let mut gauss = Vec::with_capacity(m);
    let mut area_w = Vec::with_capacity(m);
    match h.dimension() {
        2 => {
            for i in 0..m {
                let rc = h.d2()[i] + h.values()[i];
                sigma.push(h.boundary_point(i));
                gauss.push(R::one() / rc);
                area_w.push(rc * grid.weights()[i]);
            }
        }
        _ => {
            for i in 0..m {
                let v = grid.directions()[i];
                let (w, _) = h.reverse_weingarten(v);
                let det = w.det();
                sigma.push(h.boundary_point(i));
                gauss.push(R::one() / det);
                area_w.push(det * grid.weights()[i]);
            }
        }
    }
    Ok(Body { support: h.clone(), sigma, gauss, area_w })
}

/// Volume via the support representation (1/n) int h dH^(n-1).
pub fn volume<R: Real>(body: &Body<R>) -> R {
    let n = R::from_usize_(body.dimension());
    let h = body.support().values();
    let mut acc = R::zero();
    for (hi, si) in h.iter().zip(body.area_weights()) {
        acc += *hi * *si;
    }
    acc / n
}

/// Mean width M = (2/omega_n) int_{S^(n-1)} h dv, with omega_n the surface
/// measure of the unit sphere so that M(ball R) = 2R.
pub fn mean_width<R: Real>(body: &Body<R>) -> R {
    mean_width_of_support(body.support())
}

pub fn mean_width_of_support<R: Real>(h: &SupportVector<R>) -> R {
    let grid = h.grid();
    let mut acc = R::zero();
    for (hi, wi) in h.values().iter().zip(grid.weights()) {
        acc += *hi * *wi;
    }
    R::lit(2.0) * acc / grid.sphere_measure()
}

/// Hausdorff distance = sup-norm of the support difference (shared grid).
pub fn hausdorff_distance<R: Real>(a: &Body<R>, b: &Body<R>) -> Result<R> {
    hausdorff_of_supports(a.support(), b.support())
}

pub fn hausdorff_of_supports<R: Real>(a: &SupportVector<R>, b: &SupportVector<R>) -> Result<R> {
    if a.grid().as_ref() != b.grid().as_ref() {
        return Err(crate::error::Error::GridMismatch);
    }
    let mut m = R::zero();
    for (&x, &y) in a.values().iter().zip(b.values()) {
        m = m.max((x - y).abs());
    }
    Ok(m)
}

/// Steiner point (1/|B^n|) int h(v) v dv: the translation-equivariant
/// center of a convex body.
pub fn steiner_point<R: Real>(h: &SupportVector<R>) -> Point<R> {
    let grid = h.grid();
    let nf = R::from_usize_(grid.dimension());
    let mut center = geom::zero();
    for ((hi, v), wi) in h.values().iter().zip(grid.directions()).zip(grid.weights()) {
        center = geom::axpy(center, *hi * *wi, *v);
    }
    geom::scale(center, nf / grid.sphere_measure())
}

/// Best-fit ball: Steiner-point center, radius from the mean width, and the
/// sup-norm deviation of the support difference.
pub fn best_fit_ball<R: Real>(body: &Body<R>) -> (Point<R>, R, R) {
    let h = body.support();
    let grid = h.grid();
    let center = steiner_point(h);
    let radius = mean_width(body) * R::lit(0.5);
    let mut dev = R::zero();
    for (hi, v) in h.values().iter().zip(grid.directions()) {
        let ball_h = radius + geom::dot(center, *v);
        dev = dev.max((*hi - ball_h).abs());
    }
    (center, radius, dev)
}

/// JSON schema for bodies: {n, N, directions?, h, derived: {sigma, G, s}}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodyJson {
    pub n: usize,
    #[serde(rename = "N")]
    pub node_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<[f64; 3]>>,
    pub h: Vec<f64>,
    pub derived: BodyDerivedJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodyDerivedJson {
    pub sigma: Vec<[f64; 3]>,
    #[serde(rename = "G")]
    pub gauss: Vec<f64>,
    pub s: Vec<f64>,
}

impl<R: Real> Body<R> {
    pub fn to_json(&self) -> BodyJson {
        let to64 = |v: &[R]| v.iter().map(|x| x.to_f64x()).collect::<Vec<_>>();
        let pts = |v: &[Point<R>]| {
            v.iter()
                .map(|p| [p[0].to_f64x(), p[1].to_f64x(), p[2].to_f64x()])
                .collect::<Vec<_>>()
        };
        BodyJson {
            n: self.dimension(),
            node_count: self.len(),
            directions: if self.dimension() == 3 {
                Some(pts(self.normals()))
            } else {
                None
            },
            h: to64(self.support().values()),
            derived: BodyDerivedJson {
                sigma: pts(&self.sigma),
                gauss: to64(&self.gauss),
                s: to64(&self.area_w),
            },
        }
    }
}
