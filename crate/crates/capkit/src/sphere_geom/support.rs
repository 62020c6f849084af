//! Support-function calculus: catalog shapes, convexity certificates,
//! Minkowski combination, spectral derivatives.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::scalar::Real;

use super::grid::DirectionGrid;

/// Shape catalog. Plain `f64` data; scalars are converted on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    Ball {
        radius: f64,
        #[serde(default)]
        center: [f64; 3],
    },
    /// Axis-aligned ellipse (n = 2).
    Ellipse { a: f64, b: f64 },
    /// Axis-aligned ellipsoid (n = 3).
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// Convex polygon Minkowski-rounded by a ball of radius `rho` (n = 2).
    SmoothedPolygon {
        vertices: Vec<[f64; 2]>,
        rho: f64,
    },
    /// Seeded random trigonometric support function, coefficients shrunk
    /// until the convexity margin holds (n = 2).
    RandomTrig {
        seed: u64,
        degree: usize,
        margin: f64,
    },
}

impl ShapeSpec {
    pub fn label(&self) -> String {
        match self {
            ShapeSpec::Ball { radius, center } => {
                if center.iter().all(|c| *c == 0.0) {
                    format!("ball({radius})")
                } else {
                    format!("ball({radius}@{center:?})")
                }
            }
            ShapeSpec::Ellipse { a, b } => format!("ellipse({a},{b})"),
            ShapeSpec::Ellipsoid { a, b, c } => format!("ellipsoid({a},{b},{c})"),
            ShapeSpec::SmoothedPolygon { vertices, rho } => {
                format!("smoothed_polygon({}v,rho={rho})", vertices.len())
            }
            ShapeSpec::RandomTrig { seed, degree, .. } => format!("trig(seed={seed},deg={degree})"),
        }
    }
}

/// Analytic one-homogeneous extension H(x) = |x| h(x/|x|) of a support
/// function, with gradient and Hessian in closed form. Used for n = 3
/// boundary geometry; Minkowski combinations stay closed under `Lin`.
#[derive(Debug, Clone)]
pub enum SupportExpr<R: Real> {
    Ball { radius: R, center: Point<R> },
    Ellipsoid { semi: Point<R> },
    Lin { a: R, left: Arc<SupportExpr<R>>, b: R, right: Arc<SupportExpr<R>> },
}

impl<R: Real> SupportExpr<R> {
    pub fn eval(&self, x: Point<R>) -> R {
        match self {
            SupportExpr::Ball { radius, center } => *radius * geom::norm(x) + geom::dot(*center, x),
            SupportExpr::Ellipsoid { semi } => {
                let d = [semi[0] * x[0], semi[1] * x[1], semi[2] * x[2]];
                geom::norm(d)
            }
            SupportExpr::Lin { a, left, b, right } => *a * left.eval(x) + *b * right.eval(x),
        }
    }

    pub fn gradient(&self, x: Point<R>) -> Point<R> {
        match self {
            SupportExpr::Ball { radius, center } => {
                geom::axpy(*center, *radius, geom::normalize(x))
            }
            SupportExpr::Ellipsoid { semi } => {
                let h = self.eval(x);
                [
                    semi[0] * semi[0] * x[0] / h,
                    semi[1] * semi[1] * x[1] / h,
                    semi[2] * semi[2] * x[2] / h,
                ]
            }
            SupportExpr::Lin { a, left, b, right } => {
                let g = left.gradient(x);
                let h = right.gradient(x);
                [
                    *a * g[0] + *b * h[0],
                    *a * g[1] + *b * h[1],
                    *a * g[2] + *b * h[2],
                ]
            }
        }
    }

    /// Hessian of H at x, row-major 3x3.
    pub fn hessian(&self, x: Point<R>) -> [[R; 3]; 3] {
        match self {
            SupportExpr::Ball { radius, .. } => {
                let r = geom::norm(x);
                let v = geom::scale(x, R::one() / r);
                let mut m = [[R::zero(); 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        let kron = if i == j { R::one() } else { R::zero() };
                        m[i][j] = *radius / r * (kron - v[i] * v[j]);
                    }
                }
                m
            }
            SupportExpr::Ellipsoid { semi } => {
                let h = self.eval(x);
                let dx = [
                    semi[0] * semi[0] * x[0],
                    semi[1] * semi[1] * x[1],
                    semi[2] * semi[2] * x[2],
                ];
                let mut m = [[R::zero(); 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        let kron = if i == j { semi[i] * semi[i] } else { R::zero() };
                        m[i][j] = kron / h - dx[i] * dx[j] / (h * h * h);
                    }
                }
                m
            }
            SupportExpr::Lin { a, left, b, right } => {
                let ml = left.hessian(x);
                let mr = right.hessian(x);
                let mut m = [[R::zero(); 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        m[i][j] = *a * ml[i][j] + *b * mr[i][j];
                    }
                }
                m
            }
        }
    }
}

/// Support-function samples on a direction grid, with angular derivatives
/// for n = 2 and an optional analytic extension for n = 3.
#[derive(Debug, Clone)]
pub struct SupportVector<R: Real> {
    grid: Arc<DirectionGrid<R>>,
    values: Vec<R>,
    /// First/second angular derivatives at the grid angles (n = 2 only).
    d1: Vec<R>,
    d2: Vec<R>,
    analytic: Option<SupportExpr<R>>,
}

impl<R: Real> SupportVector<R> {
    pub fn grid(&self) -> &Arc<DirectionGrid<R>> {
        &self.grid
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn d1(&self) -> &[R] {
        &self.d1
    }

    pub fn d2(&self) -> &[R] {
        &self.d2
    }

    pub fn analytic(&self) -> Option<&SupportExpr<R>> {
        self.analytic.as_ref()
    }

    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    pub fn min_value(&self) -> R {
        self.values.iter().cloned().fold(R::infinity(), R::min)
    }

    /// Convexity certificate margin: min over nodes of h'' + h for n = 2,
    /// or of the smallest eigenvalue of the tangential Hessian of the
    /// one-homogeneous extension for n = 3. Positive means convex.
    pub fn convexity_margin(&self) -> R {
        match self.dimension() {
            2 => self
                .d2
                .iter()
                .zip(&self.values)
                .map(|(&d2, &h)| d2 + h)
                .fold(R::infinity(), R::min),
            _ => {
                let mut m = R::infinity();
                for &v in self.grid.directions() {
                    let (w, _) = self.reverse_weingarten(v);
                    m = m.min(w.min_eigenvalue());
                }
                m
            }
        }
    }

    /// Tangential Hessian of the extension at direction `v` (n = 3); its
    /// eigenvalues are the principal curvature radii.
    pub(crate) fn reverse_weingarten(&self, v: Point<R>) -> (Sym2<R>, (Point<R>, Point<R>)) {
        let frame = geom::tangent_frame(v);
        let m = match &self.analytic {
            Some(expr) => expr.hessian(v),
            None => hessian_fd(self, v),
        };
        let quad = |a: Point<R>, b: Point<R>| {
            let mut acc = R::zero();
            for i in 0..3 {
                for j in 0..3 {
                    acc += a[i] * m[i][j] * b[j];
                }
            }
            acc
        };
        (
            Sym2 {
                a: quad(frame.0, frame.0),
                b: quad(frame.0, frame.1),
                c: quad(frame.1, frame.1),
            },
            frame,
        )
    }

    /// Boundary point of the Wulff shape in direction index `i`
    /// (inverse Gauss map).
    pub(crate) fn boundary_point(&self, i: usize) -> Point<R> {
        let v = self.grid.directions()[i];
        match self.dimension() {
            2 => {
                let h = self.values[i];
                let hp = self.d1[i];
                [
                    h * v[0] - hp * v[1],
                    h * v[1] + hp * v[0],
                    R::zero(),
                ]
            }
            _ => match &self.analytic {
                Some(expr) => expr.gradient(v),
                None => {
                    let (e1, e2) = geom::tangent_frame(v);
                    let g1 = grad_fd(self, v, e1);
                    let g2 = grad_fd(self, v, e2);
                    geom::axpy(geom::axpy(geom::scale(v, self.values[i]), g1, e1), g2, e2)
                }
            },
        }
    }

    /// Certify convexity and a strictly interior origin.
    pub fn certify(&self) -> Result<()> {
        let hmin = self.min_value();
        if hmin <= R::zero() {
            return Err(Error::OriginNotInterior(hmin.to_f64x()));
        }
        let margin = self.convexity_margin();
        if margin <= R::zero() {
            return Err(Error::NotConvex(margin.to_f64x()));
        }
        Ok(())
    }

    /// Build from raw samples (n = 2): derivatives are spectral.
    pub fn from_samples(grid: Arc<DirectionGrid<R>>, values: Vec<R>) -> Result<Self> {
        if grid.dimension() != 2 {
            return Err(Error::Invalid(
                "sampled construction without analytic data requires n = 2".into(),
            ));
        }
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let (d1, d2) = spectral_derivatives(&values);
        Ok(SupportVector { grid, values, d1, d2, analytic: None })
    }

    pub(crate) fn from_parts(
        grid: Arc<DirectionGrid<R>>,
        values: Vec<R>,
        d1: Vec<R>,
        d2: Vec<R>,
        analytic: Option<SupportExpr<R>>,
    ) -> Self {
        SupportVector { grid, values, d1, d2, analytic }
    }

    /// h(v) + c . v  (translation of the body by c).
    pub fn translate(&self, c: Point<R>) -> Self {
        let dirs = self.grid.directions();
        let values = self
            .values
            .iter()
            .zip(dirs)
            .map(|(&h, &v)| h + geom::dot(c, v))
            .collect();
        let (d1, d2) = match self.dimension() {
            2 => {
                let thetas = self.grid.thetas();
                let d1 = self
                    .d1
                    .iter()
                    .zip(thetas)
                    .map(|(&d, &t)| d - c[0] * t.sin() + c[1] * t.cos())
                    .collect();
                let d2 = self
                    .d2
                    .iter()
                    .zip(thetas)
                    .map(|(&d, &t)| d - c[0] * t.cos() - c[1] * t.sin())
                    .collect();
                (d1, d2)
            }
            _ => (Vec::new(), Vec::new()),
        };
        let analytic = self.analytic.as_ref().map(|e| SupportExpr::Lin {
            a: R::one(),
            left: Arc::new(e.clone()),
            b: R::one(),
            right: Arc::new(SupportExpr::Ball { radius: R::zero(), center: c }),
        });
        SupportVector { grid: self.grid.clone(), values, d1, d2, analytic }
    }

    /// t . h  (homothety).
    pub fn scale(&self, t: R) -> Self {
        let mul = |v: &[R]| v.iter().map(|&x| x * t).collect::<Vec<_>>();
        let analytic = self.analytic.as_ref().map(|e| SupportExpr::Lin {
            a: t,
            left: Arc::new(e.clone()),
            b: R::zero(),
            right: Arc::new(SupportExpr::Ball { radius: R::zero(), center: geom::zero() }),
        });
        SupportVector {
            grid: self.grid.clone(),
            values: mul(&self.values),
            d1: mul(&self.d1),
            d2: mul(&self.d2),
            analytic,
        }
    }

    /// Rotate an n = 2 body by `steps` grid increments (exact on the grid).
    pub fn rotate_steps(&self, steps: usize) -> Self {
        assert_eq!(self.dimension(), 2);
        let n = self.values.len();
        let rot = |v: &[R]| -> Vec<R> {
            (0..n).map(|i| v[(i + n - steps % n) % n]).collect()
        };
        SupportVector {
            grid: self.grid.clone(),
            values: rot(&self.values),
            d1: rot(&self.d1),
            d2: rot(&self.d2),
            analytic: None,
        }
    }
}

/// 2x2 symmetric matrix [[a, b], [b, c]].
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sym2<R: Real> {
    pub a: R,
    pub b: R,
    pub c: R,
}

impl<R: Real> Sym2<R> {
    pub fn det(&self) -> R {
        self.a * self.c - self.b * self.b
    }

    pub fn min_eigenvalue(&self) -> R {
        let half = R::lit(0.5);
        let tr = self.a + self.c;
        let disc = ((self.a - self.c) * (self.a - self.c) + R::lit(4.0) * self.b * self.b).sqrt();
        half * (tr - disc)
    }
}

/// Second-order central differences of the one-homogeneous extension on a
/// tangent frame; fallback when no analytic form is attached (documented
/// lower accuracy).
fn hessian_fd<R: Real>(h: &SupportVector<R>, v: Point<R>) -> [[R; 3]; 3] {
    let eval = |x: Point<R>| -> R {
        let r = geom::norm(x);
        let u = geom::scale(x, R::one() / r);
        r * nearest_value(h, u)
    };
    let d = R::epsilon().powf(R::lit(0.25));
    let mut m = [[R::zero(); 3]; 3];
    let h0 = eval(v);
    for i in 0..3 {
        let mut e = geom::zero();
        e[i] = R::one();
        let hp = eval(geom::axpy(v, d, e));
        let hm = eval(geom::axpy(v, -d, e));
        m[i][i] = (hp + hm - R::lit(2.0) * h0) / (d * d);
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let mut ei = geom::zero();
            ei[i] = R::one();
            let mut ej = geom::zero();
            ej[j] = R::one();
            let pp = eval(geom::axpy(geom::axpy(v, d, ei), d, ej));
            let pm = eval(geom::axpy(geom::axpy(v, d, ei), -d, ej));
            let mp = eval(geom::axpy(geom::axpy(v, -d, ei), d, ej));
            let mm = eval(geom::axpy(geom::axpy(v, -d, ei), -d, ej));
            let val = (pp - pm - mp + mm) / (R::lit(4.0) * d * d);
            m[i][j] = val;
            m[j][i] = val;
        }
    }
    m
}

fn grad_fd<R: Real>(h: &SupportVector<R>, v: Point<R>, e: Point<R>) -> R {
    let eval = |x: Point<R>| -> R {
        let r = geom::norm(x);
        let u = geom::scale(x, R::one() / r);
        r * nearest_value(h, u)
    };
    let d = R::epsilon().powf(R::lit(1.0 / 3.0));
    (eval(geom::axpy(v, d, e)) - eval(geom::axpy(v, -d, e))) / (R::lit(2.0) * d)
}

/// Nearest-node lookup used only by the finite-difference fallback.
fn nearest_value<R: Real>(h: &SupportVector<R>, u: Point<R>) -> R {
    let mut best = R::neg_infinity();
    let mut bi = 0;
    for (i, &d) in h.grid().directions().iter().enumerate() {
        let c = geom::dot(d, u);
        if c > best {
            best = c;
            bi = i;
        }
    }
    h.values()[bi]
}

/// Trigonometric-interpolation derivatives of uniformly sampled periodic
/// data (direct real DFT; grids are a few hundred nodes).
pub fn spectral_derivatives<R: Real>(values: &[R]) -> (Vec<R>, Vec<R>) {
    let n = values.len();
    let kmax = n / 2;
    let two_pi = R::lit(2.0) * R::PI();
    let nf = R::from_usize_(n);
    // cos/sin coefficients
    let mut ak = vec![R::zero(); kmax + 1];
    let mut bk = vec![R::zero(); kmax + 1];
    for k in 0..=kmax {
        let kf = R::from_usize_(k);
        let mut ca = R::zero();
        let mut cb = R::zero();
        for (j, &v) in values.iter().enumerate() {
            let ang = two_pi * kf * R::from_usize_(j) / nf;
            ca += v * ang.cos();
            cb += v * ang.sin();
        }
        let norm = if k == 0 || (k == kmax && n % 2 == 0) {
            R::one() / nf
        } else {
            R::lit(2.0) / nf
        };
        ak[k] = ca * norm;
        bk[k] = cb * norm;
    }
    // Nyquist sine mode is not resolvable on an even grid
    if n % 2 == 0 {
        bk[kmax] = R::zero();
    }
    let mut d1 = vec![R::zero(); n];
    let mut d2 = vec![R::zero(); n];
    for j in 0..n {
        let base = two_pi * R::from_usize_(j) / nf;
        let mut s1 = R::zero();
        let mut s2 = R::zero();
        for k in 1..=kmax {
            let kf = R::from_usize_(k);
            let ang = base * kf;
            let (sin, cos) = ang.sin_cos();
            s1 += kf * (bk[k] * cos - ak[k] * sin);
            s2 -= kf * kf * (ak[k] * cos + bk[k] * sin);
        }
        d1[j] = s1;
        d2[j] = s2;
    }
    (d1, d2)
}

/// Evaluate a support catalog entry on the grid, certify convexity, and
/// attach analytic derivative data.
pub fn catalog_support<R: Real>(
    spec: &ShapeSpec,
    grid: &Arc<DirectionGrid<R>>,
) -> Result<SupportVector<R>> {
    let n = grid.dimension();
    let sv = match spec {
        ShapeSpec::Ball { radius, center } => {
            let r = R::lit(*radius);
            let c = [R::lit(center[0]), R::lit(center[1]), R::lit(center[2])];
            if n == 2 && center[2] != 0.0 {
                return Err(Error::ShapeDimension(spec.label(), n));
            }
            let values: Vec<R> = grid
                .directions()
                .iter()
                .map(|&v| r + geom::dot(c, v))
                .collect();
            let (d1, d2) = if n == 2 {
                let thetas = grid.thetas();
                (
                    thetas
                        .iter()
                        .map(|&t| -c[0] * t.sin() + c[1] * t.cos())
                        .collect(),
                    thetas
                        .iter()
                        .map(|&t| -c[0] * t.cos() - c[1] * t.sin())
                        .collect(),
                )
            } else {
                (Vec::new(), Vec::new())
            };
            SupportVector::from_parts(
                grid.clone(),
                values,
                d1,
                d2,
                Some(SupportExpr::Ball { radius: r, center: c }),
            )
        }
        ShapeSpec::Ellipse { a, b } => {
            if n != 2 {
                return Err(Error::ShapeDimension(spec.label(), n));
            }
            let (af, bf) = (R::lit(*a), R::lit(*b));
            let thetas = grid.thetas();
            let mut values = Vec::with_capacity(grid.len());
            let mut d1 = Vec::with_capacity(grid.len());
            let mut d2 = Vec::with_capacity(grid.len());
            for &t in thetas {
                let (s, c) = t.sin_cos();
                let f = af * af * c * c + bf * bf * s * s;
                let h = f.sqrt();
                let fp = (bf * bf - af * af) * (R::lit(2.0) * t).sin();
                let fpp = R::lit(2.0) * (bf * bf - af * af) * (R::lit(2.0) * t).cos();
                let hp = fp / (R::lit(2.0) * h);
                let hpp = fpp / (R::lit(2.0) * h) - fp * fp / (R::lit(4.0) * h * h * h);
                values.push(h);
                d1.push(hp);
                d2.push(hpp);
            }
            SupportVector::from_parts(grid.clone(), values, d1, d2, None)
        }
        ShapeSpec::Ellipsoid { a, b, c } => {
            if n != 3 {
                return Err(Error::ShapeDimension(spec.label(), n));
            }
            let semi = [R::lit(*a), R::lit(*b), R::lit(*c)];
            let expr = SupportExpr::Ellipsoid { semi };
            let values = grid.directions().iter().map(|&v| expr.eval(v)).collect();
            SupportVector::from_parts(grid.clone(), values, Vec::new(), Vec::new(), Some(expr))
        }
        ShapeSpec::SmoothedPolygon { vertices, rho } => {
            if n != 2 {
                return Err(Error::ShapeDimension(spec.label(), n));
            }
            smoothed_polygon(grid, vertices, R::lit(*rho))?
        }
        ShapeSpec::RandomTrig { seed, degree, margin } => {
            if n != 2 {
                return Err(Error::ShapeDimension(spec.label(), n));
            }
            random_trig(grid, *seed, *degree, R::lit(*margin))
        }
    };
    sv.certify()?;
    Ok(sv)
}

/// a hA + b hB on a shared grid.
pub fn minkowski_combine<R: Real>(
    a: R,
    ha: &SupportVector<R>,
    b: R,
    hb: &SupportVector<R>,
) -> Result<SupportVector<R>> {
    if !Arc::ptr_eq(ha.grid(), hb.grid()) && ha.grid().as_ref() != hb.grid().as_ref() {
        return Err(Error::GridMismatch);
    }
    if a < R::zero() || b < R::zero() || a + b <= R::zero() {
        return Err(Error::Invalid("minkowski coefficients must be >= 0, a+b > 0".into()));
    }
    let comb = |x: &[R], y: &[R]| -> Vec<R> {
        x.iter().zip(y).map(|(&p, &q)| a * p + b * q).collect()
    };
    let analytic = match (ha.analytic(), hb.analytic()) {
        (Some(l), Some(r)) => Some(SupportExpr::Lin {
            a,
            left: Arc::new(l.clone()),
            b,
            right: Arc::new(r.clone()),
        }),
        _ => None,
    };
    let sv = SupportVector::from_parts(
        ha.grid().clone(),
        comb(ha.values(), hb.values()),
        comb(ha.d1(), hb.d1()),
        comb(ha.d2(), hb.d2()),
        analytic,
    );
    sv.certify()?;
    Ok(sv)
}

/// Signed combination h + t hL without the nonnegativity precondition;
/// used by finite-difference families and translation-invariance checks.
pub fn perturbed_support<R: Real>(
    h: &SupportVector<R>,
    t: R,
    hl: &SupportVector<R>,
) -> Result<SupportVector<R>> {
    if h.grid().as_ref() != hl.grid().as_ref() {
        return Err(Error::GridMismatch);
    }
    let comb = |x: &[R], y: &[R]| -> Vec<R> {
        x.iter().zip(y).map(|(&p, &q)| p + t * q).collect()
    };
    let analytic = match (h.analytic(), hl.analytic()) {
        (Some(l), Some(r)) => Some(SupportExpr::Lin {
            a: R::one(),
            left: Arc::new(l.clone()),
            b: t,
            right: Arc::new(r.clone()),
        }),
        _ => None,
    };
    let sv = SupportVector::from_parts(
        h.grid().clone(),
        comb(h.values(), hl.values()),
        comb(h.d1(), hl.d1()),
        comb(h.d2(), hl.d2()),
        analytic,
    );
    sv.certify()?;
    Ok(sv)
}

/// Mollified polygon support plus a rho-ball. The surface-area atoms of the
/// polygon are smeared by a wrapped Gaussian in the normal angle, so the
/// curvature radius is bounded below by rho everywhere.
fn smoothed_polygon<R: Real>(
    grid: &Arc<DirectionGrid<R>>,
    vertices: &[[f64; 2]],
    rho: R,
) -> Result<SupportVector<R>> {
    if vertices.len() < 3 {
        return Err(Error::Invalid("polygon needs at least 3 vertices".into()));
    }
    if rho <= R::zero() {
        return Err(Error::Invalid("smoothing radius must be positive".into()));
    }
    let two_pi = R::lit(2.0) * R::PI();
    // fine sampling of the raw polygon support function
    let m = 4096usize;
    let mf = R::from_usize_(m);
    let mut samples = Vec::with_capacity(m);
    for j in 0..m {
        let t = two_pi * R::from_usize_(j) / mf;
        let (s, c) = t.sin_cos();
        let mut best = R::neg_infinity();
        for p in vertices {
            best = best.max(R::lit(p[0]) * c + R::lit(p[1]) * s);
        }
        samples.push(best);
    }
    // Fourier coefficients with Gaussian mollification exp(-(k w)^2 / 2)
    let scale = vertices
        .iter()
        .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
        .fold(0.0f64, f64::max);
    let w = R::lit(0.3) * rho / R::lit(scale.max(1e-12));
    let kmax_damp = (R::lit(8.5) / w).to_f64x().ceil() as usize;
    let kmax = kmax_damp.min(m / 2 - 1).min(grid.len() / 2 - 1);
    let mut ak = vec![R::zero(); kmax + 1];
    let mut bk = vec![R::zero(); kmax + 1];
    for k in 0..=kmax {
        let kf = R::from_usize_(k);
        let damp = (-(kf * w) * (kf * w) * R::lit(0.5)).exp();
        let mut ca = R::zero();
        let mut cb = R::zero();
        for (j, &v) in samples.iter().enumerate() {
            let ang = two_pi * kf * R::from_usize_(j) / mf;
            ca += v * ang.cos();
            cb += v * ang.sin();
        }
        let norm = if k == 0 { R::one() / mf } else { R::lit(2.0) / mf };
        ak[k] = ca * norm * damp;
        bk[k] = cb * norm * damp;
    }
    ak[0] += rho;
    Ok(trig_series_support(grid, &ak, &bk))
}

/// Seeded random trigonometric support; high modes are shrunk by 0.8 until
/// min(h'' + h) >= margin and min h stays positive.
fn random_trig<R: Real>(
    grid: &Arc<DirectionGrid<R>>,
    seed: u64,
    degree: usize,
    margin: R,
) -> SupportVector<R> {
    let degree = degree.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || -> f64 {
        // Box-Muller on open uniforms
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut ak = vec![R::zero(); degree + 1];
    let mut bk = vec![R::zero(); degree + 1];
    ak[0] = R::one();
    for k in 2..=degree {
        let sigma = 0.35 / ((k * k) as f64);
        ak[k] = R::lit(sigma * gauss());
        bk[k] = R::lit(sigma * gauss());
    }
    // check on a fine angle set, shrink until certified with margin
    let fine = 2048usize;
    let two_pi = R::lit(2.0) * R::PI();
    loop {
        let mut min_curv = R::infinity();
        let mut min_h = R::infinity();
        for j in 0..fine {
            let t = two_pi * R::from_usize_(j) / R::from_usize_(fine);
            let mut h = R::zero();
            let mut curv = R::zero();
            for k in 0..=degree {
                let kf = R::from_usize_(k);
                let ang = kf * t;
                let term = ak[k] * ang.cos() + bk[k] * ang.sin();
                h += term;
                curv += (R::one() - kf * kf) * term;
            }
            min_curv = min_curv.min(curv);
            min_h = min_h.min(h);
        }
        if min_curv >= margin && min_h >= R::lit(0.35) {
            break;
        }
        for k in 2..=degree {
            ak[k] *= R::lit(0.8);
            bk[k] *= R::lit(0.8);
        }
    }
    trig_series_support(grid, &ak, &bk)
}

/// Sample a finite trigonometric series and its derivatives on the grid.
fn trig_series_support<R: Real>(
    grid: &Arc<DirectionGrid<R>>,
    ak: &[R],
    bk: &[R],
) -> SupportVector<R> {
    let thetas = grid.thetas();
    let mut values = Vec::with_capacity(grid.len());
    let mut d1 = Vec::with_capacity(grid.len());
    let mut d2 = Vec::with_capacity(grid.len());
    for &t in thetas {
        let mut h = R::zero();
        let mut hp = R::zero();
        let mut hpp = R::zero();
        for k in 0..ak.len() {
            let kf = R::from_usize_(k);
            let ang = kf * t;
            let (s, c) = ang.sin_cos();
            h += ak[k] * c + bk[k] * s;
            hp += kf * (bk[k] * c - ak[k] * s);
            hpp -= kf * kf * (ak[k] * c + bk[k] * s);
        }
        values.push(h);
        d1.push(hp);
        d2.push(hpp);
    }
    SupportVector::from_parts(grid.clone(), values, d1, d2, None)
}
