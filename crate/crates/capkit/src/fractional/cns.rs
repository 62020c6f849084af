//! The fractional-Laplacian normalization constant c_{n,s}, computed by
//! self-consistency: form the Riesz potential W of a smooth compactly
//! supported radial density rho by quadrature, apply the un-normalized
//! principal-value integral L of the fractional Laplacian to W, and return
//! rho(x) / L(x) averaged over evaluation points. With this constant the
//! operator applied to a Riesz potential reproduces its density exactly.

use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::Real;

/// Natural cubic spline on an increasing abscissa grid.
pub struct CubicSpline<R: Real> {
    xs: Vec<R>,
    ys: Vec<R>,
    m: Vec<R>, // second derivatives
}

impl<R: Real> CubicSpline<R> {
    pub fn new(xs: Vec<R>, ys: Vec<R>) -> Self {
        let n = xs.len();
        assert!(n >= 3);
        let mut a = vec![R::zero(); n];
        let mut b = vec![R::one(); n];
        let mut c = vec![R::zero(); n];
        let mut d = vec![R::zero(); n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            a[i] = h0;
            b[i] = R::lit(2.0) * (h0 + h1);
            c[i] = h1;
            d[i] = R::lit(6.0) * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        // natural boundary conditions; Thomas algorithm
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] = b[i] - w * c[i - 1];
            d[i] = d[i] - w * d[i - 1];
        }
        let mut m = vec![R::zero(); n];
        m[n - 1] = d[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
        }
        CubicSpline { xs, ys, m }
    }

    pub fn eval(&self, x: R) -> R {
        let n = self.xs.len();
        let x = x.max(self.xs[0]).min(self.xs[n - 1]);
        // binary search for the interval
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.xs[hi] - self.xs[lo];
        let t = (x - self.xs[lo]) / h;
        let u = R::one() - t;
        u * self.ys[lo]
            + t * self.ys[hi]
            + h * h / R::lit(6.0)
                * ((u * u * u - u) * self.m[lo] + (t * t * t - t) * self.m[hi])
    }
}

/// Smooth compactly supported radial density (1 - (r/a)^2)^p for r < a.
#[derive(Debug, Clone, Copy)]
pub struct BumpDensity<R: Real> {
    pub radius: R,
    pub power: i32,
}

impl<R: Real> BumpDensity<R> {
    pub fn eval(&self, r: R) -> R {
        let q = r / self.radius;
        if q >= R::one() {
            R::zero()
        } else {
            (R::one() - q * q).powi(self.power)
        }
    }

    /// Total mass int rho = omega_{n-1} int_0^a r^(n-1) rho(r) dr.
    pub fn mass(&self, n: usize) -> R {
        let omega = match n {
            2 => R::lit(2.0) * R::PI(),
            _ => R::lit(4.0) * R::PI(),
        };
        let beta = R::from_usize_(n);
        omega * quad::integrate_graded(self.radius, beta, 64, |r| self.eval(r))
    }
}

/// Angular mean of rho(|x + d w|) over the unit sphere of directions w,
/// for |x| = r: the cross-section of a radial profile.
fn angular_mean<R: Real, F: Fn(R) -> R>(n: usize, rho: &F, r: R, d: R, m: usize) -> R {
    match n {
        2 => {
            // (1/pi) int_0^pi rho(sqrt(r^2 + d^2 + 2 r d cos phi)) dphi
            quad::integrate(R::zero(), R::PI(), m, |phi| {
                let q2 = r * r + d * d + R::lit(2.0) * r * d * phi.cos();
                rho(q2.max(R::zero()).sqrt())
            }) / R::PI()
        }
        _ => {
            // (1/2) int_{-1}^{1} rho(sqrt(r^2 + d^2 + 2 r d xi)) dxi
            quad::integrate(-R::one(), R::one(), m, |xi| {
                let q2 = r * r + d * d + R::lit(2.0) * r * d * xi;
                rho(q2.max(R::zero()).sqrt())
            }) * R::lit(0.5)
        }
    }
}

fn sphere_measure<R: Real>(n: usize) -> R {
    match n {
        2 => R::lit(2.0) * R::PI(),
        _ => R::lit(4.0) * R::PI(),
    }
}

/// Riesz potential W(r) = int |x - y|^(2s - n) rho(|y|) dy of a radial
/// density supported in [0, sup], by polar quadrature centered at x.
pub fn radial_riesz_potential<R: Real, F: Fn(R) -> R>(
    n: usize,
    s: R,
    rho: &F,
    sup: R,
    r: R,
    m: usize,
) -> R {
    let omega = sphere_measure::<R>(n);
    // weight d^(2s - n) * d^(n-1) = d^(2s - 1)
    let beta = R::lit(2.0) * s;
    let d_in = (sup - r).abs();
    let d_out = sup + r;
    let mut acc = R::zero();
    if d_in > R::lit(1e-14) {
        acc += quad::integrate_graded(d_in, beta, m, |d| angular_mean(n, rho, r, d, m));
    }
    acc += quad::integrate(d_in, d_out, m, |d| {
        d.powf(beta - R::one()) * angular_mean(n, rho, r, d, m)
    });
    omega * acc
}

/// Radial table of W with an algebraic far tail, cheap to evaluate.
pub struct RadialPotentialTable<R: Real> {
    spline: CubicSpline<R>,
    cutoff: R,
    tail_coefficient: R,
    tail_power: R,
}

impl<R: Real> RadialPotentialTable<R> {
    pub fn build<F: Fn(R) -> R + Sync>(
        n: usize,
        s: R,
        rho: &F,
        sup: R,
        mass: R,
        m: usize,
    ) -> Self {
        let cutoff = R::lit(120.0) * sup;
        let dense_end = R::lit(3.0) * sup;
        let mut xs: Vec<R> = Vec::new();
        let dense = 180usize;
        for i in 0..=dense {
            xs.push(dense_end * R::from_usize_(i) / R::from_usize_(dense));
        }
        let logn = 140usize;
        let lr = (cutoff / dense_end).ln();
        for i in 1..=logn {
            xs.push(dense_end * (lr * R::from_usize_(i) / R::from_usize_(logn)).exp());
        }
        use rayon::prelude::*;
        let ys: Vec<R> = xs
            .par_iter()
            .map(|&r| radial_riesz_potential(n, s, rho, sup, r, m))
            .collect();
        RadialPotentialTable {
            spline: CubicSpline::new(xs, ys),
            cutoff,
            tail_coefficient: mass,
            tail_power: R::lit(2.0) * s - R::from_usize_(n),
        }
    }

    pub fn eval(&self, r: R) -> R {
        if r <= self.cutoff {
            self.spline.eval(r)
        } else {
            self.tail_coefficient * r.powf(self.tail_power)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnsOptions {
    /// Gauss points per panel in the W table and the operator quadrature.
    pub resolution: usize,
    /// Relative spread tolerance across evaluation points.
    pub spread_tol: f64,
}

impl Default for CnsOptions {
    fn default() -> Self {
        CnsOptions { resolution: 64, spread_tol: 0.01 }
    }
}

#[derive(Debug, Clone)]
pub struct CnsValue<R: Real> {
    pub value: R,
    pub spread: R,
    pub ratios: Vec<R>,
}

/// Un-normalized principal-value operator applied to a radial function
/// given by `table`, evaluated at |x| = r0:
/// L(x) = P.V. int (W(x) - W(y)) / |x - y|^(n + 2s) dy.
fn pv_operator_radial<R: Real>(
    n: usize,
    s: R,
    table: &RadialPotentialTable<R>,
    mass: R,
    r0: R,
    sup: R,
    m: usize,
) -> R {
    let omega = sphere_measure::<R>(n);
    let wx = table.eval(r0);
    let radius_at = |tau: R, c: R| -> R {
        (r0 * r0 + tau * tau + R::lit(2.0) * r0 * tau * c)
            .max(R::zero())
            .sqrt()
    };
    // angular mean of W(x) - W(y) on the circle/sphere |y - x| = tau;
    // antipodal symmetry of the angular rule realizes the symmetrized
    // difference, so the tau -> 0 singularity is quadratically damped
    let ang_mean = |tau: R| -> R {
        match n {
            2 => {
                quad::integrate(R::zero(), R::PI(), m, |phi| {
                    let c = phi.cos();
                    R::lit(2.0) * wx
                        - table.eval(radius_at(tau, c))
                        - table.eval(radius_at(tau, -c))
                }) / (R::lit(2.0) * R::PI())
            }
            _ => {
                quad::integrate(R::zero(), R::one(), m, |xi| {
                    R::lit(2.0) * wx
                        - table.eval(radius_at(tau, xi))
                        - table.eval(radius_at(tau, -xi))
                }) * R::lit(0.5)
            }
        }
    };
    let r_inner = R::lit(0.3) * sup;
    let r_cut = R::lit(100.0) * sup;
    // inner: integrand tau^(1 - 2s) * [sym / tau^2]; grade with beta = 2 - 2s
    let beta = R::lit(2.0) - R::lit(2.0) * s;
    let mut acc = quad::integrate_graded(r_inner, beta, m, |tau| {
        omega * ang_mean(tau) / (tau * tau)
    });
    // shells with breakpoints where spheres around x touch the support edge
    let mut breaks = vec![r_inner, (sup - r0).abs().max(r_inner), sup + r0, R::lit(3.0) * sup,
        R::lit(10.0) * sup, R::lit(30.0) * sup, r_cut];
    breaks.retain(|&b| b >= r_inner && b <= r_cut);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < R::lit(1e-12));
    acc += quad::integrate_panels(&breaks, m, |tau| {
        omega * tau.powf(-R::one() - R::lit(2.0) * s) * ang_mean(tau)
    });
    // analytic tail: the W(x) part exactly, the W(y) part via its asymptote
    let two_s = R::lit(2.0) * s;
    acc += wx * omega * r_cut.powf(-two_s) / two_s;
    acc -= mass * omega * r_cut.powf(-R::from_usize_(n)) / R::from_usize_(n);
    acc
}

/// Self-consistency estimate of c_{n,s} with the given density.
pub fn cns_with_density<R: Real>(
    n: usize,
    s: R,
    density: BumpDensity<R>,
    opts: CnsOptions,
) -> Result<CnsValue<R>> {
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let sf = s.to_f64x();
    if sf <= 0.0 || sf >= 1.0 {
        return Err(Error::Invalid(format!("s = {sf} outside (0, 1)")));
    }
    let m = opts.resolution;
    let sup = density.radius;
    let mass = density.mass(n);
    let rho = |r: R| density.eval(r);
    let table = RadialPotentialTable::build(n, s, &rho, sup, mass, m);
    let points = [0.05, 0.2, 0.35, 0.5, 0.65];
    let mut ratios = Vec::with_capacity(points.len());
    for &p in &points {
        let r0 = R::lit(p) * sup;
        let l = pv_operator_radial(n, s, &table, mass, r0, sup, m);
        ratios.push(density.eval(r0) / l);
    }
    let mean = ratios.iter().cloned().sum::<R>() / R::from_usize_(ratios.len());
    let max = ratios.iter().cloned().fold(R::neg_infinity(), R::max);
    let min = ratios.iter().cloned().fold(R::infinity(), R::min);
    let spread = (max - min) / mean;
    if spread.to_f64x() > opts.spread_tol {
        return Err(Error::SpreadCheckFailed(spread.to_f64x(), opts.spread_tol));
    }
    Ok(CnsValue { value: mean, spread, ratios })
}

/// c_{n,s} with the default test density.
pub fn cns_constant<R: Real>(n: usize, s: R, opts: CnsOptions) -> Result<CnsValue<R>> {
    cns_with_density(n, s, BumpDensity { radius: R::one(), power: 4 }, opts)
}
