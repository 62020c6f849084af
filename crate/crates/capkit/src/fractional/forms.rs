//! Quadrature routes to the Gagliardo seminorm and the operator quadratic
//! form, used to verify the operator symmetry and norm identities on smooth
//! radial test functions.

use rayon::prelude::*;

use crate::quad;
use crate::scalar::Real;

use super::laplacian::{frac_laplacian_point, LaplacianOptions, TailModel};

/// Smooth radial profile with compact support.
#[derive(Debug, Clone, Copy)]
pub struct RadialBump<R: Real> {
    pub radius: R,
    pub power: i32,
}

impl<R: Real> RadialBump<R> {
    pub fn eval(&self, r: R) -> R {
        let q = r / self.radius;
        if q >= R::one() {
            R::zero()
        } else {
            (R::one() - q * q).powi(self.power)
        }
    }

    fn eval_pt(&self, x: [R; 3]) -> R {
        self.eval(crate::geom::norm(x))
    }

    /// int f^2 over R^n.
    fn l2sq(&self, n: usize) -> R {
        let omega = sphere_measure::<R>(n);
        omega
            * quad::integrate_graded(self.radius, R::from_usize_(n), 64, |r| {
                let v = self.eval(r);
                v * v
            })
    }
}

fn sphere_measure<R: Real>(n: usize) -> R {
    match n {
        2 => R::lit(2.0) * R::PI(),
        _ => R::lit(4.0) * R::PI(),
    }
}

fn lap_opts<R: Real>(f: RadialBump<R>, r_here: R, resolution: usize) -> LaplacianOptions<R> {
    let sup = f.radius;
    LaplacianOptions {
        inner_radius: R::lit(0.3) * sup,
        shell_breaks: vec![(sup - r_here).abs(), sup + r_here, R::lit(3.0) * sup],
        cutoff: R::lit(6.0) * sup + r_here,
        angular: resolution,
        radial: resolution / 2 + 8,
        tail: TailModel::Zero,
    }
}

/// int u (Lambda_s v) dx, with Lambda_s the un-normalized principal-value
/// integral. The integrand vanishes off supp(u), so the radial x-integral
/// stops at u's support radius.
pub fn pairing<R: Real>(
    n: usize,
    s: R,
    u: RadialBump<R>,
    v: RadialBump<R>,
    resolution: usize,
) -> R {
    let omega = sphere_measure::<R>(n);
    let (xs, ws) = quad::gauss_legendre::<R>(resolution.max(24));
    let half = R::lit(0.5);
    let terms: Vec<R> = xs
        .par_iter()
        .zip(ws.par_iter())
        .map(|(&xg, &wg)| {
            let r = half * (xg + R::one()) * u.radius;
            let x = [r, R::zero(), R::zero()];
            let field = move |y: [R; 3]| v.eval_pt(y);
            let lam = frac_laplacian_point(&field, n, x, s, R::one(), &lap_opts(v, r, resolution));
            wg * half * u.radius * r.powi(n as i32 - 1) * u.eval(r) * lam.raw
        })
        .collect();
    omega * terms.into_iter().sum::<R>()
}

/// Gagliardo double integral int int (f(x) - f(y))^2 / |x-y|^(n+2s) computed
/// as a radial x-integral of per-point polar quadratures.
pub fn gagliardo_seminorm<R: Real>(n: usize, s: R, f: RadialBump<R>, resolution: usize) -> R {
    let omega = sphere_measure::<R>(n);
    let sup = f.radius;
    let x_outer = R::lit(6.0) * sup;
    let two_s = R::lit(2.0) * s;

    // g(x) = int (f(x) - f(y))^2 k dy by polar quadrature around x
    let g_at = |r: R| -> R {
        let fx = f.eval(r);
        let dirs = match n {
            2 => resolution.max(32),
            _ => resolution.max(32),
        };
        let ang = |tau: R| -> R {
            match n {
                2 => {
                    quad::integrate(R::zero(), R::PI(), dirs, |phi| {
                        let q = (r * r + tau * tau + R::lit(2.0) * r * tau * phi.cos())
                            .max(R::zero())
                            .sqrt();
                        let d = fx - f.eval(q);
                        d * d
                    }) / R::PI()
                }
                _ => {
                    quad::integrate(-R::one(), R::one(), dirs, |xi| {
                        let q = (r * r + tau * tau + R::lit(2.0) * r * tau * xi)
                            .max(R::zero())
                            .sqrt();
                        let d = fx - f.eval(q);
                        d * d
                    }) * half_r::<R>()
                }
            }
        };
        let cut = sup + r + R::lit(0.5) * sup;
        let m = resolution / 2 + 8;
        // quadratic vanishing at tau = 0: grade with beta = 2 - 2s... the
        // squared difference vanishes to second order, weight tau^(1-2s) net
        let inner_r = R::lit(0.3) * sup;
        let mut acc = quad::integrate_graded(inner_r, R::lit(2.0) - two_s, m, |tau| {
            ang(tau) / (tau * tau)
        });
        let mut breaks = vec![inner_r, (sup - r).abs().max(inner_r), sup + r, cut];
        breaks.retain(|&b| b >= inner_r && b <= cut);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < R::lit(1e-12));
        acc += quad::integrate_panels(&breaks, m, |tau| {
            tau.powf(-R::one() - two_s) * ang(tau)
        });
        // beyond `cut` the ball around x clears the support: (f(x) - 0)^2
        acc += fx * fx * cut.powf(-two_s) / two_s;
        omega * acc
    };

    let (xs, ws) = quad::gauss_legendre::<R>(resolution.max(24));
    let half = R::lit(0.5);
    let inner: Vec<R> = xs
        .par_iter()
        .zip(ws.par_iter())
        .map(|(&xg, &wg)| {
            let r = half * (xg + R::one()) * x_outer;
            wg * half * x_outer * r.powi(n as i32 - 1) * g_at(r)
        })
        .collect();
    let mut total = omega * inner.into_iter().sum::<R>();
    // x beyond the truncation radius: g(x) ~ ||f||_2^2 |x|^(-n-2s)
    total += omega * f.l2sq(n) * x_outer.powf(-two_s) / two_s;
    total
}

fn half_r<R: Real>() -> R {
    R::lit(0.5)
}
