//! Fractional-calculus numerics: the normalization constant c_{n,s}, the
//! pointwise fractional Laplacian, boundary derivative traces, and the
//! constants a_{n,s}, c_s, c_0 of the variational formula.

mod cns;
mod forms;
mod laplacian;
mod trace;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::Real;

pub use cns::{
    cns_constant, cns_with_density, radial_riesz_potential, BumpDensity, CnsOptions, CnsValue,
    CubicSpline, RadialPotentialTable,
};
pub use forms::{gagliardo_seminorm, pairing, RadialBump};
pub use laplacian::{
    frac_laplacian_point, s_harmonicity_residual, LaplacianOptions, LaplacianValue, ScalarField,
    TailModel,
};
pub use trace::{s_normal_derivative, FitOptions, NormalDerivativeTrace};

/// The constants entering the variational formula at order s = alpha/2.
#[derive(Debug, Clone, Copy)]
pub struct FracConstants<R: Real> {
    pub n: usize,
    pub s: R,
    /// Fractional Laplacian normalization (self-consistency value).
    pub c_ns: R,
    /// Spread of the self-consistency ratios.
    pub c_ns_spread: R,
    /// Tail integral a_{n,s} = int_{R^(n-1)} (1 + |z|^2)^(-(n+2s)/2) dz.
    pub a_ns: R,
    /// Boundary-layer double integral c_s.
    pub c_s: R,
    /// c_0 = c_s a_{n,s} c_{n,s}.
    pub c0: R,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    pub resolution: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { resolution: 64 }
    }
}

/// a_{n,s} by radial reduction: omega_{n-2} int_0^inf r^(n-2)
/// (1+r^2)^(-(n+2s)/2) dr, with the algebraic tail summed analytically
/// beyond a cutoff.
pub fn a_constant<R: Real>(n: usize, s: R, opts: QuadOptions) -> Result<R> {
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    check_s(s)?;
    let p = (R::from_usize_(n) + R::lit(2.0) * s) * R::lit(0.5);
    let omega_low = match n {
        2 => R::lit(2.0),            // S^0
        _ => R::lit(2.0) * R::PI(),  // S^1
    };
    let z = R::lit(20.0);
    let m = opts.resolution;
    let body = quad::integrate_panels(
        &[R::zero(), R::one(), R::lit(4.0), z],
        m,
        |r| r.powi(n as i32 - 2) * (R::one() + r * r).powf(-p),
    );
    // tail: r^(n-2) (1+r^2)^(-p) = sum_k binom(-p, k) r^(n-2-2p-2k)
    let mut tail = R::zero();
    let mut coef = R::one();
    for k in 0..10 {
        let kf = R::from_usize_(k);
        if k > 0 {
            coef *= (-p - (kf - R::one())) / kf;
        }
        let e = R::from_usize_(n) - R::lit(2.0) - R::lit(2.0) * p - R::lit(2.0) * kf;
        // int_z^inf r^e dr = -z^(e+1) / (e+1), e < -1
        tail -= coef * z.powf(e + R::one()) / (e + R::one());
    }
    Ok(omega_low * (body + tail))
}

/// c_s = int_0^1 int_r^inf (1-r)^s (rt - r)^s / rt^(2s+1) drt dr, computed
/// as a 2-D tensor quadrature after the substitutions rt = r/w,
/// w = v^(1/s), r = q^(1/(1-s)) which absorb every endpoint singularity.
pub fn c_s_constant<R: Real>(s: R, opts: QuadOptions) -> Result<R> {
    check_s(s)?;
    let m = opts.resolution;
    let one = R::one();
    let inv_s = one / s;
    let inv_1ms = one / (one - s);
    let (xs, ws) = quad::gauss_legendre::<R>(m);
    let half = R::lit(0.5);
    let mut acc = R::zero();
    for (&xq, &wq) in xs.iter().zip(&ws) {
        let q = half * (xq + one);
        let outer = (one - q.powf(inv_1ms)).powf(s);
        for (&xv, &wv) in xs.iter().zip(&ws) {
            let v = half * (xv + one);
            let inner = (one - v.powf(inv_s)).powf(s);
            acc += wq * wv * outer * inner;
        }
    }
    acc = acc * half * half;
    Ok(acc / (s * (one - s)))
}

/// Assemble the full constants table at order s.
pub fn theorem_constants<R: Real>(n: usize, s: R, opts: QuadOptions) -> Result<FracConstants<R>> {
    let a_ns = a_constant(n, s, opts)?;
    let c_s = c_s_constant(s, opts)?;
    let cns = cns_constant(
        n,
        s,
        CnsOptions { resolution: opts.resolution, ..CnsOptions::default() },
    )?;
    Ok(FracConstants {
        n,
        s,
        c_ns: cns.value,
        c_ns_spread: cns.spread,
        a_ns,
        c_s,
        c0: c_s * a_ns * cns.value,
    })
}

fn check_s<R: Real>(s: R) -> Result<()> {
    let sf = s.to_f64x();
    if sf <= 0.0 || sf >= 1.0 {
        return Err(Error::Invalid(format!("s = {sf} outside (0, 1)")));
    }
    Ok(())
}

/// Serialized constants table keyed by (n, s, resolution).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantsJson {
    pub n: usize,
    pub s: f64,
    pub resolution: usize,
    pub c_ns: f64,
    pub c_ns_spread: f64,
    pub a_ns: f64,
    pub c_s: f64,
    pub c0: f64,
}

impl<R: Real> FracConstants<R> {
    pub fn to_json(&self, resolution: usize) -> ConstantsJson {
        ConstantsJson {
            n: self.n,
            s: self.s.to_f64x(),
            resolution,
            c_ns: self.c_ns.to_f64x(),
            c_ns_spread: self.c_ns_spread.to_f64x(),
            a_ns: self.a_ns.to_f64x(),
            c_s: self.c_s.to_f64x(),
            c0: self.c0.to_f64x(),
        }
    }
}
