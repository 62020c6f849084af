//! Fractional normal derivatives at the boundary: sample the equilibrium
//! potential along outward normals and fit the boundary layer
//! g(t) = 1 - u(sigma + t nu) by c t^s (1 + b t) with the exponent pinned.

use rayon::prelude::*;

use crate::equilibrium::EquilibriumSolution;
use crate::error::{Error, Result};
use crate::geom;
use crate::scalar::Real;
use crate::sphere_geom::Body;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Smallest probe offset; 0 means 2x the boundary cell size.
    pub t_min: f64,
    /// Largest probe offset; 0 means min(12 t_min, 0.35 inradius).
    pub t_max: f64,
    /// Probe count, geometric between the ends.
    pub points: usize,
    /// Boundary nodes sampled for the trace.
    pub samples: usize,
    /// Relative rms threshold above which a node fit is rejected.
    pub residual_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            t_min: 0.0,
            t_max: 0.0,
            points: 8,
            samples: 64,
            residual_tol: 0.05,
        }
    }
}

/// Per-node trace values on a decimated boundary quadrature.
#[derive(Debug, Clone)]
pub struct NormalDerivativeTrace<R: Real> {
    /// Grid indices of the sampled boundary nodes.
    pub indices: Vec<usize>,
    /// d_i ~ -c: the potential decreases outward, so the one-sided limit of
    /// (u(x + t nu) - u(x)) / t^s is negative; only |d|^2 feeds downstream.
    pub d: Vec<R>,
    /// Free-exponent diagnostic per node.
    pub fitted_exponent: Vec<R>,
    /// Relative rms fit residual per node.
    pub residual: Vec<R>,
    /// Decimated surface quadrature weights matching `indices`.
    pub area_weights: Vec<R>,
    /// Nodes whose fit was rejected, with reasons.
    pub failures: Vec<(usize, String)>,
    pub t_min: R,
    pub t_max: R,
}

impl<R: Real> NormalDerivativeTrace<R> {
    /// Coefficient of variation of |d| over successful nodes.
    pub fn cv(&self) -> R {
        let n = R::from_usize_(self.d.len());
        let mean = self.d.iter().map(|&x| x.abs()).sum::<R>() / n;
        let var = self
            .d
            .iter()
            .map(|&x| (x.abs() - mean) * (x.abs() - mean))
            .sum::<R>()
            / n;
        var.sqrt() / mean
    }

    pub fn failure_fraction(&self) -> f64 {
        self.failures.len() as f64 / (self.d.len() + self.failures.len()).max(1) as f64
    }
}

/// Estimate the s-normal derivative of the equilibrium potential at a
/// decimated set of boundary nodes.
pub fn s_normal_derivative<R: Real>(
    solution: &EquilibriumSolution<R>,
    body: &Body<R>,
    s: R,
    fit: FitOptions,
) -> Result<NormalDerivativeTrace<R>> {
    let grid_len = body.len();
    let count = fit.samples.min(grid_len).max(8);
    let indices: Vec<usize> = (0..count).map(|j| j * grid_len / count).collect();

    let bcell = solution.node_set().boundary_cell_size();
    let t_min = if fit.t_min > 0.0 {
        R::lit(fit.t_min)
    } else {
        R::lit(2.0) * bcell
    };
    let t_max = if fit.t_max > 0.0 {
        R::lit(fit.t_max)
    } else {
        (R::lit(12.0) * t_min).min(R::lit(0.35) * body.inradius())
    };
    if t_max <= t_min {
        return Err(Error::Invalid(format!(
            "trace window degenerate: t_min = {:e}, t_max = {:e}",
            t_min.to_f64x(),
            t_max.to_f64x()
        )));
    }
    let k = fit.points.max(4);
    let ratio = (t_max / t_min).powf(R::one() / R::from_usize_(k - 1));
    let ts: Vec<R> = (0..k)
        .map(|j| t_min * ratio.powi(j as i32))
        .collect();

    let sphere = body.support().grid().sphere_measure();
    let results: Vec<std::result::Result<(usize, R, R, R, R), (usize, String)>> = indices
        .par_iter()
        .map(|&i| {
            let sigma = body.boundary_points()[i];
            let nu = body.normals()[i];
            let mut g = Vec::with_capacity(k);
            for &t in &ts {
                let val = R::one() - solution.u(geom::axpy(sigma, t, nu));
                if val <= R::zero() {
                    return Err((i, format!("g(t) <= 0 at t = {:e}", t.to_f64x())));
                }
                g.push(val);
            }
            // linear least squares on the basis (t^s, t^(s+1))
            let mut a11 = R::zero();
            let mut a12 = R::zero();
            let mut a22 = R::zero();
            let mut b1 = R::zero();
            let mut b2 = R::zero();
            for (&t, &gv) in ts.iter().zip(&g) {
                let p1 = t.powf(s);
                let p2 = p1 * t;
                a11 += p1 * p1;
                a12 += p1 * p2;
                a22 += p2 * p2;
                b1 += p1 * gv;
                b2 += p2 * gv;
            }
            let det = a11 * a22 - a12 * a12;
            let c = (b1 * a22 - b2 * a12) / det;
            let cb = (a11 * b2 - a12 * b1) / det;
            if c <= R::zero() {
                return Err((i, "nonpositive leading coefficient".into()));
            }
            // residual
            let mut ss = R::zero();
            let mut mean_g = R::zero();
            for (&t, &gv) in ts.iter().zip(&g) {
                let fit_v = c * t.powf(s) + cb * t.powf(s + R::one());
                ss += (gv - fit_v) * (gv - fit_v);
                mean_g += gv;
            }
            mean_g /= R::from_usize_(k);
            let resid = (ss / R::from_usize_(k)).sqrt() / mean_g;
            if resid.to_f64x() > fit.residual_tol {
                return Err((i, format!("fit residual {:e}", resid.to_f64x())));
            }
            // free exponent: log-log slope
            let mut sx = R::zero();
            let mut sy = R::zero();
            let mut sxx = R::zero();
            let mut sxy = R::zero();
            for (&t, &gv) in ts.iter().zip(&g) {
                let lx = t.ln();
                let ly = gv.ln();
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
            }
            let kf = R::from_usize_(k);
            let slope = (kf * sxy - sx * sy) / (kf * sxx - sx * sx);
            // decimated surface weight: curvature density times the share of
            // the sphere this sample represents
            let w = body.area_weights()[i] / body.support().grid().weights()[i] * sphere
                / R::from_usize_(count);
            Ok((i, -c, slope, resid, w))
        })
        .collect();

    let mut trace = NormalDerivativeTrace {
        indices: Vec::new(),
        d: Vec::new(),
        fitted_exponent: Vec::new(),
        residual: Vec::new(),
        area_weights: Vec::new(),
        failures: Vec::new(),
        t_min,
        t_max,
    };
    for r in results {
        match r {
            Ok((i, d, slope, resid, w)) => {
                trace.indices.push(i);
                trace.d.push(d);
                trace.fitted_exponent.push(slope);
                trace.residual.push(resid);
                trace.area_weights.push(w);
            }
            Err(f) => trace.failures.push(f),
        }
    }
    if trace.d.is_empty() {
        return Err(Error::TraceFit {
            node: trace.failures.first().map(|f| f.0).unwrap_or(0),
            reason: "all boundary fits failed".into(),
        });
    }
    Ok(trace)
}
