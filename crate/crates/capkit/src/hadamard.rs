//! Shape-derivative verification: finite-difference derivatives of the
//! capacity along Wulff families against the boundary integral of
//! |d_nu^s u|^2 h_L, plus the classical first variations of volume and
//! mean width.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    discretize_body, default_grading, solve_equilibrium, DiscretizeOptions, EquilibriumSolution,
    SolveOptions,
};
use crate::error::{Error, Result};
use crate::fractional::{s_normal_derivative, FitOptions, FracConstants, NormalDerivativeTrace};
use crate::scalar::Real;
use crate::sphere_geom::{
    mean_width, perturbed_support, volume, wulff_body, Body, SupportVector,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HadamardOptions {
    pub target_cells: usize,
    /// 0 means the alpha-matched default.
    pub grading: f64,
    pub solve: SolveOptions,
    pub fit: FitOptions,
    /// Base step; 0 means 0.02 x inradius.
    pub t1: f64,
}

impl Default for HadamardOptions {
    fn default() -> Self {
        HadamardOptions {
            target_cells: 3000,
            grading: 0.0,
            solve: SolveOptions::default(),
            fit: FitOptions::default(),
            t1: 0.0,
        }
    }
}

impl HadamardOptions {
    fn disc(&self, alpha: f64) -> DiscretizeOptions {
        let g = if self.grading > 0.0 {
            self.grading
        } else {
            default_grading(alpha)
        };
        DiscretizeOptions::new(self.target_cells, g)
    }
}

/// Base body, perturbation direction and the differencing step.
#[derive(Debug, Clone)]
pub struct PerturbationPair<R: Real> {
    pub omega: SupportVector<R>,
    pub direction: SupportVector<R>,
    pub omega_label: String,
    pub direction_label: String,
}

/// Solve the equilibrium problem on the Wulff shape of `h` with a matched
/// discretization budget; returns the capacity c / I and the solution.
pub fn capacity_of_support<R: Real>(
    h: &SupportVector<R>,
    alpha: R,
    c_n_alpha: R,
    opts: &HadamardOptions,
) -> Result<(R, EquilibriumSolution<R>)> {
    let body = wulff_body(h)?;
    let nodes = discretize_body(&body, opts.disc(alpha.to_f64x()))?;
    let sol = solve_equilibrium(nodes, alpha, opts.solve)?;
    let cap = sol.capacity(c_n_alpha)?;
    Ok((cap, sol))
}

/// d/dt Cap_alpha(Wulff(h + t hL)) at t = 0 by Richardson-combined central
/// differences at steps t1 and t1/2; the error bar is the difference of the
/// two central-difference estimates.
pub fn capacity_fd_derivative<R: Real>(
    pair: &PerturbationPair<R>,
    alpha: R,
    c_n_alpha: R,
    opts: &HadamardOptions,
) -> Result<(R, R)> {
    let base = wulff_body(&pair.omega)?;
    let t1 = if opts.t1 > 0.0 {
        R::lit(opts.t1)
    } else {
        R::lit(0.02) * base.inradius()
    };
    let t2 = t1 * R::lit(0.5);
    let cap_at = |t: R| -> Result<R> {
        let h = perturbed_support(&pair.omega, t, &pair.direction)
            .map_err(|_| Error::CertificationAt(t.to_f64x()))?;
        let (cap, _) = capacity_of_support(&h, alpha, c_n_alpha, opts)?;
        Ok(cap)
    };
    let d1 = (cap_at(t1)? - cap_at(-t1)?) / (R::lit(2.0) * t1);
    let d2 = (cap_at(t2)? - cap_at(-t2)?) / (R::lit(2.0) * t2);
    let richardson = (R::lit(4.0) * d2 - d1) / R::lit(3.0);
    Ok((richardson, (d2 - d1).abs()))
}

/// Boundary integral B = sum |d_i|^2 h_L(nu_i) s_i over the trace nodes;
/// returns (raw B, c0-scaled B).
pub fn boundary_integral_derivative<R: Real>(
    body: &Body<R>,
    trace: &NormalDerivativeTrace<R>,
    direction: &SupportVector<R>,
    c0: R,
) -> Result<(R, R)> {
    if trace.failure_fraction() > 0.05 {
        return Err(Error::TraceFit {
            node: trace.failures.first().map(|f| f.0).unwrap_or(0),
            reason: format!("{:.1}% of boundary fits failed", 100.0 * trace.failure_fraction()),
        });
    }
    if body.support().grid().as_ref() != direction.grid().as_ref() {
        return Err(Error::GridMismatch);
    }
    let mut b = R::zero();
    for ((&i, &d), &w) in trace
        .indices
        .iter()
        .zip(&trace.d)
        .zip(&trace.area_weights)
    {
        b += d * d * direction.values()[i] * w;
    }
    Ok((b, c0 * b))
}

/// First variations of volume and mean width: finite differences of the
/// functionals along the Wulff family against their boundary integrals.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClassicalVariations {
    pub dv_fd: f64,
    pub dv_int: f64,
    pub dm_fd: f64,
    pub dm_int: f64,
}

pub fn classical_first_variations<R: Real>(
    omega: &SupportVector<R>,
    direction: &SupportVector<R>,
) -> Result<ClassicalVariations> {
    let body = wulff_body(omega)?;
    let t1 = R::lit(1e-3) * body.inradius();
    let t2 = t1 * R::lit(0.5);
    let fd = |f: &dyn Fn(&Body<R>) -> R| -> Result<R> {
        let v = |t: R| -> Result<R> {
            let h = perturbed_support(omega, t, direction)?;
            Ok(f(&wulff_body(&h)?))
        };
        let d1 = (v(t1)? - v(-t1)?) / (R::lit(2.0) * t1);
        let d2 = (v(t2)? - v(-t2)?) / (R::lit(2.0) * t2);
        Ok((R::lit(4.0) * d2 - d1) / R::lit(3.0))
    };
    let dv_fd = fd(&|b| volume(b))?;
    let dm_fd = fd(&|b| mean_width(b))?;
    // dV = int h_L dH, dM = (2/omega_n) int h_L G dH
    let mut dv_int = R::zero();
    let mut dm_int = R::zero();
    for ((hl, s), g) in direction
        .values()
        .iter()
        .zip(body.area_weights())
        .zip(body.gauss_curvature())
    {
        dv_int += *hl * *s;
        dm_int += *hl * *g * *s;
    }
    dm_int = dm_int * R::lit(2.0) / body.support().grid().sphere_measure();
    Ok(ClassicalVariations {
        dv_fd: dv_fd.to_f64x(),
        dv_int: dv_int.to_f64x(),
        dm_fd: dm_fd.to_f64x(),
        dm_int: dm_int.to_f64x(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairReport {
    pub omega: String,
    pub direction: String,
    pub d_fd: f64,
    pub d_fd_err: f64,
    pub b_raw: f64,
    pub c0_hat: f64,
}

/// Shape-derivative consistency over a pair collection: the fitted constants
/// c0_hat = D_fd / B should agree across shapes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeDerivativeReport {
    pub n: usize,
    pub alpha: f64,
    pub pairs: Vec<PairReport>,
    pub c0_hat_mean: f64,
    pub c0_hat_cv: f64,
    pub c0_analytic: f64,
    pub ratio_mean_to_analytic: f64,
}

/// The standard five-pair suite: ball, ellipse, smoothed square and two
/// random trigonometric bodies against varied directions.
pub fn standard_suite<R: Real>(
    grid: &std::sync::Arc<crate::sphere_geom::DirectionGrid<R>>,
) -> Result<Vec<PerturbationPair<R>>> {
    use crate::sphere_geom::{catalog_support, ShapeSpec};
    let ball = ShapeSpec::Ball { radius: 1.0, center: [0.0; 3] };
    let ellipse = ShapeSpec::Ellipse { a: 1.3, b: 1.0 / 1.3 };
    let square = ShapeSpec::SmoothedPolygon {
        vertices: vec![[0.9, 0.9], [-0.9, 0.9], [-0.9, -0.9], [0.9, -0.9]],
        rho: 0.2,
    };
    let trig1 = ShapeSpec::RandomTrig { seed: 1, degree: 6, margin: 0.3 };
    let trig2 = ShapeSpec::RandomTrig { seed: 2, degree: 8, margin: 0.3 };
    let wide = ShapeSpec::Ellipse { a: 2.0, b: 1.0 };
    let specs: [(&ShapeSpec, &ShapeSpec); 5] = [
        (&ball, &ball),
        (&ellipse, &ball),
        (&square, &ball),
        (&trig1, &wide),
        (&trig2, &ball),
    ];
    let mut out = Vec::with_capacity(specs.len());
    for (om, dir) in specs {
        out.push(PerturbationPair {
            omega: catalog_support(om, grid)?,
            direction: catalog_support(dir, grid)?,
            omega_label: om.label(),
            direction_label: dir.label(),
        });
    }
    Ok(out)
}

pub fn consistency_report<R: Real>(
    pairs: &[PerturbationPair<R>],
    alpha: R,
    constants: &FracConstants<R>,
    opts: &HadamardOptions,
) -> Result<ShapeDerivativeReport> {
    if pairs.is_empty() {
        return Err(Error::Invalid("empty pair collection".into()));
    }
    let s = alpha * R::lit(0.5);
    let mut reports = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let (d_fd, err) = capacity_fd_derivative(pair, alpha, constants.c_ns, opts)?;
        let body = wulff_body(&pair.omega)?;
        let nodes = discretize_body(&body, opts.disc(alpha.to_f64x()))?;
        let sol = solve_equilibrium(nodes, alpha, opts.solve)?;
        let trace = s_normal_derivative(&sol, &body, s, opts.fit)?;
        let (b_raw, _) = boundary_integral_derivative(&body, &trace, &pair.direction, constants.c0)?;
        reports.push(PairReport {
            omega: pair.omega_label.clone(),
            direction: pair.direction_label.clone(),
            d_fd: d_fd.to_f64x(),
            d_fd_err: err.to_f64x(),
            b_raw: b_raw.to_f64x(),
            c0_hat: (d_fd / b_raw).to_f64x(),
        });
    }
    let vals: Vec<f64> = reports.iter().map(|r| r.c0_hat).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
    let c0_analytic = constants.c0.to_f64x();
    Ok(ShapeDerivativeReport {
        n: constants.n,
        alpha: alpha.to_f64x(),
        pairs: reports,
        c0_hat_mean: mean,
        c0_hat_cv: var.sqrt() / mean,
        c0_analytic,
        ratio_mean_to_analytic: mean / c0_analytic,
    })
}
