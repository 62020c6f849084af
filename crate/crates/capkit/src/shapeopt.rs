//! Constrained shape-gradient flows and inequality testers: volume- and
//! mean-width-constrained capacity descent, Serrin-type residuals, and the
//! Brunn-Minkowski deficit for Cap_1.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    default_grading, discretize_body, solve_equilibrium, DiscretizeOptions, EquilibriumSolution,
    SolveOptions,
};
use crate::error::{Error, Result};
use crate::fractional::{s_normal_derivative, FitOptions, FracConstants, NormalDerivativeTrace};
use crate::scalar::Real;
use crate::sphere_geom::{
    best_fit_ball, hausdorff_of_supports, mean_width, minkowski_combine, volume, wulff_body, Body,
    SupportVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Volume,
    MeanWidth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub target_cells: usize,
    /// 0 means the alpha-matched default.
    pub grading: f64,
    pub solve: SolveOptions,
    pub fit: FitOptions,
    /// Step scale: tau = tau_factor * inradius / <|d|^2> at the first
    /// analysis, held fixed afterwards (halved on certification failure).
    /// Normalizing by the mean rather than max |speed| keeps the update
    /// proportional to the residual, so stationary bodies stay put.
    pub tau_factor: f64,
    /// Low-pass cutoff for the interpolated normal speed.
    pub speed_modes: usize,
    pub max_halvings: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            target_cells: 1500,
            grading: 0.0,
            solve: SolveOptions { max_iter: 0, gap_tol: 1e-5 },
            fit: FitOptions::default(),
            tau_factor: 0.1,
            speed_modes: 12,
            max_halvings: 5,
        }
    }
}

impl FlowOptions {
    fn disc(&self, alpha: f64) -> DiscretizeOptions {
        let g = if self.grading > 0.0 {
            self.grading
        } else {
            default_grading(alpha)
        };
        DiscretizeOptions::new(self.target_cells, g)
    }
}

/// One flow iterate.
#[derive(Debug, Clone)]
pub struct FlowState<R: Real> {
    pub support: SupportVector<R>,
    pub step: usize,
    pub capacity: R,
    pub constraint_value: R,
    pub lambda: R,
    pub serrin_cv: R,
    pub tau: R,
    /// Constraint drift before the exact rescaling, relative.
    pub pre_scale_drift: R,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowStepRecord {
    pub step: usize,
    pub capacity: f64,
    pub constraint: f64,
    pub lambda: f64,
    pub serrin_cv: f64,
    pub hausdorff_to_ball: f64,
    pub tau: f64,
    pub pre_scale_drift: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrace<R: Real> {
    pub records: Vec<FlowStepRecord>,
    pub final_support: SupportVector<R>,
    pub reached_stationarity: bool,
    /// (step, support) snapshots for replay.
    pub snapshots: Vec<(usize, SupportVector<R>)>,
}

/// Serrin residual field: |d|^2 in volume mode, |d|^2 / G in mean-width
/// mode; stationarity of the constrained flow means a flat field.
#[derive(Debug, Clone)]
pub struct SerrinResidual<R: Real> {
    pub rho: Vec<R>,
    pub cv: R,
    pub constraint: Constraint,
    /// Mean-width mode: the multiplier identity ratio, predicted to be 1
    /// for a stationary (ball) domain at alpha = 1.
    pub multiplier_ratio: Option<R>,
}

pub fn serrin_residual<R: Real>(
    body: &Body<R>,
    solution: &EquilibriumSolution<R>,
    trace: &NormalDerivativeTrace<R>,
    constraint: Constraint,
    constants: Option<&FracConstants<R>>,
) -> Result<SerrinResidual<R>> {
    let mut rho = Vec::with_capacity(trace.d.len());
    for (&i, &d) in trace.indices.iter().zip(&trace.d) {
        let g = body.gauss_curvature()[i];
        if g <= R::zero() {
            return Err(Error::Invalid(format!(
                "nonpositive Gauss curvature at node {i} on a certified body"
            )));
        }
        let v = match constraint {
            Constraint::Volume => d * d,
            Constraint::MeanWidth => d * d / g,
        };
        rho.push(v);
    }
    let n = R::from_usize_(rho.len());
    let mean = rho.iter().cloned().sum::<R>() / n;
    let var = rho.iter().map(|&v| (v - mean) * (v - mean)).sum::<R>() / n;
    let cv = var.sqrt() / mean;
    let multiplier_ratio = match (constraint, constants) {
        (Constraint::MeanWidth, Some(consts)) => {
            // area-weighted mean of c0 |d|^2 / G times omega_n M / (2 (n-1) Cap_1)
            let mut num = R::zero();
            let mut den = R::zero();
            for ((&i, &d), &w) in trace.indices.iter().zip(&trace.d).zip(&trace.area_weights) {
                num += consts.c0 * d * d / body.gauss_curvature()[i] * w;
                den += w;
            }
            let cap = solution.capacity(consts.c_ns)?;
            let m = mean_width(body);
            let omega = body.support().grid().sphere_measure();
            let nf = R::from_usize_(body.dimension());
            Some(
                (num / den) * omega * m / (R::lit(2.0) * (nf - R::one()) * cap),
            )
        }
        _ => None,
    };
    Ok(SerrinResidual { rho, cv, constraint, multiplier_ratio })
}

struct StepData<R: Real> {
    body: Body<R>,
    solution: EquilibriumSolution<R>,
    trace: NormalDerivativeTrace<R>,
}

fn analyze<R: Real>(
    support: &SupportVector<R>,
    alpha: R,
    opts: &FlowOptions,
) -> Result<StepData<R>> {
    let body = wulff_body(support)?;
    let nodes = discretize_body(&body, opts.disc(alpha.to_f64x()))?;
    let solution = solve_equilibrium(nodes, alpha, opts.solve)?;
    let trace = s_normal_derivative(&solution, &body, alpha * R::lit(0.5), opts.fit)?;
    Ok(StepData { body, solution, trace })
}

/// Normal speed at the trace nodes and the multiplier lambda chosen so the
/// constraint is stationary to first order.
fn speed_field<R: Real>(
    data: &StepData<R>,
    constraint: Constraint,
) -> (Vec<R>, R) {
    let tr = &data.trace;
    match constraint {
        Constraint::Volume => {
            let mut num = R::zero();
            let mut den = R::zero();
            for (&d, &w) in tr.d.iter().zip(&tr.area_weights) {
                num += d * d * w;
                den += w;
            }
            let lambda = -num / den;
            let speed = tr.d.iter().map(|&d| -(d * d + lambda)).collect();
            (speed, lambda)
        }
        Constraint::MeanWidth => {
            let mut num = R::zero();
            let mut den = R::zero();
            for ((&i, &d), &w) in tr.indices.iter().zip(&tr.d).zip(&tr.area_weights) {
                let g = data.body.gauss_curvature()[i];
                num += d * d * g * w;
                den += g * g * w;
            }
            let lambda = -num / den;
            let speed = tr
                .indices
                .iter()
                .zip(&tr.d)
                .map(|(&i, &d)| -(d * d + lambda * data.body.gauss_curvature()[i]))
                .collect();
            (speed, lambda)
        }
    }
}

/// Trigonometric interpolation of the decimated speed onto the full grid,
/// low-passed at `modes`.
fn upsample_speed<R: Real>(speed: &[R], indices: &[usize], n_grid: usize, modes: usize) -> Vec<R> {
    let m = speed.len();
    let mf = R::from_usize_(m);
    let two_pi = R::lit(2.0) * R::PI();
    let kmax = modes.min(m / 2 - 1);
    // DFT at the decimated angles (uniform when the stride divides the grid)
    let mut ak = vec![R::zero(); kmax + 1];
    let mut bk = vec![R::zero(); kmax + 1];
    let nf = R::from_usize_(n_grid);
    for k in 0..=kmax {
        let kf = R::from_usize_(k);
        let mut ca = R::zero();
        let mut cb = R::zero();
        for (j, &v) in speed.iter().enumerate() {
            let theta = two_pi * R::from_usize_(indices[j]) / nf;
            let ang = kf * theta;
            ca += v * ang.cos();
            cb += v * ang.sin();
        }
        let norm = if k == 0 { R::one() / mf } else { R::lit(2.0) / mf };
        ak[k] = ca * norm;
        bk[k] = cb * norm;
    }
    (0..n_grid)
        .map(|j| {
            let theta = two_pi * R::from_usize_(j) / nf;
            let mut v = R::zero();
            for k in 0..=kmax {
                let ang = R::from_usize_(k) * theta;
                v += ak[k] * ang.cos() + bk[k] * ang.sin();
            }
            v
        })
        .collect()
}

/// One descent step with exact constraint renormalization by scaling.
pub fn constrained_flow_step<R: Real>(
    state: &FlowState<R>,
    alpha: R,
    constraint: Constraint,
    tau: R,
    opts: &FlowOptions,
) -> Result<FlowState<R>> {
    if state.support.dimension() != 2 {
        return Err(Error::UnsupportedDimension(state.support.dimension()));
    }
    let data = analyze(&state.support, alpha, opts)?;
    step_from_analysis(state, &data, constraint, tau, opts)
}

fn step_from_analysis<R: Real>(
    state: &FlowState<R>,
    data: &StepData<R>,
    constraint: Constraint,
    tau: R,
    opts: &FlowOptions,
) -> Result<FlowState<R>> {
    let target = state.constraint_value;
    let (speed_dec, lambda) = speed_field(data, constraint);
    let n_grid = state.support.grid().len();
    let speed = upsample_speed(&speed_dec, &data.trace.indices, n_grid, opts.speed_modes);

    let mut tau = tau;
    let mut halvings = 0;
    let updated = loop {
        let values: Vec<R> = state
            .support
            .values()
            .iter()
            .zip(&speed)
            .map(|(&h, &p)| h + tau * p)
            .collect();
        match SupportVector::from_samples(state.support.grid().clone(), values) {
            Ok(sv) if sv.certify().is_ok() => break sv,
            _ => {
                halvings += 1;
                if halvings > opts.max_halvings {
                    return Err(Error::FlowStepFailed(opts.max_halvings));
                }
                tau = tau * R::lit(0.5);
            }
        }
    };

    // exact renormalization by homothety
    let body_new = wulff_body(&updated)?;
    let (value_now, scale) = match constraint {
        Constraint::Volume => {
            let v = volume(&body_new);
            (v, (target / v).powf(R::one() / R::from_usize_(2)))
        }
        Constraint::MeanWidth => {
            let m = mean_width(&body_new);
            (m, target / m)
        }
    };
    let drift = ((value_now - target) / target).abs();
    let rescaled = updated.scale(scale);

    let cap = data
        .solution
        .capacity(R::one())?; // raw 1/I; the caller scales by c_{n,alpha}
    let serrin = serrin_residual(&data.body, &data.solution, &data.trace, constraint, None)?;
    Ok(FlowState {
        support: rescaled,
        step: state.step + 1,
        capacity: cap,
        constraint_value: target,
        lambda,
        serrin_cv: serrin.cv,
        tau,
        pre_scale_drift: drift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowRunOptions {
    pub max_steps: usize,
    /// Stationarity threshold on the Serrin residual CV.
    pub stall_tol: f64,
    /// Keep a support snapshot every this many steps (0 = none).
    pub snapshot_every: usize,
}

impl Default for FlowRunOptions {
    fn default() -> Self {
        FlowRunOptions { max_steps: 200, stall_tol: 0.02, snapshot_every: 0 }
    }
}

/// Iterate the constrained flow until the Serrin residual flattens. Each
/// record describes the analyzed state before the step taken from it; the
/// stationarity check runs before stepping, so stationary inputs are
/// returned untouched.
pub fn flow_to_stationarity<R: Real>(
    support: &SupportVector<R>,
    alpha: R,
    constraint: Constraint,
    run: FlowRunOptions,
    opts: &FlowOptions,
) -> Result<FlowTrace<R>> {
    if support.dimension() != 2 {
        return Err(Error::UnsupportedDimension(support.dimension()));
    }
    let body0 = wulff_body(support)?;
    let target = match constraint {
        Constraint::Volume => volume(&body0),
        Constraint::MeanWidth => mean_width(&body0),
    };
    let mut state = FlowState {
        support: support.clone(),
        step: 0,
        capacity: R::zero(),
        constraint_value: target,
        lambda: R::zero(),
        serrin_cv: R::infinity(),
        tau: R::zero(),
        pre_scale_drift: R::zero(),
    };
    let mut tau = R::zero();
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut reached = false;
    for _ in 0..=run.max_steps {
        if run.snapshot_every > 0 && state.step % run.snapshot_every == 0 {
            snapshots.push((state.step, state.support.clone()));
        }
        let data = analyze(&state.support, alpha, opts)?;
        let serrin =
            serrin_residual(&data.body, &data.solution, &data.trace, constraint, None)?;
        let (_, radius, dev) = best_fit_ball(&data.body);
        records.push(FlowStepRecord {
            step: state.step,
            capacity: data.solution.capacity(R::one())?.to_f64x(),
            constraint: state.constraint_value.to_f64x(),
            lambda: state.lambda.to_f64x(),
            serrin_cv: serrin.cv.to_f64x(),
            hausdorff_to_ball: (dev / radius).to_f64x(),
            tau: tau.to_f64x(),
            pre_scale_drift: state.pre_scale_drift.to_f64x(),
        });
        if serrin.cv.to_f64x() < run.stall_tol {
            reached = true;
            break;
        }
        if state.step >= run.max_steps {
            break;
        }
        if tau <= R::zero() {
            // first analysis pins the step: relative to the mean of |d|^2
            let mut num = R::zero();
            let mut den = R::zero();
            for (&d, &w) in data.trace.d.iter().zip(&data.trace.area_weights) {
                num += d * d * w;
                den += w;
            }
            let inr = state.support.min_value();
            tau = R::lit(opts.tau_factor) * inr / (num / den);
        }
        state = step_from_analysis(&state, &data, constraint, tau, opts)?;
        tau = state.tau; // keep any halvings
    }
    Ok(FlowTrace {
        records,
        final_support: state.support,
        reached_stationarity: reached,
        snapshots,
    })
}

/// Brunn-Minkowski deficit report for Cap_1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BmReport {
    pub cap_omega: f64,
    pub cap_l: f64,
    pub cap_sum_body: f64,
    /// Cap(O+L)^(1/(n-1)) - Cap(O)^(1/(n-1)) - Cap(L)^(1/(n-1)).
    pub deficit: f64,
    /// Resolution-refinement noise bar for the deficit.
    pub noise: f64,
    pub homothetic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmOptions {
    pub target_cells: usize,
    pub grading: f64,
    pub solve: SolveOptions,
    /// Sup-norm tolerance for the homothety flag after normalization.
    pub homothety_tol: f64,
}

impl Default for BmOptions {
    fn default() -> Self {
        BmOptions {
            target_cells: 2500,
            grading: 0.0,
            solve: SolveOptions::default(),
            homothety_tol: 1e-6,
        }
    }
}

/// Brunn-Minkowski check at alpha = 1: the deficit of Cap_1^(1/(n-1)) under
/// Minkowski addition, with noise bars from a half-resolution re-solve.
pub fn brunn_minkowski_check<R: Real>(
    omega: &SupportVector<R>,
    other: &SupportVector<R>,
    c_n_alpha: R,
    opts: &BmOptions,
) -> Result<BmReport> {
    let n = omega.dimension();
    let alpha = R::one();
    let exponent = R::one() / (R::from_usize_(n) - R::one());
    let cap_at = |h: &SupportVector<R>, cells: usize| -> Result<R> {
        let body = wulff_body(h)?;
        let g = if opts.grading > 0.0 { opts.grading } else { default_grading(1.0) };
        let nodes = discretize_body(&body, DiscretizeOptions::new(cells, g))?;
        let sol = solve_equilibrium(nodes, alpha, opts.solve)?;
        sol.capacity(c_n_alpha)
    };
    let sum = minkowski_combine(R::one(), omega, R::one(), other)?;
    let mut vals = [R::zero(); 3];
    let mut noise = R::zero();
    for (i, h) in [omega, other, &sum].into_iter().enumerate() {
        let c_full = cap_at(h, opts.target_cells)?;
        let c_half = cap_at(h, opts.target_cells / 2)?;
        vals[i] = c_full;
        noise += (c_full.powf(exponent) - c_half.powf(exponent)).abs();
    }
    let deficit = vals[2].powf(exponent) - vals[0].powf(exponent) - vals[1].powf(exponent);

    // homothety: normalize translation (Steiner point) and scale (mean width)
    let normalize = |h: &SupportVector<R>| -> Result<SupportVector<R>> {
        let body = wulff_body(h)?;
        let (center, _, _) = best_fit_ball(&body);
        let centered = h.translate([-center[0], -center[1], -center[2]]);
        let m = mean_width(&wulff_body(&centered)?);
        Ok(centered.scale(R::lit(2.0) / m))
    };
    let na = normalize(omega)?;
    let nb = normalize(other)?;
    let homothetic = hausdorff_of_supports(&na, &nb)?.to_f64x() < opts.homothety_tol;
    Ok(BmReport {
        cap_omega: vals[0].to_f64x(),
        cap_l: vals[1].to_f64x(),
        cap_sum_body: vals[2].to_f64x(),
        deficit: deficit.to_f64x(),
        noise: noise.to_f64x(),
        homothetic,
    })
}
