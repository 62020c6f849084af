//! Equilibrium measures: discretize a convex body, minimize the Riesz energy
//! over probability measures, expose energy, capacity and the potential.

mod kernel;
mod nodeset;
mod solver;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::scalar::Real;
use crate::sphere_geom::Body;

pub use kernel::{
    point_potential, riesz_energy, unit_ball_point_potential, unit_ball_self_energy, Kernel,
    DENSE_NODE_LIMIT,
};
pub use nodeset::{default_grading, discretize_body, DiscretizeOptions, NodeSet, MIN_CELLS};
pub use solver::{minimize_on_simplex, SolveOptions, SolverResult, SolverTrace};

/// Converged (or flagged) equilibrium measure of a node set.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution<R: Real> {
    nodes: NodeSet<R>,
    weights: Vec<R>,
    /// K mu at the nodes; the Frostman potential values.
    node_potentials: Vec<R>,
    alpha: R,
    s1: R,
    energy: R,
    flatness: R,
    trace: SolverTrace,
}

pub fn admissible_alpha(n: usize, alpha: f64) -> Result<()> {
    let hi = 2.0f64.min(n as f64);
    if alpha <= 0.0 || alpha >= hi {
        return Err(Error::AlphaOutOfRange(alpha, hi));
    }
    Ok(())
}

/// Minimize the discrete Riesz energy over the probability simplex by the
/// away-step conditional gradient method, starting from the uniform density.
pub fn solve_equilibrium<R: Real>(
    nodes: NodeSet<R>,
    alpha: R,
    opts: SolveOptions,
) -> Result<EquilibriumSolution<R>> {
    admissible_alpha(nodes.dimension(), alpha.to_f64x())?;
    let s1 = unit_ball_self_energy(nodes.dimension(), alpha);
    let kernel = Kernel::build(&nodes, alpha, s1)?;
    let result = minimize_on_simplex(&kernel, nodes.volumes(), opts);
    let flatness = support_cv(&result.weights, &result.potentials);
    Ok(EquilibriumSolution {
        nodes,
        weights: result.weights,
        node_potentials: result.potentials,
        alpha,
        s1,
        energy: result.energy,
        flatness,
        trace: result.trace,
    })
}

/// Coefficient of variation of the potential over the support of mu.
fn support_cv<R: Real>(weights: &[R], potentials: &[R]) -> R {
    let mut cnt = R::zero();
    let mut mean = R::zero();
    for (w, v) in weights.iter().zip(potentials) {
        if *w > R::zero() {
            mean += *v;
            cnt += R::one();
        }
    }
    mean /= cnt;
    let mut var = R::zero();
    for (w, v) in weights.iter().zip(potentials) {
        if *w > R::zero() {
            var += (*v - mean) * (*v - mean);
        }
    }
    (var / cnt).sqrt() / mean
}

impl<R: Real> EquilibriumSolution<R> {
    pub fn node_set(&self) -> &NodeSet<R> {
        &self.nodes
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn node_potentials(&self) -> &[R] {
        &self.node_potentials
    }

    pub fn alpha(&self) -> R {
        self.alpha
    }

    pub fn energy(&self) -> R {
        self.energy
    }

    /// Frostman flatness: CV of V over support nodes.
    pub fn flatness(&self) -> R {
        self.flatness
    }

    pub fn trace(&self) -> SolverTrace {
        self.trace
    }

    pub fn converged(&self) -> bool {
        self.trace.converged
    }

    /// Riesz potential V(x) of the discrete measure.
    pub fn potential(&self, x: Point<R>) -> R {
        point_potential(&self.nodes, &self.weights, self.alpha, self.s1, x)
    }

    /// Normalized potential u = V / I_alpha (the capacity minimizer).
    pub fn u(&self, x: Point<R>) -> R {
        self.potential(x) / self.energy
    }

    /// Cap_alpha = c_{n,alpha} / I_alpha; the constant comes from
    /// `fractional::cns_constant`.
    pub fn capacity(&self, c_n_alpha: R) -> Result<R> {
        if !self.trace.converged {
            return Err(Error::SolverNotConverged(
                self.trace.relative_gap,
                self.trace.iterations,
            ));
        }
        Ok(c_n_alpha / self.energy)
    }

    pub fn to_json(&self) -> SolutionJson {
        SolutionJson {
            n: self.nodes.dimension(),
            alpha: self.alpha.to_f64x(),
            nodes: self
                .nodes
                .nodes()
                .iter()
                .map(|p| [p[0].to_f64x(), p[1].to_f64x(), p[2].to_f64x()])
                .collect(),
            weights: self.weights.iter().map(|w| w.to_f64x()).collect(),
            i_alpha: self.energy.to_f64x(),
            flatness: self.flatness.to_f64x(),
            iterations: self.trace.iterations,
            relative_gap: self.trace.relative_gap,
            converged: self.trace.converged,
        }
    }
}

/// Discretize-and-solve convenience entry.
pub fn equilibrium_of_body<R: Real>(
    body: &Body<R>,
    disc: DiscretizeOptions,
    alpha: R,
    opts: SolveOptions,
) -> Result<EquilibriumSolution<R>> {
    let nodes = discretize_body(body, disc)?;
    solve_equilibrium(nodes, alpha, opts)
}

/// Rebuild a solution from stored weights (cache hits): one kernel pass
/// recovers the node potentials and the energy.
pub fn solution_from_weights<R: Real>(
    nodes: NodeSet<R>,
    weights: Vec<R>,
    alpha: R,
    trace: SolverTrace,
) -> Result<EquilibriumSolution<R>> {
    admissible_alpha(nodes.dimension(), alpha.to_f64x())?;
    if weights.len() != nodes.len() {
        return Err(Error::Invalid(
            "cached weight count does not match the discretization".into(),
        ));
    }
    let s1 = unit_ball_self_energy(nodes.dimension(), alpha);
    let kernel = Kernel::build(&nodes, alpha, s1)?;
    let potentials = kernel.matvec(&weights);
    let energy: R = weights.iter().zip(&potentials).map(|(&w, &v)| w * v).sum();
    let flatness = support_cv(&weights, &potentials);
    Ok(EquilibriumSolution {
        nodes,
        weights,
        node_potentials: potentials,
        alpha,
        s1,
        energy,
        flatness,
        trace,
    })
}

/// Serialized solution (External Interfaces).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionJson {
    pub n: usize,
    pub alpha: f64,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub i_alpha: f64,
    pub flatness: f64,
    pub iterations: usize,
    pub relative_gap: f64,
    pub converged: bool,
}
