//! Riesz kernel sums with per-cell self-energy regularization.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::quad;
use crate::scalar::Real;

use super::nodeset::NodeSet;

/// Self-energy of the uniform probability measure on the unit ball for the
/// kernel |x-y|^(alpha-n), reduced to a 1-D integral over the pair-distance
/// density t^(n-1) V_overlap(t): S1 = (omega_{n-1} / |B|^2)
/// int_0^2 t^(alpha-1) V_ov(t) dt. Scaling: S(r) = r^(alpha-n) S1.
pub fn unit_ball_self_energy<R: Real>(n: usize, alpha: R) -> R {
    let overlap = |t: R| -> R {
        match n {
            2 => {
                let half = t * R::lit(0.5);
                let inner = (R::one() - half * half).max(R::zero());
                R::lit(2.0) * (half.acos() - half * inner.sqrt())
            }
            _ => {
                let two = R::lit(2.0);
                R::PI() / R::lit(12.0) * (two - t) * (two - t) * (R::lit(4.0) + t)
            }
        }
    };
    let (omega, ball) = match n {
        2 => (R::lit(2.0) * R::PI(), R::PI()),
        _ => (
            R::lit(4.0) * R::PI(),
            R::lit(4.0) / R::lit(3.0) * R::PI(),
        ),
    };
    // integrand t^(alpha-1) * V_ov(t); algebraic factor graded away at t = 0
    let v = quad::integrate_graded(R::lit(2.0), alpha, 64, overlap);
    omega * v / (ball * ball)
}

/// Mean of the kernel over the unit ball against a point at distance `d`
/// from the center: phi1(d) = (1/|B|) int_{B} |d e1 - y|^(alpha-n) dy.
/// Used by tests to validate the self-energy rule.
pub fn unit_ball_point_potential<R: Real>(n: usize, alpha: R, d: R) -> R {
    let ball = match n {
        2 => R::PI(),
        _ => R::lit(4.0) / R::lit(3.0) * R::PI(),
    };
    // polar coordinates around the evaluation point: weight t^(alpha-1)
    // times the angular arc of the unit ball at distance t
    let arc = |t: R| -> R {
        // fraction of the circle/sphere of radius t about the point that
        // lies inside the unit ball, times the full angular measure
        let cosv = (d * d + t * t - R::one()) / (R::lit(2.0) * d * t);
        match n {
            2 => {
                if cosv <= -R::one() {
                    R::lit(2.0) * R::PI()
                } else if cosv >= R::one() {
                    R::zero()
                } else {
                    R::lit(2.0) * cosv.acos()
                }
            }
            _ => {
                if cosv <= -R::one() {
                    R::lit(4.0) * R::PI()
                } else if cosv >= R::one() {
                    R::zero()
                } else {
                    R::lit(2.0) * R::PI() * (R::one() - cosv)
                }
            }
        }
    };
    let v = quad::integrate_graded(R::one() + d, alpha, 96, arc);
    v / ball
}

/// Kernel representation: dense packed-symmetric storage for moderate node
/// counts, recomputed columns above the threshold.
pub enum Kernel<R: Real> {
    Dense { n: usize, data: Vec<R>, diag: Vec<R> },
    Lazy { nodes: Vec<Point<R>>, exponent: R, diag: Vec<R> },
}

pub const DENSE_NODE_LIMIT: usize = 20_000;

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    // i >= j
    i * (i + 1) / 2 + j
}

impl<R: Real> Kernel<R> {
    /// Build the kernel for a node set; diagonal entries carry the
    /// self-energy of the volume-equivalent ball.
    pub fn build(set: &NodeSet<R>, alpha: R, s1: R) -> Result<Self> {
        let n_dim = set.dimension();
        let exponent = alpha - R::from_usize_(n_dim);
        let nodes = set.nodes();
        let count = nodes.len();
        let diag: Vec<R> = set
            .radii()
            .iter()
            .map(|&r| s1 * r.powf(exponent))
            .collect();
        if count <= DENSE_NODE_LIMIT {
            let rows: Vec<Vec<R>> = (0..count)
                .into_par_iter()
                .map(|i| {
                    let mut row = Vec::with_capacity(i + 1);
                    for j in 0..i {
                        row.push(geom::dist(nodes[i], nodes[j]).powf(exponent));
                    }
                    row.push(diag[i]);
                    row
                })
                .collect();
            let mut data = Vec::with_capacity(count * (count + 1) / 2);
            for row in rows {
                data.extend(row);
            }
            // coincident nodes produce infinite off-diagonal entries
            for i in 0..count {
                for j in 0..i {
                    if !data[packed_index(i, j)].is_finite() {
                        return Err(Error::CoincidentNodes(i, j));
                    }
                }
            }
            Ok(Kernel::Dense { n: count, data, diag })
        } else {
            Ok(Kernel::Lazy { nodes: nodes.to_vec(), exponent, diag })
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Kernel::Dense { n, .. } => *n,
            Kernel::Lazy { nodes, .. } => nodes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn diag(&self, i: usize) -> R {
        match self {
            Kernel::Dense { data, .. } => data[packed_index(i, i)],
            Kernel::Lazy { diag, .. } => diag[i],
        }
    }

    /// Write column i into `out`.
    pub fn column(&self, i: usize, out: &mut [R]) {
        match self {
            Kernel::Dense { n, data, .. } => {
                for j in 0..=i {
                    out[j] = data[packed_index(i, j)];
                }
                for j in (i + 1)..*n {
                    out[j] = data[packed_index(j, i)];
                }
            }
            Kernel::Lazy { nodes, exponent, diag } => {
                let xi = nodes[i];
                out.par_iter_mut().enumerate().for_each(|(j, o)| {
                    *o = if j == i {
                        diag[i]
                    } else {
                        geom::dist(xi, nodes[j]).powf(*exponent)
                    };
                });
            }
        }
    }

    /// K mu with a fixed (row-major) summation order.
    pub fn matvec(&self, mu: &[R]) -> Vec<R> {
        match self {
            Kernel::Dense { n, data, .. } => (0..*n)
                .into_par_iter()
                .map(|i| {
                    let mut acc = R::zero();
                    for j in 0..=i {
                        acc += data[packed_index(i, j)] * mu[j];
                    }
                    for j in (i + 1)..*n {
                        acc += data[packed_index(j, i)] * mu[j];
                    }
                    acc
                })
                .collect(),
            Kernel::Lazy { nodes, exponent, diag } => (0..nodes.len())
                .into_par_iter()
                .map(|i| {
                    let xi = nodes[i];
                    let mut acc = R::zero();
                    for (j, &xj) in nodes.iter().enumerate() {
                        let k = if j == i {
                            diag[i]
                        } else {
                            geom::dist(xi, xj).powf(*exponent)
                        };
                        acc += k * mu[j];
                    }
                    acc
                })
                .collect(),
        }
    }
}

/// Discrete Riesz energy of a weighted node set:
/// sum_{j != k} mu_j mu_k |x_j - x_k|^(alpha-n) + sum_j mu_j^2 S_j.
pub fn riesz_energy<R: Real>(set: &NodeSet<R>, weights: &[R], alpha: R) -> Result<R> {
    let n = set.dimension();
    let a = alpha.to_f64x();
    if a <= 0.0 || a >= 2.0f64.min(n as f64) {
        return Err(Error::AlphaOutOfRange(a, 2.0f64.min(n as f64)));
    }
    if weights.len() != set.len() {
        return Err(Error::Invalid("weight/node count mismatch".into()));
    }
    let s1 = unit_ball_self_energy(n, alpha);
    let exponent = alpha - R::from_usize_(n);
    let nodes = set.nodes();
    let radii = set.radii();
    let partial: Vec<R> = (0..nodes.len())
        .into_par_iter()
        .map(|j| {
            let mut acc = weights[j] * weights[j] * s1 * radii[j].powf(exponent);
            for k in 0..j {
                let d = geom::dist(nodes[j], nodes[k]);
                acc += R::lit(2.0) * weights[j] * weights[k] * d.powf(exponent);
            }
            acc
        })
        .collect();
    Ok(partial.into_iter().sum())
}

/// Riesz potential of the weighted node set at `x`, with the self-energy
/// value standing in for the kernel inside a cell radius.
pub fn point_potential<R: Real>(
    set: &NodeSet<R>,
    weights: &[R],
    alpha: R,
    s1: R,
    x: Point<R>,
) -> R {
    let exponent = alpha - R::from_usize_(set.dimension());
    let mut acc = R::zero();
    for ((node, w), r) in set.nodes().iter().zip(weights).zip(set.radii()) {
        let d = geom::dist(*node, x);
        let k = if d < *r {
            s1 * r.powf(exponent)
        } else {
            d.powf(exponent)
        };
        acc += *w * k;
    }
    acc
}
