//! Away-step conditional gradient (Frank-Wolfe) minimization of the kernel
//! quadratic form over the probability simplex.

use crate::scalar::Real;

use super::kernel::Kernel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// 0 means automatic (50 N + 10000).
    pub max_iter: usize,
    /// Stop when the Frank-Wolfe duality gap falls below gap_tol * q(mu).
    pub gap_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_iter: 0, gap_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverTrace {
    pub iterations: usize,
    pub relative_gap: f64,
    pub converged: bool,
}

pub struct SolverResult<R: Real> {
    pub weights: Vec<R>,
    /// K mu at the final iterate (node potentials).
    pub potentials: Vec<R>,
    pub energy: R,
    pub trace: SolverTrace,
}

/// Minimize q(mu) = mu^T K mu over the simplex starting from `start`
/// (normalized internally). Maintains K mu incrementally; one kernel column
/// per iteration; exact line search.
pub fn minimize_on_simplex<R: Real>(
    kernel: &Kernel<R>,
    start: &[R],
    opts: SolveOptions,
) -> SolverResult<R> {
    let n = kernel.len();
    let max_iter = if opts.max_iter == 0 {
        50 * n + 10_000
    } else {
        opts.max_iter
    };
    let gap_tol = R::lit(opts.gap_tol);

    let total: R = start.iter().cloned().sum();
    let mut mu: Vec<R> = start.iter().map(|&v| v / total).collect();
    let mut kmu = kernel.matvec(&mu);
    let mut q: R = mu.iter().zip(&kmu).map(|(&m, &k)| m * k).sum();
    let mut col = vec![R::zero(); n];
    let mut iterations = 0;
    let mut rel_gap = R::infinity();
    let mut converged = false;

    for it in 0..max_iter {
        iterations = it + 1;
        // gradient is 2 K mu; the factor 2 is kept explicit in the gaps
        let mut i_fw = 0;
        let mut g_min = R::infinity();
        let mut i_aw = 0;
        let mut g_max = R::neg_infinity();
        let mut g_dot_mu = R::zero();
        for j in 0..n {
            let g = kmu[j];
            if g < g_min {
                g_min = g;
                i_fw = j;
            }
            if mu[j] > R::zero() && g > g_max {
                g_max = g;
                i_aw = j;
            }
            g_dot_mu += g * mu[j];
        }
        let gap_fw = R::lit(2.0) * (g_dot_mu - g_min);
        rel_gap = gap_fw / q;
        if rel_gap <= gap_tol {
            converged = true;
            iterations = it;
            break;
        }
        let gap_aw = R::lit(2.0) * (g_max - g_dot_mu);

        if gap_fw >= gap_aw {
            // toward vertex i_fw: d = e_i - mu
            kernel.column(i_fw, &mut col);
            let d_kd = kernel.diag(i_fw) - R::lit(2.0) * kmu[i_fw] + q;
            let g_d = -gap_fw;
            let gamma = if d_kd <= R::zero() {
                R::one()
            } else {
                (-g_d / (R::lit(2.0) * d_kd)).max(R::zero()).min(R::one())
            };
            let keep = R::one() - gamma;
            for j in 0..n {
                mu[j] *= keep;
                kmu[j] = keep * kmu[j] + gamma * col[j];
            }
            mu[i_fw] += gamma;
            q = q + gamma * g_d + gamma * gamma * d_kd;
        } else {
            // away from vertex i_aw: d = mu - e_j
            kernel.column(i_aw, &mut col);
            let d_kd = q - R::lit(2.0) * kmu[i_aw] + kernel.diag(i_aw);
            let g_d = -gap_aw;
            let a = mu[i_aw];
            let gamma_max = if a < R::one() {
                a / (R::one() - a)
            } else {
                R::lit(1e18)
            };
            let gamma = if d_kd <= R::zero() {
                gamma_max
            } else {
                (-g_d / (R::lit(2.0) * d_kd)).max(R::zero()).min(gamma_max)
            };
            let grow = R::one() + gamma;
            for j in 0..n {
                mu[j] *= grow;
                kmu[j] = grow * kmu[j] - gamma * col[j];
            }
            mu[i_aw] = (mu[i_aw] - gamma).max(R::zero());
            // drop the vertex entirely on a maximal away step
            if gamma >= gamma_max {
                mu[i_aw] = R::zero();
            }
            q = q + gamma * g_d + gamma * gamma * d_kd;
        }
    }

    SolverResult {
        weights: mu,
        potentials: kmu,
        energy: q,
        trace: SolverTrace {
            iterations,
            relative_gap: rel_gap.to_f64x(),
            converged,
        },
    }
}
