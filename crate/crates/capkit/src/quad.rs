//! Gauss-Legendre quadrature with panel and grading helpers.

use crate::scalar::Real;

/// Nodes and weights of the `m`-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre<R: Real>(m: usize) -> (Vec<R>, Vec<R>) {
    let mut xs = vec![R::zero(); m];
    let mut ws = vec![R::zero(); m];
    let mf = R::from_usize_(m);
    for i in 0..m {
        // Chebyshev-like initial guess
        let k = R::from_usize_(i) + R::lit(0.75);
        let mut x = (R::PI() * k / (mf + R::lit(0.5))).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_eval(m, x);
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= R::epsilon() * R::lit(4.0) {
                break;
            }
        }
        let (_, dp) = legendre_eval(m, x);
        xs[i] = x;
        ws[i] = R::lit(2.0) / ((R::one() - x * x) * dp * dp);
    }
    xs.reverse();
    ws.reverse();
    (xs, ws)
}

/// Legendre P_m and its derivative at `x`.
fn legendre_eval<R: Real>(m: usize, x: R) -> (R, R) {
    let mut p0 = R::one();
    let mut p1 = x;
    for k in 2..=m {
        let kf = R::from_usize_(k);
        let p2 = ((R::lit(2.0) * kf - R::one()) * x * p1 - (kf - R::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = R::from_usize_(m) * (x * p1 - p0) / (x * x - R::one());
    (p1, dp)
}

/// Integrate `f` over [a, b] with an `m`-point rule.
pub fn integrate<R: Real, F: FnMut(R) -> R>(a: R, b: R, m: usize, mut f: F) -> R {
    let (xs, ws) = gauss_legendre::<R>(m);
    let half = R::lit(0.5);
    let mid = half * (a + b);
    let rad = half * (b - a);
    let mut acc = R::zero();
    for (&x, &w) in xs.iter().zip(&ws) {
        acc += w * f(mid + rad * x);
    }
    acc * rad
}

/// Integrate `f` over consecutive panels given by `breaks`.
pub fn integrate_panels<R: Real, F: FnMut(R) -> R>(breaks: &[R], m: usize, mut f: F) -> R {
    let mut acc = R::zero();
    for win in breaks.windows(2) {
        acc += integrate(win[0], win[1], m, &mut f);
    }
    acc
}

/// Integrate `g(d) * d^(beta-1)` over [0, b]; the algebraic endpoint factor is
/// absorbed by the substitution d = b * xi^(1/beta), which leaves a smooth
/// integrand whenever `g` is smooth.
pub fn integrate_graded<R: Real, F: FnMut(R) -> R>(b: R, beta: R, m: usize, mut g: F) -> R {
    let (xs, ws) = gauss_legendre::<R>(m);
    let half = R::lit(0.5);
    let mut acc = R::zero();
    for (&x, &w) in xs.iter().zip(&ws) {
        let xi = half * (x + R::one());
        let d = b * xi.powf(R::one() / beta);
        acc += half * w * g(d);
    }
    acc * b.powf(beta) / beta
}
