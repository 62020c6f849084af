//! Fractional-calculus oracles: self-consistency of c_{n,s}, stability of
//! a_{n,s} and c_s under refinement, pointwise-Laplacian checks, boundary
//! traces on the disk, and the operator symmetry / norm identities.

use std::f64::consts::PI;

use capkit::equilibrium::*;
use capkit::fractional::*;
use capkit::sphere_geom::*;

// ---- c_{n,s} ----

#[test]
fn cns_self_consistency_spread() {
    for (n, s) in [(2usize, 0.5f64), (2, 0.25), (2, 0.75), (3, 0.5)] {
        let v = cns_constant(n, s, CnsOptions::default()).unwrap();
        assert!(
            v.spread < 0.01,
            "(n,s)=({n},{s}): spread {}",
            v.spread
        );
    }
}

#[test]
fn cns_density_independence() {
    let opts = CnsOptions::default();
    for (n, s) in [(2usize, 0.5f64), (3, 0.5)] {
        let a = cns_with_density(n, s, BumpDensity { radius: 1.0, power: 4 }, opts)
            .unwrap()
            .value;
        let b = cns_with_density(n, s, BumpDensity { radius: 1.3, power: 3 }, opts)
            .unwrap()
            .value;
        assert!(((a - b) / a).abs() < 0.01, "({n},{s}): {a} vs {b}");
    }
}

#[test]
fn cns_dimension_dependence() {
    let s = 0.5;
    let a: f64 = cns_constant(2, s, CnsOptions::default()).unwrap().value;
    let b: f64 = cns_constant(3, s, CnsOptions::default()).unwrap().value;
    assert!((a - b).abs() > 1e-3 * a.max(b));
}

#[test]
fn cns_matches_independent_gamma_route() {
    // independent oracle: the same constant via the composition of the
    // Fourier symbols of the PV operator and the Riesz kernel reduces to
    // s sin(pi s) Gamma(n/2+s) Gamma(n/2-s) / pi^(n+1); Gamma evaluated by
    // the product route Gamma(1+x) = lim m! m^x / (x+1)...(x+m)
    fn gamma(x: f64) -> f64 {
        // Weierstrass/limit definition is too slow; use the duplication-free
        // Lanczos-free product with m = 2^k shifting: Gamma(x) = Gamma(x+m) /
        // (x (x+1) ... (x+m-1)) and Stirling series for Gamma(x+m), m = 12
        let m = 12usize;
        let mut denom = 1.0;
        for k in 0..m {
            denom *= x + k as f64;
        }
        let z: f64 = x + m as f64;
        // Stirling with two correction terms
        let stirl = (2.0 * PI / z).sqrt()
            * (z / std::f64::consts::E).powf(z)
            * (1.0 + 1.0 / (12.0 * z) + 1.0 / (288.0 * z * z));
        stirl / denom
    }
    for (n, s) in [(2usize, 0.5f64), (2, 0.3), (3, 0.6)] {
        let nf = n as f64;
        let closed =
            s * (PI * s).sin() * gamma(nf / 2.0 + s) * gamma(nf / 2.0 - s) / PI.powi(n as i32 + 1);
        let numeric = cns_constant(n, s, CnsOptions::default()).unwrap().value;
        assert!(
            ((numeric - closed) / closed).abs() < 0.005,
            "({n},{s}): numeric {numeric} vs gamma-route {closed}"
        );
    }
}

// ---- a_{n,s}, c_s ----

#[test]
fn a_constant_decreases_in_s() {
    for n in [2usize, 3] {
        let mut prev = f64::INFINITY;
        for s in [0.2, 0.4, 0.6, 0.8] {
            let a: f64 = a_constant(n, s, QuadOptions::default()).unwrap();
            assert!(a < prev, "a({n},{s}) = {a} not decreasing");
            assert!(a.is_finite() && a > 0.0);
            prev = a;
        }
    }
}

#[test]
fn c_s_finite_at_reference_orders() {
    for s in [0.25, 0.5, 0.75] {
        let c: f64 = c_s_constant(s, QuadOptions::default()).unwrap();
        assert!(c.is_finite() && c > 0.0, "c_{s} = {c}");
    }
}

#[test]
fn constants_stable_under_quadrature_doubling() {
    for (n, s) in [(2usize, 0.5f64), (2, 0.25), (3, 0.75)] {
        let lo = QuadOptions { resolution: 48 };
        let hi = QuadOptions { resolution: 96 };
        let a1 = a_constant(n, s, lo).unwrap();
        let a2 = a_constant(n, s, hi).unwrap();
        assert!(((a1 - a2) / a2).abs() < 0.005, "a: {a1} vs {a2}");
        let c1 = c_s_constant(s, lo).unwrap();
        let c2 = c_s_constant(s, hi).unwrap();
        assert!(((c1 - c2) / c2).abs() < 0.005, "c_s: {c1} vs {c2}");
    }
}

#[test]
fn a_constant_against_direct_quadrature() {
    // independent oracle for n = 3: a_{3,s} = 2 pi int_0^inf r (1+r^2)^-(3/2+s) dr
    // has the elementary antiderivative -pi (1+r^2)^(-(1+2s)/2) / ((1+2s)/2)
    for s in [0.25, 0.5, 0.75] {
        let exact = 2.0 * PI / (1.0 + 2.0 * s);
        let a = a_constant(3, s, QuadOptions::default()).unwrap();
        assert!(((a - exact) / exact).abs() < 1e-6, "{a} vs {exact}");
    }
}

#[test]
fn c_s_against_nested_refinement() {
    // brute-force oracle: integrate the original integrand on the raw
    // (r, rt) domain with graded panels, no substitution
    let s = 0.5f64;
    let inner = |r: f64, m: usize| -> f64 {
        // int_r^inf (rt - r)^s / rt^(2s+1) drt, split at 2r and 10r, tail
        // analytic leading order
        let f = |rt: f64| (rt - r).powf(s) / rt.powf(2.0 * s + 1.0);
        let mut acc = 0.0;
        // graded near rt = r: substitute rt = r + u, u = x^(1/(1+s)) scale
        let w = r;
        let steps = m;
        for i in 0..steps {
            let x0 = (i as f64 / steps as f64).powf(1.0 / (1.0 + s)) * w;
            let x1 = (((i + 1) as f64) / steps as f64).powf(1.0 / (1.0 + s)) * w;
            let mid = 0.5 * (x0 + x1);
            acc += f(r + mid) * (x1 - x0);
        }
        for i in 0..steps {
            let x0 = 2.0 * r + (10.0f64 - 2.0) * r * i as f64 / steps as f64;
            let x1 = 2.0 * r + (10.0f64 - 2.0) * r * (i + 1) as f64 / steps as f64;
            acc += f(0.5 * (x0 + x1)) * (x1 - x0);
        }
        // tail beyond 10 r: (rt - r)^s ~ rt^s (1 - s r / rt)
        let z = 10.0 * r;
        acc += z.powf(-s) / s - s * r * z.powf(-s - 1.0) / (s + 1.0);
        acc
    };
    let m = 600;
    let mut oracle = 0.0;
    for i in 0..m {
        // grade r toward 0 where the inner integral blows up like r^(-s)
        let q0 = (i as f64 / m as f64).powf(1.0 / (1.0 - s));
        let q1 = ((i + 1) as f64 / m as f64).powf(1.0 / (1.0 - s));
        let r = 0.5 * (q0 + q1);
        oracle += (1.0 - r).powf(s) * inner(r, 220) * (q1 - q0);
    }
    let c: f64 = c_s_constant(s, QuadOptions::default()).unwrap();
    assert!(
        ((c - oracle) / oracle).abs() < 0.01,
        "c_s {c} vs brute oracle {oracle}"
    );
}

// ---- pointwise fractional Laplacian ----

#[test]
fn annihilates_constants() {
    let field = |_: [f64; 3]| 1.0f64;
    for (n, s) in [(2usize, 0.3f64), (2, 0.5), (3, 0.7)] {
        for x in [[0.0, 0.0, 0.0], [0.7, -0.2, if n == 3 { 0.4 } else { 0.0 }]] {
            let opts = LaplacianOptions {
                tail: TailModel::Decay { coefficient: 0.0, power: 1.0 },
                ..Default::default()
            };
            // constant field: the numerator vanishes identically except for
            // the analytic f(x) tail term, which the decay model must cancel
            // only in the limit; instead treat the constant as its own tail
            let opts = LaplacianOptions {
                tail: TailModel::Decay { coefficient: 0.0, power: 0.0 },
                ..opts
            };
            let v = frac_laplacian_point(&field, n, x, s, 1.0, &opts);
            // the f(x) tail term is the only residue; cancel it against the
            // constant-decay tail with coefficient f(x) and power 0
            let omega = if n == 2 { 2.0 * PI } else { 4.0 * PI };
            let residual = v.raw - omega * opts.cutoff.powf(-2.0 * s) / (2.0 * s);
            assert!(
                residual.abs() < 1e-8,
                "({n},{s}) at {x:?}: residual {residual}"
            );
        }
    }
}

#[test]
fn gaussian_matches_refined_quadrature() {
    // self-refinement oracle: a much finer quadrature of the same integral
    let field = |x: [f64; 3]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
    for (n, s) in [(2usize, 0.4f64), (3, 0.6)] {
        let x = [0.0, 0.0, 0.0];
        let coarse_opts = LaplacianOptions {
            cutoff: 30.0,
            angular: 48,
            radial: 32,
            ..Default::default()
        };
        let fine_opts = LaplacianOptions {
            cutoff: 30.0,
            angular: 256,
            radial: 128,
            shell_breaks: vec![2.0, 4.0, 8.0, 16.0],
            ..Default::default()
        };
        let coarse = frac_laplacian_point(&field, n, x, s, 1.0, &coarse_opts);
        let fine = frac_laplacian_point(&field, n, x, s, 1.0, &fine_opts);
        assert!(
            ((coarse.raw - fine.raw) / fine.raw).abs() < 0.005,
            "({n},{s}): {} vs refined {}",
            coarse.raw,
            fine.raw
        );
        assert!(coarse.raw > 0.0); // concave bump at the origin
        assert!(coarse.error < 0.01 * coarse.raw.abs());
    }
}

fn disk_solution(target: usize, alpha: f64) -> (Body<f64>, EquilibriumSolution<f64>) {
    let g = make_direction_grid::<f64>(2, 512).unwrap();
    let body = wulff_body(
        &catalog_support(&ShapeSpec::Ball { radius: 1.0, center: [0.0; 3] }, &g).unwrap(),
    )
    .unwrap();
    let nodes =
        discretize_body(&body, DiscretizeOptions::new(target, default_grading(alpha))).unwrap();
    let sol = solve_equilibrium(nodes, alpha, SolveOptions::default()).unwrap();
    (body, sol)
}

#[test]
fn equilibrium_potential_is_s_harmonic_outside() {
    let (body, sol) = disk_solution(2000, 1.0);
    for dist in [0.4, 0.8, 1.5] {
        let x = [1.0 + dist, 0.1, 0.0];
        let r = s_harmonicity_residual(&sol, &body, x, 96, 48);
        let ratio = r.raw.abs() / r.abs_scale;
        assert!(ratio < 0.01, "dist {dist}: residual ratio {ratio}");
    }
}

// ---- boundary traces ----

#[test]
fn disk_trace_symmetry_and_exponent() {
    let (body, sol) = disk_solution(2500, 1.0);
    let trace = s_normal_derivative(&sol, &body, 0.5, FitOptions::default()).unwrap();
    assert!(trace.failures.is_empty(), "failures: {:?}", trace.failures);
    // rotational symmetry: |d| equal across nodes within 2% CV
    assert!(trace.cv() < 0.02, "trace CV {}", trace.cv());
    // free exponent recovers s within 0.1
    let mean_exp: f64 =
        trace.fitted_exponent.iter().sum::<f64>() / trace.fitted_exponent.len() as f64;
    assert!((mean_exp - 0.5).abs() < 0.1, "exponent {mean_exp}");
    // all derivatives negative by convention
    assert!(trace.d.iter().all(|&d| d < 0.0));
}

#[test]
fn trace_scaling_consistency() {
    // end-to-end: for R Omega at matched alpha the boundary integral of
    // |d|^2 against h_L = 1 scales like R^(n - alpha - 1) * R^{n-1}... the
    // homogeneity of the capacity derivative is checked in the hadamard
    // suite; here: |d(R ball)| ~ R^(-alpha/2 pointwise... wait: u_R(x) = u(x/R),
    // g_R(t) = g(t/R), c_R = c R^(-s), so |d| scales by R^(-s)
    let (b1, s1) = disk_solution(1500, 1.0);
    let g = make_direction_grid::<f64>(2, 512).unwrap();
    let body2 = wulff_body(
        &catalog_support(&ShapeSpec::Ball { radius: 2.0, center: [0.0; 3] }, &g).unwrap(),
    )
    .unwrap();
    let nodes2 =
        discretize_body(&body2, DiscretizeOptions::new(1500, default_grading(1.0))).unwrap();
    let sol2 = solve_equilibrium(nodes2, 1.0, SolveOptions::default()).unwrap();
    let t1 = s_normal_derivative(&s1, &b1, 0.5, FitOptions::default()).unwrap();
    let t2 = s_normal_derivative(&sol2, &body2, 0.5, FitOptions::default()).unwrap();
    let d1: f64 = t1.d.iter().map(|d| d.abs()).sum::<f64>() / t1.d.len() as f64;
    let d2: f64 = t2.d.iter().map(|d| d.abs()).sum::<f64>() / t2.d.len() as f64;
    let ratio = d2 / d1;
    let expect = 2.0f64.powf(-0.5);
    assert!(
        ((ratio - expect) / expect).abs() < 0.02,
        "|d| scaling {ratio} vs {expect}"
    );
}

#[test]
fn trace_rejects_window_inversion() {
    let (body, sol) = disk_solution(400, 1.0);
    let bad = FitOptions { t_min: 0.5, t_max: 0.1, ..Default::default() };
    assert!(s_normal_derivative(&sol, &body, 0.5, bad).is_err());
}

// ---- operator identities ----

#[test]
fn operator_symmetry_identity() {
    // <u, Lambda v> = <v, Lambda u> for smooth compactly supported bumps
    for (n, s) in [(2usize, 0.5f64), (3, 0.5)] {
        let u = RadialBump { radius: 1.0, power: 2 };
        let v = RadialBump { radius: 1.3, power: 3 };
        let lhs = pairing(n, s, u, v, 64);
        let rhs = pairing(n, s, v, u, 64);
        assert!(
            ((lhs - rhs) / rhs).abs() < 0.01,
            "({n},{s}): {lhs} vs {rhs}"
        );
    }
}

#[test]
fn norm_identity_quadratic_form_vs_gagliardo() {
    // 2 <u, Lambda_s u> equals the Gagliardo double integral; two
    // independent quadrature routes agree within 2%
    for (n, s) in [(2usize, 0.5f64), (2, 0.3)] {
        let u = RadialBump { radius: 1.0, power: 3 };
        let lhs = 2.0 * pairing(n, s, u, u, 64);
        let rhs = gagliardo_seminorm(n, s, u, 64);
        assert!(
            ((lhs - rhs) / rhs).abs() < 0.02,
            "({n},{s}): quadratic form {lhs} vs gagliardo {rhs}"
        );
    }
}

#[test]
fn theorem_constants_assembly() {
    let c: capkit::FracConstants = theorem_constants(2, 0.5, QuadOptions::default()).unwrap();
    assert!(c.c0 > 0.0 && c.c0.is_finite());
    assert!((c.c0 - c.c_s * c.a_ns * c.c_ns).abs() < 1e-15);
    let js = serde_json::to_string(&c.to_json(64)).unwrap();
    assert!(js.contains("\"c0\""));
}
