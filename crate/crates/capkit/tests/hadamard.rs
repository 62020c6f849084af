//! Shape-derivative verification on anchor cases: homogeneity of the
//! ball-ball pair, translation invariance, linearity and equivariance of the
//! boundary integral, classical variations.

use capkit::equilibrium::*;
use capkit::fractional::*;
use capkit::hadamard::*;
use capkit::sphere_geom::*;

fn grid() -> std::sync::Arc<DirectionGrid<f64>> {
    make_direction_grid(2, 512).unwrap()
}

fn ball(r: f64, g: &std::sync::Arc<DirectionGrid<f64>>) -> SupportVector<f64> {
    catalog_support(&ShapeSpec::Ball { radius: r, center: [0.0; 3] }, g).unwrap()
}

fn opts() -> HadamardOptions {
    HadamardOptions { target_cells: 2000, ..Default::default() }
}

#[test]
fn ball_ball_homogeneity_anchor() {
    let g = grid();
    let b = ball(1.0, &g);
    let pair = PerturbationPair {
        omega: b.clone(),
        direction: b.clone(),
        omega_label: "ball(1)".into(),
        direction_label: "ball(1)".into(),
    };
    let alpha = 1.0;
    let (cap, _) = capacity_of_support(&b, alpha, 1.0, &opts()).unwrap();
    let (d, err) = capacity_fd_derivative(&pair, alpha, 1.0, &opts()).unwrap();
    // Cap(ball(1+t)) = (1+t)^(n-alpha) Cap(ball(1)): derivative (n-alpha) Cap
    let expect = (2.0 - alpha) * cap;
    assert!(
        ((d - expect) / expect).abs() < 0.02,
        "D = {d} vs (n-alpha) Cap = {expect} (err bar {err})"
    );
}

#[test]
fn stationary_and_translation_directions() {
    let g = grid();
    let b = ball(1.0, &g);
    // h_L = 0: the family is constant
    let zero = SupportVector::from_samples(g.clone(), vec![0.0; g.len()]).unwrap();
    let pair = PerturbationPair {
        omega: b.clone(),
        direction: zero,
        omega_label: "ball(1)".into(),
        direction_label: "origin".into(),
    };
    let (d, _) = capacity_fd_derivative(&pair, 1.0, 1.0, &opts()).unwrap();
    assert!(d.abs() < 1e-12, "zero direction derivative {d}");

    // signed translation direction h_L = c . v: capacity is translation
    // invariant, the derivative vanishes within the error bar
    let trans: Vec<f64> = g.thetas().iter().map(|t| 0.3 * t.cos()).collect();
    let hl = SupportVector::from_samples(g.clone(), trans).unwrap();
    let pair = PerturbationPair {
        omega: b,
        direction: hl,
        omega_label: "ball(1)".into(),
        direction_label: "translation".into(),
    };
    let (d, err) = capacity_fd_derivative(&pair, 1.0, 1.0, &opts()).unwrap();
    let (cap, _) = capacity_of_support(&ball(1.0, &grid()), 1.0, 1.0, &opts()).unwrap();
    assert!(
        d.abs() < err.max(1e-6 * cap) * 4.0,
        "translation derivative {d} (err {err})"
    );
}

#[test]
fn boundary_integral_symmetry_linearity_equivariance() {
    let g = grid();
    let alpha = 1.0;
    let h = catalog_support(&ShapeSpec::Ellipse { a: 1.4, b: 1.0 / 1.4 }, &g).unwrap();
    let body = wulff_body(&h).unwrap();
    let nodes = discretize_body(&body, DiscretizeOptions::new(2000, default_grading(alpha)))
        .unwrap();
    let sol = solve_equilibrium(nodes, alpha, SolveOptions::default()).unwrap();
    let trace = s_normal_derivative(&sol, &body, 0.5, FitOptions::default()).unwrap();

    let l1 = ball(1.0, &g);
    let (b1, _) = boundary_integral_derivative(&body, &trace, &l1, 1.0).unwrap();
    // linearity: doubling h_L doubles B exactly
    let l2 = l1.scale(2.0);
    let (b2, _) = boundary_integral_derivative(&body, &trace, &l2, 1.0).unwrap();
    assert!((b2 - 2.0 * b1).abs() < 1e-12 * b1.abs());

    // ball-ball collapse: B = |d|^2 * surface * R_L for constant traces
    let bd = wulff_body(&ball(1.0, &g)).unwrap();
    let nodes_b =
        discretize_body(&bd, DiscretizeOptions::new(2000, default_grading(alpha))).unwrap();
    let sol_b = solve_equilibrium(nodes_b, alpha, SolveOptions::default()).unwrap();
    let tr_b = s_normal_derivative(&sol_b, &bd, 0.5, FitOptions::default()).unwrap();
    let (bb, _) = boundary_integral_derivative(&bd, &tr_b, &l1, 1.0).unwrap();
    let davg: f64 = tr_b.d.iter().map(|d| d * d).sum::<f64>() / tr_b.d.len() as f64;
    let collapse = davg * bd.surface_area();
    assert!(
        ((bb - collapse) / collapse).abs() < 1e-3,
        "B {bb} vs collapsed {collapse}"
    );

    // equivariance: rotate the body, the direction and the node set together;
    // solver, trace and integral commute with the rotation exactly
    let steps = 64;
    let angle = 2.0 * std::f64::consts::PI * steps as f64 / g.len() as f64;
    let hr = h.rotate_steps(steps);
    let body_r = wulff_body(&hr).unwrap();
    let nodes_r = discretize_body(&body, DiscretizeOptions::new(2000, default_grading(alpha)))
        .unwrap()
        .rotated_z(angle);
    let sol_r = solve_equilibrium(nodes_r, alpha, SolveOptions::default()).unwrap();
    let trace_r = s_normal_derivative(&sol_r, &body_r, 0.5, FitOptions::default()).unwrap();
    let lr = l1.rotate_steps(steps);
    let (br, _) = boundary_integral_derivative(&body_r, &trace_r, &lr, 1.0).unwrap();
    assert!(((br - b1) / b1).abs() < 1e-6, "rotated B {br} vs {b1}");

    // independent re-discretization of the rotated body agrees to the
    // discretizer's isotropy floor
    let nodes_f =
        discretize_body(&body_r, DiscretizeOptions::new(2000, default_grading(alpha))).unwrap();
    let sol_f = solve_equilibrium(nodes_f, alpha, SolveOptions::default()).unwrap();
    let trace_f = s_normal_derivative(&sol_f, &body_r, 0.5, FitOptions::default()).unwrap();
    let (bf, _) = boundary_integral_derivative(&body_r, &trace_f, &lr, 1.0).unwrap();
    assert!(((bf - b1) / b1).abs() < 1e-4, "re-discretized B {bf} vs {b1}");
}

#[test]
fn classical_variations_on_anchors() {
    let g = grid();
    // ball-ball: dV = 2 pi, dM = 2 at R = 1 (n = 2)
    let b = ball(1.0, &g);
    let v = classical_first_variations(&b, &b).unwrap();
    assert!((v.dv_fd - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    assert!((v.dv_int - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    assert!((v.dm_fd - 2.0).abs() < 1e-8);
    assert!((v.dm_int - 2.0).abs() < 1e-12);

    // generic pair: FD and boundary integral agree to 0.5%
    let k = catalog_support(&ShapeSpec::Ellipse { a: 1.5, b: 0.8 }, &g).unwrap();
    let square = catalog_support(
        &ShapeSpec::SmoothedPolygon {
            vertices: vec![[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]],
            rho: 0.2,
        },
        &g,
    )
    .unwrap();
    for (om, dir) in [(&k, &square), (&square, &k)] {
        let v = classical_first_variations(om, dir).unwrap();
        assert!(
            ((v.dv_fd - v.dv_int) / v.dv_int).abs() < 5e-3,
            "dV: {} vs {}",
            v.dv_fd,
            v.dv_int
        );
        assert!(
            ((v.dm_fd - v.dm_int) / v.dm_int).abs() < 5e-3,
            "dM: {} vs {}",
            v.dm_fd,
            v.dm_int
        );
    }

    // Gauss-map identity: dM against L = ball(1) equals 2 for any body
    let v = classical_first_variations(&k, &b).unwrap();
    assert!((v.dm_int - 2.0).abs() < 5e-3 * 2.0, "dm_int {}", v.dm_int);
}

#[test]
fn mini_consistency_report() {
    // three-pair miniature of the standard suite; the acceptance suite runs
    // the full five pairs
    let g = grid();
    let alpha = 1.0;
    let constants = theorem_constants(2, 0.5, QuadOptions { resolution: 48 }).unwrap();
    let b = ball(1.0, &g);
    let e = catalog_support(&ShapeSpec::Ellipse { a: 1.3, b: 1.0 / 1.3 }, &g).unwrap();
    let pairs = vec![
        PerturbationPair {
            omega: b.clone(),
            direction: b.clone(),
            omega_label: "ball".into(),
            direction_label: "ball".into(),
        },
        PerturbationPair {
            omega: e.clone(),
            direction: b.clone(),
            omega_label: "ellipse".into(),
            direction_label: "ball".into(),
        },
        PerturbationPair {
            omega: b.clone(),
            direction: e.clone(),
            omega_label: "ball".into(),
            direction_label: "ellipse".into(),
        },
    ];
    let report = consistency_report(&pairs, alpha, &constants, &opts()).unwrap();
    assert!(
        report.c0_hat_cv < 0.05,
        "c0_hat CV {} over {:?}",
        report.c0_hat_cv,
        report.pairs.iter().map(|p| p.c0_hat).collect::<Vec<_>>()
    );
    // doubling h_L leaves c0_hat unchanged within error bars
    let pair2 = PerturbationPair {
        omega: e.clone(),
        direction: b.scale(2.0),
        omega_label: "ellipse".into(),
        direction_label: "2 ball".into(),
    };
    let single = consistency_report(&pairs[1..2], alpha, &constants, &opts()).unwrap();
    let doubled = consistency_report(std::slice::from_ref(&pair2), alpha, &constants, &opts())
        .unwrap();
    let a = single.pairs[0].c0_hat;
    let b2 = doubled.pairs[0].c0_hat;
    assert!(((a - b2) / a).abs() < 0.02, "{a} vs {b2}");
}
