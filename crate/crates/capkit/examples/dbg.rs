use capkit::equilibrium::*;
use capkit::sphere_geom::*;
fn main() {
    let g = make_direction_grid::<f64>(2, 512).unwrap();
    let b = wulff_body(&catalog_support(&ShapeSpec::Ball{radius:1.0, center:[0.0;3]}, &g).unwrap()).unwrap();
    for (t, gm) in [(2000usize, 1.5f64), (1000, 1.0), (1000, 2.0), (3000, 1.5)] {
        let nodes = discretize_body(&b, DiscretizeOptions::new(t, gm)).unwrap();
        let mut rmin = f64::INFINITY; let mut rmax: f64 = 0.0;
        for p in nodes.nodes() { let r = (p[0]*p[0]+p[1]*p[1]).sqrt(); rmin = rmin.min(r); rmax = rmax.max(r); }
        println!("target={t} g={gm}: N={} vol={:.4} rmin={:.4} rmax={:.4} bcell={:.4}", nodes.len(), nodes.total_volume(), rmin, rmax, nodes.boundary_cell_size());
    }
}
