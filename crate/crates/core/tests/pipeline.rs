//! Solvers, verifier and file formats working together on small 2D grids.

use segregate::io::{read_tuple, write_tuple};
use segregate::{
    build_boundary, build_grid, certify, compare_limits, limit_direct, limit_two_species,
    solve_eps, Arc, BoundarySpec, Grid, LimitInit, LimitOptions, Shape, SolveOptions, Tolerances,
};

fn square(n: usize) -> Grid {
    build_grid(&Shape::Rectangle { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }, n).unwrap()
}

fn two_edges(g: &Grid) -> BoundarySpec {
    build_boundary(g, &[vec![Arc::new(0.75, 1.0, 1.0)], vec![Arc::new(0.25, 0.5, 0.7)]]).unwrap()
}

#[test]
fn projection_reaches_the_closed_form_from_any_start() {
    let g = square(33);
    let bc = two_edges(&g);
    let closed = limit_two_species(&g, &bc).unwrap();
    let (warm, _) = solve_eps(&g, &bc, 1e-3, &SolveOptions { omega: 1.8, ..Default::default() }, None).unwrap();
    let opts = LimitOptions { omega: 1.8, ..Default::default() };
    for init in [LimitInit::HarmonicExtensions, LimitInit::ZeroInterior, LimitInit::State(warm)] {
        let (u, report) = limit_direct(&g, &bc, &opts, &init).unwrap();
        assert!(report.converged);
        let cmp = compare_limits(&g, &u, &closed).unwrap();
        assert!(cmp.headline < 1e-10, "{}", cmp.headline);
    }
}

#[test]
fn threaded_sweeps_agree_on_a_disk() {
    let g = build_grid(&Shape::Disk { center: [0.0, 0.0], radius: 1.0 }, 33).unwrap();
    let third = 1.0 / 3.0;
    let bc = build_boundary(
        &g,
        &[
            vec![Arc::new(0.0, third, 1.0)],
            vec![Arc::new(third, 2.0 * third, 1.0)],
            vec![Arc::new(2.0 * third, 1.0, 1.0)],
        ],
    )
    .unwrap();
    let seq = SolveOptions { omega: 1.7, ..Default::default() };
    let par = SolveOptions { threads: Some(3), ..seq };
    let (a, ra) = solve_eps(&g, &bc, 1e-2, &seq, None).unwrap();
    let (b, rb) = solve_eps(&g, &bc, 1e-2, &par, None).unwrap();
    assert!(ra.converged && rb.converged);
    assert!(compare_limits(&g, &a, &b).unwrap().headline < 1e-9);

    let lim = LimitOptions { omega: 1.7, ..Default::default() };
    let (c, _) = limit_direct(&g, &bc, &lim, &LimitInit::HarmonicExtensions).unwrap();
    let (d, _) = limit_direct(&g, &bc, &LimitOptions { threads: Some(3), ..lim }, &LimitInit::HarmonicExtensions).unwrap();
    assert!(compare_limits(&g, &c, &d).unwrap().headline < 1e-10);
}

#[test]
fn certificates_survive_a_file_round_trip() {
    let g = square(17);
    let bc = two_edges(&g);
    let u = limit_two_species(&g, &bc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_tuple(dir.path(), &g, &u).unwrap();
    let back = read_tuple(dir.path(), &g).unwrap();
    assert_eq!(back, u);
    let tol = Tolerances::relative_to(bc.scale());
    assert_eq!(certify(&g, &bc, &back, &tol).unwrap(), certify(&g, &bc, &u, &tol).unwrap());
    assert!(certify(&g, &bc, &back, &tol).unwrap().class_s);
}
