//! Algebraic properties of the discrete operators on random fields.

use proptest::prelude::*;
use segregate::{build_grid, discrete_h1_norm, hat_transform, DensityTuple, Field, Grid, Shape};

fn grids() -> Vec<Grid> {
    vec![
        build_grid(&Shape::Interval { start: 0.0, end: 2.0 }, 12).unwrap(),
        build_grid(&Shape::Rectangle { x0: 0.0, x1: 1.0, y0: 0.0, y1: 0.5 }, 9).unwrap(),
        build_grid(&Shape::Disk { center: [0.3, -0.2], radius: 0.7 }, 11).unwrap(),
    ]
}

fn field(grid: &Grid, raw: &[f64]) -> Field {
    let values = (0..grid.len())
        .map(|k| if grid.is_active(k) { raw[k % raw.len()] } else { 0.0 })
        .collect();
    Field::from_values(grid, values).unwrap()
}

fn combine(grid: &Grid, a: f64, f: &Field, b: f64, g: &Field) -> Field {
    let values = f.values().iter().zip(g.values()).map(|(x, y)| a * x + b * y).collect();
    Field::from_values(grid, values).unwrap()
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-10.0..10.0f64, 150)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_is_linear(f in values(), g in values(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        for grid in grids() {
            let (f, g) = (field(&grid, &f), field(&grid, &g));
            let mix = combine(&grid, a, &f, b, &g);
            for &k in grid.interior() {
                let lf = grid.laplacian(&f, k).unwrap();
                let lg = grid.laplacian(&g, k).unwrap();
                let lhs = grid.laplacian(&mix, k).unwrap();
                let rhs = a * lf + b * lg;
                let scale = (a * lf).abs() + (b * lg).abs() + 1.0 / (grid.h() * grid.h());
                prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn h1_norm_is_a_norm(f in values(), g in values(), a in -5.0..5.0f64) {
        for grid in grids() {
            let (f, g) = (field(&grid, &f), field(&grid, &g));
            let nf = discrete_h1_norm(&grid, &f);
            let ng = discrete_h1_norm(&grid, &g);
            let scaled = discrete_h1_norm(&grid, &f.scaled(a));
            prop_assert!((scaled - a.abs() * nf).abs() <= 1e-12 * (a.abs() * nf).max(1e-300));
            let sum = discrete_h1_norm(&grid, &combine(&grid, 1.0, &f, 1.0, &g));
            prop_assert!(sum <= (nf + ng) * (1.0 + 1e-12));
            prop_assert!(nf >= 0.0);
        }
    }

    #[test]
    fn hat_sum_identity(raw in proptest::collection::vec(0.0..5.0f64, 150), m in 1usize..5) {
        let grid = &grids()[1];
        let u = DensityTuple::new(
            (0..m).map(|i| field(grid, &raw[i * 7..])).collect(),
        ).unwrap();
        let total: Vec<f64> = (0..grid.len()).map(|k| u.iter().map(|f| f[k]).sum()).collect();
        for k in grid.active_nodes() {
            let hats: f64 = (0..m).map(|i| hat_transform(&u, i)[k]).sum();
            let expected = (2.0 - m as f64) * total[k];
            prop_assert!((hats - expected).abs() <= 1e-12 * (1.0 + total[k].abs() * m as f64));
        }
    }
}

#[test]
fn zero_field_has_zero_norm() {
    for grid in grids() {
        assert_eq!(discrete_h1_norm(&grid, &Field::zeros(&grid)), 0.0);
    }
}
