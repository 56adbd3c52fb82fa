use segregate_wasm::{rate_study_1d, Demo};

const SQUARE_TWO: &str = include_str!("../../../scenarios/square_two.cfg");
const DISK_THREE: &str = include_str!("../../../scenarios/disk_three.cfg");

#[test]
fn two_species_limit_is_segregated() {
    let demo = Demo::load(SQUARE_TWO, Some(33)).unwrap();
    let sol = demo.limit().unwrap();
    assert_eq!(sol.values().len(), 2 * 33 * 33);
    assert_eq!(sol.overlap(), 0.0);
    assert!(sol.class_s());
    assert!(sol.energy() > 0.0);
}

#[test]
fn epsilon_solution_overlaps_less_as_eps_shrinks() {
    let demo = Demo::load(SQUARE_TWO, Some(17)).unwrap();
    let coarse = demo.epsilon(1e-1).unwrap();
    let fine = demo.epsilon(1e-3).unwrap();
    assert!(coarse.converged() && fine.converged());
    assert!(fine.overlap() < coarse.overlap());
    assert!(!fine.class_s());
    assert!(demo.epsilon(0.0).is_err());
}

#[test]
fn three_species_disk_uses_projection() {
    let demo = Demo::load(DISK_THREE, Some(33)).unwrap();
    let sol = demo.limit().unwrap();
    assert!(sol.converged() && sol.iterations() > 0);
    assert!(sol.class_s());
    let n = demo.grid().len();
    let exterior_mass: f64 = (0..n)
        .filter(|&k| demo.grid().kind(k) == segregate::NodeKind::Exterior)
        .map(|k| sol.values()[k] + sol.values()[n + k] + sol.values()[2 * n + k])
        .sum();
    assert_eq!(exterior_mass, 0.0);
}

#[test]
fn bad_scenarios_are_reported() {
    assert!(Demo::load("[domain]\nshape = 3\n", None).is_err());
    assert!(Demo::load(SQUARE_TWO, Some(2)).is_err());
}

#[test]
fn rate_study_reports_a_positive_slope() {
    let text = rate_study_1d(65, 4).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["samples"].as_array().unwrap().len(), 4);
    assert!(doc["slope"].as_f64().unwrap() > 0.1);
}
