//! Independent reference computations for the integration tests. Nothing
//! here calls the library's solvers.

#![allow(dead_code)]

/// Brute-force solution of the two-species system on `[0, 1]` with `n`
/// nodes, `u1 = a, u2 = 0` at `x = 0` and `u1 = 0, u2 = b` at `x = 1`.
///
/// Each node value is found by bisection on the scalar equation
/// `(s - 2x) / h^2 = x q / eps`, `s` being the neighbour sum and `q` the
/// competitor value, inside an over-relaxed Gauss-Seidel outer loop that
/// runs until a sweep changes nothing by more than `1e-13`.
pub fn brute_force_1d(n: usize, a: f64, b: f64, eps: f64) -> [Vec<f64>; 2] {
    let h = 1.0 / (n - 1) as f64;
    let xs = (0..n).map(|k| k as f64 * h);
    let mut u = [
        xs.clone().map(|x| a * (1.0 - x)).collect::<Vec<_>>(),
        xs.map(|x| b * x).collect::<Vec<_>>(),
    ];
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / (n - 1) as f64).sin());
    for _ in 0..5_000_000 {
        let mut change = 0.0f64;
        for k in 1..n - 1 {
            for i in 0..2 {
                let s = u[i][k - 1] + u[i][k + 1];
                let q = u[1 - i][k];
                let target = bisect(|x| (s - 2.0 * x) / (h * h) - x * q / eps, 0.0, s.max(0.0) / 2.0);
                let new = ((1.0 - omega) * u[i][k] + omega * target).max(0.0);
                change = change.max((new - u[i][k]).abs());
                u[i][k] = new;
            }
        }
        if change < 1e-13 {
            break;
        }
    }
    u
}

/// Root of a decreasing function on `[lo, hi]` with `f(lo) >= 0 >= f(hi)`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(1 - 2x)+` and `(2x - 1)+` at the nodes `k / (n - 1)`.
pub fn closed_form_1d(n: usize) -> [Vec<f64>; 2] {
    let xs = (0..n).map(|k| k as f64 / (n - 1) as f64);
    [
        xs.clone().map(|x| (1.0 - 2.0 * x).max(0.0)).collect(),
        xs.map(|x| (2.0 * x - 1.0).max(0.0)).collect(),
    ]
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
