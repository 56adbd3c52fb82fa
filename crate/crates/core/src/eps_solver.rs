//! Nonlinear relaxation for the competition system at a fixed rate `1/eps`:
//!
//! ```text
//! lap u_i = (1/eps) u_i sum_{j != i} u_j   in the interior
//! u_i     = phi_i                          on the boundary
//! ```
//!
//! Each node update solves the discretized equation for `u_i(node)` with the
//! neighbours and the other species frozen, `u_i <- S_i / (2d + h^2 Q_i / eps)`,
//! which keeps every iterate nonnegative.

use web_time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{harmonic_extension, BoundarySpec};
use crate::density::DensityTuple;
use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Max-norm tolerance on the equation residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Over-relaxation factor; 1 is plain Gauss-Seidel.
    pub omega: f64,
    /// `Some(n)` switches to red-black sweeps on `n` threads.
    pub threads: Option<usize>,
    /// Sweeps between residual evaluations (the first sweep is always checked).
    pub check_every: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 1_000_000,
            omega: 1.0,
            threads: None,
            check_every: 10,
        }
    }
}

impl SolveOptions {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {} must be positive", self.tol)));
        }
        if !(self.omega > 0.0 && self.omega < 2.0) {
            return Err(Error::InvalidArgument(format!(
                "relaxation factor {} must lie in (0, 2)",
                self.omega
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub epsilon: f64,
    pub iterations: usize,
    pub residual: f64,
    pub wall_time: f64,
    pub converged: bool,
}

/// Harmonic extension of every trace: the default starting state.
pub fn harmonic_initial_state(grid: &Grid, bc: &BoundarySpec) -> DensityTuple {
    let fields = bc
        .traces()
        .iter()
        .map(|t| {
            let mut f = harmonic_extension(grid, t);
            // the extension of a nonnegative trace is nonnegative up to rounding
            f.values_mut().iter_mut().for_each(|v| *v = v.max(0.0));
            f
        })
        .collect();
    DensityTuple::new(fields).expect("traces share one grid")
}

/// Checks a user-provided initial state: right shape, nonnegative, exact
/// boundary values.
pub(crate) fn check_initial_state(grid: &Grid, bc: &BoundarySpec, init: &DensityTuple) -> Result<()> {
    init.check_grid(grid)?;
    if init.m() != bc.m() {
        return Err(Error::ShapeMismatch(format!(
            "initial state has {} species, boundary data has {}",
            init.m(),
            bc.m()
        )));
    }
    for (i, f) in init.iter().enumerate() {
        if let Some(k) = grid.active_nodes().find(|&k| !(f[k] >= 0.0) || !f[k].is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "initial species {} is negative or non-finite at node {k}",
                i + 1
            )));
        }
        if let Some(&k) = grid.boundary().iter().find(|&&k| f[k] != bc.trace(i)[k]) {
            return Err(Error::InvalidArgument(format!(
                "initial species {} does not match its boundary data at node {k}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Solves the system for one `eps`, starting from `init` or from the
/// harmonic extensions of the traces.
///
/// With `omega > 1` the over-relaxed sweep can cycle once the coupling
/// `h^2 / eps` is large; when the residual stops improving the factor is
/// halved towards 1, which leaves the fixed point unchanged.
///
/// Running out of iterations is not an error: the report comes back with
/// `converged == false`.
pub fn solve_eps(
    grid: &Grid,
    bc: &BoundarySpec,
    eps: f64,
    opts: &SolveOptions,
    init: Option<&DensityTuple>,
) -> Result<(DensityTuple, SolveReport)> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    opts.validate()?;
    let start = match init {
        Some(u) => {
            check_initial_state(grid, bc, u)?;
            u.clone()
        }
        None => harmonic_initial_state(grid, bc),
    };
    let m = bc.m();
    let mut u = start.to_flat();
    for k in (0..grid.len()).filter(|&k| !grid.is_active(k)) {
        for i in 0..m {
            u[i * grid.len() + k] = 0.0;
        }
    }

    let clock = Instant::now();
    let pool = match opts.threads {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?,
        ),
        None => None,
    };
    let colors = grid.colored_interior();
    let mut sweeper = Sweeper {
        grid,
        m,
        n: grid.len(),
        coupling: grid.h() * grid.h() / eps,
        omega: opts.omega,
    };

    let check_every = opts.check_every.max(1);
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut best = f64::INFINITY;
    let mut checks_since_best = 0;
    while iterations < opts.max_iter {
        match &pool {
            None => sweeper.sweep_sequential(&mut u),
            Some(pool) => pool.install(|| sweeper.sweep_red_black(&mut u, &colors)),
        }
        iterations += 1;
        if iterations == 1 || iterations % check_every == 0 || iterations == opts.max_iter {
            residual = residual_flat(grid, &u, m, eps);
            if residual <= opts.tol {
                converged = true;
                break;
            }
            if residual < best {
                best = residual;
                checks_since_best = 0;
            } else {
                checks_since_best += 1;
                if checks_since_best >= STALL_CHECKS && sweeper.omega > 1.0 {
                    sweeper.omega = 1.0 + 0.5 * (sweeper.omega - 1.0);
                    best = residual;
                    checks_since_best = 0;
                }
            }
        }
    }

    let report = SolveReport {
        epsilon: eps,
        iterations,
        residual,
        wall_time: clock.elapsed().as_secs_f64(),
        converged,
    };
    Ok((DensityTuple::from_flat(u, m), report))
}

/// Residual checks without a new best value after which an over-relaxed
/// sweep is considered to be cycling and `omega` is halved towards 1.
const STALL_CHECKS: usize = 20;

struct Sweeper<'a> {
    grid: &'a Grid,
    m: usize,
    n: usize,
    /// `h^2 / eps`
    coupling: f64,
    omega: f64,
}

impl Sweeper<'_> {
    #[inline]
    fn update(&self, own: &[f64], others: f64, node: usize) -> f64 {
        let s = self.grid.neighbor_sum(own, node);
        let target = s / (self.grid.degree() as f64 + self.coupling * others);
        if self.omega == 1.0 {
            target
        } else {
            ((1.0 - self.omega) * own[node] + self.omega * target).max(0.0)
        }
    }

    #[inline]
    fn competitors(&self, before: &[f64], after: &[f64], node: usize) -> f64 {
        let n = self.n;
        before.chunks_exact(n).map(|c| c[node]).sum::<f64>()
            + after.chunks_exact(n).map(|c| c[node]).sum::<f64>()
    }

    /// Species-major, then lexicographic node order, updating in place.
    fn sweep_sequential(&self, u: &mut [f64]) {
        for i in 0..self.m {
            let (before, rest) = u.split_at_mut(i * self.n);
            let (own, after) = rest.split_at_mut(self.n);
            for &k in self.grid.interior() {
                let q = self.competitors(before, after, k);
                own[k] = self.update(own, q, k);
            }
        }
    }

    fn sweep_red_black(&self, u: &mut [f64], colors: &[Vec<usize>; 2]) {
        let mut scratch = Vec::new();
        for i in 0..self.m {
            for color in colors {
                {
                    let (before, rest) = u.split_at(i * self.n);
                    let (own, after) = rest.split_at(self.n);
                    color
                        .par_iter()
                        .map(|&k| self.update(own, self.competitors(before, after, k), k))
                        .collect_into_vec(&mut scratch);
                }
                let own = &mut u[i * self.n..(i + 1) * self.n];
                for (&k, &v) in color.iter().zip(&scratch) {
                    own[k] = v;
                }
            }
        }
    }
}

fn residual_flat(grid: &Grid, u: &[f64], m: usize, eps: f64) -> f64 {
    let n = grid.len();
    let mut worst = 0.0f64;
    for i in 0..m {
        let own = &u[i * n..(i + 1) * n];
        for &k in grid.interior() {
            let q: f64 = (0..m).filter(|&j| j != i).map(|j| u[j * n + k]).sum();
            let r = grid.laplacian_unchecked(own, k) - own[k] * q / eps;
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// Max over interior nodes and species of `|lap u_i - u_i Q_i / eps|`.
pub fn equation_residual(grid: &Grid, u: &DensityTuple, eps: f64) -> f64 {
    residual_flat(grid, &u.to_flat(), u.m(), eps)
}

/// Solves along a strictly decreasing ladder of `eps` values, each solve
/// warm-started from the previous solution.
pub fn continuation(
    grid: &Grid,
    bc: &BoundarySpec,
    ladder: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<(DensityTuple, SolveReport)>> {
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("epsilon ladder is empty".into()));
    }
    if let Some(&bad) = ladder.iter().find(|&&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::NonPositiveEpsilon(bad));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("epsilon ladder must be strictly decreasing".into()));
    }
    let mut out: Vec<(DensityTuple, SolveReport)> = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let init = out.last().map(|(u, _)| u);
        let step = solve_eps(grid, bc, eps, opts, init)?;
        out.push(step);
    }
    Ok(out)
}

/// `max_{nodes, i<j} min(u_i, u_j)`: zero exactly when the supports are
/// nodally disjoint.
pub fn overlap_metric(u: &DensityTuple) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..u.m() {
        for j in i + 1..u.m() {
            let (a, b) = (u.species(i).values(), u.species(j).values());
            for (x, y) in a.iter().zip(b) {
                worst = worst.max(x.min(*y));
            }
        }
    }
    worst
}
