//! The segregated limit, computed without passing through finite `eps`.
//!
//! Two routes: the closed form `(W+, W-)` for two species, and a projection
//! iteration for any m that drives each `u_i_hat = u_i - sum_{j != i} u_j`
//! to its stencil mean wherever `u_i` is positive.

use std::collections::VecDeque;
use web_time::Instant;

use rayon::prelude::*;

use crate::boundary::{harmonic_extension, BoundarySpec};
use crate::density::DensityTuple;
use crate::eps_solver::{check_initial_state, harmonic_initial_state, SolveReport};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

/// `u_1 = W+`, `u_2 = W-` with `W` harmonic and equal to `phi_1 - phi_2` on
/// the boundary.
pub fn limit_two_species(grid: &Grid, bc: &BoundarySpec) -> Result<DensityTuple> {
    if bc.m() != 2 {
        return Err(Error::InvalidArgument(format!(
            "the closed-form limit needs exactly two species, got {}",
            bc.m()
        )));
    }
    let w = harmonic_extension(grid, &(bc.trace(0) - bc.trace(1)));
    Ok(split_signed(grid, &w))
}

/// `(max(w, 0), max(-w, 0))`, keeping boundary values bit-exact.
pub(crate) fn split_signed(grid: &Grid, w: &Field) -> DensityTuple {
    let mut pos = Field::zeros(grid);
    let mut neg = Field::zeros(grid);
    for k in grid.active_nodes() {
        pos.values_mut()[k] = w[k].max(0.0);
        neg.values_mut()[k] = (-w[k]).max(0.0);
    }
    DensityTuple::new(vec![pos, neg]).expect("same grid")
}

#[derive(Clone, Debug, Default)]
pub enum LimitInit {
    /// Harmonic extension of each trace.
    #[default]
    HarmonicExtensions,
    /// Boundary data with a zero interior.
    ZeroInterior,
    /// Any nonnegative state carrying the boundary data, e.g. a continuation
    /// result.
    State(DensityTuple),
}

#[derive(Clone, Copy, Debug)]
pub struct LimitOptions {
    /// Tolerance on the estimated distance to the fixed point.
    pub tol: f64,
    pub max_iter: usize,
    /// Over-relaxation factor; 1 is the plain projection sweep.
    pub omega: f64,
    pub threads: Option<usize>,
    /// Sweeps over which the contraction rate is estimated.
    pub window: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            tol: 1e-12,
            max_iter: 1_000_000,
            omega: 1.0,
            threads: None,
            window: 10,
        }
    }
}

/// Projection iteration for the segregated limit.
///
/// Every interior node, in lexicographic order, gets
/// `u_i <- max((S_i - sum_{j != i} S_j) / 2d, 0)` for each species, `S_k`
/// being the stencil neighbour sum of `u_k`. At most one species can be
/// positive after a node update; a zero hat mean leaves the node empty.
///
/// The reported residual is the largest nodal change of the last sweep. The
/// sweep stops once the geometric tail estimate `d q / (1 - q)` of the
/// remaining distance drops below `tol`, `q` being the average contraction
/// ratio over the last `window` sweeps, or once the change reaches the
/// rounding floor.
pub fn limit_direct(
    grid: &Grid,
    bc: &BoundarySpec,
    opts: &LimitOptions,
    init: &LimitInit,
) -> Result<(DensityTuple, SolveReport)> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {} must be positive", opts.tol)));
    }
    if !(opts.omega > 0.0 && opts.omega < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "relaxation factor {} must lie in (0, 2)",
            opts.omega
        )));
    }
    let start = match init {
        LimitInit::HarmonicExtensions => harmonic_initial_state(grid, bc),
        LimitInit::ZeroInterior => bc.zero_interior(),
        LimitInit::State(u) => {
            check_initial_state(grid, bc, u)?;
            u.clone()
        }
    };
    let m = bc.m();
    let n = grid.len();
    let mut u = start.to_flat();
    let pool = match opts.threads {
        Some(0) => return Err(Error::InvalidArgument("thread count must be positive".into())),
        Some(t) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?,
        ),
        None => None,
    };
    let colors = grid.colored_interior();
    let projector = Projector {
        grid,
        m,
        n,
        omega: opts.omega,
    };

    let floor = 64.0 * f64::EPSILON * bc.scale();
    let window = opts.window.max(1);
    let mut history: VecDeque<f64> = VecDeque::with_capacity(window + 1);
    let clock = Instant::now();
    let mut iterations = 0;
    let mut displacement = f64::INFINITY;
    let mut converged = false;
    while iterations < opts.max_iter {
        displacement = match &pool {
            None => projector.sweep_sequential(&mut u),
            Some(pool) => pool.install(|| projector.sweep_red_black(&mut u, &colors)),
        };
        iterations += 1;
        history.push_back(displacement);
        if history.len() > window + 1 {
            history.pop_front();
        }
        if displacement <= floor.min(opts.tol) {
            converged = true;
            break;
        }
        if history.len() == window + 1 && displacement <= opts.tol {
            let oldest = history[0];
            let q = (displacement / oldest).powf(1.0 / window as f64);
            if q < 1.0 && displacement * q / (1.0 - q) <= opts.tol {
                converged = true;
                break;
            }
        }
    }

    let report = SolveReport {
        epsilon: 0.0,
        iterations,
        residual: displacement,
        wall_time: clock.elapsed().as_secs_f64(),
        converged,
    };
    Ok((DensityTuple::from_flat(u, m), report))
}

struct Projector<'a> {
    grid: &'a Grid,
    m: usize,
    n: usize,
    omega: f64,
}

impl Projector<'_> {
    /// New values of all species at `node`, written into `out`. `sums` is
    /// scratch space of length m.
    #[inline]
    fn project(&self, u: &[f64], node: usize, sums: &mut [f64], out: &mut [f64]) {
        let deg = self.grid.degree() as f64;
        for (i, s) in sums.iter_mut().enumerate() {
            *s = self.grid.neighbor_sum(&u[i * self.n..(i + 1) * self.n], node);
        }
        for (i, o) in out.iter_mut().enumerate() {
            let mut hat = sums[i];
            for (j, s) in sums.iter().enumerate() {
                if j != i {
                    hat -= s;
                }
            }
            let target = hat / deg;
            *o = if self.omega == 1.0 {
                target.max(0.0)
            } else {
                ((1.0 - self.omega) * u[i * self.n + node] + self.omega * target).max(0.0)
            };
        }
    }

    fn sweep_sequential(&self, u: &mut [f64]) -> f64 {
        let mut sums = vec![0.0; self.m];
        let mut buf = vec![0.0; self.m];
        let mut worst = 0.0f64;
        for &k in self.grid.interior() {
            self.project(u, k, &mut sums, &mut buf);
            for (i, &v) in buf.iter().enumerate() {
                let slot = &mut u[i * self.n + k];
                worst = worst.max((v - *slot).abs());
                *slot = v;
            }
        }
        worst
    }

    fn sweep_red_black(&self, u: &mut [f64], colors: &[Vec<usize>; 2]) -> f64 {
        let m = self.m;
        let mut worst = 0.0f64;
        let mut scratch = Vec::new();
        for color in colors {
            {
                let snapshot: &[f64] = u;
                scratch.clear();
                scratch.resize(color.len() * m, 0.0);
                scratch
                    .par_chunks_mut(m)
                    .zip(color.par_iter())
                    .for_each_init(
                        || vec![0.0; m],
                        |sums, (out, &k)| self.project(snapshot, k, sums, out),
                    );
            }
            for (chunk, &k) in scratch.chunks_exact(m).zip(color) {
                for (i, &v) in chunk.iter().enumerate() {
                    let slot = &mut u[i * self.n + k];
                    worst = worst.max((v - *slot).abs());
                    *slot = v;
                }
            }
        }
        worst
    }
}
