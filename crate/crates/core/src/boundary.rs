//! Dirichlet traces for the m species and their harmonic extensions.
//!
//! Traces are built from arcs of the boundary cycle. Each arc carries a
//! raised-cosine bump `a sin^2(pi s)`, `s` running from 0 to 1 along the arc,
//! so every trace is C1 along the boundary and vanishes at the arc ends.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, NodeKind};

/// A bump on the boundary cycle. `start` and `end` are cycle parameters in
/// `[0, 1]`; an arc with `end < start` wraps through `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
    pub amplitude: f64,
}

impl Arc {
    pub fn new(start: f64, end: f64, amplitude: f64) -> Self {
        Arc {
            start,
            end,
            amplitude,
        }
    }

    fn length(&self) -> f64 {
        let len = (self.end - self.start).rem_euclid(1.0);
        if len == 0.0 {
            1.0
        } else {
            len
        }
    }

    /// Profile value at cycle parameter `t`, zero off the arc.
    pub fn value_at(&self, t: f64) -> f64 {
        let offset = (t - self.start).rem_euclid(1.0);
        let len = self.length();
        if offset > len {
            return 0.0;
        }
        let s = (PI * offset / len).sin();
        self.amplitude * s * s
    }

    fn overlaps(&self, other: &Arc) -> bool {
        // open arcs; touching end points are allowed
        const TOUCH: f64 = 1e-12;
        let d = (other.start - self.start).rem_euclid(1.0);
        let e = (self.start - other.start).rem_euclid(1.0);
        d < self.length() - TOUCH || e < other.length() - TOUCH
    }
}

/// The m boundary traces `phi_i`, nonnegative and with pairwise disjoint
/// nodal supports.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySpec {
    traces: Vec<Field>,
    arcs: Vec<Vec<Arc>>,
}

/// Builds traces from per-species arc lists. Boundary nodes outside every
/// arc get zero for all species.
pub fn build_boundary(grid: &Grid, arc_specs: &[Vec<Arc>]) -> Result<BoundarySpec> {
    if arc_specs.is_empty() {
        return Err(Error::InvalidBoundary("at least one species is required".into()));
    }
    for (i, arcs) in arc_specs.iter().enumerate() {
        for arc in arcs {
            if arc.amplitude < 0.0 {
                return Err(Error::NegativeAmplitude {
                    species: i + 1,
                    amplitude: arc.amplitude,
                });
            }
            let in_range = |t: f64| (0.0..=1.0).contains(&t);
            if !arc.amplitude.is_finite() || !in_range(arc.start) || !in_range(arc.end) {
                return Err(Error::InvalidBoundary(format!(
                    "species {}: arc ({}, {}, {}) has parameters outside [0, 1] or a non-finite amplitude",
                    i + 1,
                    arc.start,
                    arc.end,
                    arc.amplitude
                )));
            }
        }
    }
    for (i, a) in arc_specs.iter().enumerate() {
        for (j, b) in arc_specs.iter().enumerate().skip(i + 1) {
            if a.iter().any(|x| b.iter().any(|y| x.overlaps(y))) {
                return Err(Error::OverlappingArcs {
                    first: i + 1,
                    second: j + 1,
                });
            }
        }
    }

    let traces = arc_specs
        .iter()
        .map(|arcs| {
            let mut f = Field::zeros(grid);
            for (&k, &t) in grid.boundary().iter().zip(grid.boundary_params()) {
                f.values_mut()[k] = arcs.iter().map(|a| a.value_at(t)).sum();
            }
            f
        })
        .collect();
    let spec = BoundarySpec {
        traces,
        arcs: arc_specs.to_vec(),
    };
    spec.validate(grid)?;
    Ok(spec)
}

impl BoundarySpec {
    /// Wraps explicit traces. Values off the boundary are ignored and zeroed.
    pub fn from_traces(grid: &Grid, traces: Vec<Field>) -> Result<Self> {
        if traces.is_empty() {
            return Err(Error::InvalidBoundary("at least one species is required".into()));
        }
        let traces = traces
            .into_iter()
            .map(|t| {
                if t.len() != grid.len() {
                    return Err(Error::ShapeMismatch("trace length differs from grid".into()));
                }
                let values = (0..grid.len())
                    .map(|k| {
                        if grid.kind(k) == NodeKind::Boundary {
                            t[k]
                        } else {
                            0.0
                        }
                    })
                    .collect();
                Field::from_values(grid, values)
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = BoundarySpec {
            arcs: vec![Vec::new(); traces.len()],
            traces,
        };
        spec.validate(grid)?;
        Ok(spec)
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        for &k in grid.boundary() {
            let mut positive = None;
            for (i, t) in self.traces.iter().enumerate() {
                let v = t[k];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidBoundary(format!(
                        "species {} has value {v} at boundary node {k}",
                        i + 1
                    )));
                }
                if v > 0.0 {
                    if let Some(p) = positive {
                        return Err(Error::OverlappingArcs {
                            first: p + 1,
                            second: i + 1,
                        });
                    }
                    positive = Some(i);
                }
            }
        }
        Ok(())
    }

    /// Species count m.
    pub fn m(&self) -> usize {
        self.traces.len()
    }

    pub fn trace(&self, i: usize) -> &Field {
        &self.traces[i]
    }

    pub fn traces(&self) -> &[Field] {
        &self.traces
    }

    pub fn arcs(&self, i: usize) -> &[Arc] {
        &self.arcs[i]
    }

    /// Largest boundary value over all species, or 1 for all-zero data.
    /// Relative tolerances are expressed in multiples of this.
    pub fn scale(&self) -> f64 {
        let s = self
            .traces
            .iter()
            .flat_map(|t| t.values().iter().copied())
            .fold(0.0, f64::max);
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// The traces as a density tuple whose interior is zero.
    pub fn zero_interior(&self) -> crate::DensityTuple {
        crate::DensityTuple::new(self.traces.clone()).expect("traces share one grid")
    }
}

/// Settings for the Laplace solves behind [`harmonic_extension`].
#[derive(Clone, Copy, Debug)]
pub struct LaplaceOptions {
    /// Max-norm tolerance on the discrete Laplacian. Raised to the
    /// floating-point floor `64 eps scale / h^2` on fine grids.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        LaplaceOptions {
            tol: 1e-12,
            max_iter: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplaceReport {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Discrete harmonic function matching `trace` on the boundary.
pub fn harmonic_extension(grid: &Grid, trace: &Field) -> Field {
    harmonic_extension_with(grid, trace, &LaplaceOptions::default()).0
}

/// Like [`harmonic_extension`], also returning solver statistics. One
/// dimensional grids are solved directly, planar grids by SOR.
pub fn harmonic_extension_with(
    grid: &Grid,
    trace: &Field,
    opts: &LaplaceOptions,
) -> (Field, LaplaceReport) {
    let mut f = Field::zeros(grid);
    for &k in grid.boundary() {
        f.values_mut()[k] = trace[k];
    }
    let report = if grid.dim() == 1 {
        solve_interval(grid, f.values_mut());
        LaplaceReport {
            iterations: 1,
            residual: max_laplacian(grid, f.values()),
            converged: true,
        }
    } else {
        sor_laplace(grid, f.values_mut(), opts)
    };
    (f, report)
}

fn max_laplacian(grid: &Grid, v: &[f64]) -> f64 {
    grid.interior()
        .iter()
        .map(|&k| grid.laplacian_unchecked(v, k).abs())
        .fold(0.0, f64::max)
}

/// On an interval the discrete Laplace problem has only the two end values
/// as data and its solution is their linear interpolant.
fn solve_interval(grid: &Grid, v: &mut [f64]) {
    let last = grid.len() - 1;
    let (a, b) = (v[0], v[last]);
    let steps = last as f64;
    for (k, slot) in v.iter_mut().enumerate().take(last).skip(1) {
        *slot = (a * (last - k) as f64 + b * k as f64) / steps;
    }
}

fn sor_laplace(grid: &Grid, v: &mut [f64], opts: &LaplaceOptions) -> LaplaceReport {
    let scale = grid
        .boundary()
        .iter()
        .map(|&k| v[k].abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return LaplaceReport {
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let h2 = grid.h() * grid.h();
    let tol = opts.tol.max(64.0 * f64::EPSILON * scale / h2);
    let omega = grid.optimal_sor_omega();
    let deg = grid.degree() as f64;
    let mut residual = f64::INFINITY;
    let mut iter = 0;
    while iter < opts.max_iter {
        for &k in grid.interior() {
            let gs = grid.neighbor_sum(v, k) / deg;
            v[k] += omega * (gs - v[k]);
        }
        iter += 1;
        if iter % 10 == 0 || iter == opts.max_iter {
            residual = max_laplacian(grid, v);
            if residual <= tol {
                return LaplaceReport {
                    iterations: iter,
                    residual,
                    converged: true,
                };
            }
        }
    }
    LaplaceReport {
        iterations: iter,
        residual,
        converged: false,
    }
}
