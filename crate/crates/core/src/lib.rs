//! Solver and certifier for the steady strongly competing Lotka-Volterra
//! system `lap u_i = (1/eps) u_i sum_{j != i} u_j` with Dirichlet data, and
//! for its segregated limit as `eps -> 0`.
//!
//! - [`grid`]: lattices, node classes, stencils and the discrete H1 norm.
//! - [`boundary`]: disjoint boundary traces and harmonic extensions.
//! - [`eps_solver`]: fixed-`eps` relaxation and `eps`-continuation.
//! - [`limit`]: the two-species closed form and the projection iteration.
//! - [`verify`]: class F / class S certificates, energy, P and Q.
//! - [`analysis`]: rate fits and limit comparisons.
//! - [`config`] and [`io`]: run configuration files and field CSVs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod boundary;
pub mod config;
pub mod density;
pub mod eps_solver;
pub mod error;
pub mod grid;
pub mod io;
pub mod limit;
pub mod verify;

pub use analysis::{compare_limits, fit_rate, rate_study, Comparison, RateFit, RateStudy};
pub use boundary::{build_boundary, harmonic_extension, Arc, BoundarySpec};
pub use config::RunConfig;
pub use density::{hat_transform, DensityTuple};
pub use eps_solver::{continuation, overlap_metric, solve_eps, SolveOptions, SolveReport};
pub use error::{Error, Result};
pub use grid::{build_grid, discrete_h1_norm, Field, Grid, NodeKind, Shape};
pub use limit::{limit_direct, limit_two_species, LimitInit, LimitOptions};
pub use verify::{certify, check_lemma31, compute_pq, energy, reflection_defect, Certificate, PQReport, Tolerances};
