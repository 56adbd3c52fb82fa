//! Scenario files.
//!
//! A scenario is a TOML document with five sections:
//!
//! ```toml
//! [domain]
//! shape = "rectangle"            # interval | rectangle | disk | mask
//! extent = [0.0, 1.0, 0.0, 1.0]  # interval [a, b]; rectangle [x0, x1, y0, y1]; disk [cx, cy, r]
//! resolution = 129               # nodes across the domain
//! # mask only: rows = ["###", ...], spacing = 0.1, origin = [0.0, 0.0]
//!
//! [boundary]
//! species = 2
//! # one list of [t_start, t_end, amplitude] arcs per species
//! arcs = [[[0.75, 1.0, 1.0]], [[0.25, 0.5, 1.0]]]
//!
//! [solver]
//! tol = 1e-10
//! max_iter = 1000000
//! ladder = [1e-1, 1e-2, 1e-3]
//! omega = 1.0
//! check_every = 10
//! limit_tol = 1e-12
//! limit_omega = 1.0
//! window = 10
//!
//! [verify]                       # factors multiplied by the boundary scale
//! subharmonic = 1e-8
//! hat_superharmonic = 1e-7
//! overlap = 1e-8
//! support_delta = 1e-6
//! slack = 1e-9
//!
//! [output]
//! dir = "out/square_two"
//! ```
//!
//! Every key except `domain.shape`, `domain.resolution` and `boundary.arcs`
//! has a default. The environment variables `SEGREGATE_TOL`,
//! `SEGREGATE_MAX_ITER`, `SEGREGATE_LIMIT_TOL` and `SEGREGATE_SLACK` override
//! `solver.tol`, `solver.max_iter`, `solver.limit_tol` and `verify.slack`.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::boundary::{build_boundary, Arc, BoundarySpec};
use crate::eps_solver::SolveOptions;
use crate::error::{Error, Result};
use crate::grid::{build_grid, Grid, Shape};
use crate::limit::LimitOptions;
use crate::verify::Tolerances;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub shape: String,
    #[serde(default)]
    pub extent: Vec<f64>,
    pub resolution: usize,
    #[serde(default)]
    pub rows: Vec<String>,
    pub spacing: Option<f64>,
    pub origin: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySection {
    pub species: Option<usize>,
    pub arcs: Vec<Vec<[f64; 3]>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iter: usize,
    pub ladder: Vec<f64>,
    pub omega: f64,
    pub check_every: usize,
    pub limit_tol: f64,
    pub limit_omega: f64,
    pub window: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let eps = SolveOptions::default();
        let lim = LimitOptions::default();
        SolverSection {
            tol: eps.tol,
            max_iter: eps.max_iter,
            ladder: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            omega: eps.omega,
            check_every: eps.check_every,
            limit_tol: lim.tol,
            limit_omega: lim.omega,
            window: lim.window,
        }
    }
}

/// Verifier thresholds as multiples of the boundary scale.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub nonnegativity: f64,
    pub subharmonic: f64,
    pub hat_superharmonic: f64,
    pub boundary: f64,
    pub overlap: f64,
    pub support_delta: f64,
    pub slack: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        let t = Tolerances::relative_to(1.0);
        VerifySection {
            nonnegativity: t.nonnegativity,
            subharmonic: t.subharmonic,
            hat_superharmonic: t.hat_superharmonic,
            boundary: t.boundary,
            overlap: t.overlap,
            support_delta: t.support_delta,
            slack: t.slack,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out") }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSection,
    pub boundary: BoundarySection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub output: OutputSection,
}

fn invalid(key: &str, reason: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {reason}"))
}

impl RunConfig {
    /// Parses and validates a scenario. Syntax errors carry the line and
    /// column; semantic errors name the offending key.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Applies the `SEGREGATE_*` overrides from the process environment.
    pub fn with_env_overrides(self) -> Result<Self> {
        self.with_overrides(|k| std::env::var(k).ok())
    }

    /// Applies overrides from an arbitrary lookup and revalidates.
    pub fn with_overrides(mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<Self> {
        fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim()
                .parse()
                .map_err(|_| invalid(key, format!("cannot parse `{v}`")))
        }
        if let Some(v) = lookup("SEGREGATE_TOL") {
            self.solver.tol = parse("SEGREGATE_TOL", &v)?;
        }
        if let Some(v) = lookup("SEGREGATE_MAX_ITER") {
            self.solver.max_iter = parse("SEGREGATE_MAX_ITER", &v)?;
        }
        if let Some(v) = lookup("SEGREGATE_LIMIT_TOL") {
            self.solver.limit_tol = parse("SEGREGATE_LIMIT_TOL", &v)?;
        }
        if let Some(v) = lookup("SEGREGATE_SLACK") {
            self.verify.slack = parse("SEGREGATE_SLACK", &v)?;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn shape(&self) -> Result<Shape> {
        let d = &self.domain;
        let need = |n: usize| {
            if d.extent.len() == n {
                Ok(())
            } else {
                Err(invalid(
                    "domain.extent",
                    format!("shape `{}` needs {n} numbers, got {}", d.shape, d.extent.len()),
                ))
            }
        };
        let e = &d.extent;
        match d.shape.as_str() {
            "interval" => {
                need(2)?;
                Ok(Shape::Interval { start: e[0], end: e[1] })
            }
            "rectangle" => {
                need(4)?;
                Ok(Shape::Rectangle { x0: e[0], x1: e[1], y0: e[2], y1: e[3] })
            }
            "disk" => {
                need(3)?;
                Ok(Shape::Disk { center: [e[0], e[1]], radius: e[2] })
            }
            "mask" => Ok(Shape::Mask {
                rows: d.rows.clone(),
                spacing: d
                    .spacing
                    .ok_or_else(|| invalid("domain.spacing", "required for shape `mask`"))?,
                origin: d.origin.unwrap_or([0.0, 0.0]),
            }),
            other => Err(invalid(
                "domain.shape",
                format!("unknown shape `{other}` (expected interval, rectangle, disk or mask)"),
            )),
        }
    }

    pub fn species(&self) -> usize {
        self.boundary.arcs.len()
    }

    pub fn arcs(&self) -> Vec<Vec<Arc>> {
        self.boundary
            .arcs
            .iter()
            .map(|list| list.iter().map(|a| Arc::new(a[0], a[1], a[2])).collect())
            .collect()
    }

    pub fn build_grid(&self) -> Result<Grid> {
        build_grid(&self.shape()?, self.domain.resolution)
    }

    pub fn build_boundary(&self, grid: &Grid) -> Result<BoundarySpec> {
        build_boundary(grid, &self.arcs())
    }

    pub fn solve_options(&self, threads: Option<usize>) -> SolveOptions {
        SolveOptions {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            omega: self.solver.omega,
            threads,
            check_every: self.solver.check_every,
        }
    }

    pub fn limit_options(&self, threads: Option<usize>) -> LimitOptions {
        LimitOptions {
            tol: self.solver.limit_tol,
            max_iter: self.solver.max_iter,
            omega: self.solver.limit_omega,
            threads,
            window: self.solver.window,
        }
    }

    pub fn tolerances(&self, scale: f64) -> Tolerances {
        let v = &self.verify;
        Tolerances {
            nonnegativity: v.nonnegativity * scale,
            subharmonic: v.subharmonic * scale,
            hat_superharmonic: v.hat_superharmonic * scale,
            boundary: v.boundary * scale,
            overlap: v.overlap * scale,
            support_delta: v.support_delta * scale,
            slack: v.slack * scale,
        }
    }

    fn validate(&self) -> Result<()> {
        self.shape()?;
        if let Some(m) = self.boundary.species {
            if m != self.species() {
                return Err(invalid(
                    "boundary.species",
                    format!("declares {m} species but boundary.arcs lists {}", self.species()),
                ));
            }
        }
        if self.species() == 0 {
            return Err(invalid("boundary.arcs", "at least one species is required"));
        }
        for (i, list) in self.boundary.arcs.iter().enumerate() {
            for (j, a) in list.iter().enumerate() {
                let key = format!("boundary.arcs[{i}][{j}]");
                if a.iter().any(|v| !v.is_finite()) {
                    return Err(invalid(&key, "values must be finite"));
                }
                if !(0.0..=1.0).contains(&a[0]) || !(0.0..=1.0).contains(&a[1]) {
                    return Err(invalid(&key, "arc endpoints must lie in [0, 1]"));
                }
                if a[2] < 0.0 {
                    return Err(invalid(&key, "amplitude must be nonnegative"));
                }
            }
        }
        let s = &self.solver;
        let positive = [("solver.tol", s.tol), ("solver.limit_tol", s.limit_tol)];
        for (key, v) in positive {
            if !(v > 0.0) {
                return Err(invalid(key, format!("must be positive, got {v}")));
            }
        }
        for (key, v) in [("solver.omega", s.omega), ("solver.limit_omega", s.limit_omega)] {
            if !(v > 0.0 && v < 2.0) {
                return Err(invalid(key, format!("must lie in (0, 2), got {v}")));
            }
        }
        for (key, v) in [
            ("solver.max_iter", s.max_iter),
            ("solver.check_every", s.check_every),
            ("solver.window", s.window),
        ] {
            if v == 0 {
                return Err(invalid(key, "must be at least 1"));
            }
        }
        if s.ladder.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(invalid("solver.ladder", "every epsilon must be positive and finite"));
        }
        if s.ladder.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("solver.ladder", "must be strictly decreasing"));
        }
        let v = &self.verify;
        for (key, x) in [
            ("verify.nonnegativity", v.nonnegativity),
            ("verify.subharmonic", v.subharmonic),
            ("verify.hat_superharmonic", v.hat_superharmonic),
            ("verify.boundary", v.boundary),
            ("verify.overlap", v.overlap),
            ("verify.support_delta", v.support_delta),
            ("verify.slack", v.slack),
        ] {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(invalid(key, format!("must be finite and nonnegative, got {x}")));
            }
        }
        Ok(())
    }
}
