//! Browser demo bindings. The page in `www/` loads a preset scenario, solves
//! it at a chosen `eps` or directly in the limit, and runs a small 1D rate
//! study.
//!
//! [`Demo`] and [`rate_study_1d`] are plain Rust so they can be tested
//! natively; the `wasm_bindgen` wrappers only convert errors.

use serde_json::json;
use wasm_bindgen::prelude::*;

use segregate::{
    certify, continuation, energy, fit_rate, limit_direct, limit_two_species, overlap_metric,
    BoundarySpec, DensityTuple, Grid, LimitInit, RunConfig, Tolerances,
};

/// A loaded scenario ready to solve.
#[wasm_bindgen]
pub struct Demo {
    cfg: RunConfig,
    grid: Grid,
    bc: BoundarySpec,
}

/// Result of one solve, species-major over the full `nx * ny` lattice.
#[wasm_bindgen]
pub struct Solution {
    values: Vec<f64>,
    iterations: usize,
    converged: bool,
    overlap: f64,
    energy: f64,
    class_s: bool,
}

#[wasm_bindgen]
impl Solution {
    /// `m * nx * ny` values; node `k` of species `i` is at `i * nx * ny + k`.
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    #[wasm_bindgen(js_name = classS)]
    pub fn class_s(&self) -> bool {
        self.class_s
    }
}

impl Demo {
    /// Parses a scenario, optionally replacing its resolution.
    pub fn load(scenario: &str, resolution: Option<usize>) -> Result<Demo, String> {
        let mut cfg = RunConfig::parse(scenario).map_err(|e| e.to_string())?;
        if let Some(n) = resolution {
            cfg.domain.resolution = n;
        }
        let grid = cfg.build_grid().map_err(|e| e.to_string())?;
        let bc = cfg.build_boundary(&grid).map_err(|e| e.to_string())?;
        Ok(Demo { cfg, grid, bc })
    }

    fn finish(&self, u: DensityTuple, iterations: usize, converged: bool) -> Result<Solution, String> {
        let cert = certify(&self.grid, &self.bc, &u, &Tolerances::relative_to(self.bc.scale()))
            .map_err(|e| e.to_string())?;
        Ok(Solution {
            overlap: overlap_metric(&u),
            energy: energy(&self.grid, &u),
            class_s: cert.class_s,
            iterations,
            converged,
            values: u.into_fields().into_iter().flat_map(|f| f.into_values()).collect(),
        })
    }

    /// Continuation down to `eps` along the decades above it.
    pub fn epsilon(&self, eps: f64) -> Result<Solution, String> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(format!("epsilon must be positive, got {eps}"));
        }
        let mut ladder: Vec<f64> = (0..8).map(|k| 10f64.powi(-k)).filter(|&e| e > eps * 1.000001).collect();
        ladder.push(eps);
        let opts = self.cfg.solve_options(None);
        let steps = continuation(&self.grid, &self.bc, &ladder, &opts).map_err(|e| e.to_string())?;
        let iterations = steps.iter().map(|(_, r)| r.iterations).sum();
        let (u, report) = steps.into_iter().last().expect("ladder is non-empty");
        self.finish(u, iterations, report.converged)
    }

    /// Segregated limit: the closed form for two species, otherwise the
    /// projection iteration.
    pub fn limit(&self) -> Result<Solution, String> {
        if self.bc.m() == 2 {
            let u = limit_two_species(&self.grid, &self.bc).map_err(|e| e.to_string())?;
            return self.finish(u, 0, true);
        }
        let opts = self.cfg.limit_options(None);
        let (u, report) = limit_direct(&self.grid, &self.bc, &opts, &LimitInit::HarmonicExtensions)
            .map_err(|e| e.to_string())?;
        self.finish(u, report.iterations, report.converged)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(scenario: &str, resolution: usize) -> Result<Demo, JsError> {
        Demo::load(scenario, Some(resolution)).map_err(|e| JsError::new(&e))
    }

    pub fn nx(&self) -> usize {
        self.grid.nx()
    }

    pub fn ny(&self) -> usize {
        self.grid.ny()
    }

    pub fn species(&self) -> usize {
        self.bc.m()
    }

    /// 0 exterior, 1 interior, 2 boundary, per lattice node.
    #[wasm_bindgen(js_name = nodeKinds)]
    pub fn node_kinds(&self) -> Vec<u8> {
        (0..self.grid.len())
            .map(|k| match self.grid.kind(k) {
                segregate::NodeKind::Exterior => 0,
                segregate::NodeKind::Interior => 1,
                segregate::NodeKind::Boundary => 2,
            })
            .collect()
    }

    #[wasm_bindgen(js_name = solveEpsilon)]
    pub fn solve_epsilon(&self, eps: f64) -> Result<Solution, JsError> {
        self.epsilon(eps).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = solveLimit)]
    pub fn solve_limit(&self) -> Result<Solution, JsError> {
        self.limit().map_err(|e| JsError::new(&e))
    }
}

/// Two species on `[0, 1]` with unit end values, solved along
/// `eps = 1e-1 .. 10^-decades` and compared in H1 with the limit
/// `((1 - 2x)+, (2x - 1)+)`. Returns JSON with the distances and the fitted
/// slope of species 1.
pub fn rate_study_1d(n: usize, decades: usize) -> Result<String, String> {
    let scenario = format!(
        "[domain]\nshape = \"interval\"\nextent = [0.0, 1.0]\nresolution = {n}\n\
         [boundary]\narcs = [[[0.75, 0.25, 1.0]], [[0.25, 0.75, 1.0]]]\n\
         [solver]\nomega = 1.9\n"
    );
    let demo = Demo::load(&scenario, None)?;
    let ladder: Vec<f64> = (1..=decades as i32).map(|k| 10f64.powi(-k)).collect();
    let steps = continuation(&demo.grid, &demo.bc, &ladder, &demo.cfg.solve_options(None))
        .map_err(|e| e.to_string())?;
    let limit = limit_two_species(&demo.grid, &demo.bc).map_err(|e| e.to_string())?;
    let samples: Vec<(f64, f64)> = steps
        .iter()
        .map(|(u, r)| {
            let d = segregate::discrete_h1_norm(&demo.grid, &(u.species(0) - limit.species(0)));
            (r.epsilon, d)
        })
        .collect();
    let fit = fit_rate(&samples).map_err(|e| e.to_string())?;
    Ok(json!({
        "samples": samples,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
    })
    .to_string())
}

#[wasm_bindgen(js_name = rateStudy1d)]
pub fn rate_study_1d_js(n: usize, decades: usize) -> Result<String, JsError> {
    rate_study_1d(n, decades).map_err(|e| JsError::new(&e))
}
