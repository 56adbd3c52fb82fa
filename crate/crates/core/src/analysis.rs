//! Rate of approach to the limit along an `eps` ladder, and comparison of
//! two independently computed limits.

use serde::Serialize;
use serde_json::{json, Value};

use crate::density::DensityTuple;
use crate::eps_solver::SolveReport;
use crate::error::{Error, Result};
use crate::grid::{discrete_h1_norm, Grid};
use crate::verify::{compute_pq, PQReport};

/// Least-squares fit of `log(distance) = intercept + slope * log(eps)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    /// `(eps, distance)` pairs used in the fit, by decreasing `eps`.
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Large-`eps` sample trimmed as pre-asymptotic, if any.
    pub dropped: Option<(f64, f64)>,
    /// `eps` values whose distance was exactly zero and so had no logarithm.
    pub excluded_zero: Vec<f64>,
}

const TRIM_BELOW_R2: f64 = 0.98;
const MIN_SAMPLES: usize = 3;

/// Fits a power law to `(eps, distance)` samples in any order.
///
/// When the fit has `r^2 < 0.98` and at least four usable samples would
/// remain, the largest-`eps` sample is dropped once and the fit repeated.
pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateFit> {
    if samples.iter().any(|&(e, d)| !(e > 0.0) || !(d >= 0.0) || !d.is_finite()) {
        return Err(Error::InvalidArgument(
            "rate samples need positive eps and finite nonnegative distances".into(),
        ));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let excluded_zero: Vec<f64> = sorted.iter().filter(|s| s.1 == 0.0).map(|s| s.0).collect();
    sorted.retain(|s| s.1 > 0.0);
    if sorted.len() < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "a rate fit needs at least {MIN_SAMPLES} nonzero samples, got {}",
            sorted.len()
        )));
    }
    let (mut slope, mut intercept, mut r_squared) = least_squares(&sorted);
    let mut dropped = None;
    if r_squared < TRIM_BELOW_R2 && sorted.len() > 4 {
        let first = sorted.remove(0);
        (slope, intercept, r_squared) = least_squares(&sorted);
        dropped = Some(first);
    }
    Ok(RateFit {
        samples: sorted,
        slope,
        intercept,
        r_squared,
        dropped,
        excluded_zero,
    })
}

fn least_squares(samples: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r_squared)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateStudy {
    pub per_species: Vec<RateFit>,
    /// Fit of the largest per-species distance at each `eps`.
    pub worst: RateFit,
}

impl RateStudy {
    pub fn to_json(&self) -> Value {
        let fit = |f: &RateFit| {
            json!({
                "slope": f.slope,
                "intercept": f.intercept,
                "r_squared": f.r_squared,
                "samples": f.samples,
                "dropped": f.dropped,
                "excluded_zero": f.excluded_zero,
            })
        };
        let mut map = serde_json::Map::new();
        for (i, f) in self.per_species.iter().enumerate() {
            map.insert(format!("u{}", i + 1), fit(f));
        }
        map.insert("worst".into(), fit(&self.worst));
        Value::Object(map)
    }
}

/// H1 distances from each converged ladder entry to `reference`, and power
/// law fits per species and for the worst species.
pub fn rate_study(
    grid: &Grid,
    ladder: &[(DensityTuple, SolveReport)],
    reference: &DensityTuple,
) -> Result<RateStudy> {
    reference.check_grid(grid)?;
    let converged: Vec<_> = ladder.iter().filter(|(_, r)| r.converged).collect();
    if converged.len() < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "rate study needs at least {MIN_SAMPLES} converged ladder entries, got {}",
            converged.len()
        )));
    }
    let distances = h1_distances(grid, &converged, reference)?;
    let m = reference.m();
    let per_species = (0..m)
        .map(|i| {
            let samples: Vec<(f64, f64)> = distances.iter().map(|(e, d)| (*e, d[i])).collect();
            fit_rate(&samples)
        })
        .collect::<Result<Vec<_>>>()?;
    let worst_samples: Vec<(f64, f64)> = distances
        .iter()
        .map(|(e, d)| (*e, d.iter().copied().fold(0.0, f64::max)))
        .collect();
    Ok(RateStudy {
        per_species,
        worst: fit_rate(&worst_samples)?,
    })
}

/// `(eps, [H1 distance per species])` for every ladder entry, in ladder order.
pub fn h1_distances(
    grid: &Grid,
    ladder: &[&(DensityTuple, SolveReport)],
    reference: &DensityTuple,
) -> Result<Vec<(f64, Vec<f64>)>> {
    ladder
        .iter()
        .map(|(u, report)| {
            u.check_compatible(reference)?;
            let d = (0..u.m())
                .map(|i| discrete_h1_norm(grid, &(u.species(i) - reference.species(i))))
                .collect();
            Ok((report.epsilon, d))
        })
        .collect()
}

/// Distances between two limits plus the P / Q block.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub max_norm: Vec<f64>,
    pub h1: Vec<f64>,
    /// Largest nodal difference over all species.
    pub headline: f64,
    pub pq: PQReport,
}

pub fn compare_limits(grid: &Grid, a: &DensityTuple, b: &DensityTuple) -> Result<Comparison> {
    a.check_compatible(b)?;
    a.check_grid(grid)?;
    let diffs: Vec<_> = (0..a.m()).map(|i| a.species(i) - b.species(i)).collect();
    let max_norm: Vec<f64> = diffs.iter().map(|d| d.max_abs_on(grid)).collect();
    let h1 = diffs.iter().map(|d| discrete_h1_norm(grid, d)).collect();
    Ok(Comparison {
        headline: max_norm.iter().copied().fold(0.0, f64::max),
        max_norm,
        h1,
        pq: compute_pq(grid, a, b)?,
    })
}

impl Comparison {
    pub fn to_json(&self, grid: &Grid) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("headline_max_norm".into(), json!(self.headline));
        for (i, (mx, h1)) in self.max_norm.iter().zip(&self.h1).enumerate() {
            map.insert(format!("max_norm.u{}", i + 1), json!(mx));
            map.insert(format!("h1.u{}", i + 1), json!(h1));
        }
        for (k, v) in self.pq.to_json_map(grid) {
            map.insert(k, v);
        }
        Value::Object(map)
    }
}
