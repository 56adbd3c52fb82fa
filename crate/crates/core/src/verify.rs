//! Certificates for candidate tuples.
//!
//! Class F: nonnegative, subharmonic species, superharmonic hat functions,
//! Dirichlet data matched. Class S adds nodal segregation. Alongside those we
//! measure harmonicity on the supports, the gradient reflection across
//! interfaces, the Dirichlet energy, and the P / Q comparison quantities
//! between two tuples. Every maximum is an exhaustive nodal scan.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::boundary::BoundarySpec;
use crate::density::{hat_transform, DensityTuple};
use crate::eps_solver::overlap_metric;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Absolute thresholds for the certificate checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub nonnegativity: f64,
    pub subharmonic: f64,
    pub hat_superharmonic: f64,
    pub boundary: f64,
    pub overlap: f64,
    /// Values above this count as support when looking for harmonicity and
    /// interfaces.
    pub support_delta: f64,
    /// Rounding allowance for equality tests in the P / Q checks.
    pub slack: f64,
}

impl Tolerances {
    /// Default thresholds for data whose largest boundary value is `scale`.
    pub fn relative_to(scale: f64) -> Self {
        Tolerances {
            nonnegativity: 0.0,
            subharmonic: 1e-8 * scale,
            hat_superharmonic: 1e-7 * scale,
            boundary: 0.0,
            overlap: 1e-8 * scale,
            support_delta: 1e-6 * scale,
            slack: 1e-9 * scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// `max (-u_i)+`
    pub nonnegativity: Vec<f64>,
    /// `max (-lap u_i)+` over interior nodes.
    pub subharmonic: Vec<f64>,
    /// `max (lap u_i_hat)+` over interior nodes.
    pub hat_superharmonic: Vec<f64>,
    /// `max |u_i - phi_i|` over boundary nodes.
    pub boundary: Vec<f64>,
    /// `max |lap u_i|` where `u_i` exceeds the support threshold and no
    /// competitor is present anywhere in the stencil.
    pub harmonic_on_support: Vec<f64>,
    pub overlap: f64,
    pub reflection: f64,
    pub interface_edges: usize,
    pub energy: f64,
    pub class_f: bool,
    pub class_s: bool,
}

/// Measures every class F / class S defect of `u`.
pub fn certify(grid: &Grid, bc: &BoundarySpec, u: &DensityTuple, tol: &Tolerances) -> Result<Certificate> {
    u.check_grid(grid)?;
    if u.m() != bc.m() {
        return Err(Error::ShapeMismatch(format!(
            "tuple has {} species, boundary data has {}",
            u.m(),
            bc.m()
        )));
    }
    let m = u.m();
    let mut cert = Certificate {
        nonnegativity: vec![0.0; m],
        subharmonic: vec![0.0; m],
        hat_superharmonic: vec![0.0; m],
        boundary: vec![0.0; m],
        harmonic_on_support: vec![0.0; m],
        overlap: overlap_metric(u),
        reflection: 0.0,
        interface_edges: 0,
        energy: energy(grid, u),
        class_f: false,
        class_s: false,
    };
    for i in 0..m {
        let ui = u.species(i);
        let hat = hat_transform(u, i);
        cert.nonnegativity[i] = grid.active_nodes().map(|k| (-ui[k]).max(0.0)).fold(0.0, f64::max);
        cert.boundary[i] = grid
            .boundary()
            .iter()
            .map(|&k| (ui[k] - bc.trace(i)[k]).abs())
            .fold(0.0, f64::max);
        for &k in grid.interior() {
            let lap = grid.laplacian_unchecked(ui.values(), k);
            cert.subharmonic[i] = cert.subharmonic[i].max(-lap);
            let lap_hat = grid.laplacian_unchecked(hat.values(), k);
            cert.hat_superharmonic[i] = cert.hat_superharmonic[i].max(lap_hat);
            if ui[k] > tol.support_delta && competitor_free(grid, u, i, k, tol.support_delta) {
                cert.harmonic_on_support[i] = cert.harmonic_on_support[i].max(lap.abs());
            }
        }
        // turn a negative zero kept by `max` into zero
        cert.subharmonic[i] += 0.0;
        cert.hat_superharmonic[i] += 0.0;
    }
    let reflection = reflection_defect(grid, u, tol.support_delta);
    cert.reflection = reflection.max_defect;
    cert.interface_edges = reflection.edges.len();

    let within = |v: &[f64], t: f64| v.iter().all(|&d| d <= t);
    cert.class_f = within(&cert.nonnegativity, tol.nonnegativity)
        && within(&cert.subharmonic, tol.subharmonic)
        && within(&cert.hat_superharmonic, tol.hat_superharmonic)
        && within(&cert.boundary, tol.boundary);
    cert.class_s = cert.class_f && cert.overlap <= tol.overlap;
    Ok(cert)
}

fn competitor_free(grid: &Grid, u: &DensityTuple, i: usize, node: usize, delta: f64) -> bool {
    (0..u.m()).filter(|&j| j != i).all(|j| {
        let f = u.species(j);
        f[node] <= delta && grid.lattice_neighbors(node).all(|n| f[n] <= delta)
    })
}

impl Certificate {
    /// Flat key-value form, e.g. `defect.subharmonic.u1`.
    pub fn to_json_map(&self) -> BTreeMap<String, Value> {
        let mut map = BTreeMap::new();
        let groups: [(&str, &Vec<f64>); 5] = [
            ("nonnegativity", &self.nonnegativity),
            ("subharmonic", &self.subharmonic),
            ("hat_superharmonic", &self.hat_superharmonic),
            ("boundary", &self.boundary),
            ("harmonic_on_support", &self.harmonic_on_support),
        ];
        for (name, values) in groups {
            for (i, v) in values.iter().enumerate() {
                map.insert(format!("defect.{name}.u{}", i + 1), json!(v));
            }
        }
        map.insert("defect.overlap".into(), json!(self.overlap));
        map.insert("defect.reflection".into(), json!(self.reflection));
        map.insert("interface_edges".into(), json!(self.interface_edges));
        map.insert("energy".into(), json!(self.energy));
        map.insert("class_f".into(), json!(self.class_f));
        map.insert("class_s".into(), json!(self.class_s));
        map
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |f: &mut fmt::Formatter<'_>, name: &str, v: &[f64]| -> fmt::Result {
            write!(f, "  {name:<22}")?;
            for x in v {
                write!(f, " {x:>11.3e}")?;
            }
            writeln!(f)
        };
        writeln!(f, "certificate ({} species)", self.nonnegativity.len())?;
        row(f, "nonnegativity", &self.nonnegativity)?;
        row(f, "subharmonic", &self.subharmonic)?;
        row(f, "hat superharmonic", &self.hat_superharmonic)?;
        row(f, "boundary mismatch", &self.boundary)?;
        row(f, "harmonic on support", &self.harmonic_on_support)?;
        writeln!(f, "  overlap                {:>11.3e}", self.overlap)?;
        writeln!(
            f,
            "  reflection             {:>11.3e} over {} interface edges",
            self.reflection, self.interface_edges
        )?;
        writeln!(f, "  energy                 {:>11.6}", self.energy)?;
        writeln!(
            f,
            "  class F: {}   class S: {}",
            if self.class_f { "pass" } else { "FAIL" },
            if self.class_s { "pass" } else { "FAIL" }
        )
    }
}

/// One lattice segment crossing an interface between two supports.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceEdge {
    /// Last node of the first support along the segment direction.
    pub from: usize,
    /// First node of the second support.
    pub to: usize,
    pub species_from: usize,
    pub species_to: usize,
    /// Empty nodes strictly between `from` and `to` (0, 1 or 2).
    pub gap: usize,
    /// One-sided difference quotient of the first species, taken inside its
    /// support, along the segment direction.
    pub slope_from: f64,
    /// Same for the second species inside its own support.
    pub slope_to: f64,
    pub defect: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReflectionReport {
    pub max_defect: f64,
    pub edges: Vec<InterfaceEdge>,
    /// Supports facing each other across more than two empty nodes; these
    /// are not scored.
    pub wide_gaps: usize,
}

const MAX_GAP: usize = 2;
const WIDE_GAP_SEARCH: usize = 8;

/// Gradient reflection across interfaces: along each lattice direction, the
/// sum of the one-sided slopes of the two species meeting there. Zero when
/// `grad u_i = -grad u_j` at the interface.
pub fn reflection_defect(grid: &Grid, u: &DensityTuple, support_delta: f64) -> ReflectionReport {
    let mut report = ReflectionReport::default();
    if u.m() < 2 {
        return report;
    }
    let owner = |k: usize| -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, f) in u.iter().enumerate() {
            if f[k] > support_delta && best.is_none_or(|(_, v)| f[k] > v) {
                best = Some((i, f[k]));
            }
        }
        best.map(|b| b.0)
    };
    let (nx, ny) = (grid.nx(), grid.ny());
    let h = grid.h();
    // unit steps in +x and +y, as (di, dj)
    let directions: &[(usize, usize)] = if grid.dim() == 1 { &[(1, 0)] } else { &[(1, 0), (0, 1)] };
    let step = |k: usize, d: (usize, usize), forward: bool| -> Option<usize> {
        let (i, j) = (k % nx, k / nx);
        let (ni, nj) = if forward {
            (i + d.0, j + d.1)
        } else {
            (i.checked_sub(d.0)?, j.checked_sub(d.1)?)
        };
        (ni < nx && nj < ny).then(|| nj * nx + ni).filter(|&n| grid.is_active(n))
    };

    for a in grid.active_nodes() {
        let Some(i) = owner(a) else { continue };
        for &d in directions {
            let mut b = a;
            let mut gap = 0;
            let mut found = None;
            for _ in 0..=WIDE_GAP_SEARCH {
                let Some(next) = step(b, d, true) else { break };
                b = next;
                match owner(b) {
                    None => gap += 1,
                    Some(j) if j == i => break,
                    Some(j) => {
                        found = Some(j);
                        break;
                    }
                }
            }
            let Some(j) = found else { continue };
            if gap > MAX_GAP {
                report.wide_gaps += 1;
                continue;
            }
            let (Some(before), Some(after)) = (step(a, d, false), step(b, d, true)) else {
                continue;
            };
            let (ui, uj) = (u.species(i), u.species(j));
            let slope_from = (ui[a] - ui[before]) / h;
            let slope_to = (uj[after] - uj[b]) / h;
            let defect = (slope_from + slope_to).abs();
            report.max_defect = report.max_defect.max(defect);
            report.edges.push(InterfaceEdge {
                from: a,
                to: b,
                species_from: i,
                species_to: j,
                gap,
                slope_from,
                slope_to,
                defect,
            });
        }
    }
    report
}

/// Dirichlet energy `sum_i sum_edges h^d / 2 ((u_i(b) - u_i(a)) / h)^2`.
pub fn energy(grid: &Grid, u: &DensityTuple) -> f64 {
    let w = 0.5 * grid.cell_volume();
    let h = grid.h();
    u.iter()
        .map(|f| {
            grid.edges()
                .iter()
                .map(|&(a, b)| {
                    let d = (f[b] - f[a]) / h;
                    d * d
                })
                .sum::<f64>()
        })
        .sum::<f64>()
        * w
}

/// The comparison quantities between two tuples:
/// `P = max_i max_x (u_i_hat - v_i_hat)` and `Q = max_i max_x (v_i_hat - u_i_hat)`
/// over the closed domain.
#[derive(Clone, Debug, PartialEq)]
pub struct PQReport {
    pub p: f64,
    pub q: f64,
    /// Species attaining P (0-based).
    pub p_species: usize,
    pub q_species: usize,
    pub p_node: usize,
    pub q_node: usize,
    pub p_by_species: Vec<f64>,
    pub q_by_species: Vec<f64>,
}

pub fn compute_pq(grid: &Grid, u: &DensityTuple, v: &DensityTuple) -> Result<PQReport> {
    u.check_compatible(v)?;
    u.check_grid(grid)?;
    let m = u.m();
    let mut report = PQReport {
        p: f64::NEG_INFINITY,
        q: f64::NEG_INFINITY,
        p_species: 0,
        q_species: 0,
        p_node: 0,
        q_node: 0,
        p_by_species: vec![f64::NEG_INFINITY; m],
        q_by_species: vec![f64::NEG_INFINITY; m],
    };
    for i in 0..m {
        let (uh, vh) = (hat_transform(u, i), hat_transform(v, i));
        for k in grid.active_nodes() {
            let d = uh[k] - vh[k];
            if d > report.p_by_species[i] {
                report.p_by_species[i] = d;
            }
            if -d > report.q_by_species[i] {
                report.q_by_species[i] = -d;
            }
            if d > report.p {
                report.p = d;
                report.p_species = i;
                report.p_node = k;
            }
            if -d > report.q {
                report.q = -d;
                report.q_species = i;
                report.q_node = k;
            }
        }
    }
    Ok(report)
}

impl PQReport {
    pub fn to_json_map(&self, grid: &Grid) -> BTreeMap<String, Value> {
        let mut map = BTreeMap::new();
        let loc = |k: usize| {
            let (x, y) = grid.coords(k);
            if grid.dim() == 1 {
                json!([x])
            } else {
                json!([x, y])
            }
        };
        map.insert("pq.P".into(), json!(self.p));
        map.insert("pq.Q".into(), json!(self.q));
        map.insert("pq.P_species".into(), json!(self.p_species + 1));
        map.insert("pq.Q_species".into(), json!(self.q_species + 1));
        map.insert("pq.P_node".into(), loc(self.p_node));
        map.insert("pq.Q_node".into(), loc(self.q_node));
        for (i, (p, q)) in self.p_by_species.iter().zip(&self.q_by_species).enumerate() {
            map.insert(format!("pq.P.u{}", i + 1), json!(p));
            map.insert(format!("pq.Q.u{}", i + 1), json!(q));
        }
        map
    }
}

/// Global against restricted maxima of the hat differences for one species.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma31Row {
    pub species: usize,
    /// `max (u_i_hat - v_i_hat)` over the closed domain.
    pub global_uv: f64,
    /// The same maximum restricted to `u_i <= v_i + slack`.
    pub restricted_uv: f64,
    pub holds_uv: bool,
    /// Roles swapped: `max (v_i_hat - u_i_hat)`.
    pub global_vu: f64,
    /// Restricted to `v_i <= u_i + slack`.
    pub restricted_vu: f64,
    pub holds_vu: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Lemma31Outcome {
    /// One of the tuples is not in class S, so the comparison is not made.
    PreconditionFailed(String),
    Checked(Vec<Lemma31Row>),
}

impl Lemma31Outcome {
    pub fn all_hold(&self) -> Option<bool> {
        match self {
            Lemma31Outcome::PreconditionFailed(_) => None,
            Lemma31Outcome::Checked(rows) => Some(rows.iter().all(|r| r.holds_uv && r.holds_vu)),
        }
    }
}

/// For each species, checks that the largest value of `u_i_hat - v_i_hat`
/// is already reached on the nodes where `u_i <= v_i`, and the same with the
/// roles exchanged. Both tuples must certify as class S against their own
/// boundary data.
pub fn check_lemma31(
    grid: &Grid,
    u: (&BoundarySpec, &DensityTuple),
    v: (&BoundarySpec, &DensityTuple),
    tol: &Tolerances,
) -> Result<Lemma31Outcome> {
    u.1.check_compatible(v.1)?;
    for (name, (bc, t)) in [("first", u), ("second", v)] {
        let cert = certify(grid, bc, t, tol)?;
        if !cert.class_s {
            return Ok(Lemma31Outcome::PreconditionFailed(format!(
                "{name} tuple is not in class S"
            )));
        }
    }
    let (u, v) = (u.1, v.1);
    let mut rows = Vec::with_capacity(u.m());
    for i in 0..u.m() {
        let (uh, vh) = (hat_transform(u, i), hat_transform(v, i));
        let (ui, vi) = (u.species(i), v.species(i));
        let mut row = Lemma31Row {
            species: i,
            global_uv: f64::NEG_INFINITY,
            restricted_uv: f64::NEG_INFINITY,
            holds_uv: false,
            global_vu: f64::NEG_INFINITY,
            restricted_vu: f64::NEG_INFINITY,
            holds_vu: false,
        };
        for k in grid.active_nodes() {
            let d = uh[k] - vh[k];
            row.global_uv = row.global_uv.max(d);
            row.global_vu = row.global_vu.max(-d);
            if ui[k] <= vi[k] + tol.slack {
                row.restricted_uv = row.restricted_uv.max(d);
            }
            if vi[k] <= ui[k] + tol.slack {
                row.restricted_vu = row.restricted_vu.max(-d);
            }
        }
        row.holds_uv = row.global_uv - row.restricted_uv <= tol.slack;
        row.holds_vu = row.global_vu - row.restricted_vu <= tol.slack;
        rows.push(row);
    }
    Ok(Lemma31Outcome::Checked(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{build_boundary, Arc};
    use crate::grid::{build_grid, Field, Shape};
    use crate::limit::limit_two_species;

    fn line(n: usize) -> Grid {
        build_grid(&Shape::Interval { start: 0.0, end: 1.0 }, n).unwrap()
    }

    fn two_point(g: &Grid) -> BoundarySpec {
        build_boundary(
            g,
            &[vec![Arc::new(0.75, 0.25, 1.0)], vec![Arc::new(0.25, 0.75, 1.0)]],
        )
        .unwrap()
    }

    fn tuple(g: &Grid, f: impl Fn(f64) -> f64, h: impl Fn(f64) -> f64) -> DensityTuple {
        DensityTuple::new(vec![Field::from_fn(g, |x, _| f(x)), Field::from_fn(g, |x, _| h(x))])
            .unwrap()
    }

    #[test]
    fn zero_tuple_is_class_s() {
        let g = line(9);
        let bc = BoundarySpec::from_traces(&g, vec![Field::zeros(&g); 2]).unwrap();
        let cert = certify(&g, &bc, &DensityTuple::zeros(&g, 2), &Tolerances::relative_to(1.0)).unwrap();
        assert!(cert.class_s);
        assert_eq!(cert.energy, 0.0);
        assert_eq!(cert.overlap, 0.0);
    }

    #[test]
    fn closed_form_limit_certifies() {
        let g = line(257);
        let bc = two_point(&g);
        let u = limit_two_species(&g, &bc).unwrap();
        let cert = certify(&g, &bc, &u, &Tolerances::relative_to(1.0)).unwrap();
        assert!(cert.class_s, "{cert}");
        assert!(cert.harmonic_on_support.iter().all(|&d| d < 1e-9), "{cert:?}");
        assert!(cert.reflection < 1e-12);
        assert!(cert.interface_edges >= 1);
        assert!((cert.energy - 2.0).abs() < 1e-12);
    }

    #[test]
    fn overlapping_constants_fail_segregation() {
        let g = line(9);
        let bc = BoundarySpec::from_traces(
            &g,
            vec![Field::from_fn(&g, |x, _| if x == 0.0 { 1.0 } else { 0.0 }), Field::zeros(&g)],
        )
        .unwrap();
        let u = tuple(&g, |_| 1.0, |_| 1.0);
        let cert = certify(&g, &bc, &u, &Tolerances::relative_to(1.0)).unwrap();
        assert_eq!(cert.overlap, 1.0);
        assert!(!cert.class_s);
    }

    #[test]
    fn reflection_examples() {
        let g = line(257);
        let exact = tuple(&g, |x| (1.0 - 2.0 * x).max(0.0), |x| (2.0 * x - 1.0).max(0.0));
        let r = reflection_defect(&g, &exact, 1e-6);
        assert_eq!(r.edges.len(), 1);
        assert_eq!(r.edges[0].gap, 1);
        assert!((r.edges[0].slope_from + 2.0).abs() < 1e-10);
        assert!(r.max_defect < 1e-10);

        let skewed = tuple(&g, |x| (1.0 - 3.0 * x).max(0.0), |x| (2.0 * x - 2.0 / 3.0).max(0.0));
        let r = reflection_defect(&g, &skewed, 1e-6);
        assert_eq!(r.edges.len(), 1);
        assert!((r.max_defect - 1.0).abs() < 1e-9, "{}", r.max_defect);

        let single = DensityTuple::new(vec![Field::constant(&g, 1.0)]).unwrap();
        assert!(reflection_defect(&g, &single, 1e-6).edges.is_empty());
    }

    #[test]
    fn energy_properties() {
        let g = line(129);
        let exact = tuple(&g, |x| (1.0 - 2.0 * x).max(0.0), |x| (2.0 * x - 1.0).max(0.0));
        let e = energy(&g, &exact);
        assert!((e - 2.0).abs() < 1e-12);
        let doubled = DensityTuple::new(exact.iter().map(|f| f.scaled(2.0)).collect()).unwrap();
        assert!((energy(&g, &doubled) - 4.0 * e).abs() < 1e-11);
        assert_eq!(energy(&g, &tuple(&g, |_| 3.0, |_| 1.0)), 0.0);
        let mut padded: Vec<Field> = exact.clone().into_fields();
        padded.push(Field::zeros(&g));
        assert_eq!(energy(&g, &DensityTuple::new(padded).unwrap()), e);
    }

    #[test]
    fn pq_basics() {
        let g = line(33);
        let u = tuple(&g, |x| (1.0 - 2.0 * x).max(0.0), |x| (2.0 * x - 1.0).max(0.0));
        let same = compute_pq(&g, &u, &u).unwrap();
        assert_eq!((same.p, same.q), (0.0, 0.0));

        let a = DensityTuple::new(vec![Field::from_fn(&g, |x, _| x)]).unwrap();
        let b = DensityTuple::new(vec![Field::from_fn(&g, |x, _| 0.5 * x + 0.1)]).unwrap();
        let pq = compute_pq(&g, &a, &b).unwrap();
        assert!((pq.p - 0.4).abs() < 1e-15);
        assert!((pq.q - 0.1).abs() < 1e-15);
        let swapped = compute_pq(&g, &b, &a).unwrap();
        assert_eq!((swapped.p, swapped.q), (pq.q, pq.p));

        let three = DensityTuple::zeros(&g, 3);
        assert!(compute_pq(&g, &u, &three).is_err());
    }

    #[test]
    fn lemma31_on_shifted_limits() {
        let g = line(201);
        let bc_u = two_point(&g);
        let u = limit_two_species(&g, &bc_u).unwrap();
        let v = tuple(&g, |x| (0.9 - 2.0 * x).max(0.0), |x| (2.0 * x - 0.9).max(0.0));
        let bc_v = BoundarySpec::from_traces(&g, v.clone().into_fields()).unwrap();
        let tol = Tolerances::relative_to(1.0);
        let outcome = check_lemma31(&g, (&bc_u, &u), (&bc_v, &v), &tol).unwrap();
        assert_eq!(outcome.all_hold(), Some(true), "{outcome:?}");
        assert_eq!(check_lemma31(&g, (&bc_u, &u), (&bc_u, &u), &tol).unwrap().all_hold(), Some(true));
    }

    #[test]
    fn lemma31_requires_class_s() {
        let g = line(33);
        let bc = two_point(&g);
        let u = limit_two_species(&g, &bc).unwrap();
        let mut v = u.clone();
        for k in g.interior().iter().copied() {
            v.species_mut(0).values_mut()[k] += 0.01;
            v.species_mut(1).values_mut()[k] += 0.01;
        }
        let outcome = check_lemma31(&g, (&bc, &u), (&bc, &v), &Tolerances::relative_to(1.0)).unwrap();
        assert!(matches!(outcome, Lemma31Outcome::PreconditionFailed(_)));
    }
}
