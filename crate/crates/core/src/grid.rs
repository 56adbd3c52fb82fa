//! Uniform lattices over the domain, node classification and the discrete
//! operators shared by the solvers and the verifier.
//!
//! Nodes are stored row-major: node `k = j * nx + i` sits at
//! `(origin.0 + i h, origin.1 + j h)`. One-dimensional grids have `ny == 1`.
//! Interior nodes always have their full lattice stencil inside the grid, so
//! the stencil helpers index neighbours without bounds juggling.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::ops::{Index, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Boundary,
    Exterior,
}

/// Domain descriptor accepted by [`build_grid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    /// The interval `[start, end]`; a one-dimensional grid.
    Interval { start: f64, end: f64 },
    /// The rectangle `[x0, x1] x [y0, y1]`. The height must be a whole
    /// number of mesh steps.
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// An open disk. Interior nodes lie strictly inside the circle, boundary
    /// nodes are the lattice neighbours of interior nodes on or outside it.
    Disk { center: [f64; 2], radius: f64 },
    /// Explicit interior mask, rows listed top (largest y) to bottom. `#`
    /// marks an interior node, anything else is outside. The lattice is padded
    /// by one node on every side; `origin` is the padded lower-left node.
    Mask {
        rows: Vec<String>,
        spacing: f64,
        origin: [f64; 2],
    },
}

/// How boundary nodes are mapped to the cycle parameter `t` in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
enum CycleParam {
    /// Left end at `t = 0`, right end at `t = 0.5`.
    IntervalEnds,
    /// Arclength along the rectangle perimeter, counter-clockwise from the
    /// lower-left corner.
    Perimeter { width: f64, height: f64 },
    /// Polar angle about the centroid of the interior nodes.
    Angle { cx: f64, cy: f64 },
}

#[derive(Clone, Debug)]
pub struct Grid {
    nx: usize,
    ny: usize,
    h: f64,
    origin: (f64, f64),
    dim: usize,
    kinds: Vec<NodeKind>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    boundary_t: Vec<f64>,
    edges: Vec<(usize, usize)>,
    extent: [f64; 4],
    shape: Shape,
}

/// Builds the lattice for `shape` with `n` nodes across the domain.
///
/// `n` counts nodes along x for intervals and rectangles and across the
/// diameter for disks. Masks carry their own spacing and ignore `n`.
pub fn build_grid(shape: &Shape, n: usize) -> Result<Grid> {
    match shape {
        Shape::Interval { start, end } => {
            check_resolution(n)?;
            if !(end > start) || !start.is_finite() || !end.is_finite() {
                return Err(Error::InvalidDomain(format!(
                    "interval [{start}, {end}] is empty"
                )));
            }
            let h = (end - start) / (n - 1) as f64;
            let kinds = (0..n)
                .map(|i| {
                    if i == 0 || i == n - 1 {
                        NodeKind::Boundary
                    } else {
                        NodeKind::Interior
                    }
                })
                .collect();
            Grid::assemble(
                n,
                1,
                h,
                (*start, 0.0),
                1,
                kinds,
                CycleParam::IntervalEnds,
                shape.clone(),
            )
        }
        Shape::Rectangle { x0, x1, y0, y1 } => {
            check_resolution(n)?;
            let (width, height) = (x1 - x0, y1 - y0);
            if !(width > 0.0 && height > 0.0) || !width.is_finite() || !height.is_finite() {
                return Err(Error::InvalidDomain(format!(
                    "rectangle [{x0}, {x1}] x [{y0}, {y1}] is empty"
                )));
            }
            let h = width / (n - 1) as f64;
            let steps = height / h;
            let ny_steps = steps.round();
            if (steps - ny_steps).abs() > 1e-9 * steps.max(1.0) {
                return Err(Error::InvalidDomain(format!(
                    "rectangle height {height} is not a multiple of the mesh step {h}"
                )));
            }
            let ny = ny_steps as usize + 1;
            check_resolution(ny)?;
            let kinds = (0..n * ny)
                .map(|k| {
                    let (i, j) = (k % n, k / n);
                    if i == 0 || j == 0 || i == n - 1 || j == ny - 1 {
                        NodeKind::Boundary
                    } else {
                        NodeKind::Interior
                    }
                })
                .collect();
            Grid::assemble(
                n,
                ny,
                h,
                (*x0, *y0),
                2,
                kinds,
                CycleParam::Perimeter { width, height },
                shape.clone(),
            )
        }
        Shape::Disk { center, radius } => {
            check_resolution(n)?;
            if !(*radius > 0.0) || !radius.is_finite() {
                return Err(Error::InvalidDomain(format!("disk radius {radius} must be positive")));
            }
            let h = 2.0 * radius / (n - 1) as f64;
            let origin = (center[0] - radius, center[1] - radius);
            let r2 = radius * radius * (1.0 - 1e-12);
            let mut kinds: Vec<NodeKind> = (0..n * n)
                .map(|k| {
                    let x = origin.0 + (k % n) as f64 * h;
                    let y = origin.1 + (k / n) as f64 * h;
                    let (dx, dy) = (x - center[0], y - center[1]);
                    if dx * dx + dy * dy < r2 {
                        NodeKind::Interior
                    } else {
                        NodeKind::Exterior
                    }
                })
                .collect();
            mark_boundary(&mut kinds, n, n);
            let (cx, cy) = interior_centroid(&kinds, n, origin, h);
            Grid::assemble(
                n,
                n,
                h,
                origin,
                2,
                kinds,
                CycleParam::Angle { cx, cy },
                shape.clone(),
            )
        }
        Shape::Mask {
            rows,
            spacing,
            origin,
        } => {
            if !(*spacing > 0.0) || !spacing.is_finite() {
                return Err(Error::InvalidDomain(format!(
                    "mask spacing {spacing} must be positive"
                )));
            }
            let width = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
            if rows.is_empty() || width == 0 {
                return Err(Error::InvalidDomain("mask is empty".into()));
            }
            let (nx, ny) = (width + 2, rows.len() + 2);
            let mut kinds = vec![NodeKind::Exterior; nx * ny];
            for (r, row) in rows.iter().enumerate() {
                let j = ny - 2 - r;
                for (c, ch) in row.chars().enumerate() {
                    if ch == '#' {
                        kinds[j * nx + c + 1] = NodeKind::Interior;
                    }
                }
            }
            mark_boundary(&mut kinds, nx, ny);
            let origin = (origin[0], origin[1]);
            let (cx, cy) = interior_centroid(&kinds, nx, origin, *spacing);
            Grid::assemble(
                nx,
                ny,
                *spacing,
                origin,
                2,
                kinds,
                CycleParam::Angle { cx, cy },
                shape.clone(),
            )
        }
    }
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::ResolutionTooSmall(n))
    } else {
        Ok(())
    }
}

fn mark_boundary(kinds: &mut [NodeKind], nx: usize, ny: usize) {
    for k in 0..nx * ny {
        if kinds[k] != NodeKind::Exterior {
            continue;
        }
        let (i, j) = (k % nx, k / nx);
        let touches = (i > 0 && kinds[k - 1] == NodeKind::Interior)
            || (i + 1 < nx && kinds[k + 1] == NodeKind::Interior)
            || (j > 0 && kinds[k - nx] == NodeKind::Interior)
            || (j + 1 < ny && kinds[k + nx] == NodeKind::Interior);
        if touches {
            kinds[k] = NodeKind::Boundary;
        }
    }
}

fn interior_centroid(kinds: &[NodeKind], nx: usize, origin: (f64, f64), h: f64) -> (f64, f64) {
    let (mut sx, mut sy, mut count) = (0.0, 0.0, 0usize);
    for (k, kind) in kinds.iter().enumerate() {
        if *kind == NodeKind::Interior {
            sx += origin.0 + (k % nx) as f64 * h;
            sy += origin.1 + (k / nx) as f64 * h;
            count += 1;
        }
    }
    let count = count.max(1) as f64;
    (sx / count, sy / count)
}

impl Grid {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        nx: usize,
        ny: usize,
        h: f64,
        origin: (f64, f64),
        dim: usize,
        kinds: Vec<NodeKind>,
        param: CycleParam,
        shape: Shape,
    ) -> Result<Grid> {
        let interior: Vec<usize> = (0..kinds.len())
            .filter(|&k| kinds[k] == NodeKind::Interior)
            .collect();
        if interior.is_empty() {
            return Err(Error::InvalidDomain("domain has no interior nodes".into()));
        }
        for &k in &interior {
            let (i, j) = (k % nx, k / nx);
            let on_edge = i == 0 || i + 1 == nx || (dim == 2 && (j == 0 || j + 1 == ny));
            if on_edge {
                return Err(Error::InvalidDomain(format!(
                    "interior node {k} lies on the lattice edge"
                )));
            }
        }

        let components = count_components(&kinds, &interior, nx, dim);
        if components != 1 {
            return Err(Error::DisconnectedInterior(components));
        }

        let coords = |k: usize| {
            (
                origin.0 + (k % nx) as f64 * h,
                origin.1 + (k / nx) as f64 * h,
            )
        };
        let mut boundary: Vec<(f64, usize)> = (0..kinds.len())
            .filter(|&k| kinds[k] == NodeKind::Boundary)
            .map(|k| {
                let (x, y) = coords(k);
                let t = match param {
                    CycleParam::IntervalEnds => {
                        if k == 0 {
                            0.0
                        } else {
                            0.5
                        }
                    }
                    CycleParam::Perimeter { width, height } => {
                        let (i, j) = (k % nx, k / nx);
                        let (dx, dy) = (i as f64 * h, j as f64 * h);
                        let s = if j == 0 {
                            dx
                        } else if i == nx - 1 {
                            width + dy
                        } else if j == ny - 1 {
                            width + height + (width - dx)
                        } else {
                            2.0 * width + height + (height - dy)
                        };
                        s / (2.0 * (width + height))
                    }
                    CycleParam::Angle { cx, cy } => {
                        (y - cy).atan2(x - cx).rem_euclid(2.0 * PI) / (2.0 * PI)
                    }
                };
                (t.rem_euclid(1.0), k)
            })
            .collect();
        boundary.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut edges = Vec::new();
        for k in 0..kinds.len() {
            if kinds[k] == NodeKind::Exterior {
                continue;
            }
            let (i, j) = (k % nx, k / nx);
            if i + 1 < nx && kinds[k + 1] != NodeKind::Exterior {
                edges.push((k, k + 1));
            }
            if dim == 2 && j + 1 < ny && kinds[k + nx] != NodeKind::Exterior {
                edges.push((k, k + nx));
            }
        }

        let mut extent = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for k in (0..kinds.len()).filter(|&k| kinds[k] != NodeKind::Exterior) {
            let (x, y) = coords(k);
            extent[0] = extent[0].min(x);
            extent[1] = extent[1].max(x);
            extent[2] = extent[2].min(y);
            extent[3] = extent[3].max(y);
        }

        Ok(Grid {
            nx,
            ny,
            h,
            origin,
            dim,
            kinds,
            interior,
            boundary_t: boundary.iter().map(|b| b.0).collect(),
            boundary: boundary.into_iter().map(|b| b.1).collect(),
            edges,
            extent,
            shape,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Mesh spacing, identical on both axes.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Spatial dimension, 1 or 2.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// `[xmin, xmax, ymin, ymax]` over the non-exterior nodes.
    pub fn extent(&self) -> [f64; 4] {
        self.extent
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        self.kinds[node]
    }

    pub fn is_interior(&self, node: usize) -> bool {
        self.kinds[node] == NodeKind::Interior
    }

    /// Interior and boundary nodes, i.e. the closure of the domain.
    pub fn is_active(&self, node: usize) -> bool {
        self.kinds[node] != NodeKind::Exterior
    }

    /// Interior nodes in lexicographic (row-major) order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Boundary nodes sorted by their cycle parameter.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Cycle parameter of each entry of [`Grid::boundary`].
    pub fn boundary_params(&self) -> &[f64] {
        &self.boundary_t
    }

    /// Lattice edges whose endpoints are both non-exterior, lower index first.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// All non-exterior nodes in row-major order.
    pub fn active_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.kinds.len()).filter(move |&k| self.kinds[k] != NodeKind::Exterior)
    }

    pub fn coords(&self, node: usize) -> (f64, f64) {
        (
            self.origin.0 + (node % self.nx) as f64 * self.h,
            self.origin.1 + (node / self.nx) as f64 * self.h,
        )
    }

    /// Lattice neighbours per node in the stencil: 2 in 1D, 4 in 2D.
    pub fn degree(&self) -> usize {
        2 * self.dim
    }

    /// `h^d`, the volume weight of one node or edge.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Lattice neighbours of `node` that exist in the grid (any kind), in
    /// the order west, east, south, north.
    pub fn lattice_neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = (node % self.nx, node / self.nx);
        let nx = self.nx;
        let two_d = self.dim == 2;
        [
            (i > 0).then(|| node - 1),
            (i + 1 < nx).then(|| node + 1),
            (two_d && j > 0).then(|| node - nx),
            (two_d && j + 1 < self.ny).then(|| node + nx),
        ]
        .into_iter()
        .flatten()
    }

    /// Sum of the stencil neighbours of an interior node.
    #[inline]
    pub(crate) fn neighbor_sum(&self, values: &[f64], node: usize) -> f64 {
        if self.dim == 1 {
            values[node - 1] + values[node + 1]
        } else {
            values[node - 1] + values[node + 1] + values[node - self.nx] + values[node + self.nx]
        }
    }

    #[inline]
    pub(crate) fn laplacian_unchecked(&self, values: &[f64], node: usize) -> f64 {
        (self.neighbor_sum(values, node) - self.degree() as f64 * values[node]) / (self.h * self.h)
    }

    /// Five-point (three-point in 1D) discrete Laplacian at an interior node.
    pub fn laplacian(&self, f: &Field, node: usize) -> Result<f64> {
        if node >= self.len() || !self.is_interior(node) {
            return Err(Error::NotInterior(node));
        }
        Ok(self.laplacian_unchecked(f.values(), node))
    }

    /// Interior nodes split by checkerboard colour, for red-black sweeps.
    pub(crate) fn colored_interior(&self) -> [Vec<usize>; 2] {
        let mut red = Vec::new();
        let mut black = Vec::new();
        for &k in &self.interior {
            if (k % self.nx + k / self.nx).is_multiple_of(2) {
                red.push(k);
            } else {
                black.push(k);
            }
        }
        [red, black]
    }

    /// Jacobi spectral radius estimate for the Laplacian on the bounding
    /// lattice, used to pick an over-relaxation factor.
    pub(crate) fn optimal_sor_omega(&self) -> f64 {
        let span = (self.nx.max(self.ny) - 1) as f64;
        let rho = (PI / span).cos();
        2.0 / (1.0 + (1.0 - rho * rho).sqrt())
    }
}

fn count_components(kinds: &[NodeKind], interior: &[usize], nx: usize, dim: usize) -> usize {
    let mut seen = vec![false; kinds.len()];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for &start in interior {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            let mut visit = |n: usize| {
                if kinds[n] == NodeKind::Interior && !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            };
            // interior nodes are never on the lattice edge
            visit(k - 1);
            visit(k + 1);
            if dim == 2 {
                visit(k - nx);
                visit(k + nx);
            }
        }
    }
    components
}

/// One scalar per grid node. Exterior entries are kept at zero and ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Field {
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Field::from_fn(grid, |_, _| c)
    }

    /// Samples `f(x, y)` at every non-exterior node (`y = 0` in 1D).
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                if grid.is_active(k) {
                    let (x, y) = grid.coords(k);
                    f(x, y)
                } else {
                    0.0
                }
            })
            .collect();
        Field { values }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field { values })
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        Field { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every interior and boundary value is finite.
    pub fn is_finite_on(&self, grid: &Grid) -> bool {
        grid.active_nodes().all(|k| self.values[k].is_finite())
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Largest absolute value over the non-exterior nodes.
    pub fn max_abs_on(&self, grid: &Grid) -> f64 {
        grid.active_nodes()
            .map(|k| self.values[k].abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for Field {
    type Output = f64;

    fn index(&self, node: usize) -> &f64 {
        &self.values[node]
    }
}

impl Sub for &Field {
    type Output = Field;

    fn sub(self, rhs: &Field) -> Field {
        assert_eq!(self.values.len(), rhs.values.len(), "field length mismatch");
        Field {
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Discrete H1 norm: node values weighted by `h^d` plus squared difference
/// quotients over every lattice edge inside the closed domain.
pub fn discrete_h1_norm(grid: &Grid, f: &Field) -> f64 {
    let w = grid.cell_volume();
    let h = grid.h();
    let v = f.values();
    let mass: f64 = grid.active_nodes().map(|k| v[k] * v[k]).sum();
    let stiffness: f64 = grid
        .edges()
        .iter()
        .map(|&(a, b)| {
            let d = (v[b] - v[a]) / h;
            d * d
        })
        .sum();
    (w * (mass + stiffness)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(n: usize) -> Grid {
        build_grid(
            &Shape::Rectangle {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            },
            n,
        )
        .unwrap()
    }

    fn count(grid: &Grid, kind: NodeKind) -> usize {
        (0..grid.len()).filter(|&k| grid.kind(k) == kind).count()
    }

    #[test]
    fn five_by_five_square() {
        let g = unit_square(5);
        assert_eq!(g.len(), 25);
        assert_eq!(count(&g, NodeKind::Interior), 9);
        assert_eq!(count(&g, NodeKind::Boundary), 16);
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.boundary().len(), 16);
    }

    #[test]
    fn smallest_square_has_one_interior_node() {
        let g = unit_square(3);
        assert_eq!(g.interior(), &[4]);
        assert_eq!(g.coords(4), (0.5, 0.5));
    }

    #[test]
    fn too_coarse_is_rejected() {
        assert!(matches!(
            build_grid(&Shape::Interval { start: 0.0, end: 1.0 }, 2),
            Err(Error::ResolutionTooSmall(2))
        ));
    }

    #[test]
    fn two_blobs_are_disconnected() {
        let shape = Shape::Mask {
            rows: vec!["##..##".into(), "##..##".into()],
            spacing: 0.1,
            origin: [0.0, 0.0],
        };
        assert!(matches!(
            build_grid(&shape, 3),
            Err(Error::DisconnectedInterior(2))
        ));
    }

    #[test]
    fn rectangle_height_must_fit_the_mesh() {
        let shape = Shape::Rectangle {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 0.3,
        };
        assert!(matches!(build_grid(&shape, 5), Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn disk_classification() {
        let g = build_grid(
            &Shape::Disk {
                center: [0.0, 0.0],
                radius: 1.0,
            },
            21,
        )
        .unwrap();
        for k in 0..g.len() {
            let (x, y) = g.coords(k);
            let inside = x * x + y * y < 1.0 - 1e-9;
            assert_eq!(g.is_interior(k), inside, "node {k}");
            if g.kind(k) == NodeKind::Boundary {
                assert!(g.lattice_neighbors(k).any(|n| g.is_interior(n)));
            }
        }
        for &k in g.interior() {
            assert!(g.lattice_neighbors(k).all(|n| g.is_active(n)));
        }
        let t = g.boundary_params();
        assert!(t.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn perimeter_parameter_runs_counter_clockwise() {
        let g = unit_square(5);
        let t_of = |x: f64, y: f64| {
            let pos = g
                .boundary()
                .iter()
                .position(|&k| g.coords(k) == (x, y))
                .unwrap();
            g.boundary_params()[pos]
        };
        assert_eq!(t_of(0.0, 0.0), 0.0);
        assert_eq!(t_of(1.0, 0.0), 0.25);
        assert_eq!(t_of(1.0, 1.0), 0.5);
        assert_eq!(t_of(0.0, 1.0), 0.75);
        assert_eq!(t_of(0.0, 0.5), 0.875);
    }

    #[test]
    fn laplacian_of_constants_and_harmonic_polynomials() {
        let g = unit_square(5);
        let c = Field::constant(&g, 3.5);
        let xx = Field::from_fn(&g, |x, _| x * x);
        let xy = Field::from_fn(&g, |x, y| x * y);
        for &k in g.interior() {
            assert_eq!(g.laplacian(&c, k).unwrap(), 0.0);
            assert!((g.laplacian(&xx, k).unwrap() - 2.0).abs() < 1e-12);
            assert!(g.laplacian(&xy, k).unwrap().abs() < 1e-12);
        }
        assert!(matches!(g.laplacian(&c, 0), Err(Error::NotInterior(0))));
    }

    #[test]
    fn h1_norm_hand_values() {
        let g = build_grid(&Shape::Interval { start: 0.0, end: 1.0 }, 3).unwrap();
        let f = Field::from_values(&g, vec![0.0, 1.0, 0.0]).unwrap();
        assert!((discrete_h1_norm(&g, &f) - 4.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(discrete_h1_norm(&g, &Field::zeros(&g)), 0.0);
    }

    #[test]
    fn h1_norm_of_one_is_node_area() {
        // every node carries weight h^2, so the closed square over-counts by
        // (n / (n - 1))^2 relative to its unit area
        for n in [5usize, 33, 129] {
            let g = unit_square(n);
            let norm = discrete_h1_norm(&g, &Field::constant(&g, 1.0));
            let expected = n as f64 / (n - 1) as f64;
            assert!((norm - expected).abs() < 1e-13, "n={n}: {norm}");
        }
    }

    #[test]
    fn edges_exclude_exterior() {
        let g = build_grid(
            &Shape::Disk {
                center: [0.5, 0.5],
                radius: 0.5,
            },
            9,
        )
        .unwrap();
        for &(a, b) in g.edges() {
            assert!(g.is_active(a) && g.is_active(b));
            assert!(b == a + 1 || b == a + g.nx());
        }
    }
}
