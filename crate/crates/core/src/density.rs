use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

/// The m species densities `(u_1, ..., u_m)` on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityTuple {
    species: Vec<Field>,
}

impl DensityTuple {
    pub fn new(species: Vec<Field>) -> Result<Self> {
        let Some(first) = species.first() else {
            return Err(Error::InvalidArgument("a density tuple needs at least one species".into()));
        };
        if species.iter().any(|f| f.len() != first.len()) {
            return Err(Error::ShapeMismatch("species fields differ in length".into()));
        }
        Ok(DensityTuple { species })
    }

    pub fn zeros(grid: &Grid, m: usize) -> Self {
        DensityTuple {
            species: vec![Field::zeros(grid); m.max(1)],
        }
    }

    /// Species count m.
    pub fn m(&self) -> usize {
        self.species.len()
    }

    pub fn species(&self, i: usize) -> &Field {
        &self.species[i]
    }

    pub fn species_mut(&mut self, i: usize) -> &mut Field {
        &mut self.species[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Field> {
        self.species.iter()
    }

    pub fn into_fields(self) -> Vec<Field> {
        self.species
    }

    pub fn node_count(&self) -> usize {
        self.species[0].len()
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.node_count() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "tuple has {} nodes per species, grid has {}",
                self.node_count(),
                grid.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_compatible(&self, other: &DensityTuple) -> Result<()> {
        if self.m() != other.m() {
            return Err(Error::ShapeMismatch(format!(
                "species counts differ: {} vs {}",
                self.m(),
                other.m()
            )));
        }
        if self.node_count() != other.node_count() {
            return Err(Error::ShapeMismatch("tuples live on different grids".into()));
        }
        Ok(())
    }

    /// Species-major flat copy: species `i` occupies `[i * n, (i + 1) * n)`.
    pub(crate) fn to_flat(&self) -> Vec<f64> {
        self.species.iter().flat_map(|f| f.values().iter().copied()).collect()
    }

    pub(crate) fn from_flat(flat: Vec<f64>, m: usize) -> Self {
        let n = flat.len() / m;
        let species = flat
            .chunks(n)
            .map(|c| Field::from_raw(c.to_vec()))
            .collect();
        DensityTuple { species }
    }
}

/// `u_i - sum_{j != i} u_j` at every node. For m = 1 this is `u_1`.
pub fn hat_transform(u: &DensityTuple, i: usize) -> Field {
    let mut out = u.species(i).clone();
    for (j, other) in u.iter().enumerate() {
        if j == i {
            continue;
        }
        for (o, v) in out.values_mut().iter_mut().zip(other.values()) {
            *o -= v;
        }
    }
    out
}
