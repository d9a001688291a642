//! Piecewise-constant perturbations on a partition of the obstacle.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::ObstacleQuadrature;
use crate::model::{MaterialField, Shape};

/// Cells O_1..O_S rasterised onto the obstacle quadrature points.
#[derive(Clone, Debug)]
pub struct Partition {
    ids: Vec<u32>,
    shapes: Vec<Shape>,
    /// Cell of each quadrature point (None outside every cell or outside O).
    membership: Vec<Option<usize>>,
    areas: Vec<f64>,
}

impl Partition {
    /// Builds the partition; cells must be pairwise disjoint on the
    /// quadrature set and each must carry positive area inside O.
    pub fn new(cells: Vec<(u32, Shape)>, quad: &ObstacleQuadrature) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidConfig("partition has no cells".into()));
        }
        let (ids, shapes): (Vec<u32>, Vec<Shape>) = cells.into_iter().unzip();
        let mut membership = vec![None; quad.len()];
        let mut areas = vec![0.0; shapes.len()];
        for (q, p) in quad.points().iter().enumerate() {
            if !quad.inside()[q] {
                continue;
            }
            for (s, shape) in shapes.iter().enumerate() {
                if shape.contains(p[0], p[1]) {
                    if let Some(prev) = membership[q] {
                        return Err(Error::InvalidConfig(format!(
                            "partition cells {} and {} overlap at ({:.4}, {:.4})",
                            ids[prev], ids[s], p[0], p[1]
                        )));
                    }
                    membership[q] = Some(s);
                    areas[s] += quad.weights()[q];
                }
            }
        }
        if let Some(s) = areas.iter().position(|&a| a <= 0.0) {
            return Err(Error::ZeroAreaCell { cell: ids[s] as usize });
        }
        Ok(Partition { ids, shapes, membership, areas })
    }

    /// Number of cells S.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    /// Cell areas measured by the quadrature.
    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn membership(&self) -> &[Option<usize>] {
        &self.membership
    }

    /// Mean of f over every cell, (∫_{O_s} f) / |O_s|.
    pub fn cell_means(&self, f: &MaterialField, quad: &ObstacleQuadrature) -> Vec<f64> {
        let mut sums = vec![0.0; self.len()];
        for (q, cell) in self.membership.iter().enumerate() {
            if let Some(s) = cell {
                sums[*s] += quad.weights()[q] * f.values()[q];
            }
        }
        sums.iter().zip(&self.areas).map(|(s, a)| s / a).collect()
    }

    /// Field equal to `values[s]` on cell s and zero elsewhere.
    pub fn field_from_cells(&self, values: &[f64]) -> MaterialField {
        assert_eq!(values.len(), self.len());
        MaterialField::from_values(self.membership.iter().map(|c| c.map_or(0.0, |s| values[s])).collect())
    }

    /// L² projection onto span(ψ_1, …, ψ_S).
    pub fn project(&self, f: &MaterialField, quad: &ObstacleQuadrature) -> MaterialField {
        self.field_from_cells(&self.cell_means(f, quad))
    }

    /// Largest spread max − min of f inside a cell.
    pub fn within_cell_spread(&self, f: &MaterialField) -> f64 {
        let mut lo = vec![f64::INFINITY; self.len()];
        let mut hi = vec![f64::NEG_INFINITY; self.len()];
        for (q, cell) in self.membership.iter().enumerate() {
            if let Some(s) = cell {
                lo[*s] = lo[*s].min(f.values()[q]);
                hi[*s] = hi[*s].max(f.values()[q]);
            }
        }
        lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max)
    }

    /// Largest |f| at points of O lying outside every cell.
    pub fn outside_magnitude(&self, f: &MaterialField, quad: &ObstacleQuadrature) -> f64 {
        self.membership
            .iter()
            .enumerate()
            .filter(|(q, c)| c.is_none() && quad.inside()[*q])
            .fold(0.0, |m, (q, _)| m.max(f.values()[q].abs()))
    }

    /// CSV rows `cell,value` of the cell means.
    pub fn cells_csv(&self, f: &MaterialField, quad: &ObstacleQuadrature) -> String {
        let mut s = String::from("cell,value\n");
        for (id, v) in self.ids.iter().zip(self.cell_means(f, quad)) {
            s.push_str(&format!("{id},{v:.17e}\n"));
        }
        s
    }
}

/// Free-function form of [`Partition::project`]; ZeroAreaCellError cannot
/// occur here because [`Partition::new`] already rejects empty cells.
pub fn project_density(f: &MaterialField, partition: &Partition, quad: &ObstacleQuadrature) -> MaterialField {
    partition.project(f, quad)
}

#[derive(Clone, Debug, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub cells: usize,
    pub constraints: usize,
    pub explanation: String,
    pub gram_condition: Option<f64>,
}

/// Necessary rank condition S ≥ d.
pub fn constrained_feasibility(partition: &Partition, d: usize) -> Feasibility {
    let cells = partition.len();
    let feasible = cells >= d;
    let explanation = if feasible {
        format!("{cells} cells for {d} constraints")
    } else {
        format!("{cells} cells cannot support {d} independent constraints (need at least {d})")
    };
    Feasibility { feasible, cells, constraints: d, explanation, gram_condition: None }
}
