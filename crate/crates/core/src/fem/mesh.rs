//! Structured triangulation of the strip [−ℓ, ℓ] × [0, 1].
//!
//! Each rectangular cell is split along its rising diagonal into
//! A = (x0,y0),(x1,y0),(x1,y1) and B = (x0,y0),(x1,y1),(x0,y1).
//! Nodes sit on the P-node lattice of size (p·nx+1) × (p·ny+1), numbered
//! with y running fastest.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::basis::{nodes_per_element, shape_values};
use crate::fem::quadrature::triangle_rule;
use crate::model::{MaterialField, Region, WaveguideConfig};

/// Minimum number of cells across the smallest extent of an obstacle primitive.
pub const MIN_CELLS_ACROSS: f64 = 8.0;

/// Mesh and boundary-operator parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discretization {
    pub nx: usize,
    pub ny: usize,
    pub order: usize,
    pub dtn_terms: usize,
}

impl Discretization {
    /// p = 2, nx = 40ℓ, ny = 20, J = 10.
    pub fn default_for(ell: f64) -> Self {
        Discretization { nx: (40.0 * ell).round().max(4.0) as usize, ny: 20, order: 2, dtn_terms: 10 }
    }

    /// One uniform refinement (cell counts doubled).
    pub fn refined(self) -> Self {
        Discretization { nx: 2 * self.nx, ny: 2 * self.ny, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangleKind {
    A,
    B,
}

#[derive(Clone, Debug)]
pub struct StripMesh {
    ell: f64,
    nx: usize,
    ny: usize,
    order: usize,
    hx: f64,
    hy: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    connectivity: Vec<usize>,
}

/// Builds the mesh and checks obstacle resolution.
pub fn build_mesh(config: &WaveguideConfig, nx: usize, ny: usize, order: usize) -> Result<StripMesh> {
    let mesh = StripMesh::new(config.ell, nx, ny, order)?;
    mesh.check_resolution(&config.obstacle)?;
    Ok(mesh)
}

impl StripMesh {
    /// Bare strip mesh without obstacle checks.
    pub fn new(ell: f64, nx: usize, ny: usize, order: usize) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::Resolution(format!("need nx, ny >= 4, got nx={nx}, ny={ny}")));
        }
        if order != 1 && order != 2 {
            return Err(Error::InvalidConfig(format!("element order must be 1 or 2, got {order}")));
        }
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::InvalidConfig(format!("ell must be positive, got {ell}")));
        }
        let lx = order * nx + 1;
        let ly = order * ny + 1;
        let mut xs: Vec<f64> = (0..lx).map(|i| -ell + 2.0 * ell * i as f64 / (lx - 1) as f64).collect();
        xs[0] = -ell;
        xs[lx - 1] = ell;
        let mut ys: Vec<f64> = (0..ly).map(|j| j as f64 / (ly - 1) as f64).collect();
        ys[ly - 1] = 1.0;

        let npe = nodes_per_element(order);
        let mut connectivity = Vec::with_capacity(2 * nx * ny * npe);
        let id = |i: usize, j: usize| i * ly + j;
        for cx in 0..nx {
            for cy in 0..ny {
                let (i0, j0) = (order * cx, order * cy);
                let (i1, j1) = (i0 + order, j0 + order);
                connectivity.extend_from_slice(&[id(i0, j0), id(i1, j0), id(i1, j1)]);
                if order == 2 {
                    connectivity.extend_from_slice(&[id(i0 + 1, j0), id(i1, j0 + 1), id(i0 + 1, j0 + 1)]);
                }
                connectivity.extend_from_slice(&[id(i0, j0), id(i1, j1), id(i0, j1)]);
                if order == 2 {
                    connectivity.extend_from_slice(&[id(i0 + 1, j0 + 1), id(i0 + 1, j1), id(i0, j0 + 1)]);
                }
            }
        }
        Ok(StripMesh {
            ell,
            nx,
            ny,
            order,
            hx: 2.0 * ell / nx as f64,
            hy: 1.0 / ny as f64,
            xs,
            ys,
            connectivity,
        })
    }

    /// ResolutionError when some primitive spans fewer than eight cells.
    pub fn check_resolution(&self, region: &Region) -> Result<()> {
        for (i, s) in region.shapes.iter().enumerate() {
            let [ex, ey] = s.extent();
            let cells = (ex / self.hx).min(ey / self.hy);
            if cells < MIN_CELLS_ACROSS - 1e-9 {
                return Err(Error::Resolution(format!(
                    "shape {i} spans only {cells:.2} cells (need {MIN_CELLS_ACROSS})"
                )));
            }
        }
        Ok(())
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }

    /// Lattice dimensions (p·nx+1, p·ny+1).
    pub fn lattice(&self) -> (usize, usize) {
        (self.xs.len(), self.ys.len())
    }

    pub fn lattice_x(&self) -> &[f64] {
        &self.xs
    }

    pub fn lattice_y(&self) -> &[f64] {
        &self.ys
    }

    pub fn num_nodes(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        i * self.ys.len() + j
    }

    pub fn node(&self, idx: usize) -> [f64; 2] {
        let ly = self.ys.len();
        [self.xs[idx / ly], self.ys[idx % ly]]
    }

    pub fn num_elements(&self) -> usize {
        2 * self.nx * self.ny
    }

    pub fn nodes_per_element(&self) -> usize {
        nodes_per_element(self.order)
    }

    pub fn element_nodes(&self, e: usize) -> &[usize] {
        let npe = self.nodes_per_element();
        &self.connectivity[e * npe..(e + 1) * npe]
    }

    pub fn element_kind(&self, e: usize) -> TriangleKind {
        if e.is_multiple_of(2) {
            TriangleKind::A
        } else {
            TriangleKind::B
        }
    }

    /// Lower-left corner of the cell containing element `e`.
    fn element_origin(&self, e: usize) -> [f64; 2] {
        let cell = e / 2;
        let (cx, cy) = (cell / self.ny, cell % self.ny);
        [self.xs[self.order * cx], self.ys[self.order * cy]]
    }

    pub fn element_vertices(&self, e: usize) -> [[f64; 2]; 3] {
        let [x0, y0] = self.element_origin(e);
        let (x1, y1) = (x0 + self.hx, y0 + self.hy);
        match self.element_kind(e) {
            TriangleKind::A => [[x0, y0], [x1, y0], [x1, y1]],
            TriangleKind::B => [[x0, y0], [x1, y1], [x0, y1]],
        }
    }

    pub fn element_area(&self) -> f64 {
        0.5 * self.hx * self.hy
    }

    /// Gradients of the barycentric coordinates for each triangle kind.
    pub fn barycentric_gradients(&self, kind: TriangleKind) -> [[f64; 2]; 3] {
        let (ix, iy) = (1.0 / self.hx, 1.0 / self.hy);
        match kind {
            TriangleKind::A => [[-ix, 0.0], [ix, -iy], [0.0, iy]],
            TriangleKind::B => [[0.0, -iy], [ix, 0.0], [-ix, iy]],
        }
    }

    /// Physical point for barycentric coordinates in element `e`.
    pub fn map_point(&self, e: usize, l: [f64; 3]) -> [f64; 2] {
        let v = self.element_vertices(e);
        [
            l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
            l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
        ]
    }

    /// Element and barycentric coordinates of a point of the closed strip.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, [f64; 3])> {
        if !(x >= -self.ell && x <= self.ell && (0.0..=1.0).contains(&y)) {
            return None;
        }
        let fx = (x + self.ell) / self.hx;
        let fy = y / self.hy;
        let cx = (fx.floor() as usize).min(self.nx - 1);
        let cy = (fy.floor() as usize).min(self.ny - 1);
        let s = fx - cx as f64;
        let t = fy - cy as f64;
        let cell = cx * self.ny + cy;
        if t <= s {
            Some((2 * cell, [1.0 - s, s - t, t]))
        } else {
            Some((2 * cell + 1, [1.0 - t, s, t - s]))
        }
    }

    /// Half-bandwidth of the global matrix (equal above and below).
    pub fn bandwidth(&self) -> usize {
        self.order * (self.ys.len() + 1)
    }

    /// Node indices on x = −ℓ and x = +ℓ, bottom to top.
    pub fn boundary_nodes(&self, right: bool) -> Vec<usize> {
        let i = if right { self.xs.len() - 1 } else { 0 };
        (0..self.ys.len()).map(|j| self.node_index(i, j)).collect()
    }

    /// Evaluates an FE coefficient vector at a point.
    pub fn evaluate(&self, coeffs: &[Complex64], x: f64, y: f64) -> Option<Complex64> {
        let (e, l) = self.locate(x, y)?;
        let v = shape_values(self.order, l);
        Some(self.element_nodes(e).iter().zip(v.iter()).map(|(&n, &s)| coeffs[n] * s).sum())
    }

    /// Sum of element areas.
    pub fn total_area(&self) -> f64 {
        self.num_elements() as f64 * self.element_area()
    }
}

/// Quadrature points of every element meeting the obstacle region.
///
/// Material fields are stored as values at these points; points outside
/// the region carry zero.
#[derive(Clone, Debug)]
pub struct ObstacleQuadrature {
    elements: Vec<usize>,
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    inside: Vec<bool>,
    reference: Vec<[f64; 6]>,
    npe: usize,
}

impl ObstacleQuadrature {
    pub fn new(mesh: &StripMesh, region: &Region) -> Self {
        let rule = triangle_rule();
        let reference: Vec<[f64; 6]> = rule.iter().map(|(l, _)| shape_values(mesh.order(), *l)).collect();
        let area = mesh.element_area();
        let mut out = ObstacleQuadrature {
            elements: Vec::new(),
            points: Vec::new(),
            weights: Vec::new(),
            inside: Vec::new(),
            reference,
            npe: mesh.nodes_per_element(),
        };
        let Some(bb) = region.bbox() else { return out };
        for e in 0..mesh.num_elements() {
            let v = mesh.element_vertices(e);
            let (xmin, xmax) = (v[0][0].min(v[1][0]).min(v[2][0]), v[0][0].max(v[1][0]).max(v[2][0]));
            let (ymin, ymax) = (v[0][1].min(v[1][1]).min(v[2][1]), v[0][1].max(v[1][1]).max(v[2][1]));
            if xmax < bb[0] || xmin > bb[1] || ymax < bb[2] || ymin > bb[3] {
                continue;
            }
            let pts: Vec<[f64; 2]> = rule.iter().map(|(l, _)| mesh.map_point(e, *l)).collect();
            let ins: Vec<bool> = pts.iter().map(|p| region.contains(p[0], p[1])).collect();
            if !ins.iter().any(|&b| b) {
                continue;
            }
            out.elements.push(e);
            out.points.extend(pts);
            out.inside.extend(ins);
            out.weights.extend(rule.iter().map(|(_, w)| w * area));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Quadrature points per element.
    pub fn points_per_element(&self) -> usize {
        self.reference.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    /// Shape-function values at the reference quadrature points.
    pub fn reference_values(&self) -> &[[f64; 6]] {
        &self.reference
    }

    /// Area of the region as seen by the quadrature.
    pub fn measure(&self) -> f64 {
        self.weights.iter().zip(&self.inside).filter(|(_, &i)| i).map(|(w, _)| w).sum()
    }

    pub fn zeros(&self) -> MaterialField {
        MaterialField::zeros(self.len())
    }

    /// Samples `f` and masks the result to the region.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> MaterialField {
        MaterialField::from_values(
            self.points
                .iter()
                .zip(&self.inside)
                .map(|(p, &ins)| if ins { f(p[0], p[1]) } else { 0.0 })
                .collect(),
        )
    }

    /// `value` on the part of `cells` covered by the region, zero elsewhere.
    pub fn indicator(&self, cells: &Region, value: f64) -> MaterialField {
        self.sample(|x, y| if cells.contains(x, y) { value } else { 0.0 })
    }

    /// Wraps raw values, zeroing those outside the region.
    pub fn field_from_values(&self, mut values: Vec<f64>) -> Result<MaterialField> {
        if values.len() != self.len() {
            return Err(Error::Dimension(format!(
                "field has {} values, quadrature set has {}",
                values.len(),
                self.len()
            )));
        }
        for (v, &ins) in values.iter_mut().zip(&self.inside) {
            if !ins {
                *v = 0.0;
            }
        }
        Ok(MaterialField::from_values(values))
    }

    pub fn integrate(&self, f: &MaterialField) -> f64 {
        self.weights.iter().zip(f.values()).map(|(w, v)| w * v).sum()
    }

    pub fn inner(&self, a: &MaterialField, b: &MaterialField) -> f64 {
        self.weights.iter().zip(a.values()).zip(b.values()).map(|((w, x), y)| w * x * y).sum()
    }

    pub fn l2_norm(&self, a: &MaterialField) -> f64 {
        self.inner(a, a).sqrt()
    }

    /// FE coefficient vector evaluated at every quadrature point.
    pub fn evaluate(&self, mesh: &StripMesh, coeffs: &[Complex64]) -> Vec<Complex64> {
        let nq = self.points_per_element();
        let mut out = Vec::with_capacity(self.len());
        for &e in &self.elements {
            let nodes = mesh.element_nodes(e);
            for q in 0..nq {
                let r = &self.reference[q];
                out.push((0..self.npe).map(|a| coeffs[nodes[a]] * r[a]).sum());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Shape;

    fn config(shapes: Vec<Shape>) -> WaveguideConfig {
        WaveguideConfig::new(0.8 * std::f64::consts::PI, 5.0, Region::new(shapes))
    }

    #[test]
    fn default_node_count_and_area() {
        let c = config(vec![Shape::rectangle(-1.0, 1.0, 0.25, 0.75)]);
        let m = build_mesh(&c, 200, 20, 2).unwrap();
        assert_eq!(m.num_nodes(), 401 * 41);
        assert!((m.total_area() - 10.0).abs() < 1e-12);
        assert_eq!(m.node(m.num_nodes() - 1), [5.0, 1.0]);
        assert_eq!(m.node(0), [-5.0, 0.0]);
    }

    #[test]
    fn too_coarse() {
        let c = config(vec![Shape::rectangle(-1.0, 1.0, 0.25, 0.75)]);
        assert!(matches!(build_mesh(&c, 2, 20, 2), Err(Error::Resolution(_))));
        assert!(matches!(build_mesh(&c, 200, 8, 2), Err(Error::Resolution(_))));
    }

    #[test]
    fn locate_round_trip() {
        let m = StripMesh::new(2.0, 8, 5, 2).unwrap();
        for &(x, y) in &[(-2.0, 0.0), (0.33, 0.71), (1.99, 0.99), (2.0, 1.0), (0.5, 0.2)] {
            let (e, l) = m.locate(x, y).unwrap();
            assert!(l.iter().all(|&v| v > -1e-12));
            let p = m.map_point(e, l);
            assert!((p[0] - x).abs() < 1e-12 && (p[1] - y).abs() < 1e-12);
        }
        assert!(m.locate(2.1, 0.5).is_none());
    }

    #[test]
    fn bandwidth_covers_connectivity() {
        for p in [1, 2] {
            let m = StripMesh::new(1.0, 6, 4, p).unwrap();
            let mut w = 0;
            for e in 0..m.num_elements() {
                let n = m.element_nodes(e);
                for a in n {
                    for b in n {
                        w = w.max(a.abs_diff(*b));
                    }
                }
            }
            assert_eq!(w, m.bandwidth());
        }
    }

    #[test]
    fn quadrature_measures_obstacle() {
        let c = config(vec![Shape::rectangle(-1.0, 1.0, 0.25, 0.75)]);
        let m = build_mesh(&c, 200, 20, 2).unwrap();
        let q = ObstacleQuadrature::new(&m, &c.obstacle);
        assert!((q.measure() - 1.0).abs() < 1e-12);
        let f = q.sample(|x, _| x * x);
        assert!((q.integrate(&f) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_fields_are_reproduced() {
        let m = StripMesh::new(1.0, 4, 4, 2).unwrap();
        let f = |x: f64, y: f64| 1.0 + x - 2.0 * y + x * y + 0.5 * y * y;
        let coeffs: Vec<Complex64> =
            (0..m.num_nodes()).map(|i| Complex64::new(f(m.node(i)[0], m.node(i)[1]), 0.0)).collect();
        for &(x, y) in &[(0.13, 0.77), (-0.6, 0.1)] {
            assert!((m.evaluate(&coeffs, x, y).unwrap().re - f(x, y)).abs() < 1e-13);
        }
    }
}
