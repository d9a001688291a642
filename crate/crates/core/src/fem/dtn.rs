//! Truncated Dirichlet-to-Neumann maps on Σ_{±ℓ}:
//! Λψ = Σ_{j<J} iβ_j (ψ, φ_j) φ_j.

use num_complex::Complex64;

use crate::fem::basis::edge_values;
use crate::fem::mesh::StripMesh;
use crate::fem::quadrature::gauss_interval;
use crate::model::modes::{phi, ModeBasis};
use crate::model::Direction;

const EDGE_GAUSS_POINTS: usize = 8;

/// Boundary side: `Minus` is x = −ℓ, `Plus` is x = +ℓ.
pub type Side = Direction;

#[derive(Clone, Debug)]
pub struct DtnOperator {
    side: Side,
    /// Global indices of the trace nodes, bottom to top.
    nodes: Vec<usize>,
    /// moments[j][a] = ∫ ψ_a φ_j dy for trace node a.
    moments: Vec<Vec<f64>>,
    coefficients: Vec<Complex64>,
}

/// Modal image c_j = iβ_j (ψ, φ_j) of a trace under Λ.
#[derive(Clone, Debug, PartialEq)]
pub struct DtnImage {
    pub coefficients: Vec<Complex64>,
}

impl DtnImage {
    /// Evaluates Σ c_j φ_j(y).
    pub fn eval(&self, y: f64) -> Complex64 {
        self.coefficients.iter().enumerate().map(|(j, c)| c * phi(j, y)).sum()
    }
}

impl DtnOperator {
    pub fn new(mesh: &StripMesh, modes: &ModeBasis, side: Side, terms: usize) -> Self {
        let nodes = mesh.boundary_nodes(side == Direction::Plus);
        let order = mesh.order();
        let ly = nodes.len();
        let ys = mesh.lattice_y();
        let mut moments = vec![vec![0.0; ly]; terms];
        for edge in 0..mesh.ny() {
            let y0 = ys[order * edge];
            let y1 = ys[order * edge + order];
            for (y, w) in gauss_interval(EDGE_GAUSS_POINTS, y0, y1) {
                let t = (y - y0) / (y1 - y0);
                let v = edge_values(order, t);
                for (j, mj) in moments.iter_mut().enumerate() {
                    let f = w * phi(j, y);
                    for a in 0..=order {
                        mj[order * edge + a] += f * v[a];
                    }
                }
            }
        }
        let coefficients = (0..terms).map(|j| Complex64::i() * modes.beta(j)).collect();
        DtnOperator { side, nodes, moments, coefficients }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn terms(&self) -> usize {
        self.moments.len()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn moment(&self, j: usize) -> &[f64] {
        &self.moments[j]
    }

    /// iβ_j.
    pub fn coefficient(&self, j: usize) -> Complex64 {
        self.coefficients[j]
    }

    /// (ψ, φ_j) for an FE trace given by its nodal values.
    pub fn trace_moment(&self, trace: &[Complex64], j: usize) -> Complex64 {
        self.moments[j].iter().zip(trace).map(|(m, t)| t * m).sum()
    }

    /// (u|_Σ, φ_j) for a global FE coefficient vector.
    pub fn field_moment(&self, coeffs: &[Complex64], j: usize) -> Complex64 {
        self.moments[j].iter().zip(&self.nodes).map(|(m, &n)| coeffs[n] * m).sum()
    }

    /// Λ applied to an FE trace (nodal values bottom to top).
    pub fn apply_nodal(&self, trace: &[Complex64]) -> DtnImage {
        DtnImage {
            coefficients: (0..self.terms()).map(|j| self.coefficients[j] * self.trace_moment(trace, j)).collect(),
        }
    }

    /// Λ applied to a trace given as a function of y, integrated with a
    /// composite Gauss rule on the mesh edges.
    pub fn apply_fn(&self, trace: impl Fn(f64) -> Complex64, ny: usize) -> DtnImage {
        let mut c = vec![Complex64::new(0.0, 0.0); self.terms()];
        for edge in 0..ny {
            let (y0, y1) = (edge as f64 / ny as f64, (edge + 1) as f64 / ny as f64);
            for (y, w) in gauss_interval(EDGE_GAUSS_POINTS, y0, y1) {
                let t = trace(y) * w;
                for (j, cj) in c.iter_mut().enumerate() {
                    *cj += t * phi(j, y);
                }
            }
        }
        for (cj, b) in c.iter_mut().zip(&self.coefficients) {
            *cj *= b;
        }
        DtnImage { coefficients: c }
    }
}

/// Free-function form of [`DtnOperator::apply_fn`] on the operator's mesh resolution.
pub fn dtn_apply(trace: impl Fn(f64) -> Complex64, dtn: &DtnOperator, ny: usize) -> DtnImage {
    dtn.apply_fn(trace, ny)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup(k: f64) -> (StripMesh, ModeBasis, DtnOperator) {
        let mesh = StripMesh::new(5.0, 20, 20, 2).unwrap();
        let modes = ModeBasis::new(k).unwrap();
        let d = DtnOperator::new(&mesh, &modes, Direction::Minus, 10);
        (mesh, modes, d)
    }

    #[test]
    fn moments_are_orthonormal_against_profiles() {
        let (mesh, _, d) = setup(4.0);
        let ys = mesh.lattice_y().to_vec();
        for n in 0..6 {
            let trace: Vec<Complex64> = ys.iter().map(|&y| Complex64::new(phi(n, y), 0.0)).collect();
            for j in 0..6 {
                let m = d.trace_moment(&trace, j).re;
                let want = if j == n { 1.0 } else { 0.0 };
                assert!((m - want).abs() < 1e-3, "n={n} j={j}: {m}");
            }
        }
    }

    #[test]
    fn plane_wave_trace() {
        let k = 0.8 * PI;
        let (_, _, d) = setup(k);
        let img = d.apply_fn(|y| Complex64::new(phi(0, y), 0.0), 20);
        assert!((img.coefficients[0] - Complex64::new(0.0, k)).norm() < 1e-12);
        assert!(img.coefficients[1..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn truncated_profile_is_annihilated() {
        let (_, _, d) = setup(4.0);
        let img = d.apply_fn(|y| Complex64::new(phi(10, y), 0.0), 20);
        assert!(img.coefficients.iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn evanescent_coefficient_is_negative_real() {
        let k = 4.0;
        let (_, _, d) = setup(k);
        for n in 2..10 {
            let img = d.apply_fn(|y| Complex64::new(phi(n, y), 0.0), 20);
            let want = -((n as f64 * PI).powi(2) - k * k).sqrt();
            assert!((img.coefficients[n] - Complex64::new(want, 0.0)).norm() < 1e-10);
            assert!(img.eval(0.3).im.abs() < 1e-10);
        }
    }
}
