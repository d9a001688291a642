use num_complex::Complex64;
use nalgebra::DMatrix;

use crate::model::{MaterialField, ScatteringMatrix};
use crate::scattering::FieldBundle;

/// dS(ρ)(μ)_{αβ} = ik² ∫ μ u_α u_β.
pub fn scattering_differential(bundle: &FieldBundle, mu: &MaterialField) -> ScatteringMatrix {
    let n2 = 2 * bundle.n();
    let quad = bundle.quadrature();
    assert_eq!(mu.len(), quad.len(), "perturbation does not match the quadrature set");
    let w = quad.weights();
    let m = mu.values();
    let u = bundle.quad_values();
    let k2 = bundle.k() * bundle.k();
    let mut d = DMatrix::zeros(n2, n2);
    for a in 0..n2 {
        for b in a..n2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..quad.len() {
                if m[q] != 0.0 {
                    acc += u[a][q] * u[b][q] * (w[q] * m[q]);
                }
            }
            let v = Complex64::i() * k2 * acc;
            d[(a, b)] = v;
            d[(b, a)] = v;
        }
    }
    ScatteringMatrix::new(bundle.n(), d)
}

impl FieldBundle {
    pub fn differential(&self, mu: &MaterialField) -> ScatteringMatrix {
        scattering_differential(self, mu)
    }
}
