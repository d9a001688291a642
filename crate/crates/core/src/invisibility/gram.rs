//! Right inverse of dF(ρ) through the Gram matrix of the densities.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::constraints::Partition;
use crate::error::{Error, Result};
use crate::fem::ObstacleQuadrature;
use crate::model::MaterialField;
use crate::scattering::FieldBundle;

use super::functional::FunctionalSpec;

/// Condition number above which G is treated as singular.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Debug)]
pub struct GramBasis {
    densities: Vec<MaterialField>,
    gram: DMatrix<f64>,
    inverse: DMatrix<f64>,
    basis: Vec<MaterialField>,
    condition: f64,
}

impl GramBasis {
    /// Builds the basis from densities f_i; with a partition the Gram
    /// matrix uses the projected densities so every μ_j is piecewise
    /// constant.
    pub fn from_densities(
        densities: Vec<MaterialField>,
        quad: &ObstacleQuadrature,
        partition: Option<&Partition>,
    ) -> Result<Self> {
        let d = densities.len();
        if let Some(p) = partition {
            if p.len() < d {
                return Err(Error::SingularGram {
                    condition: f64::INFINITY,
                    detail: format!(
                        "infeasible: partition has {} cells for {} constraints",
                        p.len(),
                        d
                    ),
                });
            }
        }
        let spanning: Vec<MaterialField> = match partition {
            Some(p) => densities.iter().map(|f| p.project(f, quad)).collect(),
            None => densities.clone(),
        };
        let gram = DMatrix::from_fn(d, d, |i, j| quad.inner(&spanning[i], &spanning[j]));
        let condition = condition_number(&gram);
        if !(condition <= GRAM_CONDITION_LIMIT) {
            let norms: Vec<String> = spanning.iter().map(|f| format!("{:.3e}", quad.l2_norm(f))).collect();
            return Err(Error::SingularGram {
                condition,
                detail: format!("density norms [{}]", norms.join(", ")),
            });
        }
        let inverse = match gram.clone().cholesky() {
            Some(c) => c.inverse(),
            None => gram.clone().try_inverse().ok_or_else(|| Error::SingularGram {
                condition,
                detail: "Gram matrix not invertible".into(),
            })?,
        };
        let basis = (0..d)
            .map(|j| {
                let mut mu = quad.zeros();
                for (i, f) in spanning.iter().enumerate() {
                    mu.axpy(inverse[(j, i)], f);
                }
                mu
            })
            .collect();
        Ok(GramBasis { densities, gram, inverse, basis, condition })
    }

    pub fn densities(&self) -> &[MaterialField] {
        &self.densities
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn basis(&self) -> &[MaterialField] {
        &self.basis
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn dimension(&self) -> usize {
        self.densities.len()
    }

    /// dF(ρ)(μ) by quadrature, (∫ μ f_i)_i.
    pub fn linearization(&self, mu: &MaterialField, quad: &ObstacleQuadrature) -> Vec<f64> {
        self.densities.iter().map(|f| quad.inner(mu, f)).collect()
    }

    /// K(τ) = Σ τ_j μ_j.
    pub fn right_inverse(&self, tau: &[f64]) -> MaterialField {
        assert_eq!(tau.len(), self.dimension());
        let mut mu = MaterialField::zeros(self.basis.first().map_or(0, |b| b.len()));
        for (t, b) in tau.iter().zip(&self.basis) {
            mu.axpy(*t, b);
        }
        mu
    }

    /// max_ij |dF_i(μ_j) − δ_ij|.
    pub fn right_inverse_residual(&self, quad: &ObstacleQuadrature) -> f64 {
        let mut r: f64 = 0.0;
        for (j, mu) in self.basis.iter().enumerate() {
            for (i, v) in self.linearization(mu, quad).into_iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                r = r.max((v - delta).abs());
            }
        }
        r
    }
}

fn condition_number(g: &DMatrix<f64>) -> f64 {
    if g.nrows() == 0 {
        return 1.0;
    }
    let eig = SymmetricEigen::new(g.clone()).eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || !(min > 0.0) {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Gram basis of dF(ρ) at the bundle's ρ.
pub fn gram_basis(spec: &FunctionalSpec, bundle: &FieldBundle, partition: Option<&Partition>) -> Result<GramBasis> {
    GramBasis::from_densities(spec.densities(bundle)?, bundle.quadrature(), partition)
}

/// μ₀ = μ₀# − Σ_j dF_j(μ₀#) μ_j; errors when μ₀# lies in span(μ_j).
pub fn kernel_element(basis: &GramBasis, seed: &MaterialField, quad: &ObstacleQuadrature) -> Result<MaterialField> {
    let coeffs = basis.linearization(seed, quad);
    let mut mu0 = seed.clone();
    for (c, b) in coeffs.iter().zip(basis.basis()) {
        mu0.axpy(-c, b);
    }
    let seed_norm = quad.l2_norm(seed);
    let residual = quad.l2_norm(&mu0);
    if !(residual > 1e-8 * seed_norm) || seed_norm == 0.0 {
        return Err(Error::DegenerateSeed { residual: if seed_norm > 0.0 { residual / seed_norm } else { 0.0 } });
    }
    Ok(mu0)
}
