//! Real coefficient fields ρ and perturbations μ.
//!
//! A field stores one value per point of the obstacle quadrature set
//! (`fem::ObstacleQuadrature`). The quadrature set owns the geometry, so
//! sampling, masking and integration go through it.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MaterialField {
    values: Vec<f64>,
}

impl MaterialField {
    pub fn zeros(len: usize) -> Self {
        MaterialField { values: vec![0.0; len] }
    }

    /// Raw constructor; callers are responsible for the support.
    pub fn from_values(values: Vec<f64>) -> Self {
        MaterialField { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
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

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// self += a·other
    pub fn axpy(&mut self, a: f64, other: &MaterialField) {
        assert_eq!(self.len(), other.len());
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
    }

    pub fn scaled(&self, a: f64) -> MaterialField {
        MaterialField { values: self.values.iter().map(|v| a * v).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl Add for &MaterialField {
    type Output = MaterialField;
    fn add(self, rhs: &MaterialField) -> MaterialField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &MaterialField {
    type Output = MaterialField;
    fn sub(self, rhs: &MaterialField) -> MaterialField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &MaterialField {
    type Output = MaterialField;
    fn mul(self, rhs: f64) -> MaterialField {
        self.scaled(rhs)
    }
}

impl Neg for &MaterialField {
    type Output = MaterialField;
    fn neg(self) -> MaterialField {
        self.scaled(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = MaterialField::from_values(vec![1.0, -2.0, 0.0]);
        let b = MaterialField::from_values(vec![0.5, 0.5, 0.5]);
        assert_eq!((&a + &b).values(), &[1.5, -1.5, 0.5]);
        assert_eq!((&a - &b).values(), &[0.5, -2.5, -0.5]);
        assert_eq!((&a * 2.0).values(), &[2.0, -4.0, 0.0]);
        assert_eq!(a.norm_inf(), 2.0);
        assert!(MaterialField::zeros(4).is_zero());
    }
}
