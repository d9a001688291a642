use num_complex::Complex64;
use serde::Serialize;

use crate::model::MaterialField;
use crate::scattering::{scattering_differential, FieldBundle};

/// Points of the 20×10 sample lattice inside Ω_ℓ.
pub fn sample_lattice(ell: f64) -> Vec<[f64; 2]> {
    let mut pts = Vec::with_capacity(200);
    for i in 0..20 {
        for j in 0..10 {
            pts.push([-ell + (i as f64 + 0.5) * 2.0 * ell / 20.0, (j as f64 + 0.5) / 10.0]);
        }
    }
    pts
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    /// max |S − Sᵀ|
    pub symmetry: f64,
    /// max |S S̄ᵀ − Id|
    pub unitarity: f64,
    /// max over the lattice of |S̄U − Ū|
    pub relation: f64,
    /// max over the probes of |Re(R̄⁺dR⁺(μ) + T̄dT(μ))| / ‖μ‖_∞ (N = 1 only)
    pub energy_derivative: Option<f64>,
    /// max |S_volume − S_trace|
    pub extraction_mismatch: f64,
}

/// Residuals of the structural identities of S for one bundle.
pub fn verify_structure(bundle: &FieldBundle, probes: &[MaterialField]) -> StructureReport {
    let s = bundle.s();
    let n2 = 2 * bundle.n();
    let mut relation: f64 = 0.0;
    for p in sample_lattice(bundle.config().ell) {
        let u: Vec<Complex64> = bundle.fields().iter().map(|f| f.eval(p[0], p[1]).unwrap_or_default()).collect();
        for a in 0..n2 {
            let lhs: Complex64 = (0..n2).map(|b| s.get(a, b).conj() * u[b]).sum();
            relation = relation.max((lhs - u[a].conj()).norm());
        }
    }
    let energy_derivative = (bundle.n() == 1 && !probes.is_empty()).then(|| {
        probes
            .iter()
            .filter(|mu| mu.norm_inf() > 0.0)
            .map(|mu| {
                let d = scattering_differential(bundle, mu);
                let v = s.r_plus(0, 0).conj() * d.r_plus(0, 0) + s.t_plus(0, 0).conj() * d.t_plus(0, 0);
                v.re.abs() / mu.norm_inf()
            })
            .fold(0.0, f64::max)
    });
    StructureReport {
        symmetry: s.symmetry_residual(),
        unitarity: s.unitarity_residual(),
        relation,
        energy_derivative,
        extraction_mismatch: bundle.extraction_mismatch(),
    }
}
