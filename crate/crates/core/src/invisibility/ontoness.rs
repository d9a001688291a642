//! Monomode surjectivity predicates for dF.

use serde::Serialize;

use crate::error::Error;
use crate::model::ScatteringMatrix;
use crate::scattering::FieldBundle;

use super::functional::{FunctionalSpec, Variant};
use super::gram::gram_basis;

/// Predicate values below this are reported as non-onto.
pub const ONTONESS_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct Predicate {
    /// Quantity whose non-vanishing implies ontoness, e.g. "|T|".
    pub name: String,
    pub value: f64,
    pub onto: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OntonessReport {
    /// Infinite when the Gram matrix is singular.
    pub gram_condition: f64,
    pub predicate: Option<Predicate>,
    pub warning: Option<String>,
}

/// Monomode predicate for `spec` at S; None in multimode.
pub fn ontoness_predicate(spec: &FunctionalSpec, s: &ScatteringMatrix) -> Option<Predicate> {
    if s.n() != 1 {
        return None;
    }
    let t = s.t_plus(0, 0);
    let (name, value) = match spec.variant() {
        Variant::ReflectionOnly | Variant::SingleModeEnergy(_) => ("|T|".to_string(), t.norm()),
        Variant::FullInvisibility | Variant::SingleModePhase(_) | Variant::RelativeRealT => {
            ("|Re T|".to_string(), t.re.abs())
        }
        Variant::RelativeGeneric => {
            let t0 = spec.reference().map_or(t, |r| r.t);
            ("|T0|".to_string(), t0.norm())
        }
        Variant::RelativeTZero => ("1 (T0 = 0 setting)".to_string(), 1.0),
    };
    Some(Predicate { name, value, onto: value > ONTONESS_THRESHOLD })
}

pub fn ontoness_report(spec: &FunctionalSpec, s: &ScatteringMatrix, gram_condition: f64) -> OntonessReport {
    let predicate = ontoness_predicate(spec, s);
    let warning = match &predicate {
        Some(p) if !p.onto => Some(format!(
            "{} = {:.3e} vanishes: dF is not onto for {}",
            p.name,
            p.value,
            spec.variant().name()
        )),
        None if !gram_condition.is_finite() => Some("Gram matrix singular".into()),
        _ => None,
    };
    OntonessReport { gram_condition, predicate, warning }
}

pub fn ontoness_diagnostic(spec: &FunctionalSpec, bundle: &FieldBundle) -> OntonessReport {
    let condition = match gram_basis(spec, bundle, None) {
        Ok(b) => b.condition(),
        Err(Error::SingularGram { condition, .. }) => condition,
        Err(_) => f64::NAN,
    };
    ontoness_report(spec, bundle.s(), condition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn monomode_predicates() {
        let spec = FunctionalSpec::new(Variant::FullInvisibility, 1).unwrap();
        let s = ScatteringMatrix::monomode(Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6), Complex64::new(0.8, 0.0));
        assert!(s.unitarity_residual() < 1e-15);
        let r = ontoness_report(&spec, &s, 1.0);
        assert!(!r.predicate.unwrap().onto);
        assert!(r.warning.is_some());
        let refl = FunctionalSpec::new(Variant::ReflectionOnly, 1).unwrap();
        let tr = ScatteringMatrix::transparent(1);
        let r = ontoness_report(&refl, &tr, 1.0);
        assert!((r.predicate.as_ref().unwrap().value - 1.0).abs() < 1e-15 && r.warning.is_none());
    }

    #[test]
    fn multimode_has_no_predicate() {
        let spec = FunctionalSpec::new(Variant::ReflectionOnly, 2).unwrap();
        let r = ontoness_report(&spec, &ScatteringMatrix::transparent(2), 3.0);
        assert!(r.predicate.is_none() && r.warning.is_none());
    }
}
