//! Functionals F: ρ ↦ R^d built from real and imaginary parts of linear
//! combinations of scattering coefficients.
//!
//! Every component has the form part(Σ c_k S_{α_k β_k}) with fixed complex
//! c_k, so F is the restriction of a real-linear map on matrices and
//! dF(ρ)(μ) is the same map applied to dS(ρ)(μ).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MaterialField, ScatteringMatrix};
use crate::scattering::FieldBundle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// (Re, Im R⁺_mn) for m ≤ n.
    ReflectionOnly,
    /// No reflection and no conversion for incident mode m.
    SingleModeEnergy(usize),
    /// SingleModeEnergy plus Im T⁺_mm.
    SingleModePhase(usize),
    /// R⁺ = 0, upper part of T⁺ = 0 and Im T⁺_mm = 0.
    FullInvisibility,
    /// (Re R⁺, Im R⁺, Im T), usable when Re T₀ ≠ 0.
    RelativeRealT,
    /// (Im M₁₁, Re M₂₁, Im M₂₁) with M = S̄₀ S, usable when T₀ ≠ 0.
    RelativeGeneric,
    /// (Im(R̄₀⁺R⁺), Im(R̄₀⁻R⁻), Im(κT)) with κ = √(R̄₀⁺R̄₀⁻), for T₀ = 0.
    RelativeTZero,
}

impl Variant {
    pub fn is_relative(self) -> bool {
        matches!(self, Variant::RelativeRealT | Variant::RelativeGeneric | Variant::RelativeTZero)
    }

    pub fn name(self) -> String {
        match self {
            Variant::ReflectionOnly => "reflection_only".into(),
            Variant::SingleModeEnergy(m) => format!("single_mode_energy({m})"),
            Variant::SingleModePhase(m) => format!("single_mode_phase({m})"),
            Variant::FullInvisibility => "full_invisibility".into(),
            Variant::RelativeRealT => "relative_real_t".into(),
            Variant::RelativeGeneric => "relative_generic".into(),
            Variant::RelativeTZero => "relative_t_zero".into(),
        }
    }

    /// d for N propagating modes.
    pub fn dimension(self, n: usize) -> usize {
        match self {
            Variant::ReflectionOnly => n * (n + 1),
            Variant::SingleModeEnergy(_) => 4 * n - 2,
            Variant::SingleModePhase(_) => 4 * n - 1,
            Variant::FullInvisibility => n * (2 * n + 1),
            _ => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Part {
    Re,
    Im,
}

impl Part {
    fn take(self, z: Complex64) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }
}

/// One real component part(Σ c S_{αβ}).
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub part: Part,
    pub terms: Vec<(Complex64, usize, usize)>,
    pub label: String,
}

impl Component {
    fn single(part: Part, row: usize, col: usize, label: String) -> Self {
        Component { part, terms: vec![(Complex64::new(1.0, 0.0), row, col)], label }
    }

    fn eval_complex(&self, s: &nalgebra::DMatrix<Complex64>) -> Complex64 {
        self.terms.iter().map(|&(c, a, b)| c * s[(a, b)]).sum()
    }
}

/// Monomode reference coefficients of S(ρ₀).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub r_plus: Complex64,
    pub t: Complex64,
    pub r_minus: Complex64,
}

impl Reference {
    pub fn from_matrix(s: &ScatteringMatrix) -> Result<Self> {
        if s.n() != 1 {
            return Err(Error::Dimension(format!("relative functionals need N = 1, got N = {}", s.n())));
        }
        Ok(Reference { r_plus: s.r_plus(0, 0), t: s.t_plus(0, 0), r_minus: s.r_minus(0, 0) })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalSpec {
    variant: Variant,
    n: usize,
    reference: Option<Reference>,
    components: Vec<Component>,
}

impl FunctionalSpec {
    /// Non-relative functional for N modes.
    pub fn new(variant: Variant, n: usize) -> Result<Self> {
        Self::build(variant, n, None)
    }

    /// Relative functional anchored at S(ρ₀).
    pub fn relative(variant: Variant, s0: &ScatteringMatrix) -> Result<Self> {
        Self::build(variant, s0.n(), Some(Reference::from_matrix(s0)?))
    }

    pub fn build(variant: Variant, n: usize, reference: Option<Reference>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("N must be positive".into()));
        }
        if variant.is_relative() != reference.is_some() {
            return Err(Error::InvalidConfig(format!(
                "{} {} a reference scattering matrix",
                variant.name(),
                if variant.is_relative() { "requires" } else { "does not take" }
            )));
        }
        if variant.is_relative() && n != 1 {
            return Err(Error::Dimension(format!("{} is monomode only, got N = {n}", variant.name())));
        }
        let t = |m: usize, k: usize| (m, n + k);
        let mut c = Vec::new();
        let pair = |c: &mut Vec<Component>, row: usize, col: usize, name: String| {
            c.push(Component::single(Part::Re, row, col, format!("Re {name}")));
            c.push(Component::single(Part::Im, row, col, format!("Im {name}")));
        };
        match variant {
            Variant::ReflectionOnly => {
                for m in 0..n {
                    for k in m..n {
                        pair(&mut c, m, k, format!("R+[{m},{k}]"));
                    }
                }
            }
            Variant::SingleModeEnergy(m) | Variant::SingleModePhase(m) => {
                if m >= n {
                    return Err(Error::Dimension(format!("mode {m} is not propagating (N = {n})")));
                }
                for k in 0..n {
                    pair(&mut c, m, k, format!("R+[{m},{k}]"));
                }
                for k in (0..n).filter(|&k| k != m) {
                    let (r, col) = t(m, k);
                    pair(&mut c, r, col, format!("T+[{m},{k}]"));
                }
                if matches!(variant, Variant::SingleModePhase(_)) {
                    let (r, col) = t(m, m);
                    c.push(Component::single(Part::Im, r, col, format!("Im T+[{m},{m}]")));
                }
            }
            Variant::FullInvisibility => {
                for m in 0..n {
                    for k in m..n {
                        pair(&mut c, m, k, format!("R+[{m},{k}]"));
                    }
                }
                for m in 0..n {
                    for k in m + 1..n {
                        let (r, col) = t(m, k);
                        pair(&mut c, r, col, format!("T+[{m},{k}]"));
                    }
                }
                for m in 0..n {
                    let (r, col) = t(m, m);
                    c.push(Component::single(Part::Im, r, col, format!("Im T+[{m},{m}]")));
                }
            }
            Variant::RelativeRealT => {
                pair(&mut c, 0, 0, "R+".into());
                c.push(Component::single(Part::Im, 0, 1, "Im T".into()));
            }
            Variant::RelativeGeneric => {
                let r0 = reference.expect("checked above");
                // M = S̄₀ S: M₁₁ = R̄₀⁺R⁺ + T̄₀T, M₂₁ = T̄₀R⁺ + R̄₀⁻T
                let m11 = vec![(r0.r_plus.conj(), 0, 0), (r0.t.conj(), 1, 0)];
                let m21 = vec![(r0.t.conj(), 0, 0), (r0.r_minus.conj(), 1, 0)];
                c.push(Component { part: Part::Im, terms: m11, label: "Im M11".into() });
                c.push(Component { part: Part::Re, terms: m21.clone(), label: "Re M21".into() });
                c.push(Component { part: Part::Im, terms: m21, label: "Im M21".into() });
            }
            Variant::RelativeTZero => {
                let r0 = reference.expect("checked above");
                let kappa = (r0.r_plus.conj() * r0.r_minus.conj()).sqrt();
                c.push(Component { part: Part::Im, terms: vec![(r0.r_plus.conj(), 0, 0)], label: "Im(R0+* R+)".into() });
                c.push(Component { part: Part::Im, terms: vec![(r0.r_minus.conj(), 1, 1)], label: "Im(R0-* R-)".into() });
                c.push(Component { part: Part::Im, terms: vec![(kappa, 0, 1)], label: "Im(kappa T)".into() });
            }
        }
        debug_assert_eq!(c.len(), variant.dimension(n));
        Ok(FunctionalSpec { variant, n, reference, components: c })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn reference(&self) -> Option<&Reference> {
        self.reference.as_ref()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// F(S); also dF(ρ)(μ) when given dS(ρ)(μ).
    pub fn evaluate(&self, s: &ScatteringMatrix) -> Result<Vec<f64>> {
        if s.n() != self.n {
            return Err(Error::Dimension(format!(
                "functional built for N = {}, matrix has N = {}",
                self.n,
                s.n()
            )));
        }
        Ok(self.components.iter().map(|c| c.part.take(c.eval_complex(s.entries()))).collect())
    }

    /// Densities f_i with dF_i(ρ)(μ) = ∫ μ f_i.
    pub fn densities(&self, bundle: &FieldBundle) -> Result<Vec<MaterialField>> {
        if bundle.n() != self.n {
            return Err(Error::Dimension(format!(
                "functional built for N = {}, bundle has N = {}",
                self.n,
                bundle.n()
            )));
        }
        let u = bundle.quad_values();
        let quad = bundle.quadrature();
        let ik2 = Complex64::new(0.0, bundle.k() * bundle.k());
        let inside = quad.inside();
        Ok(self
            .components
            .iter()
            .map(|c| {
                let vals = (0..quad.len())
                    .map(|q| {
                        if !inside[q] {
                            return 0.0;
                        }
                        let z: Complex64 = c.terms.iter().map(|&(ck, a, b)| ck * u[a][q] * u[b][q]).sum();
                        c.part.take(ik2 * z)
                    })
                    .collect();
                MaterialField::from_values(vals)
            })
            .collect())
    }
}

/// Free-function form of [`FunctionalSpec::evaluate`].
pub fn evaluate_functional(spec: &FunctionalSpec, s: &ScatteringMatrix) -> Result<Vec<f64>> {
    spec.evaluate(s)
}

/// Default band for [`select_relative_functional`].
pub const DEFAULT_SELECTION_THRESHOLD: f64 = 1e-2;

/// Relative functional suited to S₀ = S(ρ₀) in monomode.
pub fn select_relative_functional(s0: &ScatteringMatrix, delta: f64) -> Result<FunctionalSpec> {
    let r = Reference::from_matrix(s0)?;
    let variant = if r.t.re.abs() > delta {
        Variant::RelativeRealT
    } else if r.t.norm() > delta {
        Variant::RelativeGeneric
    } else {
        Variant::RelativeTZero
    };
    FunctionalSpec::relative(variant, s0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn mono(r: C, t: C, rm: C) -> ScatteringMatrix {
        ScatteringMatrix::monomode(r, t, rm)
    }

    #[test]
    fn dimensions() {
        for n in 1..5 {
            for v in [Variant::ReflectionOnly, Variant::SingleModeEnergy(0), Variant::SingleModePhase(n - 1), Variant::FullInvisibility] {
                let f = FunctionalSpec::new(v, n).unwrap();
                assert_eq!(f.dimension(), v.dimension(n));
            }
        }
        assert_eq!(FunctionalSpec::new(Variant::ReflectionOnly, 3).unwrap().dimension(), 12);
        assert_eq!(FunctionalSpec::new(Variant::FullInvisibility, 1).unwrap().dimension(), 3);
        assert!(FunctionalSpec::new(Variant::SingleModeEnergy(2), 2).is_err());
    }

    #[test]
    fn full_invisibility_vanishes_on_empty_guide() {
        for n in 1..4 {
            let f = FunctionalSpec::new(Variant::FullInvisibility, n).unwrap();
            assert!(f.evaluate(&ScatteringMatrix::transparent(n)).unwrap().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let f = FunctionalSpec::new(Variant::ReflectionOnly, 2).unwrap();
        assert!(matches!(f.evaluate(&ScatteringMatrix::transparent(1)), Err(Error::Dimension(_))));
        let s2 = ScatteringMatrix::transparent(2);
        assert!(matches!(FunctionalSpec::relative(Variant::RelativeGeneric, &s2), Err(Error::Dimension(_))));
        assert!(FunctionalSpec::build(Variant::RelativeGeneric, 1, None).is_err());
    }

    #[test]
    fn generic_reduces_to_full_invisibility_terms() {
        let s0 = mono(C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0));
        let f = FunctionalSpec::relative(Variant::RelativeGeneric, &s0).unwrap();
        let s = mono(C::new(0.1, 0.2), C::new(0.3, 0.4), C::new(-0.5, 0.6));
        let v = f.evaluate(&s).unwrap();
        assert_eq!(v, vec![0.4, 0.1, 0.2]);
    }

    #[test]
    fn generic_at_t_equal_i() {
        let s0 = mono(C::new(0.0, 0.0), C::new(0.0, 1.0), C::new(0.0, 0.0));
        let f = FunctionalSpec::relative(Variant::RelativeGeneric, &s0).unwrap();
        let s = mono(C::new(0.1, 0.2), C::new(0.3, 0.4), C::new(-0.5, 0.6));
        let v = f.evaluate(&s).unwrap();
        let want = [-0.3, 0.2, -0.1];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn selection() {
        let pick = |t: C| {
            let r = (1.0 - t.norm_sqr()).max(0.0).sqrt();
            let rm = if t.norm() > 0.0 { -t / t.conj() * r } else { C::new(1.0, 0.0) };
            let s0 = mono(C::new(r, 0.0), t, rm);
            assert!(s0.unitarity_residual() < 1e-12);
            select_relative_functional(&s0, DEFAULT_SELECTION_THRESHOLD).unwrap().variant()
        };
        assert_eq!(pick(C::new(0.82, 0.52)), Variant::RelativeRealT);
        assert_eq!(pick(C::new(0.0, 1.0)), Variant::RelativeGeneric);
        assert_eq!(pick(C::new(0.0, 0.0)), Variant::RelativeTZero);
    }

    #[test]
    fn linear_in_matrix() {
        let f = FunctionalSpec::new(Variant::FullInvisibility, 2).unwrap();
        let a = ScatteringMatrix::transparent(2);
        let mut e = a.entries().clone();
        e[(0, 3)] = C::new(0.3, -0.2);
        let b = ScatteringMatrix::new(2, e);
        let sum = ScatteringMatrix::new(2, a.entries() * C::new(2.0, 0.0) + b.entries() * C::new(-3.0, 0.0));
        let lhs = f.evaluate(&sum).unwrap();
        let fa = f.evaluate(&a).unwrap();
        let fb = f.evaluate(&b).unwrap();
        for i in 0..lhs.len() {
            assert!((lhs[i] - (2.0 * fa[i] - 3.0 * fb[i])).abs() < 1e-15);
        }
    }
}
