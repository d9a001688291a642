//! TOML run configuration.

use std::path::Path;

use cloak_core::constraints::Partition;
use cloak_core::fem::{Discretization, ObstacleQuadrature};
use cloak_core::invisibility::{ContinuationOptions, SeedPolicy, Variant, DEFAULT_SEED};
use cloak_core::model::{MaterialField, Region, Shape, WaveguideConfig};
use cloak_core::{Error, Result};
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub k: f64,
    #[serde(default = "default_ell")]
    pub ell: f64,
    pub geometry: Geometry,
    #[serde(default)]
    pub discretization: Option<Discretization>,
    #[serde(default)]
    pub material: Material,
    #[serde(default)]
    pub perturbation: Perturbation,
    #[serde(default)]
    pub continuation: Continuation,
    #[serde(default)]
    pub partition: Vec<Cell>,
}

fn default_ell() -> f64 {
    5.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub shapes: Vec<Shape>,
}

/// ρ₀ = constant on O, overridden by cell values, plus an optional
/// scaled Legendre field.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Material {
    pub constant: f64,
    pub cells: Vec<MaterialCell>,
    pub seed: Option<u64>,
    pub seed_amplitude: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialCell {
    pub shape: Shape,
    pub value: f64,
}

/// Direction μ used by `differential`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Perturbation {
    pub seed: u64,
    pub h: f64,
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation { seed: DEFAULT_SEED, h: 1e-3 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Continuation {
    /// reflection_only, full_invisibility, single_mode_energy:m,
    /// single_mode_phase:m, relative_real_t, relative_generic,
    /// relative_t_zero, or relative (automatic choice).
    pub functional: String,
    pub aleph: usize,
    pub epsilon0: f64,
    pub eta: f64,
    pub max_iter: usize,
    pub trust_radius: f64,
    pub acceptance_tol: f64,
    pub seed: u64,
    /// "fixed" or "per_step".
    pub seed_policy: String,
    pub selection_threshold: f64,
}

impl Default for Continuation {
    fn default() -> Self {
        let o = ContinuationOptions::default();
        Continuation {
            functional: "reflection_only".into(),
            aleph: 1,
            epsilon0: o.epsilon0,
            eta: o.eta,
            max_iter: o.max_iter,
            trust_radius: o.trust_radius,
            acceptance_tol: o.acceptance_tol,
            seed: DEFAULT_SEED,
            seed_policy: "fixed".into(),
            selection_threshold: cloak_core::invisibility::DEFAULT_SELECTION_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionalChoice {
    Fixed(Variant),
    AutoRelative,
}

impl Continuation {
    pub fn choice(&self) -> Result<FunctionalChoice> {
        let bad = || Error::InvalidConfig(format!("unknown functional '{}'", self.functional));
        let (name, arg) = match self.functional.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim().parse::<usize>().map_err(|_| bad())?)),
            None => (self.functional.trim(), None),
        };
        let v = match (name, arg) {
            ("reflection_only", None) => Variant::ReflectionOnly,
            ("full_invisibility", None) => Variant::FullInvisibility,
            ("single_mode_energy", Some(m)) => Variant::SingleModeEnergy(m),
            ("single_mode_phase", Some(m)) => Variant::SingleModePhase(m),
            ("relative_real_t", None) => Variant::RelativeRealT,
            ("relative_generic", None) => Variant::RelativeGeneric,
            ("relative_t_zero", None) => Variant::RelativeTZero,
            ("relative", None) => return Ok(FunctionalChoice::AutoRelative),
            _ => return Err(bad()),
        };
        Ok(FunctionalChoice::Fixed(v))
    }

    pub fn options(&self) -> Result<ContinuationOptions> {
        let seed = match self.seed_policy.as_str() {
            "fixed" => SeedPolicy::Fixed { seed: self.seed },
            "per_step" => SeedPolicy::PerStep { seed: self.seed },
            other => return Err(Error::InvalidConfig(format!("unknown seed_policy '{other}'"))),
        };
        let o = ContinuationOptions {
            epsilon0: self.epsilon0,
            eta: self.eta,
            max_iter: self.max_iter,
            trust_radius: self.trust_radius,
            acceptance_tol: self.acceptance_tol,
            seed,
            ..ContinuationOptions::default()
        };
        o.validate()?;
        Ok(o)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    pub id: u32,
    pub shape: Shape,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn waveguide(&self) -> WaveguideConfig {
        WaveguideConfig::new(self.k, self.ell, Region::new(self.geometry.shapes.clone()))
    }

    pub fn discretization(&self) -> Discretization {
        self.discretization.unwrap_or_else(|| Discretization::default_for(self.ell))
    }

    pub fn rho0(&self, quad: &ObstacleQuadrature, region: &Region) -> MaterialField {
        let m = &self.material;
        let mut rho = quad.sample(|x, y| {
            m.cells.iter().rev().find(|c| c.shape.contains(x, y)).map_or(m.constant, |c| c.value)
        });
        if let Some(seed) = m.seed {
            rho.axpy(m.seed_amplitude, &cloak_core::invisibility::legendre_seed(quad, region, seed));
        }
        rho
    }

    pub fn partition(&self, quad: &ObstacleQuadrature) -> Result<Option<Partition>> {
        if self.partition.is_empty() {
            return Ok(None);
        }
        let cells = self.partition.iter().map(|c| (c.id, c.shape.clone())).collect();
        Partition::new(cells, quad).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_and_full() {
        let c = RunConfig::parse(
            r#"
            k = 2.5
            [geometry]
            shapes = [{ kind = "rectangle", x = [-1.0, 1.0], y = [0.0, 1.0] }]
            "#,
        )
        .unwrap();
        assert_eq!(c.discretization(), Discretization::default_for(5.0));
        assert_eq!(c.continuation.choice().unwrap(), FunctionalChoice::Fixed(Variant::ReflectionOnly));
        let c = RunConfig::parse(
            r#"
            k = 7.0
            ell = 4.0
            [geometry]
            shapes = [{ kind = "disc", center = [0.0, 0.5], radius = 0.3 }]
            [discretization]
            nx = 100
            ny = 16
            order = 1
            dtn_terms = 8
            [continuation]
            functional = "single_mode_phase:2"
            aleph = 9
            seed_policy = "per_step"
            [[partition]]
            id = 4
            shape = { kind = "disc", center = [0.0, 0.5], radius = 0.3 }
            "#,
        )
        .unwrap();
        assert_eq!(c.discretization().nx, 100);
        assert_eq!(c.continuation.choice().unwrap(), FunctionalChoice::Fixed(Variant::SingleModePhase(2)));
        assert!(matches!(c.continuation.options().unwrap().seed, SeedPolicy::PerStep { .. }));
        assert_eq!(c.partition.len(), 1);
    }

    #[test]
    fn rejects_unknown_keys_and_functionals() {
        assert!(RunConfig::parse("k = 1.0\nbogus = 2\n[geometry]\nshapes = []\n").is_err());
        let c = Continuation { functional: "reflection".into(), ..Continuation::default() };
        assert!(c.choice().is_err());
    }
}
