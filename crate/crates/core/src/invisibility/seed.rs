//! Deterministic seed perturbations μ₀#.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fem::ObstacleQuadrature;
use crate::model::{BBox, MaterialField, Region};

pub const DEFAULT_SEED: u64 = 17;

/// How μ₀# is chosen at each continuation step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedPolicy {
    /// Same Legendre coefficients at every step.
    Fixed { seed: u64 },
    /// Seed advanced by the step index.
    PerStep { seed: u64 },
    /// User-supplied field on the quadrature set.
    #[serde(skip)]
    Field(MaterialField),
}

impl Default for SeedPolicy {
    fn default() -> Self {
        SeedPolicy::Fixed { seed: DEFAULT_SEED }
    }
}

impl SeedPolicy {
    pub fn seed_for_step(&self, step: usize, quad: &ObstacleQuadrature, region: &Region) -> MaterialField {
        match self {
            SeedPolicy::Fixed { seed } => legendre_seed(quad, region, *seed),
            SeedPolicy::PerStep { seed } => legendre_seed(quad, region, seed.wrapping_add(step as u64)),
            SeedPolicy::Field(f) => f.clone(),
        }
    }
}

fn legendre2(t: f64) -> f64 {
    1.5 * t * t - 0.5
}

/// Tensor Legendre polynomials of total degree ≤ 2 on the bounding box.
pub fn legendre_basis(x: f64, y: f64, bbox: BBox) -> [f64; 6] {
    let half = |lo: f64, hi: f64, t: f64| {
        let w = 0.5 * (hi - lo);
        if w > 0.0 { (t - 0.5 * (hi + lo)) / w } else { 0.0 }
    };
    let u = half(bbox[0], bbox[1], x);
    let v = half(bbox[2], bbox[3], y);
    [1.0, u, v, legendre2(u), u * v, legendre2(v)]
}

/// Random combination of [`legendre_basis`] restricted to O, scaled to
/// unit sup norm.
pub fn legendre_seed(quad: &ObstacleQuadrature, region: &Region, seed: u64) -> MaterialField {
    let Some(bbox) = region.bbox() else {
        return quad.zeros();
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let f = quad.sample(|x, y| {
        legendre_basis(x, y, bbox).iter().zip(&coeffs).map(|(p, c)| p * c).sum()
    });
    let m = f.norm_inf();
    if m > 0.0 { f.scaled(1.0 / m) } else { f }
}
