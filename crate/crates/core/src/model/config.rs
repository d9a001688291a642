use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::geometry::Region;
use crate::model::modes::{ModeBasis, DEFAULT_CUTOFF_MARGIN};

/// Physical setup: wavenumber, truncation half-length and obstacle region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveguideConfig {
    pub k: f64,
    pub ell: f64,
    pub obstacle: Region,
    #[serde(default = "default_margin")]
    pub cutoff_margin: f64,
}

fn default_margin() -> f64 {
    DEFAULT_CUTOFF_MARGIN
}

impl WaveguideConfig {
    pub fn new(k: f64, ell: f64, obstacle: Region) -> Self {
        WaveguideConfig { k, ell, obstacle, cutoff_margin: DEFAULT_CUTOFF_MARGIN }
    }

    /// Checks the invariants and returns the mode table.
    pub fn validate(&self) -> Result<ModeBasis> {
        if !(self.ell.is_finite() && self.ell > 0.0) {
            return Err(Error::InvalidConfig(format!("ell must be positive, got {}", self.ell)));
        }
        if !(self.cutoff_margin >= 0.0) {
            return Err(Error::InvalidConfig("cutoff margin must be nonnegative".into()));
        }
        self.obstacle.validate(self.ell).map_err(Error::InvalidConfig)?;
        ModeBasis::with_margin(self.k, self.cutoff_margin)
    }
}
