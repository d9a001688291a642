//! Waveguide modes w_n^± = (2|β_n|)^{-1/2} e^{±iβ_n x} φ_n(y).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default exclusion band around the cutoffs k = nπ.
pub const DEFAULT_CUTOFF_MARGIN: f64 = 1e-3;

/// Propagation direction of a mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// e^{+iβx}, travelling towards +∞.
    Plus,
    /// e^{−iβx}, travelling towards −∞.
    Minus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::Plus => Direction::Minus,
            Direction::Minus => Direction::Plus,
        }
    }
}

/// Square root of γ = r e^{iη} taken as √r e^{iη/2} with η ∈ [0, 2π).
pub fn branch_sqrt(gamma: Complex64) -> Complex64 {
    let r = gamma.norm();
    let mut eta = gamma.im.atan2(gamma.re);
    if eta < 0.0 {
        eta += 2.0 * PI;
    }
    Complex64::from_polar(r.sqrt(), 0.5 * eta)
}

/// Number N of propagating modes, i.e. the integer with (N−1)π < k < Nπ.
pub fn propagating_mode_count(k: f64) -> Result<usize> {
    propagating_mode_count_with_margin(k, DEFAULT_CUTOFF_MARGIN)
}

pub fn propagating_mode_count_with_margin(k: f64, margin: f64) -> Result<usize> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidConfig(format!("wavenumber must be positive, got {k}")));
    }
    let n = (k / PI).round();
    if (k - n * PI).abs() <= margin {
        return Err(Error::Cutoff { k, n: n as u32, margin });
    }
    Ok((k / PI).floor() as usize + 1)
}

/// Normalisation α_n of the transverse profile.
pub fn alpha(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        std::f64::consts::SQRT_2
    }
}

/// Transverse profile φ_n(y) = α_n cos(nπy).
pub fn phi(n: usize, y: f64) -> f64 {
    alpha(n) * (n as f64 * PI * y).cos()
}

/// Mode table for a fixed wavenumber.
#[derive(Clone, Debug)]
pub struct ModeBasis {
    k: f64,
    n_prop: usize,
}

impl ModeBasis {
    pub fn new(k: f64) -> Result<Self> {
        Self::with_margin(k, DEFAULT_CUTOFF_MARGIN)
    }

    pub fn with_margin(k: f64, margin: f64) -> Result<Self> {
        let n_prop = propagating_mode_count_with_margin(k, margin)?;
        Ok(ModeBasis { k, n_prop })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Number of propagating modes N.
    pub fn n(&self) -> usize {
        self.n_prop
    }

    pub fn is_propagating(&self, n: usize) -> bool {
        n < self.n_prop
    }

    pub fn beta(&self, n: usize) -> Complex64 {
        let nf = n as f64 * PI;
        branch_sqrt(Complex64::new(self.k * self.k - nf * nf, 0.0))
    }

    /// (2|β_n|)^{-1/2}.
    pub fn amplitude(&self, n: usize) -> f64 {
        (2.0 * self.beta(n).norm()).sqrt().recip()
    }

    pub fn alpha(&self, n: usize) -> f64 {
        alpha(n)
    }

    pub fn phi(&self, n: usize, y: f64) -> f64 {
        phi(n, y)
    }

    /// w_n^±(x, y).
    pub fn mode(&self, n: usize, dir: Direction, x: f64, y: f64) -> Complex64 {
        let phase = Complex64::i() * self.beta(n) * (dir.sign() * x);
        phase.exp() * (self.amplitude(n) * phi(n, y))
    }

    /// Axial factor (2|β_n|)^{-1/2} e^{±iβ_n x}.
    pub fn axial(&self, n: usize, dir: Direction, x: f64) -> Complex64 {
        (Complex64::i() * self.beta(n) * (dir.sign() * x)).exp() * self.amplitude(n)
    }
}

/// Free-function form of [`ModeBasis::mode`].
pub fn mode_eval(basis: &ModeBasis, n: usize, dir: Direction, x: f64, y: f64) -> Complex64 {
    basis.mode(n, dir, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_counts() {
        assert_eq!(propagating_mode_count(0.8 * PI).unwrap(), 1);
        assert_eq!(propagating_mode_count(4.0).unwrap(), 2);
        assert_eq!(propagating_mode_count(7.0).unwrap(), 3);
        assert!(matches!(propagating_mode_count(PI), Err(Error::Cutoff { n: 1, .. })));
        assert!(matches!(propagating_mode_count(2.0 * PI + 5e-4), Err(Error::Cutoff { n: 2, .. })));
        assert!(propagating_mode_count(-1.0).is_err());
    }

    #[test]
    fn evanescent_beta_at_k7() {
        let b = ModeBasis::new(7.0).unwrap();
        let b3 = b.beta(3);
        assert!(b3.re.abs() < 1e-14);
        assert!((b3.im - 6.3108).abs() < 5e-5, "{b3}");
        for n in 0..3 {
            assert!(b.beta(n).im.abs() < 1e-14 && b.beta(n).re > 0.0);
        }
    }

    #[test]
    fn plane_mode_at_origin() {
        let k = 0.8 * PI;
        let b = ModeBasis::new(k).unwrap();
        for y in [0.0, 0.3, 1.0] {
            let w = b.mode(0, Direction::Plus, 0.0, y);
            assert!((w - Complex64::new((2.0 * k).powf(-0.5), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn conjugate_of_plus_is_minus() {
        let b = ModeBasis::new(7.0).unwrap();
        for n in 0..3 {
            for &(x, y) in &[(-3.0, 0.1), (0.4, 0.9), (4.9, 0.5)] {
                let d = b.mode(n, Direction::Plus, x, y).conj() - b.mode(n, Direction::Minus, x, y);
                assert!(d.norm() < 1e-14);
            }
        }
    }
}
