//! Independent reference values: 1D slab transfer matrix, the explicit
//! differential at ρ = 0, and random unitary symmetric 2×2 matrices.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::ScatteringMatrix;

/// Reflection and transmission of a full-height slab ρ = `rho` on (a, b) for
/// the plane mode, in the normalisation of w^± = (2k)^{-1/2} e^{±ikx}.
///
/// Propagates (u, u′) across the slab with the exact interval transfer matrix
/// and matches u = e^{ikx} + R e^{−ikx} on the left, u = T e^{ikx} on the right.
pub fn slab_scattering_1d(k: f64, rho: f64, a: f64, b: f64) -> Result<(Complex64, Complex64)> {
    if !(k > 0.0 && k < PI) {
        return Err(Error::InvalidConfig(format!("slab oracle needs 0 < k < pi, got {k}")));
    }
    if !(a < b) {
        return Err(Error::InvalidConfig(format!("slab needs a < b, got ({a}, {b})")));
    }
    if !(1.0 + rho > 0.0) {
        return Err(Error::EvanescentSlab(1.0 + rho));
    }
    let q = k * (1.0 + rho).sqrt();
    let l = b - a;
    let (s, c) = (q * l).sin_cos();
    let m = [[c, s / q], [-q * s, c]];
    let i = Complex64::i();
    let ea = (i * k * a).exp();
    let ema = (-i * k * a).exp();
    let eb = (i * k * b).exp();
    // unknowns (R, T): M (u(a), u'(a))ᵀ = (u(b), u'(b))ᵀ
    let col_r = [m[0][0] * ema - m[0][1] * i * k * ema, m[1][0] * ema - m[1][1] * i * k * ema];
    let col_t = [-eb, -i * k * eb];
    let rhs = [-(m[0][0] * ea + m[0][1] * i * k * ea), -(m[1][0] * ea + m[1][1] * i * k * ea)];
    let det = col_r[0] * col_t[1] - col_t[0] * col_r[1];
    let r = (rhs[0] * col_t[1] - col_t[0] * rhs[1]) / det;
    let t = (col_r[0] * rhs[1] - rhs[0] * col_r[1]) / det;
    Ok((r, t))
}

/// dR⁺(0)(μ) for μ the indicator of (a, b) × (0, 1), monomode.
pub fn explicit_df0(k: f64, a: f64, b: f64) -> Complex64 {
    let i = Complex64::i();
    ((2.0 * i * k * b).exp() - (2.0 * i * k * a).exp()) / 4.0
}

/// Monomode S with R⁺ = r e^{ia}, R⁻ = r e^{ib}, T = ±t e^{i(a+b+π)/2},
/// r = √(1 − t²); symmetric and unitary for every t ∈ [0, 1].
pub fn unitary_symmetric_2x2(t: f64, a: f64, b: f64, negative: bool) -> ScatteringMatrix {
    let r = (1.0 - t * t).max(0.0).sqrt();
    let sign = if negative { -1.0 } else { 1.0 };
    let tt = Complex64::from_polar(sign * t, 0.5 * (a + b + PI));
    ScatteringMatrix::monomode(Complex64::from_polar(r, a), tt, Complex64::from_polar(r, b))
}

/// `count` random unitary symmetric monomode matrices.
pub fn sample_unitary_symmetric_2x2(seed: u64, count: usize) -> Vec<ScatteringMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t = rng.random_range(0.0..=1.0);
            let a = rng.random_range(0.0..2.0 * PI);
            let b = rng.random_range(0.0..2.0 * PI);
            unitary_symmetric_2x2(t, a, b, rng.random_bool(0.5))
        })
        .collect()
}
