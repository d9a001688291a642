//! Scattering matrix S = (R⁺ T⁺; T⁻ R⁻).
//!
//! Row α is the incident field: α = m for u_m^+ and α = N + m for u_m^−.
//! Column β labels the outgoing mode in the same order, so row m of the
//! first block row reads (R⁺_{m·}, T⁺_{m·}).

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::model::modes::Direction;

/// The four N×N blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    RPlus,
    TPlus,
    TMinus,
    RMinus,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::RPlus, Block::TPlus, Block::TMinus, Block::RMinus];

    pub fn label(self) -> &'static str {
        match self {
            Block::RPlus => "R+",
            Block::TPlus => "T+",
            Block::TMinus => "T-",
            Block::RMinus => "R-",
        }
    }

    /// Offsets (row, column) of the block inside the 2N×2N matrix.
    pub fn offset(self, n: usize) -> (usize, usize) {
        match self {
            Block::RPlus => (0, 0),
            Block::TPlus => (0, n),
            Block::TMinus => (n, 0),
            Block::RMinus => (n, n),
        }
    }
}

/// Global index of the incident field u_m^±.
pub fn field_index(n: usize, m: usize, dir: Direction) -> usize {
    match dir {
        Direction::Plus => m,
        Direction::Minus => n + m,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringMatrix {
    n: usize,
    entries: DMatrix<Complex64>,
}

impl ScatteringMatrix {
    /// Wraps a 2N×2N matrix.
    ///
    /// # Panics
    /// If `entries` is not 2N×2N.
    pub fn new(n: usize, entries: DMatrix<Complex64>) -> Self {
        assert_eq!(entries.shape(), (2 * n, 2 * n), "scattering matrix must be 2N x 2N");
        ScatteringMatrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        ScatteringMatrix { n, entries: DMatrix::identity(2 * n, 2 * n) }
    }

    /// Matrix of the empty guide: R^± = 0, T^± = Id, i.e. (0 Id; Id 0).
    pub fn transparent(n: usize) -> Self {
        let mut e = DMatrix::zeros(2 * n, 2 * n);
        for m in 0..n {
            e[(m, n + m)] = Complex64::new(1.0, 0.0);
            e[(n + m, m)] = Complex64::new(1.0, 0.0);
        }
        ScatteringMatrix { n, entries: e }
    }

    pub fn zeros(n: usize) -> Self {
        ScatteringMatrix { n, entries: DMatrix::zeros(2 * n, 2 * n) }
    }

    /// Builds the monomode matrix from (R⁺, T, R⁻).
    pub fn monomode(r_plus: Complex64, t: Complex64, r_minus: Complex64) -> Self {
        let e = DMatrix::from_row_slice(2, 2, &[r_plus, t, t, r_minus]);
        ScatteringMatrix { n: 1, entries: e }
    }

    /// Number of propagating modes N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn entry(&self, block: Block, m: usize, n: usize) -> Complex64 {
        let (r, c) = block.offset(self.n);
        self.entries[(r + m, c + n)]
    }

    pub fn r_plus(&self, m: usize, n: usize) -> Complex64 {
        self.entry(Block::RPlus, m, n)
    }

    pub fn t_plus(&self, m: usize, n: usize) -> Complex64 {
        self.entry(Block::TPlus, m, n)
    }

    pub fn t_minus(&self, m: usize, n: usize) -> Complex64 {
        self.entry(Block::TMinus, m, n)
    }

    pub fn r_minus(&self, m: usize, n: usize) -> Complex64 {
        self.entry(Block::RMinus, m, n)
    }

    pub fn block(&self, block: Block) -> DMatrix<Complex64> {
        let (r, c) = block.offset(self.n);
        self.entries.view((r, c), (self.n, self.n)).clone_owned()
    }

    /// max |S_ij − S_ji|.
    pub fn symmetry_residual(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.transpose()))
    }

    /// max |(S S̄ᵀ − Id)_ij|.
    pub fn unitarity_residual(&self) -> f64 {
        let p = &self.entries * self.entries.adjoint();
        max_abs(&(p - DMatrix::<Complex64>::identity(2 * self.n, 2 * self.n)))
    }

    /// max |S_ij − S_ij(0)|, distance to the empty-guide matrix.
    pub fn distance_to_transparent(&self) -> f64 {
        self.max_abs_diff(&ScatteringMatrix::transparent(self.n))
    }

    /// max |S_ij − other_ij|.
    pub fn max_abs_diff(&self, other: &ScatteringMatrix) -> f64 {
        max_abs(&(&self.entries - &other.entries))
    }

    /// CSV with header `block,m,n,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("block,m,n,re,im\n");
        for b in Block::ALL {
            for m in 0..self.n {
                for n in 0..self.n {
                    let z = self.entry(b, m, n);
                    let _ = writeln!(out, "{},{},{},{:.17e},{:.17e}", b.label(), m, n, z.re, z.im);
                }
            }
        }
        out
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_layout() {
        let mut e = DMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                e[(i, j)] = Complex64::new((10 * i + j) as f64, 0.0);
            }
        }
        let s = ScatteringMatrix::new(2, e);
        assert_eq!(s.r_plus(1, 0).re, 10.0);
        assert_eq!(s.t_plus(0, 1).re, 3.0);
        assert_eq!(s.t_minus(1, 1).re, 31.0);
        assert_eq!(s.r_minus(0, 0).re, 22.0);
        assert_eq!(field_index(2, 1, Direction::Minus), 3);
    }

    #[test]
    fn transparent_residuals() {
        let s = ScatteringMatrix::transparent(3);
        assert_eq!(s.symmetry_residual(), 0.0);
        assert_eq!(s.unitarity_residual(), 0.0);
        assert_eq!(s.distance_to_transparent(), 0.0);
        assert_eq!(s.t_plus(2, 2), Complex64::new(1.0, 0.0));
        assert_eq!(s.r_minus(1, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn csv_rows() {
        let s = ScatteringMatrix::transparent(2);
        let csv = s.to_csv();
        assert_eq!(csv.lines().count(), 1 + 16);
        let row = csv.lines().find(|l| l.starts_with("T+,1,1,")).unwrap();
        let re: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(re, 1.0);
    }
}
