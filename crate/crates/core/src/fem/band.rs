//! Complex banded LU factorisation with partial pivoting.
//!
//! Rows are stored contiguously; row i holds columns i−kl ..= i+kl+ku so
//! the fill produced by row interchanges fits in place.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, width, data: vec![Complex64::new(0.0, 0.0); n * width] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// # Panics
    /// If (i, j) lies outside the band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let o = self.offset(i, j);
        self.data[o] += v;
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                let j0 = i.saturating_sub(self.kl);
                let j1 = (i + self.ku).min(self.n - 1);
                (j0..=j1).map(|j| self.data[self.offset(i, j)] * x[j]).sum()
            })
            .collect()
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// Gaussian elimination with partial pivoting.
    ///
    /// SolverError when a pivot is negligible relative to the largest entry.
    pub fn factorize(mut self) -> Result<BandLu> {
        let (n, kl, ku, w) = (self.n, self.kl, self.ku, self.width);
        let scale = self.max_abs();
        if n == 0 || scale == 0.0 || !scale.is_finite() {
            return Err(Error::Solver("matrix is empty, zero or not finite".into()));
        }
        let tiny = scale * f64::EPSILON * 16.0;
        let mut lower = vec![Complex64::new(0.0, 0.0); n * kl.max(1)];
        let mut piv = vec![0usize; n];
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot: f64 = 0.0;
        for k in 0..n {
            let rmax = (k + kl).min(n - 1);
            let cmax = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = l1(self.data[self.offset(k, k)]);
            for r in k + 1..=rmax {
                let v = l1(self.data[self.offset(r, k)]);
                if v > best {
                    best = v;
                    p = r;
                }
            }
            piv[k] = p;
            if p != k {
                let (ok, op) = (self.offset(k, k), self.offset(p, k));
                let len = cmax - k + 1;
                let (head, tail) = self.data.split_at_mut(op);
                head[ok..ok + len].swap_with_slice(&mut tail[..len]);
            }
            let pivot = self.data[self.offset(k, k)];
            let pn = pivot.norm();
            if !(pn > tiny) {
                return Err(Error::Solver(format!(
                    "negligible pivot {pn:.3e} at row {k} (matrix scale {scale:.3e}); possible trapped mode or cutoff"
                )));
            }
            min_pivot = min_pivot.min(pn);
            max_pivot = max_pivot.max(pn);
            let inv = pivot.inv();
            let len = cmax - k;
            let start_k = self.offset(k, k + 1);
            for r in k + 1..=rmax {
                let ork = self.offset(r, k);
                let l = self.data[ork] * inv;
                lower[k * kl + (r - k - 1)] = l;
                self.data[ork] = Complex64::new(0.0, 0.0);
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                let start_r = self.offset(r, k + 1);
                let (head, tail) = self.data.split_at_mut(r * w);
                let src = &head[start_k..start_k + len];
                let dst = &mut tail[start_r - r * w..start_r - r * w + len];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= l * s;
                }
            }
        }
        Ok(BandLu { a: self, lower, piv, pivot_ratio: min_pivot / max_pivot })
    }
}

#[inline]
fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Factorisation P A = L U in band storage.
#[derive(Clone, Debug)]
pub struct BandLu {
    a: BandMatrix,
    lower: Vec<Complex64>,
    piv: Vec<usize>,
    pivot_ratio: f64,
}

impl BandLu {
    pub fn n(&self) -> usize {
        self.a.n
    }

    /// min |u_kk| / max |u_kk|, a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let a = &self.a;
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk.re == 0.0 && xk.im == 0.0 {
                continue;
            }
            let rmax = (k + kl).min(n - 1);
            let lk = &self.lower[k * kl..k * kl + (rmax - k)];
            for (xr, l) in x[k + 1..=rmax].iter_mut().zip(lk) {
                *xr -= l * xk;
            }
        }
        for k in (0..n).rev() {
            let cmax = (k + kl + ku).min(n - 1);
            let row = &a.data[a.offset(k, k)..=a.offset(k, cmax)];
            let mut s = x[k];
            for (c, xj) in row[1..].iter().zip(&x[k + 1..=cmax]) {
                s -= c * xj;
            }
            x[k] = s / row[0];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> BandMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                a.add(i, j, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        a
    }

    #[test]
    fn solves_random_systems() {
        for (n, kl, ku, seed) in [(1, 0, 0, 1), (7, 2, 3, 2), (50, 5, 5, 3), (120, 9, 4, 4), (30, 0, 6, 5)] {
            let a = random_band(n, kl, ku, seed);
            let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0 - i as f64 * 0.5)).collect();
            let b = a.mul_vec(&x);
            let lu = a.clone().factorize().unwrap();
            let y = lu.solve(&b);
            let err = x.iter().zip(&y).fold(0.0f64, |m, (u, v)| m.max((u - v).norm()));
            assert!(err < 1e-9 * n as f64, "n={n}: {err}");
        }
    }

    #[test]
    fn requires_pivoting() {
        // zero leading entry forces a row swap
        let mut a = BandMatrix::zeros(3, 1, 1);
        a.add(0, 1, Complex64::new(1.0, 0.0));
        a.add(1, 0, Complex64::new(2.0, 0.0));
        a.add(1, 1, Complex64::new(1.0, 0.0));
        a.add(1, 2, Complex64::new(1.0, 1.0));
        a.add(2, 1, Complex64::new(3.0, 0.0));
        a.add(2, 2, Complex64::new(0.5, 0.0));
        let x = vec![Complex64::new(1.0, 2.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 3.0)];
        let b = a.mul_vec(&x);
        let y = a.factorize().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn singular_is_reported() {
        let mut a = BandMatrix::zeros(2, 1, 1);
        a.add(0, 0, Complex64::new(1.0, 0.0));
        a.add(0, 1, Complex64::new(2.0, 0.0));
        a.add(1, 0, Complex64::new(2.0, 0.0));
        a.add(1, 1, Complex64::new(4.0, 0.0));
        assert!(matches!(a.factorize(), Err(Error::Solver(_))));
    }
}
