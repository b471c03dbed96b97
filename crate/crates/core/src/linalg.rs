//! Banded complex LU with partial pivoting.
//!
//! The Liouvillian in the `m·(c+1)+n` ordering couples only entries whose
//! flattened indices differ by at most about `2(c+1)`, so a band solver is
//! enough for cutoffs in the hundreds without pulling in LAPACK.

// Band storage is addressed by explicit row and column offsets.
#![allow(clippy::needless_range_loop)]

use crate::error::{KerrError, Result};
use crate::C64;

/// Square band matrix with `lower` subdiagonals and `upper` superdiagonals.
/// Storage leaves room for the `lower` extra superdiagonals created by
/// row interchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = 2 * lower + upper + 1;
        Self { n, lower, upper, width, data: vec![C64::new(0.0, 0.0); n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.lower < i || j > i + self.lower + self.upper {
            None
        } else {
            Some(i * self.width + (j + self.lower - i))
        }
    }

    /// Entry (i, j); zero outside the stored band.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.slot(i, j).map(|s| self.data[s]).unwrap_or_default()
    }

    /// Add `v` to entry (i, j). Panics if (i, j) lies outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        assert!(
            j + self.lower >= i && j <= i + self.upper,
            "entry ({i}, {j}) outside band ({}, {})",
            self.lower,
            self.upper
        );
        let s = self.slot(i, j).expect("checked above");
        self.data[s] += v;
    }

    /// Overwrite row `i` with zeros and put `v` at column `j`.
    pub fn set_unit_row(&mut self, i: usize, j: usize, v: C64) {
        for x in &mut self.data[i * self.width..(i + 1) * self.width] {
            *x = C64::new(0.0, 0.0);
        }
        self.add(i, j, v);
    }

    /// Subtract `shift` from every diagonal entry.
    pub fn shift_diagonal(&mut self, shift: C64) {
        for i in 0..self.n {
            self.add(i, i, -shift);
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper).min(self.n - 1);
            let mut acc = C64::new(0.0, 0.0);
            for j in lo..=hi {
                acc += self.get(i, j) * x[j];
            }
            *yi = acc;
        }
        y
    }

    /// Factor in place. Errors with `Singular` on an exactly zero pivot.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.lower;
        let span = self.lower + self.upper;
        let mut perm = vec![0usize; n];
        let mut pmin = f64::INFINITY;
        let mut pmax: f64 = 0.0;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).norm();
            for i in k + 1..=last_row {
                let v = self.get(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            perm[k] = p;
            if best == 0.0 || !best.is_finite() {
                return Err(KerrError::Singular(format!("zero pivot at column {k}")));
            }
            pmin = pmin.min(best);
            pmax = pmax.max(best);
            let last_col = (k + span).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = self.slot(k, j).expect("in band");
                    let b = self.slot(p, j).expect("in band");
                    self.data.swap(a, b);
                }
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last_row {
                let si = self.slot(i, k).expect("in band");
                let factor = self.data[si] / pivot;
                self.data[si] = factor;
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                // Rows are stored contiguously, so the update is a slice axpy.
                let len = last_col - k;
                let ks = self.slot(k, k + 1).expect("in band");
                let is = self.slot(i, k + 1).expect("in band");
                let (head, tail) = self.data.split_at_mut(is);
                let src = &head[ks..ks + len];
                for (d, u) in tail[..len].iter_mut().zip(src) {
                    *d -= factor * u;
                }
            }
        }
        Ok(BandLu { lu: self, perm, pivot_min: pmin, pivot_max: pmax })
    }
}

/// Factorization produced by [`BandMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
    perm: Vec<usize>,
    pivot_min: f64,
    pivot_max: f64,
}

impl BandLu {
    /// Smallest over largest pivot magnitude; a cheap conditioning signal.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_min / self.pivot_max
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.n;
        let kl = self.lu.lower;
        let span = self.lu.lower + self.lu.upper;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.perm[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk == C64::new(0.0, 0.0) {
                continue;
            }
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= self.lu.get(i, k) * xk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for j in k + 1..=(k + span).min(n - 1) {
                acc -= self.lu.get(k, j) * x[j];
            }
            x[k] = acc / self.lu.get(k, k);
        }
        x
    }
}
