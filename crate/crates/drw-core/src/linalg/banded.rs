//! Banded LU factorization with partial pivoting.
//!
//! Storage follows the conventional band layout: an `n`-column array with
//! `ldab = 2*kl + ku + 1` rows, where entry `(r, c)` of the full matrix lives
//! at band row `kl + ku + r - c` of column `c`. The extra `kl` rows at the top
//! absorb fill-in from row interchanges, so the factored upper triangle has
//! effective bandwidth `kl + ku`.
//!
//! The array is column-major (`col * ldab + band_row`) so the inner update
//! loops run over contiguous memory.

use crate::error::{Error, Result};

/// A square banded matrix with `kl` subdiagonals and `ku` superdiagonals.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl BandedMatrix {
    /// Creates a zero matrix of size `n` with the given bandwidths.
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
        }
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Lower bandwidth.
    pub fn kl(&self) -> usize {
        self.kl
    }

    /// Upper bandwidth.
    pub fn ku(&self) -> usize {
        self.ku
    }

    #[inline]
    fn band_index(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.n && c < self.n);
        debug_assert!(
            r + self.ku >= c && c + self.kl >= r,
            "entry ({r}, {c}) outside band kl={}, ku={}",
            self.kl,
            self.ku
        );
        c * self.ldab + (self.kl + self.ku + r - c)
    }

    /// Returns entry `(r, c)`; zero outside the band.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        if r + self.ku < c || c + self.kl < r {
            return 0.0;
        }
        self.ab[self.band_index(r, c)]
    }

    /// Sets entry `(r, c)`. Panics in debug builds if outside the band.
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        let idx = self.band_index(r, c);
        self.ab[idx] = v;
    }

    /// Adds `v` to entry `(r, c)`. Panics in debug builds if outside the band.
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        let idx = self.band_index(r, c);
        self.ab[idx] += v;
    }

    /// Factors the matrix in place as `P * L * U` with partial pivoting.
    ///
    /// Returns an error if an exactly zero pivot is encountered (the matrix
    /// is singular to working precision).
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let ldab = self.ldab;
        let kv = kl + ku; // band row of the diagonal
        let ab = &mut self.ab;
        let mut ipiv = vec![0usize; n];

        // `ju` tracks the last column touched by any row interchange so far;
        // the update loop never needs to look past it.
        let mut ju = 0usize;

        for j in 0..n {
            // Number of subdiagonal entries in column j.
            let km = kl.min(n - 1 - j);

            // Find the pivot: the largest magnitude among rows j..=j+km.
            let col = j * ldab;
            let mut jp = 0usize;
            let mut pmax = ab[col + kv].abs();
            for t in 1..=km {
                let v = ab[col + kv + t].abs();
                if v > pmax {
                    pmax = v;
                    jp = t;
                }
            }
            ipiv[j] = j + jp;

            if pmax == 0.0 {
                return Err(Error::NoConvergence(format!(
                    "banded LU pivot is exactly zero at column {j}; matrix is singular"
                )));
            }

            ju = ju.max((j + ku + jp).min(n - 1));

            // Swap rows j and j+jp across columns j..=ju.
            if jp != 0 {
                for c in j..=ju {
                    let base = c * ldab + kv + j - c;
                    ab.swap(base, base + jp);
                }
            }

            if km > 0 {
                // Scale the subdiagonal of column j by 1/pivot.
                let piv = ab[col + kv];
                let inv = 1.0 / piv;
                for t in 1..=km {
                    ab[col + kv + t] *= inv;
                }

                // Rank-1 update of the trailing submatrix, column by column.
                for c in (j + 1)..=ju {
                    let base = c * ldab + kv + j - c;
                    let ujc = ab[base];
                    if ujc != 0.0 {
                        for t in 1..=km {
                            let m = ab[col + kv + t];
                            ab[base + t] -= m * ujc;
                        }
                    }
                }
            }
        }

        Ok(BandedLu {
            n,
            kl,
            ku,
            ldab,
            ab: self.ab,
            ipiv,
        })
    }
}

/// The factored form `P * L * U` of a banded matrix.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place, overwriting `b` with `x`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n, "right-hand side length mismatch");
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let ldab = self.ldab;
        let kv = kl + ku;
        let ab = &self.ab;

        // Forward: apply interchanges and L⁻¹.
        for j in 0..n {
            let jp = self.ipiv[j];
            if jp != j {
                b.swap(j, jp);
            }
            let km = kl.min(n - 1 - j);
            if km > 0 {
                let bj = b[j];
                if bj != 0.0 {
                    let col = j * ldab;
                    for t in 1..=km {
                        b[j + t] -= ab[col + kv + t] * bj;
                    }
                }
            }
        }

        // Backward: U⁻¹ with effective upper bandwidth kl + ku.
        for j in (0..n).rev() {
            let col = j * ldab;
            b[j] /= ab[col + kv];
            let bj = b[j];
            if bj != 0.0 {
                let lm = (kl + ku).min(j);
                for t in 1..=lm {
                    b[j - t] -= ab[col + kv - t] * bj;
                }
            }
        }
    }
}
