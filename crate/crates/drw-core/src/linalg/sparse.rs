//! Sparse matrices stored as sorted row lists.
//!
//! The finite-difference operators assembled here have a handful of entries
//! per row, so a `Vec<Vec<(col, value)>>` representation is compact, fast to
//! build, and easy to multiply. Products of two such matrices (needed to form
//! the mode-solver system matrix) use a generation-marked dense accumulator so
//! each output row costs `O(nnz)`.

use crate::linalg::banded::BandedMatrix;

/// Sparse matrix with per-row sorted `(column, value)` lists.
#[derive(Debug, Clone)]
pub struct RowMat {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<(u32, f64)>>,
}

impl RowMat {
    /// Creates an all-zero matrix.
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        assert!(n_rows < u32::MAX as usize && n_cols < u32::MAX as usize);
        Self {
            n_rows,
            n_cols,
            rows: vec![Vec::new(); n_rows],
        }
    }

    /// Creates the identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].push((i as u32, 1.0));
        }
        m
    }

    /// Creates a diagonal matrix from `d`.
    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            if v != 0.0 {
                m.rows[i].push((i as u32, v));
            }
        }
        m
    }

    /// Number of rows.
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// Number of columns.
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Total number of stored entries.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Adds `v` to entry `(r, c)`, inserting it if absent.
    pub fn insert_add(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r < self.n_rows && c < self.n_cols);
        let row = &mut self.rows[r];
        let c = c as u32;
        match row.binary_search_by_key(&c, |&(col, _)| col) {
            Ok(pos) => row[pos].1 += v,
            Err(pos) => row.insert(pos, (c, v)),
        }
    }

    /// Returns entry `(r, c)` (zero if absent).
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let c = c as u32;
        match self.rows[r].binary_search_by_key(&c, |&(col, _)| col) {
            Ok(pos) => self.rows[r][pos].1,
            Err(_) => 0.0,
        }
    }

    /// Iterates over the entries of row `r`.
    pub fn row(&self, r: usize) -> &[(u32, f64)] {
        &self.rows[r]
    }

    /// Multiplies every entry by `s`.
    pub fn scale(&mut self, s: f64) {
        for row in &mut self.rows {
            for e in row.iter_mut() {
                e.1 *= s;
            }
        }
    }

    /// Scales row `i` by `d[i]` (left multiplication by `diag(d)`).
    pub fn scale_rows(&mut self, d: &[f64]) {
        assert_eq!(d.len(), self.n_rows);
        for (row, &s) in self.rows.iter_mut().zip(d) {
            for e in row.iter_mut() {
                e.1 *= s;
            }
        }
    }

    /// Scales column `j` by `d[j]` (right multiplication by `diag(d)`).
    pub fn scale_cols(&mut self, d: &[f64]) {
        assert_eq!(d.len(), self.n_cols);
        for row in &mut self.rows {
            for e in row.iter_mut() {
                e.1 *= d[e.0 as usize];
            }
        }
    }

    /// Adds `s` to every diagonal entry.
    pub fn add_diag(&mut self, s: f64) {
        let n = self.n_rows.min(self.n_cols);
        for i in 0..n {
            self.insert_add(i, i, s);
        }
    }

    /// Adds `s * other` to `self` (dimensions must match).
    pub fn add_scaled(&mut self, other: &RowMat, s: f64) {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        for r in 0..self.n_rows {
            if other.rows[r].is_empty() {
                continue;
            }
            let mut merged =
                Vec::with_capacity(self.rows[r].len() + other.rows[r].len());
            let (a, b) = (&self.rows[r], &other.rows[r]);
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                    merged.push(a[i]);
                    i += 1;
                } else if i >= a.len() || b[j].0 < a[i].0 {
                    merged.push((b[j].0, s * b[j].1));
                    j += 1;
                } else {
                    merged.push((a[i].0, a[i].1 + s * b[j].1));
                    i += 1;
                    j += 1;
                }
            }
            self.rows[r] = merged;
        }
    }

    /// Returns the transpose.
    pub fn transpose(&self) -> RowMat {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); self.n_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                rows[c as usize].push((r as u32, v));
            }
        }
        RowMat {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            rows,
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &RowMat) -> RowMat {
        assert_eq!(self.n_cols, rhs.n_rows, "dimension mismatch in product");
        let mut out_rows: Vec<Vec<(u32, f64)>> = Vec::with_capacity(self.n_rows);
        let mut acc = vec![0.0f64; rhs.n_cols];
        // Generation marker: mark[c] == r means column c is live in row r.
        let mut mark = vec![u32::MAX; rhs.n_cols];
        let mut touched: Vec<u32> = Vec::new();

        for r in 0..self.n_rows {
            let gen = r as u32;
            touched.clear();
            for &(k, v) in &self.rows[r] {
                for &(c, w) in &rhs.rows[k as usize] {
                    let cu = c as usize;
                    if mark[cu] != gen {
                        mark[cu] = gen;
                        acc[cu] = 0.0;
                        touched.push(c);
                    }
                    acc[cu] += v * w;
                }
            }
            touched.sort_unstable();
            let mut row = Vec::with_capacity(touched.len());
            for &c in &touched {
                let v = acc[c as usize];
                if v != 0.0 {
                    row.push((c, v));
                }
            }
            out_rows.push(row);
        }

        RowMat {
            n_rows: self.n_rows,
            n_cols: rhs.n_cols,
            rows: out_rows,
        }
    }

    /// Computes `y = self * x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        for (r, row) in self.rows.iter().enumerate() {
            let mut s = 0.0;
            for &(c, v) in row {
                s += v * x[c as usize];
            }
            y[r] = s;
        }
    }

    /// Interleaves four equally sized square blocks into one matrix with
    /// unknown ordering `u = 2 * cell + component`, which keeps the bandwidth
    /// of difference operators tight. `None` blocks are zero.
    pub fn interleave2(blocks: [[Option<&RowMat>; 2]; 2]) -> RowMat {
        let n = blocks
            .iter()
            .flatten()
            .flatten()
            .map(|m| m.n_rows)
            .next()
            .expect("at least one block required");
        for m in blocks.iter().flatten().flatten() {
            assert_eq!(m.n_rows, n);
            assert_eq!(m.n_cols, n);
        }

        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); 2 * n];
        for cell in 0..n {
            for comp_r in 0..2 {
                let out = &mut rows[2 * cell + comp_r];
                for comp_c in 0..2 {
                    if let Some(m) = blocks[comp_r][comp_c] {
                        for &(c, v) in &m.rows[cell] {
                            out.push((2 * c + comp_c as u32, v));
                        }
                    }
                }
                out.sort_unstable_by_key(|&(c, _)| c);
            }
        }

        RowMat {
            n_rows: 2 * n,
            n_cols: 2 * n,
            rows,
        }
    }

    /// Returns `(kl, ku)`: the widest lower and upper band actually used.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0usize;
        let mut ku = 0usize;
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, _) in row {
                let c = c as usize;
                if r > c {
                    kl = kl.max(r - c);
                } else {
                    ku = ku.max(c - r);
                }
            }
        }
        (kl, ku)
    }

    /// Converts `self - sigma * I` to banded storage, sized from the actual
    /// bandwidths. The matrix must be square.
    pub fn to_banded_shifted(&self, sigma: f64) -> BandedMatrix {
        assert_eq!(self.n_rows, self.n_cols, "banded storage needs a square matrix");
        let (kl, ku) = self.bandwidths();
        let mut bm = BandedMatrix::new(self.n_rows, kl, ku);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                bm.add(r, c as usize, v);
            }
        }
        if sigma != 0.0 {
            for i in 0..self.n_rows {
                bm.add(i, i, -sigma);
            }
        }
        bm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rng::SplitMix64;

    fn random_sparse(n_rows: usize, n_cols: usize, per_row: usize, seed: u64) -> RowMat {
        let mut rng = SplitMix64::new(seed);
        let mut m = RowMat::zeros(n_rows, n_cols);
        for r in 0..n_rows {
            for _ in 0..per_row {
                let c = (rng.next_u64() as usize) % n_cols;
                m.insert_add(r, c, rng.next_f64() - 0.5);
            }
        }
        m
    }

    fn to_dense(m: &RowMat) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; m.n_cols()]; m.n_rows()];
        for r in 0..m.n_rows() {
            for &(c, v) in m.row(r) {
                d[r][c as usize] += v;
            }
        }
        d
    }

    #[test]
    fn product_matches_dense_reference() {
        let a = random_sparse(17, 23, 4, 1);
        let b = random_sparse(23, 11, 3, 2);
        let c = a.mul(&b);
        let (da, db, dc) = (to_dense(&a), to_dense(&b), to_dense(&c));
        for r in 0..17 {
            for j in 0..11 {
                let mut s = 0.0;
                for k in 0..23 {
                    s += da[r][k] * db[k][j];
                }
                assert!((s - dc[r][j]).abs() < 1e-12, "({r},{j}): {s} vs {}", dc[r][j]);
            }
        }
    }

    #[test]
    fn rows_stay_sorted_and_unique() {
        let m = random_sparse(40, 40, 6, 3).mul(&random_sparse(40, 40, 6, 4));
        for r in 0..m.n_rows() {
            let row = m.row(r);
            for w in row.windows(2) {
                assert!(w[0].0 < w[1].0, "row {r} not strictly sorted");
            }
        }
    }

    #[test]
    fn matvec_matches_dense() {
        let a = random_sparse(15, 9, 3, 5);
        let mut rng = SplitMix64::new(6);
        let mut x = vec![0.0; 9];
        rng.fill_centered(&mut x);
        let mut y = vec![0.0; 15];
        a.matvec(&x, &mut y);
        let da = to_dense(&a);
        for r in 0..15 {
            let s: f64 = (0..9).map(|c| da[r][c] * x[c]).sum();
            assert!((s - y[r]).abs() < 1e-12);
        }
    }

    #[test]
    fn transpose_round_trip() {
        let a = random_sparse(12, 7, 3, 7);
        let att = a.transpose().transpose();
        for r in 0..12 {
            assert_eq!(a.row(r), att.row(r));
        }
    }

    #[test]
    fn add_scaled_matches_dense() {
        let mut a = random_sparse(10, 10, 3, 8);
        let b = random_sparse(10, 10, 3, 9);
        let (da, db) = (to_dense(&a), to_dense(&b));
        a.add_scaled(&b, 2.5);
        let dc = to_dense(&a);
        for r in 0..10 {
            for c in 0..10 {
                assert!((dc[r][c] - (da[r][c] + 2.5 * db[r][c])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn interleave_places_blocks() {
        let mut p11 = RowMat::zeros(3, 3);
        p11.insert_add(0, 1, 2.0);
        let mut p12 = RowMat::zeros(3, 3);
        p12.insert_add(2, 0, -3.0);
        let m = RowMat::interleave2([[Some(&p11), Some(&p12)], [None, None]]);
        assert_eq!(m.n_rows(), 6);
        // Block (0,0) entry (0,1) lands at (2*0+0, 2*1+0) = (0, 2).
        assert_eq!(m.get(0, 2), 2.0);
        // Block (0,1) entry (2,0) lands at (2*2+0, 2*0+1) = (4, 1).
        assert_eq!(m.get(4, 1), -3.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn banded_conversion_preserves_entries_and_shift() {
        let a = random_sparse(20, 20, 4, 10);
        let bm = a.to_banded_shifted(1.25);
        for r in 0..20 {
            for c in 0..20 {
                let want = a.get(r, c) - if r == c { 1.25 } else { 0.0 };
                assert!(
                    (bm.get(r, c) - want).abs() < 1e-14,
                    "({r},{c}): {} vs {}",
                    bm.get(r, c),
                    want
                );
            }
        }
    }

    #[test]
    fn identity_and_diag_behave() {
        let i3 = RowMat::identity(3);
        let d = RowMat::diag(&[2.0, 0.0, -1.0]);
        let p = i3.mul(&d);
        assert_eq!(p.get(0, 0), 2.0);
        assert_eq!(p.get(1, 1), 0.0);
        assert_eq!(p.get(2, 2), -1.0);
        let (kl, ku) = p.bandwidths();
        assert_eq!((kl, ku), (0, 0));
    }
}
