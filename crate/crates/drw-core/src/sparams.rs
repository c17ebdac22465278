//! Scattering-parameter containers and composition algebra: frequency-swept
//! two-ports, reciprocity/passivity checks, and Redheffer star products for
//! both scalar two-ports and block (multimode) two-ports.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default port reference impedance, Ω.
pub const DEFAULT_Z_REF: f64 = 50.0;

/// A two-port scattering matrix swept over frequency, single-mode ports,
/// all entries referenced to `z_ref`.
#[derive(Debug, Clone)]
pub struct SParameterSet {
    /// Hz, strictly increasing.
    pub frequencies: Vec<f64>,
    /// Port reference impedance, Ω.
    pub z_ref: f64,
    /// One 2×2 matrix per frequency: `matrices[fi][i][j]` = S_(i+1)(j+1).
    pub matrices: Vec<[[Complex64; 2]; 2]>,
}

impl SParameterSet {
    pub fn new(
        frequencies: Vec<f64>,
        matrices: Vec<[[Complex64; 2]; 2]>,
        z_ref: f64,
    ) -> Result<Self> {
        if frequencies.len() != matrices.len() {
            return Err(Error::InvalidInput(format!(
                "{} frequencies vs {} matrices",
                frequencies.len(),
                matrices.len()
            )));
        }
        if frequencies.is_empty() {
            return Err(Error::InvalidInput("empty S-parameter set".into()));
        }
        if frequencies.windows(2).any(|w| !(w[1] > w[0])) || !(frequencies[0] > 0.0) {
            return Err(Error::InvalidInput(
                "frequencies must be positive and strictly increasing".into(),
            ));
        }
        if !(z_ref > 0.0) || !z_ref.is_finite() {
            return Err(Error::InvalidInput(format!(
                "reference impedance must be > 0, got {z_ref}"
            )));
        }
        Ok(Self {
            frequencies,
            z_ref,
            matrices,
        })
    }

    /// A matched, reciprocal through element: S11 = S22 = 0,
    /// S21 = S12 = the given transfer.
    pub fn from_transfer(frequencies: Vec<f64>, s21: Vec<Complex64>) -> Result<Self> {
        if frequencies.len() != s21.len() {
            return Err(Error::InvalidInput(format!(
                "{} frequencies vs {} transfer samples",
                frequencies.len(),
                s21.len()
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let matrices = s21.iter().map(|&t| [[zero, t], [t, zero]]).collect();
        Self::new(frequencies, matrices, DEFAULT_Z_REF)
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// S_(i+1)(j+1) at frequency index `fi` (i, j ∈ {0, 1}).
    pub fn s(&self, fi: usize, i: usize, j: usize) -> Complex64 {
        self.matrices[fi][i][j]
    }

    /// Insertion loss −20·log₁₀|S21| at `fi`, dB.
    pub fn insertion_loss_db(&self, fi: usize) -> f64 {
        -20.0 * self.matrices[fi][1][0].norm().log10()
    }

    /// Return loss −20·log₁₀|S11| at `fi`, dB.
    pub fn return_loss_db(&self, fi: usize) -> f64 {
        -20.0 * self.matrices[fi][0][0].norm().log10()
    }

    /// Worst |S12 − S21| over the sweep.
    pub fn max_reciprocity_error(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| (m[0][1] - m[1][0]).norm())
            .fold(0.0, f64::max)
    }

    /// Worst σ_max(S) − 1 over the sweep (≤ 0 for a passive network).
    pub fn max_passivity_excess(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| largest_singular_value_2x2(m) - 1.0)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_reciprocal(&self, tol: f64) -> bool {
        self.max_reciprocity_error() <= tol
    }

    pub fn is_passive(&self, tol: f64) -> bool {
        self.max_passivity_excess() <= tol
    }

    /// Redheffer star of `self` (ports 1→2) followed by `next`, per
    /// frequency. Frequencies and references must match.
    pub fn cascade(&self, next: &SParameterSet) -> Result<SParameterSet> {
        if self.frequencies.len() != next.frequencies.len()
            || self
                .frequencies
                .iter()
                .zip(&next.frequencies)
                .any(|(a, b)| (a - b).abs() > 1e-6 * a.abs())
            || (self.z_ref - next.z_ref).abs() > 1e-12 * self.z_ref
        {
            return Err(Error::IncompatibleGrids);
        }
        let matrices = self
            .matrices
            .iter()
            .zip(&next.matrices)
            .map(|(a, b)| star_2port(a, b))
            .collect();
        SParameterSet::new(self.frequencies.clone(), matrices, self.z_ref)
    }
}

/// σ_max of a 2×2 complex matrix, from the eigenvalues of SᴴS
/// (closed form — no iteration).
pub fn largest_singular_value_2x2(m: &[[Complex64; 2]; 2]) -> f64 {
    // Gram matrix G = SᴴS is Hermitian 2×2: σ_max² is its larger eigenvalue
    let g11 = m[0][0].norm_sqr() + m[1][0].norm_sqr();
    let g22 = m[0][1].norm_sqr() + m[1][1].norm_sqr();
    let g12 = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
    let tr = g11 + g22;
    let disc = (0.25 * (g11 - g22) * (g11 - g22) + g12.norm_sqr()).sqrt();
    (0.5 * tr + disc).max(0.0).sqrt()
}

/// Redheffer star of two scalar two-ports (left's port 2 into right's
/// port 1).
pub fn star_2port(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    let d = one / (one - b[0][0] * a[1][1]);
    [
        [
            a[0][0] + a[0][1] * d * b[0][0] * a[1][0],
            a[0][1] * d * b[0][1],
        ],
        [
            b[1][0] * d * a[1][0],
            b[1][1] + b[1][0] * d * a[1][1] * b[0][1],
        ],
    ]
}

/// A two-port whose "ports" carry several modes each: four n×n blocks.
/// The workhorse of mode-matching cascades.
#[derive(Debug, Clone)]
pub struct BlockTwoPort {
    pub s11: DMatrix<Complex64>,
    pub s12: DMatrix<Complex64>,
    pub s21: DMatrix<Complex64>,
    pub s22: DMatrix<Complex64>,
}

impl BlockTwoPort {
    /// Ports may carry different mode counts: with `nl` modes on port 1 and
    /// `nr` on port 2, `s11` is nl×nl, `s22` nr×nr, `s12` nl×nr, `s21` nr×nl.
    pub fn new(
        s11: DMatrix<Complex64>,
        s12: DMatrix<Complex64>,
        s21: DMatrix<Complex64>,
        s22: DMatrix<Complex64>,
    ) -> Result<Self> {
        let nl = s11.nrows();
        let nr = s22.nrows();
        for (name, m, rows, cols) in [
            ("s11", &s11, nl, nl),
            ("s12", &s12, nl, nr),
            ("s21", &s21, nr, nl),
            ("s22", &s22, nr, nr),
        ] {
            if m.nrows() != rows || m.ncols() != cols {
                return Err(Error::InvalidInput(format!(
                    "{name} must be {rows}×{cols}, got {}×{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self { s11, s12, s21, s22 })
    }

    /// Perfect through: zero reflection, identity transmission.
    pub fn identity(n: usize) -> Self {
        let zero = DMatrix::zeros(n, n);
        let eye = DMatrix::identity(n, n);
        Self {
            s11: zero.clone(),
            s12: eye.clone(),
            s21: eye,
            s22: zero,
        }
    }

    /// A uniform propagation section: diag(exp(−jβᵢl)) transmission, no
    /// reflection.
    pub fn phase_section(betas: &[f64], length: f64) -> Self {
        let n = betas.len();
        let mut t = DMatrix::zeros(n, n);
        for (i, &b) in betas.iter().enumerate() {
            t[(i, i)] = Complex64::from_polar(1.0, -b * length);
        }
        Self {
            s11: DMatrix::zeros(n, n),
            s12: t.clone(),
            s21: t,
            s22: DMatrix::zeros(n, n),
        }
    }

    /// Modes on port 1.
    pub fn dim_in(&self) -> usize {
        self.s11.nrows()
    }

    /// Modes on port 2.
    pub fn dim_out(&self) -> usize {
        self.s22.nrows()
    }

    /// The full scattering matrix [[S11, S12], [S21, S22]].
    pub fn as_matrix(&self) -> DMatrix<Complex64> {
        let (nl, nr) = (self.dim_in(), self.dim_out());
        let mut m = DMatrix::zeros(nl + nr, nl + nr);
        m.view_mut((0, 0), (nl, nl)).copy_from(&self.s11);
        m.view_mut((0, nl), (nl, nr)).copy_from(&self.s12);
        m.view_mut((nl, 0), (nr, nl)).copy_from(&self.s21);
        m.view_mut((nl, nl), (nr, nr)).copy_from(&self.s22);
        m
    }

    /// σ_max of the full 2n×2n matrix (≤ 1 for a passive network).
    pub fn largest_singular_value(&self) -> f64 {
        self.as_matrix()
            .singular_values()
            .iter()
            .fold(0.0, |acc, s| acc.max(*s))
    }

    /// Worst entry of |S − Sᵀ| of the full matrix.
    pub fn max_reciprocity_error(&self) -> f64 {
        let m = self.as_matrix();
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..i {
                worst = worst.max((m[(i, j)] - m[(j, i)]).norm());
            }
        }
        worst
    }

    /// Redheffer star: `self`'s port 2 feeds `right`'s port 1. The interface
    /// mode counts must match; the outer ports may differ.
    pub fn star(&self, right: &BlockTwoPort) -> Result<BlockTwoPort> {
        let n = self.dim_out();
        if right.dim_in() != n {
            return Err(Error::InvalidInput(format!(
                "star across a {}-mode / {}-mode interface",
                n,
                right.dim_in()
            )));
        }
        let eye = DMatrix::<Complex64>::identity(n, n);

        // x = (I − B11·A22)⁻¹, y = (I − A22·B11)⁻¹ via LU solves
        let ixa = (&eye - &right.s11 * &self.s22)
            .lu()
            .solve(&eye)
            .ok_or_else(|| {
                Error::NoConvergence("singular interface in star product".into())
            })?;
        let iya = (&eye - &self.s22 * &right.s11)
            .lu()
            .solve(&eye)
            .ok_or_else(|| {
                Error::NoConvergence("singular interface in star product".into())
            })?;

        let s11 = &self.s11 + &self.s12 * &ixa * &right.s11 * &self.s21;
        let s12 = &self.s12 * &ixa * &right.s12;
        let s21 = &right.s21 * &iya * &self.s21;
        let s22 = &right.s22 + &right.s21 * &iya * &self.s22 * &right.s12;
        BlockTwoPort::new(s11, s12, s21, s22)
    }
}

/// Star-reduce a chain of block two-ports, left to right.
pub fn star_chain(sections: &[BlockTwoPort]) -> Result<BlockTwoPort> {
    let first = sections
        .first()
        .ok_or_else(|| Error::InvalidInput("empty cascade".into()))?;
    let mut acc = first.clone();
    for s in &sections[1..] {
        acc = acc.star(s)?;
    }
    Ok(acc)
}
