//! Real eigenpair extraction for small dense matrices.
//!
//! The iterative mode solver projects the big sparse operator onto a small
//! Krylov basis and then needs *real* eigenvalues and eigenvectors of the
//! projected matrix. nalgebra supplies the real Schur form; this module walks
//! the quasi-triangular factor, picks out real eigenvalues, and recovers their
//! eigenvectors by guarded back-substitution.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A real eigenvalue and its (unit-norm) eigenvector.
#[derive(Debug, Clone)]
pub struct RealEigenPair {
    pub value: f64,
    pub vector: DVector<f64>,
}

/// Returns all real eigenpairs of `m`, in no particular order.
///
/// Complex-conjugate pairs are skipped. Eigenvectors are computed by
/// back-substitution on the Schur form with small denominators perturbed, so
/// for (near-)defective eigenvalues the residual of a returned pair can be
/// large; callers that care should check `‖m·v − λ·v‖` themselves.
pub fn real_eigenpairs(m: &DMatrix<f64>) -> Result<Vec<RealEigenPair>> {
    assert_eq!(m.nrows(), m.ncols(), "eigenproblem needs a square matrix");
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }

    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-14, 0)
        .ok_or_else(|| Error::NoConvergence("Schur iteration failed to converge".into()))?;
    let (q, t) = schur.unpack();

    // Scale used to guard divisions by (t_jj - lambda).
    let tnorm = t.amax().max(1e-300);
    let tiny = 1e-300f64.max(f64::EPSILON * tnorm);

    let mut pairs = Vec::new();
    let mut k = 0usize;
    while k < n {
        let is_block = k + 1 < n && t[(k + 1, k)] != 0.0;
        if !is_block {
            let lambda = t[(k, k)];
            let y = schur_vector(&t, k, lambda, None);
            push_pair(&mut pairs, &q, lambda, y);
            k += 1;
        } else {
            // 2x2 diagonal block: eigenvalues are the roots of its
            // characteristic polynomial; real only if the discriminant is >= 0.
            let (a, b, c, d) = (t[(k, k)], t[(k, k + 1)], t[(k + 1, k)], t[(k + 1, k + 1)]);
            let half_tr = 0.5 * (a + d);
            let disc = 0.25 * (a - d) * (a - d) + b * c;
            if disc >= 0.0 {
                let s = disc.sqrt();
                for lambda in [half_tr + s, half_tr - s] {
                    // Null direction of the singular 2x2 (block - lambda*I).
                    let r0 = (a - lambda, b);
                    let r1 = (c, d - lambda);
                    let (u, v) = null_direction_2x2(r0, r1, tiny);
                    let y = schur_vector(&t, k, lambda, Some((u, v)));
                    push_pair(&mut pairs, &q, lambda, y);
                }
            }
            k += 2;
        }
    }
    Ok(pairs)
}

/// Unit null-space direction of a (numerically) singular 2x2 matrix given by
/// rows `r0`, `r1`.
fn null_direction_2x2(r0: (f64, f64), r1: (f64, f64), tiny: f64) -> (f64, f64) {
    // Use the row with the larger norm; the null vector is orthogonal to it.
    let n0 = r0.0.abs() + r0.1.abs();
    let n1 = r1.0.abs() + r1.1.abs();
    let (p, q) = if n0 >= n1 { r0 } else { r1 };
    if p.abs() + q.abs() <= tiny {
        return (1.0, 0.0);
    }
    let norm = (p * p + q * q).sqrt();
    (-q / norm, p / norm)
}

/// Solves `(T - lambda I) y = 0` for an eigenvalue sitting at diagonal
/// position `k` of the quasi-triangular `T`. When `lambda` belongs to a 2x2
/// block starting at `k`, `pivot2` supplies the null direction within the
/// block; otherwise the pivot is the scalar entry `y[k] = 1`.
fn schur_vector(t: &DMatrix<f64>, k: usize, lambda: f64, pivot2: Option<(f64, f64)>) -> DVector<f64> {
    let n = t.nrows();
    let tnorm = t.amax().max(1e-300);
    let tiny = 1e-300f64.max(f64::EPSILON * tnorm);

    let mut y = DVector::<f64>::zeros(n);
    let top; // first row above the pivot block
    match pivot2 {
        None => {
            y[k] = 1.0;
            top = k;
        }
        Some((u, v)) => {
            y[k] = u;
            y[k + 1] = v;
            top = k;
        }
    }

    // Back-substitute rows above the pivot, honoring 2x2 blocks.
    let mut j = top;
    while j > 0 {
        let jr = j - 1; // row being solved
        let two_by_two = jr > 0 && t[(jr, jr - 1)] != 0.0;
        if !two_by_two {
            let mut r = 0.0;
            for l in (jr + 1)..n {
                r += t[(jr, l)] * y[l];
            }
            let mut den = t[(jr, jr)] - lambda;
            if den.abs() < tiny {
                den = if den < 0.0 { -tiny } else { tiny };
            }
            y[jr] = -r / den;
            j -= 1;
        } else {
            let ja = jr - 1;
            let mut ra = 0.0;
            let mut rb = 0.0;
            for l in (jr + 1)..n {
                ra += t[(ja, l)] * y[l];
                rb += t[(jr, l)] * y[l];
            }
            // Solve the 2x2 system [T_blk - lambda I] [ya; yb] = -[ra; rb].
            let a = t[(ja, ja)] - lambda;
            let b = t[(ja, jr)];
            let c = t[(jr, ja)];
            let d = t[(jr, jr)] - lambda;
            let mut det = a * d - b * c;
            if det.abs() < tiny * (a.abs() + b.abs() + c.abs() + d.abs()).max(tiny) {
                det = if det < 0.0 {
                    -tiny * tnorm
                } else {
                    tiny * tnorm
                };
            }
            y[ja] = (-ra * d + rb * b) / det;
            y[jr] = (-rb * a + ra * c) / det;
            j -= 2;
        }
    }
    y
}

fn push_pair(pairs: &mut Vec<RealEigenPair>, q: &DMatrix<f64>, lambda: f64, y: DVector<f64>) {
    let mut x = q * y;
    let norm = x.norm();
    if norm > 0.0 {
        x /= norm;
    }
    pairs.push(RealEigenPair { value: lambda, vector: x });
}
