//! Symmetric eigendecomposition (cyclic Jacobi) and the eigenvalue-based
//! Moore-Penrose pseudoinverse.
//!
//! Matrices in this crate stay small (a few hundred square at most), so a
//! robust Jacobi sweep beats anything fancier.

use crate::matrix::{Matrix, MatrixError};

/// Relative eigenvalue cutoff: anything at or below `REL_TOL * lambda_max`
/// counts as zero when ranking and inverting.
pub const REL_TOL: f64 = 1e-10;

/// Sweep convergence: off-diagonal Frobenius norm relative to the input norm.
const OFF_DIAG_TOL: f64 = 1e-12;

/// Eigenpairs of a symmetric matrix, eigenvalues sorted descending.
/// Column `i` of `eigenvectors` pairs with `eigenvalues[i]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
    /// Count of eigenvalues above `REL_TOL * lambda_max` (and positive).
    pub rank: usize,
}

/// Decompose a symmetric matrix with cyclic Jacobi rotations.
///
/// The input must be symmetric within `1e-10`; it is symmetrized as
/// `(k + k^T)/2` before iterating. Fails if the rotation cap is hit.
pub fn sym_eigen(k: &Matrix) -> Result<EigenDecomposition, MatrixError> {
    k.require_symmetric(1e-10)?;
    let n = k.rows();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            eigenvectors: Matrix::zeros(0, 0),
            rank: 0,
        });
    }

    let sym = k.symmetrized();
    let mut a: Vec<f64> = sym.data().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let norm_in: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_DIAG_TOL * norm_in;
    let max_rotations = 100 * n * n;
    let mut rotations = 0usize;

    loop {
        let mut off2 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let x = a[i * n + j];
                off2 += 2.0 * x * x;
            }
        }
        if off2.sqrt() <= threshold {
            break;
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                rotations += 1;
                if rotations > max_rotations {
                    return Err(MatrixError::NoConvergence {
                        max_rotations,
                        off: off2.sqrt(),
                    });
                }

                // Stable rotation angle (Golub & Van Loan).
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let app = a[p * n + p];
                let aqq = a[q * n + q];
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        let nip = c * aip - s * aiq;
                        let niq = s * aip + c * aiq;
                        a[i * n + p] = nip;
                        a[p * n + i] = nip;
                        a[i * n + q] = niq;
                        a[q * n + i] = niq;
                    }
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }

    // Sort descending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (jj, &j) in order.iter().enumerate() {
        for i in 0..n {
            vecs.set(i, jj, v[i * n + j]);
        }
    }

    let rank = rank_of(&eigenvalues);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vecs,
        rank,
    })
}

fn rank_of(eigenvalues: &[f64]) -> usize {
    let lambda_max = eigenvalues.first().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return 0;
    }
    eigenvalues
        .iter()
        .filter(|&&l| l > REL_TOL * lambda_max)
        .count()
}

/// Number of leading eigenvalues kept as nonzero under the relative cutoff.
pub fn retained_rank(eig: &EigenDecomposition, rel_tol: f64) -> usize {
    let lambda_max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return 0;
    }
    let cut = rel_tol * lambda_max;
    eig.eigenvalues.iter().take_while(|&&l| l > cut).count()
}

/// Assemble `U_r diag(1/lambda_r) U_r^T` from an existing decomposition,
/// dropping eigenvalues at or below `rel_tol * lambda_max` and all
/// non-positive ones.
pub fn pseudoinverse_from_eig(eig: &EigenDecomposition, rel_tol: f64) -> Matrix {
    let n = eig.eigenvalues.len();
    let mut out = Matrix::zeros(n, n);
    for r in 0..retained_rank(eig, rel_tol) {
        let inv = 1.0 / eig.eigenvalues[r];
        for i in 0..n {
            let ui = eig.eigenvectors.get(i, r);
            if ui == 0.0 {
                continue;
            }
            for j in 0..n {
                let add = inv * ui * eig.eigenvectors.get(j, r);
                out.set(i, j, out.get(i, j) + add);
            }
        }
    }
    out
}

/// Moore-Penrose pseudoinverse of a symmetric matrix via its nonzero
/// eigenvalues: `U_r diag(1/lambda_r) U_r^T`.
///
/// Eigenvalues at or below `rel_tol * lambda_max`, and all non-positive
/// ones, are treated as zero. An all-zero (or negative semidefinite)
/// matrix yields the zero matrix.
pub fn pseudoinverse(k: &Matrix, rel_tol: f64) -> Result<Matrix, MatrixError> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(MatrixError::InvalidParameter(format!(
            "rel_tol must be in (0,1), got {rel_tol}"
        )));
    }
    let eig = sym_eigen(k)?;
    Ok(pseudoinverse_from_eig(&eig, rel_tol))
}

/// `pseudoinverse` with the crate default cutoff.
pub fn pseudoinverse_default(k: &Matrix) -> Result<Matrix, MatrixError> {
    pseudoinverse(k, REL_TOL)
}
