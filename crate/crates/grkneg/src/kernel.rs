//! RBF kernel evaluation and kernel-matrix centering.
//!
//! Data matrices are `D x N` with samples as columns. Centering follows the
//! usual reference-set convention: feature maps are shifted by the mean map
//! of the reference columns, so centered square kernels have zero row and
//! column sums and centered cross kernels have zero column sums.

use crate::matrix::{Matrix, MatrixError};

/// `exp(-||a_i - b_j||^2 / (2 sigma^2))` for every column pair.
pub fn rbf_kernel(a: &Matrix, b: &Matrix, sigma: f64) -> Result<Matrix, MatrixError> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(MatrixError::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if a.rows() != b.rows() {
        return Err(MatrixError::DimensionMismatch {
            expected: format!("{} rows", a.rows()),
            got: format!("{} rows", b.rows()),
        });
    }
    // transpose so each sample is a contiguous slice
    let at = a.transpose();
    let bt = b.transpose();
    let inv = 1.0 / (2.0 * sigma * sigma);
    let (m, n) = (at.rows(), bt.rows());
    let mut out = Matrix::zeros(m, n);
    for i in 0..m {
        let x = at.row(i);
        for j in 0..n {
            let y = bt.row(j);
            let mut d2 = 0.0;
            for (xv, yv) in x.iter().zip(y.iter()) {
                let d = xv - yv;
                d2 += d * d;
            }
            out.set(i, j, (-d2 * inv).exp());
        }
    }
    Ok(out)
}

/// Center a square symmetric kernel: `(I - 11^T/R) K (I - 11^T/R)`.
pub fn center_square_kernel(k: &Matrix) -> Result<Matrix, MatrixError> {
    k.require_symmetric(1e-10)?;
    let r = k.rows();
    let mut row_mean = vec![0.0; r];
    let mut grand = 0.0;
    for i in 0..r {
        let s: f64 = k.row(i).iter().sum();
        row_mean[i] = s / r as f64;
        grand += s;
    }
    grand /= (r * r) as f64;
    Matrix::from_fn(r, r, |i, j| k.get(i, j) - row_mean[i] - row_mean[j] + grand)
}

/// Center a cross kernel `K_RX` against the reference self-kernel `K_RR`:
/// `(I - 11^T/R)(K_RX - K_RR 11^T/R)`.
///
/// Entry-wise: `k(r_i,x_j) - mean_k k(r_k,x_j) - mean_k k(r_i,r_k) + mean_kl k(r_k,r_l)`.
/// Reduces to [`center_square_kernel`] when `K_RX = K_RR`.
pub fn center_cross_kernel(k_rr: &Matrix, k_rx: &Matrix) -> Result<Matrix, MatrixError> {
    k_rr.require_square()?;
    let r = k_rr.rows();
    if k_rx.rows() != r {
        return Err(MatrixError::DimensionMismatch {
            expected: format!("{r} rows"),
            got: format!("{} rows", k_rx.rows()),
        });
    }
    let x = k_rx.cols();
    let mut rr_row_mean = vec![0.0; r];
    let mut grand = 0.0;
    for i in 0..r {
        let s: f64 = k_rr.row(i).iter().sum();
        rr_row_mean[i] = s / r as f64;
        grand += s;
    }
    grand /= (r * r) as f64;
    let mut col_mean = vec![0.0; x];
    for i in 0..r {
        for (j, cm) in col_mean.iter_mut().enumerate() {
            *cm += k_rx.get(i, j);
        }
    }
    for cm in col_mean.iter_mut() {
        *cm /= r as f64;
    }
    Matrix::from_fn(r, x, |i, j| {
        k_rx.get(i, j) - col_mean[j] - rr_row_mean[i] + grand
    })
}
