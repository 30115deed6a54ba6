//! Reference-vector kernels for one-class classification.
//!
//! A reference set `R` (training samples, generated samples, or both) is
//! lifted through the base RBF kernel into a whitened feature space, and the
//! training/test kernels are the inner products there:
//!
//! ```text
//! K_PP = Kc_RP^T  Kc_RR^+  Kc_RP        (training)
//! K_PY = Kc_RP^T  Kc_RR^+  Kc_RY        (testing)
//! ```
//!
//! where `Kc` denotes reference-centered base-kernel matrices. The resulting
//! kernel is always `P x P` no matter how many reference vectors were used,
//! so the downstream SVM never sees the reference set itself.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::eigen::{pseudoinverse_from_eig, retained_rank, sym_eigen, REL_TOL};
use crate::kernel::{center_cross_kernel, center_square_kernel, rbf_kernel};
use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GrkError {
    #[error("negative sample block is empty")]
    EmptyNegatives,
    #[error("positive sample block is empty")]
    EmptyPositives,
    #[error("variant {0} requires negative samples")]
    VariantNeedsNegatives(u8),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// The nine reference-set recipes. `P` and `N` are the positive and negative
/// training counts of the problem at hand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReferenceVariant {
    /// P positive training samples.
    V1,
    /// P positive + N negative training samples.
    V2,
    /// N negative training samples.
    V3,
    /// P positive-generated + N negative-generated samples.
    V4,
    /// P+N negative-generated samples.
    V5,
    /// P non-positive-generated + N negative-generated samples.
    V6,
    /// N negative training + P negative-generated samples (the recommended recipe).
    V7,
    /// N negative training + 2P negative-generated samples.
    V8,
    /// N negative training + max(1, P/2) negative-generated samples.
    V9,
}

impl ReferenceVariant {
    pub const ALL: [ReferenceVariant; 9] = [
        ReferenceVariant::V1,
        ReferenceVariant::V2,
        ReferenceVariant::V3,
        ReferenceVariant::V4,
        ReferenceVariant::V5,
        ReferenceVariant::V6,
        ReferenceVariant::V7,
        ReferenceVariant::V8,
        ReferenceVariant::V9,
    ];

    /// 1-based index, matching the `grk1`..`grk9` method names.
    pub fn index(self) -> u8 {
        Self::ALL.iter().position(|v| *v == self).unwrap() as u8 + 1
    }

    pub fn from_index(i: u8) -> Option<Self> {
        Self::ALL.get(i.checked_sub(1)? as usize).copied()
    }

    /// Reference column count for positive/negative training counts `p`, `n`.
    pub fn reference_count(self, p: usize, n: usize) -> usize {
        match self {
            ReferenceVariant::V1 => p,
            ReferenceVariant::V2
            | ReferenceVariant::V4
            | ReferenceVariant::V5
            | ReferenceVariant::V6
            | ReferenceVariant::V7 => p + n,
            ReferenceVariant::V3 => n,
            ReferenceVariant::V8 => 2 * p + n,
            ReferenceVariant::V9 => (p / 2).max(1) + n,
        }
    }
}

/// Per-dimension normal approximation of the negative class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeDistribution {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NegativeDistribution {
    /// Standard normal in `dims` dimensions (the positive-generated
    /// distribution once data are standardized to the positive class).
    pub fn standard(dims: usize) -> Self {
        NegativeDistribution {
            mean: vec![0.0; dims],
            std: vec![1.0; dims],
        }
    }
}

/// Per-dimension mean and sample standard deviation (denominator N-1) of the
/// negative columns. With a single column, and for zero-variance dimensions,
/// the std falls back to 1 so sampling stays well defined.
pub fn sample_negative_distribution(neg: &Matrix) -> Result<NegativeDistribution, GrkError> {
    let n = neg.cols();
    if n == 0 {
        return Err(GrkError::EmptyNegatives);
    }
    let d = neg.rows();
    let mut mean = vec![0.0; d];
    let mut std = vec![1.0; d];
    for dim in 0..d {
        let m: f64 = (0..n).map(|j| neg.get(dim, j)).sum::<f64>() / n as f64;
        mean[dim] = m;
        if n > 1 {
            let ss: f64 = (0..n).map(|j| (neg.get(dim, j) - m).powi(2)).sum();
            let s = (ss / (n - 1) as f64).sqrt();
            std[dim] = if s > 0.0 { s } else { 1.0 };
        }
    }
    Ok(NegativeDistribution { mean, std })
}

/// Draw `count` columns of `mean_d + std_d * z`, `z ~ N(0,1)`, column by
/// column. Deterministic for a given generator state.
pub fn generate_samples(dist: &NegativeDistribution, count: usize, rng: &mut impl Rng) -> Matrix {
    let d = dist.mean.len();
    let mut out = Matrix::zeros(d, count);
    for j in 0..count {
        for dim in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            out.set(dim, j, dist.mean[dim] + dist.std[dim] * z);
        }
    }
    out
}

/// Shift a standard-normal draw away from the origin by 0.5 in its own sign
/// direction (`sign(0) = +1`), so every entry satisfies `|v| >= 0.5`.
#[inline]
fn push_from_origin(z: f64) -> f64 {
    if z >= 0.0 {
        z + 0.5
    } else {
        z - 0.5
    }
}

/// Samples from the outskirts of the standardized positive distribution:
/// standard normal entries pushed 0.5 away from the origin.
pub fn generate_nonpositive(count: usize, dims: usize, rng: &mut impl Rng) -> Matrix {
    let mut out = Matrix::zeros(dims, count);
    for j in 0..count {
        for dim in 0..dims {
            let z: f64 = rng.sample(StandardNormal);
            out.set(dim, j, push_from_origin(z));
        }
    }
    out
}

/// Assemble the reference set for a variant. Training-derived columns come
/// first, generated columns second; both blocks keep their natural order so
/// the result is reproducible for a given generator.
pub fn build_reference_set(
    variant: ReferenceVariant,
    pos: &Matrix,
    neg: &Matrix,
    rng: &mut impl Rng,
) -> Result<Matrix, GrkError> {
    if pos.cols() == 0 {
        return Err(GrkError::EmptyPositives);
    }
    let p = pos.cols();
    let n = neg.cols();
    if variant != ReferenceVariant::V1 && n == 0 {
        return Err(GrkError::VariantNeedsNegatives(variant.index()));
    }
    let d = pos.rows();
    let set = match variant {
        ReferenceVariant::V1 => pos.clone(),
        ReferenceVariant::V2 => Matrix::hconcat(&[pos, neg])?,
        ReferenceVariant::V3 => neg.clone(),
        ReferenceVariant::V4 => {
            let pos_gen = generate_samples(&NegativeDistribution::standard(d), p, rng);
            let neg_gen = generate_samples(&sample_negative_distribution(neg)?, n, rng);
            Matrix::hconcat(&[&pos_gen, &neg_gen])?
        }
        ReferenceVariant::V5 => generate_samples(&sample_negative_distribution(neg)?, p + n, rng),
        ReferenceVariant::V6 => {
            let nonpos_gen = generate_nonpositive(p, d, rng);
            let neg_gen = generate_samples(&sample_negative_distribution(neg)?, n, rng);
            Matrix::hconcat(&[&nonpos_gen, &neg_gen])?
        }
        ReferenceVariant::V7 => {
            let neg_gen = generate_samples(&sample_negative_distribution(neg)?, p, rng);
            Matrix::hconcat(&[neg, &neg_gen])?
        }
        ReferenceVariant::V8 => {
            let neg_gen = generate_samples(&sample_negative_distribution(neg)?, 2 * p, rng);
            Matrix::hconcat(&[neg, &neg_gen])?
        }
        ReferenceVariant::V9 => {
            let neg_gen =
                generate_samples(&sample_negative_distribution(neg)?, (p / 2).max(1), rng);
            Matrix::hconcat(&[neg, &neg_gen])?
        }
    };
    debug_assert_eq!(set.cols(), variant.reference_count(p, n));
    Ok(set)
}

/// Frozen training artifacts of the reference-kernel pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrkModel {
    pub reference_set: Matrix,
    pub base_sigma: f64,
    /// Uncentered reference self-kernel; test-time centering reuses it.
    pub k_rr: Matrix,
    pub k_rr_centered: Matrix,
    pub k_rr_pinv: Matrix,
    pub k_rp_centered: Matrix,
    /// Rank-r whitening map `diag(1/sqrt(lambda_r)) U_r^T`, shape `r x R`.
    pub whitener: Matrix,
    /// Whitened training features `whitener * Kc_RP`, shape `r x P`.
    pub train_features: Matrix,
    /// `P x P` kernel handed to the SVM.
    pub train_kernel: Matrix,
}

/// Run the training pipeline: base kernels, centering, eigendecomposition,
/// and the kernel `Kc_RP^T Kc_RR^+ Kc_RP`.
///
/// The product is evaluated in factored form, as the Gram matrix of the
/// whitened features `diag(1/sqrt(lambda_r)) U_r^T Kc_RP`. Materializing
/// the pseudoinverse first and multiplying through it loses up to
/// `n * ulp(1/lambda_min)` to cancellation when small eigenvalues are
/// retained; the factored product does not.
pub fn grk_train(pos: &Matrix, reference: &Matrix, sigma: f64) -> Result<GrkModel, GrkError> {
    if pos.cols() == 0 {
        return Err(GrkError::EmptyPositives);
    }
    let k_rr = rbf_kernel(reference, reference, sigma)?;
    let k_rr_centered = center_square_kernel(&k_rr)?;
    let eig = sym_eigen(&k_rr_centered)?;
    let rank = retained_rank(&eig, REL_TOL);
    let k_rr_pinv = pseudoinverse_from_eig(&eig, REL_TOL);

    let r = reference.cols();
    let mut whitener = Matrix::zeros(rank, r);
    for row in 0..rank {
        let scale = 1.0 / eig.eigenvalues[row].sqrt();
        for col in 0..r {
            whitener.set(row, col, scale * eig.eigenvectors.get(col, row));
        }
    }

    let k_rp = rbf_kernel(reference, pos, sigma)?;
    let k_rp_centered = center_cross_kernel(&k_rr, &k_rp)?;
    let train_features = whitener.matmul(&k_rp_centered)?;
    let train_kernel = train_features.transpose().matmul(&train_features)?;
    Ok(GrkModel {
        reference_set: reference.clone(),
        base_sigma: sigma,
        k_rr,
        k_rr_centered,
        k_rr_pinv,
        k_rp_centered,
        whitener,
        train_features,
        train_kernel,
    })
}

/// Test-kernel computation `Kc_RP^T Kc_RR^+ Kc_RY`, shape `P x Y`, evaluated
/// as inner products of whitened features. Centering uses the training
/// reference statistics stored in the model, never the test data.
pub fn grk_test(model: &GrkModel, test: &Matrix) -> Result<Matrix, GrkError> {
    let k_ry = rbf_kernel(&model.reference_set, test, model.base_sigma)?;
    let k_ry_centered = center_cross_kernel(&model.k_rr, &k_ry)?;
    let test_features = model.whitener.matmul(&k_ry_centered)?;
    Ok(model.train_features.transpose().matmul(&test_features)?)
}
