//! L-ensemble determinantal point process sampling.
//!
//! A PSD correlation kernel `C` defines subset probabilities
//! `P(S) ∝ det(C_S)`. Sampling goes through the spectral decomposition:
//! each eigenvector is kept independently with probability
//! `lambda/(lambda+1)`, the kept eigenvectors form an orthonormal orbital
//! matrix, and the fixed-size fermion sampler draws the subset. This is the
//! sampling core of the diversity-selection pipeline (kernel from feature
//! vectors, subsets, minimum-Bayes-risk pick), exercised here on synthetic
//! feature vectors.

use thiserror::Error;

use crate::ffs::{ffs_sample, SampleError};
use crate::numerics::{symmetric_eig, FlopLedger, Matrix, NumericsError, OrbitalMatrix, RngStream};

#[derive(Debug, Error)]
pub enum DppError {
    #[error("feature vectors have mismatched dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("kernel is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPsd { min_eig: f64 },
    #[error("candidate {index} is not unit norm: |v| = {norm}")]
    NotUnitNorm { index: usize, norm: f64 },
    #[error("no candidates to select from")]
    EmptyCandidates,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Eigenvalues in (-1e-8, 0) clamp to zero; anything lower is an error.
const EIG_CLAMP: f64 = -1e-8;

/// Symmetric PSD correlation kernel.
#[derive(Debug, Clone)]
pub struct Kernel {
    c: Matrix,
}

impl Kernel {
    /// Wrap a symmetric square matrix (PSD-ness is checked at
    /// decomposition time, where the spectrum is available).
    pub fn new(c: Matrix) -> Result<Self, DppError> {
        if c.rows() != c.cols() {
            return Err(DppError::DimensionMismatch(c.rows(), c.cols()));
        }
        let max_asym = c.max_asymmetry();
        if max_asym > 1e-10 * c.max_abs().max(1.0) {
            return Err(DppError::Numerics(NumericsError::NotSymmetric { max_asym }));
        }
        Ok(Self { c })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.c
    }

    pub fn size(&self) -> usize {
        self.c.rows()
    }

    /// Eigendecompose once for repeated sampling.
    pub fn spectral(&self) -> Result<SpectralKernel, DppError> {
        let (mut values, vectors) = symmetric_eig(&self.c)?;
        let min_eig = values.first().copied().unwrap_or(0.0);
        if min_eig < EIG_CLAMP {
            return Err(DppError::NotPsd { min_eig });
        }
        for v in &mut values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(SpectralKernel { values, vectors })
    }
}

/// Gram matrix `C_ij = b_i . b_j` of the feature vectors; PSD by
/// construction.
pub fn kernel_from_vectors(vectors: &[Vec<f64>]) -> Result<Kernel, DppError> {
    if vectors.is_empty() {
        return Err(DppError::EmptyCandidates);
    }
    let dim = vectors[0].len();
    for v in vectors {
        if v.len() != dim {
            return Err(DppError::DimensionMismatch(dim, v.len()));
        }
    }
    let l = vectors.len();
    let mut data = Vec::with_capacity(l * l);
    for i in 0..l {
        for j in 0..l {
            data.push(vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum());
        }
    }
    Kernel::new(Matrix::new(l, l, data)?)
}

/// Spectral form of a kernel: clamped eigenvalues ascending with matching
/// orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    values: Vec<f64>,
    vectors: Matrix,
}

impl SpectralKernel {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Expected subset size `sum_j lambda_j / (lambda_j + 1)`.
    pub fn expected_subset_size(&self) -> f64 {
        self.values.iter().map(|&l| l / (l + 1.0)).sum()
    }

    /// Draw one subset of the L-ensemble, as sorted 0-based indices.
    pub fn sample(&self, rng: &mut RngStream, ledger: &mut FlopLedger) -> Result<Vec<usize>, DppError> {
        let l = self.values.len();
        // independent eigenvector selection, probability lambda/(lambda+1);
        // kept columns ordered by descending eigenvalue for reproducibility
        let mut kept: Vec<usize> = Vec::new();
        for j in (0..l).rev() {
            let lambda = self.values[j];
            let p = lambda / (lambda + 1.0);
            ledger.add_adds(1);
            ledger.add_muls(1);
            if rng.uniform() < p {
                kept.push(j);
            }
        }
        if kept.is_empty() {
            return Ok(Vec::new());
        }
        let u = OrbitalMatrix::new(Matrix::from_fn(l, kept.len(), |x, idx| {
            self.vectors.at(x, kept[idx])
        }))?;
        let config = ffs_sample(&u, rng, ledger)?;
        Ok(config.sorted_set())
    }

    /// Feature embedding whose Gram matrix reproduces the kernel: rows of
    /// `V sqrt(diag(lambda))`. Used to give kernel-file inputs a vector
    /// representation for the minimum-Bayes-risk step.
    pub fn feature_vectors(&self) -> Vec<Vec<f64>> {
        let l = self.values.len();
        let roots: Vec<f64> = self.values.iter().map(|&v| v.sqrt()).collect();
        (0..l)
            .map(|x| (0..l).map(|j| self.vectors.at(x, j) * roots[j]).collect())
            .collect()
    }
}

/// One-shot subset draw from a kernel (decompose + sample).
pub fn sample_dpp(
    kernel: &Kernel,
    rng: &mut RngStream,
    ledger: &mut FlopLedger,
) -> Result<Vec<usize>, DppError> {
    kernel.spectral()?.sample(rng, ledger)
}

/// Minimum-Bayes-risk pick: the candidate maximizing the mean inner product
/// with all candidates (itself included). Candidates must be unit vectors;
/// ties resolve to the lowest index.
pub fn mbr_select(candidates: &[Vec<f64>]) -> Result<usize, DppError> {
    if candidates.is_empty() {
        return Err(DppError::EmptyCandidates);
    }
    let dim = candidates[0].len();
    for (i, v) in candidates.iter().enumerate() {
        if v.len() != dim {
            return Err(DppError::DimensionMismatch(dim, v.len()));
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(DppError::NotUnitNorm { index: i, norm });
        }
    }
    let m = candidates.len() as f64;
    let mut mean = vec![0.0; dim];
    for v in candidates {
        for (s, x) in mean.iter_mut().zip(v) {
            *s += x;
        }
    }
    for s in &mut mean {
        *s /= m;
    }
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, v) in candidates.iter().enumerate() {
        let score: f64 = v.iter().zip(&mean).map(|(a, b)| a * b).sum();
        if score > best_score {
            best_score = score;
            best = i;
        }
    }
    Ok(best)
}

/// Synthetic feature vectors standing in for embedded sentences: L unit
/// directions with mean pairwise overlap set by `similarity` in [0, 1),
/// scaled by log-normal magnitudes of width `magnitude_spread`.
pub fn synthetic_vectors(
    l: usize,
    dim: usize,
    similarity: f64,
    magnitude_spread: f64,
    rng: &mut RngStream,
) -> Vec<Vec<f64>> {
    assert!((0.0..1.0).contains(&similarity), "similarity must be in [0,1)");
    assert!(dim >= 1 && l >= 1);
    let mut shared: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
    let norm = shared.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut shared {
        *x /= norm;
    }
    let ortho_scale = (1.0 - similarity * similarity).sqrt();
    (0..l)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut raw: Vec<f64> = v
                .iter()
                .zip(&shared)
                .map(|(x, s)| similarity * s + ortho_scale * x / n)
                .collect();
            let rn = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            let magnitude = (magnitude_spread * rng.normal()).exp();
            for x in &mut raw {
                *x = *x / rn * magnitude;
            }
            raw
        })
        .collect()
}
