//! Fast fermion sampling.
//!
//! Draws a position configuration `x = (x_1 .. x_N)` distributed as
//! `|det U_{x,n}|^2 / N!` by first drawing a uniformly random permutation `m`
//! of the orbital indices and then sampling positions one at a time from the
//! conditional `P(x_k | x_1..x_{k-1}; m) = |u_{x_k}^T h|^2`, where `u_x` is
//! the row of `U` at site `x` restricted to the first k permuted columns and
//! `h` is the unit vector orthogonal to the k-1 previously selected restricted
//! rows. Because the columns of `U` are orthonormal, those conditionals sum to
//! one exactly over the unchosen sites, and averaging the chain over all
//! permutations reproduces the determinant distribution.
//!
//! The normal vector comes from an incrementally maintained Gaussian
//! elimination of the selected rows (always carried in the full N-dimensional
//! permuted column space, so step k only has to eliminate the newest row), at
//! ~2Nk operations per step; the L candidate projections cost another ~2Lk.
//! One full sample therefore costs L*N^2 + N^3 operations to leading order,
//! and a truncated run of the same loop samples the N_sub-fermion marginal at
//! a cost independent of N.

mod metropolis;

pub use metropolis::{
    ffs_sample_continuous, ffs_sample_discrete_mh, ffs_sample_metropolis_step, Interval,
    ProposalDomain,
};

use thiserror::Error;

use crate::numerics::{dot_counted, FlopLedger, OrbitalMatrix, RngStream};

/// Sampler failures. Degenerate pivots signal a numerically dependent
/// selection (measure zero for generic wavefunctions); the full-sample
/// retry preserves correctness.
#[derive(Debug, Error)]
pub enum SampleError {
    #[error("degenerate pivot in elimination: |pivot| = {pivot:.3e} below tolerance")]
    DegeneratePivot { pivot: f64 },
    #[error("conditional weights lost normalization: sum = {sum:.12}")]
    NormalizationLoss { sum: f64 },
    #[error("sampling failed after {attempts} attempts")]
    SamplingFailed { attempts: usize },
    #[error("no nonzero-weight starting point found after {attempts} attempts")]
    ZeroWeightStart { attempts: usize },
    #[error("no valid starting configuration: |det| = {det_abs:.3e} after {attempts} restarts")]
    SingularStart { det_abs: f64, attempts: usize },
    #[error("projection residual {value:.3e} is negative beyond roundoff")]
    NegativeResidual { value: f64 },
    #[error("invalid sampler input: {0}")]
    InvalidInput(String),
}

/// Relative pivot tolerance for the elimination; below this the selection is
/// treated as numerically dependent.
const PIVOT_TOL: f64 = 1e-12;
/// A weight sum further than this from 1 signals upstream numerical damage.
const NORMALIZATION_TOL: f64 = 1e-6;
/// Whole-sample retries on degenerate pivots before giving up.
const MAX_RETRIES: usize = 3;

/// A permutation of the orbital indices `0..n`, drawn uniformly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    /// Validates that `order` is a bijection on 0..len.
    pub fn new(order: Vec<usize>) -> Result<Self, SampleError> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(SampleError::InvalidInput(format!(
                    "not a permutation of 0..{n}: {order:?}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self { order })
    }

    pub fn identity(n: usize) -> Self {
        Self { order: (0..n).collect() }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Uniform random permutation of `0..n` by Fisher-Yates.
pub fn draw_permutation(n: usize, rng: &mut RngStream) -> Permutation {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    Permutation { order }
}

/// An ordered fermion position configuration; positions are pairwise distinct
/// 0-based site indices (Pauli exclusion).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleConfig {
    positions: Vec<usize>,
}

impl SampleConfig {
    pub fn new(positions: Vec<usize>) -> Result<Self, SampleError> {
        let mut sorted = positions.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(SampleError::InvalidInput(format!(
                "positions repeat: {positions:?}"
            )));
        }
        Ok(Self { positions })
    }

    pub(crate) fn from_distinct(positions: Vec<usize>) -> Self {
        debug_assert!(SampleConfig::new(positions.clone()).is_ok());
        Self { positions }
    }

    /// Positions in selection order.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// The configuration as a sorted set (set-level consumers sort).
    pub fn sorted_set(&self) -> Vec<usize> {
        let mut s = self.positions.clone();
        s.sort_unstable();
        s
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Incrementally triangularized store of the selected rows of `U`, kept in
/// permuted column order over the full N-dimensional space.
///
/// Row j has exact zeros in permuted columns < j and its pivot at column j,
/// so appending the row selected at step k only requires eliminating its
/// first k-2 entries against the rows already stored.
#[derive(Debug, Clone)]
pub struct EliminationState {
    perm: Permutation,
    rows: Vec<Vec<f64>>,
}

impl EliminationState {
    pub fn new(perm: Permutation) -> Self {
        Self { perm, rows: Vec::new() }
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    /// Number of reduced rows held (k-1 while sampling step k).
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn reduced_row(&self, j: usize) -> &[f64] {
        &self.rows[j]
    }

    pub fn pivot(&self, j: usize) -> f64 {
        self.rows[j][j]
    }

    /// Append the U-row of the just-selected position (already in permuted
    /// column order) and reduce it against all stored rows.
    pub fn advance(&mut self, mut new_row: Vec<f64>, ledger: &mut FlopLedger) -> Result<(), SampleError> {
        let n = self.perm.len();
        debug_assert_eq!(new_row.len(), n);
        let scale = {
            let s: f64 = new_row.iter().map(|v| v * v).sum::<f64>().sqrt();
            ledger.add_muls(n as u64 + 1); // squares + sqrt
            ledger.add_adds(n as u64 - 1);
            s
        };
        let j_new = self.rows.len();
        for j in 0..j_new {
            let factor = new_row[j] / self.rows[j][j];
            ledger.add_muls(1);
            for col in (j + 1)..n {
                new_row[col] -= factor * self.rows[j][col];
            }
            ledger.add_muls((n - 1 - j) as u64);
            ledger.add_adds((n - 1 - j) as u64);
            new_row[j] = 0.0;
        }
        let pivot = new_row[j_new];
        if pivot.abs() <= PIVOT_TOL * scale {
            return Err(SampleError::DegeneratePivot { pivot });
        }
        self.rows.push(new_row);
        Ok(())
    }

    /// Unit k-vector orthogonal to the stored rows restricted to the first k
    /// permuted columns, by back substitution with the free component at
    /// column k. Requires exactly k-1 stored rows.
    pub fn normal_vector(&self, k: usize, ledger: &mut FlopLedger) -> Result<Vec<f64>, SampleError> {
        assert_eq!(self.rows.len(), k - 1, "normal_vector(k) needs k-1 reduced rows");
        let mut h = vec![0.0; k];
        h[k - 1] = 1.0;
        if k == 1 {
            return Ok(h);
        }
        for j in (0..k - 1).rev() {
            let s = dot_counted(&self.rows[j][j + 1..k], &h[j + 1..k], ledger);
            let pivot = self.rows[j][j];
            if pivot == 0.0 {
                return Err(SampleError::DegeneratePivot { pivot });
            }
            h[j] = -s / pivot;
            ledger.add_muls(1);
        }
        let norm = {
            let s: f64 = h.iter().map(|v| v * v).sum::<f64>().sqrt();
            ledger.add_muls(k as u64 + 1);
            ledger.add_adds(k as u64 - 1);
            s
        };
        for v in &mut h {
            *v /= norm;
        }
        ledger.add_muls(k as u64);
        Ok(h)
    }
}

/// Conditional weights at step k: `w[x] = |U_{x,(m_1..m_k)}^T h|^2` for
/// unchosen x, zero forced at chosen sites. By orthonormality of the columns
/// the weights sum to 1 (projection-kernel normalization); a deviation beyond
/// 1e-6 reports `NormalizationLoss`.
pub fn conditional_weights(
    u: &OrbitalMatrix,
    perm: &Permutation,
    h: &[f64],
    chosen: &[usize],
    ledger: &mut FlopLedger,
) -> Result<Vec<f64>, SampleError> {
    let l = u.system_size();
    let k = h.len();
    let cols = &perm.order()[..k];
    let mut weights = Vec::with_capacity(l);
    for x in 0..l {
        let row = u.site_row(x);
        let mut proj = 0.0;
        for (hi, &c) in h.iter().zip(cols) {
            proj += hi * row[c];
        }
        weights.push(proj * proj);
    }
    ledger.add_muls((l * (k + 1)) as u64);
    ledger.add_adds((l * (k - 1)) as u64);
    // Chosen sites are orthogonal to h analytically; force exact zeros so
    // rounding noise can never re-select them.
    for &x in chosen {
        weights[x] = 0.0;
    }
    let sum: f64 = weights.iter().sum();
    ledger.add_adds(l as u64 - 1);
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(SampleError::NormalizationLoss { sum });
    }
    Ok(weights)
}

/// Inverse-CDF draw: single uniform on (0, 1], left-to-right cumulative scan,
/// first index whose cumulative reaches the target. Forced-zero weights can
/// never be selected under the strict comparison.
fn inverse_cdf_select(weights: &[f64], rng: &mut RngStream, ledger: &mut FlopLedger) -> usize {
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for &w in weights {
        acc += w;
        cumulative.push(acc);
    }
    // accumulation already booked by conditional_weights' normalization sum
    let u = 1.0 - rng.uniform(); // (0, 1]
    let target = u * acc;
    ledger.add_muls(1);
    for (i, &c) in cumulative.iter().enumerate() {
        if c >= target {
            return i;
        }
    }
    weights.len() - 1
}

fn sample_attempt(
    u: &OrbitalMatrix,
    n_sub: usize,
    rng: &mut RngStream,
    ledger: &mut FlopLedger,
) -> Result<SampleConfig, SampleError> {
    let n = u.fermion_count();
    let perm = draw_permutation(n, rng);
    let mut state = EliminationState::new(perm);
    let mut chosen = Vec::with_capacity(n_sub);
    for k in 1..=n_sub {
        let h = state.normal_vector(k, ledger)?;
        let weights = conditional_weights(u, state.permutation(), &h, &chosen, ledger)?;
        let x = inverse_cdf_select(&weights, rng, ledger);
        chosen.push(x);
        if k < n_sub {
            let row = u.site_row(x);
            let permuted: Vec<f64> = state.permutation().order().iter().map(|&c| row[c]).collect();
            state.advance(permuted, ledger)?;
        }
    }
    Ok(SampleConfig::from_distinct(chosen))
}

/// Draw one N-fermion configuration distributed as `|det U_{x,n}|^2 / N!`.
///
/// Retries with fresh randomness up to 3 times if the elimination hits a
/// degenerate pivot, then reports `SamplingFailed`.
pub fn ffs_sample(
    u: &OrbitalMatrix,
    rng: &mut RngStream,
    ledger: &mut FlopLedger,
) -> Result<SampleConfig, SampleError> {
    ffs_marginal_sample(u, u.fermion_count(), rng, ledger)
}

/// Draw from the `n_sub`-fermion marginal of the N-fermion distribution:
/// the same permutation-averaged chain with the position loop stopped after
/// `n_sub` steps. Cost is L*n_sub^2 + n_sub^3 to leading order — independent
/// of N apart from the O(N)-length elimination rows.
pub fn ffs_marginal_sample(
    u: &OrbitalMatrix,
    n_sub: usize,
    rng: &mut RngStream,
    ledger: &mut FlopLedger,
) -> Result<SampleConfig, SampleError> {
    if n_sub == 0 || n_sub > u.fermion_count() {
        return Err(SampleError::InvalidInput(format!(
            "marginal size must satisfy 1 <= n_sub <= N = {}, got {n_sub}",
            u.fermion_count()
        )));
    }
    let mut last = None;
    for _ in 0..MAX_RETRIES {
        match sample_attempt(u, n_sub, rng, ledger) {
            Ok(config) => return Ok(config),
            Err(e @ SampleError::DegeneratePivot { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    let _ = last;
    Err(SampleError::SamplingFailed { attempts: MAX_RETRIES })
}

#[cfg(test)]
mod tests;
