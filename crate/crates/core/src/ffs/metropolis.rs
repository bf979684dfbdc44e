//! Sampling variant for continuous models and very large site counts.
//!
//! The explicit inverse-CDF step scans all L candidate positions, which is
//! wasteful when L is huge and impossible when positions are continuous.
//! Here each conditional `P(x_k | ...) ∝ |u_{x_k}^T h|^2` is sampled by a
//! short single-variable Metropolis chain instead: initialize `x_k` in the
//! domain, propose a symmetric update, accept with the squared-projection
//! ratio. The elimination and normal-vector machinery is unchanged, so the
//! overall cost is O(N^3 + M_cond N^2) — independent of any grid size.

use super::{draw_permutation, EliminationState, SampleConfig, SampleError};
use crate::numerics::{FlopLedger, OrbitalMatrix, RngStream};

const INIT_ATTEMPTS: usize = 100;
const ZERO_WEIGHT: f64 = 1e-300;

/// Where one position variable lives and how it is proposed.
pub trait ProposalDomain {
    type Pos: Copy;

    /// Uniform initial point.
    fn init(&self, rng: &mut RngStream) -> Self::Pos;

    /// Symmetric proposal from `x`; `None` if the proposal landed outside the
    /// domain (zero target density there, so it is always rejected).
    fn propose(&self, x: Self::Pos, rng: &mut RngStream) -> Option<Self::Pos>;
}

/// Open interval (lo, hi) with a uniform shift proposal of the given width.
#[derive(Debug, Clone, Copy)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub proposal_width: f64,
}

impl ProposalDomain for Interval {
    type Pos = f64;

    fn init(&self, rng: &mut RngStream) -> f64 {
        self.lo + (self.hi - self.lo) * rng.uniform()
    }

    fn propose(&self, x: f64, rng: &mut RngStream) -> Option<f64> {
        let step = (2.0 * rng.uniform() - 1.0) * self.proposal_width;
        let y = x + step;
        (y > self.lo && y < self.hi).then_some(y)
    }
}

/// Discrete site set; proposals redraw a site uniformly.
#[derive(Debug, Clone, Copy)]
struct SiteSet {
    count: usize,
}

impl ProposalDomain for SiteSet {
    type Pos = usize;

    fn init(&self, rng: &mut RngStream) -> usize {
        rng.below(self.count as u64) as usize
    }

    fn propose(&self, _x: usize, rng: &mut RngStream) -> Option<usize> {
        Some(rng.below(self.count as u64) as usize)
    }
}

/// Generic inner loop: one FFS pass where each conditional is equilibrated by
/// `m_cond` Metropolis updates.
///
/// `orbitals(pos)` must return the finite length-N orbital row at `pos`.
pub fn ffs_sample_metropolis_step<D, F>(
    orbitals: F,
    domain: &D,
    n: usize,
    m_cond: usize,
    rng: &mut RngStream,
    ledger: &mut FlopLedger,
) -> Result<Vec<D::Pos>, SampleError>
where
    D: ProposalDomain,
    F: Fn(D::Pos) -> Vec<f64>,
{
    if n == 0 {
        return Err(SampleError::InvalidInput("need at least one fermion".into()));
    }
    if m_cond == 0 {
        return Err(SampleError::InvalidInput("M_cond must be at least 1".into()));
    }
    let perm = draw_permutation(n, rng);
    let mut state = EliminationState::new(perm);
    let mut positions: Vec<D::Pos> = Vec::with_capacity(n);

    for k in 1..=n {
        let h = state.normal_vector(k, ledger)?;
        let cols = &state.permutation().order()[..k];

        let weight_at = |pos: D::Pos, ledger: &mut FlopLedger| -> f64 {
            let row = orbitals(pos);
            debug_assert_eq!(row.len(), state.permutation().len());
            let mut proj = 0.0;
            for (hi, &c) in h.iter().zip(cols) {
                proj += hi * row[c];
            }
            ledger.add_muls(k as u64 + 1);
            ledger.add_adds(k as u64 - 1);
            proj * proj
        };

        // Previously chosen discrete positions have weight exactly 0 through
        // h-orthogonality; a fresh uniform point can also land on one, hence
        // the re-initialization loop.
        let mut x = domain.init(rng);
        let mut w = weight_at(x, ledger);
        let mut attempts = 1;
        while w < ZERO_WEIGHT {
            if attempts >= INIT_ATTEMPTS {
                return Err(SampleError::ZeroWeightStart { attempts });
            }
            x = domain.init(rng);
            w = weight_at(x, ledger);
            attempts += 1;
        }

        for _ in 0..m_cond {
            let Some(y) = domain.propose(x, rng) else {
                continue; // outside the domain: zero density, always rejected
            };
            let wy = weight_at(y, ledger);
            let ratio = wy / w;
            ledger.add_muls(1);
            if ratio >= 1.0 || rng.uniform() < ratio {
                x = y;
                w = wy;
            }
        }

        positions.push(x);
        if k < n {
            let row = orbitals(x);
            let permuted: Vec<f64> =
                state.permutation().order().iter().map(|&c| row[c]).collect();
            state.advance(permuted, ledger)?;
        }
    }
    Ok(positions)
}

/// Continuous-model sampler: orbital rows evaluated at real positions in
/// (lo, hi), conditional equilibrated by `m_cond` width-`proposal_width`
/// Metropolis updates.
pub fn ffs_sample_continuous<F>(
    orbitals: F,
    interval: Interval,
    n: usize,
    m_cond: usize,
    rng: &mut RngStream,
    ledger: &mut FlopLedger,
) -> Result<Vec<f64>, SampleError>
where
    F: Fn(f64) -> Vec<f64>,
{
    if !(interval.proposal_width > 0.0) || !(interval.hi > interval.lo) {
        return Err(SampleError::InvalidInput(
            "interval needs hi > lo and a positive proposal width".into(),
        ));
    }
    ffs_sample_metropolis_step(orbitals, &interval, n, m_cond, rng, ledger)
}

/// Large-L discrete variant: the continuous update is replaced by a uniform
/// site redraw `x_k -> x_k'`. Distribution matches the explicit sampler; the
/// cost does not scan the L sites.
pub fn ffs_sample_discrete_mh(
    u: &OrbitalMatrix,
    m_cond: usize,
    rng: &mut RngStream,
    ledger: &mut FlopLedger,
) -> Result<SampleConfig, SampleError> {
    let domain = SiteSet { count: u.system_size() };
    // Chosen sites carry weight ~eps^2 rather than exact zero (h is orthogonal
    // to their rows up to roundoff), so a chain that never escapes one is
    // conceivable; retry the whole draw in that case.
    for _ in 0..3 {
        let positions = ffs_sample_metropolis_step(
            |x| u.site_row(x).to_vec(),
            &domain,
            u.fermion_count(),
            m_cond,
            rng,
            ledger,
        )?;
        if let Ok(config) = SampleConfig::new(positions) {
            return Ok(config);
        }
    }
    Err(SampleError::SamplingFailed { attempts: 3 })
}
