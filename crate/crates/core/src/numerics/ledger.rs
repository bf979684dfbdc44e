use serde::Serialize;

/// Monotone counters of scalar multiplies and additions attributed to a
/// sampler run.
///
/// Attribution boundary: comparisons, copies, negations, and RNG draws are
/// free; divisions, square roots, and exponentials count as one multiply
/// each. Setup work (eigendecompositions, matrix loading) is not counted —
/// only the samplers' own inner loops. Counting happens at loop granularity
/// (e.g. an inner product of length k books k multiplies and k-1 additions),
/// which is exact, not sampled.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlopLedger {
    multiplies: u64,
    additions: u64,
}

/// Difference between two ledger snapshots, e.g. the cost of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LedgerDelta {
    pub mul: u64,
    pub add: u64,
}

impl FlopLedger {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add_muls(&mut self, n: u64) {
        self.multiplies += n;
    }

    #[inline]
    pub fn add_adds(&mut self, n: u64) {
        self.additions += n;
    }

    pub fn multiplies(&self) -> u64 {
        self.multiplies
    }

    pub fn additions(&self) -> u64 {
        self.additions
    }

    pub fn total(&self) -> u64 {
        self.multiplies + self.additions
    }

    /// Counts accumulated since an earlier snapshot of the same ledger.
    pub fn since(&self, earlier: &FlopLedger) -> LedgerDelta {
        debug_assert!(self.multiplies >= earlier.multiplies && self.additions >= earlier.additions);
        LedgerDelta {
            mul: self.multiplies - earlier.multiplies,
            add: self.additions - earlier.additions,
        }
    }

    /// Fold a worker's private ledger into this one (parallel trials merge by
    /// summation).
    pub fn merge(&mut self, other: &FlopLedger) {
        self.multiplies += other.multiplies;
        self.additions += other.additions;
    }
}

impl LedgerDelta {
    pub fn total(&self) -> u64 {
        self.mul + self.add
    }
}

/// Count an inner product of two equal-length slices: n multiplies, n-1
/// additions (none for empty or length-1 input).
#[inline]
pub(crate) fn dot_counted(a: &[f64], b: &[f64], ledger: &mut FlopLedger) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    ledger.add_muls(a.len() as u64);
    ledger.add_adds(a.len().saturating_sub(1) as u64);
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_work_leaves_counters_unchanged() {
        let mut ledger = FlopLedger::new();
        let before = ledger.clone();
        ledger.add_muls(0);
        ledger.add_adds(0);
        assert_eq!(ledger, before);
        assert_eq!(ledger.since(&before), LedgerDelta { mul: 0, add: 0 });
    }

    #[test]
    fn inner_product_books_k_muls_and_k_minus_1_adds() {
        let mut ledger = FlopLedger::new();
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 2.0, 2.0, 2.0, 2.0];
        let d = dot_counted(&a, &b, &mut ledger);
        assert_eq!(d, 30.0);
        assert_eq!(ledger.multiplies(), 5);
        assert_eq!(ledger.additions(), 4);
        assert_eq!(ledger.total(), 9);
    }

    #[test]
    fn merge_sums_counters() {
        let mut a = FlopLedger::new();
        a.add_muls(3);
        let mut b = FlopLedger::new();
        b.add_adds(7);
        a.merge(&b);
        assert_eq!((a.multiplies(), a.additions()), (3, 7));
    }
}
