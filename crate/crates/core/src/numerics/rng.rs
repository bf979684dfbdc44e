/// Counter-based 64-bit random stream.
///
/// The state is a Weyl sequence `seed + k*gamma` pushed through the SplitMix64
/// finalizer, so the k-th output is a pure function of (seed, k). Identical
/// seeds reproduce identical streams; [`RngStream::derive`] hashes
/// seed-and-index into a fresh seed so parallel trials get statistically
/// independent substreams. Bit-compatibility across implementations is not
/// promised, only within one build.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    counter: u64,
    spare_normal: Option<f64>,
}

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0, spare_normal: None }
    }

    /// Substream `index` of this stream's seed. Streams for distinct indices
    /// are independent for all practical purposes (full-avalanche hash).
    pub fn derive(&self, index: u64) -> Self {
        let child = mix(mix(self.seed ^ 0xA076_1D64_78BD_642F).wrapping_add(index.wrapping_mul(GAMMA)));
        Self::new(child)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.seed.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform on [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Unbiased uniform integer in [0, n). Rejection sampling on the top of
    /// the 2^64 range.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is meaningless");
        let rem = (u64::MAX % n + 1) % n; // 2^64 mod n
        loop {
            let v = self.next_u64();
            if rem == 0 || v < u64::MAX - rem + 1 {
                return v % n;
            }
        }
    }

    /// Standard normal draw (Box-Muller, pair cached).
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0,1] so the log is finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }
}
