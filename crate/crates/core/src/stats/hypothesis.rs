//! Goodness-of-fit machinery for the sampler equivalence tests: chi-square
//! critical values via the regularized incomplete gamma function, and the
//! Kolmogorov-Smirnov statistic with its asymptotic tail.

/// Regularized lower incomplete gamma P(a, x), series + continued fraction
/// (Numerical Recipes 6.2). Good to ~1e-12 over the ranges used here.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // series representation
        let mut ap = a;
        let mut sum = 1.0 / a;
        let mut del = sum;
        for _ in 0..500 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-15 {
                break;
            }
        }
        sum * (-x + a * x.ln() - ln_gamma(a)).exp()
    } else {
        // continued fraction for Q(a,x)
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / 1e-300;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < 1e-300 {
                d = 1e-300;
            }
            c = b + an / c;
            if c.abs() < 1e-300 {
                c = 1e-300;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-15 {
                break;
            }
        }
        let q = (-x + a * x.ln() - ln_gamma(a)).exp() * h;
        1.0 - q
    }
}

/// Lanczos approximation to ln Gamma(z), |error| < 2e-10 for z > 0.
pub fn ln_gamma(z: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let x = z;
    let mut y = z;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000000000190015;
    for c in COEFFS {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

/// Chi-square CDF with `df` degrees of freedom.
pub fn chi_square_cdf(x: f64, df: usize) -> f64 {
    gamma_p(df as f64 / 2.0, x / 2.0)
}

/// Upper critical value: the x with P(X > x) = significance.
pub fn chi_square_critical(df: usize, significance: f64) -> f64 {
    assert!(df >= 1 && significance > 0.0 && significance < 1.0);
    let target = 1.0 - significance;
    let (mut lo, mut hi) = (0.0, df as f64 + 20.0 * (2.0 * df as f64).sqrt() + 50.0);
    while chi_square_cdf(hi, df) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(mid, df) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One-sample chi-square statistic of observed counts against expected
/// probabilities. Bins with expected count below `min_expected` are pooled
/// into the last kept bin. Returns (statistic, degrees of freedom).
pub fn chi_square_one_sample(observed: &[u64], expected_probs: &[f64], min_expected: f64) -> (f64, usize) {
    assert_eq!(observed.len(), expected_probs.len());
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut bins = 0usize;
    let mut pooled_obs = 0.0;
    let mut pooled_exp = 0.0;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        let e = p * n as f64;
        if e < min_expected {
            pooled_obs += o as f64;
            pooled_exp += e;
            continue;
        }
        let d = o as f64 - e;
        stat += d * d / e;
        bins += 1;
    }
    if pooled_exp > 0.0 {
        let d = pooled_obs - pooled_exp;
        stat += d * d / pooled_exp;
        bins += 1;
    }
    (stat, bins.saturating_sub(1))
}

/// Two-sample chi-square for equal category distributions given two count
/// vectors (possibly different totals). Empty categories are skipped.
/// Returns (statistic, degrees of freedom).
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, usize) {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let k1 = ((nb as f64) / (na as f64)).sqrt();
    let k2 = 1.0 / k1;
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&oa, &ob) in a.iter().zip(b) {
        if oa + ob == 0 {
            continue;
        }
        let d = k1 * oa as f64 - k2 * ob as f64;
        stat += d * d / (oa + ob) as f64;
        bins += 1;
    }
    (stat, bins.saturating_sub(1))
}

/// Two-sided Kolmogorov-Smirnov statistic of samples against a CDF.
/// `samples` need not be sorted.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Asymptotic two-sided KS critical value at the given significance:
/// `sqrt(-ln(alpha/2)/2) / sqrt(n)`.
pub fn ks_critical(n: usize, significance: f64) -> f64 {
    (-(significance / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Total variation distance between an empirical count vector and a
/// probability vector.
pub fn total_variation(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    0.5 * counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| (c as f64 / n as f64 - p).abs())
        .sum::<f64>()
}
