use super::*;
use crate::numerics::{determinant, random_orthonormal, Matrix};
use crate::stats::hypothesis::{chi_square_critical, chi_square_one_sample, total_variation};

fn ledger() -> FlopLedger {
    FlopLedger::new()
}

#[test]
fn permutation_of_one_is_trivial() {
    let mut rng = RngStream::new(1);
    for _ in 0..10 {
        assert_eq!(draw_permutation(1, &mut rng).order(), &[0]);
    }
}

#[test]
fn permutation_of_two_is_balanced() {
    let mut rng = RngStream::new(2);
    let n = 10_000;
    let mut first = 0u32;
    for _ in 0..n {
        if draw_permutation(2, &mut rng).order() == [0, 1] {
            first += 1;
        }
    }
    let freq = first as f64 / n as f64;
    assert!((freq - 0.5).abs() < 0.01, "freq {freq}");
}

#[test]
fn permutation_of_four_is_uniform() {
    let mut rng = RngStream::new(3);
    let n = 100_000;
    let mut counts = std::collections::HashMap::new();
    for _ in 0..n {
        *counts.entry(draw_permutation(4, &mut rng).order().to_vec()).or_insert(0u64) += 1;
    }
    assert_eq!(counts.len(), 24);
    let observed: Vec<u64> = counts.values().copied().collect();
    let probs = vec![1.0 / 24.0; 24];
    let (stat, df) = chi_square_one_sample(&observed, &probs, 5.0);
    let crit = chi_square_critical(df, 0.001);
    assert!(stat < crit, "chi2 {stat} >= {crit}");
}

#[test]
fn permutation_rejects_non_bijections() {
    assert!(Permutation::new(vec![0, 0]).is_err());
    assert!(Permutation::new(vec![1, 2]).is_err());
    assert!(Permutation::new(vec![2, 0, 1]).is_ok());
}

#[test]
fn sample_config_rejects_repeats() {
    assert!(SampleConfig::new(vec![1, 3, 1]).is_err());
    assert!(SampleConfig::new(vec![3, 1, 0]).is_ok());
}

#[test]
fn first_elimination_row_is_stored_unchanged() {
    let mut state = EliminationState::new(Permutation::identity(3));
    let mut led = ledger();
    state.advance(vec![1.0, 0.0, 0.0], &mut led).unwrap();
    assert_eq!(state.reduced_row(0), &[1.0, 0.0, 0.0]);
    assert_eq!(state.pivot(0), 1.0);
}

#[test]
fn triangular_rows_pass_through() {
    let mut state = EliminationState::new(Permutation::identity(3));
    let mut led = ledger();
    state.advance(vec![1.0, 0.0, 0.0], &mut led).unwrap();
    state.advance(vec![0.0, 1.0, 0.0], &mut led).unwrap();
    assert_eq!(state.reduced_row(1), &[0.0, 1.0, 0.0]);
}

#[test]
fn degenerate_row_is_detected() {
    let mut state = EliminationState::new(Permutation::identity(3));
    let mut led = ledger();
    state.advance(vec![0.5, 0.25, -1.0], &mut led).unwrap();
    // linearly dependent on the first row up to roundoff
    let err = state.advance(vec![0.5, 0.25, -1.0], &mut led);
    assert!(matches!(err, Err(SampleError::DegeneratePivot { .. })));
}

/// Orthonormal basis of the row span, by classical Gram-Schmidt. Test oracle,
/// independent of the elimination path.
fn gram_schmidt_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for q in &basis {
            let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= d * qi;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        basis.push(v.into_iter().map(|x| x / norm).collect());
    }
    basis
}

fn projector(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let basis = gram_schmidt_rows(rows);
    let n = rows[0].len();
    let mut p = vec![vec![0.0; n]; n];
    for q in &basis {
        for i in 0..n {
            for j in 0..n {
                p[i][j] += q[i] * q[j];
            }
        }
    }
    p
}

#[test]
fn elimination_preserves_row_space() {
    let mut rng = RngStream::new(8);
    let n = 5;
    let rows: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| rng.normal()).collect()).collect();
    let mut state = EliminationState::new(Permutation::identity(n));
    let mut led = ledger();
    for row in &rows {
        state.advance(row.clone(), &mut led).unwrap();
    }
    // triangular shape
    for j in 0..3 {
        for col in 0..j {
            assert_eq!(state.reduced_row(j)[col], 0.0);
        }
        assert!(state.pivot(j).abs() > 1e-12);
    }
    // same span as the input rows: equal orthogonal projectors
    let reduced: Vec<Vec<f64>> = (0..3).map(|j| state.reduced_row(j).to_vec()).collect();
    let p_in = projector(&rows);
    let p_red = projector(&reduced);
    for i in 0..n {
        for j in 0..n {
            assert!(
                (p_in[i][j] - p_red[i][j]).abs() < 1e-10,
                "projectors differ at ({i},{j})"
            );
        }
    }
}

#[test]
fn normal_vector_with_no_rows_is_unit_scalar() {
    let state = EliminationState::new(Permutation::identity(3));
    let h = state.normal_vector(1, &mut ledger()).unwrap();
    assert_eq!(h, vec![1.0]);
}

#[test]
fn normal_vector_on_axis_rows_is_next_axis() {
    let mut state = EliminationState::new(Permutation::identity(4));
    let mut led = ledger();
    state.advance(vec![1.0, 0.0, 0.0, 0.0], &mut led).unwrap();
    state.advance(vec![0.0, 1.0, 0.0, 0.0], &mut led).unwrap();
    let h = state.normal_vector(3, &mut led).unwrap();
    assert_eq!(h, vec![0.0, 0.0, 1.0]);
}

#[test]
fn normal_vector_matches_gram_schmidt_residual() {
    let mut rng = RngStream::new(21);
    let n = 6;
    let k = 4;
    let rows: Vec<Vec<f64>> = (0..k - 1).map(|_| (0..n).map(|_| rng.normal()).collect()).collect();
    let mut state = EliminationState::new(Permutation::identity(n));
    let mut led = ledger();
    for row in &rows {
        state.advance(row.clone(), &mut led).unwrap();
    }
    let h = state.normal_vector(k, &mut led).unwrap();

    let norm: f64 = h.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-10, "norm {norm}");
    for row in &rows {
        let resid: f64 = row[..k].iter().zip(&h).map(|(a, b)| a * b).sum();
        assert!(resid.abs() < 1e-8, "orthogonality residual {resid}");
    }

    // compare with the last Gram-Schmidt residual direction of the oracle:
    // orthonormalize the k-1 truncated rows plus e_k and take the final basis
    // vector (up to sign).
    let mut truncated: Vec<Vec<f64>> = rows.iter().map(|r| r[..k].to_vec()).collect();
    let mut ek = vec![0.0; k];
    ek[k - 1] = 1.0;
    truncated.push(ek);
    let oracle = gram_schmidt_rows(&truncated).pop().unwrap();
    let dot: f64 = oracle.iter().zip(&h).map(|(a, b)| a * b).sum();
    assert!((dot.abs() - 1.0).abs() < 1e-8, "|<oracle, h>| = {}", dot.abs());
}

#[test]
fn first_step_weights_are_squared_amplitudes() {
    let mut rng = RngStream::new(4);
    let u = random_orthonormal(6, 3, &mut rng).unwrap();
    let perm = Permutation::new(vec![1, 0, 2]).unwrap();
    let state = EliminationState::new(perm.clone());
    let h = state.normal_vector(1, &mut ledger()).unwrap();
    let w = conditional_weights(&u, &perm, &h, &[], &mut ledger()).unwrap();
    for x in 0..6 {
        let amp = u.site_row(x)[1];
        assert!((w[x] - amp * amp).abs() < 1e-14);
    }
}

#[test]
fn identity_orbitals_give_uniform_weights() {
    let u = OrbitalMatrix::new(Matrix::identity(4)).unwrap();
    let mut rng = RngStream::new(5);
    let mut led = ledger();
    let perm = draw_permutation(4, &mut rng);
    let mut state = EliminationState::new(perm.clone());
    let x1 = perm.order()[0];
    let row: Vec<f64> = perm.order().iter().map(|&c| u.site_row(x1)[c]).collect();
    state.advance(row, &mut led).unwrap();
    let h = state.normal_vector(2, &mut led).unwrap();
    let w = conditional_weights(&u, &perm, &h, &[x1], &mut led).unwrap();
    for (x, &wx) in w.iter().enumerate() {
        let want = if x == x1 { 0.0 } else { 1.0 / 3.0 };
        assert!((wx - want).abs() < 1e-12, "site {x}: {wx}");
    }
}

/// Weights at step k are the determinant ratios
/// |det U_(x1..xk),(m1..mk)|^2 / |det U_(x1..x_{k-1}),(m1..m_{k-1})|^2,
/// normalized over candidates.
#[test]
fn second_step_weights_match_normalized_det_ratios() {
    let mut rng = RngStream::new(12);
    let u = random_orthonormal(4, 2, &mut rng).unwrap();
    let perm = Permutation::identity(2);
    let x1 = 2usize;

    let mut led = ledger();
    let mut state = EliminationState::new(perm.clone());
    let row: Vec<f64> = perm.order().iter().map(|&c| u.site_row(x1)[c]).collect();
    state.advance(row, &mut led).unwrap();
    let h = state.normal_vector(2, &mut led).unwrap();
    let w = conditional_weights(&u, &perm, &h, &[x1], &mut led).unwrap();

    let det1 = u.site_row(x1)[0];
    let mut ratios = vec![0.0; 4];
    for x2 in 0..4 {
        if x2 == x1 {
            continue;
        }
        let sub = Matrix::new(
            2,
            2,
            vec![u.site_row(x1)[0], u.site_row(x1)[1], u.site_row(x2)[0], u.site_row(x2)[1]],
        )
        .unwrap();
        ratios[x2] = determinant(&sub).powi(2) / det1.powi(2);
    }
    let ratio_sum: f64 = ratios.iter().sum();
    for x2 in 0..4 {
        assert!(
            (w[x2] - ratios[x2] / ratio_sum).abs() < 1e-10,
            "site {x2}: weight {} vs normalized ratio {}",
            w[x2],
            ratios[x2] / ratio_sum
        );
    }
}

#[test]
fn weights_sum_to_one_at_every_step() {
    let mut rng = RngStream::new(33);
    let u = random_orthonormal(8, 4, &mut rng).unwrap();
    let mut led = ledger();
    let perm = draw_permutation(4, &mut rng);
    let mut state = EliminationState::new(perm.clone());
    let mut chosen: Vec<usize> = Vec::new();
    for k in 1..=4usize {
        let h = state.normal_vector(k, &mut led).unwrap();
        let w = conditional_weights(&u, &perm, &h, &chosen, &mut led).unwrap();
        let sum: f64 = w.iter().sum();
        assert!((sum - 1.0).abs() < 1e-8, "step {k}: sum {sum}");
        let x = w.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap().0;
        chosen.push(x);
        if k < 4 {
            let row: Vec<f64> = perm.order().iter().map(|&c| u.site_row(x)[c]).collect();
            state.advance(row, &mut led).unwrap();
        }
    }
}

#[test]
fn point_mass_orbital_always_selects_its_site() {
    let mut m = Matrix::zeros(5, 1);
    m.set(2, 0, 1.0);
    let u = OrbitalMatrix::new(m).unwrap();
    let mut rng = RngStream::new(6);
    let mut led = ledger();
    for _ in 0..50 {
        let config = ffs_sample(&u, &mut rng, &mut led).unwrap();
        assert_eq!(config.positions(), &[2]);
    }
}

#[test]
fn full_filling_returns_every_site() {
    let mut rng = RngStream::new(7);
    // random 3x3 orthogonal U: the set must always be {0,1,2}
    let u = random_orthonormal(3, 3, &mut rng).unwrap();
    let mut led = ledger();
    for _ in 0..50 {
        let config = ffs_sample(&u, &mut rng, &mut led).unwrap();
        assert_eq!(config.sorted_set(), vec![0, 1, 2]);
    }
}

#[test]
fn sampled_sets_match_determinant_distribution() {
    let mut rng = RngStream::new(42);
    let u = random_orthonormal(4, 2, &mut rng).unwrap();
    let sets: Vec<Vec<usize>> = vec![
        vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3],
    ];
    let probs: Vec<f64> = sets
        .iter()
        .map(|s| {
            let m = Matrix::new(
                2,
                2,
                vec![
                    u.site_row(s[0])[0],
                    u.site_row(s[0])[1],
                    u.site_row(s[1])[0],
                    u.site_row(s[1])[1],
                ],
            )
            .unwrap();
            determinant(&m).powi(2)
        })
        .collect();
    let total: f64 = probs.iter().sum();
    assert!((total - 1.0).abs() < 1e-10, "set probabilities sum to {total}");

    let n_samples = 20_000;
    let mut counts = vec![0u64; sets.len()];
    let mut led = ledger();
    for _ in 0..n_samples {
        let set = ffs_sample(&u, &mut rng, &mut led).unwrap().sorted_set();
        let idx = sets.iter().position(|s| *s == set).unwrap();
        counts[idx] += 1;
    }
    let tv = total_variation(&counts, &probs);
    assert!(tv < 0.05, "TV {tv}");
}

/// Mixture identity on a small instance: summing the conditional chain over
/// all permutations reproduces |det U_{x,n}|^2 for every ordered tuple.
#[test]
fn permutation_mixture_reproduces_determinants() {
    let mut rng = RngStream::new(15);
    let u = random_orthonormal(4, 2, &mut rng).unwrap();
    let perms = [Permutation::new(vec![0, 1]).unwrap(), Permutation::new(vec![1, 0]).unwrap()];
    let mut worst = 0.0f64;
    for x1 in 0..4 {
        for x2 in 0..4 {
            if x1 == x2 {
                continue;
            }
            let mut mix = 0.0;
            for perm in &perms {
                let mut led = ledger();
                let mut state = EliminationState::new(perm.clone());
                let h1 = state.normal_vector(1, &mut led).unwrap();
                let w1 = conditional_weights(&u, perm, &h1, &[], &mut led).unwrap();
                let row: Vec<f64> = perm.order().iter().map(|&c| u.site_row(x1)[c]).collect();
                state.advance(row, &mut led).unwrap();
                let h2 = state.normal_vector(2, &mut led).unwrap();
                let w2 = conditional_weights(&u, perm, &h2, &[x1], &mut led).unwrap();
                mix += w1[x1] * w2[x2];
            }
            let det = determinant(
                &Matrix::new(
                    2,
                    2,
                    vec![
                        u.site_row(x1)[0],
                        u.site_row(x1)[1],
                        u.site_row(x2)[0],
                        u.site_row(x2)[1],
                    ],
                )
                .unwrap(),
            );
            worst = worst.max((mix - det * det).abs());
        }
    }
    assert!(worst < 1e-10, "max mixture deviation {worst}");
}

#[test]
fn marginal_of_one_follows_kernel_diagonal() {
    let mut rng = RngStream::new(9);
    let u = random_orthonormal(5, 3, &mut rng).unwrap();
    let diag = u.kernel_diagonal();
    let n_samples = 200_000;
    let mut counts = vec![0u64; 5];
    let mut led = ledger();
    for _ in 0..n_samples {
        let config = ffs_marginal_sample(&u, 1, &mut rng, &mut led).unwrap();
        counts[config.positions()[0]] += 1;
    }
    for x in 0..5 {
        let want = diag[x] / 3.0; // K_xx / N
        let got = counts[x] as f64 / n_samples as f64;
        let se = (want * (1.0 - want) / n_samples as f64).sqrt();
        assert!((got - want).abs() < 4.0 * se, "site {x}: got {got}, want {want}");
    }
}

#[test]
fn marginal_validates_bounds() {
    let mut rng = RngStream::new(10);
    let u = random_orthonormal(4, 2, &mut rng).unwrap();
    assert!(ffs_marginal_sample(&u, 0, &mut rng, &mut ledger()).is_err());
    assert!(ffs_marginal_sample(&u, 3, &mut rng, &mut ledger()).is_err());
}

#[test]
fn pauli_exclusion_holds_across_samples() {
    let mut rng = RngStream::new(11);
    let u = random_orthonormal(10, 5, &mut rng).unwrap();
    let mut led = ledger();
    for _ in 0..200 {
        let config = ffs_sample(&u, &mut rng, &mut led).unwrap();
        let set = config.sorted_set();
        assert_eq!(set.len(), 5);
        assert!(set.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn ledger_is_deterministic_given_seed() {
    let mut rng1 = RngStream::new(77);
    let mut rng2 = RngStream::new(77);
    let u = random_orthonormal(16, 4, &mut RngStream::new(1)).unwrap();
    let mut led1 = ledger();
    let mut led2 = ledger();
    let c1 = ffs_sample(&u, &mut rng1, &mut led1).unwrap();
    let c2 = ffs_sample(&u, &mut rng2, &mut led2).unwrap();
    assert_eq!(c1, c2);
    assert_eq!(led1, led2);
}

mod metropolis_variant {
    use super::*;
    use crate::ffs::metropolis::ffs_sample_metropolis_step;

    #[test]
    fn out_of_domain_proposals_are_rejected() {
        // proposal width far larger than the domain: most proposals land
        // outside and must leave the current point in place
        let interval = Interval { lo: 0.0, hi: 1.0, proposal_width: 50.0 };
        let orbitals = |x: f64| vec![(2.0f64).sqrt() * (std::f64::consts::PI * x).sin()];
        let mut rng = RngStream::new(14);
        let mut led = ledger();
        for _ in 0..100 {
            let xs =
                ffs_sample_continuous(orbitals, interval, 1, 20, &mut rng, &mut led).unwrap();
            assert!(xs[0] > 0.0 && xs[0] < 1.0);
        }
    }

    #[test]
    fn zero_weight_everywhere_reports_start_failure() {
        let interval = Interval { lo: 0.0, hi: 1.0, proposal_width: 0.1 };
        let orbitals = |_x: f64| vec![0.0];
        let mut rng = RngStream::new(15);
        let err = ffs_sample_continuous(orbitals, interval, 1, 10, &mut rng, &mut ledger());
        assert!(matches!(err, Err(SampleError::ZeroWeightStart { .. })));
    }

    #[test]
    fn discrete_variant_avoids_chosen_sites() {
        let mut rng = RngStream::new(16);
        let u = random_orthonormal(6, 3, &mut rng).unwrap();
        let mut led = ledger();
        for _ in 0..200 {
            let config = ffs_sample_discrete_mh(&u, 50, &mut rng, &mut led).unwrap();
            let set = config.sorted_set();
            assert_eq!(set.len(), 3);
            assert!(set.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        let interval = Interval { lo: 0.0, hi: 1.0, proposal_width: 0.1 };
        let orbitals = |_x: f64| vec![1.0];
        let mut rng = RngStream::new(17);
        assert!(ffs_sample_metropolis_step(orbitals, &interval, 1, 0, &mut rng, &mut ledger())
            .is_err());
        assert!(ffs_sample_continuous(
            |_x| vec![1.0],
            Interval { lo: 1.0, hi: 0.0, proposal_width: 0.1 },
            1,
            10,
            &mut rng,
            &mut ledger()
        )
        .is_err());
    }
}
