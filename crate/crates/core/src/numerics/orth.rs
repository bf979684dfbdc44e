use super::{Matrix, NumericsError, OrbitalMatrix, RngStream};

/// Orthonormalize the columns of `m` in place by modified Gram-Schmidt with
/// one reorthogonalization pass (twice is enough to hold the 1e-10 gram
/// tolerance in double precision).
pub fn orthonormalize_columns(m: &mut Matrix) -> Result<(), NumericsError> {
    let (rows, cols) = (m.rows(), m.cols());
    if cols > rows {
        return Err(NumericsError::InvalidShape(format!(
            "cannot orthonormalize {cols} columns in dimension {rows}"
        )));
    }
    for j in 0..cols {
        for _pass in 0..2 {
            for i in 0..j {
                let dot: f64 = (0..rows).map(|r| m.at(r, i) * m.at(r, j)).sum();
                for r in 0..rows {
                    let v = m.at(r, j) - dot * m.at(r, i);
                    m.set(r, j, v);
                }
            }
        }
        let norm: f64 = (0..rows).map(|r| m.at(r, j) * m.at(r, j)).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(NumericsError::RankDeficient { col: j });
        }
        for r in 0..rows {
            m.set(r, j, m.at(r, j) / norm);
        }
    }
    Ok(())
}

/// Random N-fermion wavefunction on L sites: an L x N matrix of independent
/// standard normal draws, orthonormalized.
pub fn random_orthonormal(
    l: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<OrbitalMatrix, NumericsError> {
    if n == 0 || l == 0 || n > l {
        return Err(NumericsError::InvalidShape(format!(
            "need 1 <= N <= L, got L={l}, N={n}"
        )));
    }
    let mut m = Matrix::from_fn(l, n, |_, _| rng.normal());
    orthonormalize_columns(&mut m)?;
    OrbitalMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_case_normalizes_to_unit() {
        let mut rng = RngStream::new(3);
        let u = random_orthonormal(1, 1, &mut rng).unwrap();
        assert!((u.site_row(0)[0].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_case_is_orthonormal() {
        let mut rng = RngStream::new(17);
        // OrbitalMatrix::new re-validates the 1e-10 gram tolerance
        random_orthonormal(5, 2, &mut rng).unwrap();
    }

    #[test]
    fn large_case_holds_tolerance() {
        let mut rng = RngStream::new(7);
        let u = random_orthonormal(1024, 128, &mut rng).unwrap();
        assert!(u.matrix().as_slice().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn overfilled_shape_is_rejected() {
        let mut rng = RngStream::new(1);
        assert!(random_orthonormal(3, 4, &mut rng).is_err());
    }
}
