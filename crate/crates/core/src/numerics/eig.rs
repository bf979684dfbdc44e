use super::{Matrix, NumericsError};

const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition of a dense symmetric matrix by cyclic Jacobi
/// rotations.
///
/// Returns eigenvalues sorted ascending and the matrix whose columns are the
/// matching orthonormal eigenvectors. Convergence is declared when the
/// off-diagonal Frobenius norm drops below `1e-12 * ||H||_F`; symmetric input
/// is required up to `1e-10` relative to the largest entry (floored at 1).
///
/// Accurate and foolproof at the dense desk scale (L <= 1024) this crate
/// targets; not meant for large sparse problems.
pub fn symmetric_eig(h: &Matrix) -> Result<(Vec<f64>, Matrix), NumericsError> {
    let n = h.rows();
    if h.cols() != n {
        return Err(NumericsError::InvalidShape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    if !h.as_slice().iter().all(|v| v.is_finite()) {
        return Err(NumericsError::NonFinite);
    }
    let max_asym = h.max_asymmetry();
    if max_asym > 1e-10 * h.max_abs().max(1.0) {
        return Err(NumericsError::NotSymmetric { max_asym });
    }

    let mut a = h.clone();
    let mut v = Matrix::identity(n);
    let norm_h: f64 = h.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-12 * norm_h;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = off_diagonal_norm(&a);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(NumericsError::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.at(i, i).partial_cmp(&a.at(j, j)).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.at(i, i)).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, j| v.at(i, order[j]));
    Ok((eigenvalues, eigenvectors))
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += 2.0 * a.at(p, q) * a.at(p, q);
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating a[p][q], accumulated into v.
/// Rotation angle via the stable tangent formula (Numerical Recipes 11.1).
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a.at(p, q);
    if apq == 0.0 {
        return;
    }
    let theta = 0.5 * (a.at(q, q) - a.at(p, p)) / apq;
    let t = if theta.abs() > 1e150 {
        // avoid theta^2 overflow; limit of the formula below
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    let n = a.rows();
    let h = t * apq;
    a.set(p, p, a.at(p, p) - h);
    a.set(q, q, a.at(q, q) + h);
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);
    for j in 0..n {
        if j != p && j != q {
            let ajp = a.at(j, p);
            let ajq = a.at(j, q);
            a.set(j, p, ajp - s * (ajq + ajp * tau));
            a.set(j, q, ajq + s * (ajp - ajq * tau));
            a.set(p, j, a.at(j, p));
            a.set(q, j, a.at(j, q));
        }
    }
    for j in 0..n {
        let vjp = v.at(j, p);
        let vjq = v.at(j, q);
        v.set(j, p, vjp - s * (vjq + vjp * tau));
        v.set(j, q, vjq + s * (vjp - vjq * tau));
    }
}
