use super::{gram_schmidt, Matrix};
use crate::error::{Error, Result};

/// Symmetric eigendecomposition `S = Q·diag(values)·Qᵗ`, values descending.
#[derive(Clone, Debug)]
pub struct SymEig {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps until the off-diagonal Frobenius mass is at most `1e-14·‖S‖_F`.
pub fn sym_eig(s: &Matrix) -> Result<SymEig> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch("sym_eig of a non-square matrix".into()));
    }
    let asym = s.asymmetry();
    if asym > 1e-12 * s.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let n = s.rows();
    let mut a = s.symmetrized();
    let mut v = Matrix::identity(n);
    let norm = a.frobenius();
    let target = 1e-14 * norm;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymEig { values, vectors })
}

/// Real Schur data of a matrix whose eigenvalues are real with pairwise
/// distinct moduli.
#[derive(Clone, Debug)]
pub struct SchurFlag {
    /// Orthonormal basis whose leading `k` columns span the invariant
    /// subspace of the `k` eigenvalues of largest modulus.
    pub basis: Matrix,
    /// Eigenvalues ordered by decreasing modulus.
    pub eigenvalues: Vec<f64>,
}

/// Deterministic orthogonal matrix in general position (two Householder
/// reflections), used to move exact invariant subspaces out of the way.
fn generic_rotation(n: usize, round: usize) -> Matrix {
    let reflector = |phase: f64| {
        let v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * phase).sin()).collect();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * v[j] / vv)
    };
    let base = 1.3 + round as f64;
    &reflector(base) * &reflector(2.7 * base)
}

/// Unshifted QR iteration. Converges to a triangular form with eigenvalues
/// ordered by decreasing modulus exactly when those moduli are distinct.
pub fn schur_by_modulus(g: &Matrix) -> Result<SchurFlag> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch("schur of a non-square matrix".into()));
    }
    let n = g.rows();
    let id = Matrix::identity(n);
    let scale = g.max_abs().max(f64::MIN_POSITIVE);
    for round in 0..3 {
        // Start from a generic conjugate: an exactly triangular input would
        // otherwise be a fixed point regardless of eigenvalue order.
        let mut acc = generic_rotation(n, round);
        let mut a = &(&acc.transpose() * g) * &acc;
        let mut converged = false;
        for _ in 0..50_000 {
            let lower =
                (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).fold(0.0f64, |m, (i, j)| m.max(a[(i, j)].abs()));
            if lower <= 1e-15 * scale {
                converged = true;
                break;
            }
            let q = gram_schmidt(&a, &id).map_err(|_| Error::NotRegular("singular matrix".into()))?;
            let r = &q.transpose() * &a;
            a = &r * &q;
            acc = &acc * &q;
        }
        if !converged {
            return Err(Error::NotRegular(
                "QR iteration did not converge (complex or equal-modulus eigenvalues)".into(),
            ));
        }
        let eigenvalues: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        if eigenvalues.contains(&0.0) {
            return Err(Error::NotRegular("zero eigenvalue".into()));
        }
        let mut moduli: Vec<f64> = eigenvalues.iter().map(|l| l.abs()).collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        if moduli.windows(2).any(|w| !(w[0] > w[1] * (1.0 + 1e-9))) {
            return Err(Error::NotRegular("eigenvalue moduli are not distinct".into()));
        }
        if eigenvalues.windows(2).all(|w| w[0].abs() > w[1].abs()) {
            return Ok(SchurFlag { basis: acc, eigenvalues });
        }
    }
    Err(Error::NotRegular("QR iteration settled in a non-dominant order".into()))
}
