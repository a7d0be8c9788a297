//! Dense linear algebra for small matrices: LU determinants and solves,
//! Jacobi symmetric eigendecomposition, inner-product Gram–Schmidt, SPD
//! matrix functions, and an extended-range singular value routine for
//! graded matrices.

mod eig;
mod graded;
mod matrix;

pub use eig::{schur_by_modulus, sym_eig, SchurFlag, SymEig};
pub use graded::log_singular_values_graded;
pub use matrix::Matrix;

use crate::error::{Error, Result};

/// LU factorization with partial pivoting, `P·A = L·U`.
struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

fn lu(m: &Matrix) -> Lu {
    assert!(m.is_square(), "LU of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut singular = false;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs())).unwrap_or(k);
        if a[(p, k)] == 0.0 {
            singular = true;
            continue;
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = t;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            let f = a[(i, k)] / a[(k, k)];
            a[(i, k)] = f;
            for j in k + 1..n {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    Lu { lu: a, perm, sign, singular }
}

/// Determinant by LU with partial pivoting; exactly 0 when a zero pivot occurs.
pub fn det(m: &Matrix) -> f64 {
    let f = lu(m);
    if f.singular {
        return 0.0;
    }
    (0..m.rows()).fold(f.sign, |acc, i| acc * f.lu[(i, i)])
}

/// Solves `A·X = B` for square non-singular `A`.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::DimensionMismatch("solve".into()));
    }
    let n = a.rows();
    let f = lu(a);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    if f.singular || (0..n).any(|i| f.lu[(i, i)].abs() <= 1e-300 * scale) {
        return Err(Error::Singular);
    }
    let mut x = Matrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        let mut y: Vec<f64> = f.perm.iter().map(|&p| b[(p, c)]).collect();
        for i in 0..n {
            for k in 0..i {
                y[i] -= f.lu[(i, k)] * y[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= f.lu[(i, k)] * y[k];
            }
            y[i] /= f.lu[(i, i)];
        }
        x.set_col(c, &y);
    }
    Ok(x)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    solve(a, &Matrix::identity(a.rows()))
}

/// Orthonormalizes the columns of `basis` with respect to `⟨u,v⟩ = uᵗ·g·v`.
///
/// Column j of the result lies in the span of input columns 1..j, so the
/// flag spanned by leading columns is preserved. Uses modified Gram–Schmidt
/// with one reorthogonalization pass.
pub fn gram_schmidt(basis: &Matrix, g: &Matrix) -> Result<Matrix> {
    let n = basis.rows();
    if g.rows() != n || g.cols() != n {
        return Err(Error::DimensionMismatch("gram_schmidt inner product".into()));
    }
    let ip = |u: &[f64], v: &[f64]| -> f64 {
        let gv = g.mul_vec(v);
        u.iter().zip(&gv).map(|(a, b)| a * b).sum()
    };
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(basis.cols());
    let mut gram_det = 1.0;
    for j in 0..basis.cols() {
        let mut v = basis.col(j);
        let n0 = ip(&v, &v);
        if !(n0 > 0.0) {
            return Err(Error::DependentColumns(0.0));
        }
        let s0 = 1.0 / n0.sqrt();
        v.iter_mut().for_each(|x| *x *= s0);
        for _ in 0..2 {
            for q in &out {
                let c = ip(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let r2 = ip(&v, &v);
        gram_det *= r2.max(0.0);
        if !(r2 > 1e-24) || gram_det <= 1e-12 {
            return Err(Error::DependentColumns(gram_det));
        }
        let s = 1.0 / r2.sqrt();
        v.iter_mut().for_each(|x| *x *= s);
        out.push(v);
    }
    Matrix::from_cols(&out)
}

/// Applies a scalar function to the eigenvalues of a symmetric matrix.
pub fn sym_fn(s: &Matrix, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    let e = sym_eig(s)?;
    let n = s.rows();
    let mut out = Matrix::zeros(n, n);
    for k in 0..n {
        let fk = f(e.values[k]);
        for i in 0..n {
            let vik = e.vectors[(i, k)] * fk;
            for j in 0..n {
                out[(i, j)] += vik * e.vectors[(j, k)];
            }
        }
    }
    Ok(out.symmetrized())
}

fn require_spd(s: &Matrix) -> Result<SymEig> {
    let e = sym_eig(s)?;
    if e.values.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NotSpd);
    }
    Ok(e)
}

/// Symmetric positive square root.
pub fn spd_sqrt(s: &Matrix) -> Result<Matrix> {
    require_spd(s)?;
    sym_fn(s, f64::sqrt)
}

/// Inverse of the symmetric positive square root.
pub fn spd_inv_sqrt(s: &Matrix) -> Result<Matrix> {
    require_spd(s)?;
    sym_fn(s, |l| 1.0 / l.sqrt())
}

/// Symmetric matrix logarithm of an SPD matrix.
pub fn spd_log(s: &Matrix) -> Result<Matrix> {
    require_spd(s)?;
    sym_fn(s, f64::ln)
}

/// Matrix exponential of a symmetric matrix.
pub fn sym_exp(s: &Matrix) -> Result<Matrix> {
    sym_fn(s, f64::exp)
}

/// Spanning vector of the kernel of a `k × (k+1)` matrix, from signed
/// maximal minors (the generalized cross product).
pub fn null_vector(m: &Matrix) -> Vec<f64> {
    let k = m.rows();
    assert_eq!(m.cols(), k + 1, "null_vector expects k x (k+1)");
    (0..=k)
        .map(|c| {
            let minor = Matrix::from_fn(k, k, |i, j| m[(i, if j < c { j } else { j + 1 })]);
            let d = if k == 0 { 1.0 } else { det(&minor) };
            if c % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_examples() {
        assert_eq!(det(&Matrix::identity(3)), 1.0);
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!((det(&m) - 1.0).abs() < 1e-15);
        let w = Matrix::from_rows(&[vec![0.0, 0.0, -1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap();
        assert!((det(&w) - 1.0).abs() < 1e-15);
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(det(&s), 0.0);
    }

    #[test]
    fn gram_schmidt_examples() {
        let b = Matrix::from_cols(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let q = gram_schmidt(&b, &Matrix::identity(2)).unwrap();
        assert!(q.max_diff(&Matrix::identity(2)) < 1e-15);
        let g = Matrix::diag(&[1.0, 4.0]);
        let q = gram_schmidt(&b, &g).unwrap();
        let want = Matrix::from_cols(&[vec![1.0, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!(q.max_diff(&want) < 1e-15);
        let dep = Matrix::from_cols(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(gram_schmidt(&dep, &Matrix::identity(2)), Err(Error::DependentColumns(_))));
    }

    #[test]
    fn spd_roots() {
        let r = spd_sqrt(&Matrix::diag(&[4.0, 0.25])).unwrap();
        assert!(r.max_diff(&Matrix::diag(&[2.0, 0.5])) < 1e-14);
        let r = spd_inv_sqrt(&Matrix::diag(&[9.0, 1.0 / 9.0])).unwrap();
        assert!(r.max_diff(&Matrix::diag(&[1.0 / 3.0, 3.0])) < 1e-14);
        assert!(spd_sqrt(&Matrix::identity(3)).unwrap().max_diff(&Matrix::identity(3)) < 1e-15);
        assert_eq!(spd_sqrt(&Matrix::diag(&[1.0, -1.0])), Err(Error::NotSpd));
    }

    #[test]
    fn solve_and_inverse() {
        let a = Matrix::from_rows(&[vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.0, 1.0, 2.0]]).unwrap();
        let inv = inverse(&a).unwrap();
        assert!((&a * &inv).max_diff(&Matrix::identity(3)) < 1e-14);
    }

    #[test]
    fn null_vector_is_in_kernel() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![0.5, -1.0, 4.0]]).unwrap();
        let v = null_vector(&m);
        for r in m.mul_vec(&v) {
            assert!(r.abs() < 1e-14);
        }
        assert!(v.iter().any(|x| x.abs() > 0.1));
    }
}
