//! Partial flags in ℝⁿ with orthonormal representatives, the SL(n) action,
//! opposition, and unipotent transporters between opposite flags.

use crate::cartan::FaceSignature;
use crate::error::{Error, Result};
use crate::matnum::{det, gram_schmidt, inverse, null_vector, Matrix};

/// Determinant threshold for transversality of orthonormal column blocks.
pub const OPPOSITION_TOL: f64 = 1e-9;

/// A flag V_{i₁} ⊂ … ⊂ V_{i_l} = ℝⁿ. The first i_j columns of `basis` span
/// V_{i_j}; the basis is orthonormal and n × n.
#[derive(Clone, Debug)]
pub struct Flag {
    signature: FaceSignature,
    basis: Matrix,
}

/// Appends standard basis vectors to independent columns until there are n.
fn complete_basis(cols: &Matrix) -> Result<Matrix> {
    let n = cols.rows();
    let mut q = gram_schmidt(cols, &Matrix::identity(n))?;
    while q.cols() < n {
        // Pick the coordinate vector farthest from the current span.
        let mut best = (0, -1.0);
        for k in 0..n {
            let res = 1.0 - (0..q.cols()).map(|j| q[(k, j)] * q[(k, j)]).sum::<f64>();
            if res > best.1 {
                best = (k, res);
            }
        }
        let e = Matrix::from_fn(n, 1, |i, _| if i == best.0 { 1.0 } else { 0.0 });
        q = gram_schmidt(&q.hcat(&e), &Matrix::identity(n))?;
    }
    Ok(q)
}

impl Flag {
    /// Canonicalizes a basis. `basis` may have fewer than n columns as long
    /// as it spans the largest proper subspace; it is completed arbitrarily.
    pub fn new(signature: FaceSignature, basis: &Matrix) -> Result<Self> {
        let n = signature.n();
        if basis.rows() != n || basis.cols() > n {
            return Err(Error::DimensionMismatch(format!(
                "flag basis is {}x{}, expected {n} rows and at most {n} columns",
                basis.rows(),
                basis.cols()
            )));
        }
        let needed = signature.steps().last().copied().unwrap_or(0);
        if basis.cols() < needed {
            return Err(Error::DimensionMismatch(format!(
                "flag basis has {} columns, signature needs {needed}",
                basis.cols()
            )));
        }
        let basis = complete_basis(basis)?;
        Ok(Flag { signature, basis })
    }

    /// The full flag spanned by the leading columns of `basis`.
    pub fn full(basis: &Matrix) -> Result<Self> {
        Flag::new(FaceSignature::full(basis.rows()), basis)
    }

    pub fn n(&self) -> usize {
        self.signature.n()
    }

    pub fn signature(&self) -> &FaceSignature {
        &self.signature
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.signature.is_full()
    }

    /// Orthonormal basis of V_i (first i columns).
    pub fn subspace(&self, i: usize) -> Matrix {
        self.basis.leading_cols(i)
    }

    /// The same subspaces at the steps of a coarser signature.
    pub fn truncate(&self, face: &FaceSignature) -> Result<Flag> {
        if !face.is_face_of(&self.signature) {
            return Err(Error::SignatureMismatch(format!(
                "{:?} is not a face of {:?}",
                face.dims(),
                self.signature.dims()
            )));
        }
        Ok(Flag { signature: face.clone(), basis: self.basis.clone() })
    }

    /// A full flag containing this one (a completing chamber).
    pub fn complete(&self) -> Flag {
        Flag { signature: FaceSignature::full(self.n()), basis: self.basis.clone() }
    }

    /// Whether the two flags have the same signature and subspaces.
    pub fn same_as(&self, other: &Flag, tol: f64) -> bool {
        if self.signature != other.signature {
            return false;
        }
        self.signature.steps().iter().all(|&i| {
            // Residual of other's V_i after projecting onto self's V_i.
            let a = self.subspace(i);
            let b = other.subspace(i);
            let proj = &a * &(&a.transpose() * &b);
            (&b - &proj).max_abs() <= tol
        })
    }
}

/// The k_{w∘} element of SO(n): anti-diagonal of ones, with the (1,n) entry
/// signed so the determinant is 1. Maps the standard flag to its opposite.
pub fn longest_element(n: usize) -> Matrix {
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    Matrix::from_fn(n, n, |i, j| {
        if i + j + 1 != n {
            0.0
        } else if i == 0 {
            sign
        } else {
            1.0
        }
    })
}

/// The standard flag of a signature and its standard opposite, spanned by
/// trailing coordinate vectors.
pub fn standard_pair(signature: &FaceSignature) -> (Flag, Flag) {
    let n = signature.n();
    let s = Flag { signature: signature.clone(), basis: Matrix::identity(n) };
    let o = Flag { signature: signature.involute(), basis: reversal(n) };
    (s, o)
}

/// Smallest |det(V_{i_j} | W_{n−i_j})| over the steps; positive iff opposite.
pub fn transversality(x: &Flag, y: &Flag) -> Result<f64> {
    if y.signature != x.signature.involute() {
        return Err(Error::SignatureMismatch(format!(
            "{:?} cannot be opposite to {:?}",
            y.signature.dims(),
            x.signature.dims()
        )));
    }
    let n = x.n();
    Ok(x.signature
        .steps()
        .iter()
        .map(|&i| det(&x.subspace(i).hcat(&y.subspace(n - i))).abs())
        .fold(f64::INFINITY, f64::min))
}

pub fn is_opposite(x: &Flag, y: &Flag) -> Result<bool> {
    Ok(transversality(x, y)? > OPPOSITION_TOL)
}

/// g·x for g ∈ SL(n).
pub fn act(g: &Matrix, x: &Flag) -> Result<Flag> {
    if g.rows() != x.n() || !g.is_square() {
        return Err(Error::DimensionMismatch("act".into()));
    }
    let d = det(g);
    if (d - 1.0).abs() > 1e-8 {
        return Err(Error::NotUnimodular(d));
    }
    Flag::new(x.signature.clone(), &(g * &x.basis))
}

/// The flag of o-orthogonal complements, ⟨u,v⟩_o = uᵗo⁻¹v: the far end of
/// the geodesic from x through o.
pub fn ortho_opposite(x: &Flag, o: &Matrix) -> Result<Flag> {
    let oinv = inverse(o)?;
    let q = gram_schmidt(&x.basis, &oinv)?;
    let n = x.n();
    let rev = Matrix::from_fn(n, n, |i, j| q[(i, n - 1 - j)]);
    Flag::new(x.signature.involute(), &rev)
}

/// Reversal matrix J.
fn reversal(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| if i + j + 1 == n { 1.0 } else { 0.0 })
}

/// For a full flag z' opposite to the standard flag, the upper unipotent u
/// with z' = u·(standard opposite). Uses J·z' = L·T (LU without pivoting).
fn unipotent_to_standard_opposite(zp: &Matrix) -> Result<Matrix> {
    let n = zp.rows();
    let j = reversal(n);
    let mut a = &j * zp;
    let mut l = Matrix::identity(n);
    for k in 0..n {
        let piv = a[(k, k)];
        if piv.abs() <= 1e-14 {
            return Err(Error::NotOpposite);
        }
        for i in k + 1..n {
            let f = a[(i, k)] / piv;
            l[(i, k)] = f;
            for c in k..n {
                a[(i, c)] -= f * a[(k, c)];
            }
        }
    }
    Ok(&(&j * &l) * &j)
}

/// The element u of the unipotent radical of the stabilizer of the full
/// flag x with u·z = y, for z and y opposite to x.
pub fn unipotent_transporter(x: &Flag, z: &Flag, y: &Flag) -> Result<Matrix> {
    if !x.is_full() {
        return Err(Error::SignatureMismatch("transporter base must be a full flag".into()));
    }
    if !is_opposite(x, z)? || !is_opposite(x, y)? {
        return Err(Error::NotOpposite);
    }
    let k = &x.basis;
    let kt = k.transpose();
    let nz = unipotent_to_standard_opposite(&(&kt * &z.basis))?;
    let ny = unipotent_to_standard_opposite(&(&kt * &y.basis))?;
    let nz_inv = inverse(&nz)?;
    Ok(&(&(k * &ny) * &nz_inv) * &kt)
}

/// Unit vectors b_i spanning V_i ∩ W_{n−i+1} for opposite full flags x, y;
/// the flat joining x and y is {B·diag(e^a)·Bᵗ}.
pub fn joint_basis(x: &Flag, y: &Flag) -> Result<Matrix> {
    if !x.is_full() || !is_opposite(x, y)? {
        return Err(Error::NotOpposite);
    }
    let n = x.n();
    let mut cols = Vec::with_capacity(n);
    for i in 1..=n {
        let xi = x.subspace(i);
        // Orthogonal complement of W_{n−i+1} is spanned by the remaining y columns.
        let yrest = y.basis.col_range(n - i + 1, n);
        let c = if i == 1 { vec![1.0] } else { null_vector(&(&yrest.transpose() * &xi)) };
        let mut b = xi.mul_vec(&c);
        let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        b.iter_mut().for_each(|v| *v /= norm);
        cols.push(b);
    }
    Matrix::from_cols(&cols)
}
