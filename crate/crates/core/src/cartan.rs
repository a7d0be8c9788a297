//! Cartan data of type A_{n−1}: types, the opposition involution, the
//! chamber corners, faces and their dual bases.
//!
//! The Cartan subspace is modeled as traceless coordinate n-vectors with the
//! Euclidean dot product, so a normalized type is exactly a unit vector.

use crate::error::{Error, Result};
use crate::matnum::{solve, Matrix};

const TYPE_TOL: f64 = 1e-12;

/// A type λ = (λ₁ > … > λ_l) with multiplicities, normalized by
/// Σ mᵢλᵢ = 0 and Σ mᵢλᵢ² = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeVector {
    n: usize,
    values: Vec<f64>,
    mults: Vec<usize>,
}

fn check_shape(n: usize, values: &[f64], mults: &[usize]) -> Result<()> {
    if values.len() != mults.len() || values.is_empty() {
        return Err(Error::BadMultiplicities("values and mults differ in length".into()));
    }
    if mults.contains(&0) {
        return Err(Error::BadMultiplicities("zero multiplicity".into()));
    }
    let total: usize = mults.iter().sum();
    if total != n {
        return Err(Error::BadMultiplicities(format!("multiplicities sum to {total}, expected {n}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite type value".into()));
    }
    if values.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::NotDecreasing);
    }
    Ok(())
}

impl TypeVector {
    /// Validates a type as given.
    pub fn new(n: usize, values: Vec<f64>, mults: Vec<usize>) -> Result<Self> {
        check_shape(n, &values, &mults)?;
        let sum: f64 = values.iter().zip(&mults).map(|(v, &m)| v * m as f64).sum();
        let sq: f64 = values.iter().zip(&mults).map(|(v, &m)| v * v * m as f64).sum();
        if sum.abs() > TYPE_TOL || (sq - 1.0).abs() > TYPE_TOL {
            return Err(Error::Invalid(format!("type is not normalized (Σmλ = {sum:.3e}, Σmλ² = {sq:.15})")));
        }
        Ok(TypeVector { n, values, mults })
    }

    /// Projects raw values onto the constraint set: subtracts the weighted
    /// mean and rescales to unit weighted square sum.
    pub fn normalized(n: usize, values: Vec<f64>, mults: Vec<usize>) -> Result<Self> {
        check_shape(n, &values, &mults)?;
        let mean = values.iter().zip(&mults).map(|(v, &m)| v * m as f64).sum::<f64>() / n as f64;
        let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
        let sq: f64 = centered.iter().zip(&mults).map(|(v, &m)| v * v * m as f64).sum();
        if !(sq > 0.0) {
            return Err(Error::NotDecreasing);
        }
        let s = 1.0 / sq.sqrt();
        TypeVector::new(n, centered.iter().map(|v| v * s).collect(), mults)
    }

    /// The regular type proportional to (n−1, n−3, …, 1−n).
    pub fn barycentric(n: usize) -> Self {
        let raw = (0..n).map(|i| (n as f64 - 1.0) - 2.0 * i as f64).collect();
        TypeVector::normalized(n, raw, vec![1; n]).expect("barycentric type is valid for n >= 2")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mults(&self) -> &[usize] {
        &self.mults
    }

    pub fn is_regular(&self) -> bool {
        self.mults.iter().all(|&m| m == 1)
    }

    /// The face this type is interior to.
    pub fn signature(&self) -> FaceSignature {
        let mut acc = 0;
        let dims = self.mults.iter().map(|m| {
            acc += m;
            acc
        });
        FaceSignature { n: self.n, dims: dims.collect() }
    }

    /// ι(λ₁,…,λ_l) = (−λ_l,…,−λ₁), multiplicities reversed.
    pub fn involute(&self) -> Self {
        TypeVector {
            n: self.n,
            values: self.values.iter().rev().map(|v| -v).collect(),
            mults: self.mults.iter().rev().copied().collect(),
        }
    }

    /// Expands to an n-vector repeating each λᵢ mᵢ times.
    pub fn embed(&self) -> CartanVector {
        let coords = self.values.iter().zip(&self.mults).flat_map(|(&v, &m)| std::iter::repeat_n(v, m)).collect();
        CartanVector { coords }
    }
}

/// An element of the Cartan subspace: a traceless n-vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanVector {
    coords: Vec<f64>,
}

impl CartanVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let scale = coords.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        let sum: f64 = coords.iter().sum();
        if coords.is_empty() || sum.abs() > 1e-10 * scale {
            return Err(Error::Invalid(format!("Cartan vector is not traceless (sum {sum:.3e})")));
        }
        Ok(CartanVector { coords })
    }

    pub fn zero(n: usize) -> Self {
        CartanVector { coords: vec![0.0; n] }
    }

    /// Builds from coordinates, removing any trace (used for computed values).
    pub(crate) fn from_raw(mut coords: Vec<f64>) -> Self {
        let mean = coords.iter().sum::<f64>() / coords.len() as f64;
        coords.iter_mut().for_each(|c| *c -= mean);
        CartanVector { coords }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Reverse-negate, the opposition involution on coordinates.
    pub fn involute(&self) -> Self {
        CartanVector { coords: self.coords.iter().rev().map(|c| -c).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        CartanVector { coords: self.coords.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &CartanVector) -> Self {
        CartanVector { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &CartanVector) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_diff(&self, other: &CartanVector) -> f64 {
        self.coords.iter().zip(&other.coords).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// The Euclidean inner product on embedded coordinates.
pub fn a_inner(u: &CartanVector, v: &CartanVector) -> Result<f64> {
    if u.n() != v.n() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", u.n(), v.n())));
    }
    Ok(u.coords.iter().zip(&v.coords).map(|(a, b)| a * b).sum())
}

/// Dimension steps i₁ < … < i_l = n of a flag type; identifies a face of the
/// chamber through its Grassmannian steps {i₁,…,i_{l−1}}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FaceSignature {
    n: usize,
    dims: Vec<usize>,
}

impl FaceSignature {
    pub fn new(n: usize, dims: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadMultiplicities("ambient dimension must be at least 2".into()));
        }
        if dims.last() != Some(&n) {
            return Err(Error::BadMultiplicities("signature must end at n".into()));
        }
        if dims[0] == 0 || dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadMultiplicities("signature must be strictly increasing from 1".into()));
        }
        Ok(FaceSignature { n, dims })
    }

    /// The full signature (1, 2, …, n): the chamber itself.
    pub fn full(n: usize) -> Self {
        FaceSignature { n, dims: (1..=n).collect() }
    }

    /// Signature with a single proper step j: the corner ξ_j.
    pub fn corner(n: usize, j: usize) -> Self {
        FaceSignature { n, dims: vec![j, n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Proper steps J_τ = {i₁,…,i_{l−1}}.
    pub fn steps(&self) -> &[usize] {
        &self.dims[..self.dims.len() - 1]
    }

    pub fn is_full(&self) -> bool {
        self.dims.len() == self.n
    }

    pub fn mults(&self) -> Vec<usize> {
        let mut prev = 0;
        self.dims
            .iter()
            .map(|&d| {
                let m = d - prev;
                prev = d;
                m
            })
            .collect()
    }

    /// Signature of flags opposite to flags of this signature.
    pub fn involute(&self) -> Self {
        let mut dims: Vec<usize> = self.steps().iter().rev().map(|&i| self.n - i).collect();
        dims.push(self.n);
        FaceSignature { n: self.n, dims }
    }

    /// Whether `self` is a face of `other` (its steps are a subset).
    pub fn is_face_of(&self, other: &FaceSignature) -> bool {
        self.n == other.n && self.steps().iter().all(|s| other.steps().contains(s))
    }

    /// All non-empty faces of the chamber in dimension n, including the chamber.
    pub fn all_faces(n: usize) -> Vec<FaceSignature> {
        let mut out = Vec::new();
        for mask in 1u32..(1 << (n - 1)) {
            let mut dims: Vec<usize> = (1..n).filter(|j| mask & (1 << (j - 1)) != 0).collect();
            dims.push(n);
            out.push(FaceSignature { n, dims });
        }
        out
    }
}

/// The corner type ξ_j: two blocks with multiplicities (j, n−j).
pub fn corner(n: usize, j: usize) -> TypeVector {
    assert!(n >= 2 && (1..n).contains(&j), "corner index out of range");
    let (nf, jf) = (n as f64, j as f64);
    let l1 = ((nf - jf) / (nf * jf)).sqrt();
    let l2 = -(jf / (nf * (nf - jf))).sqrt();
    TypeVector { n, values: vec![l1, l2], mults: vec![j, n - j] }
}

/// The corners ξ₁,…,ξ_{n−1} of the chamber.
pub fn corner_types(n: usize) -> Vec<TypeVector> {
    (1..n).map(|j| corner(n, j)).collect()
}

/// Dual vectors α_j^τ, j ∈ J_τ, in the span of the corners of τ with
/// ⟨α_j, ξ_i⟩ = δ_ij. Ordered like `face.steps()`.
pub fn dual_basis(face: &FaceSignature) -> Result<Vec<CartanVector>> {
    let xs: Vec<CartanVector> = face.steps().iter().map(|&j| corner(face.n(), j).embed()).collect();
    let k = xs.len();
    let gram = Matrix::from_fn(k, k, |a, b| a_inner(&xs[a], &xs[b]).expect("same dimension"));
    let inv = solve(&gram, &Matrix::identity(k)).map_err(|_| Error::SingularGram)?;
    Ok((0..k)
        .map(|j| {
            let mut v = CartanVector::zero(face.n());
            for (b, xb) in xs.iter().enumerate() {
                v = v.add(&xb.scale(inv[(j, b)]));
            }
            v
        })
        .collect())
}

/// Orthogonal projection onto the span of the corners of `face`.
pub fn project_onto_face(v: &CartanVector, face: &FaceSignature) -> Result<CartanVector> {
    if v.n() != face.n() {
        return Err(Error::DimensionMismatch("projection".into()));
    }
    let alphas = dual_basis(face)?;
    let mut out = CartanVector::zero(face.n());
    for (&j, a) in face.steps().iter().zip(&alphas) {
        out = out.add(&a.scale(a_inner(v, &corner(face.n(), j).embed())?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn make_type_examples() {
        assert!(TypeVector::new(2, vec![1.0 / S2, -1.0 / S2], vec![1, 1]).is_ok());
        assert!(TypeVector::new(3, vec![1.0 / S2, 0.0, -1.0 / S2], vec![1, 1, 1]).is_ok());
        assert_eq!(TypeVector::new(2, vec![1.0, 2.0], vec![1, 1]), Err(Error::NotDecreasing));
        assert!(matches!(TypeVector::new(3, vec![1.0, -1.0], vec![1, 1]), Err(Error::BadMultiplicities(_))));
        let t = TypeVector::normalized(3, vec![5.0, 1.0], vec![1, 2]).unwrap();
        let e = t.embed();
        assert!(e.coords().iter().sum::<f64>().abs() < 1e-15);
        assert!((e.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn involute_examples() {
        let t = TypeVector::new(2, vec![1.0 / S2, -1.0 / S2], vec![1, 1]).unwrap();
        assert_eq!(t.involute(), t);
        let t = TypeVector::normalized(3, vec![3.0, -1.0], vec![1, 2]).unwrap();
        let i = t.involute();
        assert_eq!(i.mults(), &[2, 1]);
        assert_eq!(i.values(), &[-t.values()[1], -t.values()[0]]);
        assert_eq!(i.involute(), t);
        assert_eq!(i.embed(), t.embed().involute());
    }

    #[test]
    fn corner_examples() {
        let c = corner(2, 1);
        assert!((c.values()[0] - 1.0 / S2).abs() < 1e-15 && (c.values()[1] + 1.0 / S2).abs() < 1e-15);
        let c = corner(3, 1);
        assert!((c.values()[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((c.values()[1] + (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
        for n in 2..=6 {
            for c in corner_types(n) {
                TypeVector::new(n, c.values().to_vec(), c.mults().to_vec()).unwrap();
            }
        }
    }

    #[test]
    fn corners_are_acute_basis() {
        for n in 2..=6 {
            let cs: Vec<CartanVector> = corner_types(n).iter().map(|c| c.embed()).collect();
            for a in &cs {
                for b in &cs {
                    assert!(a_inner(a, b).unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn dual_basis_is_dual_for_all_faces() {
        for n in 2..=6 {
            for face in FaceSignature::all_faces(n) {
                let alphas = dual_basis(&face).unwrap();
                for (a, &j) in alphas.iter().zip(face.steps()) {
                    for &i in face.steps() {
                        let d = a_inner(a, &corner(n, i).embed()).unwrap();
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((d - want).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn dual_basis_examples() {
        let a = dual_basis(&FaceSignature::full(2)).unwrap();
        assert!((a[0].coords()[0] - 1.0 / S2).abs() < 1e-15);
        // α^τ is the projection of α^σ.
        let full = FaceSignature::full(4);
        let asig = dual_basis(&full).unwrap();
        for face in FaceSignature::all_faces(4) {
            let atau = dual_basis(&face).unwrap();
            for (a, &j) in atau.iter().zip(face.steps()) {
                let p = project_onto_face(&asig[j - 1], &face).unwrap();
                assert!(p.max_diff(a) < 1e-12);
            }
        }
    }

    #[test]
    fn inner_product_examples() {
        let u = CartanVector::new(vec![1.0 / S2, 0.0, -1.0 / S2]).unwrap();
        let v = CartanVector::new([1.0, -2.0, 1.0].iter().map(|x| x / 6f64.sqrt()).collect()).unwrap();
        assert!(a_inner(&u, &v).unwrap().abs() < 1e-15);
        assert!((a_inner(&u.involute(), &v.involute()).unwrap() - a_inner(&u, &v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn signature_involution() {
        let s = FaceSignature::new(3, vec![1, 3]).unwrap();
        assert_eq!(s.involute().dims(), &[2, 3]);
        let s = FaceSignature::new(5, vec![1, 3, 5]).unwrap();
        assert_eq!(s.involute().dims(), &[2, 4, 5]);
        assert_eq!(s.involute().involute(), s);
        assert_eq!(FaceSignature::all_faces(4).len(), 7);
    }
}
