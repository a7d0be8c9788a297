//! Closed-form Gromov products and cross ratios on flag spaces, their
//! vector-valued versions, periods of hyperbolic elements, and the
//! retract-word interpretation.

use crate::cartan::{corner, dual_basis, project_onto_face, CartanVector, FaceSignature, TypeVector};
use crate::error::{Error, Result};
use crate::flags::{self, is_opposite, Flag};
use crate::matnum::{det, gram_schmidt, inverse, schur_by_modulus, spd_log, Matrix};
use crate::spdspace::{self, c_metric, SpdPoint};

/// An extended value: finite, +∞ or −∞.
#[derive(Clone, Debug, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    PlusInf,
    MinusInf,
}

impl<T> Extended<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Extended::Finite(_) => "finite",
            Extended::PlusInf => "plus_inf",
            Extended::MinusInf => "minus_inf",
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::PlusInf => Extended::PlusInf,
            Extended::MinusInf => Extended::MinusInf,
        }
    }
}

impl Extended<f64> {
    /// As an f64 with infinities.
    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(v) => *v,
            Extended::PlusInf => f64::INFINITY,
            Extended::MinusInf => f64::NEG_INFINITY,
        }
    }
}

/// A quadruple (x, y, z, w) with x, z of one signature and y, w of the
/// involuted signature.
#[derive(Clone, Debug)]
pub struct Quadruple {
    pub x: Flag,
    pub y: Flag,
    pub z: Flag,
    pub w: Flag,
}

impl Quadruple {
    pub fn new(x: Flag, y: Flag, z: Flag, w: Flag) -> Result<Self> {
        let sig = x.signature();
        if z.signature() != sig {
            return Err(Error::SignatureMismatch("x and z must share a signature".into()));
        }
        let isig = sig.involute();
        if y.signature() != &isig || w.signature() != &isig {
            return Err(Error::SignatureMismatch("y and w must have the involuted signature of x".into()));
        }
        Ok(Quadruple { x, y, z, w })
    }

    pub fn signature(&self) -> &FaceSignature {
        self.x.signature()
    }

    /// Restricts x, z to `face` and y, w to its involute.
    pub fn truncate(&self, face: &FaceSignature) -> Result<Quadruple> {
        let iface = face.involute();
        Ok(Quadruple {
            x: self.x.truncate(face)?,
            y: self.y.truncate(&iface)?,
            z: self.z.truncate(face)?,
            w: self.w.truncate(&iface)?,
        })
    }

    /// The image under g ∈ SL(n).
    pub fn act(&self, g: &Matrix) -> Result<Quadruple> {
        Ok(Quadruple {
            x: flags::act(g, &self.x)?,
            y: flags::act(g, &self.y)?,
            z: flags::act(g, &self.z)?,
            w: flags::act(g, &self.w)?,
        })
    }
}

/// Where a quadruple sits relative to the domain of the cross ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Admissibility {
    AllOpposite,
    AdmissibleMinus,
    AdmissiblePlus,
    Inadmissible,
}

impl Admissibility {
    pub fn name(self) -> &'static str {
        match self {
            Admissibility::AllOpposite => "all_opposite",
            Admissibility::AdmissibleMinus => "admissible_minus",
            Admissibility::AdmissiblePlus => "admissible_plus",
            Admissibility::Inadmissible => "inadmissible",
        }
    }
}

/// Classification from the four oppositions (x,y), (z,w), (x,w), (z,y).
pub fn classify_pattern(xy: bool, zw: bool, xw: bool, zy: bool) -> Admissibility {
    match (xy && zw, xw && zy) {
        (true, true) => Admissibility::AllOpposite,
        (false, true) => Admissibility::AdmissibleMinus,
        (true, false) => Admissibility::AdmissiblePlus,
        (false, false) => Admissibility::Inadmissible,
    }
}

pub fn classify(q: &Quadruple) -> Result<Admissibility> {
    Ok(classify_pattern(
        is_opposite(&q.x, &q.y)?,
        is_opposite(&q.z, &q.w)?,
        is_opposite(&q.x, &q.w)?,
        is_opposite(&q.z, &q.y)?,
    ))
}

/// Checks that `t` is interior to a face of x's signature and returns that face.
fn type_face(x: &Flag, t: &TypeVector) -> Result<FaceSignature> {
    let face = t.signature();
    if t.n() != x.n() || !face.is_face_of(x.signature()) {
        return Err(Error::TypeMismatch(format!(
            "type with multiplicities {:?} does not fit flags of signature {:?}",
            t.mults(),
            x.signature().dims()
        )));
    }
    Ok(face)
}

/// |det(V_i | W_{n−i})| for orthonormal representatives.
fn wedge(v: &Matrix, w: &Matrix, i: usize) -> f64 {
    let n = v.rows();
    det(&v.leading_cols(i).hcat(&w.leading_cols(n - i))).abs()
}

/// n Σ_j (λ_{j+1} − λ_j) log|det(k_{1..i_j} | h_{1..n−i_j})|.
fn gromov_from_bases(k: &Matrix, h: &Matrix, t: &TypeVector) -> f64 {
    let n = k.rows();
    let face = t.signature();
    let vals = t.values();
    let mut s = 0.0;
    for (j, &i) in face.steps().iter().enumerate() {
        s += (vals[j + 1] - vals[j]) * wedge(k, h, i).ln();
    }
    c_metric(n) * s
}

/// (x|y)_{o,ξ} in closed form; +∞ when x and y are not opposite.
pub fn gromov_closed(x: &Flag, y: &Flag, t: &TypeVector, o: &SpdPoint) -> Result<Extended<f64>> {
    let face = type_face(x, t)?;
    if y.n() != x.n() || !face.involute().is_face_of(y.signature()) {
        return Err(Error::TypeMismatch("y must carry the involuted type".into()));
    }
    if o.n() != x.n() {
        return Err(Error::DimensionMismatch("basepoint".into()));
    }
    let (x, y) = (x.truncate(&face)?, y.truncate(&face.involute())?);
    if !is_opposite(&x, &y)? {
        return Ok(Extended::PlusInf);
    }
    let n = x.n();
    let (_, ois) = o.roots();
    let k = gram_schmidt(&(&ois * x.basis()), &Matrix::identity(n))?;
    let h = gram_schmidt(&(&ois * y.basis()), &Matrix::identity(n))?;
    Ok(Extended::Finite(gromov_from_bases(&k, &h, t)))
}

/// Classification of the quadruple restricted to the face of `t`, or the
/// error for inadmissible input.
fn prepare(q: &Quadruple, t: &TypeVector) -> Result<(Quadruple, Admissibility)> {
    let face = type_face(&q.x, t)?;
    let q = q.truncate(&face)?;
    let class = classify(&q)?;
    if class == Admissibility::Inadmissible {
        return Err(Error::Inadmissible);
    }
    Ok((q, class))
}

fn convention<T>(class: Admissibility) -> Option<Extended<T>> {
    match class {
        Admissibility::AdmissibleMinus => Some(Extended::MinusInf),
        Admissibility::AdmissiblePlus => Some(Extended::PlusInf),
        _ => None,
    }
}

/// −(x|y)_o − (z|w)_o + (x|w)_o + (z|y)_o from closed-form Gromov products.
pub fn cr_gromov_sum(q: &Quadruple, t: &TypeVector, o: &SpdPoint) -> Result<Extended<f64>> {
    let (q, class) = prepare(q, t)?;
    if let Some(v) = convention(class) {
        return Ok(v);
    }
    let g = |a: &Flag, b: &Flag| -> Result<f64> { gromov_closed(a, b, t, o)?.finite().ok_or(Error::Inadmissible) };
    Ok(Extended::Finite(-g(&q.x, &q.y)? - g(&q.z, &q.w)? + g(&q.x, &q.w)? + g(&q.z, &q.y)?))
}

/// Cross ratio by the wedge-ratio formula
/// n Σ_j (λ_j − λ_{j+1}) log|(x_j∧y)(z_j∧w)/((x_j∧w)(z_j∧y))|.
pub fn cr_wedge(q: &Quadruple, t: &TypeVector) -> Result<Extended<f64>> {
    let (q, class) = prepare(q, t)?;
    if let Some(v) = convention(class) {
        return Ok(v);
    }
    let (x, y, z, w) = (q.x.basis(), q.y.basis(), q.z.basis(), q.w.basis());
    let vals = t.values();
    let mut s = 0.0;
    for (j, &i) in t.signature().steps().iter().enumerate() {
        let r = (wedge(x, y, i) * wedge(z, w, i)) / (wedge(x, w, i) * wedge(z, y, i));
        s += (vals[j] - vals[j + 1]) * r.ln();
    }
    Ok(Extended::Finite(c_metric(q.x.n()) * s))
}

/// cr_ξ(x,y,z,w) with optional basepoint; without one the wedge formula is used.
pub fn cr_scalar(q: &Quadruple, t: &TypeVector, o: Option<&SpdPoint>) -> Result<Extended<f64>> {
    match o {
        Some(o) => cr_gromov_sum(q, t, o),
        None => cr_wedge(q, t),
    }
}

/// Σ_{i∈J_τ} cr_{ξ_i}(q) α_i^τ.
pub fn cr_vector(q: &Quadruple, face: &FaceSignature) -> Result<Extended<CartanVector>> {
    if !face.is_face_of(q.signature()) {
        return Err(Error::TypeMismatch(format!(
            "face {:?} is not a face of the flag signature {:?}",
            face.dims(),
            q.signature().dims()
        )));
    }
    let q = q.truncate(face)?;
    let class = classify(&q)?;
    if class == Admissibility::Inadmissible {
        return Err(Error::Inadmissible);
    }
    if let Some(v) = convention(class) {
        return Ok(v);
    }
    let n = face.n();
    let alphas = dual_basis(face)?;
    let mut out = CartanVector::zero(n);
    for (&i, a) in face.steps().iter().zip(&alphas) {
        let c = cr_wedge(&q, &corner(n, i))?.finite().ok_or(Error::Inadmissible)?;
        out = out.add(&a.scale(c));
    }
    Ok(Extended::Finite(out))
}

/// Projection of a chamber-valued cross ratio onto a face.
pub fn cr_project(v: &CartanVector, face: &FaceSignature) -> Result<CartanVector> {
    project_onto_face(v, face)
}

/// The eigenflags of a regular hyperbolic g and its period data.
#[derive(Clone, Debug)]
pub struct Period {
    /// Attracting flag (eigenvalues by decreasing modulus).
    pub plus: Flag,
    /// Repelling flag (eigenvalues by increasing modulus).
    pub minus: Flag,
    /// cr_σ(g⁻, g·x, g⁺, x).
    pub cr: CartanVector,
    /// Translation vector in metric units: c·2·log|eigᵢ|, descending.
    pub ell: CartanVector,
    /// ½(ℓ + ιℓ).
    pub symmetrized: CartanVector,
}

/// Attracting and repelling eigenflags of g.
pub fn eigenflags(g: &Matrix) -> Result<(Flag, Flag, Vec<f64>)> {
    let s = schur_by_modulus(g)?;
    let ginv = inverse(g).map_err(|_| Error::NotRegular("singular matrix".into()))?;
    let si = schur_by_modulus(&ginv)?;
    let plus = Flag::full(&s.basis)?;
    let minus = Flag::full(&si.basis)?;
    Ok((plus, minus, s.eigenvalues))
}

pub fn period(g: &Matrix, x: &Flag) -> Result<Period> {
    let n = g.rows();
    if !g.is_square() || x.n() != n {
        return Err(Error::DimensionMismatch("period".into()));
    }
    let d = det(g);
    if (d - 1.0).abs() > 1e-8 {
        return Err(Error::NotUnimodular(d));
    }
    if !x.is_full() {
        return Err(Error::SignatureMismatch("period needs a full flag".into()));
    }
    let (plus, minus, eig) = eigenflags(g)?;
    if !is_opposite(x, &plus)? || !is_opposite(x, &minus)? {
        return Err(Error::NotGeneric);
    }
    let gx = flags::act(g, x)?;
    let q = Quadruple::new(minus.clone(), gx, plus.clone(), x.clone())?;
    let cr = cr_vector(&q, &FaceSignature::full(n))?.finite().ok_or(Error::NotGeneric)?;
    let c = c_metric(n);
    let ell = CartanVector::from_raw(eig.iter().map(|e| c * 2.0 * e.abs().ln()).collect());
    let symmetrized = ell.add(&ell.involute()).scale(0.5);
    Ok(Period { plus, minus, cr, ell, symmetrized })
}

/// Flat coordinates of p relative to o in the flat of x: c·diag(kᵗ log(o^{−½}po^{−½}) k).
pub fn flat_coordinates(x: &Flag, o: &SpdPoint, p: &SpdPoint) -> Result<CartanVector> {
    let n = o.n();
    let (_, ois) = o.roots();
    let k = gram_schmidt(&(&ois * x.basis()), &Matrix::identity(n))?;
    let l = spd_log(&(&(&ois * p.mat()) * &ois).symmetrized())?;
    let m = &(&k.transpose() * &l) * &k;
    Ok(CartanVector::from_raw((0..n).map(|i| c_metric(n) * m[(i, i)]).collect()))
}

/// π(ρ_x ρ_w ρ_z ρ_y(o)) for an all-opposite quadruple of full flags and o
/// in the flat joining x and y (the flat's canonical point if `o` is None).
pub fn geom_interp(q: &Quadruple, o: Option<&SpdPoint>) -> Result<CartanVector> {
    if !q.x.is_full() {
        return Err(Error::SignatureMismatch("retract words need full flags".into()));
    }
    if classify(q)? != Admissibility::AllOpposite {
        return Err(Error::NotOpposite);
    }
    let o = match o {
        Some(o) => o.clone(),
        None => spdspace::flat_basepoint(&q.x, &q.y)?,
    };
    let res = spdspace::flat_residual(&q.x, &q.y, &o)?;
    if res > 1e-8 {
        return Err(Error::BasepointNotInFlat(res));
    }
    // Track a factor g with p = g gᵗ; composing transporters on g avoids
    // re-factoring ill-conditioned points between steps.
    let (os, ois) = o.roots();
    let mut g = os.clone();
    for (cx, cy) in [(&q.y, &q.z), (&q.z, &q.w), (&q.w, &q.x), (&q.x, &q.y)] {
        g = retract_factor(&g, cx, cy)?;
    }
    let n = o.n();
    let k = gram_schmidt(&(&ois * q.x.basis()), &Matrix::identity(n))?;
    let a = &(&k.transpose() * &ois) * &g;
    // a aᵗ is diagonal in the flat, so row norms carry the coordinates.
    let c = c_metric(n);
    Ok(CartanVector::from_raw((0..n).map(|i| c * (0..n).map(|j| a[(i, j)] * a[(i, j)]).sum::<f64>().ln()).collect()))
}

/// One retraction step acting on a factor g of the current point.
fn retract_factor(g: &Matrix, cx: &Flag, cy: &Flag) -> Result<Matrix> {
    if !is_opposite(cx, cy)? {
        return Err(Error::NotOpposite);
    }
    let n = g.rows();
    let q = gram_schmidt(&(&inverse(g)? * cx.basis()), &Matrix::identity(n))?;
    let zb = g * &q;
    let rev = Matrix::from_fn(n, n, |i, j| zb[(i, n - 1 - j)]);
    let z = Flag::new(cx.signature().involute(), &rev)?;
    let u = flags::unipotent_transporter(cx, &z, cy)?;
    Ok(&u * g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flags::standard_pair;

    const S2: f64 = std::f64::consts::SQRT_2;

    fn line(v: &[f64]) -> Flag {
        Flag::full(&Matrix::from_cols(&[v.to_vec(), vec![-v[1], v[0]]]).unwrap()).unwrap()
    }

    fn a1() -> TypeVector {
        TypeVector::new(2, vec![1.0 / S2, -1.0 / S2], vec![1, 1]).unwrap()
    }

    fn example_quad() -> Quadruple {
        Quadruple::new(line(&[1.0, 0.0]), line(&[0.0, 1.0]), line(&[1.0, 1.0]), line(&[1.0, -1.0])).unwrap()
    }

    #[test]
    fn gromov_closed_examples() {
        let o = SpdPoint::identity(3);
        let (s, so) = standard_pair(&FaceSignature::full(3));
        let t = TypeVector::normalized(3, vec![1.0, 0.2, -1.5], vec![1, 1, 1]).unwrap();
        assert_eq!(gromov_closed(&s, &so, &t, &o).unwrap(), Extended::Finite(0.0));
        let g = gromov_closed(&line(&[1.0, 0.0]), &line(&[1.0, 1.0]), &a1(), &SpdPoint::identity(2)).unwrap();
        assert!((g.finite().unwrap() - S2 * 2f64.ln()).abs() < 1e-14);
        assert!(matches!(gromov_closed(&so, &s, &a1(), &o), Err(Error::TypeMismatch(_))));
        assert_eq!(gromov_closed(&s, &s, &t, &o).unwrap(), Extended::PlusInf);
    }

    #[test]
    fn cr_examples() {
        let q = example_quad();
        let v = cr_wedge(&q, &a1()).unwrap().finite().unwrap();
        assert!((v - 2.0 * S2 * 2f64.ln()).abs() < 1e-14);
        let o = SpdPoint::identity(2);
        let s = cr_gromov_sum(&q, &a1(), &o).unwrap().finite().unwrap();
        assert!((s - v).abs() < 1e-13);
        let vec = cr_vector(&q, &FaceSignature::full(2)).unwrap().finite().unwrap();
        assert!((vec.coords()[0] - 2.0 * 2f64.ln()).abs() < 1e-13);
        assert!((vec.coords()[1] + 2.0 * 2f64.ln()).abs() < 1e-13);
        let degenerate = Quadruple::new(q.x.clone(), q.y.clone(), q.x.clone(), q.w.clone()).unwrap();
        assert!(cr_wedge(&degenerate, &a1()).unwrap().finite().unwrap().abs() < 1e-14);
    }

    #[test]
    fn conventions() {
        let q = example_quad();
        let bad = Quadruple::new(q.x.clone(), q.x.clone(), q.z.clone(), q.w.clone()).unwrap();
        assert_eq!(classify(&bad).unwrap(), Admissibility::AdmissibleMinus);
        assert_eq!(cr_wedge(&bad, &a1()).unwrap(), Extended::MinusInf);
        assert_eq!(cr_vector(&bad, &FaceSignature::full(2)).unwrap(), Extended::MinusInf);
        let plus = Quadruple::new(q.x.clone(), q.y.clone(), q.z.clone(), q.x.clone()).unwrap();
        assert_eq!(classify(&plus).unwrap(), Admissibility::AdmissiblePlus);
        let inad = Quadruple::new(q.x.clone(), q.x.clone(), q.z.clone(), q.x.clone()).unwrap();
        assert_eq!(classify(&inad).unwrap(), Admissibility::Inadmissible);
        assert_eq!(cr_wedge(&inad, &a1()), Err(Error::Inadmissible));
    }

    #[test]
    fn period_example() {
        let g = Matrix::diag(&[2.0, 1.0, 0.5]);
        let mut rng = crate::sample::rng(3);
        let x = crate::sample::full_flag(&mut rng, 3);
        let p = period(&g, &x).unwrap();
        let l2 = 2f64.ln();
        let want = [3.0 * 2.0 * l2, 0.0, -3.0 * 2.0 * l2];
        for (a, b) in p.ell.coords().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(p.cr.max_diff(&p.symmetrized) < 1e-10, "{:?} vs {:?}", p.cr, p.symmetrized);
    }

    #[test]
    fn geom_interp_example() {
        let q = example_quad();
        let v = geom_interp(&q, Some(&SpdPoint::identity(2))).unwrap();
        let want = 4.0 * 2f64.ln();
        assert!((v.coords()[0] - want).abs() < 1e-12 && (v.coords()[1] + want).abs() < 1e-12, "{v:?}");
        let trivial = Quadruple::new(q.x.clone(), q.y.clone(), q.x.clone(), q.y.clone()).unwrap();
        assert!(geom_interp(&trivial, None).unwrap().norm() < 1e-12);
        let off = SpdPoint::new(Matrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 0.625]]).unwrap()).unwrap();
        assert!(matches!(geom_interp(&q, Some(&off)), Err(Error::BasepointNotInFlat(_))));
    }
}
