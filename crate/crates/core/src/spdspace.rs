//! The symmetric space P_n of unimodular SPD matrices: distance, geodesic
//! rays, Busemann functions, horospherical retracts and the limit oracle for
//! Gromov products.
//!
//! The metric is `d(a,b) = c·‖log eig(a⁻¹b)‖₂` with `c = n`; with types
//! normalized to unit length this is the scale at which the closed-form
//! Busemann and Gromov formulas hold (checked by [`calibrate`]).

use crate::cartan::{CartanVector, TypeVector};
use crate::error::{Error, Result};
use crate::flags::{self, Flag};
use crate::matnum::{det, gram_schmidt, log_singular_values_graded, sym_eig, Matrix};

/// The metric constant for P_n.
pub fn c_metric(n: usize) -> f64 {
    n as f64
}

/// A point of P_n: symmetric positive definite with determinant 1.
#[derive(Clone, Debug)]
pub struct SpdPoint {
    mat: Matrix,
}

impl SpdPoint {
    pub fn new(mat: Matrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch("SPD point must be square".into()));
        }
        let asym = mat.asymmetry();
        if asym > 1e-10 * mat.max_abs().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let mat = mat.symmetrized();
        if sym_eig(&mat)?.values.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotSpd);
        }
        let d = det(&mat);
        if (d - 1.0).abs() > 1e-8 {
            return Err(Error::Invalid(format!("SPD point must have determinant 1, got {d}")));
        }
        Ok(SpdPoint { mat })
    }

    /// Rescales an SPD matrix to determinant 1.
    pub fn normalized(mat: &Matrix) -> Result<Self> {
        let s = mat.symmetrized();
        if sym_eig(&s)?.values.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotSpd);
        }
        let d = det(&s);
        SpdPoint::new(s.scale(d.powf(-1.0 / s.rows() as f64)))
    }

    pub fn identity(n: usize) -> Self {
        SpdPoint { mat: Matrix::identity(n) }
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &Matrix {
        &self.mat
    }

    /// (o^{1/2}, o^{−1/2}) from one eigendecomposition.
    pub fn roots(&self) -> (Matrix, Matrix) {
        let e = sym_eig(&self.mat).expect("SPD point is symmetric");
        let n = self.n();
        let build = |f: &dyn Fn(f64) -> f64| {
            let mut out = Matrix::zeros(n, n);
            for k in 0..n {
                let fk = f(e.values[k]);
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] += e.vectors[(i, k)] * fk * e.vectors[(j, k)];
                    }
                }
            }
            out.symmetrized()
        };
        (build(&f64::sqrt), build(&|l| 1.0 / l.sqrt()))
    }

    /// g·p = g p gᵗ.
    pub fn act(&self, g: &Matrix) -> Result<SpdPoint> {
        let d = det(g);
        if (d.abs() - 1.0).abs() > 1e-8 {
            return Err(Error::NotUnimodular(d));
        }
        Ok(SpdPoint { mat: (&(g * &self.mat) * &g.transpose()).symmetrized() })
    }
}

/// A point at infinity: a flag together with a type interior to its face.
#[derive(Clone, Debug)]
pub struct IdealPoint {
    flag: Flag,
    ty: TypeVector,
}

impl IdealPoint {
    pub fn new(flag: Flag, ty: TypeVector) -> Result<Self> {
        if &ty.signature() != flag.signature() {
            return Err(Error::TypeMismatch(format!(
                "type multiplicities {:?} do not match flag signature {:?}",
                ty.mults(),
                flag.signature().dims()
            )));
        }
        Ok(IdealPoint { flag, ty })
    }

    pub fn flag(&self) -> &Flag {
        &self.flag
    }

    pub fn ty(&self) -> &TypeVector {
        &self.ty
    }

    pub fn n(&self) -> usize {
        self.flag.n()
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("{a} vs {b}")));
    }
    Ok(())
}

/// Logarithms of the eigenvalues of a⁻¹b.
fn log_eigs_between(a: &SpdPoint, b: &SpdPoint) -> Vec<f64> {
    let (_, ais) = a.roots();
    let m = &(&ais * &b.mat) * &ais;
    sym_eig(&m.symmetrized()).expect("symmetric").values.iter().map(|l| l.ln()).collect()
}

pub fn distance(a: &SpdPoint, b: &SpdPoint) -> Result<f64> {
    check_dims(a.n(), b.n())?;
    let logs = log_eigs_between(a, b);
    Ok(c_metric(a.n()) * logs.iter().map(|l| l * l).sum::<f64>().sqrt())
}

/// (p|q)_o = ½(d(o,p) + d(o,q) − d(p,q)).
pub fn finite_gromov(p: &SpdPoint, q: &SpdPoint, o: &SpdPoint) -> Result<f64> {
    Ok(0.5 * (distance(o, p)? + distance(o, q)? - distance(p, q)?))
}

/// γ_{ox}(t): unit-speed geodesic from o toward x. Negative t runs toward
/// the flag [`flags::ortho_opposite`] of x at o.
pub fn geodesic_point(o: &SpdPoint, x: &IdealPoint, t: f64) -> Result<SpdPoint> {
    check_dims(o.n(), x.n())?;
    let n = o.n();
    let (os, ois) = o.roots();
    let k = gram_schmidt(&(&ois * x.flag.basis()), &Matrix::identity(n))?;
    let lam = x.ty.embed();
    let c = c_metric(n);
    let d = Matrix::diag(&lam.coords().iter().map(|l| (t / c * l).exp()).collect::<Vec<_>>());
    let g = &os * &k;
    Ok(SpdPoint { mat: (&(&g * &d) * &g.transpose()).symmetrized() })
}

/// Determinant of the trailing j×j principal block.
pub fn delta_minor(p: &Matrix, j: usize) -> Result<f64> {
    let n = p.rows();
    if j == 0 || j > n {
        return Err(Error::Invalid(format!("minor index {j} out of range 1..={n}")));
    }
    Ok(det(&p.principal_block(n - j, n)))
}

/// b_S(I, q) for the standard flag: −n Σ_j (λ_{n−j} − λ_{n+1−j}) log Δ⁻_j(q).
fn busemann_standard(lam: &CartanVector, q: &Matrix) -> f64 {
    let n = q.rows();
    let l = lam.coords();
    let mut s = 0.0;
    for j in 1..n {
        let gap = l[n - j - 1] - l[n - j];
        if gap != 0.0 {
            s += gap * delta_minor(q, j).expect("in range").ln();
        }
    }
    -c_metric(n) * s
}

/// b_x(o, p), normalized so that b_x(o, γ_{ox}(s)) = s.
pub fn busemann(x: &IdealPoint, o: &SpdPoint, p: &SpdPoint) -> Result<f64> {
    check_dims(o.n(), x.n())?;
    check_dims(p.n(), x.n())?;
    let k = x.flag.basis();
    let kt = k.transpose();
    let lam = x.ty.embed();
    let at = |q: &SpdPoint| busemann_standard(&lam, &(&(&kt * &q.mat) * k));
    Ok(at(p) - at(o))
}

/// Horospherical retract of o onto the flat joining the chambers cx, cy,
/// along horospheres centered at cx.
pub fn retract(o: &SpdPoint, cx: &Flag, cy: &Flag) -> Result<SpdPoint> {
    if !flags::is_opposite(cx, cy)? {
        return Err(Error::NotOpposite);
    }
    let z = flags::ortho_opposite(cx, &o.mat)?;
    let u = flags::unipotent_transporter(cx, &z, cy)?;
    o.act(&u)
}

/// The point B·Bᵗ (det-normalized) of the flat joining opposite full flags,
/// B the unit joint basis.
pub fn flat_basepoint(x: &Flag, y: &Flag) -> Result<SpdPoint> {
    let b = flags::joint_basis(x, y)?;
    SpdPoint::normalized(&(&b * &b.transpose()))
}

/// How far o is from the flat joining x and y: largest off-antidiagonal
/// entry of kᵗh, where k, h are the orthonormalized translates of x, y.
pub fn flat_residual(x: &Flag, y: &Flag, o: &SpdPoint) -> Result<f64> {
    let n = o.n();
    let (_, ois) = o.roots();
    let k = gram_schmidt(&(&ois * x.basis()), &Matrix::identity(n))?;
    let h = gram_schmidt(&(&ois * y.basis()), &Matrix::identity(n))?;
    let m = &k.transpose() * &h;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i + j + 1 != n {
                worst = worst.max(m[(i, j)].abs());
            }
        }
    }
    Ok(worst)
}

/// Divergence threshold on f(2t) − f(t).
const DIVERGENCE: f64 = 0.1;

/// t − ½ d(γ_{ox}(t), γ_{oy}(t)) under the metric c·‖log eig‖.
///
/// With γ_{ox}(t) = g e^{tΛ/c} gᵗ, g = o^{1/2}k, the relative eigenvalues
/// are the squared singular values of e^{−tΛ/2c}·kᵗh·e^{tM/2c}, which is
/// evaluated in extended range so t can be large.
fn limit_term(lam: &[f64], mu: &[f64], kth: &Matrix, t: f64, c: f64) -> f64 {
    let rows: Vec<f64> = lam.iter().map(|l| -t * l / (2.0 * c)).collect();
    let cols: Vec<f64> = mu.iter().map(|m| t * m / (2.0 * c)).collect();
    let ls = log_singular_values_graded(&rows, kth, &cols);
    let d = c * ls.iter().map(|s| 4.0 * s * s).sum::<f64>().sqrt();
    t - 0.5 * d
}

/// Limit-definition estimate of (x|y)_o with an explicit metric constant.
pub fn gromov_oracle_with_metric(x: &IdealPoint, y: &IdealPoint, o: &SpdPoint, t: f64, c: f64) -> Result<f64> {
    check_dims(o.n(), x.n())?;
    check_dims(o.n(), y.n())?;
    if y.ty != x.ty.involute() {
        return Err(Error::TypeMismatch("type of y must be the involute of the type of x".into()));
    }
    let n = o.n();
    let (_, ois) = o.roots();
    let k = gram_schmidt(&(&ois * x.flag.basis()), &Matrix::identity(n))?;
    let h = gram_schmidt(&(&ois * y.flag.basis()), &Matrix::identity(n))?;
    let kth = &k.transpose() * &h;
    let (lam, mu) = (x.ty.embed(), y.ty.embed());
    let f1 = limit_term(lam.coords(), mu.coords(), &kth, t, c);
    let f2 = limit_term(lam.coords(), mu.coords(), &kth, 2.0 * t, c);
    if f2 - f1 > DIVERGENCE {
        return Err(Error::NonOpposite);
    }
    Ok(2.0 * f2 - f1)
}

/// Limit-definition estimate of (x|y)_o at parameters t and 2t with
/// Richardson extrapolation.
pub fn gromov_oracle(x: &IdealPoint, y: &IdealPoint, o: &SpdPoint, t: f64) -> Result<f64> {
    gromov_oracle_with_metric(x, y, o, t, c_metric(o.n()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationReport {
    pub n: usize,
    pub c_metric: f64,
    pub residual: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Fits the metric constant by least squares between the oracle evaluated
/// with unit metric and the closed-form Gromov product.
pub fn calibrate(n: usize, trials: usize, seed: u64) -> Result<CalibrationReport> {
    if !(2..=6).contains(&n) {
        return Err(Error::Invalid(format!("calibration supports 2 <= n <= 6, got {n}")));
    }
    if trials == 0 {
        return Err(Error::Invalid("calibration needs at least one trial".into()));
    }
    let mut rng = crate::sample::rng(seed);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    let mut pairs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let x = crate::sample::full_flag(&mut rng, n);
        let y = crate::sample::opposite_flag(&mut rng, &[&x]);
        let ty = crate::sample::regular_type(&mut rng, n);
        let o = crate::sample::spd_point(&mut rng, n, 10.0);
        let closed = crate::crossratio::gromov_closed(&x, &y, &ty, &o)?.finite().ok_or(Error::NonOpposite)?;
        let xi = IdealPoint::new(x, ty.clone())?;
        let yi = IdealPoint::new(y, ty.involute())?;
        let unit = gromov_oracle_with_metric(&xi, &yi, &o, 1e4, 1.0)?;
        sxy += unit * closed;
        sxx += unit * unit;
        pairs.push((unit, closed));
    }
    let c = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let residual = pairs.iter().fold(0.0f64, |m, (u, g)| m.max((c * u - g).abs()));
    let report = CalibrationReport { n, c_metric: c, residual, trials, seed };
    if !(residual <= 1e-3) || !((c - c_metric(n)).abs() <= 1e-3) {
        return Err(Error::CalibrationFailed(residual.max((c - c_metric(n)).abs())));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::FaceSignature;

    const S2: f64 = std::f64::consts::SQRT_2;

    fn a1_type() -> TypeVector {
        TypeVector::new(2, vec![1.0 / S2, -1.0 / S2], vec![1, 1]).unwrap()
    }

    fn line(v: &[f64]) -> Flag {
        Flag::full(&Matrix::from_cols(&[v.to_vec(), vec![-v[1], v[0]]]).unwrap()).unwrap()
    }

    #[test]
    fn distance_examples() {
        let i = SpdPoint::identity(2);
        assert_eq!(distance(&i, &i).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let p = SpdPoint::new(Matrix::diag(&[e * e, 1.0 / (e * e)])).unwrap();
        assert!((distance(&i, &p).unwrap() - 4.0 * S2).abs() < 1e-12);
    }

    #[test]
    fn finite_gromov_on_a_line() {
        // Points exp(sΛ) for s ∈ {−1, 0, 2}: with o at s = 0 the rays to the two
        // others leave in opposite directions, so the product is 0; with o at
        // s = −1 both lie ahead and (p|q)_o = d(o,p) = 1·|Λ|.
        let lam = [0.3, 0.1, -0.4];
        let at = |s: f64| SpdPoint::new(Matrix::diag(&lam.map(|l| (s * l).exp()))).unwrap();
        let norm = 3.0 * lam.iter().map(|l| l * l).sum::<f64>().sqrt();
        let g = finite_gromov(&at(-1.0), &at(2.0), &at(0.0)).unwrap();
        assert!(g.abs() < 1e-12);
        let g = finite_gromov(&at(0.0), &at(2.0), &at(-1.0)).unwrap();
        assert!((g - norm).abs() < 1e-12);
        let p = at(2.0);
        assert!((finite_gromov(&p, &p, &at(0.0)).unwrap() - 2.0 * norm).abs() < 1e-12);
        assert!(finite_gromov(&p, &at(-1.0), &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn geodesic_examples() {
        let (s, _) = flags::standard_pair(&FaceSignature::full(2));
        let x = IdealPoint::new(s, a1_type()).unwrap();
        let o = SpdPoint::identity(2);
        let p = geodesic_point(&o, &x, 2.0 * S2).unwrap();
        let e = std::f64::consts::E;
        assert!(p.mat().max_diff(&Matrix::diag(&[e, 1.0 / e])) < 1e-14);
        assert!(geodesic_point(&o, &x, 0.0).unwrap().mat().max_diff(o.mat()) < 1e-15);
        assert!((busemann(&x, &p, &o).unwrap() + 2.0 * S2).abs() < 1e-12);
    }

    #[test]
    fn delta_minor_examples() {
        assert_eq!(delta_minor(&Matrix::diag(&[2.0, 3.0, 5.0]), 1).unwrap(), 5.0);
        assert_eq!(delta_minor(&Matrix::identity(3), 2).unwrap(), 1.0);
        assert!(delta_minor(&Matrix::identity(3), 0).is_err());
    }

    #[test]
    fn random_geodesics_and_busemann() {
        let mut rng = crate::sample::rng(5);
        for n in 2..=5 {
            for face in FaceSignature::all_faces(n) {
                let f = crate::sample::flag(&mut rng, &face);
                let t = crate::sample::type_for(&mut rng, &face);
                let x = IdealPoint::new(f, t).unwrap();
                let o = crate::sample::spd_point(&mut rng, n, 50.0);
                let s = 3.7;
                let p = geodesic_point(&o, &x, s).unwrap();
                assert!((distance(&o, &p).unwrap() - s).abs() < 1e-8);
                assert!((busemann(&x, &o, &p).unwrap() - s).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn retract_examples() {
        let x = line(&[1.0, 0.0]);
        let y = line(&[0.0, 1.0]);
        // Already in the flat: unchanged.
        let d = SpdPoint::new(Matrix::diag(&[3.0, 1.0 / 3.0])).unwrap();
        assert!(retract(&d, &x, &y).unwrap().mat().max_diff(d.mat()) < 1e-14);
        // o = [[a,b],[b,c]]: the shear [[1,−b/c],[0,1]] gives diag(a − b²/c, c).
        let (a, b) = (2.0, 0.6);
        let c = (1.0 + b * b) / a;
        let o = SpdPoint::new(Matrix::from_rows(&[vec![a, b], vec![b, c]]).unwrap()).unwrap();
        let r = retract(&o, &x, &y).unwrap();
        assert!(r.mat().max_diff(&Matrix::diag(&[a - b * b / c, c])) < 1e-14);
    }

    #[test]
    fn oracle_example() {
        let x = IdealPoint::new(line(&[1.0, 0.0]), a1_type()).unwrap();
        let y = IdealPoint::new(line(&[1.0, 1.0]), a1_type()).unwrap();
        let o = SpdPoint::identity(2);
        let g = gromov_oracle(&x, &y, &o, 1e4).unwrap();
        assert!((g - S2 * 2f64.ln()).abs() < 1e-9, "{g}");
        let y2 = IdealPoint::new(line(&[0.0, 1.0]), a1_type()).unwrap();
        assert!(gromov_oracle(&x, &y2, &o, 1e4).unwrap().abs() < 1e-9);
        assert_eq!(gromov_oracle(&x, &x, &o, 1e4), Err(Error::NonOpposite));
    }
}
