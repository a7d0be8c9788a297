//! Auditing sampled boundary maps between flag spaces: cross-ratio
//! preservation, opposition preservation, and witnesses of non-injectivity.

use rand::Rng;

use crate::cartan::{FaceSignature, TypeVector};
use crate::crossratio::{classify, cr_wedge, Admissibility, Extended, Quadruple};
use crate::error::{Error, Result};
use crate::flags::{self, is_opposite, transversality, Flag};
use crate::matnum::{gram_schmidt, Matrix};
use crate::sample::{self, DEFAULT_SEED};

/// How the images of a sampled map were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    MatrixInduced,
    Permutation,
    Table,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::MatrixInduced => "matrix_induced",
            Provenance::Permutation => "permutation",
            Provenance::Table => "table",
        }
    }
}

/// A boundary map known on finitely many flags.
#[derive(Clone, Debug)]
pub struct SampledMap {
    domain: Vec<Flag>,
    images: Vec<Flag>,
    provenance: Provenance,
}

impl SampledMap {
    pub fn new(domain: Vec<Flag>, images: Vec<Flag>, provenance: Provenance) -> Result<Self> {
        if domain.len() != images.len() {
            return Err(Error::ArityMismatch(format!("{} samples but {} images", domain.len(), images.len())));
        }
        if domain.is_empty() {
            return Err(Error::Invalid("empty sample".into()));
        }
        let (n, m) = (domain[0].n(), images[0].n());
        if domain.iter().any(|f| f.n() != n || !f.is_full()) || images.iter().any(|f| f.n() != m || !f.is_full()) {
            return Err(Error::SignatureMismatch("samples and images must be full flags of one dimension".into()));
        }
        Ok(SampledMap { domain, images, provenance })
    }

    /// x ↦ g·x on the given sample.
    pub fn from_matrix(g: &Matrix, domain: Vec<Flag>) -> Result<Self> {
        let images = domain.iter().map(|x| flags::act(g, x)).collect::<Result<_>>()?;
        SampledMap::new(domain, images, Provenance::MatrixInduced)
    }

    /// xᵢ ↦ x_{perm(i)}.
    pub fn permutation(domain: Vec<Flag>, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; domain.len()];
        if perm.len() != domain.len()
            || perm.iter().any(|&p| p >= domain.len() || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Invalid("not a permutation of the sample".into()));
        }
        let images = perm.iter().map(|&p| domain[p].clone()).collect();
        SampledMap::new(domain, images, Provenance::Permutation)
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn domain(&self) -> &[Flag] {
        &self.domain
    }

    pub fn images(&self) -> &[Flag] {
        &self.images
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Moebius,
    NotMoebius,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Moebius => "moebius",
            Verdict::NotMoebius => "not_moebius",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusReport {
    pub max_deviation: f64,
    pub quadruples: usize,
    pub mismatches: usize,
    pub verdict: Verdict,
    pub seed: u64,
}

/// Parameters of a Moebius audit.
#[derive(Clone, Debug)]
pub struct MoebiusCheck {
    /// Type on the codomain; defaults to the domain type.
    pub codomain_type: Option<TypeVector>,
    /// The codomain metric is this multiple of the standard one.
    pub codomain_scale: f64,
    pub threshold: f64,
    /// Number of random quadruples when the sample is too large to exhaust.
    pub budget: usize,
    pub seed: u64,
}

pub const DEFAULT_THRESHOLD: f64 = 1e-7;
/// Samples up to this size are checked on every ordered quadruple.
pub const EXHAUSTIVE_LIMIT: usize = 8;

impl Default for MoebiusCheck {
    fn default() -> Self {
        MoebiusCheck {
            codomain_type: None,
            codomain_scale: 1.0,
            threshold: DEFAULT_THRESHOLD,
            budget: 2000,
            seed: DEFAULT_SEED,
        }
    }
}

fn quad_from(flags: &[Flag], idx: [usize; 4], face: &FaceSignature) -> Result<Quadruple> {
    let iface = face.involute();
    Quadruple::new(
        flags[idx[0]].truncate(face)?,
        flags[idx[1]].truncate(&iface)?,
        flags[idx[2]].truncate(face)?,
        flags[idx[3]].truncate(&iface)?,
    )
}

/// cr with ±∞ conventions, or None when inadmissible.
fn cr_or_none(q: &Quadruple, t: &TypeVector) -> Result<Option<Extended<f64>>> {
    match cr_wedge(q, t) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Inadmissible) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Compares cr_ξ(q) with the codomain cross ratio of f(q) over the sample.
pub fn check_moebius(f: &SampledMap, t: &TypeVector, cfg: &MoebiusCheck) -> Result<MoebiusReport> {
    let t2 = cfg.codomain_type.as_ref().unwrap_or(t);
    let (face, face2) = (t.signature(), t2.signature());
    let m = f.len();
    let indices: Vec<[usize; 4]> = if m <= EXHAUSTIVE_LIMIT {
        let mut v = Vec::with_capacity(m.pow(4));
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        v.push([a, b, c, d]);
                    }
                }
            }
        }
        v
    } else {
        let mut rng = sample::rng(cfg.seed);
        (0..cfg.budget).map(|_| [0; 4].map(|_| rng.random_range(0..m))).collect()
    };
    let mut max_dev = 0.0f64;
    let mut mismatches = 0;
    for idx in &indices {
        let a = cr_or_none(&quad_from(&f.domain, *idx, &face)?, t)?;
        let b = cr_or_none(&quad_from(&f.images, *idx, &face2)?, t2)?.map(|v| v.map(|v| cfg.codomain_scale * v));
        match (a, b) {
            (Some(Extended::Finite(u)), Some(Extended::Finite(v))) => max_dev = max_dev.max((u - v).abs()),
            (a, b) if a == b => {}
            _ => mismatches += 1,
        }
    }
    let verdict = if mismatches == 0 && max_dev <= cfg.threshold { Verdict::Moebius } else { Verdict::NotMoebius };
    Ok(MoebiusReport { max_deviation: max_dev, quadruples: indices.len(), mismatches, verdict, seed: cfg.seed })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OppositionReport {
    pub pairs: usize,
    /// Sample index pairs (i, j) with xᵢ op xⱼ ≠ f(xᵢ) op f(xⱼ).
    pub violations: Vec<(usize, usize)>,
}

/// Checks x op y ⟺ f(x) op f(y) on all ordered pairs of distinct samples,
/// for flags of signature `face` against the involuted signature.
pub fn check_opposition_preserving(f: &SampledMap, face: &FaceSignature) -> Result<OppositionReport> {
    let iface = face.involute();
    let op = |s: &[Flag], i: usize, j: usize| -> Result<bool> {
        is_opposite(&s[i].truncate(face)?, &s[j].truncate(&iface)?)
    };
    let mut violations = Vec::new();
    let mut pairs = 0;
    for i in 0..f.len() {
        for j in 0..f.len() {
            if i == j {
                continue;
            }
            pairs += 1;
            if op(&f.domain, i, j)? != op(&f.images, i, j)? {
                violations.push((i, j));
            }
        }
    }
    Ok(OppositionReport { pairs, violations })
}

/// Two quadruples (x,a,z,w) and (y,a,z,w) with identical images under f
/// whose cross ratios differ: finite against −∞ or undefined.
#[derive(Clone, Debug)]
pub struct InjectivityWitness {
    pub with_x: Quadruple,
    pub with_y: Quadruple,
    pub cr_x: f64,
    pub class_y: Admissibility,
    /// Which of a, z, w had to be constructed outside the sample.
    pub constructed: Vec<&'static str>,
}

const SAME_FLAG_TOL: f64 = 1e-9;

/// A full flag opposite to x but not to y: at the first level i where x and
/// y differ, A_{n−i} contains a vector of Y_i outside X_i and is otherwise
/// complementary to X_i.
fn separating_flag(rng: &mut sample::SampleRng, x: &Flag, y: &Flag) -> Result<Flag> {
    let n = x.n();
    let level = (1..n)
        .find(|&i| {
            !x.truncate(&FaceSignature::corner(n, i))
                .is_ok_and(|a| y.truncate(&FaceSignature::corner(n, i)).is_ok_and(|b| a.same_as(&b, SAME_FLAG_TOL)))
        })
        .ok_or_else(|| Error::Invalid("x and y coincide".into()))?;
    let xi = x.subspace(level);
    let proj_out = |v: &[f64], q: &Matrix| -> Vec<f64> {
        let c = q.transpose().mul_vec(v);
        let p = q.mul_vec(&c);
        v.iter().zip(&p).map(|(a, b)| a - b).collect()
    };
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let v = (0..level)
        .map(|k| y.basis().col(k))
        .max_by(|a, b| norm(&proj_out(a, &xi)).total_cmp(&norm(&proj_out(b, &xi))))
        .expect("level >= 1");
    let xv = gram_schmidt(&xi.hcat(&Matrix::from_cols(std::slice::from_ref(&v))?), &Matrix::identity(n))?;
    for _ in 0..100 {
        // A_{n−i} = span(v, random vectors orthogonal to X_i + v).
        let mut cols = vec![v.clone()];
        while cols.len() < n - level {
            let r = sample::uniform_matrix(rng, n).col(0);
            cols.push(proj_out(&r, &xv));
        }
        // Random completion, then a random chain inside A_{n−i}.
        let a_span = gram_schmidt(&Matrix::from_cols(&cols)?, &Matrix::identity(n))?;
        let mix = sample::rotation(rng, n - level);
        let mut basis = &a_span * &mix;
        while basis.cols() < n {
            basis = basis.hcat(&Matrix::from_cols(&[sample::uniform_matrix(rng, n).col(0)])?);
        }
        let Ok(a) = Flag::full(&basis) else { continue };
        if transversality(x, &a)? > sample::MIN_TRANSVERSALITY * 0.1 && !is_opposite(y, &a)? {
            return Ok(a);
        }
    }
    Err(Error::CannotSeparate("no separating flag found".into()))
}

/// Builds the quadruples of the injectivity argument for samples i ≠ j with
/// f(xᵢ) = f(xⱼ). Flags a, z, w are taken from the sample when possible;
/// with `extend` they are otherwise constructed, else the call fails.
pub fn injectivity_witness(f: &SampledMap, i: usize, j: usize, extend: bool, seed: u64) -> Result<InjectivityWitness> {
    if i >= f.len() || j >= f.len() {
        return Err(Error::Invalid("sample index out of range".into()));
    }
    let (x, y) = (&f.domain[i], &f.domain[j]);
    if i == j || x.same_as(y, SAME_FLAG_TOL) {
        return Err(Error::Invalid("x and y must be distinct".into()));
    }
    if !f.images[i].same_as(&f.images[j], SAME_FLAG_TOL) {
        return Err(Error::Invalid("f(x) and f(y) differ".into()));
    }
    let op = |a: &Flag, b: &Flag| is_opposite(a, b).unwrap_or(false);
    let mut rng = sample::rng(seed);
    let mut constructed = Vec::new();
    let found_a = f.domain.iter().find(|a| op(x, a) && !op(y, a)).cloned();
    let a = match (found_a, extend) {
        (Some(a), _) => a,
        (None, true) => {
            constructed.push("a");
            separating_flag(&mut rng, x, y)?
        }
        (None, false) => {
            return Err(Error::CannotSeparate("sample has no flag opposite x but not y; extend it".into()))
        }
    };
    let found_z = f.domain.iter().find(|z| op(z, &a)).cloned();
    let z = match (found_z, extend) {
        (Some(z), _) => z,
        (None, true) => {
            constructed.push("z");
            sample::opposite_flag(&mut rng, &[&a])
        }
        (None, false) => return Err(Error::CannotSeparate("sample has no flag opposite a; extend it".into())),
    };
    let found_w = f.domain.iter().find(|w| op(w, &z) && op(w, x) && op(w, y)).cloned();
    let w = match (found_w, extend) {
        (Some(w), _) => w,
        (None, true) => {
            constructed.push("w");
            sample::opposite_flag(&mut rng, &[&z, x, y])
        }
        (None, false) => return Err(Error::CannotSeparate("sample has no flag opposite z and x; extend it".into())),
    };
    let with_x = Quadruple::new(x.clone(), a.clone(), z.clone(), w.clone())?;
    let with_y = Quadruple::new(y.clone(), a, z, w)?;
    let regular = TypeVector::barycentric(x.n());
    let cr_x = cr_wedge(&with_x, &regular)?
        .finite()
        .ok_or_else(|| Error::CannotSeparate("witness quadruple is not all-opposite".into()))?;
    let class_y = classify(&with_y)?;
    if class_y == Admissibility::AllOpposite {
        return Err(Error::CannotSeparate("second quadruple stayed finite".into()));
    }
    Ok(InjectivityWitness { with_x, with_y, cr_x, class_y, constructed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_flags(seed: u64, n: usize, m: usize) -> Vec<Flag> {
        let mut rng = sample::rng(seed);
        (0..m).map(|_| sample::full_flag(&mut rng, n)).collect()
    }

    #[test]
    fn matrix_map_is_moebius() {
        let mut rng = sample::rng(5);
        let g = sample::unimodular(&mut rng, 3, 10.0);
        let f = SampledMap::from_matrix(&g, sample_flags(6, 3, 6)).unwrap();
        let t = TypeVector::barycentric(3);
        let r = check_moebius(&f, &t, &MoebiusCheck::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Moebius);
        assert_eq!(r.quadruples, 6usize.pow(4));
        assert!(r.max_deviation <= 1e-8);
        assert!(check_opposition_preserving(&f, &FaceSignature::full(3)).unwrap().violations.is_empty());
    }

    #[test]
    fn scaled_codomain_is_not_moebius() {
        let f = SampledMap::permutation(sample_flags(7, 2, 5), &[0, 1, 2, 3, 4]).unwrap();
        let t = TypeVector::barycentric(2);
        let cfg = MoebiusCheck { codomain_scale: 2.0, ..Default::default() };
        let r = check_moebius(&f, &t, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::NotMoebius);
        let plain = check_moebius(&f, &t, &MoebiusCheck::default()).unwrap();
        assert_eq!(plain.max_deviation, 0.0);
        // Deviation equals (c − 1)·max|cr| for the identity map.
        let mut max_cr = 0.0f64;
        for idx in 0..5usize.pow(4) {
            let q = [idx % 5, idx / 5 % 5, idx / 25 % 5, idx / 125];
            if let Ok(Some(Extended::Finite(v))) = cr_or_none(&quad_from(f.domain(), q, &t.signature()).unwrap(), &t) {
                max_cr = max_cr.max(v.abs());
            }
        }
        assert!((r.max_deviation - max_cr).abs() < 1e-12);
    }

    #[test]
    fn permutation_is_not_moebius() {
        let f = SampledMap::permutation(sample_flags(8, 3, 6), &[1, 2, 0, 4, 5, 3]).unwrap();
        let r = check_moebius(&f, &TypeVector::barycentric(3), &MoebiusCheck::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NotMoebius);
    }

    #[test]
    fn constant_map_violates_opposition() {
        let d = sample_flags(9, 3, 4);
        let c = d[0].clone();
        let f = SampledMap::new(d, vec![c; 4], Provenance::Table).unwrap();
        assert_eq!(check_opposition_preserving(&f, &FaceSignature::full(3)).unwrap().violations.len(), 12);
    }

    #[test]
    fn witness_for_lines() {
        let e = |i: usize| {
            Matrix::from_fn(2, 2, |r, c| if (c == 0 && r == i) || (c == 1 && r == 1 - i) { 1.0 } else { 0.0 })
        };
        let x = Flag::full(&e(0)).unwrap();
        let y = Flag::full(&e(1)).unwrap();
        let f = SampledMap::new(vec![x.clone(), y.clone()], vec![x.clone(), x.clone()], Provenance::Table).unwrap();
        assert!(matches!(injectivity_witness(&f, 0, 1, false, 1), Err(Error::CannotSeparate(_))));
        let w = injectivity_witness(&f, 0, 1, true, 1).unwrap();
        // a must be the line e₂.
        assert!(w.with_x.y.same_as(&y, 1e-12));
        assert_eq!(w.class_y, Admissibility::AdmissibleMinus);
        assert!(w.cr_x.is_finite());
        assert!(injectivity_witness(&f, 0, 0, true, 1).is_err());
    }

    #[test]
    fn witness_for_generic_merges() {
        for n in 2..=4 {
            for seed in 0..5 {
                let d = sample_flags(100 + seed, n, 6);
                let mut images = d.clone();
                images[1] = images[0].clone();
                let f = SampledMap::new(d, images, Provenance::Table).unwrap();
                let w = injectivity_witness(&f, 0, 1, true, seed).unwrap();
                assert_ne!(w.class_y, Admissibility::AllOpposite);
                assert!(!check_opposition_preserving(&f, &FaceSignature::full(n)).unwrap().violations.is_empty());
            }
        }
    }
}
