//! Products of symmetric spaces, hyperbolic planes, trees and lines with a
//! joined type: weighted Gromov products and cross ratios, the block-diagonal
//! embedding of products of SPD spaces, and recovery of the factor
//! permutation of a product Moebius map.

use crate::cartan::{FaceSignature, TypeVector};
use crate::crossratio::{classify_pattern, cr_scalar, gromov_closed, Admissibility, Extended, Quadruple};
use crate::error::{Error, Result};
use crate::flags::{is_opposite, Flag};
use crate::matnum::Matrix;
use crate::rank1::{h2_cr, h2_gromov, DiscBoundaryPoint, EndedTree};
use crate::spdspace::SpdPoint;

const WEIGHT_TOL: f64 = 1e-12;

/// One factor of a product space. `scale` multiplies the factor metric.
#[derive(Clone, Debug)]
pub struct Factor {
    pub kind: FactorKind,
    pub scale: f64,
}

#[derive(Clone, Debug)]
pub enum FactorKind {
    /// SL(n)/SO(n) with the type used on this factor.
    Spd {
        ty: TypeVector,
    },
    H2,
    Tree(EndedTree),
    /// The real line; its boundary is {+∞, −∞}.
    Line,
}

impl Factor {
    pub fn new(kind: FactorKind) -> Self {
        Factor { kind, scale: 1.0 }
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.scale *= s;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FactorKind::Spd { .. } => "spd",
            FactorKind::H2 => "h2",
            FactorKind::Tree(_) => "tree",
            FactorKind::Line => "line",
        }
    }
}

/// A product space together with its join weights μ (Σμᵢ² = 1). Factors with
/// μᵢ = 0 are inactive and ignored.
#[derive(Clone, Debug)]
pub struct ProductSpace {
    factors: Vec<Factor>,
    weights: Vec<f64>,
}

impl ProductSpace {
    pub fn new(factors: Vec<Factor>, weights: Vec<f64>) -> Result<Self> {
        if factors.is_empty() || factors.len() != weights.len() {
            return Err(Error::ArityMismatch(format!("{} factors but {} weights", factors.len(), weights.len())));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Invalid("weights must be nonnegative".into()));
        }
        let sq: f64 = weights.iter().map(|w| w * w).sum();
        if (sq - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Invalid(format!("weights must have unit length (Σμ² = {sq})")));
        }
        if factors.iter().any(|f| !(f.scale.is_finite() && f.scale > 0.0)) {
            return Err(Error::Invalid("factor scales must be positive".into()));
        }
        Ok(ProductSpace { factors, weights })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.weights[i] > 0.0
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineEnd {
    Plus,
    Minus,
}

/// Boundary data on one factor. On an SPD factor, x and z carry flags for
/// the factor type and y, w flags for its involute.
#[derive(Clone, Debug)]
pub enum FactorPoint {
    Flag(Flag),
    Disc(DiscBoundaryPoint),
    End(String),
    Line(LineEnd),
}

pub type ProductPoint = Vec<FactorPoint>;

/// A basepoint on one factor. The disc is always based at its center.
#[derive(Clone, Debug)]
pub enum FactorBase {
    Spd(SpdPoint),
    Center,
    Vertex(String),
    Line(f64),
}

fn mismatch(f: &Factor) -> Error {
    Error::ArityMismatch(format!("point does not belong to a {} factor", f.name()))
}

fn spd_flags<'a>(f: &Factor, x: &'a FactorPoint, y: &'a FactorPoint) -> Result<(&'a Flag, &'a Flag)> {
    match (x, y) {
        (FactorPoint::Flag(a), FactorPoint::Flag(b)) => Ok((a, b)),
        _ => Err(mismatch(f)),
    }
}

/// Whether x (of the factor type) and y (of the involuted type) are opposite.
pub fn factor_opposite(f: &Factor, x: &FactorPoint, y: &FactorPoint) -> Result<bool> {
    match (&f.kind, x, y) {
        (FactorKind::Spd { ty }, FactorPoint::Flag(a), FactorPoint::Flag(b)) => {
            let face = ty.signature();
            is_opposite(&a.truncate(&face)?, &b.truncate(&face.involute())?)
        }
        (FactorKind::H2, FactorPoint::Disc(a), FactorPoint::Disc(b)) => Ok(h2_gromov(*a, *b).is_ok()),
        (FactorKind::Tree(t), FactorPoint::End(a), FactorPoint::End(b)) => {
            t.anchor(a)?;
            t.anchor(b)?;
            Ok(a != b)
        }
        (FactorKind::Line, FactorPoint::Line(a), FactorPoint::Line(b)) => Ok(a != b),
        _ => Err(mismatch(f)),
    }
}

/// (x|y) on one factor, including its metric scale; +∞ when not opposite.
pub fn factor_gromov(f: &Factor, x: &FactorPoint, y: &FactorPoint, o: Option<&FactorBase>) -> Result<Extended<f64>> {
    if !factor_opposite(f, x, y)? {
        return Ok(Extended::PlusInf);
    }
    let v = match &f.kind {
        FactorKind::Spd { ty } => {
            let (a, b) = spd_flags(f, x, y)?;
            let id;
            let o = match o {
                Some(FactorBase::Spd(p)) => p,
                None => {
                    id = SpdPoint::identity(ty.n());
                    &id
                }
                Some(_) => return Err(mismatch(f)),
            };
            return Ok(gromov_closed(a, b, ty, o)?.map(|v| f.scale * v));
        }
        FactorKind::H2 => {
            if !matches!(o, None | Some(FactorBase::Center)) {
                return Err(mismatch(f));
            }
            let (FactorPoint::Disc(a), FactorPoint::Disc(b)) = (x, y) else { return Err(mismatch(f)) };
            h2_gromov(*a, *b)?
        }
        FactorKind::Tree(t) => {
            let (FactorPoint::End(a), FactorPoint::End(b)) = (x, y) else { return Err(mismatch(f)) };
            let o = match o {
                Some(FactorBase::Vertex(v)) => t.vertex(v)?,
                None => 0,
                Some(_) => return Err(mismatch(f)),
            };
            t.gromov(a, b, o)?
        }
        FactorKind::Line => {
            if !matches!(o, None | Some(FactorBase::Line(_))) {
                return Err(mismatch(f));
            }
            0.0
        }
    };
    Ok(Extended::Finite(f.scale * v))
}

/// Cross ratio of an all-opposite quadruple on one factor, scaled.
fn factor_cr_finite(f: &Factor, q: [&FactorPoint; 4]) -> Result<f64> {
    let v = match (&f.kind, q) {
        (
            FactorKind::Spd { ty },
            [FactorPoint::Flag(x), FactorPoint::Flag(y), FactorPoint::Flag(z), FactorPoint::Flag(w)],
        ) => {
            let face = ty.signature();
            let iface = face.involute();
            let quad =
                Quadruple::new(x.truncate(&face)?, y.truncate(&iface)?, z.truncate(&face)?, w.truncate(&iface)?)?;
            cr_scalar(&quad, ty, None)?.finite().ok_or(Error::Inadmissible)?
        }
        (FactorKind::H2, [FactorPoint::Disc(x), FactorPoint::Disc(y), FactorPoint::Disc(z), FactorPoint::Disc(w)]) => {
            h2_cr(*x, *y, *z, *w)?
        }
        (FactorKind::Tree(t), [FactorPoint::End(x), FactorPoint::End(y), FactorPoint::End(z), FactorPoint::End(w)]) => {
            t.cr(x, y, z, w)?.finite().ok_or(Error::Inadmissible)?
        }
        // All-opposite on a line forces x = z and y = w.
        (
            FactorKind::Line,
            [FactorPoint::Line(_), FactorPoint::Line(_), FactorPoint::Line(_), FactorPoint::Line(_)],
        ) => 0.0,
        _ => return Err(mismatch(f)),
    };
    Ok(f.scale * v)
}

fn check_arity(space: &ProductSpace, p: &ProductPoint) -> Result<()> {
    if p.len() != space.arity() {
        return Err(Error::ArityMismatch(format!(
            "point has {} components, space has {} factors",
            p.len(),
            space.arity()
        )));
    }
    Ok(())
}

/// Σ μᵢ (xᵢ|yᵢ)_{oᵢ} over active factors; +∞ if any active term is.
pub fn product_gromov(
    space: &ProductSpace,
    x: &ProductPoint,
    y: &ProductPoint,
    o: Option<&[FactorBase]>,
) -> Result<Extended<f64>> {
    check_arity(space, x)?;
    check_arity(space, y)?;
    if let Some(o) = o {
        if o.len() != space.arity() {
            return Err(Error::ArityMismatch("basepoint arity".into()));
        }
    }
    let mut sum = 0.0;
    let mut infinite = false;
    for (i, f) in space.factors.iter().enumerate() {
        if !space.is_active(i) {
            continue;
        }
        match factor_gromov(f, &x[i], &y[i], o.map(|o| &o[i]))? {
            Extended::Finite(v) => sum += space.weights[i] * v,
            _ => infinite = true,
        }
    }
    Ok(if infinite { Extended::PlusInf } else { Extended::Finite(sum) })
}

/// Whether two product points are opposite: opposite on every active factor.
pub fn product_opposite(space: &ProductSpace, x: &ProductPoint, y: &ProductPoint) -> Result<bool> {
    check_arity(space, x)?;
    check_arity(space, y)?;
    for (i, f) in space.factors.iter().enumerate() {
        if space.is_active(i) && !factor_opposite(f, &x[i], &y[i])? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn product_classify(space: &ProductSpace, q: [&ProductPoint; 4]) -> Result<Admissibility> {
    let [x, y, z, w] = q;
    Ok(classify_pattern(
        product_opposite(space, x, y)?,
        product_opposite(space, z, w)?,
        product_opposite(space, x, w)?,
        product_opposite(space, z, y)?,
    ))
}

/// Σ μᵢ crᵢ(xᵢ,yᵢ,zᵢ,wᵢ), with ±∞ conventions decided on the product.
pub fn product_cr(space: &ProductSpace, q: [&ProductPoint; 4]) -> Result<Extended<f64>> {
    match product_classify(space, q)? {
        Admissibility::Inadmissible => Err(Error::Inadmissible),
        Admissibility::AdmissibleMinus => Ok(Extended::MinusInf),
        Admissibility::AdmissiblePlus => Ok(Extended::PlusInf),
        Admissibility::AllOpposite => {
            let mut sum = 0.0;
            for (i, f) in space.factors.iter().enumerate() {
                if space.is_active(i) {
                    sum += space.weights[i] * factor_cr_finite(f, [&q[0][i], &q[1][i], &q[2][i], &q[3][i]])?;
                }
            }
            Ok(Extended::Finite(sum))
        }
    }
}

/// Per-factor cross ratios (scaled, unweighted) of an all-opposite quadruple.
pub fn factor_crs(space: &ProductSpace, q: [&ProductPoint; 4]) -> Result<Vec<f64>> {
    for p in q {
        check_arity(space, p)?;
    }
    space
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| factor_cr_finite(f, [&q[0][i], &q[1][i], &q[2][i], &q[3][i]]))
        .collect()
}

/// A product of SPD spaces P_{n₁} × … × P_{n_k} sitting block-diagonally in
/// P_N, N = Σnᵢ. The embedding multiplies the factor metric by N/nᵢ, and a
/// product type with weights μ corresponds to the P_N type whose i-th block
/// is μᵢλⁱ.
#[derive(Clone, Debug)]
pub struct BlockEmbedding {
    dims: Vec<usize>,
    /// (block, position in block) for each entry of the P_N type, descending.
    order: Vec<(usize, usize)>,
    ty: TypeVector,
}

const TIE_TOL: f64 = 1e-12;

fn block_order(entries: &[(f64, usize, usize)]) -> (Vec<(usize, usize)>, Vec<f64>, Vec<usize>) {
    let mut e = entries.to_vec();
    e.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut values: Vec<f64> = Vec::new();
    let mut mults: Vec<usize> = Vec::new();
    for &(v, _, _) in &e {
        match values.last() {
            Some(&last) if (last - v).abs() <= TIE_TOL => *mults.last_mut().expect("paired") += 1,
            _ => {
                values.push(v);
                mults.push(1);
            }
        }
    }
    (e.iter().map(|&(_, b, p)| (b, p)).collect(), values, mults)
}

impl BlockEmbedding {
    /// Requires every active factor to be SPD with metric scale N/nᵢ.
    pub fn new(space: &ProductSpace) -> Result<Self> {
        let mut dims = Vec::new();
        let mut entries = Vec::new();
        for (b, f) in space.factors().iter().enumerate() {
            let FactorKind::Spd { ty } = &f.kind else {
                return Err(Error::Invalid("block embedding needs SPD factors only".into()));
            };
            dims.push(ty.n());
            for (p, v) in ty.embed().coords().iter().enumerate() {
                entries.push((space.weights()[b] * v, b, p));
            }
        }
        let big_n: usize = dims.iter().sum();
        for (f, &n) in space.factors().iter().zip(&dims) {
            if (f.scale - big_n as f64 / n as f64).abs() > 1e-12 {
                return Err(Error::Invalid(format!("factor of dimension {n} must carry metric scale {big_n}/{n}")));
            }
        }
        let (order, values, mults) = block_order(&entries);
        let ty = TypeVector::new(big_n, values, mults)?;
        Ok(BlockEmbedding { dims, order, ty })
    }

    /// The induced type on P_N.
    pub fn ty(&self) -> &TypeVector {
        &self.ty
    }

    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.dims
            .iter()
            .map(|&d| {
                let o = acc;
                acc += d;
                o
            })
            .collect()
    }

    fn embed_with(&self, order: &[(usize, usize)], p: &ProductPoint) -> Result<Flag> {
        let big_n: usize = self.dims.iter().sum();
        let offsets = self.offsets();
        let mut basis = Matrix::zeros(big_n, big_n);
        for (col, &(b, pos)) in order.iter().enumerate() {
            let FactorPoint::Flag(f) = &p[b] else {
                return Err(Error::ArityMismatch("block embedding needs flags".into()));
            };
            if f.n() != self.dims[b] || !f.is_full() {
                return Err(Error::SignatureMismatch(
                    "block embedding needs full flags of the factor dimension".into(),
                ));
            }
            for r in 0..self.dims[b] {
                basis[(offsets[b] + r, col)] = f.basis()[(r, pos)];
            }
        }
        Flag::new(FaceSignature::full(big_n), &basis)
    }

    /// The P_N flag of a point whose factor flags carry the factor types.
    pub fn embed(&self, p: &ProductPoint) -> Result<Flag> {
        self.embed_with(&self.order, p)
    }

    /// The P_N flag of a point whose factor flags carry the involuted types.
    pub fn embed_involuted(&self, p: &ProductPoint) -> Result<Flag> {
        // Position c of an involuted factor flag carries −λ_{n−1−c}, so the
        // descending order is the reverse of the forward order.
        let order: Vec<(usize, usize)> = self.order.iter().rev().map(|&(b, pos)| (b, self.dims[b] - 1 - pos)).collect();
        self.embed_with(&order, p)
    }

    /// Block-diagonal basepoint from per-factor basepoints.
    pub fn embed_base(&self, o: &[SpdPoint]) -> Result<SpdPoint> {
        let big_n: usize = self.dims.iter().sum();
        let mut m = Matrix::zeros(big_n, big_n);
        for (off, p) in self.offsets().iter().zip(o) {
            let n = p.n();
            for i in 0..n {
                for j in 0..n {
                    m[(off + i, off + j)] = p.mat()[(i, j)];
                }
            }
        }
        SpdPoint::new(m)
    }

    /// cr on P_N of the embedded quadruple.
    pub fn cr(&self, q: [&ProductPoint; 4]) -> Result<Extended<f64>> {
        let quad = Quadruple::new(
            self.embed(q[0])?,
            self.embed_involuted(q[1])?,
            self.embed(q[2])?,
            self.embed_involuted(q[3])?,
        )?;
        cr_scalar(&quad, &self.ty, None)
    }
}

/// One probe of a product map: a quadruple varied on domain factor `factor`
/// with the other factors fixed at a base quadruple Q⁰.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitProbe {
    pub factor: usize,
    /// Domain cross ratio of the varied factor.
    pub domain_cr: f64,
    /// Codomain per-factor cross ratios of the image.
    pub image_crs: Vec<f64>,
    /// The same with Q⁰ replaced by (z₀,y₀,x₀,w₀).
    pub image_crs_flipped: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorSplit {
    /// s(i): the codomain factor that domain factor i maps to.
    pub permutation: Vec<usize>,
    /// rᵢ with cr_{s(i)}(f q) = rᵢ · crᵢ(q).
    pub ratios: Vec<f64>,
    pub residual: f64,
}

pub const SPLIT_TOL: f64 = 1e-8;

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Recovers the factor permutation and the metric ratios of a product
/// Moebius map. Averaging a probe with its flipped twin cancels the fixed
/// factors, leaving only the image of the varied one.
pub fn factor_split_recover(probes: &[SplitProbe], k: usize, candidates: Option<&[Vec<usize>]>) -> Result<FactorSplit> {
    if probes.iter().any(|p| p.factor >= k || p.image_crs.len() != k || p.image_crs_flipped.len() != k) {
        return Err(Error::ArityMismatch("probe does not match the factor count".into()));
    }
    for i in 0..k {
        let mut vals: Vec<f64> =
            probes.iter().filter(|p| p.factor == i && p.domain_cr.is_finite()).map(|p| p.domain_cr).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup_by(|a, b| (*a - *b).abs() <= SPLIT_TOL * (1.0 + b.abs()));
        if vals.iter().filter(|v| v.abs() > SPLIT_TOL).count() < 2 {
            return Err(Error::Ambiguous(format!("factor {i} needs two probes with distinct nonzero cross ratios")));
        }
    }
    let isolated: Vec<(usize, f64, Vec<f64>)> = probes
        .iter()
        .map(|p| {
            (p.factor, p.domain_cr, p.image_crs.iter().zip(&p.image_crs_flipped).map(|(a, b)| 0.5 * (a + b)).collect())
        })
        .collect();
    let all = permutations(k);
    let candidates = candidates.unwrap_or(&all);
    let mut fits = Vec::new();
    let mut best_residual = f64::INFINITY;
    for s in candidates {
        if s.len() != k {
            return Err(Error::ArityMismatch("candidate permutation length".into()));
        }
        let mut ratios = vec![0.0; k];
        for (i, r) in ratios.iter_mut().enumerate() {
            let (num, den) =
                isolated.iter().filter(|p| p.0 == i).fold((0.0, 0.0), |(n, d), p| (n + p.1 * p.2[s[i]], d + p.1 * p.1));
            *r = num / den;
        }
        let mut residual = 0.0f64;
        for (i, a, b) in &isolated {
            for (j, bj) in b.iter().enumerate() {
                let expected = if j == s[*i] { ratios[*i] * a } else { 0.0 };
                residual = residual.max((bj - expected).abs() / (1.0 + a.abs()));
            }
        }
        best_residual = best_residual.min(residual);
        if residual <= SPLIT_TOL && ratios.iter().all(|&r| r > 0.0) {
            fits.push(FactorSplit { permutation: s.clone(), ratios, residual });
        }
    }
    match fits.len() {
        0 => Err(Error::Inconsistent(format!("no permutation fits (best residual {best_residual:.3e})"))),
        1 => Ok(fits.pop().expect("one fit")),
        _ => Err(Error::Ambiguous(format!("{} permutations fit the probes", fits.len()))),
    }
}

/// Builds the probes of `f` by varying each domain factor over `variations`
/// with the other factors fixed at `base`.
pub fn split_probes(
    domain: &ProductSpace,
    codomain: &ProductSpace,
    f: impl Fn(&ProductPoint) -> Result<ProductPoint>,
    base: [&ProductPoint; 4],
    variations: &[(usize, [FactorPoint; 4])],
) -> Result<Vec<SplitProbe>> {
    let mut out = Vec::with_capacity(variations.len());
    for (i, q) in variations {
        let build = |flip: bool| -> Result<Vec<ProductPoint>> {
            let order = if flip { [2, 1, 0, 3] } else { [0, 1, 2, 3] };
            Ok((0..4)
                .map(|pos| {
                    let mut p = base[order[pos]].clone();
                    p[*i] = q[pos].clone();
                    p
                })
                .collect())
        };
        let image_of = |qs: Vec<ProductPoint>| -> Result<Vec<f64>> {
            let im: Vec<ProductPoint> = qs.iter().map(&f).collect::<Result<_>>()?;
            factor_crs(codomain, [&im[0], &im[1], &im[2], &im[3]])
        };
        let domain_cr = factor_cr_finite(&domain.factors[*i], [&q[0], &q[1], &q[2], &q[3]])?;
        out.push(SplitProbe {
            factor: *i,
            domain_cr,
            image_crs: image_of(build(false)?)?,
            image_crs_flipped: image_of(build(true)?)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn disc(a: f64) -> FactorPoint {
        FactorPoint::Disc(DiscBoundaryPoint::new(a).unwrap())
    }

    fn h2h2(alpha: f64) -> ProductSpace {
        ProductSpace::new(
            vec![Factor::new(FactorKind::H2), Factor::new(FactorKind::H2)],
            vec![alpha.cos(), alpha.sin()],
        )
        .unwrap()
    }

    #[test]
    fn weights_validated() {
        assert!(ProductSpace::new(vec![Factor::new(FactorKind::H2)], vec![0.5]).is_err());
        assert!(ProductSpace::new(vec![Factor::new(FactorKind::H2)], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn degenerate_weight_reduces_to_factor() {
        let s =
            ProductSpace::new(vec![Factor::new(FactorKind::H2), Factor::new(FactorKind::H2)], vec![1.0, 0.0]).unwrap();
        let x = vec![disc(0.0), disc(1.0)];
        let y = vec![disc(FRAC_PI_2), disc(1.0)];
        // Second factor coincides but is inactive.
        let g = product_gromov(&s, &x, &y, None).unwrap();
        assert!((g.to_f64() - 0.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn h2_square_example() {
        let s = h2h2(FRAC_PI_4);
        let x = vec![disc(0.0), disc(0.0)];
        let y = vec![disc(FRAC_PI_2), disc(PI)];
        let g = product_gromov(&s, &x, &y, None).unwrap().to_f64();
        assert!((g - 0.5 * 2f64.ln() / 2f64.sqrt()).abs() < 1e-15);
        let q: Vec<ProductPoint> = [0.0, PI, FRAC_PI_2, 1.5 * PI].iter().map(|&a| vec![disc(a), disc(a)]).collect();
        let v = product_cr(&s, [&q[0], &q[1], &q[2], &q[3]]).unwrap().to_f64();
        assert!((v - 2f64.sqrt() * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn product_conventions() {
        let s = h2h2(FRAC_PI_4);
        let p = |a: f64, b: f64| vec![disc(a), disc(b)];
        // x = y on the first factor only: (x,y) not opposite.
        let (x, y, z, w) = (p(0.0, 0.0), p(0.0, 1.0), p(2.0, 2.0), p(3.0, 3.0));
        assert_eq!(product_cr(&s, [&x, &y, &z, &w]).unwrap(), Extended::MinusInf);
        assert_eq!(product_cr(&s, [&x, &w, &z, &y]).unwrap(), Extended::PlusInf);
        assert_eq!(product_cr(&s, [&x, &x, &x, &w]), Err(Error::Inadmissible));
    }

    #[test]
    fn block_embedding_matches_product() {
        let mut rng = sample::rng(3);
        for _ in 0..5 {
            let t1 = sample::regular_type(&mut rng, 2);
            let t2 = sample::regular_type(&mut rng, 2);
            let a: f64 = 0.3 + 0.4 * (sample::uniform_matrix(&mut rng, 1)[(0, 0)] + 1.0);
            let space = ProductSpace::new(
                vec![
                    Factor::new(FactorKind::Spd { ty: t1 }).scaled(2.0),
                    Factor::new(FactorKind::Spd { ty: t2 }).scaled(2.0),
                ],
                vec![a.cos(), a.sin()],
            )
            .unwrap();
            let emb = BlockEmbedding::new(&space).unwrap();
            let sig = FaceSignature::full(2);
            let q1 = sample::opposite_quadruple(&mut rng, &sig);
            let q2 = sample::opposite_quadruple(&mut rng, &sig);
            let q: Vec<ProductPoint> =
                (0..4).map(|i| vec![FactorPoint::Flag(q1[i].clone()), FactorPoint::Flag(q2[i].clone())]).collect();
            let direct = emb.cr([&q[0], &q[1], &q[2], &q[3]]).unwrap().to_f64();
            let product = product_cr(&space, [&q[0], &q[1], &q[2], &q[3]]).unwrap().to_f64();
            assert!((direct - product).abs() < 1e-9, "{direct} vs {product}");
        }
    }

    #[test]
    fn swap_map_split() {
        let (m1, m2) = (0.6, 0.8);
        let space = ProductSpace::new(
            vec![Factor::new(FactorKind::H2).scaled(1.0 / m1), Factor::new(FactorKind::H2).scaled(1.0 / m2)],
            vec![m1, m2],
        )
        .unwrap();
        let swap = |p: &ProductPoint| -> Result<ProductPoint> { Ok(vec![p[1].clone(), p[0].clone()]) };
        let base: Vec<ProductPoint> = [0.1, 2.0, 3.5, 5.0].iter().map(|&a| vec![disc(a), disc(a + 0.3)]).collect();
        let quad = |a: [f64; 4]| a.map(disc);
        let variations = vec![
            (0, quad([0.0, 1.0, 2.0, 4.0])),
            (0, quad([0.5, 3.0, 1.0, 5.5])),
            (1, quad([0.2, 1.4, 2.2, 4.4])),
            (1, quad([1.0, 2.0, 4.0, 5.0])),
        ];
        let probes = split_probes(&space, &space, swap, [&base[0], &base[1], &base[2], &base[3]], &variations).unwrap();
        let split = factor_split_recover(&probes, 2, None).unwrap();
        assert_eq!(split.permutation, vec![1, 0]);
        assert!((split.ratios[0] - m1 / m2).abs() < 1e-12);
        assert!((split.ratios[1] - m2 / m1).abs() < 1e-12);

        let id = |p: &ProductPoint| -> Result<ProductPoint> { Ok(p.clone()) };
        let probes = split_probes(&space, &space, id, [&base[0], &base[1], &base[2], &base[3]], &variations).unwrap();
        let split = factor_split_recover(&probes, 2, None).unwrap();
        assert_eq!(split.permutation, vec![0, 1]);
        assert!(split.ratios.iter().all(|r| (r - 1.0).abs() < 1e-12));

        let mut bad = probes.clone();
        bad[1].image_crs[0] += 0.01;
        assert!(matches!(factor_split_recover(&bad, 2, None), Err(Error::Inconsistent(_))));
        assert!(matches!(factor_split_recover(&probes[..3], 2, None), Err(Error::Ambiguous(_))));
    }
}
