//! The verification battery: twelve numerical checks with fixed
//! tolerances, each reporting its worst observed error.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

use rand::Rng;

use crate::cartan::{a_inner, FaceSignature};
use crate::crossratio::{
    classify, classify_pattern, cr_gromov_sum, cr_project, cr_scalar, cr_vector, cr_wedge, geom_interp, gromov_closed,
    period, Admissibility, Extended, Quadruple,
};
use crate::error::{Error, Result};
use crate::flags::{is_opposite, Flag};
use crate::json::TreeRecord;
use crate::moebius::{check_moebius, MoebiusCheck, SampledMap, Verdict};
use crate::products::{
    factor_split_recover, product_cr, product_gromov, split_probes, BlockEmbedding, Factor, FactorKind, FactorPoint,
    LineEnd, ProductPoint, ProductSpace,
};
use crate::rank1::{tree_moebius_extend, DiscBoundaryPoint, EndedTree};
use crate::sample::{self, SampleRng};
use crate::spdspace::{busemann, c_metric, calibrate, gromov_oracle, retract, IdealPoint};

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Largest observed error (0 for purely logical checks).
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

fn check(name: &str, worst: f64, tolerance: f64, extra_ok: bool, detail: String) -> Check {
    Check { name: name.into(), pass: worst <= tolerance && extra_ok, worst, tolerance, detail }
}

fn failed(name: &str, tolerance: f64, e: Error) -> Check {
    Check { name: name.into(), pass: false, worst: f64::NAN, tolerance, detail: format!("error: {e}") }
}

/// Seeds a sub-generator per check so checks are independent of each other.
fn sub_rng(seed: u64, k: u64) -> SampleRng {
    sample::rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k))
}

fn full(n: usize) -> FaceSignature {
    FaceSignature::full(n)
}

fn finite(v: Extended<f64>) -> Result<f64> {
    v.finite().ok_or(Error::Inadmissible)
}

/// Closed-form Gromov products against the limit oracle, and calibration.
pub fn oracle_equivalence(seed: u64) -> Result<(f64, Vec<f64>)> {
    let mut rng = sub_rng(seed, 1);
    let mut worst = 0.0f64;
    let mut cs = Vec::new();
    for n in 2..=4 {
        for _ in 0..50 {
            let x = sample::full_flag(&mut rng, n);
            let y = sample::opposite_flag(&mut rng, &[&x]);
            let t = sample::regular_type(&mut rng, n);
            let o = sample::spd_point(&mut rng, n, 10.0);
            let closed = finite(gromov_closed(&x, &y, &t, &o)?)?;
            let oracle = gromov_oracle(&IdealPoint::new(x, t.clone())?, &IdealPoint::new(y, t.involute())?, &o, 1e4)?;
            worst = worst.max((closed - oracle).abs());
        }
        cs.push(calibrate(n, 10, seed)?.c_metric);
    }
    Ok((worst, cs))
}

fn random_quadruple(rng: &mut SampleRng, n: usize) -> Result<Quadruple> {
    let [x, y, z, w] = sample::opposite_quadruple(rng, &full(n));
    Quadruple::new(x, y, z, w)
}

/// Spread of cr over three basepoints and the basepoint-free formula.
pub fn basepoint_independence(seed: u64) -> Result<f64> {
    let mut rng = sub_rng(seed, 2);
    let mut worst = 0.0f64;
    for k in 0..30 {
        let n = 2 + k % 3;
        let q = random_quadruple(&mut rng, n)?;
        let t = sample::regular_type(&mut rng, n);
        let mut vals = vec![finite(cr_wedge(&q, &t)?)?];
        for _ in 0..3 {
            let o = sample::spd_point(&mut rng, n, 10.0);
            vals.push(finite(cr_gromov_sum(&q, &t, &o)?)?);
        }
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        worst = worst.max(hi - lo);
    }
    Ok(worst)
}

/// (x|y)_o − (x|y)_ô = ½b_x(o,ô) + ½b_y(o,ô).
pub fn basepoint_change(seed: u64) -> Result<f64> {
    let mut rng = sub_rng(seed, 3);
    let mut worst = 0.0f64;
    for k in 0..30 {
        let n = 2 + k % 3;
        let x = sample::full_flag(&mut rng, n);
        let y = sample::opposite_flag(&mut rng, &[&x]);
        let t = sample::regular_type(&mut rng, n);
        let o = sample::spd_point(&mut rng, n, 10.0);
        let oh = sample::spd_point(&mut rng, n, 10.0);
        let lhs = finite(gromov_closed(&x, &y, &t, &o)?)? - finite(gromov_closed(&x, &y, &t, &oh)?)?;
        let bx = busemann(&IdealPoint::new(x, t.clone())?, &o, &oh)?;
        let by = busemann(&IdealPoint::new(y, t.involute())?, &o, &oh)?;
        worst = worst.max((lhs - 0.5 * (bx + by)).abs());
    }
    Ok(worst)
}

/// (x|y)_{o,ξ} = ½b_x(o, ρ(o)) with ρ the retraction along horospheres at y.
pub fn busemann_retract(seed: u64) -> Result<f64> {
    let mut rng = sub_rng(seed, 4);
    let mut worst = 0.0f64;
    for k in 0..30 {
        let n = 2 + k % 2;
        let x = sample::full_flag(&mut rng, n);
        let y = sample::opposite_flag(&mut rng, &[&x]);
        let t = sample::regular_type(&mut rng, n);
        let o = sample::spd_point(&mut rng, n, 10.0);
        let g = finite(gromov_closed(&x, &y, &t, &o)?)?;
        let p = retract(&o, &y, &x)?;
        let b = busemann(&IdealPoint::new(x, t)?, &o, &p)?;
        worst = worst.max((g - 0.5 * b).abs());
    }
    Ok(worst)
}

/// The two sign symmetries, their composite, and both cocycle identities.
pub fn symmetries(seed: u64) -> Result<f64> {
    let mut rng = sub_rng(seed, 5);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let n = 2 + k % 3;
        let t = sample::type_for(&mut rng, &full(n));
        let [x1, y1, x2, y2] = sample::opposite_quadruple(&mut rng, &full(n));
        // y1, y2 are opposite to x1 and x2; make them mutually generic for the swaps.
        let w = sample::opposite_flag(&mut rng, &[&y1, &y2]);
        let v = sample::opposite_flag(&mut rng, &[&x1, &x2]);
        let cr = |a: &Flag, b: &Flag, c: &Flag, d: &Flag| -> Result<f64> {
            finite(cr_wedge(&Quadruple::new(a.clone(), b.clone(), c.clone(), d.clone())?, &t)?)
        };
        let base = cr(&x1, &y1, &x2, &y2)?;
        let errs = [
            base + cr(&x1, &y2, &x2, &y1)?,
            base + cr(&x2, &y1, &x1, &y2)?,
            base - cr(&x2, &y2, &x1, &y1)?,
            base - cr(&x1, &y1, &w, &y2)? - cr(&w, &y1, &x2, &y2)?,
            base - cr(&x1, &y1, &x2, &v)? - cr(&x1, &v, &x2, &y2)?,
        ];
        worst = errs.iter().fold(worst, |m, e| m.max(e.abs()));
    }
    Ok(worst)
}

/// ⟨cr_τ, ξ⟩ = cr_ξ for ξ interior to τ, and cr_τ = proj_τ(cr_σ), over all faces.
pub fn vector_machinery(seed: u64) -> Result<(f64, f64)> {
    let mut rng = sub_rng(seed, 6);
    let (mut inner, mut proj) = (0.0f64, 0.0f64);
    for n in 3..=4 {
        for face in FaceSignature::all_faces(n) {
            for _ in 0..3 {
                let q = random_quadruple(&mut rng, n)?;
                let chamber = cr_vector(&q, &full(n))?.finite().ok_or(Error::Inadmissible)?;
                let v = cr_vector(&q, &face)?.finite().ok_or(Error::Inadmissible)?;
                let xi = sample::type_for(&mut rng, &face);
                let scalar = finite(cr_scalar(&q, &xi, None)?)?;
                inner = inner.max((a_inner(&v, &xi.embed())? - scalar).abs());
                proj = proj.max(cr_project(&chamber, &face)?.max_diff(&v));
            }
        }
    }
    Ok((inner, proj))
}

/// cr_σ(g⁻, g·x, g⁺, x) = ½(ℓ + ιℓ), and independence of x.
pub fn periods(seed: u64) -> Result<(f64, f64)> {
    let mut rng = sub_rng(seed, 7);
    let (mut ident, mut indep) = (0.0f64, 0.0f64);
    for n in 3..=4 {
        for _ in 0..10 {
            let g = sample::hyperbolic(&mut rng, n);
            let (plus, minus, _) = crate::crossratio::eigenflags(&g)?;
            let x1 = sample::opposite_flag(&mut rng, &[&plus.complete(), &minus.complete()]);
            let x2 = sample::opposite_flag(&mut rng, &[&plus.complete(), &minus.complete()]);
            let p1 = period(&g, &x1)?;
            let p2 = period(&g, &x2)?;
            ident = ident.max(p1.cr.max_diff(&p1.symmetrized));
            indep = indep.max(p1.cr.max_diff(&p2.cr));
        }
    }
    Ok((ident, indep))
}

/// 2·cr_σ against the flat coordinate of the four-fold retract.
pub fn geometric_interpretation(seed: u64) -> Result<f64> {
    let mut rng = sub_rng(seed, 8);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let n = 2 + k % 2;
        let q = random_quadruple(&mut rng, n)?;
        let cr = cr_vector(&q, &full(n))?.finite().ok_or(Error::Inadmissible)?;
        let pi = geom_interp(&q, None)?;
        worst = worst.max(pi.max_diff(&cr.scale(2.0)));
    }
    Ok(worst)
}

fn disc(a: f64) -> Result<FactorPoint> {
    Ok(FactorPoint::Disc(DiscBoundaryPoint::new(a)?))
}

/// log|(x−y)(z−w)/((x−w)(z−y))| for points e^{iθ} of the unit circle.
fn complex_log_cr(a: [f64; 4]) -> f64 {
    let p = a.map(|t| (t.cos(), t.sin()));
    let d = |u: (f64, f64), v: (f64, f64)| ((u.0 - v.0).powi(2) + (u.1 - v.1).powi(2)).sqrt();
    (d(p[0], p[1]) * d(p[2], p[3]) / (d(p[0], p[3]) * d(p[2], p[1]))).ln()
}

/// Limit of t − ½d over the product ℝ × T along rays making angle α with
/// the line, evaluated in a cancellation-free form at large t.
fn wall_tree_limit(alpha: f64, g: f64, t: f64) -> f64 {
    // d/2 = sqrt(cos²α t² + (sin α t − g)²) for t beyond the branch point.
    let s = alpha.sin();
    let a = (alpha.cos() * t).powi(2) + (s * t - g).powi(2);
    (2.0 * t * s * g - g * g) / (t + a.sqrt())
}

/// H²×H² against complex arithmetic, P₂×P₂ in P₄, and the wall-tree weight.
pub fn products(seed: u64) -> Result<(f64, f64, f64)> {
    let mut rng = sub_rng(seed, 9);
    let mut h2 = 0.0f64;
    for &alpha in &[FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let space = ProductSpace::new(
            vec![Factor::new(FactorKind::H2), Factor::new(FactorKind::H2)],
            vec![alpha.cos(), alpha.sin()],
        )?;
        for _ in 0..10 {
            let a: [f64; 4] = [0; 4].map(|_| rng.random_range(0.0..std::f64::consts::TAU));
            let b: [f64; 4] = [0; 4].map(|_| rng.random_range(0.0..std::f64::consts::TAU));
            let q: Vec<ProductPoint> = (0..4).map(|i| Ok(vec![disc(a[i])?, disc(b[i])?])).collect::<Result<_>>()?;
            let v = finite(product_cr(&space, [&q[0], &q[1], &q[2], &q[3]])?)?;
            let expected = alpha.cos() * complex_log_cr(a) + alpha.sin() * complex_log_cr(b);
            h2 = h2.max((v - expected).abs());
        }
    }

    let mut block = 0.0f64;
    for _ in 0..10 {
        let alpha: f64 = rng.random_range(0.2..1.3);
        let t1 = sample::regular_type(&mut rng, 2);
        let t2 = sample::regular_type(&mut rng, 2);
        let space = ProductSpace::new(
            vec![
                Factor::new(FactorKind::Spd { ty: t1 }).scaled(2.0),
                Factor::new(FactorKind::Spd { ty: t2 }).scaled(2.0),
            ],
            vec![alpha.cos(), alpha.sin()],
        )?;
        let emb = BlockEmbedding::new(&space)?;
        let q1 = sample::opposite_quadruple(&mut rng, &full(2));
        let q2 = sample::opposite_quadruple(&mut rng, &full(2));
        let q: Vec<ProductPoint> =
            (0..4).map(|i| vec![FactorPoint::Flag(q1[i].clone()), FactorPoint::Flag(q2[i].clone())]).collect();
        let direct = finite(emb.cr([&q[0], &q[1], &q[2], &q[3]])?)?;
        let prod = finite(product_cr(&space, [&q[0], &q[1], &q[2], &q[3]])?)?;
        block = block.max((direct - prod).abs());
    }

    let mut wall = 0.0f64;
    for _ in 0..10 {
        let tree = sample::ended_tree(&mut rng, 8);
        let ends: Vec<String> = tree.ends().map(String::from).collect();
        let (zc, zd) = (ends[0].clone(), ends[1 + rng.random_range(0..ends.len() - 1)].clone());
        let o = rng.random_range(0..tree.vertices().len());
        let alpha: f64 = rng.random_range(0.2..1.4);
        let space = ProductSpace::new(
            vec![Factor::new(FactorKind::Line), Factor::new(FactorKind::Tree(tree.clone()))],
            vec![alpha.cos(), alpha.sin()],
        )?;
        let c = vec![FactorPoint::Line(LineEnd::Plus), FactorPoint::End(zc.clone())];
        let d = vec![FactorPoint::Line(LineEnd::Minus), FactorPoint::End(zd.clone())];
        let base =
            [crate::products::FactorBase::Line(0.0), crate::products::FactorBase::Vertex(tree.vertices()[o].clone())];
        let v = finite(product_gromov(&space, &c, &d, Some(&base))?)?;
        let g = tree.gromov(&zc, &zd, o)?;
        wall = wall.max((v - wall_tree_limit(alpha, g, 1e12)).abs());
    }
    Ok((h2, block, wall))
}

/// Relabeled copy with its vertex map and end map.
type Relabeling = (EndedTree, BTreeMap<String, String>, BTreeMap<String, String>);

/// A copy of `t` with vertices and ends renamed and listed in shuffled order.
fn relabeled(rng: &mut SampleRng, t: &EndedTree) -> Result<Relabeling> {
    let rec = TreeRecord::from(t);
    let vmap: BTreeMap<String, String> = rec.vertices.iter().map(|v| (v.clone(), format!("u_{v}"))).collect();
    let emap: BTreeMap<String, String> = rec.ends.iter().map(|(e, _)| (e.clone(), format!("f_{e}"))).collect();
    let mut vertices: Vec<String> = vmap.values().cloned().collect();
    let mut ends: Vec<(String, String)> = rec.ends.iter().map(|(e, v)| (emap[e].clone(), vmap[v].clone())).collect();
    let edges = rec.edges.iter().map(|(a, b, l)| (vmap[b].clone(), vmap[a].clone(), *l)).collect();
    for i in (1..vertices.len()).rev() {
        vertices.swap(i, rng.random_range(0..=i));
    }
    for i in (1..ends.len()).rev() {
        ends.swap(i, rng.random_range(0..=i));
    }
    Ok((EndedTree::new(vertices, edges, ends)?, vmap, emap))
}

/// Branch distances from cross ratios, and tree Moebius extension.
pub fn trees(seed: u64) -> Result<(f64, f64, bool)> {
    let mut rng = sub_rng(seed, 10);
    let mut branch = 0.0f64;
    for _ in 0..20 {
        let t = sample::double_tripod(&mut rng);
        let (p, q) = (0, t.vertices().len() - 1);
        let [z1, w1, z2, w2] = t.branch_quadruple(p, q)?;
        let cr = finite(t.cr(&z1, &w2, &z2, &w1)?)?;
        branch = branch.max((cr - t.distance(p, q)).abs());
    }
    let mut distortion = 0.0f64;
    let mut all_ok = true;
    let mut done = 0;
    while done < 10 {
        let t = sample::ended_tree(&mut rng, 8);
        let (t2, vmap, emap) = relabeled(&mut rng, &t)?;
        let iso = tree_moebius_extend(&t, &t2, &emap)?;
        distortion = distortion.max(iso.max_distortion);
        all_ok &= iso.vertex_map.iter().all(|(a, b)| vmap[a] == *b);
        // A 1% change of one edge must be detected.
        if let Some((a, b, l)) = t2.edges().next().map(|(a, b, l)| (a.to_string(), b.to_string(), l)) {
            let bent = t2.with_edge_length(&a, &b, 1.01 * l)?;
            all_ok &= matches!(tree_moebius_extend(&t, &bent, &emap), Err(Error::NotMoebius(_)));
        }
        done += 1;
    }
    Ok((branch, distortion, all_ok))
}

/// Matrix-induced maps pass the audit; the factor swap is recovered.
pub fn moebius_audit(seed: u64) -> Result<(f64, f64, bool)> {
    let mut rng = sub_rng(seed, 11);
    let mut dev = 0.0f64;
    let mut verdicts = true;
    for n in 2..=4 {
        for _ in 0..3 {
            let g = sample::unimodular(&mut rng, n, 10.0);
            let domain: Vec<Flag> = (0..6).map(|_| sample::full_flag(&mut rng, n)).collect();
            let f = SampledMap::from_matrix(&g, domain)?;
            let t = sample::regular_type(&mut rng, n);
            let r = check_moebius(&f, &t, &MoebiusCheck { seed, ..Default::default() })?;
            dev = dev.max(r.max_deviation);
            verdicts &= r.verdict == Verdict::Moebius;
        }
    }

    // M₁ = μ₁⁻¹M₀, M₂ = μ₂⁻¹M₀ with M₀ = P₂, and f(x, y) = (y, x).
    let (m1, m2) = (0.6, 0.8);
    let ty = sample::regular_type(&mut rng, 2);
    let factor = |s: f64| Factor::new(FactorKind::Spd { ty: ty.clone() }).scaled(s);
    let space = ProductSpace::new(vec![factor(1.0 / m1), factor(1.0 / m2)], vec![m1, m2])?;
    let swap = |p: &ProductPoint| -> Result<ProductPoint> { Ok(vec![p[1].clone(), p[0].clone()]) };
    let quad = |rng: &mut SampleRng| sample::opposite_quadruple(rng, &full(2)).map(FactorPoint::Flag);
    let b0 = quad(&mut rng);
    let b1 = quad(&mut rng);
    let base: Vec<ProductPoint> = (0..4).map(|i| vec![b0[i].clone(), b1[i].clone()]).collect();
    let variations: Vec<(usize, [FactorPoint; 4])> = (0..6).map(|k| (k % 2, quad(&mut rng))).collect();
    let probes = split_probes(&space, &space, swap, [&base[0], &base[1], &base[2], &base[3]], &variations)?;
    let split = factor_split_recover(&probes, 2, None)?;
    let ratio_err = (split.ratios[0] - m1 / m2).abs().max((split.ratios[1] - m2 / m1).abs());
    Ok((dev, ratio_err, verdicts && split.permutation == vec![1, 0]))
}

/// Classification against ground truth on quadruples with forced
/// non-opposite pairs, and the ±∞ conventions of every evaluation path.
pub fn degeneracy(seed: u64) -> Result<(usize, usize)> {
    let mut rng = sub_rng(seed, 12);
    let mut disagreements = 0;
    let mut total = 0;
    for k in 0..200 {
        let n = 2 + k % 3;
        let sig = if k % 4 == 3 { FaceSignature::corner(n, 1 + k % (n - 1)) } else { full(n) };
        let x = sample::flag(&mut rng, &sig);
        let z = sample::flag(&mut rng, &sig);
        // Bit i forces pair i of (x,y), (z,w), (x,w), (z,y) to be non-opposite.
        let mask: u32 = rng.random_range(0..16);
        let mut y = sample::opposite_flag(&mut rng, &[&x, &z]);
        let mut w = sample::opposite_flag(&mut rng, &[&x, &z]);
        if mask & 1 != 0 {
            y = sample::non_opposite_flag(&mut rng, &x);
        }
        if mask & 2 != 0 {
            w = sample::non_opposite_flag(&mut rng, &z);
        }
        if mask & 4 != 0 {
            w = sample::non_opposite_flag(&mut rng, &x);
        }
        if mask & 8 != 0 {
            y = sample::non_opposite_flag(&mut rng, &z);
        }
        let q = Quadruple::new(x, y, z, w)?;
        let ops =
            [is_opposite(&q.x, &q.y)?, is_opposite(&q.z, &q.w)?, is_opposite(&q.x, &q.w)?, is_opposite(&q.z, &q.y)?];
        let class = classify(&q)?;
        total += 1;
        let mut ok = class == classify_pattern(ops[0], ops[1], ops[2], ops[3]);
        // Forced pairs are degenerate; the overwritten ones may be too, so
        // only the forced direction is asserted.
        let forced = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0, mask & 8 != 0];
        let later_overwrite = [mask & 8 != 0, mask & 4 != 0, false, false];
        for i in 0..4 {
            if forced[i] && !later_overwrite[i] && ops[i] {
                ok = false;
            }
        }
        let t = sample::type_for(&mut rng, &sig);
        let expected = match class {
            Admissibility::Inadmissible => None,
            Admissibility::AdmissibleMinus => Some("minus_inf"),
            Admissibility::AdmissiblePlus => Some("plus_inf"),
            Admissibility::AllOpposite => Some("finite"),
        };
        let o = sample::spd_point(&mut rng, n, 10.0);
        for v in [cr_wedge(&q, &t), cr_gromov_sum(&q, &t, &o), cr_vector(&q, &sig).map(|v| v.map(|_| 0.0))] {
            let got = match v {
                Ok(v) => Some(v.kind()),
                Err(Error::Inadmissible) => None,
                Err(e) => return Err(e),
            };
            ok &= got == expected;
        }
        if !ok {
            disagreements += 1;
        }
    }
    Ok((disagreements, total))
}

/// Runs all checks, sorted by name.
pub fn run(seed: u64) -> Vec<Check> {
    let mut out = Vec::with_capacity(12);
    out.push(match oracle_equivalence(seed) {
        Ok((w, cs)) => {
            let cal = cs.iter().enumerate().fold(0.0f64, |m, (i, c)| m.max((c - c_metric(i + 2)).abs()));
            check(
                "01_oracle_equivalence",
                w,
                1e-5,
                cal <= 1e-3,
                format!("max |closed − oracle| = {w:.3e}; c_metric = {cs:?}"),
            )
        }
        Err(e) => failed("01_oracle_equivalence", 1e-5, e),
    });
    out.push(match basepoint_independence(seed) {
        Ok(w) => check("02_basepoint_independence", w, 1e-9, true, format!("max spread {w:.3e}")),
        Err(e) => failed("02_basepoint_independence", 1e-9, e),
    });
    out.push(match basepoint_change(seed) {
        Ok(w) => check("03_basepoint_change", w, 1e-8, true, format!("max residual {w:.3e}")),
        Err(e) => failed("03_basepoint_change", 1e-8, e),
    });
    out.push(match busemann_retract(seed) {
        Ok(w) => check("04_busemann_retract", w, 1e-8, true, format!("max residual {w:.3e}")),
        Err(e) => failed("04_busemann_retract", 1e-8, e),
    });
    out.push(match symmetries(seed) {
        Ok(w) => check("05_symmetries_cocycles", w, 1e-10, true, format!("max residual {w:.3e}")),
        Err(e) => failed("05_symmetries_cocycles", 1e-10, e),
    });
    out.push(match vector_machinery(seed) {
        Ok((a, b)) => {
            check("06_vector_machinery", a.max(b), 1e-9, true, format!("inner product {a:.3e}; projection {b:.3e}"))
        }
        Err(e) => failed("06_vector_machinery", 1e-9, e),
    });
    out.push(match periods(seed) {
        Ok((a, b)) => check("07_periods", a.max(b), 1e-8, true, format!("identity {a:.3e}; x-independence {b:.3e}")),
        Err(e) => failed("07_periods", 1e-8, e),
    });
    out.push(match geometric_interpretation(seed) {
        Ok(w) => check("08_geometric_interpretation", w, 1e-8, true, format!("max |π − 2cr| {w:.3e}")),
        Err(e) => failed("08_geometric_interpretation", 1e-8, e),
    });
    out.push(match products(seed) {
        Ok((a, b, c)) => {
            let pass = a <= 1e-10 && b <= 1e-8 && c <= 1e-10;
            Check {
                name: "09_products".into(),
                pass,
                worst: a.max(c).max(b),
                tolerance: 1e-8,
                detail: format!(
                    "H²×H² {a:.3e} (tol 1e-10); block P₂×P₂ {b:.3e} (tol 1e-8); wall tree {c:.3e} (tol 1e-10)"
                ),
            }
        }
        Err(e) => failed("09_products", 1e-8, e),
    });
    out.push(match trees(seed) {
        Ok((a, b, ok)) => {
            let pass = a <= 1e-12 && b <= 1e-9 && ok;
            Check {
                name: "10_trees".into(),
                pass,
                worst: a.max(b),
                tolerance: 1e-9,
                detail: format!("branch distance {a:.3e} (tol 1e-12); extension distortion {b:.3e} (tol 1e-9); maps and perturbation rejection {}", if ok { "ok" } else { "FAILED" }),
            }
        }
        Err(e) => failed("10_trees", 1e-9, e),
    });
    out.push(match moebius_audit(seed) {
        Ok((a, b, ok)) => check(
            "11_moebius_audit",
            a.max(b),
            1e-8,
            ok,
            format!(
                "matrix maps {a:.3e}; split ratio {b:.3e}; verdicts and permutation {}",
                if ok { "ok" } else { "FAILED" }
            ),
        ),
        Err(e) => failed("11_moebius_audit", 1e-8, e),
    });
    out.push(match degeneracy(seed) {
        Ok((bad, total)) => {
            check("12_degeneracy", bad as f64, 0.0, true, format!("{bad} of {total} quadruples disagree"))
        }
        Err(e) => failed("12_degeneracy", 0.0, e),
    });
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}
