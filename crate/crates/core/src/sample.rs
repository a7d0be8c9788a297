//! Seeded random generators for flags, types, basepoints and group elements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartan::{FaceSignature, TypeVector};
use crate::flags::Flag;
use crate::matnum::{det, gram_schmidt, Matrix};
use crate::rank1::EndedTree;
use crate::spdspace::SpdPoint;

pub const DEFAULT_SEED: u64 = 42;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut SampleRng, n: usize) -> Matrix {
    Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

/// Random rotation (orthogonal, det 1).
pub fn rotation(rng: &mut SampleRng, n: usize) -> Matrix {
    loop {
        if let Ok(mut q) = gram_schmidt(&uniform_matrix(rng, n), &Matrix::identity(n)) {
            if det(&q) < 0.0 {
                for i in 0..n {
                    q[(i, 0)] = -q[(i, 0)];
                }
            }
            return q;
        }
    }
}

/// Random element of SL(n) with condition number at most `max_cond`.
pub fn unimodular(rng: &mut SampleRng, n: usize, max_cond: f64) -> Matrix {
    let span = max_cond.ln();
    let mut logs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..span)).collect();
    let mean = logs.iter().sum::<f64>() / n as f64;
    logs.iter_mut().for_each(|l| *l -= mean);
    let u = rotation(rng, n);
    let v = rotation(rng, n);
    let d = Matrix::diag(&logs.iter().map(|l| l.exp()).collect::<Vec<_>>());
    &(&u * &d) * &v.transpose()
}

/// Random basepoint g·gᵗ with condition number at most `max_cond`.
pub fn spd_point(rng: &mut SampleRng, n: usize, max_cond: f64) -> SpdPoint {
    let g = unimodular(rng, n, max_cond.sqrt());
    SpdPoint::normalized(&(&g * &g.transpose())).expect("g·gᵗ is SPD")
}

pub fn full_flag(rng: &mut SampleRng, n: usize) -> Flag {
    flag(rng, &FaceSignature::full(n))
}

pub fn flag(rng: &mut SampleRng, signature: &FaceSignature) -> Flag {
    loop {
        if let Ok(f) = Flag::new(signature.clone(), &uniform_matrix(rng, signature.n())) {
            return f;
        }
    }
}

/// Smallest transversality accepted by the opposite-flag samplers. Keeps
/// random cross ratios moderate, so identities are tested away from the
/// ill-conditioned edge of the domain.
pub const MIN_TRANSVERSALITY: f64 = 0.05;

/// Random flag of signature ι(sig x) opposite to every flag in `to`.
pub fn opposite_flag(rng: &mut SampleRng, to: &[&Flag]) -> Flag {
    let sig = to[0].signature().involute();
    loop {
        let f = flag(rng, &sig);
        if to.iter().all(|x| crate::flags::transversality(x, &f).is_ok_and(|m| m > MIN_TRANSVERSALITY)) {
            return f;
        }
    }
}

/// Random type interior to the face `signature`.
pub fn type_for(rng: &mut SampleRng, signature: &FaceSignature) -> TypeVector {
    let l = signature.dims().len();
    loop {
        let mut v: Vec<f64> = (0..l).map(|_| rng.random_range(-1.0..1.0)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        if v.windows(2).all(|w| w[0] - w[1] > 0.05) {
            if let Ok(t) = TypeVector::normalized(signature.n(), v, signature.mults()) {
                return t;
            }
        }
    }
}

pub fn regular_type(rng: &mut SampleRng, n: usize) -> TypeVector {
    type_for(rng, &FaceSignature::full(n))
}

/// Four full flags pairwise opposite across the (x,z) / (y,w) split.
pub fn opposite_quadruple(rng: &mut SampleRng, signature: &FaceSignature) -> [Flag; 4] {
    loop {
        let x = flag(rng, signature);
        let z = flag(rng, signature);
        let y = opposite_flag(rng, &[&x, &z]);
        let w = opposite_flag(rng, &[&x, &z]);
        if crate::flags::transversality(&x, &y).is_ok_and(|m| m > MIN_TRANSVERSALITY)
            && crate::flags::transversality(&z, &w).is_ok_and(|m| m > MIN_TRANSVERSALITY)
        {
            return [x, y, z, w];
        }
    }
}

/// Random regular hyperbolic element P·diag(e)·P⁻¹ of SL(n): real
/// eigenvalues with well-separated moduli and random signs (even count of
/// negatives so the determinant is 1).
pub fn hyperbolic(rng: &mut SampleRng, n: usize) -> Matrix {
    let mut logs: Vec<f64> = Vec::with_capacity(n);
    while logs.len() < n {
        let l: f64 = rng.random_range(-1.5..1.5);
        if logs.iter().all(|m| (m - l).abs() > 0.2) {
            logs.push(l);
        }
    }
    let mean = logs.iter().sum::<f64>() / n as f64;
    let mut eig: Vec<f64> = logs.iter().map(|l| (l - mean).exp()).collect();
    let negatives = rng.random_range(0..=n / 2) * 2;
    for e in eig.iter_mut().take(negatives) {
        *e = -*e;
    }
    let p = unimodular(rng, n, 20.0);
    let pinv = crate::matnum::inverse(&p).expect("unimodular");
    &(&p * &Matrix::diag(&eig)) * &pinv
}

/// A flag of the involuted signature that is not opposite to `x`: at a
/// random step i, W_{n−i} contains a vector of X_i.
pub fn non_opposite_flag(rng: &mut SampleRng, x: &Flag) -> Flag {
    let sig = x.signature().involute();
    let n = x.n();
    let steps = x.signature().steps();
    let i = steps[rng.random_range(0..steps.len())];
    loop {
        let mut basis = uniform_matrix(rng, n);
        let c: Vec<f64> = (0..i).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = x.subspace(i).mul_vec(&c);
        basis.set_col(rng.random_range(0..n - i), &v);
        if let Ok(f) = Flag::new(sig.clone(), &basis) {
            return f;
        }
    }
}

/// A finite tree with edge lengths in multiples of 1/8 and at most four
/// vertices, each of total degree ≥ 3 counting ends. Extra ends are added
/// at random up to `max_ends`.
pub fn ended_tree(rng: &mut SampleRng, max_ends: usize) -> EndedTree {
    let m = rng.random_range(1..=4usize);
    let names: Vec<String> = (0..m).map(|i| format!("v{i}")).collect();
    let mut deg = vec![0usize; m];
    let mut edges = Vec::new();
    for v in 1..m {
        let u = rng.random_range(0..v);
        deg[u] += 1;
        deg[v] += 1;
        edges.push((names[u].clone(), names[v].clone(), rng.random_range(1..=24) as f64 / 8.0));
    }
    let mut ends = Vec::new();
    for v in 0..m {
        for _ in deg[v]..3 {
            ends.push((format!("e{}", ends.len()), names[v].clone()));
        }
    }
    while ends.len() < max_ends && rng.random_bool(0.5) {
        let v = rng.random_range(0..m);
        ends.push((format!("e{}", ends.len()), names[v].clone()));
    }
    EndedTree::new(names, edges, ends).expect("generated tree is valid")
}

/// Branch points p = v0 and q = vk joined by a path of k ≤ 3 edges with
/// lengths in multiples of 1/8; two ends at p and q, one at inner vertices.
pub fn double_tripod(rng: &mut SampleRng) -> EndedTree {
    let k = rng.random_range(1..=3usize);
    let names: Vec<String> = (0..=k).map(|i| format!("v{i}")).collect();
    let edges =
        (0..k).map(|i| (names[i].clone(), names[i + 1].clone(), rng.random_range(1..=40) as f64 / 8.0)).collect();
    let mut ends = vec![("z1".to_string(), names[0].clone()), ("w1".to_string(), names[0].clone())];
    for (i, v) in names.iter().enumerate().take(k).skip(1) {
        ends.push((format!("m{i}"), v.clone()));
    }
    ends.push(("z2".to_string(), names[k].clone()));
    ends.push(("w2".to_string(), names[k].clone()));
    EndedTree::new(names, edges, ends).expect("generated tree is valid")
}
