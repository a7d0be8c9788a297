//! Singular values of graded matrices `C = diag(e^{r})·Q·diag(e^{c})` whose
//! entries leave the f64 exponent range.
//!
//! Entries are carried as a mantissa with a separate 64-bit binary exponent.
//! The matrix is reduced by Householder QR with row sorting and column
//! pivoting, after which one-sided Jacobi on the rows of `R` recovers every
//! singular value to high relative accuracy, so the returned logarithms are
//! accurate in absolute terms even when they differ by thousands.

use super::Matrix;

const LN2_HI: f64 = 6.931_471_803_691_238e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;

/// `m · 2^e` with `0.5 ≤ |m| < 1`, or `m = 0`.
#[derive(Clone, Copy, Debug)]
struct Xf {
    m: f64,
    e: i64,
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    if exp == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, exp - 1022)
}

impl Xf {
    const ZERO: Xf = Xf { m: 0.0, e: 0 };

    fn new(m: f64, e: i64) -> Xf {
        if m == 0.0 {
            return Xf::ZERO;
        }
        let (mm, ee) = frexp(m);
        Xf { m: mm, e: e + ee }
    }

    /// `v · exp(s)` without forming `exp(s)`.
    fn from_scaled(v: f64, s: f64) -> Xf {
        let k = (s / LN2_HI).floor();
        let f = (s - k * LN2_HI) - k * LN2_LO;
        Xf::new(v * f.exp(), k as i64)
    }

    fn is_zero(self) -> bool {
        self.m == 0.0
    }

    fn mul(self, o: Xf) -> Xf {
        Xf::new(self.m * o.m, self.e + o.e)
    }

    fn div(self, o: Xf) -> Xf {
        Xf::new(self.m / o.m, self.e - o.e)
    }

    fn neg(self) -> Xf {
        Xf { m: -self.m, e: self.e }
    }

    fn abs(self) -> Xf {
        Xf { m: self.m.abs(), e: self.e }
    }

    fn add(self, o: Xf) -> Xf {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = big.e - small.e;
        if d > 80 {
            return big;
        }
        Xf::new(big.m + small.m * 2f64.powi(-(d as i32)), big.e)
    }

    fn sub(self, o: Xf) -> Xf {
        self.add(o.neg())
    }

    fn sqrt(self) -> Xf {
        if self.is_zero() {
            return Xf::ZERO;
        }
        debug_assert!(self.m > 0.0);
        if self.e % 2 == 0 {
            Xf::new(self.m.sqrt(), self.e / 2)
        } else {
            Xf::new((2.0 * self.m).sqrt(), (self.e - 1) / 2)
        }
    }

    fn ln(self) -> f64 {
        self.m.abs().ln() + (self.e as f64) * LN2_HI + (self.e as f64) * LN2_LO
    }

    /// `|self| > |o|`.
    fn abs_gt(self, o: Xf) -> bool {
        if self.is_zero() {
            return false;
        }
        if o.is_zero() {
            return true;
        }
        if self.e != o.e {
            return self.e > o.e;
        }
        self.m.abs() > o.m.abs()
    }

    fn signum(self) -> f64 {
        if self.m < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    fn scale_f64(self, s: f64) -> Xf {
        Xf::new(self.m * s, self.e)
    }
}

fn dot(u: &[Xf], v: &[Xf]) -> Xf {
    u.iter().zip(v).fold(Xf::ZERO, |acc, (a, b)| acc.add(a.mul(*b)))
}

/// Natural logarithms of the singular values of
/// `C[i][j] = q[i][j]·exp(row_log[i] + col_log[j])`, sorted descending.
///
/// `q` must be square and non-singular.
pub fn log_singular_values_graded(row_log: &[f64], q: &Matrix, col_log: &[f64]) -> Vec<f64> {
    let n = q.rows();
    assert!(q.is_square() && row_log.len() == n && col_log.len() == n);
    let mut rows: Vec<Vec<Xf>> =
        (0..n).map(|i| (0..n).map(|j| Xf::from_scaled(q[(i, j)], row_log[i] + col_log[j])).collect()).collect();
    // Row sorting by decreasing max-magnitude makes Householder row-wise stable.
    let row_key = |r: &Vec<Xf>| r.iter().copied().fold(Xf::ZERO, |m, x| if x.abs_gt(m) { x.abs() } else { m });
    rows.sort_by(|a, b| {
        let (ka, kb) = (row_key(a), row_key(b));
        if ka.abs_gt(kb) {
            std::cmp::Ordering::Less
        } else if kb.abs_gt(ka) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    // Work column-wise: cols[j][i] = C[i][j].
    let mut cols: Vec<Vec<Xf>> = (0..n).map(|j| (0..n).map(|i| rows[i][j]).collect()).collect();
    let mut r = vec![vec![Xf::ZERO; n]; n];
    for k in 0..n {
        let norm2 = |c: &Vec<Xf>| c[k..].iter().fold(Xf::ZERO, |acc, x| acc.add(x.mul(*x)));
        let mut best = k;
        let mut best_norm = norm2(&cols[k]);
        for (j, c) in cols.iter().enumerate().skip(k + 1) {
            let nj = norm2(c);
            if nj.abs_gt(best_norm) {
                best = j;
                best_norm = nj;
            }
        }
        cols.swap(k, best);
        let norm = best_norm.sqrt();
        let x0 = cols[k][k];
        let alpha = norm.scale_f64(-x0.signum());
        let mut v: Vec<Xf> = cols[k][k..].to_vec();
        v[0] = x0.sub(alpha);
        let vtv = dot(&v, &v);
        if !vtv.is_zero() {
            for col in cols.iter_mut().skip(k + 1) {
                let f = dot(&v, &col[k..]).div(vtv).scale_f64(2.0);
                for (ci, vi) in col[k..].iter_mut().zip(&v) {
                    *ci = ci.sub(f.mul(*vi));
                }
            }
        }
        cols[k][k] = alpha;
        for item in cols[k].iter_mut().skip(k + 1) {
            *item = Xf::ZERO;
        }
    }
    for k in 0..n {
        for j in k + 1..n {
            r[k][j] = cols[j][k];
        }
        r[k][k] = cols[k][k];
    }
    // One-sided Jacobi on the rows of R.
    let tol = 4.0 * f64::EPSILON * n as f64;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for qi in p + 1..n {
                let a = dot(&r[p], &r[p]);
                let b = dot(&r[qi], &r[qi]);
                let g = dot(&r[p], &r[qi]);
                if g.is_zero() {
                    continue;
                }
                let bound = a.mul(b).sqrt().scale_f64(tol);
                if !g.abs_gt(bound) {
                    continue;
                }
                rotated = true;
                let zeta = b.sub(a).div(g.scale_f64(2.0));
                let one = Xf::new(1.0, 0);
                let t = one.div(zeta.abs().add(one.add(zeta.mul(zeta)).sqrt())).scale_f64(zeta.signum());
                let c = one.div(one.add(t.mul(t)).sqrt());
                let s = c.mul(t);
                let (rp, rq) = (r[p].clone(), r[qi].clone());
                for k in 0..n {
                    r[p][k] = c.mul(rp[k]).sub(s.mul(rq[k]));
                    r[qi][k] = s.mul(rp[k]).add(c.mul(rq[k]));
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut out: Vec<f64> = r.iter().map(|row| 0.5 * dot(row, row).ln()).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matnum::{gram_schmidt, sym_eig};

    fn rotation(n: usize, seed: u64) -> Matrix {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let m = Matrix::from_fn(n, n, |_, _| next());
        gram_schmidt(&m, &Matrix::identity(n)).unwrap()
    }

    #[test]
    fn xf_arithmetic() {
        let a = Xf::from_scaled(3.0, 2000.0);
        let b = Xf::from_scaled(2.0, 1990.0);
        let ratio = a.div(b).ln();
        assert!((ratio - (1.5f64.ln() + 10.0)).abs() < 1e-12);
        let s = a.mul(a).sqrt();
        assert!((s.ln() - a.ln()).abs() < 1e-12);
        let d = a.sub(a);
        assert!(d.is_zero());
    }

    #[test]
    fn matches_dense_route_at_moderate_scale() {
        for seed in 1..6 {
            let n = 4;
            let q = rotation(n, seed);
            let r: [f64; 4] = [0.3, -0.7, 1.1, -0.2];
            let c = [-0.5, 0.9, 0.1, 0.4];
            let m = Matrix::from_fn(n, n, |i, j| q[(i, j)] * (r[i] + c[j]).exp());
            let e = sym_eig(&(&m.transpose() * &m)).unwrap();
            let want: Vec<f64> = e.values.iter().map(|v| 0.5 * v.ln()).collect();
            let got = log_singular_values_graded(&r, &q, &c);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn orthogonal_core_keeps_product_of_scales() {
        // Σ log σ = log|det C| = Σ r + Σ c for orthogonal q.
        let q = rotation(3, 11);
        let r = [-1500.0, 20.0, 1480.0];
        let c = [2900.0, -3.0, -2897.0];
        let got = log_singular_values_graded(&r, &q, &c);
        let sum: f64 = got.iter().sum();
        assert!(sum.abs() < 1e-9, "{sum}");
    }

    #[test]
    fn matches_high_precision_reference() {
        // Reference logarithms from a 40000-bit eigen-solve of CᵗC (dynamic range e^±11000).
        let q = Matrix::from_rows(&[
            vec![-0.5183132370608642, 0.06597673742698365, 0.3538651409616691, 0.7757434630199325],
            vec![0.24867824928878254, -0.8398542386352278, 0.48217532886872355, 0.017633445705428533],
            vec![-0.4760044357182776, -0.5384200462138466, -0.6939459301930955, 0.04430211033396508],
            vec![0.6655300848156143, -0.019894265505717636, -0.4009057996723866, 0.6292443596841799],
        ])
        .unwrap();
        let got =
            log_singular_values_graded(&[-2500.3, -800.1, 900.7, 2399.7], &q, &[3000.2, 1200.5, -1000.4, -3200.3]);
        let want = [5399.492828564165, 2100.606967697466, -1799.7537296639794, -5700.346066597653];
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}
