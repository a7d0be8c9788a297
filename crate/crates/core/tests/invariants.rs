//! Property tests over randomly sampled configurations.

use std::f64::consts::TAU;

use proptest::prelude::*;

use xratio::cartan::{a_inner, FaceSignature};
use xratio::crossratio::{cr_project, cr_scalar, cr_vector, cr_wedge, gromov_closed, Extended, Quadruple};
use xratio::flags;
use xratio::json::{parse, QuadRecord};
use xratio::moebius::{check_moebius, MoebiusCheck, SampledMap, Verdict};
use xratio::rank1::{h2_cr, tree_cr, DiscBoundaryPoint};
use xratio::sample;
use xratio::spdspace::{distance, SpdPoint};

fn quad(seed: u64, n: usize) -> Quadruple {
    let mut rng = sample::rng(seed);
    let [x, y, z, w] = sample::opposite_quadruple(&mut rng, &FaceSignature::full(n));
    Quadruple::new(x, y, z, w).unwrap()
}

fn finite(v: Extended<f64>) -> f64 {
    v.finite().expect("finite cross ratio")
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cross_ratio_is_invariant_under_the_group(seed in any::<u64>(), n in 2usize..=4) {
        let q = quad(seed, n);
        let mut rng = sample::rng(seed ^ 0x5eed);
        let t = sample::regular_type(&mut rng, n);
        let g = sample::unimodular(&mut rng, n, 20.0);
        let a = finite(cr_wedge(&q, &t).unwrap());
        let b = finite(cr_wedge(&q.act(&g).unwrap(), &t).unwrap());
        prop_assert!(close(a, b, 1e-8), "{a} vs {b}");
    }

    #[test]
    fn swapping_x_and_z_negates(seed in any::<u64>(), n in 2usize..=4) {
        let q = quad(seed, n);
        let t = sample::regular_type(&mut sample::rng(seed.wrapping_add(1)), n);
        let a = finite(cr_wedge(&q, &t).unwrap());
        let s = Quadruple::new(q.z.clone(), q.y.clone(), q.x.clone(), q.w.clone()).unwrap();
        let b = finite(cr_wedge(&s, &t).unwrap());
        prop_assert!(close(a, -b, 1e-9), "{a} vs {b}");
        let p = Quadruple::new(q.z.clone(), q.w.clone(), q.x.clone(), q.y.clone()).unwrap();
        prop_assert!(close(a, finite(cr_wedge(&p, &t).unwrap()), 1e-9));
    }

    #[test]
    fn gromov_sum_agrees_with_basepoint_free_formula(seed in any::<u64>(), n in 2usize..=4) {
        let q = quad(seed, n);
        let mut rng = sample::rng(seed.wrapping_mul(3));
        let t = sample::regular_type(&mut rng, n);
        let o = sample::spd_point(&mut rng, n, 10.0);
        let a = finite(cr_scalar(&q, &t, Some(&o)).unwrap());
        let b = finite(cr_wedge(&q, &t).unwrap());
        prop_assert!(close(a, b, 1e-8), "{a} vs {b}");
    }

    #[test]
    fn vector_cross_ratio_pairs_to_scalar(seed in any::<u64>(), n in 2usize..=4) {
        let q = quad(seed, n);
        let t = sample::regular_type(&mut sample::rng(!seed), n);
        let v = cr_vector(&q, &FaceSignature::full(n)).unwrap().finite().unwrap();
        let a = a_inner(&v, &t.embed()).unwrap();
        let b = finite(cr_wedge(&q, &t).unwrap());
        prop_assert!(close(a, b, 1e-9), "{a} vs {b}");
    }

    #[test]
    fn face_projection_is_idempotent(seed in any::<u64>(), n in 3usize..=4) {
        let q = quad(seed, n);
        let v = cr_vector(&q, &FaceSignature::full(n)).unwrap().finite().unwrap();
        for face in FaceSignature::all_faces(n) {
            let p = cr_project(&v, &face).unwrap();
            let pp = cr_project(&p, &face).unwrap();
            prop_assert!(p.max_diff(&pp) <= 1e-12);
        }
    }

    #[test]
    fn gromov_product_is_equivariant(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = sample::rng(seed);
        let x = sample::full_flag(&mut rng, n);
        let y = sample::opposite_flag(&mut rng, &[&x]);
        let t = sample::regular_type(&mut rng, n);
        let g = sample::unimodular(&mut rng, n, 10.0);
        let o = SpdPoint::identity(n);
        let a = finite(gromov_closed(&x, &y, &t, &o).unwrap());
        let gx = flags::act(&g, &x).unwrap();
        let gy = flags::act(&g, &y).unwrap();
        let b = finite(gromov_closed(&gx, &gy, &t, &o.act(&g).unwrap()).unwrap());
        prop_assert!(close(a, b, 1e-8), "equivariance {a} vs {b}");
    }

    #[test]
    fn opposition_is_preserved_by_the_group(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = sample::rng(seed);
        let x = sample::full_flag(&mut rng, n);
        let y = sample::opposite_flag(&mut rng, &[&x]);
        let z = sample::non_opposite_flag(&mut rng, &x);
        let g = sample::unimodular(&mut rng, n, 10.0);
        let (gx, gy, gz) = (flags::act(&g, &x).unwrap(), flags::act(&g, &y).unwrap(), flags::act(&g, &z).unwrap());
        prop_assert!(flags::is_opposite(&gx, &gy).unwrap());
        prop_assert!(!flags::is_opposite(&gx, &gz).unwrap());
    }

    #[test]
    fn spd_distance_is_a_metric(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = sample::rng(seed);
        let p: Vec<SpdPoint> = (0..3).map(|_| sample::spd_point(&mut rng, n, 50.0)).collect();
        let d = |a: usize, b: usize| distance(&p[a], &p[b]).unwrap();
        prop_assert!(close(d(0, 1), d(1, 0), 1e-10));
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
        prop_assert!(d(0, 0) <= 1e-10);
    }

    #[test]
    fn matrix_induced_maps_are_moebius(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = sample::rng(seed);
        let domain: Vec<_> = (0..5).map(|_| sample::full_flag(&mut rng, n)).collect();
        let g = sample::unimodular(&mut rng, n, 10.0);
        let f = SampledMap::from_matrix(&g, domain).unwrap();
        let t = sample::regular_type(&mut rng, n);
        let r = check_moebius(&f, &t, &MoebiusCheck::default()).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Moebius);
    }

    #[test]
    fn h2_cross_ratio_is_rotation_invariant(a in 0.0..TAU, b in 0.0..TAU, c in 0.0..TAU, d in 0.0..TAU, r in -10.0..10.0f64) {
        let gaps = [a - b, c - d, a - d, c - b];
        prop_assume!(gaps.iter().all(|g| (g.rem_euclid(TAU)).min(TAU - g.rem_euclid(TAU)) > 1e-3));
        let p = |t: f64| DiscBoundaryPoint::new(t).unwrap();
        let u = h2_cr(p(a), p(b), p(c), p(d)).unwrap();
        let v = h2_cr(p(a + r), p(b + r), p(c + r), p(d + r)).unwrap();
        prop_assert!(close(u, v, 1e-9), "{u} vs {v}");
    }

    #[test]
    fn tree_cross_ratio_scales_with_the_metric(seed in any::<u64>(), s in 0.1..10.0f64) {
        let t = sample::ended_tree(&mut sample::rng(seed), 6);
        let ends: Vec<String> = t.ends().map(str::to_string).collect();
        let big = t.scaled(s);
        for (i, a) in ends.iter().enumerate() {
            for b in ends.iter().skip(i + 1) {
                for c in ends.iter().filter(|c| *c != a && *c != b) {
                    for d in ends.iter().filter(|d| *d != a && *d != b && *d != c) {
                        let u = finite(tree_cr(&t, a, b, c, d).unwrap());
                        let v = finite(tree_cr(&big, a, b, c, d).unwrap());
                        prop_assert!(close(s * u, v, 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn quadruple_records_round_trip(seed in any::<u64>(), n in 2usize..=4) {
        let q = quad(seed, n);
        let text = serde_json::to_string(&QuadRecord::from(&q)).unwrap();
        let back = parse::<QuadRecord>(&text).unwrap().build().unwrap();
        let t = sample::regular_type(&mut sample::rng(seed), n);
        prop_assert!(close(finite(cr_wedge(&q, &t).unwrap()), finite(cr_wedge(&back, &t).unwrap()), 1e-12));
    }
}
