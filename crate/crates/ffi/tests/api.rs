//! Exercises the C ABI from Rust, and compiles a C client against the
//! generated header when a C compiler is available.

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use xratio_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = xr_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

const TYPE2: &str = r#"{"n":2,"values":[0.7071067811865476,-0.7071067811865476]}"#;

unsafe fn flag(cols: [f64; 4]) -> *mut XrFlag {
    let mut f = ptr::null_mut();
    assert_eq!(xr_flag_full(2, cols.as_ptr(), &mut f), XrStatus::Ok);
    f
}

#[test]
fn scalar_and_vector_cross_ratios() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(xr_type_from_json(cs(TYPE2).as_ptr(), &mut t), XrStatus::Ok);
        assert_eq!(xr_type_dim(t), 2);
        let (x, y) = (flag([1.0, 0.0, 0.0, 1.0]), flag([0.0, 1.0, 1.0, 0.0]));
        let (z, w) = (flag([1.0, 1.0, 1.0, -1.0]), flag([1.0, -1.0, 1.0, 1.0]));
        let mut v = XrExtended { kind: XrKind::Finite, value: f64::NAN };
        assert_eq!(xr_gromov(t, x, y, ptr::null(), &mut v), XrStatus::Ok);
        assert_eq!(v.kind, XrKind::Finite);
        assert!(v.value.abs() < 1e-12);
        assert_eq!(xr_gromov(t, x, x, ptr::null(), &mut v), XrStatus::Ok);
        assert_eq!(v.kind, XrKind::PlusInf);

        let mut q = ptr::null_mut();
        assert_eq!(xr_quad_new(x, y, z, w, &mut q), XrStatus::Ok);
        assert_eq!(xr_cr(t, q, ptr::null(), &mut v), XrStatus::Ok);
        let scalar = v.value;
        let mut kind = XrKind::PlusInf;
        let mut buf = [0.0; 2];
        assert_eq!(xr_cr_vector(q, ptr::null(), 0, &mut kind, buf.as_mut_ptr(), 2), XrStatus::Ok);
        assert_eq!(kind, XrKind::Finite);
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((buf[0] * s2 - buf[1] * s2 - scalar).abs() < 1e-12);
        assert_eq!(xr_cr_vector(q, ptr::null(), 0, &mut kind, buf.as_mut_ptr(), 3), XrStatus::InvalidInput);

        let mut g = [0.0; 2];
        assert_eq!(xr_geom_interp(q, ptr::null(), g.as_mut_ptr(), 2), XrStatus::Ok);
        assert!((g[0] - 2.0 * buf[0]).abs() < 1e-9);

        let mut degenerate = ptr::null_mut();
        assert_eq!(xr_quad_new(x, x, z, w, &mut degenerate), XrStatus::Ok);
        assert_eq!(xr_cr(t, degenerate, ptr::null(), &mut v), XrStatus::Ok);
        assert_eq!(v.kind, XrKind::MinusInf);

        for f in [x, y, z, w] {
            xr_flag_free(f);
        }
        xr_quad_free(q);
        xr_quad_free(degenerate);
        xr_type_free(t);
    }
}

#[test]
fn errors_and_null_pointers() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(xr_type_from_json(cs("{").as_ptr(), &mut t), XrStatus::InvalidInput);
        assert!(last_error().contains("JSON"));
        assert!(t.is_null());
        assert_eq!(xr_type_from_json(ptr::null(), &mut t), XrStatus::NullPointer);
        let mut v = XrExtended { kind: XrKind::Finite, value: 0.0 };
        assert_eq!(xr_gromov(ptr::null(), ptr::null(), ptr::null(), ptr::null(), &mut v), XrStatus::NullPointer);
        let vals = [0.5, -0.5];
        let mults = [1usize, 1];
        assert_eq!(xr_type_new(2, vals.as_ptr(), mults.as_ptr(), 2, &mut t), XrStatus::InvalidInput);
        xr_type_free(ptr::null_mut());
    }
}

#[test]
fn trees_products_and_audits() {
    unsafe {
        let tree =
            cs(r#"{"vertices":["p","q"],"edges":[["p","q",2.5]],"ends":[["a","p"],["b","p"],["c","q"],["d","q"]]}"#);
        let mut t = ptr::null_mut();
        assert_eq!(xr_tree_from_json(tree.as_ptr(), &mut t), XrStatus::Ok);
        let mut v = XrExtended { kind: XrKind::Finite, value: 0.0 };
        let (a, b, c, d) = (cs("a"), cs("b"), cs("c"), cs("d"));
        assert_eq!(xr_tree_cr(t, a.as_ptr(), b.as_ptr(), c.as_ptr(), d.as_ptr(), &mut v), XrStatus::Ok);
        assert_eq!(v.value.abs(), 2.5);
        let mut g = 0.0;
        assert_eq!(xr_tree_gromov(t, a.as_ptr(), c.as_ptr(), cs("p").as_ptr(), &mut g), XrStatus::Ok);
        assert_eq!(g, 0.0);
        assert_eq!(xr_tree_gromov(t, a.as_ptr(), a.as_ptr(), cs("p").as_ptr(), &mut g), XrStatus::Degenerate);
        let map = cs(r#"{"a":"b","b":"a","c":"d","d":"c"}"#);
        let mut dist = f64::NAN;
        assert_eq!(xr_tree_extend(t, t, map.as_ptr(), 0.0, &mut dist), XrStatus::Ok);
        assert_eq!(dist, 0.0);
        let mut t2 = ptr::null_mut();
        assert_eq!(
            xr_tree_from_json(cs(&tree.to_str().unwrap().replace("2.5", "2.6")).as_ptr(), &mut t2),
            XrStatus::Ok
        );
        assert_eq!(xr_tree_extend(t, t2, map.as_ptr(), 0.0, &mut dist), XrStatus::VerificationFailed);
        xr_tree_free(t);
        xr_tree_free(t2);

        let mut p = ptr::null_mut();
        assert_eq!(
            xr_product_from_json(
                cs(r#"{"factors":[{"kind":"h2"},{"kind":"h2"}],"weights":[0.6,0.8]}"#).as_ptr(),
                &mut p
            ),
            XrStatus::Ok
        );
        let quad = cs(
            r#"{"x":[{"angle":0},{"angle":0}],"y":[{"angle":1.5},{"angle":2}],"z":[{"angle":3},{"angle":3}],"w":[{"angle":4.5},{"angle":5}]}"#,
        );
        assert_eq!(xr_product_cr(p, quad.as_ptr(), &mut v), XrStatus::Ok);
        assert_eq!(v.kind, XrKind::Finite);
        xr_product_free(p);

        let domain = r#"[{"basis":[[1,0],[0,1]]},{"basis":[[0,1],[1,0]]},{"basis":[[1,1],[1,-1]]},{"basis":[[1,-1],[1,1]]},{"basis":[[2,1],[-1,2]]}]"#;
        let images = r#"[{"basis":[[0,1],[1,0]]},{"basis":[[1,0],[0,1]]},{"basis":[[1,1],[1,-1]]},{"basis":[[1,-1],[1,1]]},{"basis":[[2,1],[-1,2]]}]"#;
        let mut m = ptr::null_mut();
        assert_eq!(
            xr_map_from_json(cs(&format!(r#"{{"domain":{domain},"images":{images}}}"#)).as_ptr(), &mut m),
            XrStatus::Ok
        );
        let mut ty = ptr::null_mut();
        assert_eq!(xr_type_from_json(cs(TYPE2).as_ptr(), &mut ty), XrStatus::Ok);
        let mut r = XrMoebiusReport { max_deviation: 0.0, quadruples: 0, mismatches: 0, is_moebius: true };
        assert_eq!(xr_moebius_check(m, ty, 0.0, 42, &mut r), XrStatus::VerificationFailed);
        assert!(!r.is_moebius && r.max_deviation > 1e-3, "{r:?}");
        xr_map_free(m);
        xr_type_free(ty);

        let mut c = 0.0;
        assert_eq!(xr_calibrate(2, 5, 42, &mut c), XrStatus::Ok);
        assert!((c - 2.0).abs() < 1e-3);
    }
}

#[test]
fn period_of_a_diagonal_element() {
    unsafe {
        let g = [4.0, 1.0, 0.0, 0.25];
        let x = flag([1.0, 1.0, -1.0, 1.0]);
        let mut out = [0.0; 2];
        assert_eq!(xr_period(2, g.as_ptr(), x, out.as_mut_ptr(), 2), XrStatus::Ok);
        // ℓ = c·2·log|eig| centered; symmetrized equals ℓ in rank one.
        let l = 2.0 * 2.0 * 4f64.ln();
        assert!((out[0] - l).abs() < 1e-9 && (out[1] + l).abs() < 1e-9, "{out:?}");
        xr_flag_free(x);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// The static library next to this test binary's profile directory.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile = exe.parent()?.parent()?;
    let lib = profile.join("libxratio_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_client_compiles_and_runs() {
    let header_dir = crate_dir().join("include");
    assert!(header_dir.join("xratio.h").exists(), "header not generated");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let Some(lib) = static_lib() else {
        eprintln!("skipping: static library not found");
        return;
    };
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("xratio_smoke");
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(&header_dir)
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to build");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("ok"));
}
