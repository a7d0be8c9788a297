//! C ABI for `xratio`.
//!
//! Objects are opaque heap handles created from JSON (same formats as the
//! `xr` tool) or from plain arrays, and released with the matching `_free`
//! function. Every fallible call returns an [`XrStatus`]; on failure the
//! message is available from [`xr_last_error`] until the next call on the
//! same thread. Panics are caught at the boundary and reported as
//! [`XrStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xratio::cartan::{FaceSignature, TypeVector};
use xratio::crossratio::{self, Extended, Quadruple};
use xratio::flags::Flag;
use xratio::json::{
    self, FlagRecord, ProductQuadRecord, ProductRecord, QuadRecord, SampledMapRecord, SpdRecord, TreeRecord, TypeRecord,
};
use xratio::matnum::Matrix;
use xratio::moebius::{self, MoebiusCheck, SampledMap, Verdict};
use xratio::products::{self, ProductSpace};
use xratio::rank1::{self, EndedTree};
use xratio::spdspace::{self, SpdPoint};
use xratio::Error;

/// Result of an FFI call. Values 1 to 3 mirror the `xr` exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XrStatus {
    Ok = 0,
    /// Malformed input: bad JSON, wrong dimensions, invalid parameters.
    InvalidInput = 1,
    /// Geometric degeneracy, e.g. non-opposite flags where a finite value is needed.
    Degenerate = 2,
    /// A verification (Moebius audit, tree extension, calibration) failed.
    VerificationFailed = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
    /// A Rust panic was caught; this is a bug.
    Internal = 5,
}

/// Kind of an extended real value.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XrKind {
    Finite = 0,
    PlusInf = 1,
    MinusInf = 2,
}

/// An extended real; `value` is meaningful only when `kind` is `Finite`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XrExtended {
    pub kind: XrKind,
    pub value: f64,
}

/// Summary of a Moebius audit.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XrMoebiusReport {
    pub max_deviation: f64,
    pub quadruples: usize,
    pub mismatches: usize,
    pub is_moebius: bool,
}

/// Type vector (a point of the model chamber).
pub struct XrType(TypeVector);
/// Flag in ℝⁿ.
pub struct XrFlag(Flag);
/// Point of the symmetric space of positive definite matrices.
pub struct XrSpd(SpdPoint);
/// Quadruple of flags (x, y, z, w).
pub struct XrQuad(Quadruple);
/// Finite metric tree with labelled ends.
pub struct XrTree(EndedTree);
/// Weighted product of factors.
pub struct XrProduct(ProductSpace);
/// Boundary map sampled on finitely many flags.
pub struct XrMap(SampledMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> XrStatus {
    match e.exit_code() {
        2 => XrStatus::Degenerate,
        3 => XrStatus::VerificationFailed,
        _ => XrStatus::InvalidInput,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type R<T> = Result<T, Fail>;

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> R<()>) -> XrStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XrStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            XrStatus::NullPointer
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            XrStatus::Internal
        }
    }
}

unsafe fn obj<'a, T>(p: *const T, what: &'static str) -> R<&'a T> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> R<&'a mut T> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> R<&'a str> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Lib(Error::Invalid(format!("{what} is not UTF-8"))))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> R<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn store<T>(slot: *mut *mut T, value: T) -> R<()> {
    *out(slot, "out")? = Box::into_raw(Box::new(value));
    Ok(())
}

fn extended(v: Extended<f64>) -> XrExtended {
    match v {
        Extended::Finite(value) => XrExtended { kind: XrKind::Finite, value },
        Extended::PlusInf => XrExtended { kind: XrKind::PlusInf, value: f64::INFINITY },
        Extended::MinusInf => XrExtended { kind: XrKind::MinusInf, value: f64::NEG_INFINITY },
    }
}

unsafe fn write_vector(coords: &[f64], dst: *mut f64, len: usize) -> R<()> {
    if len != coords.len() {
        return Err(Error::DimensionMismatch(format!("output buffer holds {len}, need {}", coords.len())).into());
    }
    if dst.is_null() {
        return Err(Fail::Null("out"));
    }
    ptr::copy_nonoverlapping(coords.as_ptr(), dst, len);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn xr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `json` as `Rec`, builds the value and stores a new handle.
unsafe fn from_json<Rec, T, H>(
    json: *const c_char,
    out: *mut *mut H,
    wrap: fn(T) -> H,
    build: fn(&Rec) -> xratio::Result<T>,
) -> XrStatus
where
    Rec: serde::de::DeserializeOwned,
{
    guard(|| {
        let rec: Rec = json::parse(text(json, "json")?)?;
        store(out, wrap(build(&rec)?))
    })
}

/// Type vector from `{"n", "values", "mults"?}`.
///
/// # Safety
/// `json` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xr_type_from_json(json: *const c_char, out: *mut *mut XrType) -> XrStatus {
    from_json(json, out, XrType, TypeRecord::build)
}

/// Flag from `{"basis": [columns], "signature"?, "n"?}`.
///
/// # Safety
/// `json` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xr_flag_from_json(json: *const c_char, out: *mut *mut XrFlag) -> XrStatus {
    from_json(json, out, XrFlag, FlagRecord::build)
}

/// Positive definite point from `{"mat": rows}`.
///
/// # Safety
/// `json` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xr_spd_from_json(json: *const c_char, out: *mut *mut XrSpd) -> XrStatus {
    from_json(json, out, XrSpd, SpdRecord::build)
}

/// Quadruple from `{"x", "y", "z", "w"}` flag records.
///
/// # Safety
/// `json` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xr_quad_from_json(json: *const c_char, out: *mut *mut XrQuad) -> XrStatus {
    from_json(json, out, XrQuad, QuadRecord::build)
}

/// Tree from `{"vertices", "edges": [[u, v, len]], "ends": [[end, vertex]]}`.
///
/// # Safety
/// `json` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xr_tree_from_json(json: *const c_char, out: *mut *mut XrTree) -> XrStatus {
    from_json(json, out, XrTree, TreeRecord::build)
}

/// Product space from `{"factors", "weights"}`.
///
/// # Safety
/// `json` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xr_product_from_json(json: *const c_char, out: *mut *mut XrProduct) -> XrStatus {
    from_json(json, out, XrProduct, ProductRecord::build)
}

/// Sampled map from `{"domain", "images", "provenance"?}`.
///
/// # Safety
/// `json` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xr_map_from_json(json: *const c_char, out: *mut *mut XrMap) -> XrStatus {
    from_json(json, out, XrMap, SampledMapRecord::build)
}

/// Releases a handle; NULL is ignored.
unsafe fn release<H>(p: *mut H) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Releases a handle created by one of the `xr_type_*` constructors; NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xr_type_free(p: *mut XrType) {
    release(p)
}

/// Releases a handle created by one of the `xr_flag_*` constructors; NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xr_flag_free(p: *mut XrFlag) {
    release(p)
}

/// Releases a handle created by one of the `xr_spd_*` constructors; NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xr_spd_free(p: *mut XrSpd) {
    release(p)
}

/// Releases a handle created by one of the `xr_quad_*` constructors; NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xr_quad_free(p: *mut XrQuad) {
    release(p)
}

/// Releases a handle created by one of the `xr_tree_*` constructors; NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xr_tree_free(p: *mut XrTree) {
    release(p)
}

/// Releases a handle created by one of the `xr_product_*` constructors; NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xr_product_free(p: *mut XrProduct) {
    release(p)
}

/// Releases a handle created by one of the `xr_map_*` constructors; NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xr_map_free(p: *mut XrMap) {
    release(p)
}

/// Type vector with `len` distinct values (decreasing) and multiplicities
/// summing to n.
///
/// # Safety
/// `values` and `mults` must point to `len` elements; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_type_new(
    n: usize,
    values: *const f64,
    mults: *const usize,
    len: usize,
    out: *mut *mut XrType,
) -> XrStatus {
    guard(|| {
        let v = slice(values, len, "values")?.to_vec();
        let m = slice(mults, len, "mults")?.to_vec();
        store(out, XrType(TypeVector::new(n, v, m)?))
    })
}

/// Full flag spanned by the columns of an n×n column-major matrix.
///
/// # Safety
/// `cols` must point to n·n doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_flag_full(n: usize, cols: *const f64, out: *mut *mut XrFlag) -> XrStatus {
    guard(|| {
        let data = slice(cols, n * n, "cols")?;
        let columns: Vec<Vec<f64>> = data.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        store(out, XrFlag(Flag::full(&Matrix::from_cols(&columns)?)?))
    })
}

/// Quadruple from four flags (copied).
///
/// # Safety
/// All pointers must be valid handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_quad_new(
    x: *const XrFlag,
    y: *const XrFlag,
    z: *const XrFlag,
    w: *const XrFlag,
    out: *mut *mut XrQuad,
) -> XrStatus {
    guard(|| {
        let q = Quadruple::new(
            obj(x, "x")?.0.clone(),
            obj(y, "y")?.0.clone(),
            obj(z, "z")?.0.clone(),
            obj(w, "w")?.0.clone(),
        )?;
        store(out, XrQuad(q))
    })
}

/// Dimension n of a type vector.
///
/// # Safety
/// `t` must be a valid handle or NULL (returns 0).
#[no_mangle]
pub unsafe extern "C" fn xr_type_dim(t: *const XrType) -> usize {
    t.as_ref().map_or(0, |t| t.0.n())
}

/// Closed-form Gromov product (x|y)_o of type `t`; `base` may be NULL for
/// the identity. Non-opposite flags give kind `PlusInf` with status Ok.
///
/// # Safety
/// Handles must be valid (`base` may be NULL); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_gromov(
    t: *const XrType,
    x: *const XrFlag,
    y: *const XrFlag,
    base: *const XrSpd,
    out: *mut XrExtended,
) -> XrStatus {
    guard(|| {
        let t = &obj(t, "type")?.0;
        let o = base.as_ref().map_or_else(|| SpdPoint::identity(t.n()), |b| b.0.clone());
        let v = crossratio::gromov_closed(&obj(x, "x")?.0, &obj(y, "y")?.0, t, &o)?;
        *self::out(out, "out")? = extended(v);
        Ok(())
    })
}

/// Scalar cross ratio cr_t(x, y, z, w); `base` may be NULL. Infinite
/// values follow the admissibility conventions and return status Ok;
/// inadmissible quadruples return `Degenerate`.
///
/// # Safety
/// Handles must be valid (`base` may be NULL); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_cr(
    t: *const XrType,
    q: *const XrQuad,
    base: *const XrSpd,
    out: *mut XrExtended,
) -> XrStatus {
    guard(|| {
        let o = base.as_ref().map(|b| &b.0);
        let v = crossratio::cr_scalar(&obj(q, "quad")?.0, &obj(t, "type")?.0, o)?;
        *self::out(out, "out")? = extended(v);
        Ok(())
    })
}

/// Vector-valued cross ratio over the face with dimension list `dims`
/// (NULL/0 for the full face), written to `dst[0..n]`. `kind` receives
/// the extended kind; `dst` is filled only when finite.
///
/// # Safety
/// `dims` must hold `dims_len` elements; `dst` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn xr_cr_vector(
    q: *const XrQuad,
    dims: *const usize,
    dims_len: usize,
    kind: *mut XrKind,
    dst: *mut f64,
    len: usize,
) -> XrStatus {
    guard(|| {
        let q = &obj(q, "quad")?.0;
        let n = q.x.n();
        let face = if dims_len == 0 {
            FaceSignature::full(n)
        } else {
            FaceSignature::new(n, slice(dims, dims_len, "dims")?.to_vec())?
        };
        let kind = out(kind, "kind")?;
        match crossratio::cr_vector(q, &face)? {
            Extended::Finite(v) => {
                *kind = XrKind::Finite;
                write_vector(v.coords(), dst, len)
            }
            Extended::PlusInf => {
                *kind = XrKind::PlusInf;
                Ok(())
            }
            Extended::MinusInf => {
                *kind = XrKind::MinusInf;
                Ok(())
            }
        }
    })
}

/// Flat coordinates of the retract word ρ_x ρ_w ρ_z ρ_y applied to `base`
/// (NULL for the canonical point of the flat through x and y).
///
/// # Safety
/// Handles must be valid (`base` may be NULL); `dst` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn xr_geom_interp(q: *const XrQuad, base: *const XrSpd, dst: *mut f64, len: usize) -> XrStatus {
    guard(|| {
        let v = crossratio::geom_interp(&obj(q, "quad")?.0, base.as_ref().map(|b| &b.0))?;
        write_vector(v.coords(), dst, len)
    })
}

/// Period of a regular hyperbolic g ∈ SL(n) (row-major n×n) against a
/// generic full flag x: writes cr_σ(g⁻, g·x, g⁺, x) to `dst[0..n]`.
///
/// # Safety
/// `g` must point to n·n doubles; `dst` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn xr_period(n: usize, g: *const f64, x: *const XrFlag, dst: *mut f64, len: usize) -> XrStatus {
    guard(|| {
        let rows: Vec<Vec<f64>> = slice(g, n * n, "g")?.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        let p = crossratio::period(&Matrix::from_rows(&rows)?, &obj(x, "x")?.0)?;
        write_vector(p.cr.coords(), dst, len)
    })
}

/// Fitted metric constant from `trials` random pairs.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_calibrate(n: usize, trials: usize, seed: u64, out: *mut f64) -> XrStatus {
    guard(|| {
        *self::out(out, "out")? = spdspace::calibrate(n, trials, seed)?.c_metric;
        Ok(())
    })
}

/// Gromov product of ends z, w seen from vertex o.
///
/// # Safety
/// Strings must be NUL-terminated; handles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_tree_gromov(
    t: *const XrTree,
    z: *const c_char,
    w: *const c_char,
    o: *const c_char,
    out: *mut f64,
) -> XrStatus {
    guard(|| {
        *self::out(out, "out")? = rank1::tree_gromov(&obj(t, "tree")?.0, text(z, "z")?, text(w, "w")?, text(o, "o")?)?;
        Ok(())
    })
}

/// Cross ratio of four ends.
///
/// # Safety
/// Strings must be NUL-terminated; handles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_tree_cr(
    t: *const XrTree,
    z1: *const c_char,
    w1: *const c_char,
    z2: *const c_char,
    w2: *const c_char,
    out: *mut XrExtended,
) -> XrStatus {
    guard(|| {
        let v = rank1::tree_cr(&obj(t, "tree")?.0, text(z1, "z1")?, text(w1, "w1")?, text(z2, "z2")?, text(w2, "w2")?)?;
        *self::out(out, "out")? = extended(v);
        Ok(())
    })
}

/// Checks that the end bijection `map_json` (`{"end": "image", …}`)
/// preserves cross ratios and extends to an isometry on median vertices,
/// within `tol` (≤ 0 for the default). Reports the largest distance distortion.
///
/// # Safety
/// Handles must be valid; `map_json` NUL-terminated; `distortion` valid.
#[no_mangle]
pub unsafe extern "C" fn xr_tree_extend(
    source: *const XrTree,
    target: *const XrTree,
    map_json: *const c_char,
    tol: f64,
    distortion: *mut f64,
) -> XrStatus {
    guard(|| {
        let f: json::EndMapRecord = json::parse(text(map_json, "map_json")?)?;
        let tol = if tol > 0.0 { tol } else { rank1::TREE_TOL };
        let iso = rank1::tree_moebius_extend_with_tol(&obj(source, "source")?.0, &obj(target, "target")?.0, &f, tol)?;
        *out(distortion, "distortion")? = iso.max_distortion;
        Ok(())
    })
}

/// Cross ratio in a product space of the quadruple given as JSON
/// (`{"x": [factor points], …}`).
///
/// # Safety
/// Handle must be valid; `quad_json` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn xr_product_cr(
    p: *const XrProduct,
    quad_json: *const c_char,
    out: *mut XrExtended,
) -> XrStatus {
    guard(|| {
        let rec: ProductQuadRecord = json::parse(text(quad_json, "quad_json")?)?;
        let q = rec.build()?;
        let v = products::product_cr(&obj(p, "product")?.0, [&q[0], &q[1], &q[2], &q[3]])?;
        *self::out(out, "out")? = extended(v);
        Ok(())
    })
}

/// Audits a sampled map against type `t` (same type on the codomain).
/// `threshold` ≤ 0 selects the default. A negative verdict fills `out`
/// and returns `VerificationFailed`.
///
/// # Safety
/// Handles must be valid; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_moebius_check(
    f: *const XrMap,
    t: *const XrType,
    threshold: f64,
    seed: u64,
    out: *mut XrMoebiusReport,
) -> XrStatus {
    guard(|| {
        let cfg = MoebiusCheck {
            threshold: if threshold > 0.0 { threshold } else { moebius::DEFAULT_THRESHOLD },
            seed,
            ..MoebiusCheck::default()
        };
        let r = moebius::check_moebius(&obj(f, "map")?.0, &obj(t, "type")?.0, &cfg)?;
        let ok = r.verdict == Verdict::Moebius;
        *self::out(out, "out")? = XrMoebiusReport {
            max_deviation: r.max_deviation,
            quadruples: r.quadruples,
            mismatches: r.mismatches,
            is_moebius: ok,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NotMoebius(r.max_deviation).into())
        }
    })
}
