//! `xr`: command-line front end. Reads JSON inputs, writes one JSON document
//! to standard output and diagnostics to standard error.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 geometric degeneracy,
//! 3 failed verification.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use xratio::cartan::FaceSignature;
use xratio::crossratio::{self, Extended};
use xratio::json::{self as records, *};
use xratio::moebius::{self, MoebiusCheck, Verdict};
use xratio::products;
use xratio::rank1;
use xratio::spdspace::{self, IdealPoint, SpdPoint};
use xratio::{suite, Error};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "xr", version, about = "Boundary cross ratios on symmetric spaces, trees and products")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Tol {
    /// Tolerance override; falls back to XR_TOL, then the built-in default.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form Gromov product (x|y)_o of type ξ.
    Gromov {
        #[arg(long = "type")]
        ty: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Scalar cross ratio cr_ξ(x, y, z, w).
    Cr {
        #[arg(long)]
        xi: PathBuf,
        #[arg(long)]
        quad: PathBuf,
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Vector-valued cross ratio over a face (full face by default).
    CrVector {
        #[arg(long)]
        quad: PathBuf,
        #[arg(long)]
        face: Option<PathBuf>,
    },
    /// Orthogonal projection of a Cartan vector onto a face.
    CrProject {
        #[arg(long)]
        vector: PathBuf,
        #[arg(long)]
        face: PathBuf,
    },
    /// Period of a regular hyperbolic g against a generic full flag x.
    Period {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        x: PathBuf,
    },
    /// Flat coordinates of the retract word applied to o.
    GeomInterp {
        #[arg(long)]
        quad: PathBuf,
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Raw limit-definition Gromov product at parameter t.
    Oracle {
        #[arg(long = "type")]
        ty: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long, default_value_t = 1e4)]
        t: f64,
    },
    /// Fits the metric constant against the limit oracle.
    Calibrate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Gromov product of two ends seen from a vertex.
    TreeGromov {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        z: String,
        #[arg(long)]
        w: String,
        #[arg(long)]
        o: String,
    },
    /// Cross ratio of four ends, given as a comma-separated list z1,w1,z2,w2.
    TreeCr {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        ends: Vec<String>,
    },
    /// Extends a cross-ratio preserving end bijection to a vertex isometry.
    TreeExtend {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        tol: Tol,
    },
    /// Cross ratio in a weighted product of rank-one and symmetric factors.
    ProductCr {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        quad: PathBuf,
    },
    /// Audits a sampled boundary map for cross-ratio preservation.
    MoebiusCheck {
        #[arg(long)]
        map: PathBuf,
        #[arg(long = "type")]
        ty: PathBuf,
        #[arg(long)]
        codomain_type: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        codomain_scale: f64,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        tol: Tol,
    },
    /// Runs the full acceptance battery.
    Suite {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// A command's JSON result and exit status.
struct Outcome {
    doc: Value,
    code: u8,
}

impl Outcome {
    fn ok(doc: Value) -> Self {
        Outcome { doc, code: 0 }
    }
}

type Res = Result<Outcome, Error>;

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Invalid(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?
    };
    records::parse(&text)
}

fn load_base(path: Option<&PathBuf>) -> Result<Option<SpdPoint>, Error> {
    path.map(|p| load::<SpdRecord>(p)?.build()).transpose()
}

fn tolerance(flag: &Tol, default: f64) -> Result<f64, Error> {
    let tol = match flag.tol {
        Some(t) => t,
        None => match std::env::var("XR_TOL") {
            Ok(s) => s.trim().parse().map_err(|_| Error::Invalid(format!("XR_TOL is not a number: {s}")))?,
            Err(_) => default,
        },
    };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

/// Infinite scalar results are degenerate where a finite value was asked for.
fn scalar_outcome(v: Extended<f64>) -> Outcome {
    let code = if v.is_finite() { 0 } else { 2 };
    Outcome { doc: scalar_value(&v), code }
}

fn run(cmd: Cmd) -> Res {
    match cmd {
        Cmd::Gromov { ty, x, y, base } => {
            let t = load::<TypeRecord>(&ty)?.build()?;
            let x = load::<FlagRecord>(&x)?.build()?;
            let y = load::<FlagRecord>(&y)?.build()?;
            let o = load_base(base.as_ref())?.unwrap_or_else(|| SpdPoint::identity(t.n()));
            Ok(match crossratio::gromov_closed(&x, &y, &t, &o)? {
                Extended::Finite(v) => Outcome::ok(json!({ "value": v })),
                other => Outcome { doc: json!({ "value": null, "kind": other.kind() }), code: 2 },
            })
        }
        Cmd::Cr { xi, quad, base } => {
            let t = load::<TypeRecord>(&xi)?.build()?;
            let q = load::<QuadRecord>(&quad)?.build()?;
            let o = load_base(base.as_ref())?;
            Ok(scalar_outcome(crossratio::cr_scalar(&q, &t, o.as_ref())?))
        }
        Cmd::CrVector { quad, face } => {
            let q = load::<QuadRecord>(&quad)?.build()?;
            let face = match face {
                Some(p) => load::<FaceRecord>(&p)?.build()?,
                None => FaceSignature::full(q.x.n()),
            };
            let v = crossratio::cr_vector(&q, &face)?;
            let code = if v.is_finite() { 0 } else { 2 };
            Ok(Outcome { doc: vector_value(&v), code })
        }
        Cmd::CrProject { vector, face } => {
            let v = load::<VectorRecord>(&vector)?.build()?;
            let face = load::<FaceRecord>(&face)?.build()?;
            let p = crossratio::cr_project(&v, &face)?;
            Ok(Outcome::ok(json!({ "vector": p.coords() })))
        }
        Cmd::Period { g, x } => {
            let g = load::<MatrixRecord>(&g)?.build()?;
            let x = load::<FlagRecord>(&x)?.build()?;
            let p = crossratio::period(&g, &x)?;
            Ok(Outcome::ok(json!({
                "cr": p.cr.coords(),
                "ell": p.ell.coords(),
                "symmetrized": p.symmetrized.coords(),
                "residual": p.cr.max_diff(&p.symmetrized),
            })))
        }
        Cmd::GeomInterp { quad, base } => {
            let q = load::<QuadRecord>(&quad)?.build()?;
            let o = load_base(base.as_ref())?;
            let v = crossratio::geom_interp(&q, o.as_ref())?;
            Ok(Outcome::ok(json!({ "vector": v.coords() })))
        }
        Cmd::Oracle { ty, x, y, base, t } => {
            let tv = load::<TypeRecord>(&ty)?.build()?;
            let xf = load::<FlagRecord>(&x)?.build()?;
            let yf = load::<FlagRecord>(&y)?.build()?;
            let o = load_base(base.as_ref())?.unwrap_or_else(|| SpdPoint::identity(tv.n()));
            let v = spdspace::gromov_oracle(
                &IdealPoint::new(xf, tv.clone())?,
                &IdealPoint::new(yf, tv.involute())?,
                &o,
                t,
            )?;
            Ok(Outcome::ok(json!({ "value": v, "t": t })))
        }
        Cmd::Calibrate { n, trials, seed } => {
            let r = spdspace::calibrate(n, trials, seed)?;
            let code = if (r.c_metric - spdspace::c_metric(n)).abs() <= 1e-3 { 0 } else { 3 };
            Ok(Outcome { doc: calibration_value(&r), code })
        }
        Cmd::TreeGromov { tree, z, w, o } => {
            let t = load::<TreeRecord>(&tree)?.build()?;
            Ok(Outcome::ok(json!({ "value": rank1::tree_gromov(&t, &z, &w, &o)? })))
        }
        Cmd::TreeCr { tree, ends } => {
            let t = load::<TreeRecord>(&tree)?.build()?;
            if ends.len() != 4 {
                return Err(Error::Invalid(format!("--ends needs four names, got {}", ends.len())));
            }
            Ok(scalar_outcome(rank1::tree_cr(&t, &ends[0], &ends[1], &ends[2], &ends[3])?))
        }
        Cmd::TreeExtend { source, target, map, tol } => {
            let t1 = load::<TreeRecord>(&source)?.build()?;
            let t2 = load::<TreeRecord>(&target)?.build()?;
            let f: EndMapRecord = load(&map)?;
            let iso = rank1::tree_moebius_extend_with_tol(&t1, &t2, &f, tolerance(&tol, rank1::TREE_TOL)?)?;
            Ok(Outcome::ok(isometry_value(&iso)))
        }
        Cmd::ProductCr { space, quad } => {
            let s = load::<ProductRecord>(&space)?.build()?;
            let q = load::<ProductQuadRecord>(&quad)?.build()?;
            let refs = [&q[0], &q[1], &q[2], &q[3]];
            let v = products::product_cr(&s, refs)?;
            let mut out = scalar_outcome(v);
            if out.code == 0 {
                out.doc["factors"] = json!(products::factor_crs(&s, refs)?);
            }
            Ok(out)
        }
        Cmd::MoebiusCheck { map, ty, codomain_type, codomain_scale, budget, seed, tol } => {
            let f = load::<SampledMapRecord>(&map)?.build()?;
            let t = load::<TypeRecord>(&ty)?.build()?;
            let codomain_type = codomain_type.map(|p| load::<TypeRecord>(&p)?.build()).transpose()?;
            let cfg = MoebiusCheck {
                codomain_type,
                codomain_scale,
                threshold: tolerance(&tol, moebius::DEFAULT_THRESHOLD)?,
                budget,
                seed,
            };
            let r = moebius::check_moebius(&f, &t, &cfg)?;
            let code = if r.verdict == Verdict::Moebius { 0 } else { 3 };
            Ok(Outcome { doc: moebius_report_value(&r), code })
        }
        Cmd::Suite { seed } => {
            let checks = suite::run(seed);
            let all = checks.iter().all(|c| c.pass);
            for c in &checks {
                eprintln!(
                    "{:<30} {}  worst {:.3e}  tol {:.0e}  {}",
                    c.name,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.worst,
                    c.tolerance,
                    c.detail
                );
            }
            let doc = json!({
                "seed": seed,
                "pass": all,
                "checks": checks.iter().map(|c| json!({
                    "name": c.name, "pass": c.pass, "worst": c.worst, "tolerance": c.tolerance, "detail": c.detail,
                })).collect::<Vec<_>>(),
            });
            Ok(Outcome { doc, code: if all { 0 } else { 3 } })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.doc).expect("JSON values serialize"));
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("xr: {e}");
            let code = e.exit_code();
            println!("{}", json!({ "error": e.to_string(), "exit_code": code }));
            ExitCode::from(code as u8)
        }
    }
}
