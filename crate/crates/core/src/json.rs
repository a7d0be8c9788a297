//! JSON records for the command-line tool and the C interface.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cartan::{CartanVector, FaceSignature, TypeVector};
use crate::crossratio::{Extended, Quadruple};
use crate::error::{Error, Result};
use crate::flags::Flag;
use crate::matnum::Matrix;
use crate::moebius::{MoebiusReport, Provenance, SampledMap};
use crate::products::{Factor, FactorBase, FactorKind, FactorPoint, LineEnd, ProductPoint, ProductSpace};
use crate::rank1::{DiscBoundaryPoint, EndedTree, TreeIsometry};
use crate::spdspace::{CalibrationReport, SpdPoint};

fn bad(e: serde_json::Error) -> Error {
    Error::Invalid(format!("JSON: {e}"))
}

/// Parses a record type from text.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(bad)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeRecord {
    pub n: usize,
    pub values: Vec<f64>,
    /// Defaults to all ones.
    #[serde(default)]
    pub mults: Option<Vec<usize>>,
}

impl TypeRecord {
    pub fn build(&self) -> Result<TypeVector> {
        let mults = self.mults.clone().unwrap_or_else(|| vec![1; self.values.len()]);
        TypeVector::new(self.n, self.values.clone(), mults)
    }
}

impl From<&TypeVector> for TypeRecord {
    fn from(t: &TypeVector) -> Self {
        TypeRecord { n: t.n(), values: t.values().to_vec(), mults: Some(t.mults().to_vec()) }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceRecord {
    pub n: usize,
    pub dims: Vec<usize>,
}

impl FaceRecord {
    pub fn build(&self) -> Result<FaceSignature> {
        FaceSignature::new(self.n, self.dims.clone())
    }
}

/// A flag: basis columns, signature defaulting to the full flag, and n
/// defaulting to the column length.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagRecord {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub signature: Option<Vec<usize>>,
    pub basis: Vec<Vec<f64>>,
}

impl FlagRecord {
    pub fn build(&self) -> Result<Flag> {
        let n = match (self.n, self.basis.first()) {
            (Some(n), _) => n,
            (None, Some(c)) => c.len(),
            (None, None) => return Err(Error::Invalid("flag needs n or a basis".into())),
        };
        let sig = match &self.signature {
            Some(d) => FaceSignature::new(n, d.clone())?,
            None => FaceSignature::full(n),
        };
        if self.basis.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch(format!("flag basis columns must have length {n}")));
        }
        Flag::new(sig, &Matrix::from_cols(&self.basis)?)
    }
}

impl From<&Flag> for FlagRecord {
    fn from(f: &Flag) -> Self {
        FlagRecord { n: Some(f.n()), signature: Some(f.signature().dims().to_vec()), basis: f.basis().to_cols() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpdRecord {
    #[serde(default)]
    pub n: Option<usize>,
    pub mat: Vec<Vec<f64>>,
}

impl SpdRecord {
    pub fn build(&self) -> Result<SpdPoint> {
        if self.n.is_some_and(|n| n != self.mat.len()) {
            return Err(Error::DimensionMismatch("SPD matrix size differs from n".into()));
        }
        SpdPoint::new(Matrix::from_rows(&self.mat)?)
    }
}

impl From<&SpdPoint> for SpdRecord {
    fn from(p: &SpdPoint) -> Self {
        SpdRecord { n: Some(p.n()), mat: p.mat().to_rows() }
    }
}

/// A square matrix given as rows, either bare or as {"rows": …}.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRecord {
    Rows(Vec<Vec<f64>>),
    Wrapped { rows: Vec<Vec<f64>> },
}

impl MatrixRecord {
    pub fn build(&self) -> Result<Matrix> {
        match self {
            MatrixRecord::Rows(r) | MatrixRecord::Wrapped { rows: r } => Matrix::from_rows(r),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadRecord {
    pub x: FlagRecord,
    pub y: FlagRecord,
    pub z: FlagRecord,
    pub w: FlagRecord,
}

impl QuadRecord {
    pub fn build(&self) -> Result<Quadruple> {
        Quadruple::new(self.x.build()?, self.y.build()?, self.z.build()?, self.w.build()?)
    }
}

impl From<&Quadruple> for QuadRecord {
    fn from(q: &Quadruple) -> Self {
        QuadRecord { x: (&q.x).into(), y: (&q.y).into(), z: (&q.z).into(), w: (&q.w).into() }
    }
}

/// {"kind":"finite","scalar":v} or {"kind":"plus_inf"|"minus_inf"}.
pub fn scalar_value(v: &Extended<f64>) -> Value {
    match v {
        Extended::Finite(s) => json!({"kind": "finite", "scalar": s}),
        other => json!({"kind": other.kind()}),
    }
}

/// {"kind":"finite","vector":[…]} or {"kind":"plus_inf"|"minus_inf"}.
pub fn vector_value(v: &Extended<CartanVector>) -> Value {
    match v {
        Extended::Finite(c) => json!({"kind": "finite", "vector": c.coords()}),
        other => json!({"kind": other.kind()}),
    }
}

/// A Cartan vector given as a bare list, {"coords": …} or a finite vector value.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum VectorRecord {
    Bare(Vec<f64>),
    Coords { coords: Vec<f64> },
    Value { vector: Vec<f64> },
}

impl VectorRecord {
    pub fn build(&self) -> Result<CartanVector> {
        match self {
            VectorRecord::Bare(v) | VectorRecord::Coords { coords: v } | VectorRecord::Value { vector: v } => {
                CartanVector::new(v.clone())
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeRecord {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, f64)>,
    pub ends: Vec<(String, String)>,
}

impl TreeRecord {
    pub fn build(&self) -> Result<EndedTree> {
        EndedTree::new(self.vertices.clone(), self.edges.clone(), self.ends.clone())
    }
}

impl From<&EndedTree> for TreeRecord {
    fn from(t: &EndedTree) -> Self {
        let ends = t.ends().map(|e| (e.to_string(), t.vertices()[t.anchor(e).expect("own end")].clone())).collect();
        TreeRecord {
            vertices: t.vertices().to_vec(),
            edges: t.edges().map(|(a, b, l)| (a.to_string(), b.to_string(), l)).collect(),
            ends,
        }
    }
}

pub type EndMapRecord = BTreeMap<String, String>;

pub fn isometry_value(iso: &TreeIsometry) -> Value {
    json!({
        "vertex_map": iso.vertex_map,
        "max_cr_deviation": iso.max_cr_deviation,
        "max_distortion": iso.max_distortion,
        "edges": iso.edges.iter().map(|e| json!({
            "from": e.from, "to": e.to, "length": e.length, "image_length": e.image_length
        })).collect::<Vec<_>>(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FactorRecord {
    Spd {
        n: usize,
        /// Defaults to the barycentric type.
        #[serde(default, rename = "type")]
        ty: Option<TypeRecord>,
        #[serde(default)]
        scale: Option<f64>,
    },
    H2 {
        #[serde(default)]
        scale: Option<f64>,
    },
    Tree {
        tree: TreeRecord,
        #[serde(default)]
        scale: Option<f64>,
    },
    Line {
        #[serde(default)]
        scale: Option<f64>,
    },
}

impl FactorRecord {
    pub fn build(&self) -> Result<Factor> {
        let (kind, scale) = match self {
            FactorRecord::Spd { n, ty, scale } => {
                let ty = match ty {
                    Some(t) => t.build()?,
                    None => TypeVector::barycentric(*n),
                };
                if ty.n() != *n {
                    return Err(Error::DimensionMismatch("factor type dimension".into()));
                }
                (FactorKind::Spd { ty }, scale)
            }
            FactorRecord::H2 { scale } => (FactorKind::H2, scale),
            FactorRecord::Tree { tree, scale } => (FactorKind::Tree(tree.build()?), scale),
            FactorRecord::Line { scale } => (FactorKind::Line, scale),
        };
        Ok(Factor::new(kind).scaled(scale.unwrap_or(1.0)))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductRecord {
    pub factors: Vec<FactorRecord>,
    pub weights: Vec<f64>,
}

impl ProductRecord {
    pub fn build(&self) -> Result<ProductSpace> {
        ProductSpace::new(self.factors.iter().map(FactorRecord::build).collect::<Result<_>>()?, self.weights.clone())
    }
}

/// One factor of a product point: a flag, {"angle": θ}, {"end": id} or
/// {"line": "+"|"-"}.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorPointRecord {
    Angle { angle: f64 },
    End { end: String },
    Line { line: String },
    Flag(FlagRecord),
}

impl FactorPointRecord {
    pub fn build(&self) -> Result<FactorPoint> {
        Ok(match self {
            FactorPointRecord::Angle { angle } => FactorPoint::Disc(DiscBoundaryPoint::new(*angle)?),
            FactorPointRecord::End { end } => FactorPoint::End(end.clone()),
            FactorPointRecord::Line { line } => FactorPoint::Line(match line.as_str() {
                "+" | "plus" => LineEnd::Plus,
                "-" | "minus" => LineEnd::Minus,
                other => return Err(Error::Invalid(format!("line end must be + or -, got {other}"))),
            }),
            FactorPointRecord::Flag(f) => FactorPoint::Flag(f.build()?),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductQuadRecord {
    pub x: Vec<FactorPointRecord>,
    pub y: Vec<FactorPointRecord>,
    pub z: Vec<FactorPointRecord>,
    pub w: Vec<FactorPointRecord>,
}

impl ProductQuadRecord {
    pub fn build(&self) -> Result<[ProductPoint; 4]> {
        let p = |v: &Vec<FactorPointRecord>| v.iter().map(FactorPointRecord::build).collect::<Result<ProductPoint>>();
        Ok([p(&self.x)?, p(&self.y)?, p(&self.z)?, p(&self.w)?])
    }
}

/// Per-factor basepoints: an SPD record, "center", {"vertex": id} or a real.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FactorBaseRecord {
    Spd(SpdRecord),
    Vertex { vertex: String },
    Line(f64),
    Center(String),
}

impl FactorBaseRecord {
    pub fn build(&self) -> Result<FactorBase> {
        Ok(match self {
            FactorBaseRecord::Spd(r) => FactorBase::Spd(r.build()?),
            FactorBaseRecord::Vertex { vertex } => FactorBase::Vertex(vertex.clone()),
            FactorBaseRecord::Line(t) => FactorBase::Line(*t),
            FactorBaseRecord::Center(s) if s == "center" => FactorBase::Center,
            FactorBaseRecord::Center(s) => return Err(Error::Invalid(format!("unknown basepoint {s}"))),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledMapRecord {
    pub domain: Vec<FlagRecord>,
    pub images: Vec<FlagRecord>,
    #[serde(default)]
    pub provenance: Option<String>,
}

impl SampledMapRecord {
    pub fn build(&self) -> Result<SampledMap> {
        let prov = match self.provenance.as_deref() {
            None | Some("table") => Provenance::Table,
            Some("matrix_induced") => Provenance::MatrixInduced,
            Some("permutation") => Provenance::Permutation,
            Some(other) => return Err(Error::Invalid(format!("unknown provenance {other}"))),
        };
        let flags = |v: &Vec<FlagRecord>| v.iter().map(FlagRecord::build).collect::<Result<Vec<_>>>();
        SampledMap::new(flags(&self.domain)?, flags(&self.images)?, prov)
    }
}

pub fn moebius_report_value(r: &MoebiusReport) -> Value {
    json!({
        "max_deviation": r.max_deviation,
        "quadruples": r.quadruples,
        "mismatches": r.mismatches,
        "verdict": r.verdict.name(),
        "seed": r.seed,
    })
}

pub fn calibration_value(r: &CalibrationReport) -> Value {
    json!({"n": r.n, "c_metric": r.c_metric, "residual": r.residual, "trials": r.trials, "seed": r.seed})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_defaults_to_full() {
        let f: FlagRecord = parse(r#"{"basis":[[1,0,0],[0,1,0]]}"#).unwrap();
        let f = f.build().unwrap();
        assert!(f.is_full());
        assert_eq!(f.n(), 3);
    }

    #[test]
    fn round_trips() {
        let t = TypeVector::barycentric(3);
        let back: TypeRecord = parse(&serde_json::to_string(&TypeRecord::from(&t)).unwrap()).unwrap();
        assert_eq!(back.build().unwrap(), t);
        let tree: TreeRecord =
            parse(r#"{"vertices":["p","q"],"edges":[["p","q",3]],"ends":[["a","p"],["b","p"],["c","q"]]}"#).unwrap();
        let tree = tree.build().unwrap();
        let again: TreeRecord = parse(&serde_json::to_string(&TreeRecord::from(&tree)).unwrap()).unwrap();
        assert_eq!(again.build().unwrap().distance(0, 1), 3.0);
    }

    #[test]
    fn product_records() {
        let s: ProductRecord = parse(
            r#"{"factors":[{"kind":"spd","n":2},{"kind":"h2"},{"kind":"line","scale":2}],"weights":[0.6,0.8,0]}"#,
        )
        .unwrap();
        let s = s.build().unwrap();
        assert_eq!(s.arity(), 3);
        let p: Vec<FactorPointRecord> =
            parse(r#"[{"basis":[[1,0],[0,1]]},{"angle":1.0},{"line":"-"},{"end":"e"}]"#).unwrap();
        let kinds: Vec<_> = p.iter().map(|r| r.build().unwrap()).collect();
        assert!(matches!(kinds[0], FactorPoint::Flag(_)));
        assert!(matches!(kinds[1], FactorPoint::Disc(_)));
        assert!(matches!(kinds[2], FactorPoint::Line(LineEnd::Minus)));
        assert!(matches!(kinds[3], FactorPoint::End(_)));
        let b: Vec<FactorBaseRecord> = parse(r#"[{"mat":[[1,0],[0,1]]},"center",{"vertex":"v"},1.5]"#).unwrap();
        assert!(b.iter().all(|r| r.build().is_ok()));
    }
}
