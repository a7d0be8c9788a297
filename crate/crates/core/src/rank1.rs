//! Rank-one models: boundary points of the hyperbolic disc, and finite metric
//! trees with ends, including extension of end bijections that preserve
//! cross ratios to isometries between the trees spanned by branch points.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::TAU;

use crate::crossratio::{classify_pattern, Admissibility, Extended};
use crate::error::{Error, Result};

/// A point of the unit circle, the boundary of the disc model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscBoundaryPoint {
    angle: f64,
}

impl DiscBoundaryPoint {
    pub fn new(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::Invalid("non-finite angle".into()));
        }
        Ok(DiscBoundaryPoint { angle: angle.rem_euclid(TAU) })
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

fn chord(x: DiscBoundaryPoint, y: DiscBoundaryPoint) -> f64 {
    2.0 * (0.5 * (x.angle - y.angle)).sin().abs()
}

const CHORD_TOL: f64 = 1e-15;

/// (x|y) at the disc center: −log(|x−y|/2).
pub fn h2_gromov(x: DiscBoundaryPoint, y: DiscBoundaryPoint) -> Result<f64> {
    let c = chord(x, y);
    if c <= CHORD_TOL {
        return Err(Error::CoincidentPoints);
    }
    Ok(-(0.5 * c).ln())
}

/// Additive cross ratio log(|x−y||z−w| / (|x−w||z−y|)).
pub fn h2_cr(x: DiscBoundaryPoint, y: DiscBoundaryPoint, z: DiscBoundaryPoint, w: DiscBoundaryPoint) -> Result<f64> {
    let g = |a, b| h2_gromov(a, b).map_err(|_| Error::Degenerate("coincident boundary points".into()));
    Ok(-g(x, y)? - g(z, w)? + g(x, w)? + g(z, y)?)
}

/// Multiplicative cross ratio exp(h2_cr).
pub fn h2_cr_mult(
    x: DiscBoundaryPoint,
    y: DiscBoundaryPoint,
    z: DiscBoundaryPoint,
    w: DiscBoundaryPoint,
) -> Result<f64> {
    let (a, b, c, d) = (chord(x, y), chord(z, w), chord(x, w), chord(z, y));
    if [a, b, c, d].iter().any(|&v| v <= CHORD_TOL) {
        return Err(Error::Degenerate("coincident boundary points".into()));
    }
    Ok(a * b / (c * d))
}

/// A finite metric tree with ends attached at vertices. Each end stands for
/// a geodesic ray leaving its vertex; distinct ends diverge immediately.
#[derive(Clone, Debug)]
pub struct EndedTree {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<(usize, f64)>>,
    ends: Vec<(String, usize)>,
    end_index: HashMap<String, usize>,
    dist: Vec<Vec<f64>>,
}

impl EndedTree {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String, f64)>, ends: Vec<(String, String)>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate vertex {v}")));
            }
        }
        let nv = vertices.len();
        if nv == 0 {
            return Err(Error::Invalid("tree has no vertices".into()));
        }
        if edges.len() + 1 != nv {
            return Err(Error::Invalid(format!("a tree on {nv} vertices has {} edges, got {}", nv - 1, edges.len())));
        }
        let lookup =
            |name: &str| index.get(name).copied().ok_or_else(|| Error::Invalid(format!("unknown vertex {name}")));
        let mut adj = vec![Vec::new(); nv];
        let mut edge_list = Vec::with_capacity(edges.len());
        for (u, v, len) in &edges {
            if !(len.is_finite() && *len > 0.0) {
                return Err(Error::Invalid(format!("edge {u}-{v} must have positive length")));
            }
            let (a, b) = (lookup(u)?, lookup(v)?);
            if a == b {
                return Err(Error::Invalid(format!("loop at {u}")));
            }
            adj[a].push((b, *len));
            adj[b].push((a, *len));
            edge_list.push((a, b, *len));
        }
        let mut dist = vec![vec![f64::INFINITY; nv]; nv];
        for (s, row) in dist.iter_mut().enumerate() {
            row[s] = 0.0;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(v, len) in &adj[u] {
                    if row[v].is_infinite() {
                        row[v] = row[u] + len;
                        stack.push(v);
                    }
                }
            }
        }
        if dist[0].iter().any(|d| d.is_infinite()) {
            return Err(Error::Invalid("tree is not connected".into()));
        }
        let mut end_index = HashMap::new();
        let mut end_list = Vec::with_capacity(ends.len());
        for (e, v) in ends {
            let vi = lookup(&v)?;
            if end_index.insert(e.clone(), end_list.len()).is_some() {
                return Err(Error::Invalid(format!("duplicate end {e}")));
            }
            end_list.push((e, vi));
        }
        if end_list.len() < 3 {
            return Err(Error::Invalid("a thick tree needs at least three ends".into()));
        }
        Ok(EndedTree { vertices, index, edges: edge_list, adj, ends: end_list, end_index, dist })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn ends(&self) -> impl Iterator<Item = &str> {
        self.ends.iter().map(|(e, _)| e.as_str())
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.edges.iter().map(|&(a, b, l)| (self.vertices[a].as_str(), self.vertices[b].as_str(), l))
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::Invalid(format!("unknown vertex {name}")))
    }

    fn end(&self, name: &str) -> Result<usize> {
        self.end_index.get(name).copied().ok_or_else(|| Error::Invalid(format!("unknown end {name}")))
    }

    /// Attachment vertex of an end.
    pub fn anchor(&self, end: &str) -> Result<usize> {
        Ok(self.ends[self.end(end)?].1)
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        self.dist[u][v]
    }

    /// The same tree with every edge length multiplied by `s`.
    pub fn scaled(&self, s: f64) -> EndedTree {
        let mut t = self.clone();
        t.edges.iter_mut().for_each(|e| e.2 *= s);
        t.adj.iter_mut().flatten().for_each(|e| e.1 *= s);
        t.dist.iter_mut().flatten().for_each(|d| *d *= s);
        t
    }

    /// Builds a copy with one edge length replaced.
    pub fn with_edge_length(&self, u: &str, v: &str, len: f64) -> Result<EndedTree> {
        let (a, b) = (self.vertex(u)?, self.vertex(v)?);
        let edges: Vec<(String, String, f64)> = self
            .edges
            .iter()
            .map(|&(x, y, l)| {
                let l = if (x, y) == (a, b) || (x, y) == (b, a) { len } else { l };
                (self.vertices[x].clone(), self.vertices[y].clone(), l)
            })
            .collect();
        let ends = self.ends.iter().map(|(e, v)| (e.clone(), self.vertices[*v].clone())).collect();
        EndedTree::new(self.vertices.clone(), edges, ends)
    }

    /// (z|w)_o = ½(d(o,a_z) + d(o,a_w) − d(a_z,a_w)).
    pub fn gromov(&self, z: &str, w: &str, o: usize) -> Result<f64> {
        let (iz, iw) = (self.end(z)?, self.end(w)?);
        if iz == iw {
            return Err(Error::SameEnd(z.to_string()));
        }
        let (az, aw) = (self.ends[iz].1, self.ends[iw].1);
        Ok(0.5 * (self.dist[o][az] + self.dist[o][aw] - self.dist[az][aw]))
    }

    /// b_z(o, ô), increasing toward z.
    pub fn busemann(&self, z: &str, o: usize, o_hat: usize) -> Result<f64> {
        let a = self.anchor(z)?;
        Ok(self.dist[o][a] - self.dist[o_hat][a])
    }

    /// cr(z₁,w₁,z₂,w₂) = −(z₁|w₁) − (z₂|w₂) + (z₁|w₂) + (z₂|w₁); two ends are
    /// opposite iff they are distinct.
    pub fn cr(&self, z1: &str, w1: &str, z2: &str, w2: &str) -> Result<Extended<f64>> {
        let ids = [self.end(z1)?, self.end(w1)?, self.end(z2)?, self.end(w2)?];
        let [a, b, c, d] = ids;
        match classify_pattern(a != b, c != d, a != d, c != b) {
            Admissibility::Inadmissible => Err(Error::Inadmissible),
            Admissibility::AdmissibleMinus => Ok(Extended::MinusInf),
            Admissibility::AdmissiblePlus => Ok(Extended::PlusInf),
            Admissibility::AllOpposite => {
                let o = self.ends[a].1;
                Ok(Extended::Finite(
                    -self.gromov(z1, w1, o)? - self.gromov(z2, w2, o)?
                        + self.gromov(z1, w2, o)?
                        + self.gromov(z2, w1, o)?,
                ))
            }
        }
    }

    /// Neighbor of v on the path toward u (v ≠ u).
    fn step_toward(&self, v: usize, u: usize) -> usize {
        let d = self.dist[v][u];
        self.adj[v]
            .iter()
            .find(|&&(w, len)| (d - len - self.dist[w][u]).abs() <= 1e-9 * (1.0 + d))
            .map(|&(w, _)| w)
            .expect("tree path")
    }

    /// Ends (z₁,w₁) leaving p in two directions away from q, and (z₂,w₂)
    /// leaving q away from p. Then d(p,q) = cr(z₁,w₂,z₂,w₁).
    pub fn branch_quadruple(&self, p: usize, q: usize) -> Result<[String; 4]> {
        let pick = |v: usize, other: usize| -> Result<(String, String)> {
            let blocked = (v != other).then(|| self.step_toward(v, other));
            // Direction of an end at v: None if attached at v, else the first step.
            let mut seen: Vec<(usize, Option<usize>)> = Vec::new();
            for (i, &(_, a)) in self.ends.iter().enumerate() {
                let dir = (a != v).then(|| self.step_toward(v, a));
                if dir.is_some() && dir == blocked {
                    continue;
                }
                if let Some(&(j, _)) = seen.iter().find(|&&(_, d)| d != dir || dir.is_none()) {
                    return Ok((self.ends[j].0.clone(), self.ends[i].0.clone()));
                }
                seen.push((i, dir));
            }
            Err(Error::Degenerate(format!(
                "vertex {} is not a branch point away from {}",
                self.vertices[v], self.vertices[other]
            )))
        };
        let (z1, w1) = pick(p, q)?;
        let (z2, w2) = pick(q, p)?;
        Ok([z1, w1, z2, w2])
    }

    /// The median of three distinct ends: the vertex where the three lines meet.
    pub fn median(&self, a: &str, b: &str, c: &str) -> Result<usize> {
        let (a, b, c) = (self.anchor(a)?, self.anchor(b)?, self.anchor(c)?);
        let best = (0..self.vertices.len())
            .min_by(|&u, &v| {
                let su = self.dist[u][a] + self.dist[u][b] + self.dist[u][c];
                let sv = self.dist[v][a] + self.dist[v][b] + self.dist[v][c];
                su.total_cmp(&sv)
            })
            .expect("non-empty");
        Ok(best)
    }
}

/// Cross ratio of four ends as a free function.
pub fn tree_cr(t: &EndedTree, z1: &str, w1: &str, z2: &str, w2: &str) -> Result<Extended<f64>> {
    t.cr(z1, w1, z2, w2)
}

/// (z|w)_o for ends z ≠ w and a vertex o.
pub fn tree_gromov(t: &EndedTree, z: &str, w: &str, o: &str) -> Result<f64> {
    t.gromov(z, w, t.vertex(o)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeStretch {
    pub from: String,
    pub to: String,
    pub length: f64,
    pub image_length: f64,
}

/// The isometry induced by a cross-ratio preserving end bijection, on the
/// vertices that are medians of end triples.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeIsometry {
    pub vertex_map: BTreeMap<String, String>,
    pub max_cr_deviation: f64,
    pub max_distortion: f64,
    pub edges: Vec<EdgeStretch>,
}

/// Default tolerance for cross-ratio matching and distance distortion.
pub const TREE_TOL: f64 = 1e-9;

/// Extends an end bijection f: ∂T₁ → ∂T₂ preserving cross ratios to an
/// isometry between the subtrees spanned by medians of end triples.
pub fn tree_moebius_extend(t1: &EndedTree, t2: &EndedTree, f: &BTreeMap<String, String>) -> Result<TreeIsometry> {
    tree_moebius_extend_with_tol(t1, t2, f, TREE_TOL)
}

pub fn tree_moebius_extend_with_tol(
    t1: &EndedTree,
    t2: &EndedTree,
    f: &BTreeMap<String, String>,
    tol: f64,
) -> Result<TreeIsometry> {
    let ends1: Vec<&str> = t1.ends().collect();
    let ends2: BTreeSet<&str> = t2.ends().collect();
    if f.len() != ends1.len() || ends1.iter().any(|e| !f.contains_key(*e)) {
        return Err(Error::Invalid("end map must be defined on every end of the source tree".into()));
    }
    let image: BTreeSet<&str> = f.values().map(String::as_str).collect();
    if image.len() != f.len() || image != ends2 {
        return Err(Error::Invalid("end map must be a bijection onto the ends of the target tree".into()));
    }
    let m = |e: &str| f[e].as_str();
    let mut dev = 0.0f64;
    for &a in &ends1 {
        for &b in &ends1 {
            for &c in &ends1 {
                for &d in &ends1 {
                    let (Ok(Extended::Finite(u)), Ok(Extended::Finite(v))) =
                        (t1.cr(a, b, c, d), t2.cr(m(a), m(b), m(c), m(d)))
                    else {
                        continue;
                    };
                    dev = dev.max((u - v).abs());
                }
            }
        }
    }
    if dev > tol {
        return Err(Error::NotMoebius(dev));
    }
    let mut vmap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut inverse: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &a) in ends1.iter().enumerate() {
        for (j, &b) in ends1.iter().enumerate().skip(i + 1) {
            for &c in ends1.iter().skip(j + 1) {
                let m1 = t1.median(a, b, c)?;
                let m2 = t2.median(m(a), m(b), m(c))?;
                if *vmap.entry(m1).or_insert(m2) != m2 || *inverse.entry(m2).or_insert(m1) != m1 {
                    return Err(Error::NotExtendable(format!(
                        "medians disagree at {} for ends {a}, {b}, {c}",
                        t1.vertices[m1]
                    )));
                }
            }
        }
    }
    let mut distortion = 0.0f64;
    for (&u, &fu) in &vmap {
        for (&v, &fv) in &vmap {
            distortion = distortion.max((t1.distance(u, v) - t2.distance(fu, fv)).abs());
        }
    }
    if distortion > tol {
        return Err(Error::NotExtendable(format!("median distances distorted by {distortion:e}")));
    }
    let edges = t1
        .edges
        .iter()
        .filter_map(|&(a, b, len)| {
            let (fa, fb) = (vmap.get(&a)?, vmap.get(&b)?);
            Some(EdgeStretch {
                from: t1.vertices[a].clone(),
                to: t1.vertices[b].clone(),
                length: len,
                image_length: t2.distance(*fa, *fb),
            })
        })
        .collect();
    Ok(TreeIsometry {
        vertex_map: vmap.iter().map(|(&u, &v)| (t1.vertices[u].clone(), t2.vertices[v].clone())).collect(),
        max_cr_deviation: dev,
        max_distortion: distortion,
        edges,
    })
}
