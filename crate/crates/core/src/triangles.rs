//! Slim and thin geodesic triangles in weighted graphs.
//!
//! A weighted graph is treated as a geodesic space: every edge is an
//! interval of its length. Distances between arbitrary points come from
//! all-pairs vertex distances plus offsets along edges, so they are exact;
//! subdividing edges only controls where sides are sampled.

use std::collections::HashMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::metric::FiniteMetric;
use crate::scalar::Scalar;
use crate::tree::{parse_edge_document, TreeError};

/// Vertex cap for shortest-path enumeration and global constants.
pub const MAX_ENUMERATION_VERTICES: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TriangleError {
    #[error("side from {from:?} to {to:?} is not a shortest path")]
    NotAShortestPath { from: String, to: String },
    #[error("{0:?} and {1:?} are not adjacent")]
    NotAPath(String, String),
    #[error("side must run from {expected_from:?} to {expected_to:?}")]
    WrongEndpoints {
        expected_from: String,
        expected_to: String,
    },
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("graph has {vertices} vertices; enumeration is limited to {max}")]
    TooLarge { vertices: usize, max: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("subdivision must be at least 1")]
    ZeroSubdivision,
    #[error("invalid graph: {0}")]
    Graph(String),
}

impl From<TreeError> for TriangleError {
    fn from(e: TreeError) -> Self {
        TriangleError::Graph(e.to_string())
    }
}

/// A connected graph with positive edge lengths and its vertex distances.
#[derive(Debug, Clone)]
pub struct Graph<S> {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, S)>,
    adj: Vec<Vec<(usize, usize)>>,
    dist: Vec<S>,
}

impl<S: Scalar> Graph<S> {
    pub fn new(ids: Vec<String>, edges: Vec<(String, String, S)>) -> Result<Self, TriangleError> {
        let mut index = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(TriangleError::Graph(format!("duplicate vertex {id:?}")));
            }
        }
        if ids.is_empty() {
            return Err(TriangleError::Graph("graph has no vertices".into()));
        }
        let n = ids.len();
        let mut adj = vec![Vec::new(); n];
        let mut indexed = Vec::with_capacity(edges.len());
        for (u, v, len) in edges {
            let a = *index
                .get(&u)
                .ok_or(TriangleError::UnknownVertex(u.clone()))?;
            let b = *index
                .get(&v)
                .ok_or(TriangleError::UnknownVertex(v.clone()))?;
            if a == b || !len.is_positive() {
                return Err(TriangleError::Graph(format!("bad edge {u:?}-{v:?}")));
            }
            adj[a].push((b, indexed.len()));
            adj[b].push((a, indexed.len()));
            indexed.push((a, b, len));
        }
        // Floyd-Warshall.
        let mut d: Vec<Option<S>> = vec![None; n * n];
        for i in 0..n {
            d[i * n + i] = Some(S::zero());
        }
        for &(a, b, len) in &indexed {
            for (x, y) in [(a, b), (b, a)] {
                let cell = &mut d[x * n + y];
                if cell.is_none_or(|c| len < c) {
                    *cell = Some(len);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(ik) = d[i * n + k] else { continue };
                for j in 0..n {
                    if let Some(kj) = d[k * n + j] {
                        let via = ik + kj;
                        if d[i * n + j].is_none_or(|c| via < c) {
                            d[i * n + j] = Some(via);
                        }
                    }
                }
            }
        }
        let dist = d
            .into_iter()
            .collect::<Option<Vec<S>>>()
            .ok_or(TriangleError::Disconnected)?;
        Ok(Graph {
            ids,
            index,
            edges: indexed,
            adj,
            dist,
        })
    }

    /// Same schema as a tree document; cycles are allowed and any root is
    /// ignored.
    pub fn from_json(v: &Value) -> Result<Self, TriangleError> {
        let (ids, edges, _) = parse_edge_document::<S>(v)?;
        Self::new(ids, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn vertex(&self, id: &str) -> Result<usize, TriangleError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| TriangleError::UnknownVertex(id.to_string()))
    }

    pub fn edges(&self) -> &[(usize, usize, S)] {
        &self.edges
    }

    pub fn dist(&self, a: usize, b: usize) -> S {
        self.dist[a * self.ids.len() + b]
    }

    /// Vertex distances as a finite metric space.
    pub fn vertex_metric(&self) -> FiniteMetric<S> {
        FiniteMetric::from_fn(self.ids.clone(), |i, j| self.dist(i, j))
            .expect("graph distances form a metric")
    }

    /// Shortest edge joining `a` and `b`.
    fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adj[a]
            .iter()
            .filter(|&&(w, _)| w == b)
            .map(|&(_, e)| e)
            .min_by(|&e, &f| {
                self.edges[e]
                    .2
                    .partial_cmp(&self.edges[f].2)
                    .expect("comparable")
            })
    }

    fn point_distance(&self, p: &GPoint<S>, q: &GPoint<S>) -> S {
        let ends = |p: &GPoint<S>| -> [(usize, S); 2] {
            match *p {
                GPoint::Vertex(v) => [(v, S::zero()), (v, S::zero())],
                GPoint::OnEdge { edge, offset } => {
                    let (u, v, len) = self.edges[edge];
                    [(u, offset), (v, len - offset)]
                }
            }
        };
        let mut best: Option<S> = None;
        if let (GPoint::OnEdge { edge: e, offset: s }, GPoint::OnEdge { edge: f, offset: t }) =
            (p, q)
        {
            if e == f {
                best = Some((*s - *t).abs());
            }
        }
        for (a, ca) in ends(p) {
            for (b, cb) in ends(q) {
                let d = ca + self.dist(a, b) + cb;
                if best.is_none_or(|x| d < x) {
                    best = Some(d);
                }
            }
        }
        best.expect("points have endpoints")
    }

    /// Each edge replaced by a path of `k` equal pieces; the inner vertices
    /// of edge `u-v` are named `u-v#1 .. u-v#(k-1)`.
    pub fn subdivide(&self, k: usize) -> Result<Graph<S>, TriangleError> {
        if k == 0 {
            return Err(TriangleError::ZeroSubdivision);
        }
        let mut ids = self.ids.clone();
        let mut edges = Vec::new();
        let piece = S::from_frac(1, k as i64);
        for &(u, v, len) in &self.edges {
            let (a, b) = (&self.ids[u], &self.ids[v]);
            let mut prev = a.clone();
            for j in 1..k {
                let mut name = format!("{a}-{b}#{j}");
                while self.index.contains_key(&name) || ids.contains(&name) {
                    name.push('\'');
                }
                ids.push(name.clone());
                edges.push((prev, name.clone(), len * piece));
                prev = name;
            }
            edges.push((prev, b.clone(), len * piece));
        }
        Graph::new(ids, edges)
    }

    /// Largest edge length after `k`-fold subdivision.
    pub fn mesh(&self, k: usize) -> S {
        let piece = S::from_frac(1, k.max(1) as i64);
        self.edges
            .iter()
            .fold(S::zero(), |m, e| m.max_of(e.2 * piece))
    }

    /// Every shortest path from `a` to `b`, as vertex sequences in
    /// lexicographic order of vertex index.
    pub fn all_shortest_paths(&self, a: usize, b: usize) -> Result<Vec<Vec<usize>>, TriangleError> {
        if self.vertex_count() > MAX_ENUMERATION_VERTICES {
            return Err(TriangleError::TooLarge {
                vertices: self.vertex_count(),
                max: MAX_ENUMERATION_VERTICES,
            });
        }
        let mut out = Vec::new();
        let mut path = vec![a];
        self.extend_paths(b, &mut path, &mut out);
        Ok(out)
    }

    fn extend_paths(&self, b: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let x = *path.last().expect("nonempty");
        if x == b {
            out.push(path.clone());
            return;
        }
        let mut next: Vec<usize> = self.adj[x]
            .iter()
            .filter(|&&(w, e)| (self.edges[e].2 + self.dist(w, b)).approx_eq(self.dist(x, b)))
            .map(|&(w, _)| w)
            .collect();
        next.sort_unstable();
        next.dedup();
        for w in next {
            path.push(w);
            self.extend_paths(b, path, out);
            path.pop();
        }
    }

    fn side(&self, path: &[usize], from: usize, to: usize) -> Result<Side<S>, TriangleError> {
        if path.first() != Some(&from) || path.last() != Some(&to) {
            return Err(TriangleError::WrongEndpoints {
                expected_from: self.ids[from].clone(),
                expected_to: self.ids[to].clone(),
            });
        }
        let mut legs = Vec::new();
        let mut start = S::zero();
        for w in path.windows(2) {
            let e = self.edge_between(w[0], w[1]).ok_or_else(|| {
                TriangleError::NotAPath(self.ids[w[0]].clone(), self.ids[w[1]].clone())
            })?;
            let len = self.edges[e].2;
            legs.push(SideLeg {
                edge: e,
                from: w[0],
                start,
                len,
            });
            start = start + len;
        }
        if !start.approx_eq(self.dist(from, to)) {
            return Err(TriangleError::NotAShortestPath {
                from: self.ids[from].clone(),
                to: self.ids[to].clone(),
            });
        }
        Ok(Side {
            vertices: path.to_vec(),
            legs,
        })
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|&(u, v, len)| json!({"u": self.ids[u], "v": self.ids[v], "len": len.to_json()}))
            .collect();
        json!({ "vertices": self.ids, "edges": edges })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum GPoint<S> {
    Vertex(usize),
    OnEdge { edge: usize, offset: S },
}

#[derive(Debug, Clone)]
struct SideLeg<S> {
    edge: usize,
    from: usize,
    start: S,
    len: S,
}

/// A validated shortest path with arc-length parametrization.
#[derive(Debug, Clone)]
struct Side<S> {
    vertices: Vec<usize>,
    legs: Vec<SideLeg<S>>,
}

impl<S: Scalar> Side<S> {
    fn reversed(&self, g: &Graph<S>) -> Side<S> {
        let mut rev = self.vertices.clone();
        rev.reverse();
        let (from, to) = (rev[0], *rev.last().expect("nonempty"));
        g.side(&rev, from, to).expect("reversal of a valid side")
    }

    /// Point at arc length `s` from the start (clamped).
    fn at(&self, g: &Graph<S>, s: S) -> GPoint<S> {
        for leg in &self.legs {
            let t = s - leg.start;
            if t.approx_le(S::zero()) {
                return GPoint::Vertex(leg.from);
            }
            if t.definitely_lt(leg.len) {
                let (u, _, len) = g.edges[leg.edge];
                let offset = if u == leg.from { t } else { len - t };
                return GPoint::OnEdge {
                    edge: leg.edge,
                    offset,
                };
            }
        }
        GPoint::Vertex(*self.vertices.last().expect("nonempty"))
    }

    /// Arc lengths of the `k`-fold mesh points.
    fn mesh_positions(&self, k: usize) -> Vec<S> {
        let mut out = vec![S::zero()];
        for leg in &self.legs {
            for j in 1..=k {
                out.push(leg.start + leg.len * S::from_frac(j as i64, k as i64));
            }
        }
        out
    }

    fn contains(&self, p: &GPoint<S>) -> bool {
        match p {
            GPoint::Vertex(v) => self.vertices.contains(v),
            GPoint::OnEdge { edge, .. } => self.legs.iter().any(|l| l.edge == *edge),
        }
    }

    fn distance_from(&self, g: &Graph<S>, p: &GPoint<S>) -> S {
        if self.contains(p) {
            return S::zero();
        }
        // A nearest point of a path seen from outside it is a vertex.
        self.vertices
            .iter()
            .map(|&v| g.point_distance(p, &GPoint::Vertex(v)))
            .fold(None, |m: Option<S>, d| Some(m.map_or(d, |m| m.min_of(d))))
            .expect("sides are nonempty")
    }
}

/// Three vertices and a chosen shortest path for each side, given as
/// vertex sequences `x..y`, `x..z` and `y..z`.
#[derive(Debug, Clone)]
pub struct GeodesicTriangle<S> {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    xy: Side<S>,
    xz: Side<S>,
    yz: Side<S>,
}

impl<S: Scalar> GeodesicTriangle<S> {
    pub fn new(
        g: &Graph<S>,
        corners: [usize; 3],
        xy: &[usize],
        xz: &[usize],
        yz: &[usize],
    ) -> Result<Self, TriangleError> {
        let [x, y, z] = corners;
        Ok(GeodesicTriangle {
            x,
            y,
            z,
            xy: g.side(xy, x, y)?,
            xz: g.side(xz, x, z)?,
            yz: g.side(yz, y, z)?,
        })
    }

    /// Triangle on named corners with named side routings.
    pub fn from_ids(
        g: &Graph<S>,
        corners: [&str; 3],
        sides: [&[&str]; 3],
    ) -> Result<Self, TriangleError> {
        let c = [
            g.vertex(corners[0])?,
            g.vertex(corners[1])?,
            g.vertex(corners[2])?,
        ];
        let p = |s: &[&str]| {
            s.iter()
                .map(|id| g.vertex(id))
                .collect::<Result<Vec<_>, _>>()
        };
        Self::new(g, c, &p(sides[0])?, &p(sides[1])?, &p(sides[2])?)
    }

    pub fn side_vertices(&self) -> [&[usize]; 3] {
        [&self.xy.vertices, &self.xz.vertices, &self.yz.vertices]
    }
}

fn gromov<S: Scalar>(g: &Graph<S>, a: usize, b: usize, w: usize) -> S {
    (g.dist(w, a) + g.dist(w, b) - g.dist(a, b)).half()
}

/// Sorted positions in `[0, limit]` from both sides' meshes, plus `limit`.
fn leg_positions<S: Scalar>(a: &Side<S>, b: &Side<S>, limit: S, k: usize) -> Vec<S> {
    let mut pos: Vec<S> = a
        .mesh_positions(k)
        .into_iter()
        .chain(b.mesh_positions(k))
        .filter(|s| s.approx_le(limit))
        .chain(std::iter::once(limit))
        .collect();
    pos.sort_by(|p, q| p.partial_cmp(q).expect("comparable"));
    pos.dedup_by(|p, q| p.approx_eq(*q));
    pos
}

/// Least `δ` for which the triangle is `δ`-thin, over sampled points.
///
/// The `x`-part of `xy` (length `(y,z)_x`) is matched by arc length from
/// `x` with the start of `xz`, and likewise at `y` and `z`. The split point
/// of each side belongs to both of its parts and is checked under both
/// matchings.
pub fn triangle_thinness<S: Scalar>(
    g: &Graph<S>,
    tri: &GeodesicTriangle<S>,
    subdiv: usize,
) -> Result<S, TriangleError> {
    if subdiv == 0 {
        return Err(TriangleError::ZeroSubdivision);
    }
    let (x, y, z) = (tri.x, tri.y, tri.z);
    let yx = tri.xy.reversed(g);
    let zx = tri.xz.reversed(g);
    let zy = tri.yz.reversed(g);
    let legs = [
        (&tri.xy, &tri.xz, gromov(g, y, z, x)),
        (&yx, &tri.yz, gromov(g, x, z, y)),
        (&zx, &zy, gromov(g, x, y, z)),
    ];
    let mut worst = S::zero();
    for (a, b, part) in legs {
        for s in leg_positions(a, b, part, subdiv) {
            worst = worst.max_of(g.point_distance(&a.at(g, s), &b.at(g, s)));
        }
    }
    Ok(worst)
}

/// Least `δ` for which every sampled point of each side is within `δ` of
/// the union of the other two.
pub fn triangle_slimness<S: Scalar>(
    g: &Graph<S>,
    tri: &GeodesicTriangle<S>,
    subdiv: usize,
) -> Result<S, TriangleError> {
    if subdiv == 0 {
        return Err(TriangleError::ZeroSubdivision);
    }
    let sides = [&tri.xy, &tri.xz, &tri.yz];
    let mut worst = S::zero();
    for i in 0..3 {
        let others = [sides[(i + 1) % 3], sides[(i + 2) % 3]];
        for s in sides[i].mesh_positions(subdiv) {
            let p = sides[i].at(g, s);
            let d = others[0]
                .distance_from(g, &p)
                .min_of(others[1].distance_from(g, &p));
            worst = worst.max_of(d);
        }
    }
    Ok(worst)
}

/// Hausdorff distance between two paths, over their `k`-fold mesh points.
pub fn path_hausdorff<S: Scalar>(
    g: &Graph<S>,
    p: &[usize],
    q: &[usize],
    subdiv: usize,
) -> Result<S, TriangleError> {
    if subdiv == 0 {
        return Err(TriangleError::ZeroSubdivision);
    }
    let sp = g.side(p, p[0], *p.last().expect("nonempty"))?;
    let sq = g.side(q, q[0], *q.last().expect("nonempty"))?;
    let mut worst = S::zero();
    for (a, b) in [(&sp, &sq), (&sq, &sp)] {
        for s in a.mesh_positions(subdiv) {
            worst = worst.max_of(b.distance_from(g, &a.at(g, s)));
        }
    }
    Ok(worst)
}

/// Constants of the geodesic space approximated by a `k`-fold subdivision.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalConstants<S> {
    /// Largest thinness over triangles with mesh corners and every routing.
    pub thin: S,
    /// Largest slimness over the same triangles.
    pub slim: S,
    /// Four-point constant of the mesh vertices.
    pub delta_4pt: S,
    /// Largest `min((x,z)_w, (y,z)_w)` over mesh `x, y, z` and mesh `w` on a
    /// geodesic from `x` to `y`, i.e. with `(x,y)_w = 0`.
    pub geodesic_product: S,
    /// Longest edge of the mesh.
    pub mesh: S,
}

impl<S: Scalar> GlobalConstants<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "thin": self.thin.to_json(),
            "slim": self.slim.to_json(),
            "delta_4pt": self.delta_4pt.to_json(),
            "geodesic_product": self.geodesic_product.to_json(),
            "mesh": self.mesh.to_json(),
        })
    }
}

pub fn global_constants<S: Scalar>(
    g: &Graph<S>,
    subdiv: usize,
) -> Result<GlobalConstants<S>, TriangleError> {
    let m = g.subdivide(subdiv)?;
    let n = m.vertex_count();
    if n > MAX_ENUMERATION_VERTICES {
        return Err(TriangleError::TooLarge {
            vertices: n,
            max: MAX_ENUMERATION_VERTICES,
        });
    }
    let mut paths: HashMap<(usize, usize), Vec<Vec<usize>>> = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            paths.insert((a, b), m.all_shortest_paths(a, b)?);
        }
    }
    let (mut thin, mut slim) = (S::zero(), S::zero());
    for x in 0..n {
        for y in (x + 1)..n {
            for z in (y + 1)..n {
                for pxy in &paths[&(x, y)] {
                    for pxz in &paths[&(x, z)] {
                        for pyz in &paths[&(y, z)] {
                            let tri = GeodesicTriangle::new(&m, [x, y, z], pxy, pxz, pyz)?;
                            thin = thin.max_of(triangle_thinness(&m, &tri, 1)?);
                            slim = slim.max_of(triangle_slimness(&m, &tri, 1)?);
                        }
                    }
                }
            }
        }
    }
    let mut geodesic_product = S::zero();
    for x in 0..n {
        for y in 0..n {
            for w in 0..n {
                if !gromov(&m, x, y, w).approx_eq(S::zero()) {
                    continue;
                }
                for z in 0..n {
                    geodesic_product =
                        geodesic_product.max_of(gromov(&m, x, z, w).min_of(gromov(&m, y, z, w)));
                }
            }
        }
    }
    Ok(GlobalConstants {
        thin,
        slim,
        delta_4pt: m.vertex_metric().hyperbolicity_delta().value(),
        geodesic_product,
        mesh: m.mesh(1),
    })
}
