//! Finite weighted trees: the concrete representation of a compact real
//! tree. Every edge is an interval of positive length glued at its
//! endpoints.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::metric::{label_from_json, FiniteMetric, MetricError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("tree has no vertices")]
    Empty,
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("edge refers to unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("edge {u:?}-{v:?} has nonpositive length")]
    NonpositiveLength { u: String, v: String },
    #[error("edge {u:?}-{v:?} closes a cycle")]
    Cyclic { u: String, v: String },
    #[error("tree is disconnected: {a:?} and {b:?} lie in different components")]
    Disconnected { a: String, b: String },
    #[error("root {0:?} is not a vertex")]
    UnknownRoot(String),
    #[error("malformed tree document: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<S> {
    pub u: usize,
    pub v: usize,
    pub len: S,
}

impl<S: Scalar> Edge<S> {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Vertices plus positively weighted edges forming a connected acyclic
/// graph, optionally rooted. Immutable once built.
#[derive(Debug, Clone)]
pub struct WeightedTree<S> {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge<S>>,
    root: Option<usize>,
    /// `(neighbor, edge index)` per vertex.
    adj: Vec<Vec<(usize, usize)>>,
    /// Parent pointers towards the anchor (the root, or vertex 0).
    parent: Vec<Option<(usize, usize)>>,
    /// Weighted distance to the anchor.
    depth: Vec<S>,
    /// Hop count to the anchor.
    #[cfg(not(feature = "lca-index"))]
    hops: Vec<usize>,
    #[cfg(feature = "lca-index")]
    lca: crate::query::EulerTour,
}

impl<S: Scalar> WeightedTree<S> {
    /// Validate and index a tree given by vertex ids and `(u, v, len)` edges.
    pub fn new(
        ids: Vec<String>,
        edges: Vec<(String, String, S)>,
        root: Option<String>,
    ) -> Result<Self, TreeError> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(TreeError::DuplicateVertex(id.clone()));
            }
        }
        let lookup = |s: &String| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| TreeError::UnknownVertex(s.clone()))
        };
        let mut indexed = Vec::with_capacity(edges.len());
        for (u, v, len) in &edges {
            indexed.push(Edge {
                u: lookup(u)?,
                v: lookup(v)?,
                len: *len,
            });
        }
        let root = match root {
            Some(r) => Some(index.get(&r).copied().ok_or(TreeError::UnknownRoot(r))?),
            None => None,
        };
        Self::from_parts(ids, indexed, root)
    }

    /// Validate and index a tree given by vertex indices.
    pub fn from_parts(
        ids: Vec<String>,
        edges: Vec<Edge<S>>,
        root: Option<usize>,
    ) -> Result<Self, TreeError> {
        let n = ids.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(TreeError::DuplicateVertex(id.clone()));
            }
        }
        let mut dsu = Dsu::new(n);
        let mut adj = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(TreeError::UnknownVertex(format!("#{}", e.u.max(e.v))));
            }
            if !e.len.is_positive() {
                return Err(TreeError::NonpositiveLength {
                    u: ids[e.u].clone(),
                    v: ids[e.v].clone(),
                });
            }
            if !dsu.union(e.u, e.v) {
                return Err(TreeError::Cyclic {
                    u: ids[e.u].clone(),
                    v: ids[e.v].clone(),
                });
            }
            adj[e.u].push((e.v, k));
            adj[e.v].push((e.u, k));
        }
        if let Some(b) = (1..n).find(|&b| dsu.find(b) != dsu.find(0)) {
            return Err(TreeError::Disconnected {
                a: ids[0].clone(),
                b: ids[b].clone(),
            });
        }
        if let Some(r) = root {
            if r >= n {
                return Err(TreeError::UnknownRoot(format!("#{r}")));
            }
        }
        let anchor = root.unwrap_or(0);
        let mut parent = vec![None; n];
        let mut depth = vec![S::zero(); n];
        let mut hops = vec![0; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([anchor]);
        seen[anchor] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, e) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, e));
                    depth[y] = depth[x] + edges[e].len;
                    hops[y] = hops[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        #[cfg(feature = "lca-index")]
        let lca = crate::query::EulerTour::build(anchor, &adj, &hops);
        Ok(WeightedTree {
            ids,
            index,
            edges,
            root,
            adj,
            parent,
            depth,
            #[cfg(not(feature = "lca-index"))]
            hops,
            #[cfg(feature = "lca-index")]
            lca,
        })
    }

    /// A one-vertex tree.
    pub fn single(id: impl Into<String>) -> Self {
        let id = id.into();
        Self::from_parts(vec![id.clone()], Vec::new(), Some(0)).expect("single vertex is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge<S> {
        &self.edges[e]
    }

    /// Index of the edge joining `a` and `b`, if adjacent.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adj[a].iter().find(|&&(y, _)| y == b).map(|&(_, e)| e)
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    /// Same tree with a different root.
    pub fn rerooted(&self, root: Option<usize>) -> Self {
        Self::from_parts(self.ids.clone(), self.edges.clone(), root).expect("already validated")
    }

    pub(crate) fn anchor_parent(&self, v: usize) -> Option<(usize, usize)> {
        self.parent[v]
    }

    pub(crate) fn anchor_depth(&self, v: usize) -> S {
        self.depth[v]
    }

    #[cfg(not(feature = "lca-index"))]
    pub(crate) fn anchor_hops(&self, v: usize) -> usize {
        self.hops[v]
    }

    #[cfg(feature = "lca-index")]
    pub(crate) fn euler_tour(&self) -> &crate::query::EulerTour {
        &self.lca
    }

    /// Every edge length scaled by `c > 0`.
    pub fn scaled(&self, c: S) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                len: e.len * c,
                ..*e
            })
            .collect();
        Self::from_parts(self.ids.clone(), edges, self.root).expect("scaling keeps validity")
    }

    /// The same tree with every length passed through `f`, which must keep
    /// lengths positive.
    pub fn map_lengths<T: Scalar>(&self, f: impl Fn(S) -> T) -> WeightedTree<T> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                u: e.u,
                v: e.v,
                len: f(e.len),
            })
            .collect();
        WeightedTree::from_parts(self.ids.clone(), edges, self.root).expect("lengths stay positive")
    }

    /// Distances between all vertices as a [`FiniteMetric`].
    pub fn vertex_metric(&self) -> Result<FiniteMetric<S>, MetricError> {
        let n = self.vertex_count();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| self.vertex_distance(i, j)).collect())
            .collect();
        let m = FiniteMetric::new(self.ids.clone(), rows)?;
        match self.root {
            Some(r) => m.with_root(&self.ids[r]),
            None => Ok(m),
        }
    }

    /// Sorted vertices and edges for bit-stable output.
    pub fn to_json(&self) -> Value {
        let mut vertices: Vec<&String> = self.ids.iter().collect();
        vertices.sort_by(|a, b| id_order(a, b));
        let mut edges: Vec<(&String, &String, S)> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (&self.ids[e.u], &self.ids[e.v]);
                if id_order(a, b) == Ordering::Greater {
                    (b, a, e.len)
                } else {
                    (a, b, e.len)
                }
            })
            .collect();
        edges.sort_by(|x, y| id_order(x.0, y.0).then_with(|| id_order(x.1, y.1)));
        let edges: Vec<Value> = edges
            .into_iter()
            .map(|(u, v, len)| json!({"u": u, "v": v, "len": len.to_json()}))
            .collect();
        let mut obj = Map::new();
        obj.insert("vertices".into(), json!(vertices));
        obj.insert("edges".into(), Value::Array(edges));
        if let Some(r) = self.root {
            obj.insert("root".into(), json!(self.ids[r]));
        }
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self, TreeError> {
        let (ids, edges, root) = parse_edge_document::<S>(v)?;
        Self::new(ids, edges, root)
    }
}

/// Raw contents of a `{"vertices", "edges", "root"}` document, without
/// any structural validation. Shared with the graph reader.
pub(crate) type EdgeDocument<S> = (Vec<String>, Vec<(String, String, S)>, Option<String>);

pub(crate) fn parse_edge_document<S: Scalar>(v: &Value) -> Result<EdgeDocument<S>, TreeError> {
    let malformed = |m: &str| TreeError::Malformed(m.to_string());
    let ids = v
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing \"vertices\" array"))?
        .iter()
        .map(label_from_json)
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| malformed("vertex ids must be strings or numbers"))?;
    let raw_edges = v
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing \"edges\" array"))?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for e in raw_edges {
        let u = e.get("u").and_then(label_from_json);
        let w = e.get("v").and_then(label_from_json);
        let len = e.get("len").and_then(S::from_json);
        match (u, w, len) {
            (Some(u), Some(w), Some(len)) => edges.push((u, w, len)),
            _ => {
                return Err(malformed(
                    "each edge needs \"u\", \"v\" and a numeric \"len\"",
                ))
            }
        }
    }
    let root = match v.get("root") {
        None | Some(Value::Null) => None,
        Some(r) => Some(label_from_json(r).ok_or_else(|| malformed("root must be a vertex id"))?),
    };
    Ok((ids, edges, root))
}

/// Natural ordering on vertex ids: runs of digits compare numerically, so
/// `t2 < t10`.
pub fn id_order(a: &str, b: &str) -> Ordering {
    let (mut x, mut y) = (a, b);
    loop {
        match (x.chars().next(), y.chars().next()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(c), Some(d)) if c.is_ascii_digit() && d.is_ascii_digit() => {
                let dx = x.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(x.len());
                let dy = y.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(y.len());
                let (nx, ny) = (
                    x[..dx].trim_start_matches('0'),
                    y[..dy].trim_start_matches('0'),
                );
                let ord = nx.len().cmp(&ny.len()).then_with(|| nx.cmp(ny));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = &x[dx..];
                y = &y[dy..];
            }
            (Some(c), Some(d)) => {
                if c != d {
                    return c.cmp(&d);
                }
                x = &x[c.len_utf8()..];
                y = &y[d.len_utf8()..];
            }
        }
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
