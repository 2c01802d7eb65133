//! Reconstructing a weighted tree from a tree metric.

use std::collections::{BTreeMap, HashSet};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::metric::FiniteMetric;
use crate::query::TreePoint;
use crate::scalar::Scalar;
use crate::tree::{Edge, WeightedTree};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealizationError {
    #[error("metric violates the four-point condition by {delta} at ({}, {}, {}, {})", witness[0], witness[1], witness[2], witness[3])]
    FourPointViolation { delta: String, witness: [String; 4] },
    #[error("embedding has no point for label {0:?}")]
    MissingLabel(String),
}

/// A tree together with the position of every metric label in it.
#[derive(Debug, Clone)]
pub struct Realization<S> {
    pub tree: WeightedTree<S>,
    pub embedding: BTreeMap<String, TreePoint<S>>,
}

impl<S: Scalar> Realization<S> {
    pub fn to_json(&self) -> Value {
        let emb: Map<String, Value> = self
            .embedding
            .iter()
            .map(|(l, p)| (l.clone(), json!(self.tree.render_point(p))))
            .collect();
        json!({ "tree": self.tree.to_json(), "embedding": emb })
    }
}

/// Mutable tree used during insertion.
struct Builder<S> {
    names: Vec<String>,
    edges: Vec<Option<(usize, usize, S)>>,
    adj: Vec<Vec<usize>>,
    used: HashSet<String>,
    counter: usize,
}

impl<S: Scalar> Builder<S> {
    fn add_vertex(&mut self, name: String) -> usize {
        self.used.insert(name.clone());
        self.names.push(name);
        self.adj.push(Vec::new());
        self.names.len() - 1
    }

    fn fresh_name(&mut self) -> String {
        loop {
            self.counter += 1;
            let name = format!("w#{}", self.counter);
            if !self.used.contains(&name) {
                return name;
            }
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, len: S) {
        let e = self.edges.len();
        self.edges.push(Some((u, v, len)));
        self.adj[u].push(e);
        self.adj[v].push(e);
    }

    fn remove_edge(&mut self, e: usize) {
        let (u, v, _) = self.edges[e].take().expect("live edge");
        self.adj[u].retain(|&x| x != e);
        self.adj[v].retain(|&x| x != e);
    }

    /// Vertices along the path from `a` to `b`, each with the edge (and its
    /// length) leading to the next one.
    fn path(&self, a: usize, b: usize) -> Vec<(usize, Option<(usize, S)>)> {
        let n = self.names.len();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(x) = stack.pop() {
            if x == b {
                break;
            }
            for &e in &self.adj[x] {
                let (u, v, _) = self.edges[e].expect("adjacency holds live edges");
                let y = if u == x { v } else { u };
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, e));
                    stack.push(y);
                }
            }
        }
        let mut out = vec![(b, None)];
        let mut x = b;
        while x != a {
            let (p, e) = prev[x].expect("tree is connected");
            let len = self.edges[e].expect("live").2;
            out.push((p, Some((e, len))));
            x = p;
        }
        out.reverse();
        out
    }

    /// The vertex at distance `s` from `a` towards `b`, splitting an edge
    /// when the point is more than `tol` from every path vertex.
    fn point_at(&mut self, a: usize, b: usize, s: S, tol: S) -> usize {
        let path = self.path(a, b);
        let mut walked = S::zero();
        for &(x, edge) in &path {
            if walked.close_to(s, tol) {
                return x;
            }
            let Some((e, len)) = edge else { return x };
            let next = walked + len;
            if s < next && !next.close_to(s, tol) {
                let (u, v, _) = self.edges[e].expect("live");
                let y = if u == x { v } else { u };
                let name = self.fresh_name();
                let w = self.add_vertex(name);
                self.remove_edge(e);
                self.add_edge(x, w, s - walked);
                self.add_edge(w, y, next - s);
                return w;
            }
            walked = next;
        }
        path.last().expect("nonempty path").0
    }
}

/// Build a tree in which the labels of `m` sit at vertices with the given
/// distances. Requires `m` to be `tol`-close to a tree metric.
///
/// Labels are inserted in order. Label `z` attaches to the geodesic
/// `[x0, y]` from the first label that is closest to it, i.e. the embedded
/// `y` minimizing `(x0, y)_z`, at distance `(y, z)_{x0}` from `x0`, by an arc
/// of length `(x0, y)_z`. Attachment points within `tol` of a vertex reuse
/// that vertex; new branch points are named `w#k`.
pub fn realize_tree<S: Scalar>(
    m: &FiniteMetric<S>,
    tol: S,
) -> Result<Realization<S>, RealizationError> {
    let report = m.hyperbolicity();
    if report.delta.value() > tol {
        let w = report.witness.expect("positive delta needs four points");
        return Err(RealizationError::FourPointViolation {
            delta: report.delta.value().render(),
            witness: w.map(|i| m.label(i).to_string()),
        });
    }
    let n = m.len();
    let mut b = Builder {
        names: Vec::new(),
        edges: Vec::new(),
        adj: Vec::new(),
        used: m.labels().iter().cloned().collect(),
        counter: 0,
    };
    let mut at = vec![usize::MAX; n];
    at[0] = b.add_vertex(m.label(0).to_string());
    for z in 1..n {
        let x0 = 0;
        let y = (1..z)
            .min_by(|&p, &q| {
                m.gromov(x0, p, z)
                    .partial_cmp(&m.gromov(x0, q, z))
                    .expect("comparable lengths")
            })
            .unwrap_or(x0);
        let (along, arc) = if y == x0 {
            (S::zero(), m.dist(x0, z))
        } else {
            (m.gromov(y, z, x0), m.gromov(x0, y, z))
        };
        let label = m.label(z).to_string();
        let v = b.point_at(at[x0], at[y], along, tol);
        if arc.close_to(S::zero(), tol) {
            // The label sits on the tree already; name the branch point
            // after it unless another label got there first.
            if !at[..z].contains(&v) {
                b.used.remove(&b.names[v]);
                b.used.insert(label.clone());
                b.names[v] = label;
            }
            at[z] = v;
        } else {
            let leaf = b.add_vertex(label);
            b.add_edge(v, leaf, arc);
            at[z] = leaf;
        }
    }

    let mut edges = Vec::new();
    for &(u, v, len) in b.edges.iter().flatten() {
        edges.push(Edge { u, v, len });
    }
    let root = m.root().map(|r| at[r]);
    let tree = WeightedTree::from_parts(b.names, edges, root).expect("insertion keeps a tree");
    let embedding = (0..n)
        .map(|i| (m.label(i).to_string(), TreePoint::Vertex(at[i])))
        .collect();
    Ok(Realization { tree, embedding })
}

/// Deviation of tree distances between embedded labels from the metric.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<S> {
    pub max_abs: S,
    pub mean_abs: S,
    pub pass: bool,
}

impl<S: Scalar> VerificationReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "max_abs": self.max_abs.to_json(),
            "mean_abs": self.mean_abs.to_json(),
            "pass": self.pass,
        })
    }
}

pub fn verify_realization<S: Scalar>(
    tree: &WeightedTree<S>,
    embedding: &BTreeMap<String, TreePoint<S>>,
    m: &FiniteMetric<S>,
    tol: S,
) -> Result<VerificationReport<S>, RealizationError> {
    let pts = m
        .labels()
        .iter()
        .map(|l| {
            let p = embedding
                .get(l)
                .ok_or_else(|| RealizationError::MissingLabel(l.clone()))?;
            tree.check_point(p)
                .map_err(|_| RealizationError::MissingLabel(l.clone()))?;
            Ok(*p)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = m.len();
    let mut max_abs = S::zero();
    let mut sum = S::zero();
    let mut pairs = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let dev = (tree.distance_unchecked(&pts[i], &pts[j]) - m.dist(i, j)).abs();
            max_abs = max_abs.max_of(dev);
            sum = sum + dev;
            pairs += 1;
        }
    }
    let mean_abs = if pairs == 0 {
        S::zero()
    } else {
        sum / S::from_int(pairs)
    };
    Ok(VerificationReport {
        max_abs,
        mean_abs,
        pass: max_abs <= tol,
    })
}
