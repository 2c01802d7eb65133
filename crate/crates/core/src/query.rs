//! Geodesic structure of a [`WeightedTree`].
//!
//! Points of the real tree are [`TreePoint`]s: a vertex, or a position
//! strictly inside an edge. Paths are found by walking parent pointers
//! towards the anchor vertex, O(n) per query. With the `lca-index` feature
//! vertex LCAs come from an Euler tour with a sparse table instead.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::tree::{id_order, Edge, TreeError, WeightedTree};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error("invalid tree point: {0}")]
    InvalidPoint(String),
    #[error("tree has no root")]
    NoRoot,
    #[error("point set is empty")]
    EmptySet,
    #[error("branch test needs points distinct from the pivot")]
    Coincident,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A location in a tree. Offsets are measured from `edges[edge].u` and lie
/// strictly inside `(0, len)`; endpoints are always represented as
/// [`TreePoint::Vertex`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreePoint<S> {
    Vertex(usize),
    OnEdge { edge: usize, offset: S },
}

/// The geodesic `[p, q]`: its endpoints and every vertex in between, with
/// cumulative distances from `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<S> {
    pub points: Vec<TreePoint<S>>,
    pub cumulative: Vec<S>,
}

impl<S: Scalar> Segment<S> {
    pub fn length(&self) -> S {
        *self.cumulative.last().expect("segments are nonempty")
    }
}

/// One component of `T \ {z}`, identified by the edge leaving `z` and the
/// direction along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Branch {
    pub edge: usize,
    /// Whether the branch lies towards `edges[edge].v`.
    pub toward_v: bool,
}

/// Leaves and skeleton of a finite tree.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafSkeleton {
    /// Degree-1 vertices (or the single vertex of a one-point tree).
    pub leaves: Vec<usize>,
    /// Set when the root is among `leaves`; callers often do not count it.
    pub root_is_leaf: bool,
    /// The skeleton as edges; an end is open when it is a leaf.
    pub skeleton: Vec<SkeletonPiece>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkeletonPiece {
    pub edge: usize,
    pub closed_at_u: bool,
    pub closed_at_v: bool,
}

/// A straight run along one edge, positions measured from `edges[edge].u`.
#[derive(Debug, Clone, Copy)]
struct Leg<S> {
    edge: usize,
    from: S,
    to: S,
}

impl<S: Scalar> Leg<S> {
    fn length(&self) -> S {
        (self.to - self.from).abs()
    }

    fn forward(&self) -> bool {
        self.to > self.from
    }
}

impl<S: Scalar> WeightedTree<S> {
    /// Canonical point at `offset` from `edges[edge].u`.
    pub fn point_on_edge(&self, edge: usize, offset: S) -> Result<TreePoint<S>, QueryError> {
        let e = self
            .edges()
            .get(edge)
            .ok_or_else(|| QueryError::InvalidPoint(format!("no edge #{edge}")))?;
        canonical_point(edge, e, offset).ok_or_else(|| {
            QueryError::InvalidPoint(format!("offset {offset:?} outside edge #{edge}"))
        })
    }

    pub fn vertex_point(&self, id: &str) -> Result<TreePoint<S>, QueryError> {
        self.vertex(id)
            .map(TreePoint::Vertex)
            .ok_or_else(|| QueryError::InvalidPoint(format!("unknown vertex {id:?}")))
    }

    pub fn check_point(&self, p: &TreePoint<S>) -> Result<(), QueryError> {
        match *p {
            TreePoint::Vertex(v) if v < self.vertex_count() => Ok(()),
            TreePoint::Vertex(v) => Err(QueryError::InvalidPoint(format!("no vertex #{v}"))),
            TreePoint::OnEdge { edge, offset } => match self.edges().get(edge) {
                Some(e) if S::zero() < offset && offset < e.len => Ok(()),
                Some(_) => Err(QueryError::InvalidPoint(format!(
                    "offset {offset:?} not inside edge #{edge}"
                ))),
                None => Err(QueryError::InvalidPoint(format!("no edge #{edge}"))),
            },
        }
    }

    /// Parse `"vertexID"` or `"u-v@offset"` (offset from `u`).
    pub fn parse_point(&self, s: &str) -> Result<TreePoint<S>, QueryError> {
        let s = s.trim();
        if let Some(v) = self.vertex(s) {
            return Ok(TreePoint::Vertex(v));
        }
        let bad = || QueryError::InvalidPoint(format!("cannot parse point {s:?}"));
        let (ends, off) = s.rsplit_once('@').ok_or_else(bad)?;
        let offset = S::parse_str(off).ok_or_else(bad)?;
        for (pos, _) in ends.match_indices('-') {
            let (a, b) = (&ends[..pos], &ends[pos + 1..]);
            if let (Some(a), Some(b)) = (self.vertex(a), self.vertex(b)) {
                if let Some(e) = self.edge_between(a, b) {
                    let edge = self.edge(e);
                    let from_u = if edge.u == a {
                        offset
                    } else {
                        edge.len - offset
                    };
                    return self.point_on_edge(e, from_u);
                }
            }
        }
        Err(bad())
    }

    pub fn render_point(&self, p: &TreePoint<S>) -> String {
        match *p {
            TreePoint::Vertex(v) => self.id(v).to_string(),
            TreePoint::OnEdge { edge, offset } => {
                let e = self.edge(edge);
                format!("{}-{}@{}", self.id(e.u), self.id(e.v), offset.render())
            }
        }
    }

    /// Lowest common ancestor of two vertices with respect to the anchor.
    pub(crate) fn vertex_lca(&self, a: usize, b: usize) -> usize {
        #[cfg(feature = "lca-index")]
        {
            self.euler_tour().lca(a, b)
        }
        #[cfg(not(feature = "lca-index"))]
        {
            let (mut x, mut y) = (a, b);
            while self.anchor_hops(x) > self.anchor_hops(y) {
                x = self.anchor_parent(x).expect("non-anchor has a parent").0;
            }
            while self.anchor_hops(y) > self.anchor_hops(x) {
                y = self.anchor_parent(y).expect("non-anchor has a parent").0;
            }
            while x != y {
                x = self.anchor_parent(x).expect("non-anchor has a parent").0;
                y = self.anchor_parent(y).expect("non-anchor has a parent").0;
            }
            x
        }
    }

    pub fn vertex_distance(&self, a: usize, b: usize) -> S {
        let c = self.vertex_lca(a, b);
        self.anchor_depth(a) + self.anchor_depth(b) - self.anchor_depth(c) - self.anchor_depth(c)
    }

    /// Vertex sequence from `a` to `b`, both included.
    pub fn vertex_path(&self, a: usize, b: usize) -> Vec<usize> {
        let c = self.vertex_lca(a, b);
        let mut left = vec![a];
        let mut x = a;
        while x != c {
            x = self.anchor_parent(x).expect("below lca").0;
            left.push(x);
        }
        let mut right = Vec::new();
        let mut y = b;
        while y != c {
            right.push(y);
            y = self.anchor_parent(y).expect("below lca").0;
        }
        left.extend(right.into_iter().rev());
        left
    }

    /// Vertices adjacent to a point, with their distance from it.
    fn anchors(&self, p: &TreePoint<S>) -> Vec<(usize, S)> {
        match *p {
            TreePoint::Vertex(v) => vec![(v, S::zero())],
            TreePoint::OnEdge { edge, offset } => {
                let e = self.edge(edge);
                vec![(e.u, offset), (e.v, e.len - offset)]
            }
        }
    }

    /// Closest pair of anchors of `p` and `q` (the route the geodesic takes)
    /// when the two points do not share an edge interior.
    fn route(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> (usize, S, usize, S, S) {
        let mut best: Option<(usize, S, usize, S, S)> = None;
        for (a, da) in self.anchors(p) {
            for (b, db) in self.anchors(q) {
                let total = da + self.vertex_distance(a, b) + db;
                if best.is_none_or(|x| total < x.4) {
                    best = Some((a, da, b, db, total));
                }
            }
        }
        best.expect("points have anchors")
    }

    fn same_edge_offsets(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> Option<(usize, S, S)> {
        match (*p, *q) {
            (
                TreePoint::OnEdge {
                    edge: e1,
                    offset: o1,
                },
                TreePoint::OnEdge {
                    edge: e2,
                    offset: o2,
                },
            ) if e1 == e2 => Some((e1, o1, o2)),
            _ => None,
        }
    }

    /// Length of the unique geodesic from `p` to `q`.
    pub fn distance(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> Result<S, QueryError> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    pub(crate) fn distance_unchecked(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> S {
        if let Some((_, o1, o2)) = self.same_edge_offsets(p, q) {
            return (o1 - o2).abs();
        }
        self.route(p, q).4
    }

    /// The geodesic `[p, q]`.
    pub fn segment(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> Result<Segment<S>, QueryError> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.segment_unchecked(p, q))
    }

    fn segment_unchecked(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> Segment<S> {
        if p == q {
            return Segment {
                points: vec![*p],
                cumulative: vec![S::zero()],
            };
        }
        if let Some((_, o1, o2)) = self.same_edge_offsets(p, q) {
            return Segment {
                points: vec![*p, *q],
                cumulative: vec![S::zero(), (o1 - o2).abs()],
            };
        }
        let (a, da, b, db, _) = self.route(p, q);
        let mut points = Vec::new();
        let mut cumulative = Vec::new();
        let mut run = S::zero();
        if da > S::zero() {
            points.push(*p);
            cumulative.push(run);
            run = da;
        }
        let path = self.vertex_path(a, b);
        points.push(TreePoint::Vertex(path[0]));
        cumulative.push(run);
        for w in path.windows(2) {
            let e = self
                .edge_between(w[0], w[1])
                .expect("path vertices are adjacent");
            run = run + self.edge(e).len;
            points.push(TreePoint::Vertex(w[1]));
            cumulative.push(run);
        }
        if db > S::zero() {
            run = run + db;
            points.push(*q);
            cumulative.push(run);
        }
        Segment { points, cumulative }
    }

    fn position_on(&self, edge: usize, p: &TreePoint<S>) -> S {
        match *p {
            TreePoint::Vertex(v) => {
                if v == self.edge(edge).u {
                    S::zero()
                } else {
                    self.edge(edge).len
                }
            }
            TreePoint::OnEdge { offset, .. } => offset,
        }
    }

    fn legs(&self, seg: &Segment<S>) -> Vec<Leg<S>> {
        seg.points
            .windows(2)
            .map(|w| {
                let edge = match (w[0], w[1]) {
                    (TreePoint::OnEdge { edge, .. }, _) | (_, TreePoint::OnEdge { edge, .. }) => {
                        edge
                    }
                    (TreePoint::Vertex(a), TreePoint::Vertex(b)) => self
                        .edge_between(a, b)
                        .expect("consecutive vertices are adjacent"),
                };
                Leg {
                    edge,
                    from: self.position_on(edge, &w[0]),
                    to: self.position_on(edge, &w[1]),
                }
            })
            .collect()
    }

    /// The point of `seg` at arc length `s` from its start (clamped).
    pub fn point_along(&self, seg: &Segment<S>, s: S) -> TreePoint<S> {
        let legs = self.legs(seg);
        for (i, leg) in legs.iter().enumerate() {
            let (c0, c1) = (seg.cumulative[i], seg.cumulative[i + 1]);
            if s.approx_le(c0) {
                return seg.points[i];
            }
            if c1.approx_le(s) {
                continue;
            }
            let step = s - c0;
            let pos = if leg.forward() {
                leg.from + step
            } else {
                leg.from - step
            };
            return canonical_point(leg.edge, self.edge(leg.edge), pos)
                .expect("position lies within the leg");
        }
        *seg.points.last().expect("segments are nonempty")
    }

    /// Length of `[x,y] ∩ [x,z]`, found by walking both geodesics from `x`
    /// until they part.
    pub fn common_length(
        &self,
        x: &TreePoint<S>,
        y: &TreePoint<S>,
        z: &TreePoint<S>,
    ) -> Result<S, QueryError> {
        for p in [x, y, z] {
            self.check_point(p)?;
        }
        let l1 = self.legs(&self.segment_unchecked(x, y));
        let l2 = self.legs(&self.segment_unchecked(x, z));
        let mut common = S::zero();
        for (a, b) in l1.iter().zip(&l2) {
            if a.edge != b.edge || a.forward() != b.forward() {
                break;
            }
            let (la, lb) = (a.length(), b.length());
            common = common + la.min_of(lb);
            if !la.approx_eq(lb) {
                break;
            }
        }
        Ok(common)
    }

    /// The median: the unique common point of `[x,y]`, `[x,z]` and `[y,z]`.
    pub fn median(
        &self,
        x: &TreePoint<S>,
        y: &TreePoint<S>,
        z: &TreePoint<S>,
    ) -> Result<TreePoint<S>, QueryError> {
        let s = self.common_length(x, y, z)?;
        Ok(self.point_along(&self.segment_unchecked(x, y), s))
    }

    pub fn root_point(&self) -> Result<TreePoint<S>, QueryError> {
        self.root().map(TreePoint::Vertex).ok_or(QueryError::NoRoot)
    }

    /// Greatest common lower bound in the root order.
    pub fn meet(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> Result<TreePoint<S>, QueryError> {
        let r = self.root_point()?;
        self.median(&r, x, y)
    }

    /// `y <= x` in the root order, i.e. `y ∈ [root, x]`.
    pub fn precedes(&self, y: &TreePoint<S>, x: &TreePoint<S>) -> Result<bool, QueryError> {
        let r = self.root_point()?;
        self.on_segment(y, &r, x)
    }

    /// Whether `z ∈ [x, y]`, via `d(x,z) + d(z,y) = d(x,y)`.
    pub fn on_segment(
        &self,
        z: &TreePoint<S>,
        x: &TreePoint<S>,
        y: &TreePoint<S>,
    ) -> Result<bool, QueryError> {
        let xz = self.distance(x, z)?;
        let zy = self.distance(z, y)?;
        let xy = self.distance(x, y)?;
        Ok((xz + zy).approx_eq(xy))
    }

    /// Number of components of `T \ {p}`.
    pub fn degree(&self, p: &TreePoint<S>) -> Result<usize, QueryError> {
        self.check_point(p)?;
        Ok(match *p {
            TreePoint::Vertex(v) => self.neighbors(v).len(),
            TreePoint::OnEdge { .. } => 2,
        })
    }

    /// The component of `T \ {z}` containing `x`, or `None` when `x = z`.
    pub fn branch_at(
        &self,
        z: &TreePoint<S>,
        x: &TreePoint<S>,
    ) -> Result<Option<Branch>, QueryError> {
        self.check_point(z)?;
        self.check_point(x)?;
        let seg = self.segment_unchecked(z, x);
        Ok(self.legs(&seg).first().map(|leg| Branch {
            edge: leg.edge,
            toward_v: leg.forward(),
        }))
    }

    /// Whether `x` and `y` lie in the same component of `T \ {z}`, decided
    /// by `z ∉ [x, y]`.
    pub fn same_branch(
        &self,
        z: &TreePoint<S>,
        x: &TreePoint<S>,
        y: &TreePoint<S>,
    ) -> Result<bool, QueryError> {
        if self.distance(x, z)?.approx_eq(S::zero()) || self.distance(y, z)?.approx_eq(S::zero()) {
            return Err(QueryError::Coincident);
        }
        Ok(!self.on_segment(z, x, y)?)
    }

    pub fn leaves_and_skeleton(&self) -> LeafSkeleton {
        let n = self.vertex_count();
        let is_leaf = |v: usize| n == 1 || self.neighbors(v).len() == 1;
        let mut leaves: Vec<usize> = (0..n).filter(|&v| is_leaf(v)).collect();
        leaves.sort_by(|&a, &b| id_order(self.id(a), self.id(b)));
        let root_is_leaf = self.root().is_some_and(is_leaf);
        let skeleton = self
            .edges()
            .iter()
            .enumerate()
            .map(|(edge, e)| SkeletonPiece {
                edge,
                closed_at_u: !is_leaf(e.u),
                closed_at_v: !is_leaf(e.v),
            })
            .collect();
        LeafSkeleton {
            leaves,
            root_is_leaf,
            skeleton,
        }
    }

    /// The subtree spanned by `points`: the union of `[x0, y]` over `y`.
    /// Cut points inside edges become new vertices named by their textual
    /// form; original vertex ids are kept.
    pub fn spanned_subtree(&self, points: &[TreePoint<S>]) -> Result<WeightedTree<S>, QueryError> {
        let x0 = points.first().ok_or(QueryError::EmptySet)?;
        for p in points {
            self.check_point(p)?;
        }
        let mut vertices = BTreeSet::new();
        let mut cover: BTreeMap<usize, (S, S)> = BTreeMap::new();
        for y in points {
            let seg = self.segment_unchecked(x0, y);
            for p in &seg.points {
                if let TreePoint::Vertex(v) = p {
                    vertices.insert(*v);
                }
            }
            for leg in self.legs(&seg) {
                let (lo, hi) = (leg.from.min_of(leg.to), leg.from.max_of(leg.to));
                cover
                    .entry(leg.edge)
                    .and_modify(|c| *c = (c.0.min_of(lo), c.1.max_of(hi)))
                    .or_insert((lo, hi));
            }
        }
        if cover.is_empty() {
            return Ok(WeightedTree::single(self.render_point(x0)));
        }
        let mut ids: Vec<String> = Vec::new();
        let mut new_index: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in &vertices {
            new_index.insert(v, ids.len());
            ids.push(self.id(v).to_string());
        }
        let mut edges = Vec::new();
        for (&e, &(lo, hi)) in &cover {
            let edge = self.edge(e);
            let mut end = |pos: S, vertex: usize| -> usize {
                if let TreePoint::Vertex(_) = canonical_point(e, edge, pos).expect("inside edge") {
                    new_index[&vertex]
                } else {
                    ids.push(self.render_point(&TreePoint::OnEdge {
                        edge: e,
                        offset: pos,
                    }));
                    ids.len() - 1
                }
            };
            let a = end(lo, edge.u);
            let b = end(hi, edge.v);
            edges.push(Edge {
                u: a,
                v: b,
                len: hi - lo,
            });
        }
        let root = self.root().and_then(|r| new_index.get(&r).copied());
        Ok(WeightedTree::from_parts(ids, edges, root)?)
    }

    /// Whether `images[v]` (one point of `other` per vertex of `self`)
    /// preserves all vertex distances and the two trees have equal total
    /// length. Since leaves span a finite tree, this is an isometry onto
    /// `other`.
    pub fn is_isometric_under(&self, other: &WeightedTree<S>, images: &[TreePoint<S>]) -> bool {
        let n = self.vertex_count();
        if images.len() != n || images.iter().any(|p| other.check_point(p).is_err()) {
            return false;
        }
        let total = |t: &WeightedTree<S>| t.edges().iter().fold(S::zero(), |a, e| a + e.len);
        if !total(self).approx_eq(total(other)) {
            return false;
        }
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                self.vertex_distance(i, j)
                    .approx_eq(other.distance_unchecked(&images[i], &images[j]))
            })
        })
    }

    pub fn segment_to_json(&self, seg: &Segment<S>) -> Value {
        json!({
            "points": seg.points.iter().map(|p| self.render_point(p)).collect::<Vec<_>>(),
            "cumulative": seg.cumulative.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }
}

fn canonical_point<S: Scalar>(edge: usize, e: &Edge<S>, offset: S) -> Option<TreePoint<S>> {
    if offset.approx_eq(S::zero()) {
        Some(TreePoint::Vertex(e.u))
    } else if offset.approx_eq(e.len) {
        Some(TreePoint::Vertex(e.v))
    } else if S::zero() < offset && offset < e.len {
        Some(TreePoint::OnEdge { edge, offset })
    } else {
        None
    }
}

impl<S: Scalar> fmt::Display for Segment<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "segment of length {}", self.length().render())
    }
}

/// Euler tour of the anchored tree with a sparse table over hop depths.
#[cfg(feature = "lca-index")]
#[derive(Debug, Clone)]
pub struct EulerTour {
    first: Vec<usize>,
    table: Vec<Vec<usize>>,
    hops: Vec<usize>,
}

#[cfg(feature = "lca-index")]
impl EulerTour {
    pub(crate) fn build(anchor: usize, adj: &[Vec<(usize, usize)>], hops: &[usize]) -> Self {
        let n = adj.len();
        let mut first = vec![usize::MAX; n];
        let mut tour = Vec::with_capacity(2 * n);
        let mut stack = vec![(anchor, usize::MAX, 0usize)];
        while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
            if *next == 0 {
                first[v] = tour.len();
            }
            tour.push(v);
            let mut pushed = None;
            while *next < adj[v].len() {
                let (w, _) = adj[v][*next];
                *next += 1;
                if w != parent {
                    pushed = Some(w);
                    break;
                }
            }
            match pushed {
                Some(w) => stack.push((w, v, 0)),
                None => {
                    stack.pop();
                }
            }
        }
        let mut table = vec![tour];
        let mut width = 1;
        while 2 * width <= table[0].len() {
            let prev = table.last().unwrap();
            let next: Vec<usize> = (0..prev.len() - width)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + width]);
                    if hops[a] <= hops[b] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            table.push(next);
            width *= 2;
        }
        EulerTour {
            first,
            table,
            hops: hops.to_vec(),
        }
    }

    pub(crate) fn lca(&self, a: usize, b: usize) -> usize {
        let (mut l, mut r) = (self.first[a], self.first[b]);
        if l > r {
            std::mem::swap(&mut l, &mut r);
        }
        let span = r - l + 1;
        let k = usize::BITS as usize - 1 - span.leading_zeros() as usize;
        let (x, y) = (self.table[k][l], self.table[k][r + 1 - (1 << k)]);
        if self.hops[x] <= self.hops[y] {
            x
        } else {
            y
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::tree::fixtures::{cherry, star};

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn v(t: &WeightedTree<Rational>, id: &str) -> TreePoint<Rational> {
        t.vertex_point(id).unwrap()
    }

    #[test]
    fn distances() {
        let t = cherry();
        assert_eq!(t.distance(&v(&t, "a"), &v(&t, "b")).unwrap(), r(2));
        assert_eq!(t.distance(&v(&t, "a"), &v(&t, "a")).unwrap(), r(0));
        let mid = t.parse_point("v-a@1/2").unwrap();
        assert_eq!(t.distance(&mid, &v(&t, "b")).unwrap(), Rational::new(3, 2));
        let bad = TreePoint::OnEdge {
            edge: 0,
            offset: r(5),
        };
        assert!(matches!(
            t.distance(&bad, &mid),
            Err(QueryError::InvalidPoint(_))
        ));
    }

    #[test]
    fn point_text_round_trip() {
        let t = cherry();
        let p = t.parse_point("a-v@1/4").unwrap();
        // Stored edge is v-a, so the offset flips.
        assert_eq!(t.render_point(&p), "v-a@3/4");
        assert_eq!(t.parse_point("v-a@0").unwrap(), v(&t, "v"));
        assert_eq!(t.parse_point("v-a@1").unwrap(), v(&t, "a"));
        assert!(t.parse_point("v-a@2").is_err());
        assert!(t.parse_point("a-b@1/2").is_err());
    }

    #[test]
    fn segments() {
        let t = cherry();
        let s = t.segment(&v(&t, "a"), &v(&t, "b")).unwrap();
        assert_eq!(s.points, vec![v(&t, "a"), v(&t, "v"), v(&t, "b")]);
        assert_eq!(s.cumulative, vec![r(0), r(1), r(2)]);
        let s = t.segment(&v(&t, "a"), &v(&t, "a")).unwrap();
        assert_eq!(s.points, vec![v(&t, "a")]);
        let s = t.segment(&v(&t, "root"), &v(&t, "a")).unwrap();
        assert_eq!(s.points, vec![v(&t, "root"), v(&t, "v"), v(&t, "a")]);
        let p = t.parse_point("v-a@1/2").unwrap();
        let s = t.segment(&p, &v(&t, "b")).unwrap();
        assert_eq!(s.points, vec![p, v(&t, "v"), v(&t, "b")]);
        assert_eq!(
            s.cumulative,
            vec![r(0), Rational::new(1, 2), Rational::new(3, 2)]
        );
        let j = t.segment_to_json(&s);
        assert_eq!(j["points"], json!(["v-a@1/2", "v", "b"]));
    }

    #[test]
    fn medians() {
        let t = star(&[1, 2, 3]);
        let (x, y, z) = (v(&t, "l0"), v(&t, "l1"), v(&t, "l2"));
        assert_eq!(t.median(&x, &y, &z).unwrap(), v(&t, "c"));
        let c = cherry();
        let (root, a, b) = (v(&c, "root"), v(&c, "a"), v(&c, "b"));
        assert_eq!(c.median(&root, &a, &b).unwrap(), v(&c, "v"));
        // y on [x, z]
        let vv = v(&c, "v");
        assert_eq!(c.median(&root, &vv, &a).unwrap(), vv);
        // Median inside an edge.
        let p = c.parse_point("v-a@1/2").unwrap();
        let q = c.parse_point("root-v@1/3").unwrap();
        assert_eq!(c.median(&p, &a, &q).unwrap(), p);
        assert_eq!(c.median(&q, &root, &a).unwrap(), q);
    }

    #[test]
    fn meets_and_order() {
        let t = cherry();
        let (root, a, b) = (v(&t, "root"), v(&t, "a"), v(&t, "b"));
        assert_eq!(t.meet(&a, &b).unwrap(), v(&t, "v"));
        assert_eq!(t.meet(&a, &a).unwrap(), a);
        assert_eq!(t.meet(&a, &root).unwrap(), root);
        assert!(t.precedes(&root, &a).unwrap());
        assert!(!t.precedes(&a, &b).unwrap());
        let unrooted = star(&[1, 1]);
        let p = v(&unrooted, "l0");
        assert_eq!(unrooted.meet(&p, &p), Err(QueryError::NoRoot));
    }

    #[test]
    fn on_segment_examples() {
        let t = cherry();
        let (root, a, b, vv) = (v(&t, "root"), v(&t, "a"), v(&t, "b"), v(&t, "v"));
        assert!(t.on_segment(&vv, &a, &b).unwrap());
        assert!(t.on_segment(&a, &a, &b).unwrap());
        assert!(!t.on_segment(&b, &root, &a).unwrap());
    }

    #[test]
    fn degrees() {
        let t = cherry();
        assert_eq!(t.degree(&v(&t, "v")).unwrap(), 3);
        assert_eq!(t.degree(&t.parse_point("v-a@1/2").unwrap()).unwrap(), 2);
        assert_eq!(t.degree(&v(&t, "a")).unwrap(), 1);
    }

    #[test]
    fn leaves() {
        let t = cherry();
        let ls = t.leaves_and_skeleton();
        let names: Vec<&str> = ls.leaves.iter().map(|&l| t.id(l)).collect();
        assert_eq!(names, vec!["a", "b", "root"]);
        assert!(ls.root_is_leaf);
        assert!(ls
            .skeleton
            .iter()
            .all(|p| !(p.closed_at_u && p.closed_at_v)));
        let e: WeightedTree<f64> = WeightedTree::new(
            vec!["x".into(), "y".into()],
            vec![("x".into(), "y".into(), 1.0)],
            None,
        )
        .unwrap();
        assert_eq!(e.leaves_and_skeleton().leaves, vec![0, 1]);
        let s = star(&[1, 2, 3]);
        let names: Vec<&str> = s
            .leaves_and_skeleton()
            .leaves
            .iter()
            .map(|&l| s.id(l))
            .collect();
        assert_eq!(names, vec!["l0", "l1", "l2"]);
        let single = WeightedTree::<f64>::single("p");
        assert_eq!(single.leaves_and_skeleton().leaves, vec![0]);
    }

    #[test]
    fn branches() {
        let t = cherry();
        let (root, a, b, vv) = (v(&t, "root"), v(&t, "a"), v(&t, "b"), v(&t, "v"));
        assert!(!t.same_branch(&vv, &a, &b).unwrap());
        let p = t.parse_point("v-a@1/2").unwrap();
        assert!(t.same_branch(&vv, &a, &p).unwrap());
        assert!(t.same_branch(&root, &a, &b).unwrap());
        assert!(t.same_branch(&root, &vv, &p).unwrap());
        assert_eq!(t.same_branch(&vv, &vv, &a), Err(QueryError::Coincident));
        assert_eq!(t.branch_at(&vv, &a).unwrap(), t.branch_at(&vv, &p).unwrap());
        assert_ne!(t.branch_at(&vv, &a).unwrap(), t.branch_at(&vv, &b).unwrap());
        assert_eq!(t.branch_at(&vv, &vv).unwrap(), None);
    }

    #[test]
    fn spanned_subtrees() {
        let t = cherry();
        let (root, a, b) = (v(&t, "root"), v(&t, "a"), v(&t, "b"));
        let s = t.spanned_subtree(&[a]).unwrap();
        assert_eq!(s.vertex_count(), 1);
        assert_eq!(s.id(0), "a");
        let s = t.spanned_subtree(&[a, b, root]).unwrap();
        assert_eq!(s.to_json(), t.to_json());
        let s = t.spanned_subtree(&[a, b]).unwrap();
        assert_eq!(s.to_json()["vertices"], json!(["a", "b", "v"]));
        assert_eq!(s.edges().len(), 2);
        assert_eq!(s.root(), None);
        let p = t.parse_point("root-v@1/2").unwrap();
        let s = t.spanned_subtree(&[p, a]).unwrap();
        assert_eq!(s.to_json()["vertices"], json!(["a", "root-v@1/2", "v"]));
        let s = t.spanned_subtree(&[p]).unwrap();
        assert_eq!(s.ids(), &["root-v@1/2"]);
        assert_eq!(t.spanned_subtree(&[]).unwrap_err(), QueryError::EmptySet);
    }

    #[test]
    fn vertex_paths_through_anchor() {
        let t = star(&[1, 2, 3]);
        let path = t.vertex_path(t.vertex("l0").unwrap(), t.vertex("l2").unwrap());
        let names: Vec<&str> = path.iter().map(|&x| t.id(x)).collect();
        assert_eq!(names, vec!["l0", "c", "l2"]);
        assert_eq!(t.vertex_distance(1, 3), r(4));
    }
}
