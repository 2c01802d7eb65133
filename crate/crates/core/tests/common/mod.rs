//! Generators and brute-force oracles shared by the integration suites.
#![allow(dead_code)]

use proptest::prelude::*;
use realtree::{FiniteMetric, Rational, Scalar, TreePoint, WeightedTree};

pub fn r(v: i64) -> Rational {
    Rational::from_int(v)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n as i128, d as i128)
}

/// Random tree from parent choices and lengths in quarters.
pub fn tree_from_choices(choices: &[(usize, i64)]) -> WeightedTree<Rational> {
    let n = choices.len() + 1;
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let edges = choices
        .iter()
        .enumerate()
        .map(|(i, &(p, len))| (ids[p % (i + 1)].clone(), ids[i + 1].clone(), q(len, 4)))
        .collect();
    WeightedTree::new(ids, edges, Some("v0".into())).unwrap()
}

/// Trees with `1..=max_n` vertices and rational lengths in `(0, 5]`.
pub fn arb_tree(max_n: usize) -> impl Strategy<Value = WeightedTree<Rational>> {
    prop::collection::vec((any::<usize>(), 1..=20i64), 0..max_n).prop_map(|c| tree_from_choices(&c))
}

/// Points of a tree: vertices or rational positions inside edges.
pub fn points_from_choices(
    t: &WeightedTree<Rational>,
    choices: &[(usize, u8)],
) -> Vec<TreePoint<Rational>> {
    choices
        .iter()
        .map(|&(i, frac)| {
            if t.edges().is_empty() || frac == 0 {
                TreePoint::Vertex(i % t.vertex_count())
            } else {
                let e = i % t.edges().len();
                let len = t.edge(e).len;
                t.point_on_edge(e, len * q(frac as i64, 8)).unwrap()
            }
        })
        .collect()
}

/// A tree together with `k` points on it.
pub fn arb_tree_points(
    max_n: usize,
    k: usize,
) -> impl Strategy<Value = (WeightedTree<Rational>, Vec<TreePoint<Rational>>)> {
    (
        arb_tree(max_n),
        prop::collection::vec((any::<usize>(), 0u8..8), k),
    )
        .prop_map(|(t, c)| {
            let pts = points_from_choices(&t, &c);
            (t, pts)
        })
}

/// Metrics with entries in `{2, 3, 4}` (any such matrix is a metric), so
/// four-point comparisons hit many ties.
pub fn arb_metric(max_n: usize) -> impl Strategy<Value = FiniteMetric<Rational>> {
    (1..=max_n)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(2..=4i64, n * n)))
        .prop_map(|(n, v)| metric_from_upper(n, &v))
}

pub fn metric_from_upper(n: usize, v: &[i64]) -> FiniteMetric<Rational> {
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    FiniteMetric::from_fn(labels, |i, j| {
        if i == j {
            r(0)
        } else {
            let (a, b) = (i.min(j), i.max(j));
            r(v[a * n + b])
        }
    })
    .unwrap()
}

/// Vertex distances by depth-first accumulation from every vertex.
pub fn oracle_vertex_distances<S: Scalar>(t: &WeightedTree<S>) -> Vec<Vec<S>> {
    let n = t.vertex_count();
    let mut out = vec![vec![S::zero(); n]; n];
    for (s, row) in out.iter_mut().enumerate() {
        let mut seen = vec![false; n];
        let mut stack = vec![(s, S::zero())];
        seen[s] = true;
        while let Some((v, d)) = stack.pop() {
            row[v] = d;
            for &(w, e) in t.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, d + t.edge(e).len));
                }
            }
        }
    }
    out
}

/// Distance between arbitrary points from vertex distances and offsets.
pub fn oracle_distance<S: Scalar>(
    t: &WeightedTree<S>,
    dv: &[Vec<S>],
    p: &TreePoint<S>,
    q: &TreePoint<S>,
) -> S {
    let ends = |p: &TreePoint<S>| -> Vec<(usize, S)> {
        match *p {
            TreePoint::Vertex(v) => vec![(v, S::zero())],
            TreePoint::OnEdge { edge, offset } => {
                let e = t.edge(edge);
                vec![(e.u, offset), (e.v, e.len - offset)]
            }
        }
    };
    if let (TreePoint::OnEdge { edge: e, offset: a }, TreePoint::OnEdge { edge: f, offset: b }) =
        (p, q)
    {
        if e == f {
            return (*a - *b).abs();
        }
    }
    let mut best: Option<S> = None;
    for (a, ca) in ends(p) {
        for (b, cb) in ends(q) {
            let d = ca + dv[a][b] + cb;
            best = Some(best.map_or(d, |x: S| x.min_of(d)));
        }
    }
    best.unwrap()
}
