//! Length measure of finite trees and box counting on the binary-tree
//! boundary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::build::binary::BinaryLengths;
use crate::query::{QueryError, TreePoint};
use crate::scalar::Scalar;
use crate::tree::{id_order, WeightedTree};

/// `λ(T)`: the sum of the edge lengths.
pub fn total_length<S: Scalar>(tree: &WeightedTree<S>) -> S {
    tree.edges().iter().fold(S::zero(), |acc, e| acc + e.len)
}

/// `λ([p, q])`, which is also `λ((p, q))` since points carry no length.
pub fn segment_measure<S: Scalar>(
    tree: &WeightedTree<S>,
    p: &TreePoint<S>,
    q: &TreePoint<S>,
) -> Result<S, QueryError> {
    tree.distance(p, q)
}

/// Length of the subtree spanned by `points`.
pub fn spanned_length<S: Scalar>(
    tree: &WeightedTree<S>,
    points: &[TreePoint<S>],
) -> Result<S, QueryError> {
    Ok(total_length(&tree.spanned_subtree(points)?))
}

/// Growth of `λ` along the filtration `T_i = span(x_0, ..., x_i)`. Entry
/// `i - 1` is `λ(T_i) - λ(T_{i-1})`, the length of the arc attaching `x_i`.
pub fn filtration_increments<S: Scalar>(
    tree: &WeightedTree<S>,
    points: &[TreePoint<S>],
) -> Result<Vec<S>, QueryError> {
    let mut out = Vec::with_capacity(points.len().saturating_sub(1));
    let mut prev = S::zero();
    for i in 1..points.len() {
        let cur = spanned_length(tree, &points[..=i])?;
        out.push(cur - prev);
        prev = cur;
    }
    Ok(out)
}

/// Total length, the length of each edge and any queried sets.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthMeasureReport<S> {
    pub total: S,
    /// Keyed by `"u-v"` with `u <= v` in id order.
    pub per_edge: BTreeMap<String, S>,
    pub queried_sets: Vec<(String, S)>,
}

impl<S: Scalar> LengthMeasureReport<S> {
    pub fn new(tree: &WeightedTree<S>) -> Self {
        let per_edge = tree
            .edges()
            .iter()
            .map(|e| {
                let (mut a, mut b) = (tree.id(e.u), tree.id(e.v));
                if id_order(a, b).is_gt() {
                    std::mem::swap(&mut a, &mut b);
                }
                (format!("{a}-{b}"), e.len)
            })
            .collect();
        LengthMeasureReport {
            total: total_length(tree),
            per_edge,
            queried_sets: Vec::new(),
        }
    }

    pub fn add_segment(
        &mut self,
        tree: &WeightedTree<S>,
        p: &TreePoint<S>,
        q: &TreePoint<S>,
    ) -> Result<(), QueryError> {
        let m = segment_measure(tree, p, q)?;
        let desc = format!("[{}, {}]", tree.render_point(p), tree.render_point(q));
        self.queried_sets.push((desc, m));
        Ok(())
    }

    pub fn add_span(
        &mut self,
        tree: &WeightedTree<S>,
        points: &[TreePoint<S>],
    ) -> Result<(), QueryError> {
        let m = spanned_length(tree, points)?;
        let names: Vec<String> = points.iter().map(|p| tree.render_point(p)).collect();
        self.queried_sets
            .push((format!("span({})", names.join(", ")), m));
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let per_edge: Map<String, Value> = self
            .per_edge
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let sets: Vec<Value> = self
            .queried_sets
            .iter()
            .map(|(d, m)| json!({ "set": d, "measure": m.to_json() }))
            .collect();
        json!({
            "total": self.total.to_json(),
            "per_edge": per_edge,
            "queried_sets": sets,
        })
    }
}

/// Box counting on the boundary of the binary tree with `ℓ_n = 2^(-γn)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionProbe {
    pub gamma: f64,
    pub depth: usize,
    /// `Σ_{n <= N} 2^n ℓ_n`, the length of the tree cut at depth `N`.
    pub partial_length: f64,
    /// `log(2^N) / -log(r_N)`.
    pub leaf_dimension_estimate: f64,
    /// `(k, 2^k, r_k)` for `k = 1..=N`: the boundary splits into `2^k`
    /// disjoint open balls of radius `r_k = 2Λ_k`.
    pub cylinders: Vec<(usize, f64, f64)>,
}

pub fn dimension_probe(gamma: f64, depth: usize) -> DimensionProbe {
    assert!(gamma > 0.0 && depth >= 1, "need gamma > 0 and depth >= 1");
    let lengths = BinaryLengths::power(gamma);
    let lambda = |k: usize| lengths.tail(k).expect("gamma > 0 gives summable lengths");
    let partial_length = (1..=depth)
        .map(|n| 2f64.powi(n as i32) * lengths.length(n).expect("geometric"))
        .sum();
    let cylinders: Vec<(usize, f64, f64)> = (1..=depth)
        .map(|k| (k, 2f64.powi(k as i32), 2.0 * lambda(k)))
        .collect();
    let (_, count, scale) = cylinders[depth - 1];
    DimensionProbe {
        gamma,
        depth,
        partial_length,
        leaf_dimension_estimate: count.ln() / -scale.ln(),
        cylinders,
    }
}

impl DimensionProbe {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,count,scale\n");
        for (k, c, r) in &self.cylinders {
            let _ = writeln!(s, "{k},{},{}", c.render(), r.render());
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "gamma": self.gamma.to_json(),
            "depth": self.depth,
            "partial_length": self.partial_length.to_json(),
            "leaf_dimension_estimate": self.leaf_dimension_estimate.to_json(),
        })
    }
}
