//! Finite metric spaces, Gromov products and hyperbolicity constants.
//!
//! A [`FiniteMetric`] is a labeled point set with a validated distance
//! matrix. The four-point condition is available both as the pairing-sum
//! inequality and as the Gromov-product inequality; the two forms agree for
//! every quadruple and every `delta >= 0`.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("metric has no points")]
    Empty,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("distance matrix row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("non-finite or unparsable distance at ({i}, {j})")]
    BadEntry { i: usize, j: usize },
    #[error("identity axiom violated: d({label:?}, {label:?}) != 0 (index {index})")]
    NonzeroDiagonal { index: usize, label: String },
    #[error("symmetry axiom violated: d({a:?}, {b:?}) != d({b:?}, {a:?}) (indices {i}, {j})")]
    Asymmetric {
        i: usize,
        j: usize,
        a: String,
        b: String,
    },
    #[error("positivity axiom violated: d({a:?}, {b:?}) <= 0 (indices {i}, {j})")]
    Degenerate {
        i: usize,
        j: usize,
        a: String,
        b: String,
    },
    #[error(
        "triangle inequality violated: d({a:?}, {c:?}) > d({a:?}, {b:?}) + d({b:?}, {c:?}) (indices {i}, {j}, {k})"
    )]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        a: String,
        b: String,
        c: String,
    },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("malformed metric document: {0}")]
    Malformed(String),
}

/// Labeled points with a symmetric distance matrix.
#[derive(Clone, PartialEq)]
pub struct FiniteMetric<S> {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    d: Vec<S>,
    root: Option<usize>,
}

impl<S: Scalar> fmt::Debug for FiniteMetric<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMetric")
            .field("labels", &self.labels)
            .field("root", &self.root)
            .finish_non_exhaustive()
    }
}

/// A hyperbolicity constant. Zero exactly for tree-embeddable metrics.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Delta<S>(S);

impl<S: Scalar> Delta<S> {
    pub fn value(self) -> S {
        self.0
    }
}

/// Result of the exhaustive quadruple scan.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicityReport<S> {
    pub delta: Delta<S>,
    /// Quadruple `[x, y, z, w]` attaining `delta`, ordered so that
    /// `d(x,y) + d(z,w)` is the largest of the three pairing sums.
    /// `None` when the space has fewer than four points.
    pub witness: Option<[usize; 4]>,
}

impl<S: Scalar> FiniteMetric<S> {
    /// Validate and build a metric from labels and a full row-major matrix.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<S>>) -> Result<Self, MetricError> {
        Self::with_tolerance(labels, rows, S::tolerance())
    }

    /// As [`FiniteMetric::new`] but with an explicit comparison tolerance.
    pub fn with_tolerance(
        labels: Vec<String>,
        rows: Vec<Vec<S>>,
        tol: S,
    ) -> Result<Self, MetricError> {
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(MetricError::DuplicateLabel(l.clone()));
            }
        }
        if rows.len() != n {
            return Err(MetricError::NotSquare {
                row: rows.len(),
                len: rows.len(),
                expected: n,
            });
        }
        let mut d = Vec::with_capacity(n * n);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::NotSquare {
                    row: r,
                    len: row.len(),
                    expected: n,
                });
            }
            d.extend(row);
        }
        let m = FiniteMetric {
            labels,
            index,
            d,
            root: None,
        };
        m.validate(tol)?;
        Ok(m)
    }

    /// Build from a distance function on indices.
    pub fn from_fn(
        labels: Vec<String>,
        f: impl Fn(usize, usize) -> S,
    ) -> Result<Self, MetricError> {
        let n = labels.len();
        let rows = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::new(labels, rows)
    }

    fn validate(&self, tol: S) -> Result<(), MetricError> {
        let n = self.len();
        let zero = S::zero();
        for i in 0..n {
            if !self.dist(i, i).close_to(zero, tol) {
                return Err(MetricError::NonzeroDiagonal {
                    index: i,
                    label: self.labels[i].clone(),
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (self.labels[i].clone(), self.labels[j].clone());
                if !self.dist(i, j).close_to(self.dist(j, i), tol) {
                    return Err(MetricError::Asymmetric { i, j, a, b });
                }
                if self.dist(i, j) <= tol {
                    return Err(MetricError::Degenerate { i, j, a, b });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.dist(i, k) > self.dist(i, j) + self.dist(j, k) + tol {
                        return Err(MetricError::TriangleViolation {
                            i,
                            j,
                            k,
                            a: self.labels[i].clone(),
                            b: self.labels[j].clone(),
                            c: self.labels[k].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, MetricError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| MetricError::UnknownLabel(label.to_string()))
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> S {
        self.d[i * self.labels.len() + j]
    }

    pub fn distance(&self, x: &str, y: &str) -> Result<S, MetricError> {
        Ok(self.dist(self.index_of(x)?, self.index_of(y)?))
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    /// Mark `label` as the root (used by the rooted GH distance).
    pub fn with_root(mut self, label: &str) -> Result<Self, MetricError> {
        self.root = Some(self.index_of(label)?);
        Ok(self)
    }

    pub fn diameter(&self) -> S {
        self.d.iter().fold(S::zero(), |m, &v| m.max_of(v))
    }

    /// Multiply every distance by `c > 0`.
    pub fn scaled(&self, c: S) -> Self {
        FiniteMetric {
            labels: self.labels.clone(),
            index: self.index.clone(),
            d: self.d.iter().map(|&v| v * c).collect(),
            root: self.root,
        }
    }

    /// Restriction to a subset of indices, in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let labels: Vec<String> = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let index = labels
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, l)| (l, i))
            .collect();
        let d = keep
            .iter()
            .flat_map(|&i| keep.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .collect();
        let root = self.root.and_then(|r| keep.iter().position(|&k| k == r));
        FiniteMetric {
            labels,
            index,
            d,
            root,
        }
    }

    /// Gromov product `(x,y)_z` on indices.
    #[inline]
    pub fn gromov(&self, x: usize, y: usize, z: usize) -> S {
        (self.dist(z, x) + self.dist(z, y) - self.dist(x, y)).half()
    }

    pub fn gromov_product(&self, x: &str, y: &str, z: &str) -> Result<S, MetricError> {
        Ok(self.gromov(self.index_of(x)?, self.index_of(y)?, self.index_of(z)?))
    }

    /// Pairing-sum form:
    /// `d(x,y) + d(z,w) <= max(d(x,z) + d(y,w), d(x,w) + d(y,z)) + 2 delta`.
    pub fn four_point_holds_idx(&self, x: usize, y: usize, z: usize, w: usize, delta: S) -> bool {
        let lhs = self.dist(x, y) + self.dist(z, w);
        let rhs = (self.dist(x, z) + self.dist(y, w)).max_of(self.dist(x, w) + self.dist(y, z));
        // Same slack as the product form after doubling.
        let slack = S::tolerance() + S::tolerance();
        lhs <= rhs + delta + delta + slack
    }

    /// Gromov-product form: `(x,y)_w >= min((x,z)_w, (y,z)_w) - delta`.
    pub fn gromov_four_point_holds_idx(
        &self,
        x: usize,
        y: usize,
        z: usize,
        w: usize,
        delta: S,
    ) -> bool {
        let lhs = self.gromov(x, y, w);
        let rhs = self.gromov(x, z, w).min_of(self.gromov(y, z, w));
        lhs + delta + S::tolerance() >= rhs
    }

    pub fn four_point_holds(
        &self,
        x: &str,
        y: &str,
        z: &str,
        w: &str,
        delta: S,
    ) -> Result<bool, MetricError> {
        let [x, y, z, w] = self.indices([x, y, z, w])?;
        Ok(self.four_point_holds_idx(x, y, z, w, delta))
    }

    pub fn gromov_four_point_holds(
        &self,
        x: &str,
        y: &str,
        z: &str,
        w: &str,
        delta: S,
    ) -> Result<bool, MetricError> {
        let [x, y, z, w] = self.indices([x, y, z, w])?;
        Ok(self.gromov_four_point_holds_idx(x, y, z, w, delta))
    }

    fn indices<const N: usize>(&self, labels: [&str; N]) -> Result<[usize; N], MetricError> {
        let mut out = [0; N];
        for (o, l) in out.iter_mut().zip(labels) {
            *o = self.index_of(l)?;
        }
        Ok(out)
    }

    /// Least `delta` for which the four-point condition holds on the
    /// unordered quadruple `{i, j, k, l}`: half the gap between the largest
    /// and middle pairing sums.
    pub fn quadruple_defect(&self, i: usize, j: usize, k: usize, l: usize) -> (S, [usize; 4]) {
        let a = self.dist(i, j) + self.dist(k, l);
        let b = self.dist(i, k) + self.dist(j, l);
        let c = self.dist(i, l) + self.dist(j, k);
        let (top, second, quad) = if a >= b && a >= c {
            (a, b.max_of(c), [i, j, k, l])
        } else if b >= c {
            (b, a.max_of(c), [i, k, j, l])
        } else {
            (c, a.max_of(b), [i, l, j, k])
        };
        ((top - second).half(), quad)
    }

    /// Exhaustive O(n^4) scan for the hyperbolicity constant and a witness.
    pub fn hyperbolicity(&self) -> HyperbolicityReport<S> {
        let n = self.len();
        if n < 4 {
            return HyperbolicityReport {
                delta: Delta(S::zero()),
                witness: None,
            };
        }
        let best = (0..n - 3)
            .into_par_iter()
            .map(|i| {
                let mut best: Option<(S, [usize; 4])> = None;
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        for l in (k + 1)..n {
                            let cand = self.quadruple_defect(i, j, k, l);
                            best = Some(pick_worse(best, cand));
                        }
                    }
                }
                best
            })
            .reduce(
                || None,
                |a, b| match (a, b) {
                    (None, x) | (x, None) => x,
                    (Some(a), Some(b)) => Some(pick_worse(Some(a), b)),
                },
            )
            .expect("n >= 4 has a quadruple");
        HyperbolicityReport {
            delta: Delta(best.0),
            witness: Some(best.1),
        }
    }

    pub fn hyperbolicity_delta(&self) -> Delta<S> {
        self.hyperbolicity().delta
    }

    /// Least `delta` such that the Gromov-product condition holds with the
    /// fourth point fixed to `o`.
    pub fn based_delta_idx(&self, o: usize) -> Delta<S> {
        let n = self.len();
        let mut worst = S::zero();
        for x in 0..n {
            for y in 0..n {
                let xy = self.gromov(x, y, o);
                for z in 0..n {
                    let m = self.gromov(x, z, o).min_of(self.gromov(y, z, o));
                    if m > xy {
                        worst = worst.max_of(m - xy);
                    }
                }
            }
        }
        Delta(worst)
    }

    pub fn based_delta(&self, o: &str) -> Result<Delta<S>, MetricError> {
        Ok(self.based_delta_idx(self.index_of(o)?))
    }

    pub fn is_tree_metric(&self, tol: S) -> bool {
        self.hyperbolicity_delta().value() <= tol
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("points".into(), json!(self.labels));
        let n = self.len();
        let rows: Vec<Value> = (0..n)
            .map(|i| Value::Array((0..n).map(|j| self.dist(i, j).to_json()).collect()))
            .collect();
        obj.insert("d".into(), Value::Array(rows));
        if let Some(r) = self.root {
            obj.insert("root".into(), json!(self.labels[r]));
        }
        Value::Object(obj)
    }

    /// Parse `{"points": [...], "d": [[...]], "root"?: label}`.
    pub fn from_json(v: &Value) -> Result<Self, MetricError> {
        let points = v
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(|| MetricError::Malformed("missing \"points\" array".into()))?;
        let labels = points
            .iter()
            .map(label_from_json)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| MetricError::Malformed("labels must be strings or numbers".into()))?;
        let d = v
            .get("d")
            .and_then(Value::as_array)
            .ok_or_else(|| MetricError::Malformed("missing \"d\" matrix".into()))?;
        let mut rows = Vec::with_capacity(d.len());
        for (i, row) in d.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| MetricError::Malformed(format!("row {i} is not an array")))?;
            let parsed = row
                .iter()
                .enumerate()
                .map(|(j, e)| S::from_json(e).ok_or(MetricError::BadEntry { i, j }))
                .collect::<Result<Vec<S>, _>>()?;
            rows.push(parsed);
        }
        let m = Self::new(labels, rows)?;
        match v.get("root") {
            None | Some(Value::Null) => Ok(m),
            Some(r) => {
                let r = label_from_json(r)
                    .ok_or_else(|| MetricError::Malformed("root must be a label".into()))?;
                m.with_root(&r)
            }
        }
    }
}

/// Prefer the larger defect; break ties towards the lexicographically
/// smaller quadruple so parallel reductions are deterministic.
fn pick_worse<S: Scalar>(cur: Option<(S, [usize; 4])>, cand: (S, [usize; 4])) -> (S, [usize; 4]) {
    match cur {
        None => cand,
        Some(c) => {
            if cand.0 > c.0 || (cand.0 == c.0 && sorted(cand.1) < sorted(c.1)) {
                cand
            } else {
                c
            }
        }
    }
}

fn sorted(mut q: [usize; 4]) -> [usize; 4] {
    q.sort_unstable();
    q
}

pub(crate) fn label_from_json(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn path4() -> FiniteMetric<Rational> {
        FiniteMetric::from_fn(labels(4), |i, j| {
            Rational::from_int((i as i64 - j as i64).abs())
        })
        .unwrap()
    }

    fn square() -> FiniteMetric<f64> {
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        FiniteMetric::from_fn(labels(4), |i, j| {
            let (a, b) = (pts[i], pts[j]);
            f64::sqrt((a.0 - b.0) * (a.0 - b.0) + (a.1 - b.1) * (a.1 - b.1))
        })
        .unwrap()
    }

    fn cycle4() -> FiniteMetric<Rational> {
        FiniteMetric::from_fn(labels(4), |i, j| {
            let k = (i as i64 - j as i64).rem_euclid(4);
            Rational::from_int(k.min(4 - k))
        })
        .unwrap()
    }

    /// 3-star with arms 1, 2, 3 to x, y, z (center not a point).
    fn star3() -> FiniteMetric<Rational> {
        let arms = [1, 2, 3];
        FiniteMetric::from_fn(vec!["x".into(), "y".into(), "z".into()], |i, j| {
            if i == j {
                Rational::zero()
            } else {
                Rational::from_int(arms[i] + arms[j])
            }
        })
        .unwrap()
    }

    #[test]
    fn gromov_product_examples() {
        let p = path4();
        assert_eq!(p.gromov_product("0", "3", "1").unwrap(), Rational::zero());
        assert_eq!(
            star3().gromov_product("x", "y", "z").unwrap(),
            Rational::from_int(3)
        );
        let two = FiniteMetric::from_fn(labels(2), |i, j| if i == j { 0.0 } else { 5.0 }).unwrap();
        assert_eq!(two.gromov_product("0", "0", "1").unwrap(), 5.0);
        assert!(matches!(
            p.gromov_product("0", "9", "1"),
            Err(MetricError::UnknownLabel(l)) if l == "9"
        ));
    }

    #[test]
    fn four_point_examples() {
        let p = path4();
        let z = Rational::zero();
        assert!(p.four_point_holds("0", "1", "2", "3", z).unwrap());
        assert!(p.four_point_holds("0", "2", "1", "3", z).unwrap());
        let s = square();
        // Diagonals paired: 2*sqrt(2) > 2.
        assert!(!s.four_point_holds("0", "2", "1", "3", 0.0).unwrap());
        assert!(!s.gromov_four_point_holds("0", "2", "1", "3", 0.0).unwrap());
        // Repeated points are always fine.
        assert!(s.four_point_holds("0", "0", "2", "3", 0.0).unwrap());
        assert!(s.four_point_holds("0", "2", "0", "2", 0.0).unwrap());
        assert!(matches!(
            s.four_point_holds("0", "2", "q", "3", 0.0),
            Err(MetricError::UnknownLabel(_))
        ));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(path4().hyperbolicity_delta().value(), Rational::zero());
        let sq = square().hyperbolicity();
        assert!((sq.delta.value() - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        let w = sq.witness.unwrap();
        // The largest pairing is the two diagonals.
        let mut top = [w[0], w[1]];
        top.sort();
        assert!(top == [0, 2] || top == [1, 3]);
        assert_eq!(
            cycle4().hyperbolicity_delta().value(),
            Rational::from_int(1)
        );
    }

    #[test]
    fn based_delta_examples() {
        let c = cycle4();
        for o in 0..4 {
            assert_eq!(c.based_delta_idx(o).value(), Rational::from_int(1));
        }
        let two = FiniteMetric::from_fn(labels(2), |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        assert_eq!(two.based_delta("0").unwrap().value(), 0.0);
        assert_eq!(two.based_delta("1").unwrap().value(), 0.0);
        for o in 0..4 {
            assert_eq!(path4().based_delta_idx(o).value(), Rational::zero());
        }
    }

    #[test]
    fn tree_metric_examples() {
        // Cherry: root-v 1, v-a 1, v-b 1 on points root, a, b, v.
        let d = [[0, 2, 2, 1], [2, 0, 2, 1], [2, 2, 0, 1], [1, 1, 1, 0]];
        let cherry = FiniteMetric::from_fn(
            vec!["root".into(), "a".into(), "b".into(), "v".into()],
            |i, j| Rational::from_int(d[i][j]),
        )
        .unwrap();
        assert!(cherry.is_tree_metric(Rational::zero()));
        assert!(!square().is_tree_metric(1e-9));
        let one = FiniteMetric::from_fn(labels(1), |_, _| 0.0).unwrap();
        assert!(one.is_tree_metric(0.0));
    }

    #[test]
    fn validation_names_the_axiom() {
        let bad = FiniteMetric::new(labels(2), vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(matches!(
            bad,
            Err(MetricError::Asymmetric { i: 0, j: 1, .. })
        ));
        let bad = FiniteMetric::new(labels(2), vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert!(matches!(bad, Err(MetricError::Degenerate { .. })));
        let bad = FiniteMetric::new(labels(1), vec![vec![1.0]]);
        assert!(matches!(
            bad,
            Err(MetricError::NonzeroDiagonal { index: 0, .. })
        ));
        let bad = FiniteMetric::new(
            labels(3),
            vec![
                vec![0.0, 1.0, 5.0],
                vec![1.0, 0.0, 1.0],
                vec![5.0, 1.0, 0.0],
            ],
        );
        let err = bad.unwrap_err();
        assert!(matches!(err, MetricError::TriangleViolation { .. }));
        assert!(err.to_string().contains("triangle inequality"));
        let bad = FiniteMetric::new(
            vec!["a".into(), "a".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        );
        assert!(matches!(bad, Err(MetricError::DuplicateLabel(_))));
        let bad = FiniteMetric::new(labels(2), vec![vec![0.0, 1.0]]);
        assert!(matches!(bad, Err(MetricError::NotSquare { .. })));
    }

    #[test]
    fn json_round_trip_and_root() {
        let v = serde_json::json!({"points": ["a", "b", 3], "d": [[0, 1, "1/2"], [1, 0, 0.75], ["1/2", 0.75, 0]], "root": "a"});
        let m: FiniteMetric<Rational> = FiniteMetric::from_json(&v).unwrap();
        assert_eq!(m.labels(), &["a", "b", "3"]);
        assert_eq!(m.distance("b", "3").unwrap(), Rational::new(3, 4));
        assert_eq!(m.root(), Some(0));
        let back = FiniteMetric::<Rational>::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let err =
            FiniteMetric::<f64>::from_json(&serde_json::json!({"points": ["a"]})).unwrap_err();
        assert!(matches!(err, MetricError::Malformed(_)));
    }
}
