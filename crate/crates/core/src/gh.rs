//! Exact Gromov-Hausdorff distance between small finite metric spaces.
//!
//! `d_GH(X, Y) = ½ min_R dis(R)` over correspondences `R ⊆ X × Y`. Any
//! correspondence contains one of the form `graph(f) ∪ {(g(y), y)}` for a
//! map `f: X → Y` and a choice `g(y)` for each `y` outside the image of `f`,
//! and shrinking a relation never raises its distortion. The search
//! enumerates exactly these, depth first, pruning on the running maximum.

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::metric::FiniteMetric;
use crate::scalar::Scalar;

/// Default size cap for exhaustive search.
pub const DEFAULT_MAX_POINTS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GhError {
    #[error("space has {size} points, more than the limit of {max}")]
    TooLarge { size: usize, max: usize },
    #[error("rooted distance needs a root on both spaces")]
    NoRoot,
}

/// A relation between point indices of two spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    /// Every point on both sides is related to something.
    pub fn is_valid(&self, n1: usize, n2: usize) -> bool {
        let mut left = vec![false; n1];
        let mut right = vec![false; n2];
        for &(x, y) in &self.pairs {
            if x >= n1 || y >= n2 {
                return false;
            }
            left[x] = true;
            right[y] = true;
        }
        left.into_iter().chain(right).all(|b| b)
    }

    /// `max |d1(x, x') - d2(y, y')|` over pairs of related pairs.
    pub fn distortion<S: Scalar>(&self, m1: &FiniteMetric<S>, m2: &FiniteMetric<S>) -> S {
        let mut worst = S::zero();
        for &(x, y) in &self.pairs {
            for &(x2, y2) in &self.pairs {
                worst = worst.max_of((m1.dist(x, x2) - m2.dist(y, y2)).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhResult<S> {
    pub value: S,
    /// An optimal correspondence: the first one met in the enumeration
    /// order (points of the first space in order, partners ascending).
    pub witness: Correspondence,
}

impl<S: Scalar> GhResult<S> {
    pub fn to_json(&self, m1: &FiniteMetric<S>, m2: &FiniteMetric<S>, with_witness: bool) -> Value {
        let mut out = json!({ "value": self.value.to_json() });
        if with_witness {
            let pairs: Vec<Value> = self
                .witness
                .pairs
                .iter()
                .map(|&(x, y)| json!([m1.label(x), m2.label(y)]))
                .collect();
            out["witness"] = Value::Array(pairs);
        }
        out
    }
}

pub fn gh_distance<S: Scalar>(
    m1: &FiniteMetric<S>,
    m2: &FiniteMetric<S>,
    max_points: usize,
) -> Result<GhResult<S>, GhError> {
    search(m1, m2, max_points, None)
}

/// As [`gh_distance`], restricted to correspondences relating the two roots.
pub fn rooted_gh_distance<S: Scalar>(
    m1: &FiniteMetric<S>,
    m2: &FiniteMetric<S>,
    max_points: usize,
) -> Result<GhResult<S>, GhError> {
    match (m1.root(), m2.root()) {
        (Some(r1), Some(r2)) => search(m1, m2, max_points, Some((r1, r2))),
        _ => Err(GhError::NoRoot),
    }
}

fn search<S: Scalar>(
    m1: &FiniteMetric<S>,
    m2: &FiniteMetric<S>,
    max_points: usize,
    forced: Option<(usize, usize)>,
) -> Result<GhResult<S>, GhError> {
    for size in [m1.len(), m2.len()] {
        if size > max_points {
            return Err(GhError::TooLarge {
                size,
                max: max_points,
            });
        }
    }
    // Partition on the partner of the first point; each part is searched
    // independently so the reduction is deterministic.
    let first_choices: Vec<usize> = match forced {
        Some((0, r2)) => vec![r2],
        _ => (0..m2.len()).collect(),
    };
    let best = first_choices
        .into_par_iter()
        .filter_map(|y0| {
            let mut s = Search {
                m1,
                m2,
                forced,
                pairs: vec![(0, y0)],
                covered: vec![0; m2.len()],
                best: None,
            };
            s.covered[y0] = 1;
            s.assign(1, S::zero());
            s.best
        })
        .reduce_with(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one branch");
    Ok(GhResult {
        value: best.0.half(),
        witness: Correspondence { pairs: best.1 },
    })
}

struct Search<'a, S> {
    m1: &'a FiniteMetric<S>,
    m2: &'a FiniteMetric<S>,
    forced: Option<(usize, usize)>,
    pairs: Vec<(usize, usize)>,
    covered: Vec<u32>,
    best: Option<(S, Vec<(usize, usize)>)>,
}

impl<S: Scalar> Search<'_, S> {
    fn bound(&self) -> Option<S> {
        self.best.as_ref().map(|b| b.0)
    }

    /// Distortion added by relating `(x, y)` to every pair chosen so far.
    fn added(&self, x: usize, y: usize, cur: S) -> Option<S> {
        let mut worst = cur;
        for &(a, b) in &self.pairs {
            worst = worst.max_of((self.m1.dist(x, a) - self.m2.dist(y, b)).abs());
            if self.bound().is_some_and(|bd| worst >= bd) {
                return None;
            }
        }
        Some(worst)
    }

    /// Choose `f(x)` for `x = next..`.
    fn assign(&mut self, x: usize, cur: S) {
        if x == self.m1.len() {
            self.cover(0, cur);
            return;
        }
        let choices: Vec<usize> = match self.forced {
            Some((r1, r2)) if r1 == x => vec![r2],
            _ => (0..self.m2.len()).collect(),
        };
        for y in choices {
            if let Some(next) = self.added(x, y, cur) {
                self.pairs.push((x, y));
                self.covered[y] += 1;
                self.assign(x + 1, next);
                self.covered[y] -= 1;
                self.pairs.pop();
            }
        }
    }

    /// Choose a partner for every `y >= from` not yet covered.
    fn cover(&mut self, from: usize, cur: S) {
        let Some(y) = (from..self.m2.len()).find(|&y| self.covered[y] == 0) else {
            if self.bound().is_none_or(|b| cur < b) {
                let mut pairs = self.pairs.clone();
                pairs.sort_unstable();
                self.best = Some((cur, pairs));
            }
            return;
        };
        for x in 0..self.m1.len() {
            if let Some(next) = self.added(x, y, cur) {
                self.pairs.push((x, y));
                self.cover(y + 1, next);
                self.pairs.pop();
            }
        }
    }
}
