//! Random Dyck paths, discrete approximations of the Brownian CRT and
//! sampling from the leaf measure of an excursion tree.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::build::excursion::{tree_from_excursion, Excursion, ExcursionTree};
use crate::measure::total_length;
use crate::query::TreePoint;
use crate::scalar::{Rational, Scalar};
use crate::tree::WeightedTree;

/// Seed for every sampler. Equal seeds and parameters give identical output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent seed for the `index`-th member of a batch (splitmix64).
    pub fn derive(self, index: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Heights of a uniform Dyck path with `2n` unit steps.
///
/// Shuffle `n` up and `n + 1` down steps, rotate the sequence to start just
/// after the first time its partial sums hit their minimum, then drop the
/// final down step (cycle lemma).
pub fn dyck_heights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<i64> {
    let mut steps: Vec<i64> = std::iter::repeat_n(1, n)
        .chain(std::iter::repeat_n(-1, n + 1))
        .collect();
    steps.shuffle(rng);
    let (mut sum, mut min, mut at) = (0i64, 0i64, 0usize);
    for (i, s) in steps.iter().enumerate() {
        sum += s;
        if sum < min {
            min = sum;
            at = i + 1;
        }
    }
    let len = steps.len();
    steps.rotate_left(at % len);
    steps.pop();
    let mut h = Vec::with_capacity(2 * n + 1);
    h.push(0);
    for s in steps {
        h.push(h.last().expect("nonempty") + s);
    }
    h
}

/// Uniform Dyck excursion with `2n` unit steps on the unit grid.
pub fn sample_dyck_excursion(n: usize, seed: Seed) -> Excursion<Rational> {
    assert!(n >= 1, "need at least one up step");
    let h = dyck_heights(n, &mut seed.rng());
    let samples = h.into_iter().map(Rational::from_int).collect();
    Excursion::new(Rational::from_int(2 * n as i64), samples).expect("Dyck paths are excursions")
}

/// The Dyck excursion rescaled to total time 1 and heights by `1/√(2n)`.
pub fn sample_brownian_excursion(n: usize, seed: Seed) -> Excursion<f64> {
    let dyck = sample_dyck_excursion(n, seed);
    let scale = (2.0 * n as f64).sqrt();
    let samples = dyck.samples().iter().map(|h| h.to_f64() / scale).collect();
    Excursion::new(1.0, samples).expect("rescaled excursion")
}

/// The tree of [`sample_brownian_excursion`]. The quotient is taken on the
/// integer walk and rescaled afterwards, so no tolerance is involved.
pub fn sample_crt(n: usize, seed: Seed) -> WeightedTree<f64> {
    sample_crt_with_projection(n, seed).tree
}

pub fn sample_crt_with_projection(n: usize, seed: Seed) -> ExcursionTree<f64> {
    let exact = tree_from_excursion(&sample_dyck_excursion(n, seed));
    let scale = (2.0 * n as f64).sqrt();
    let to_f64 = |x: Rational| x.to_f64() / scale;
    ExcursionTree {
        tree: exact.tree.map_lengths(to_f64),
        projection: exact
            .projection
            .into_iter()
            .map(|p| match p {
                TreePoint::Vertex(v) => TreePoint::Vertex(v),
                TreePoint::OnEdge { edge, offset } => TreePoint::OnEdge {
                    edge,
                    offset: to_f64(offset),
                },
            })
            .collect(),
    }
}

/// `count` trees from seeds derived from `seed`, built in parallel.
pub fn sample_crt_batch(n: usize, seed: Seed, count: usize) -> Vec<WeightedTree<f64>> {
    (0..count)
        .into_par_iter()
        .map(|i| sample_crt(n, seed.derive(i as u64)))
        .collect()
}

/// Draws from the pushforward of uniform time on `[0, ℓ]` into `T_g`, with
/// `g` interpolated linearly between grid points.
#[derive(Debug, Clone)]
pub struct LeafSampler<S> {
    excursion: Excursion<S>,
    coded: ExcursionTree<S>,
}

impl<S: Scalar> LeafSampler<S> {
    pub fn new(g: &Excursion<S>) -> Self {
        LeafSampler {
            excursion: g.clone(),
            coded: tree_from_excursion(g),
        }
    }

    pub fn tree(&self) -> &WeightedTree<S> {
        &self.coded.tree
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TreePoint<S> {
        let steps = self.excursion.steps();
        if steps == 0 {
            return self.coded.projection[0];
        }
        let i = rng.gen_range(0..steps);
        let frac = S::from_frac(rng.gen_range(0..1i64 << 32), 1i64 << 32);
        let g = self.excursion.samples();
        // g is monotone on the cell, so its image is the geodesic between
        // the two grid images, traversed at unit speed in height.
        let rise = (g[i + 1] - g[i]).abs() * frac;
        let tree = &self.coded.tree;
        let seg = tree
            .segment(&self.coded.projection[i], &self.coded.projection[i + 1])
            .expect("projections are valid points");
        tree.point_along(&seg, rise)
    }
}

/// One draw from the leaf measure of `T_g`.
pub fn sample_leaf<S: Scalar>(g: &Excursion<S>, seed: Seed) -> TreePoint<S> {
    LeafSampler::new(g).sample(&mut seed.rng())
}

/// Summary statistics of a sampled tree.
#[derive(Debug, Clone, PartialEq)]
pub struct CrtStats {
    pub degree_histogram: BTreeMap<usize, usize>,
    pub leaf_count: usize,
    pub total_length: f64,
    /// Distance from the root to a point drawn from the leaf measure.
    pub random_leaf_depth: f64,
}

impl CrtStats {
    pub fn to_json(&self) -> Value {
        let hist: Map<String, Value> = self
            .degree_histogram
            .iter()
            .map(|(d, c)| (d.to_string(), json!(c)))
            .collect();
        json!({
            "degree_histogram": hist,
            "leaf_count": self.leaf_count,
            "total_length": self.total_length.to_json(),
            "random_leaf_depth": self.random_leaf_depth.to_json(),
        })
    }
}

/// Statistics of `sample_crt(n, seed)`; the random leaf uses `seed.derive(0)`.
pub fn crt_stats(n: usize, seed: Seed) -> CrtStats {
    let g = sample_brownian_excursion(n, seed);
    let sampler = LeafSampler {
        excursion: g,
        coded: sample_crt_with_projection(n, seed),
    };
    let tree = sampler.tree();
    let mut degree_histogram = BTreeMap::new();
    for v in 0..tree.vertex_count() {
        *degree_histogram.entry(tree.neighbors(v).len()).or_insert(0) += 1;
    }
    let root = TreePoint::Vertex(tree.root().expect("excursion trees are rooted"));
    let leaf = sampler.sample(&mut seed.derive(0).rng());
    CrtStats {
        leaf_count: tree.leaves_and_skeleton().leaves.len(),
        total_length: total_length(tree),
        random_leaf_depth: tree.distance_unchecked(&root, &leaf),
        degree_histogram,
    }
}
