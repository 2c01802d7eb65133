mod common;

use common::*;
use proptest::prelude::*;
use realtree::realize::{realize_tree, verify_realization};
use realtree::{FiniteMetric, Rational, Scalar, TreePoint};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vertex_metrics_round_trip(t in arb_tree(12)) {
        let m = t.vertex_metric().unwrap();
        let real = realize_tree(&m, r(0)).unwrap();
        let rep = verify_realization(&real.tree, &real.embedding, &m, r(0)).unwrap();
        prop_assert_eq!(rep.max_abs, r(0));
        let dv = oracle_vertex_distances(&real.tree);
        let pts: Vec<_> = m.labels().iter().map(|l| real.embedding[l]).collect();
        for i in 0..m.len() {
            for j in 0..m.len() {
                prop_assert_eq!(oracle_distance(&real.tree, &dv, &pts[i], &pts[j]), m.dist(i, j));
            }
        }
    }

    #[test]
    fn output_is_minimal(t in arb_tree(12), keep in prop::collection::vec(any::<bool>(), 12)) {
        // Realize the metric of a subset of the vertices, so that unlabeled
        // branch points have to be created.
        let idx: Vec<usize> = (0..t.vertex_count()).filter(|&i| keep[i]).collect();
        prop_assume!(!idx.is_empty());
        let m = t.vertex_metric().unwrap().restrict(&idx);
        let real = realize_tree(&m, r(0)).unwrap();
        let labelled: Vec<usize> = real.embedding.values().map(|p| match p {
            TreePoint::Vertex(v) => *v,
            TreePoint::OnEdge { .. } => usize::MAX,
        }).collect();
        let tree = &real.tree;
        for v in 0..tree.vertex_count() {
            let deg = tree.neighbors(v).len();
            if !labelled.contains(&v) {
                prop_assert!(deg >= 3, "unlabeled vertex {} has degree {}", tree.id(v), deg);
            }
        }
        prop_assert!(tree.edges().iter().all(|e| e.len > r(0)));
    }

    #[test]
    fn insertion_order_does_not_change_the_metric(t in arb_tree(10), rot in 0usize..10) {
        let m = t.vertex_metric().unwrap();
        let n = m.len();
        let order: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let labels = order.iter().map(|&i| m.label(i).to_string()).collect();
        let permuted = FiniteMetric::from_fn(labels, |i, j| m.dist(order[i], order[j])).unwrap();
        let a = realize_tree(&m, r(0)).unwrap();
        let b = realize_tree(&permuted, r(0)).unwrap();
        let total = |t: &realtree::WeightedTree<Rational>| t.edges().iter().fold(r(0), |s, e| s + e.len);
        prop_assert_eq!(total(&a.tree), total(&b.tree));
        for x in m.labels() {
            for y in m.labels() {
                let da = a.tree.distance(&a.embedding[x], &a.embedding[y]).unwrap();
                let db = b.tree.distance(&b.embedding[x], &b.embedding[y]).unwrap();
                prop_assert_eq!(da, db);
            }
        }
    }

    #[test]
    fn floating_round_trip(t in arb_tree(12)) {
        let tf = t.map_lengths(|x| x.to_f64());
        let m = tf.vertex_metric().unwrap();
        let real = realize_tree(&m, 1e-9).unwrap();
        let rep = verify_realization(&real.tree, &real.embedding, &m, 1e-9).unwrap();
        prop_assert!(rep.max_abs <= 1e-9);
    }

    #[test]
    fn non_tree_metrics_are_rejected(m in arb_metric(6)) {
        let res = realize_tree(&m, r(0));
        prop_assert_eq!(res.is_ok(), m.is_tree_metric(r(0)));
    }
}
