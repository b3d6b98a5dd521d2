use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ledobata::lie::StructureConstants;
use ledobata::metric::MetricT;
use ledobata::random;
use ledobata::reduce::{
    check_split, decompose, decompose_with_order, enumerate_partition_pairs, factor_metric, go_manifold,
    holonomy_generators, product_metric, Partition, PartitionPair,
};

fn p(s: &str) -> Partition {
    s.split('|')
        .map(|part| part.chars().map(|c| c.to_digit(10).unwrap() as usize - 1).collect())
        .collect()
}

fn graph_metric(x: [f64; 6], y: [f64; 2]) -> MetricT {
    let mut t = DMatrix::zeros(7, 7);
    let mut edge = |i: usize, j: usize, w: f64| {
        t[(i, i)] += w;
        t[(j, j)] += w;
        t[(i, j)] -= w;
        t[(j, i)] -= w;
    };
    edge(0, 1, x[0]);
    edge(0, 2, x[1]);
    edge(1, 2, x[2]);
    edge(3, 5, x[3]);
    edge(3, 6, x[4]);
    edge(5, 6, x[5]);
    edge(0, 3, y[0]);
    edge(1, 4, y[1]);
    MetricT::new(t).unwrap()
}

fn example_pair() -> PartitionPair {
    PartitionPair::new(p("123|467|5"), p("14|25|3|6|7"))
}

#[test]
fn graph_example_splits_along_the_example_pair() {
    let t = graph_metric([1.0; 6], [1.0; 2]);
    let pair = example_pair();
    assert!(enumerate_partition_pairs(7).unwrap().contains(&pair));
    let s = check_split(&t, &pair, 1e-9).unwrap();
    assert!(s.residual < 1e-15);
    let f3 = factor_metric(&t, &p("123|467|5")).unwrap();
    let want3 = MetricT::from_rows(&[vec![2.0, -1.0, -1.0], vec![-1.0, 1.0, 0.0], vec![-1.0, 0.0, 1.0]]).unwrap();
    assert_eq!(f3.t(), want3.t());
    let f5 = factor_metric(&t, &p("14|25|3|6|7")).unwrap();
    assert_eq!(f5.m(), 5);
    // two triangles sharing the vertex {1,4}
    for (i, j) in [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)] {
        assert_eq!(f5.t()[(i, j)], -1.0);
    }
    assert_eq!(f5.t()[(1, 3)], 0.0);
}

#[test]
fn graph_example_decomposes_fully() {
    let t = graph_metric([1.0, 2.0, 0.5, 1.5, 3.0, 0.7], [0.9, 1.1]);
    let dec = decompose(&t, 1e-9).unwrap();
    assert_eq!(dec.sizes(), vec![2, 2, 3, 3]);
    assert_eq!(dec.isometry_group_k(), 10);
    let labels: Vec<Partition> = dec.factors.iter().map(|f| f.labels.clone()).collect();
    // each block keeps its vertices; the rest of the graph attaches through a cut vertex
    for want in ["1467|25|3", "12345|6|7", "1235|467", "123467|5"] {
        assert!(labels.contains(&p(want)), "{want} missing from {labels:?}");
    }
}

#[test]
fn graph_example_factors_are_holonomy_invariant() {
    let t = graph_metric([1.0; 6], [1.0; 2]);
    let pair = example_pair();
    for sc in [StructureConstants::so3(), StructureConstants::su3()] {
        let gens = holonomy_generators(&t, &sc);
        for side in [&pair.p1, &pair.p2] {
            let r = gens.invariance_residual(&gens.factor_projector(side));
            assert!(r < 1e-8, "{} {r}", sc.name());
        }
    }
}

fn random_reducible(rng: &mut ChaCha8Rng) -> MetricT {
    let parts = rng.random_range(2..=3);
    let first = rng.random_range(2..=4);
    let mut t = random::dense_form(rng, first).to_t();
    for _ in 1..parts {
        let room = 8 - t.m();
        if room < 2 {
            break;
        }
        let k = rng.random_range(2..=room.min(4));
        let f = random::dense_form(rng, k).to_t();
        t = if rng.random_bool(0.5) { product_metric(&t, &f) } else { product_metric(&f, &t) };
    }
    random::permuted(rng, &t)
}

#[test]
fn decomposition_does_not_depend_on_split_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let t = random_reducible(&mut rng);
        let a = decompose_with_order(&t, 1e-9, false).unwrap();
        let b = decompose_with_order(&t, 1e-9, true).unwrap();
        assert!(a.factors.len() >= 2);
        assert_eq!(a.factors.len(), b.factors.len());
        let dims: usize = a.factors.iter().map(|f| f.m() - 1).sum();
        assert_eq!(dims, t.m() - 1);
        assert_eq!(a.isometry_group_k(), t.m() + a.factors.len() - 1);
        for (x, y) in a.factors.iter().zip(&b.factors) {
            assert_eq!(x.labels, y.labels);
            assert!((x.t.t() - y.t.t()).amax() < 1e-10 * t.t().amax());
        }
    }
}

#[test]
fn isometry_group_stays_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let t = random_reducible(&mut rng);
        let m = t.m();
        let k = decompose(&t, 1e-9).unwrap().isometry_group_k();
        assert!(m <= k && k <= 2 * (m - 1));
    }
}

#[test]
fn every_m3_metric_is_a_go_manifold() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let t = random::dense_form(&mut rng, 3).to_t();
        assert!(go_manifold(&t, 1e-9, 1e-8).unwrap());
    }
    assert!(go_manifold(&MetricT::standard(5), 1e-9, 1e-8).unwrap());
}

#[test]
fn enumeration_rejects_small_m() {
    assert!(enumerate_partition_pairs(1).is_err());
    assert!(enumerate_partition_pairs(2).unwrap().is_empty());
    assert_eq!(enumerate_partition_pairs(3).unwrap().len(), 3);
}
