mod support;

use opinion_miner::reliability::{
    filter_noisy, reliability_scores, run_hits, score_graph, BipartiteGraph, HitsParams, PairKey,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{cosine, principal_hub_vector, random_connected_biadjacency};

fn pair_name(i: usize) -> PairKey {
    PairKey::new(&format!("f{i:02}"), "o")
}

fn graph_from(w: &[Vec<f64>]) -> BipartiteGraph {
    let mut edges = Vec::new();
    for (p, row) in w.iter().enumerate() {
        for (d, &x) in row.iter().enumerate() {
            if x > 0.0 {
                edges.push((pair_name(p), format!("d{d:02}"), x));
            }
        }
    }
    BipartiteGraph::from_weighted("c", edges).unwrap()
}

/// Hub scores laid out in `w` row order.
fn hubs_by_row(g: &BipartiteGraph, hubs: &[f64], rows: usize) -> Vec<f64> {
    (0..rows)
        .map(|p| hubs[g.pairs.binary_search(&pair_name(p)).unwrap()])
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hub_direction_matches_eigenvector(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_connected_biadjacency(&mut rng, 20);
        let g = graph_from(&w);
        let h = run_hits(&g, HitsParams::default());
        prop_assert!(h.converged);
        let ours = hubs_by_row(&g, &h.hubs, w.len());
        let oracle = principal_hub_vector(&w);
        prop_assert!(cosine(&ours, &oracle) >= 1.0 - 1e-6, "cos={}", cosine(&ours, &oracle));
    }

    #[test]
    fn reliability_is_scale_invariant(
        scores in prop::collection::vec(0.0f64..100.0, 1..30),
        c in 1e-3f64..1e3,
    ) {
        let r = reliability_scores(&scores);
        let scaled: Vec<f64> = scores.iter().map(|s| s * c).collect();
        let rs = reliability_scores(&scaled);
        for (a, b) in r.iter().zip(&rs) {
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(a));
        }
    }

    #[test]
    fn dominating_pair_scores_at_least_as_high(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = random_connected_biadjacency(&mut rng, 19);
        let q = rng.gen_range(0..w.len());
        let mut dominant = w[q].clone();
        for x in dominant.iter_mut() {
            if *x > 0.0 {
                *x += rng.gen_range(0..=2) as f64;
            } else if rng.gen_bool(0.3) {
                *x = rng.gen_range(1..=3) as f64;
            }
        }
        w.push(dominant);
        let p = w.len() - 1;
        let g = graph_from(&w);
        for max_iter in [1, 2, 3, 5, 1000] {
            let h = run_hits(&g, HitsParams { epsilon: 1e-4, max_iter });
            let hubs = hubs_by_row(&g, &h.hubs, w.len());
            prop_assert!(hubs[p] >= hubs[q] - 1e-12, "iter {max_iter}: {} < {}", hubs[p], hubs[q]);
            let r = reliability_scores(&hubs);
            prop_assert!(r[p] >= r[q] - 1e-12);
        }
    }

    #[test]
    fn score_table_bounds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_connected_biadjacency(&mut rng, 20);
        let t = score_graph(&graph_from(&w), HitsParams::default());
        prop_assert!(t.pairs.iter().all(|p| (0.0..=1.0).contains(&p.reliability)));
        prop_assert!(t.documents.iter().all(|d| (0.0..=1.0).contains(&d.normalized_authority)));
        prop_assert!(t.pairs.iter().any(|p| p.reliability == 1.0));
        let out = filter_noisy(&t.pairs, 0.05).unwrap();
        prop_assert_eq!(out.kept.len() + out.removed.len(), t.pairs.len());
        prop_assert!(out.kept.iter().all(|p| p.reliability >= 0.05));
    }
}

#[test]
fn converges_on_a_large_connected_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = random_connected_biadjacency(&mut rng, 1000);
    let h = run_hits(&graph_from(&w), HitsParams::default());
    assert!(h.converged, "{} iterations", h.iterations);
}

#[test]
fn equal_hubs_give_all_ones() {
    let w = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
    let t = score_graph(&graph_from(&w), HitsParams::default());
    assert!(t.pairs.iter().all(|p| p.reliability == 1.0));
}
