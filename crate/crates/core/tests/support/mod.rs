//! Reference implementations used as test oracles. They are written
//! directly from the formulas, without going through the library.
#![allow(dead_code)]

use opinion_miner::corpus::Class;
use opinion_miner::features::{FeatureVector, PosClass, Seed};
use rand::Rng;

pub fn all_pos() -> [PosClass; 5] {
    [
        PosClass::Adjective,
        PosClass::Adverb,
        PosClass::Noun,
        PosClass::Verb,
        PosClass::Other,
    ]
}

pub fn all_seeds() -> [Seed; 3] {
    [Seed::Positive, Seed::Negative, Seed::None]
}

/// `P(S | fv)` by direct multiplication of the naive Bayes factors, all in
/// linear space.
pub fn bayes_oracle(train: &[FeatureVector], fv: &FeatureVector, variance_floor: f64) -> f64 {
    let n = train.len() as f64;
    let mut joint = [0.0f64; 2];
    for (k, class) in [Class::Subjective, Class::Objective].into_iter().enumerate() {
        let members: Vec<&FeatureVector> = train.iter().filter(|v| v.class_label == Some(class)).collect();
        let m = members.len() as f64;
        let prior = (m + 1.0) / (n + 2.0);

        let mean = members.iter().map(|v| v.tf_idf).sum::<f64>() / m;
        let var = (members.iter().map(|v| (v.tf_idf - mean).powi(2)).sum::<f64>() / m).max(variance_floor);
        let pdf = (1.0 / (2.0 * std::f64::consts::PI * var).sqrt()
            * (-(fv.tf_idf - mean).powi(2) / (2.0 * var)).exp())
        .max(1e-300);

        let cat = |same: &dyn Fn(&FeatureVector) -> bool, domain: f64| {
            (members.iter().filter(|v| same(v)).count() as f64 + 1.0) / (m + domain)
        };
        let likelihood = cat(&|v| v.position == fv.position, 3.0)
            * cat(&|v| v.pos_class == fv.pos_class, 5.0)
            * cat(&|v| v.seed == fv.seed, 3.0)
            * cat(&|v| v.negation == fv.negation, 2.0)
            * cat(&|v| v.modifier == fv.modifier, 2.0);
        joint[k] = prior * pdf * likelihood;
    }
    joint[0] / (joint[0] + joint[1])
}

pub fn random_vector(rng: &mut impl Rng, tf_values: &[f64], class: Option<Class>) -> FeatureVector {
    FeatureVector {
        tf_idf: tf_values[rng.gen_range(0..tf_values.len())],
        position: rng.gen_range(-1..=1),
        pos_class: all_pos()[rng.gen_range(0..5)],
        seed: all_seeds()[rng.gen_range(0..3)],
        negation: rng.gen_bool(0.5),
        modifier: rng.gen_bool(0.5),
        class_label: class,
    }
}

/// Labeled dataset of 2..=8 instances with both classes present and at most
/// two distinct tf_idf values.
pub fn random_dataset(rng: &mut impl Rng) -> Vec<FeatureVector> {
    let n = rng.gen_range(2..=8);
    let tf_values = [rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0)];
    let distinct = rng.gen_range(1..=2);
    let mut v: Vec<FeatureVector> = (0..n)
        .map(|_| {
            let class = if rng.gen_bool(0.5) { Class::Subjective } else { Class::Objective };
            random_vector(rng, &tf_values[..distinct], Some(class))
        })
        .collect();
    v[0].class_label = Some(Class::Subjective);
    v[1].class_label = Some(Class::Objective);
    v
}

/// Weighted biadjacency `w[pair][doc]`, connected, with positive integer weights.
pub fn random_connected_biadjacency(rng: &mut impl Rng, max_nodes: usize) -> Vec<Vec<f64>> {
    let pairs = rng.gen_range(1..max_nodes);
    let docs = rng.gen_range(1..=(max_nodes - pairs));
    let mut w = vec![vec![0.0; docs]; pairs];
    // spanning tree: add nodes one at a time, each attached to an existing
    // node on the other side
    let mut order: Vec<(bool, usize)> = (1..pairs).map(|p| (true, p)).chain((1..docs).map(|d| (false, d))).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    w[0][0] = rng.gen_range(1..=3) as f64;
    let (mut seen_pairs, mut seen_docs) = (vec![0usize], vec![0usize]);
    for (is_pair, idx) in order {
        if is_pair {
            let d = seen_docs[rng.gen_range(0..seen_docs.len())];
            w[idx][d] = rng.gen_range(1..=3) as f64;
            seen_pairs.push(idx);
        } else {
            let p = seen_pairs[rng.gen_range(0..seen_pairs.len())];
            w[p][idx] = rng.gen_range(1..=3) as f64;
            seen_docs.push(idx);
        }
    }
    for row in w.iter_mut() {
        for cell in row.iter_mut() {
            if *cell == 0.0 && rng.gen_bool(0.3) {
                *cell = rng.gen_range(1..=3) as f64;
            }
        }
    }
    w
}

/// Principal eigenvector of `W Wᵀ` by plain power iteration with L2
/// normalization.
pub fn principal_hub_vector(w: &[Vec<f64>]) -> Vec<f64> {
    let p = w.len();
    let d = w[0].len();
    let mut m = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            m[i][j] = (0..d).map(|k| w[i][k] * w[j][k]).sum();
        }
    }
    let mut v = vec![1.0 / (p as f64).sqrt(); p];
    for _ in 0..200_000 {
        let mut next: Vec<f64> = (0..p).map(|i| (0..p).map(|j| m[i][j] * v[j]).sum()).collect();
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        next.iter_mut().for_each(|x| *x /= norm);
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta < 1e-15 {
            break;
        }
    }
    v
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Entropy in bits of a list of class labels.
pub fn label_entropy(labels: &[Class]) -> f64 {
    let n = labels.len() as f64;
    [Class::Subjective, Class::Objective]
        .iter()
        .map(|c| labels.iter().filter(|l| *l == c).count() as f64 / n)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Information gain of a discrete attribute given as one key per instance.
pub fn brute_force_ig<K: PartialEq + Copy>(keys: &[K], labels: &[Class]) -> f64 {
    let n = labels.len() as f64;
    let mut distinct: Vec<K> = Vec::new();
    for k in keys {
        if !distinct.contains(k) {
            distinct.push(*k);
        }
    }
    let conditional: f64 = distinct
        .iter()
        .map(|k| {
            let subset: Vec<Class> = keys
                .iter()
                .zip(labels)
                .filter(|(kk, _)| *kk == k)
                .map(|(_, l)| *l)
                .collect();
            subset.len() as f64 / n * label_entropy(&subset)
        })
        .sum();
    label_entropy(labels) - conditional
}
