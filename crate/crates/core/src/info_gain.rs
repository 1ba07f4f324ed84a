//! Information-gain ranking of the feature attributes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::features::{Attribute, FeatureVector};

/// Number of equal-frequency bins used for the TF-IDF attribute.
pub const TF_IDF_BINS: usize = 10;

/// Shannon entropy (bits) of a count distribution.
pub fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

/// Equal-frequency discretization: the value at sorted rank `r` goes to bin
/// `floor(r * bins / n)`, and tied values share the bin of their first rank.
pub fn discretize_equal_frequency(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0; n];
    let mut current_bin = 0;
    for (rank, &i) in order.iter().enumerate() {
        let tied = rank > 0 && values[order[rank - 1]] == values[i];
        if !tied {
            current_bin = rank * bins / n;
        }
        out[i] = current_bin;
    }
    out
}

fn attribute_values(vectors: &[FeatureVector], attribute: Attribute) -> Vec<usize> {
    match attribute {
        Attribute::TfIdf => {
            let raw: Vec<f64> = vectors.iter().map(|v| v.tf_idf).collect();
            discretize_equal_frequency(&raw, TF_IDF_BINS)
        }
        a => vectors
            .iter()
            .map(|v| a.value_index(v).expect("categorical attribute"))
            .collect(),
    }
}

/// `H(class) - sum_v p(v) H(class | v)` in bits.
pub fn information_gain(vectors: &[FeatureVector], attribute: Attribute) -> Result<f64> {
    if vectors.len() < 2 {
        return Err(Error::InvalidInput(
            "information gain needs at least two instances".into(),
        ));
    }
    let classes = vectors
        .iter()
        .map(|v| v.class_label.map(|c| c.index()))
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::Unlabeled)?;

    let mut class_counts = [0usize; 2];
    let mut by_value: HashMap<usize, [usize; 2]> = HashMap::new();
    for (value, class) in attribute_values(vectors, attribute).into_iter().zip(classes) {
        class_counts[class] += 1;
        by_value.entry(value).or_default()[class] += 1;
    }
    let n = vectors.len() as f64;
    let conditional: f64 = by_value
        .values()
        .map(|c| (c[0] + c[1]) as f64 / n * entropy(c))
        .sum();
    Ok((entropy(&class_counts) - conditional).max(0.0))
}

/// All six attributes ranked by information gain, highest first.
pub fn rank_attributes(vectors: &[FeatureVector]) -> Result<Vec<(Attribute, f64)>> {
    let mut ranked = Attribute::ALL
        .into_iter()
        .map(|a| information_gain(vectors, a).map(|ig| (a, ig)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}
