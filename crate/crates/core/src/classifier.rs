//! Naive Bayes subjectivity classifier over unigram feature vectors.
//!
//! TF-IDF is modelled per class with a Gaussian; the five nominal
//! attributes use add-one smoothed conditional tables over their declared
//! domains. Scoring happens in log space. A sentence is subjective as soon
//! as one of its tokens is predicted subjective.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Class;
use crate::error::{Error, Result};
use crate::features::{Attribute, FeatureVector};

/// Smallest density admitted into a log-likelihood.
pub const DENSITY_FLOOR: f64 = 1e-300;
/// Posteriors closer than this are a tie.
pub const TIE_EPSILON: f64 = 1e-12;

const MODEL_FORMAT: &str = "opinion-miner-nb";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NbParams {
    pub variance_floor: f64,
    /// Class reported when the two posteriors tie.
    pub tie_class: Class,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams {
            variance_floor: 1e-9,
            tie_class: Class::Objective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub mean: f64,
    pub variance: f64,
}

impl Gaussian {
    pub fn log_density(&self, x: f64) -> f64 {
        let d = x - self.mean;
        let log_pdf = -0.5 * (2.0 * std::f64::consts::PI * self.variance).ln() - d * d / (2.0 * self.variance);
        log_pdf.max(DENSITY_FLOOR.ln())
    }
}

/// Smoothed `P(value | class)` for one nominal attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalTable {
    pub attribute: Attribute,
    /// `probs[class.index()][value_index]`.
    pub probs: [Vec<f64>; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    pub priors: [f64; 2],
    pub support: [usize; 2],
    pub tf_idf: [Gaussian; 2],
    pub tables: Vec<CategoricalTable>,
    pub params: NbParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenPrediction {
    pub class: Class,
    /// `P(S | fv)`.
    pub subjective_probability: f64,
}

/// Anything that scores a unigram vector. Naive Bayes is the only learner
/// shipped; others plug in here.
pub trait TokenClassifier {
    fn predict_token(&self, fv: &FeatureVector) -> TokenPrediction;
}

/// Fits the model. Every vector must be labeled and both classes present.
pub fn train(vectors: &[FeatureVector], params: NbParams) -> Result<NbModel> {
    let labels = vectors
        .iter()
        .map(|v| v.class_label)
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::Unlabeled)?;
    let mut support = [0usize; 2];
    for c in &labels {
        support[c.index()] += 1;
    }
    for class in Class::ALL {
        if support[class.index()] == 0 {
            return Err(Error::EmptyClass(class));
        }
    }
    let n = vectors.len() as f64;
    let priors = [
        (support[0] as f64 + 1.0) / (n + 2.0),
        (support[1] as f64 + 1.0) / (n + 2.0),
    ];

    let mut sums = [0.0f64; 2];
    for (v, c) in vectors.iter().zip(&labels) {
        sums[c.index()] += v.tf_idf;
    }
    let means = [sums[0] / support[0] as f64, sums[1] / support[1] as f64];
    let mut sq = [0.0f64; 2];
    for (v, c) in vectors.iter().zip(&labels) {
        let d = v.tf_idf - means[c.index()];
        sq[c.index()] += d * d;
    }
    let tf_idf = [0, 1].map(|k| Gaussian {
        mean: means[k],
        variance: (sq[k] / support[k] as f64).max(params.variance_floor),
    });

    let tables = Attribute::CATEGORICAL
        .into_iter()
        .map(|attribute| {
            let size = attribute.domain_size().expect("nominal attribute");
            let mut counts = [vec![0usize; size], vec![0usize; size]];
            for (v, c) in vectors.iter().zip(&labels) {
                counts[c.index()][attribute.value_index(v).expect("nominal attribute")] += 1;
            }
            let probs = [0, 1].map(|k| {
                counts[k]
                    .iter()
                    .map(|&cnt| (cnt as f64 + 1.0) / (support[k] as f64 + size as f64))
                    .collect()
            });
            CategoricalTable { attribute, probs }
        })
        .collect();

    Ok(NbModel {
        priors,
        support,
        tf_idf,
        tables,
        params,
    })
}

impl NbModel {
    /// Unnormalized `log P(class) + log P(fv | class)`.
    pub fn log_joint(&self, fv: &FeatureVector, class: Class) -> f64 {
        let k = class.index();
        let mut lp = self.priors[k].ln() + self.tf_idf[k].log_density(fv.tf_idf);
        for table in &self.tables {
            let v = table.attribute.value_index(fv).expect("nominal attribute");
            lp += table.probs[k][v].ln();
        }
        lp
    }

    /// `P(S | fv)`.
    pub fn posterior(&self, fv: &FeatureVector) -> f64 {
        let ls = self.log_joint(fv, Class::Subjective);
        let lo = self.log_joint(fv, Class::Objective);
        1.0 / (1.0 + (lo - ls).exp())
    }

    /// Versioned `key=value` text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# naive Bayes subjectivity model");
        let _ = writeln!(out, "format={MODEL_FORMAT}");
        let _ = writeln!(out, "version={MODEL_VERSION}");
        let _ = writeln!(out, "variance_floor={}", self.params.variance_floor);
        let _ = writeln!(out, "tie_class={}", self.params.tie_class);
        for c in Class::ALL {
            let _ = writeln!(out, "support.{c}={}", self.support[c.index()]);
        }
        for c in Class::ALL {
            let _ = writeln!(out, "prior.{c}={}", self.priors[c.index()]);
        }
        for c in Class::ALL {
            let g = self.tf_idf[c.index()];
            let _ = writeln!(out, "tf_idf.{c}.mean={}", g.mean);
            let _ = writeln!(out, "tf_idf.{c}.variance={}", g.variance);
        }
        for t in &self.tables {
            for c in Class::ALL {
                for (i, p) in t.probs[c.index()].iter().enumerate() {
                    let _ = writeln!(out, "{}.{c}.{}={p}", t.attribute, t.attribute.value_label(i));
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let source = "<model>";
        let mut kv: HashMap<&str, (usize, &str)> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source, i + 1, "expected key=value"))?;
            kv.insert(k.trim(), (i + 1, v.trim()));
        }
        let get = |key: &str| -> Result<(usize, &str)> {
            kv.get(key)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("model file is missing `{key}`")))
        };
        let num = |key: &str| -> Result<f64> {
            let (line, v) = get(key)?;
            v.parse()
                .map_err(|_| Error::parse(source, line, format!("`{key}` is not a number")))
        };
        if get("format")?.1 != MODEL_FORMAT {
            return Err(Error::InvalidInput("not an opinion-miner model file".into()));
        }
        let (line, version) = get("version")?;
        if version != MODEL_VERSION.to_string() {
            return Err(Error::parse(source, line, format!("unsupported model version {version}")));
        }
        let (line, tie) = get("tie_class")?;
        let params = NbParams {
            variance_floor: num("variance_floor")?,
            tie_class: tie.parse().map_err(|m| Error::parse(source, line, m))?,
        };
        let support = [
            num("support.S")? as usize,
            num("support.O")? as usize,
        ];
        let priors = [num("prior.S")?, num("prior.O")?];
        let tf_idf = [
            Gaussian {
                mean: num("tf_idf.S.mean")?,
                variance: num("tf_idf.S.variance")?,
            },
            Gaussian {
                mean: num("tf_idf.O.mean")?,
                variance: num("tf_idf.O.variance")?,
            },
        ];
        let tables = Attribute::CATEGORICAL
            .into_iter()
            .map(|attribute| {
                let size = attribute.domain_size().expect("nominal attribute");
                let row = |c: Class| -> Result<Vec<f64>> {
                    (0..size)
                        .map(|i| num(&format!("{attribute}.{c}.{}", attribute.value_label(i))))
                        .collect()
                };
                Ok(CategoricalTable {
                    attribute,
                    probs: [row(Class::Subjective)?, row(Class::Objective)?],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NbModel {
            priors,
            support,
            tf_idf,
            tables,
            params,
        })
    }
}

impl TokenClassifier for NbModel {
    fn predict_token(&self, fv: &FeatureVector) -> TokenPrediction {
        let p = self.posterior(fv);
        let class = if (p - (1.0 - p)).abs() < TIE_EPSILON {
            self.params.tie_class
        } else if p > 0.5 {
            Class::Subjective
        } else {
            Class::Objective
        };
        TokenPrediction {
            class,
            subjective_probability: p,
        }
    }
}

pub fn predict_token(model: &impl TokenClassifier, fv: &FeatureVector) -> TokenPrediction {
    model.predict_token(fv)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceVerdict {
    pub label: Class,
    /// Noisy-OR of the token posteriors; informational only.
    pub subjective_probability: f64,
    pub tokens: Vec<TokenPrediction>,
}

impl SentenceVerdict {
    /// Subjective iff any token is predicted subjective.
    pub fn from_predictions(tokens: Vec<TokenPrediction>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidInput("cannot classify a sentence without tokens".into()));
        }
        let label = if tokens.iter().any(|t| t.class == Class::Subjective) {
            Class::Subjective
        } else {
            Class::Objective
        };
        let none_subjective: f64 = tokens.iter().map(|t| 1.0 - t.subjective_probability).product();
        Ok(SentenceVerdict {
            label,
            subjective_probability: 1.0 - none_subjective,
            tokens,
        })
    }
}

pub fn classify_sentence(model: &impl TokenClassifier, vectors: &[FeatureVector]) -> Result<SentenceVerdict> {
    SentenceVerdict::from_predictions(vectors.iter().map(|v| model.predict_token(v)).collect())
}

/// Shuffled k-fold split of `0..n`: `(train, test)` index pairs.
pub fn k_fold(n: usize, k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 || k > n {
        return Err(Error::InvalidInput(format!("k-fold needs 2 <= k <= n, got k={k}, n={n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok((0..k)
        .map(|fold| {
            let (lo, hi) = (fold * n / k, (fold + 1) * n / k);
            let test = order[lo..hi].to_vec();
            let train = order[..lo].iter().chain(&order[hi..]).copied().collect();
            (train, test)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{PosClass, Seed};

    fn fv(tf_idf: f64, pos: PosClass, seed: Seed, class: Option<Class>) -> FeatureVector {
        FeatureVector {
            tf_idf,
            position: 0,
            pos_class: pos,
            seed,
            negation: false,
            modifier: false,
            class_label: class,
        }
    }

    fn six() -> Vec<FeatureVector> {
        use Class::*;
        vec![
            fv(0.04, PosClass::Adjective, Seed::Positive, Some(Subjective)),
            fv(0.04, PosClass::Adjective, Seed::None, Some(Subjective)),
            fv(0.01, PosClass::Adverb, Seed::None, Some(Subjective)),
            fv(0.01, PosClass::Noun, Seed::None, Some(Objective)),
            fv(0.02, PosClass::Noun, Seed::None, Some(Objective)),
            fv(0.01, PosClass::Verb, Seed::None, Some(Objective)),
        ]
    }

    /// Counting by hand over [`six`]: 3 S / 3 O.
    #[test]
    fn six_instance_parameters() {
        let m = train(&six(), NbParams::default()).unwrap();
        assert_eq!(m.priors, [0.5, 0.5]);
        assert_eq!(m.support, [3, 3]);
        assert!((m.tf_idf[0].mean - 0.03).abs() < 1e-12);
        // S: (0.01^2 + 0.01^2 + 0.02^2) / 3
        assert!((m.tf_idf[0].variance - 0.0006 / 3.0).abs() < 1e-12);
        let pos = &m.tables[1];
        assert_eq!(pos.attribute, Attribute::Pos);
        // S adjectives: (2 + 1) / (3 + 5)
        assert!((pos.probs[0][0] - 3.0 / 8.0).abs() < 1e-12);
        assert!((pos.probs[1][0] - 1.0 / 8.0).abs() < 1e-12);
        for t in &m.tables {
            for row in &t.probs {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn missing_class_is_an_error() {
        let v = vec![fv(0.1, PosClass::Noun, Seed::None, Some(Class::Objective))];
        assert!(matches!(train(&v, NbParams::default()), Err(Error::EmptyClass(Class::Subjective))));
        let u = vec![fv(0.1, PosClass::Noun, Seed::None, None)];
        assert!(matches!(train(&u, NbParams::default()), Err(Error::Unlabeled)));
    }

    #[test]
    fn symmetric_model_ties_to_objective() {
        use Class::*;
        let v = vec![
            fv(0.1, PosClass::Noun, Seed::None, Some(Subjective)),
            fv(0.1, PosClass::Noun, Seed::None, Some(Objective)),
        ];
        let m = train(&v, NbParams::default()).unwrap();
        let p = m.predict_token(&v[0]);
        assert!((p.subjective_probability - 0.5).abs() < 1e-12);
        assert_eq!(p.class, Objective);
        let s = NbParams {
            tie_class: Subjective,
            ..NbParams::default()
        };
        assert_eq!(train(&v, s).unwrap().predict_token(&v[0]).class, Subjective);
    }

    #[test]
    fn adjective_seed_vector_is_subjective() {
        let m = train(&six(), NbParams::default()).unwrap();
        let probe = fv(0.0412, PosClass::Adjective, Seed::Positive, None);
        assert_eq!(m.predict_token(&probe).class, Class::Subjective);
    }

    #[test]
    fn any_token_rule() {
        let t = |c: Class, p: f64| TokenPrediction {
            class: c,
            subjective_probability: p,
        };
        use Class::*;
        let v = SentenceVerdict::from_predictions(vec![t(Objective, 0.1), t(Objective, 0.2), t(Subjective, 0.7)]).unwrap();
        assert_eq!(v.label, Subjective);
        let o = SentenceVerdict::from_predictions(vec![t(Objective, 0.1), t(Objective, 0.2)]).unwrap();
        assert_eq!(o.label, Objective);
        assert!((o.subjective_probability - (1.0 - 0.9 * 0.8)).abs() < 1e-12);
        let one = SentenceVerdict::from_predictions(vec![t(Subjective, 0.9)]).unwrap();
        assert!((one.subjective_probability - 0.9).abs() < 1e-12);
        assert!(SentenceVerdict::from_predictions(vec![]).is_err());
    }

    #[test]
    fn model_text_round_trip() {
        let m = train(&six(), NbParams::default()).unwrap();
        let back = NbModel::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert!(NbModel::from_text("format=other\n").is_err());
        let broken = m.to_text().replace("prior.S=0.5", "prior.S=abc");
        assert!(NbModel::from_text(&broken).unwrap_err().to_string().contains("prior.S"));
    }

    #[test]
    fn folds_partition_indices() {
        let folds = k_fold(10, 3, 7).unwrap();
        assert_eq!(folds.len(), 3);
        let mut all: Vec<usize> = folds.iter().flat_map(|(_, t)| t.clone()).collect();
        all.sort();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        for (train, test) in &folds {
            assert_eq!(train.len() + test.len(), 10);
        }
        assert_eq!(folds, k_fold(10, 3, 7).unwrap());
        assert!(k_fold(3, 5, 0).is_err());
    }

    #[test]
    fn trains_large_dataset_quickly() {
        let mut v = Vec::with_capacity(30_000);
        for i in 0..30_000 {
            let class = if i % 7 == 0 { Class::Subjective } else { Class::Objective };
            let pos = PosClass::ALL[i % 5];
            v.push(fv((i % 97) as f64 / 1000.0, pos, Seed::ALL[i % 3], Some(class)));
        }
        let start = std::time::Instant::now();
        let m = train(&v, NbParams::default()).unwrap();
        assert!(start.elapsed().as_secs_f64() < 1.0);
        assert_eq!(m.support[0] + m.support[1], 30_000);
    }
}
