//! One-vs-rest linear SVM trained by stochastic subgradient descent on the
//! L2-regularized hinge loss.
//!
//! For each category `c` a binary problem is solved with labels `+1` for
//! documents of `c` and `-1` otherwise. At global step `t` (counting from 0
//! across epochs) the step size is
//!
//! ```text
//! eta_t = eta_0 / (1 + eta_0 * lambda * t)
//! ```
//!
//! and the update for example `(x, y)` is
//!
//! ```text
//! w <- (1 - eta_t * lambda) * w + [y (w.x + b) < 1] * eta_t * y * x
//! b <- b + [y (w.x + b) < 1] * eta_t * y
//! ```
//!
//! The bias is not regularized. Unless set explicitly, `eta_0` is
//! `1 / max_i |x_i|^2`, so the first steps are on the scale of the data
//! whatever the magnitude of the feature weights. Each epoch visits the
//! examples in an order drawn from a ChaCha8 generator seeded with the model
//! seed, so training is a pure function of the data and hyperparameters.

use std::path::Path;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CategorySet;
use crate::error::{Error, Result};
use crate::model_io;
use crate::scalar::Scalar;
use crate::selection::{Origin, Vocabulary};
use crate::weighting::{extension_weight, FeatureVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// L2 regularization strength.
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Initial step size `eta_0`; `None` calibrates it from the data.
    pub learning_rate: Option<f64>,
    /// Initialize thesaurus-origin features with their category priors.
    pub eq7_init: bool,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            epochs: 50,
            seed: 0,
            learning_rate: None,
            eq7_init: true,
        }
    }
}

impl Hyperparameters {
    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidHyperparameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if let Some(lr) = self.learning_rate {
            if !(lr > 0.0 && lr * self.lambda < 1.0) {
                return Err(Error::InvalidHyperparameter(format!(
                    "learning rate must be positive with learning_rate * lambda < 1, got {lr}"
                )));
            }
        }
        if self.epochs == 0 {
            return Err(Error::InvalidHyperparameter(
                "epochs must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel<T> {
    pub categories: CategorySet,
    /// Feature names; position is the index into each weight vector.
    pub features: Vec<String>,
    /// One dense weight vector per category, in category order.
    pub weights: Vec<Vec<T>>,
    pub biases: Vec<T>,
    pub hyperparameters: Hyperparameters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction<T> {
    pub doc_id: String,
    pub label: String,
    pub scores: IndexMap<String, T>,
}

/// Regularized hinge objective after each epoch, per category.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub epoch_loss: Vec<Vec<f64>>,
}

impl TrainingLog {
    /// Mean objective over categories for each epoch.
    pub fn mean_loss(&self) -> Vec<f64> {
        let Some(first) = self.epoch_loss.first() else {
            return Vec::new();
        };
        (0..first.len())
            .map(|e| {
                self.epoch_loss.iter().map(|l| l[e]).sum::<f64>() / self.epoch_loss.len() as f64
            })
            .collect()
    }
}

type SparseRow<T> = Vec<(usize, T)>;

fn to_sparse<T: Scalar>(
    v: &FeatureVector<T>,
    index_of: impl Fn(&str) -> Option<usize>,
) -> SparseRow<T> {
    v.iter()
        .filter_map(|(t, w)| index_of(t).map(|i| (i, w)))
        .collect()
}

fn dot<T: Scalar>(w: &[T], x: &[(usize, T)]) -> T {
    x.iter().fold(T::zero(), |acc, &(i, v)| acc + w[i] * v)
}

/// Trains one binary separator per category.
///
/// `examples` pairs vectors with category names from `categories`. Terms not
/// in `vocab` are ignored. When `hp.eq7_init` is set, each thesaurus-origin
/// feature starts at its per-category prior instead of zero.
pub fn train<T: Scalar>(
    examples: &[(FeatureVector<T>, String)],
    vocab: &Vocabulary,
    categories: &CategorySet,
    hp: &Hyperparameters,
) -> Result<(LinearModel<T>, TrainingLog)> {
    hp.validate()?;
    if examples.is_empty() {
        return Err(Error::NoTrainingData);
    }
    let mut labels = Vec::with_capacity(examples.len());
    for (_, label) in examples {
        labels.push(
            categories
                .index_of(label)
                .ok_or_else(|| Error::UnknownCategory(label.clone()))?,
        );
    }
    let mut present = labels.clone();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::TooFewCategories(present.len()));
    }

    let rows: Vec<SparseRow<T>> = examples
        .iter()
        .map(|(v, _)| to_sparse(v, |t| vocab.index_of(t)))
        .collect();
    let eta0 = match hp.learning_rate {
        Some(lr) => T::lit(lr),
        None => initial_step(&rows, T::lit(hp.lambda)),
    };
    let n_categories = categories.len();
    let n_features = vocab.len();

    let mut init = vec![vec![T::zero(); n_features]; n_categories];
    if hp.eq7_init {
        for (i, (_, entry)) in vocab.iter().enumerate() {
            if entry.origin == Origin::Thesaurus {
                let prior: Vec<T> = extension_weight(&entry.stats.doc_count, n_categories);
                for (c, p) in prior.into_iter().enumerate() {
                    init[c][i] = p;
                }
            }
        }
    }

    let results: Vec<Result<BinaryFit<T>>> = init
        .into_par_iter()
        .enumerate()
        .map(|(c, w0)| {
            let ys: Vec<T> = labels
                .iter()
                .map(|&l| if l == c { T::one() } else { -T::one() })
                .collect();
            train_binary(&rows, &ys, w0, eta0, hp).map_err(|epoch| Error::NonFinite {
                category: categories.get(c).unwrap_or_default().to_string(),
                epoch,
            })
        })
        .collect();

    let mut weights = Vec::with_capacity(n_categories);
    let mut biases = Vec::with_capacity(n_categories);
    let mut log = TrainingLog::default();
    for r in results {
        let (w, b, losses) = r?;
        weights.push(w);
        biases.push(b);
        log.epoch_loss.push(losses);
    }
    Ok((
        LinearModel {
            categories: categories.clone(),
            features: vocab.terms().map(str::to_string).collect(),
            weights,
            biases,
            hyperparameters: *hp,
        },
        log,
    ))
}

/// `1 / max |x|^2`, capped so that `eta_0 * lambda` stays below one.
fn initial_step<T: Scalar>(rows: &[SparseRow<T>], lambda: T) -> T {
    let max_sq = rows
        .iter()
        .map(|x| x.iter().map(|&(_, v)| v * v).sum::<T>())
        .fold(T::zero(), T::max);
    let eta = if max_sq > T::zero() {
        T::one() / max_sq
    } else {
        T::one()
    };
    eta.min(T::lit(0.5) / lambda)
}

/// Binary subgradient descent. Returns the failing epoch on a non-finite
/// parameter.
fn train_binary<T: Scalar>(
    rows: &[SparseRow<T>],
    ys: &[T],
    mut v: Vec<T>,
    eta0: T,
    hp: &Hyperparameters,
) -> std::result::Result<BinaryFit<T>, usize> {
    let lambda = T::lit(hp.lambda);
    let half = T::lit(0.5);
    let rescale_below = T::lit(1e-6);

    // w = scale * v, so the per-step shrink is O(1)
    let mut scale = T::one();
    let mut bias = T::zero();
    let mut step = 0usize;
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut losses = Vec::with_capacity(hp.epochs);

    for epoch in 0..hp.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = eta0 / (T::one() + eta0 * lambda * T::count(step));
            let x = &rows[i];
            let y = ys[i];
            let margin = y * (scale * dot(&v, x) + bias);
            scale = scale * (T::one() - eta * lambda);
            if margin < T::one() {
                let g = eta * y / scale;
                for &(j, xj) in x {
                    v[j] = v[j] + g * xj;
                }
                bias = bias + eta * y;
            }
            if scale < rescale_below {
                for wj in v.iter_mut() {
                    *wj = *wj * scale;
                }
                scale = T::one();
            }
            step += 1;
        }

        let hinge: T = rows
            .iter()
            .zip(ys)
            .map(|(x, &y)| (T::one() - y * (scale * dot(&v, x) + bias)).max(T::zero()))
            .sum::<T>()
            / T::count(rows.len());
        let sq: T = v.iter().map(|&wj| wj * wj).sum::<T>() * scale * scale;
        let objective = hinge + half * lambda * sq;
        if !objective.is_finite() || !bias.is_finite() {
            return Err(epoch);
        }
        losses.push(objective.as_f64());
    }
    for wj in v.iter_mut() {
        *wj = *wj * scale;
    }
    Ok((v, bias, losses))
}

impl<T: Scalar> LinearModel<T> {
    fn feature_index(&self) -> std::collections::HashMap<&str, usize> {
        self.features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_str(), i))
            .collect()
    }

    /// Decision values `w_c . v + b_c`, in category order. Unknown terms are
    /// ignored.
    pub fn decision_values(&self, v: &FeatureVector<T>) -> Vec<T> {
        let index = self.feature_index();
        let x = to_sparse(v, |t| index.get(t).copied());
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, &b)| dot(w, &x) + b)
            .collect()
    }

    pub fn predict(&self, v: &FeatureVector<T>) -> Prediction<T> {
        let scores = self.decision_values(v);
        let best = argmax(&scores);
        Prediction {
            doc_id: v.doc_id.clone(),
            label: self.categories.get(best).unwrap_or_default().to_string(),
            scores: self
                .categories
                .iter()
                .map(str::to_string)
                .zip(scores)
                .collect(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        model_io::save(MODEL_KIND, self, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        model_io::load(MODEL_KIND, path)
    }
}

/// Weights, bias and per-epoch objective of one binary problem.
type BinaryFit<T> = (Vec<T>, T, Vec<f64>);

pub const MODEL_KIND: &str = "linear-model";

/// Index of the largest value; the lowest index wins ties.
pub fn argmax<T: Scalar>(scores: &[T]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub fn predict<T: Scalar>(model: &LinearModel<T>, v: &FeatureVector<T>) -> Prediction<T> {
    model.predict(v)
}

pub fn save_model<T: Scalar>(model: &LinearModel<T>, path: &Path) -> Result<()> {
    model.save(path)
}

pub fn load_model<T: Scalar>(path: &Path) -> Result<LinearModel<T>> {
    LinearModel::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::TermStats;

    fn vocab(terms: &[&str]) -> Vocabulary {
        let mut v = Vocabulary::new();
        for t in terms {
            v.push(Origin::Corpus, TermStats::empty(t, 2));
        }
        v
    }

    fn cats() -> CategorySet {
        ["A", "B"].into_iter().collect()
    }

    fn fv(id: &str, pairs: &[(&str, f64)]) -> FeatureVector<f64> {
        FeatureVector::from_weights(id, pairs.iter().map(|&(t, w)| (t, w)))
    }

    #[test]
    fn disjoint_support_is_learned() {
        let ex = vec![
            (fv("a", &[("x", 1.0)]), "A".to_string()),
            (fv("b", &[("y", 1.0)]), "B".to_string()),
        ];
        let (model, log) = train(
            &ex,
            &vocab(&["x", "y"]),
            &cats(),
            &Hyperparameters::default(),
        )
        .unwrap();
        assert_eq!(model.predict(&ex[0].0).label, "A");
        assert_eq!(model.predict(&ex[1].0).label, "B");
        assert_eq!(log.epoch_loss.len(), 2);
        assert_eq!(log.epoch_loss[0].len(), 50);
    }

    #[test]
    fn identical_vectors_with_different_labels() {
        let ex = vec![
            (fv("a", &[("x", 1.0)]), "A".to_string()),
            (fv("b", &[("x", 1.0)]), "B".to_string()),
        ];
        let (model, _) = train(&ex, &vocab(&["x"]), &cats(), &Hyperparameters::default()).unwrap();
        let p = model.predict(&ex[0].0);
        assert!(p.label == "A" || p.label == "B");
    }

    #[test]
    fn rejects_bad_input() {
        let hp = Hyperparameters::default();
        assert!(matches!(
            train::<f64>(&[], &vocab(&["x"]), &cats(), &hp),
            Err(Error::NoTrainingData)
        ));
        let one = vec![(fv("a", &[("x", 1.0)]), "A".to_string())];
        assert!(matches!(
            train(&one, &vocab(&["x"]), &cats(), &hp),
            Err(Error::TooFewCategories(1))
        ));
        let bad = Hyperparameters { lambda: 0.0, ..hp };
        let ex = vec![
            (fv("a", &[("x", 1.0)]), "A".to_string()),
            (fv("b", &[("y", 1.0)]), "B".to_string()),
        ];
        assert!(matches!(
            train(&ex, &vocab(&["x", "y"]), &cats(), &bad),
            Err(Error::InvalidHyperparameter(_))
        ));
    }

    #[test]
    fn hand_built_model_scores() {
        let model = LinearModel {
            categories: cats(),
            features: vec!["f0".into(), "f1".into()],
            weights: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            biases: vec![0.0, 0.0],
            hyperparameters: Hyperparameters::default(),
        };
        let p = model.predict(&fv("q", &[("f0", 0.2), ("f1", 0.9)]));
        assert_eq!(p.label, "B");
        assert_eq!(p.scores["A"], 0.2);
        assert_eq!(p.scores["B"], 0.9);
    }

    #[test]
    fn zero_vector_falls_back_to_biases() {
        let mut model = LinearModel {
            categories: cats(),
            features: vec!["f0".into()],
            weights: vec![vec![1.0], vec![2.0]],
            biases: vec![0.5, -0.5],
            hyperparameters: Hyperparameters::default(),
        };
        let empty = FeatureVector::new("z");
        assert_eq!(model.predict(&empty).label, "A");
        model.biases = vec![0.0, 0.0];
        assert_eq!(model.predict(&empty).label, "A");
        model.biases = vec![0.0, 0.1];
        assert_eq!(model.predict(&empty).label, "B");
    }

    #[test]
    fn thesaurus_features_start_at_prior() {
        let mut v = vocab(&["x", "y"]);
        let mut s = TermStats::empty("syn", 2);
        s.doc_count = vec![3, 1];
        v.push(Origin::Thesaurus, s);
        let ex = vec![
            (fv("a", &[("x", 1.0)]), "A".to_string()),
            (fv("b", &[("y", 1.0)]), "B".to_string()),
        ];
        let hp = Hyperparameters {
            epochs: 1,
            ..Default::default()
        };
        let (model, _) = train(&ex, &v, &cats(), &hp).unwrap();
        // "syn" never occurs, so it only shrinks from its prior
        let shrink = model.weights[0][2] / 0.75;
        assert!(shrink > 0.99 && shrink <= 1.0);
        assert!((model.weights[1][2] / 0.25 - shrink).abs() < 1e-12);

        let off = Hyperparameters {
            eq7_init: false,
            ..hp
        };
        let (model, _) = train(&ex, &v, &cats(), &off).unwrap();
        assert_eq!(model.weights[0][2], 0.0);
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[0.0f64, 0.0]), 0);
    }
}
