//! End-to-end training and evaluation: preprocess, select, index, extend,
//! vectorize, train.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{train, Hyperparameters, LinearModel, Prediction, TrainingLog};
use crate::corpus::{Dataset, Document};
use crate::error::{Error, Result};
use crate::evaluation::{confusion, macro_report, test_set_fingerprint, EvalReport};
use crate::model_io;
use crate::preprocess::{PreprocessConfig, Token};
use crate::scalar::Scalar;
use crate::selection::{collect_stats_from_tokens, select_terms, IcfMode, Origin};
use crate::thesaurus::Thesaurus;
use crate::weighting::{
    extend_vocabulary, CorpusIndex, FeatureVector, Vectorizer, WeightingConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PipelineConfig {
    pub preprocess: PreprocessConfig,
    pub icf_mode: IcfMode,
    /// Overrides the default `5 / log10(|C|)` selection threshold.
    pub selection_threshold: Option<f64>,
    pub weighting: WeightingConfig,
    pub hyperparameters: Hyperparameters,
    /// Close the thesaurus relation before use.
    pub symmetrize_thesaurus: bool,
}

/// Everything needed to classify raw documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedPipeline<T> {
    pub vectorizer: Vectorizer,
    pub model: LinearModel<T>,
    /// Opaque description of the run that produced this pipeline.
    pub run_config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSummary {
    pub vocabulary_size: usize,
    pub thesaurus_features: usize,
    pub log: TrainingLog,
}

pub const PIPELINE_KIND: &str = "pipeline";

fn tokenize_all(ds: &Dataset, cfg: &PreprocessConfig) -> Vec<Vec<Token>> {
    ds.documents()
        .par_iter()
        .map(|d| cfg.process(&d.doc.text))
        .collect()
}

/// Trains on `train`. A thesaurus is required when semantic weighting or
/// vector extension is enabled; this is checked before any work is done.
pub fn train_pipeline<T: Scalar>(
    train_set: &Dataset,
    thesaurus: Option<&Thesaurus>,
    cfg: &PipelineConfig,
) -> Result<(TrainedPipeline<T>, TrainingSummary)> {
    if cfg.weighting.needs_thesaurus() && thesaurus.is_none() {
        return Err(Error::Config(
            "a thesaurus is required when semantic weighting or vector extension is enabled".into(),
        ));
    }
    let categories = train_set.categories();
    if categories.len() < 2 {
        return Err(Error::TooFewCategories(categories.len()));
    }
    if train_set.is_empty() {
        return Err(Error::NoTrainingData);
    }

    let th = match thesaurus {
        Some(t) if cfg.symmetrize_thesaurus => t.symmetrize(),
        Some(t) => t.clone(),
        None => Thesaurus::new(),
    };

    let tokens = tokenize_all(train_set, &cfg.preprocess);
    let labeled: Vec<(Vec<Token>, usize)> = tokens
        .iter()
        .zip(train_set.documents())
        .map(|(t, d)| {
            (
                t.clone(),
                categories.index_of(&d.label).expect("validated label"),
            )
        })
        .collect();
    let stats = collect_stats_from_tokens(&labeled, categories.len());
    let mut vocab = select_terms::<T>(
        &stats,
        categories,
        cfg.icf_mode,
        cfg.selection_threshold.map(T::lit),
    )?;
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    if cfg.weighting.extend_vectors {
        vocab = extend_vocabulary(&vocab, &th, &stats, categories.len());
    }
    let index = CorpusIndex::build(
        train_set
            .documents()
            .iter()
            .zip(&tokens)
            .map(|(d, t)| (d.doc.id.as_str(), t.as_slice())),
    );
    let vectorizer = Vectorizer {
        preprocess: cfg.preprocess.clone(),
        weighting: cfg.weighting,
        vocabulary: vocab,
        index,
        thesaurus: if cfg.weighting.semantic {
            th
        } else {
            Thesaurus::new()
        },
    };

    let examples: Vec<(FeatureVector<T>, String)> = train_set
        .documents()
        .par_iter()
        .zip(&tokens)
        .map(|(d, t)| Ok((vectorizer.vectorize_tokens(&d.doc.id, t)?, d.label.clone())))
        .collect::<Result<_>>()?;

    let (model, log) = train(
        &examples,
        &vectorizer.vocabulary,
        categories,
        &cfg.hyperparameters,
    )?;
    let summary = TrainingSummary {
        vocabulary_size: vectorizer.vocabulary.len(),
        thesaurus_features: vectorizer.vocabulary.count_origin(Origin::Thesaurus),
        log,
    };
    Ok((
        TrainedPipeline {
            vectorizer,
            model,
            run_config: serde_json::Value::Null,
        },
        summary,
    ))
}

/// A prediction plus whether the document had no in-vocabulary terms.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentPrediction<T> {
    pub prediction: Prediction<T>,
    pub oov: bool,
}

impl<T: Scalar> TrainedPipeline<T> {
    pub fn vectorize(&self, doc: &Document) -> Result<FeatureVector<T>> {
        self.vectorizer.vectorize(doc)
    }

    pub fn predict(&self, doc: &Document) -> Result<DocumentPrediction<T>> {
        let v = self.vectorize(doc)?;
        Ok(DocumentPrediction {
            oov: v.is_empty(),
            prediction: self.model.predict(&v),
        })
    }

    pub fn predict_all(&self, docs: &[Document]) -> Result<Vec<DocumentPrediction<T>>> {
        docs.par_iter().map(|d| self.predict(d)).collect()
    }

    /// Predicts every document of `test` and scores the result. Labels not
    /// known to the model are rejected before prediction.
    pub fn evaluate(&self, test: &Dataset, config_label: &str) -> Result<EvalReport<T>> {
        for d in test.documents() {
            if !self.model.categories.contains(&d.label) {
                return Err(Error::UnknownCategory(d.label.clone()));
            }
        }
        let docs: Vec<Document> = test.documents().iter().map(|d| d.doc.clone()).collect();
        let predicted: Vec<String> = self
            .predict_all(&docs)?
            .into_iter()
            .map(|p| p.prediction.label)
            .collect();
        let gold: Vec<&str> = test.documents().iter().map(|d| d.label.as_str()).collect();
        let ids: Vec<&str> = docs.iter().map(|d| d.id.as_str()).collect();
        let pred: Vec<&str> = predicted.iter().map(String::as_str).collect();
        let counts = confusion(&gold, &pred, &self.model.categories)?;
        Ok(macro_report(&counts, config_label).with_test_set(test_set_fingerprint(&ids, &gold)))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        model_io::save(PIPELINE_KIND, self, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        model_io::load(PIPELINE_KIND, path)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        model_io::encode(PIPELINE_KIND, self)
    }
}

/// The three ablation configurations, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ablation {
    /// tf-idf weights, corpus vocabulary only.
    TfIdf,
    /// tf-idf weights over the thesaurus-extended vocabulary.
    TfIdfExtension,
    /// Semantic plus tf-idf weights over the extended vocabulary.
    Proposed,
}

impl Ablation {
    pub const ALL: [Ablation; 3] = [
        Ablation::TfIdf,
        Ablation::TfIdfExtension,
        Ablation::Proposed,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Ablation::TfIdf => "tf-idf",
            Ablation::TfIdfExtension => "tf-idf + extension",
            Ablation::Proposed => "proposed",
        }
    }

    /// `base` with the weighting switches this configuration fixes.
    pub fn apply(self, base: &PipelineConfig) -> PipelineConfig {
        let mut cfg = base.clone();
        let (semantic, extend) = match self {
            Ablation::TfIdf => (false, false),
            Ablation::TfIdfExtension => (false, true),
            Ablation::Proposed => (true, true),
        };
        cfg.weighting.semantic = semantic;
        cfg.weighting.extend_vectors = extend;
        cfg
    }
}

/// Trains and evaluates each configuration on the same split.
pub fn run_ablation<T: Scalar>(
    train_set: &Dataset,
    test_set: &Dataset,
    thesaurus: Option<&Thesaurus>,
    base: &PipelineConfig,
    configs: &[Ablation],
) -> Result<Vec<EvalReport<T>>> {
    configs
        .iter()
        .map(|&a| {
            let (pipeline, _) = train_pipeline::<T>(train_set, thesaurus, &a.apply(base))?;
            pipeline.evaluate(test_set, a.label())
        })
        .collect()
}
