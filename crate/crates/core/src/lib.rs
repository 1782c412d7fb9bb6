//! Document classification with thesaurus-aware term weighting.
//!
//! The pipeline runs: [`preprocess`] (normalization, ZWNJ-aware tokenization,
//! stop words, stemming) → [`selection`] (tf-icf vocabulary) →
//! [`weighting`] (tf-idf plus semantic weights, thesaurus extension) →
//! [`classifier`] (one-vs-rest linear SVM) → [`evaluation`] (macro P/R/F1).
//!
//! Numerical code is generic over [`Scalar`]; the aliases below fix it to
//! `f64`, which is what the command-line tool uses.

pub mod classifier;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod model_io;
pub mod pipeline;
pub mod preprocess;
pub mod scalar;
pub mod selection;
pub mod synthetic;
pub mod thesaurus;
pub mod weighting;

pub use corpus::{CategorySet, CorpusFormat, Dataset, Document, LabeledDocument};
pub use error::{Error, ErrorKind, Result};
pub use scalar::Scalar;
pub use thesaurus::{SemanticSet, Thesaurus};

pub type FeatureVector = weighting::FeatureVector<f64>;
pub type FeatureVector32 = weighting::FeatureVector<f32>;
pub type LinearModel = classifier::LinearModel<f64>;
pub type LinearModel32 = classifier::LinearModel<f32>;
pub type Prediction = classifier::Prediction<f64>;
pub type EvalReport = evaluation::EvalReport<f64>;
pub type TrainedPipeline = pipeline::TrainedPipeline<f64>;
