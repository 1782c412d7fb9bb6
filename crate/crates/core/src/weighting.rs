//! Document feature vectors.
//!
//! A vocabulary term present in a document gets
//!
//! ```text
//! weight = semantic(t, d) + cos_norm(tf(t, d) * log10(N / df(t)))
//! ```
//!
//! where `semantic(t, d)` sums, over every other distinct term `u` of the
//! document, the number of thesaurus relatives `t` and `u` share. Terms that
//! entered the vocabulary through the thesaurus additionally carry
//! per-category prior weights (see [`extension_weight`]) that the classifier
//! uses to initialize its weight vectors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::preprocess::{PreprocessConfig, Token};
use crate::scalar::Scalar;
use crate::selection::{Origin, StatsTable, TermStats, Vocabulary};
use crate::thesaurus::{similarity, SemanticSet, Thesaurus};

/// Sparse term → weight map for one document. Zero weights are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector<T> {
    pub doc_id: String,
    weights: BTreeMap<String, T>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new(doc_id: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            weights: BTreeMap::new(),
        }
    }

    /// Builds a vector from `(term, weight)` pairs, dropping zeros.
    pub fn from_weights<I, S>(doc_id: impl Into<String>, weights: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
    {
        let mut v = Self::new(doc_id);
        for (term, w) in weights {
            v.set(term, w);
        }
        v
    }

    pub fn set(&mut self, term: impl Into<String>, weight: T) {
        let term = term.into();
        if weight == T::zero() {
            self.weights.remove(&term);
        } else {
            self.weights.insert(term, weight);
        }
    }

    pub fn get(&self, term: &str) -> T {
        self.weights.get(term).copied().unwrap_or_else(T::zero)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, T)> {
        self.weights.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn norm(&self) -> T {
        self.weights.values().map(|&w| w * w).sum::<T>().sqrt()
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self::from_weights(
            self.doc_id.clone(),
            self.iter().map(|(t, w)| (t.to_string(), w * factor)),
        )
    }
}

/// Collection-level counts from the training documents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusIndex {
    pub n_docs: usize,
    pub doc_freq: BTreeMap<String, usize>,
    /// Token count of each document after preprocessing. Only the as-printed
    /// normalization variant could need it; kept for inspection.
    pub doc_lengths: BTreeMap<String, usize>,
}

impl CorpusIndex {
    pub fn build<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a [Token])>,
    {
        let mut index = CorpusIndex::default();
        for (id, tokens) in docs {
            index.n_docs += 1;
            index.doc_lengths.insert(id.to_string(), tokens.len());
            let distinct: BTreeSet<&str> = tokens.iter().map(Token::as_str).collect();
            for t in distinct {
                *index.doc_freq.entry(t.to_string()).or_default() += 1;
            }
        }
        index
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CosineNorm {
    /// Divide by the Euclidean norm.
    #[default]
    SumOfSquares,
    /// Divide by the square root of the plain sum of weights.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightingConfig {
    /// Add the thesaurus-derived semantic weight to the tf-idf weight.
    pub semantic: bool,
    /// Divide semantic weights by the document's largest semantic weight.
    pub scale_semantic: bool,
    /// Extend the vocabulary with thesaurus relatives of selected terms.
    pub extend_vectors: bool,
    pub cosine_norm: CosineNorm,
}

impl Default for WeightingConfig {
    fn default() -> Self {
        Self {
            semantic: true,
            scale_semantic: false,
            extend_vectors: true,
            cosine_norm: CosineNorm::SumOfSquares,
        }
    }
}

impl WeightingConfig {
    /// Plain tf-idf without any thesaurus involvement.
    pub fn baseline() -> Self {
        Self {
            semantic: false,
            extend_vectors: false,
            ..Self::default()
        }
    }

    pub fn needs_thesaurus(&self) -> bool {
        self.semantic || self.extend_vectors
    }
}

/// `tf * log10(N / df)`.
pub fn tf_idf<T: Scalar>(tf: usize, n_docs: usize, df: usize) -> Result<T> {
    if tf == 0 {
        return Ok(T::zero());
    }
    if df == 0 {
        return Err(Error::IndexInconsistency {
            term: String::new(),
        });
    }
    Ok(T::count(tf) * (T::count(n_docs) / T::count(df)).log10())
}

pub fn cosine_normalize<T: Scalar>(v: &FeatureVector<T>) -> FeatureVector<T> {
    normalize_vector(v, CosineNorm::SumOfSquares)
}

pub fn normalize_vector<T: Scalar>(v: &FeatureVector<T>, mode: CosineNorm) -> FeatureVector<T> {
    let denom = match mode {
        CosineNorm::SumOfSquares => v.norm(),
        CosineNorm::AsPrinted => v.iter().map(|(_, w)| w).sum::<T>().sqrt(),
    };
    if denom == T::zero() {
        return v.clone();
    }
    FeatureVector::from_weights(
        v.doc_id.clone(),
        v.iter().map(|(t, w)| (t.to_string(), w / denom)),
    )
}

/// Semantic weight of `term` within a document whose distinct terms are
/// `doc_terms`: the summed overlap between its semantic set and that of
/// every other distinct term.
pub fn semantic_weight(term: &str, doc_terms: &BTreeSet<String>, th: &Thesaurus) -> usize {
    let own = th.semantic_set(term);
    if own.is_empty() {
        return 0;
    }
    doc_terms
        .iter()
        .filter(|u| u.as_str() != term)
        .map(|u| similarity(&own, &th.semantic_set(u)))
        .sum()
}

/// Semantic weights of `targets` against all `doc_terms`, looking each
/// semantic set up once.
fn semantic_weights(
    targets: &[&str],
    doc_terms: &BTreeSet<&str>,
    th: &Thesaurus,
) -> BTreeMap<String, usize> {
    let sets: Vec<SemanticSet> = doc_terms
        .iter()
        .map(|t| th.semantic_set(t))
        .filter(|s| !s.is_empty())
        .collect();
    targets
        .iter()
        .map(|&term| {
            let weight = match sets.iter().find(|s| s.term == term) {
                Some(own) => sets
                    .iter()
                    .filter(|s| s.term != term)
                    .map(|s| similarity(own, s))
                    .sum(),
                None => 0,
            };
            (term.to_string(), weight)
        })
        .collect()
}

/// Sum of the semantic and normalized tf-idf weights. With `scale` set to
/// the document's largest semantic weight, the semantic part is divided by
/// it first (unless it is zero).
pub fn combined_weight<T: Scalar>(semantic: T, normalized_tfidf: T, scale: Option<T>) -> T {
    let semantic = match scale {
        Some(max) if max > T::zero() => semantic / max,
        _ => semantic,
    };
    semantic + normalized_tfidf
}

/// Per-category prior for a thesaurus-derived feature from its per-category
/// document counts: the share of each category, or `1 / |C|` everywhere when
/// the feature never occurs.
pub fn extension_weight<T: Scalar>(feature_doc_freq: &[usize], n_categories: usize) -> Vec<T> {
    let total: usize = feature_doc_freq.iter().sum();
    if total == 0 {
        let uniform = T::one() / T::count(n_categories);
        return vec![uniform; n_categories];
    }
    (0..n_categories)
        .map(|j| {
            let d = feature_doc_freq.get(j).copied().unwrap_or(0);
            T::count(d) / T::count(total)
        })
        .collect()
}

/// Appends, in lexicographic order, every semantic-set member of a corpus
/// term that is not already in the vocabulary. Appended terms carry their
/// training statistics (zero when they never occur in training).
pub fn extend_vocabulary(
    vocab: &Vocabulary,
    th: &Thesaurus,
    train_stats: &StatsTable,
    n_categories: usize,
) -> Vocabulary {
    let mut extra = BTreeSet::new();
    for (term, entry) in vocab.iter() {
        if entry.origin != Origin::Corpus {
            continue;
        }
        for member in th.semantic_set(term).members {
            if !vocab.contains(&member) {
                extra.insert(member);
            }
        }
    }
    let mut out = vocab.clone();
    for term in extra {
        let stats = train_stats
            .get(&term)
            .cloned()
            .unwrap_or_else(|| TermStats::empty(&term, n_categories));
        out.push(Origin::Thesaurus, stats);
    }
    out
}

/// Builds the weighted vector for a preprocessed document.
pub fn build_feature_vector<T: Scalar>(
    doc_id: &str,
    tokens: &[Token],
    vocab: &Vocabulary,
    index: &CorpusIndex,
    th: &Thesaurus,
    cfg: &WeightingConfig,
) -> Result<FeatureVector<T>> {
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let mut tf: BTreeMap<&str, usize> = BTreeMap::new();
    for t in tokens {
        *tf.entry(t.as_str()).or_default() += 1;
    }

    let mut raw = FeatureVector::<T>::new(doc_id);
    let mut features = Vec::new();
    for (&term, &count) in &tf {
        let Some(entry) = vocab.get(term) else {
            continue;
        };
        let df = match (index.doc_freq(term), entry.origin) {
            // a thesaurus feature unseen in training counts as maximally rare
            (0, Origin::Thesaurus) => 1,
            (0, Origin::Corpus) => {
                return Err(Error::IndexInconsistency {
                    term: term.to_string(),
                })
            }
            (df, _) => df,
        };
        features.push(term);
        raw.set(term, tf_idf::<T>(count, index.n_docs, df)?);
    }
    let tfidf = normalize_vector(&raw, cfg.cosine_norm);

    if !cfg.semantic {
        return Ok(tfidf);
    }

    let doc_terms: BTreeSet<&str> = tf.keys().copied().collect();
    let semantic = semantic_weights(&features, &doc_terms, th);
    let scale = cfg
        .scale_semantic
        .then(|| T::count(semantic.values().copied().max().unwrap_or(0)));

    let mut out = FeatureVector::new(doc_id);
    for term in features {
        let w = combined_weight(T::count(semantic[term]), tfidf.get(term), scale);
        out.set(term, w);
    }
    Ok(out)
}

/// Preprocessing plus weighting, bundled for vectorizing raw documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vectorizer {
    pub preprocess: PreprocessConfig,
    pub weighting: WeightingConfig,
    pub vocabulary: Vocabulary,
    pub index: CorpusIndex,
    pub thesaurus: Thesaurus,
}

impl Vectorizer {
    pub fn vectorize<T: Scalar>(&self, doc: &Document) -> Result<FeatureVector<T>> {
        let tokens = self.preprocess.process(&doc.text);
        self.vectorize_tokens(&doc.id, &tokens)
    }

    pub fn vectorize_tokens<T: Scalar>(
        &self,
        doc_id: &str,
        tokens: &[Token],
    ) -> Result<FeatureVector<T>> {
        build_feature_vector(
            doc_id,
            tokens,
            &self.vocabulary,
            &self.index,
            &self.thesaurus,
            &self.weighting,
        )
    }

    /// Per-category prior weights for every thesaurus-origin feature, by
    /// feature index.
    pub fn extension_priors<T: Scalar>(&self, n_categories: usize) -> Vec<(usize, Vec<T>)> {
        self.vocabulary
            .iter()
            .enumerate()
            .filter(|(_, (_, e))| e.origin == Origin::Thesaurus)
            .map(|(i, (_, e))| (i, extension_weight(&e.stats.doc_count, n_categories)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::tokenize;

    fn th(lines: &str) -> Thesaurus {
        crate::thesaurus::parse_thesaurus(lines, &Default::default()).unwrap()
    }

    fn terms(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn idf_vanishes_for_ubiquitous_terms() {
        assert_eq!(tf_idf::<f64>(7, 4, 4).unwrap(), 0.0);
        assert_eq!(tf_idf::<f64>(0, 4, 0).unwrap(), 0.0);
        let v: f64 = tf_idf(3, 4, 2).unwrap();
        assert!((v - 0.9030899869919435).abs() < 1e-12);
        assert!(tf_idf::<f64>(1, 4, 0).is_err());
    }

    #[test]
    fn cosine_normalization() {
        let v = FeatureVector::from_weights("d", [("a", 7.0f64)]);
        assert_eq!(cosine_normalize(&v).get("a"), 1.0);
        let v = FeatureVector::from_weights("d", [("a", 3.0f64), ("b", 4.0)]);
        let n = cosine_normalize(&v);
        assert!((n.get("a") - 0.6).abs() < 1e-15 && (n.get("b") - 0.8).abs() < 1e-15);
        let z = FeatureVector::<f64>::new("z");
        assert_eq!(cosine_normalize(&z), z);
    }

    #[test]
    fn as_printed_normalization() {
        let v = FeatureVector::from_weights("d", [("a", 1.0f64), ("b", 3.0)]);
        let n = normalize_vector(&v, CosineNorm::AsPrinted);
        assert_eq!(n.get("a"), 0.5);
        assert_eq!(n.get("b"), 1.5);
    }

    #[test]
    fn semantic_weight_cases() {
        let t = th("t1\ta,b\nt2\tb,c\nt3\ta,b,d\n");
        assert_eq!(semantic_weight("t1", &terms(&["t1"]), &t), 0);
        assert_eq!(semantic_weight("zz", &terms(&["zz", "t1"]), &t), 0);
        assert_eq!(semantic_weight("t1", &terms(&["t1", "t2", "t3"]), &t), 3);
    }

    #[test]
    fn combined_weight_cases() {
        assert_eq!(combined_weight(0.0f64, 0.6, None), 0.6);
        assert!((combined_weight(3.0f64, 0.6, None) - 3.6).abs() < 1e-15);
        assert!((combined_weight(3.0f64, 0.6, Some(6.0)) - 1.1).abs() < 1e-15);
        assert_eq!(combined_weight(0.0f64, 0.6, Some(0.0)), 0.6);
    }

    #[test]
    fn extension_weight_cases() {
        let w: Vec<f64> = extension_weight(&[0; 6], 6);
        assert!(w.iter().all(|&x| x == 1.0 / 6.0));
        assert_eq!(extension_weight::<f64>(&[3, 1], 2), vec![0.75, 0.25]);
        assert_eq!(extension_weight::<f64>(&[5, 0], 2), vec![1.0, 0.0]);
    }

    fn one_term_vocab(terms: &[&str]) -> Vocabulary {
        let mut v = Vocabulary::new();
        for t in terms {
            v.push(Origin::Corpus, TermStats::empty(t, 2));
        }
        v
    }

    #[test]
    fn extend_vocabulary_cases() {
        let vocab = one_term_vocab(&["ball"]);
        let stats = StatsTable::new();
        assert_eq!(
            extend_vocabulary(&vocab, &Thesaurus::new(), &stats, 2),
            vocab
        );

        let t = th("ball\tsphere,globe\n");
        let ext = extend_vocabulary(&vocab, &t, &stats, 2);
        assert_eq!(ext.terms().collect::<Vec<_>>(), ["ball", "globe", "sphere"]);
        assert_eq!(ext.origin("sphere"), Some(Origin::Thesaurus));

        let vocab2 = one_term_vocab(&["ball", "sphere"]);
        let ext2 = extend_vocabulary(&vocab2, &t, &stats, 2);
        assert_eq!(ext2.len(), 3);
        assert_eq!(ext2.origin("sphere"), Some(Origin::Corpus));
    }

    #[test]
    fn empty_document_gives_empty_vector() {
        let vocab = one_term_vocab(&["ball"]);
        let index = CorpusIndex::default();
        let v: FeatureVector<f64> = build_feature_vector(
            "e",
            &[],
            &vocab,
            &index,
            &Thesaurus::new(),
            &WeightingConfig::default(),
        )
        .unwrap();
        assert!(v.is_empty());
        assert!(matches!(
            build_feature_vector::<f64>(
                "e",
                &[],
                &Vocabulary::new(),
                &index,
                &Thesaurus::new(),
                &WeightingConfig::default()
            ),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn unseen_thesaurus_feature_uses_df_one() {
        let mut vocab = one_term_vocab(&["ball"]);
        vocab.push(Origin::Thesaurus, TermStats::empty("globe", 2));
        let train = [
            tokenize("ball x"),
            tokenize("y"),
            tokenize("z"),
            tokenize("w"),
        ];
        let index = CorpusIndex::build(
            train
                .iter()
                .enumerate()
                .map(|(i, t)| (["a", "b", "c", "d"][i], t.as_slice())),
        );
        let v: FeatureVector<f64> = build_feature_vector(
            "t",
            &tokenize("globe"),
            &vocab,
            &index,
            &Thesaurus::new(),
            &WeightingConfig::baseline(),
        )
        .unwrap();
        assert_eq!(v.get("globe"), 1.0);
    }
}
