//! Per-category term statistics, tf-icf scoring and vocabulary selection.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CategorySet, Dataset};
use crate::error::{Error, Result};
use crate::preprocess::{PreprocessConfig, Token};
use crate::scalar::Scalar;

/// Occurrence statistics of one term, indexed by category position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermStats {
    pub term: String,
    /// Total occurrences of the term in each category.
    pub term_count: Vec<usize>,
    /// Number of documents of each category containing the term.
    pub doc_count: Vec<usize>,
}

impl TermStats {
    pub fn empty(term: &str, n_categories: usize) -> Self {
        Self {
            term: term.to_string(),
            term_count: vec![0; n_categories],
            doc_count: vec![0; n_categories],
        }
    }

    /// Number of categories with at least one document containing the term.
    pub fn category_frequency(&self) -> usize {
        self.doc_count.iter().filter(|&&d| d > 0).count()
    }

    pub fn total_doc_count(&self) -> usize {
        self.doc_count.iter().sum()
    }

    fn merge(&mut self, other: &TermStats) {
        for (a, b) in self.term_count.iter_mut().zip(&other.term_count) {
            *a += b;
        }
        for (a, b) in self.doc_count.iter_mut().zip(&other.doc_count) {
            *a += b;
        }
    }
}

pub type StatsTable = BTreeMap<String, TermStats>;

/// Inverse-category-frequency variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IcfMode {
    /// `t_ij * log10(|C| / cf_i)`, with `cf_i` the number of categories the
    /// term occurs in.
    #[default]
    CategoryCount,
    /// `t_ij * log10(sum_j d_ij / d_ij)`, zero where `d_ij = 0`.
    DocRatio,
}

/// Counts term and document occurrences over already-preprocessed documents.
/// `docs` pairs each token list with its category index.
pub fn collect_stats_from_tokens(docs: &[(Vec<Token>, usize)], n_categories: usize) -> StatsTable {
    docs.par_iter()
        .fold(StatsTable::new, |mut acc, (tokens, cat)| {
            let mut per_doc: BTreeMap<&str, usize> = BTreeMap::new();
            for t in tokens {
                *per_doc.entry(t.as_str()).or_default() += 1;
            }
            for (term, count) in per_doc {
                let entry = acc
                    .entry(term.to_string())
                    .or_insert_with(|| TermStats::empty(term, n_categories));
                entry.term_count[*cat] += count;
                entry.doc_count[*cat] += 1;
            }
            acc
        })
        .reduce(StatsTable::new, |mut a, b| {
            for (term, stats) in b {
                match a.get_mut(&term) {
                    Some(existing) => existing.merge(&stats),
                    None => {
                        a.insert(term, stats);
                    }
                }
            }
            a
        })
}

pub fn collect_stats(ds: &Dataset, cfg: &PreprocessConfig) -> StatsTable {
    let docs: Vec<(Vec<Token>, usize)> = ds
        .documents()
        .par_iter()
        .map(|d| {
            let cat = ds.categories().index_of(&d.label).expect("validated label");
            (cfg.process(&d.doc.text), cat)
        })
        .collect();
    collect_stats_from_tokens(&docs, ds.categories().len())
}

/// tf-icf score of a term for the category at `category` (an index into the
/// category order the statistics were collected with).
pub fn tf_icf<T: Scalar>(stats: &TermStats, category: usize, mode: IcfMode) -> Result<T> {
    let t = *stats
        .term_count
        .get(category)
        .ok_or_else(|| Error::CategoryNotInStats(format!("#{category}")))?;
    let d = stats.doc_count[category];
    if t == 0 || d == 0 {
        return Ok(T::zero());
    }
    let icf = match mode {
        IcfMode::CategoryCount => {
            let n_categories = T::count(stats.doc_count.len());
            (n_categories / T::count(stats.category_frequency())).log10()
        }
        IcfMode::DocRatio => (T::count(stats.total_doc_count()) / T::count(d)).log10(),
    };
    Ok(T::count(t) * icf)
}

/// Highest tf-icf score over all categories.
pub fn max_tf_icf<T: Scalar>(stats: &TermStats, mode: IcfMode) -> T {
    (0..stats.term_count.len())
        .map(|c| tf_icf(stats, c, mode).expect("index in range"))
        .fold(T::zero(), T::max)
}

/// Default selection threshold `5 / log10(|C|)`.
pub fn default_threshold<T: Scalar>(n_categories: usize) -> Result<T> {
    if n_categories < 2 {
        return Err(Error::TooFewCategories(n_categories));
    }
    Ok(T::lit(5.0) / T::count(n_categories).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Corpus,
    Thesaurus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub origin: Origin,
    pub stats: TermStats,
}

/// The shared feature space: selected corpus terms followed by any terms
/// added from the thesaurus. A term's position is its feature index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    entries: IndexMap<String, VocabEntry>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a term; returns false (and changes nothing) if already present.
    pub fn push(&mut self, origin: Origin, stats: TermStats) -> bool {
        if self.entries.contains_key(&stats.term) {
            return false;
        }
        self.entries
            .insert(stats.term.clone(), VocabEntry { origin, stats });
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.entries.contains_key(term)
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.entries.get_index_of(term)
    }

    pub fn get(&self, term: &str) -> Option<&VocabEntry> {
        self.entries.get(term)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &VocabEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn origin(&self, term: &str) -> Option<Origin> {
        self.entries.get(term).map(|e| e.origin)
    }

    pub fn count_origin(&self, origin: Origin) -> usize {
        self.entries.values().filter(|e| e.origin == origin).count()
    }
}

/// Keeps every term whose best per-category tf-icf reaches the threshold
/// (inclusive). `threshold` overrides the default `5 / log10(|C|)`.
///
/// Output order: descending best score, ties by term.
pub fn select_terms<T: Scalar>(
    stats: &StatsTable,
    categories: &CategorySet,
    mode: IcfMode,
    threshold: Option<T>,
) -> Result<Vocabulary> {
    let default = default_threshold::<T>(categories.len())?;
    let theta = threshold.unwrap_or(default);

    let mut scored: Vec<(T, &TermStats)> = stats
        .values()
        .map(|s| (max_tf_icf::<T>(s, mode), s))
        .filter(|(score, _)| *score >= theta)
        .collect();
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.1.term.cmp(&b.1.term))
    });

    let mut vocab = Vocabulary::new();
    for (_, s) in scored {
        vocab.push(Origin::Corpus, s.clone());
    }
    Ok(vocab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LabeledDocument;

    fn stats(term: &str, t: &[usize], d: &[usize]) -> TermStats {
        TermStats {
            term: term.into(),
            term_count: t.to_vec(),
            doc_count: d.to_vec(),
        }
    }

    #[test]
    fn counts_occurrences_and_documents() {
        let ds = Dataset::new(vec![
            LabeledDocument::new("1", "ball ball goal", "sport"),
            LabeledDocument::new("2", "goal", "sport"),
            LabeledDocument::new("3", "bank", "economy"),
        ])
        .unwrap();
        let table = collect_stats(&ds, &PreprocessConfig::default());
        assert_eq!(table["ball"].term_count, [2, 0]);
        assert_eq!(table["ball"].doc_count, [1, 0]);
        assert_eq!(table["goal"].term_count, [2, 0]);
        assert_eq!(table["goal"].doc_count, [2, 0]);
        assert_eq!(table["bank"].doc_count, [0, 1]);
    }

    #[test]
    fn term_everywhere_scores_zero() {
        let s = stats("x", &[3, 4, 5], &[1, 2, 3]);
        for c in 0..3 {
            assert_eq!(tf_icf::<f64>(&s, c, IcfMode::CategoryCount).unwrap(), 0.0);
        }
    }

    #[test]
    fn exclusive_term_category_count() {
        let s = stats("x", &[10, 0, 0, 0], &[4, 0, 0, 0]);
        let v: f64 = tf_icf(&s, 0, IcfMode::CategoryCount).unwrap();
        assert!((v - 6.020599913279624).abs() < 1e-12);
    }

    #[test]
    fn doc_ratio_as_printed() {
        let s = stats("x", &[5, 3], &[2, 2]);
        let v: f64 = tf_icf(&s, 0, IcfMode::DocRatio).unwrap();
        assert!((v - 1.505149978319906).abs() < 1e-12);
        // exclusive term scores zero under the printed formula
        let e = stats("y", &[5, 0], &[2, 0]);
        assert_eq!(tf_icf::<f64>(&e, 0, IcfMode::DocRatio).unwrap(), 0.0);
    }

    #[test]
    fn unknown_category_index() {
        let s = stats("x", &[1, 0], &[1, 0]);
        assert!(tf_icf::<f64>(&s, 2, IcfMode::CategoryCount).is_err());
    }

    #[test]
    fn threshold_for_six_categories() {
        let theta: f64 = default_threshold(6).unwrap();
        assert!((theta - 6.425486044692343).abs() < 1e-12);
        assert!(matches!(
            default_threshold::<f64>(1),
            Err(Error::TooFewCategories(1))
        ));
    }

    #[test]
    fn boundary_score_is_selected() {
        // 10 categories: theta = 5, an exclusive term scores t * 1
        let cats: CategorySet = (0..10).map(|i| format!("c{i}")).collect();
        let mut table = StatsTable::new();
        let mut t = vec![0; 10];
        let mut d = vec![0; 10];
        t[0] = 5;
        d[0] = 1;
        table.insert("edge".into(), stats("edge", &t, &d));
        t[0] = 4;
        table.insert("below".into(), stats("below", &t, &d));
        let vocab = select_terms::<f64>(&table, &cats, IcfMode::CategoryCount, None).unwrap();
        assert!(vocab.contains("edge"));
        assert!(!vocab.contains("below"));
    }

    #[test]
    fn single_category_is_rejected() {
        let cats: CategorySet = ["only"].into_iter().collect();
        assert!(
            select_terms::<f64>(&StatsTable::new(), &cats, IcfMode::CategoryCount, None).is_err()
        );
    }

    #[test]
    fn ordering_by_score_then_term() {
        let cats: CategorySet = ["a", "b"].into_iter().collect();
        let mut table = StatsTable::new();
        table.insert("zeta".into(), stats("zeta", &[60, 0], &[3, 0]));
        table.insert("alpha".into(), stats("alpha", &[60, 0], &[3, 0]));
        table.insert("top".into(), stats("top", &[0, 90], &[0, 5]));
        let vocab = select_terms::<f64>(&table, &cats, IcfMode::CategoryCount, None).unwrap();
        assert_eq!(vocab.terms().collect::<Vec<_>>(), ["top", "alpha", "zeta"]);
    }
}
