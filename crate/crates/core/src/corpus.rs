//! Labeled document collections: loading, validation, serialization and
//! stratified splitting.

use std::collections::HashSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDocument {
    pub doc: Document,
    pub label: String,
}

impl LabeledDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            doc: Document::new(id, text),
            label: label.into(),
        }
    }
}

/// Ordered, duplicate-free list of category names.
///
/// The position of a category fixes its index everywhere downstream: weight
/// vector order in the model, confusion matrix rows, and prediction tie-breaks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategorySet(Vec<String>);

impl CategorySet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `name` unless already present; returns its index either way.
    pub fn insert(&mut self, name: &str) -> usize {
        match self.index_of(name) {
            Some(i) => i,
            None => {
                self.0.push(name.to_string());
                self.0.len() - 1
            }
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|c| c == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn get(&self, index: usize) -> Option<&str> {
        self.0.get(index).map(String::as_str)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }
}

impl<S: AsRef<str>> FromIterator<S> for CategorySet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut set = CategorySet::new();
        for name in iter {
            set.insert(name.as_ref());
        }
        set
    }
}

/// An immutable collection of labeled documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    documents: Vec<LabeledDocument>,
    categories: CategorySet,
}

impl Dataset {
    /// Builds a dataset, deriving categories in first-appearance order.
    ///
    /// Fails on empty or duplicate ids.
    pub fn new(documents: Vec<LabeledDocument>) -> Result<Self> {
        let categories = documents.iter().map(|d| d.label.as_str()).collect();
        Self::with_categories(documents, categories)
    }

    /// Builds a dataset with an explicit category order. Categories may have
    /// zero documents, but every label must be listed.
    pub fn with_categories(
        documents: Vec<LabeledDocument>,
        categories: CategorySet,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for (i, d) in documents.iter().enumerate() {
            if d.doc.id.is_empty() {
                return Err(Error::EmptyId { line: i + 1 });
            }
            if !seen.insert(d.doc.id.as_str()) {
                return Err(Error::DuplicateId {
                    id: d.doc.id.clone(),
                    line: i + 1,
                });
            }
            if !categories.contains(&d.label) {
                return Err(Error::UnknownCategory(d.label.clone()));
            }
        }
        Ok(Self {
            documents,
            categories,
        })
    }

    pub fn documents(&self) -> &[LabeledDocument] {
        &self.documents
    }

    pub fn categories(&self) -> &CategorySet {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Number of documents per category, in category order.
    pub fn category_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.categories.len()];
        for d in &self.documents {
            // labels are validated at construction
            counts[self.categories.index_of(&d.label).unwrap()] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusFormat {
    #[default]
    Jsonl,
    Directory,
}

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    text: String,
    label: String,
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Dataset> {
    let ds = match format {
        CorpusFormat::Jsonl => {
            let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_jsonl(&content)?
        }
        CorpusFormat::Directory => load_directory(path)?,
    };
    if ds.is_empty() {
        return Err(Error::EmptyCorpus(path.to_path_buf()));
    }
    Ok(ds)
}

/// Parses labeled jsonl text. Blank lines are skipped; line numbers in errors
/// are 1-based physical lines.
pub fn parse_jsonl(content: &str) -> Result<Dataset> {
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    let mut documents = Vec::new();
    let mut categories = CategorySet::new();
    let mut seen = HashSet::new();
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
            line: line_no,
            reason: e.to_string(),
        })?;
        if record.id.is_empty() {
            return Err(Error::EmptyId { line: line_no });
        }
        if !seen.insert(record.id.clone()) {
            return Err(Error::DuplicateId {
                id: record.id,
                line: line_no,
            });
        }
        categories.insert(&record.label);
        documents.push(LabeledDocument::new(record.id, record.text, record.label));
    }
    Dataset::with_categories(documents, categories)
}

fn load_directory(root: &Path) -> Result<Dataset> {
    let mut category_dirs = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        if entry.path().is_dir() {
            category_dirs.push(entry.path());
        }
    }
    category_dirs.sort();

    let mut documents = Vec::new();
    let mut categories = CategorySet::new();
    let mut seen = HashSet::new();
    for dir in category_dirs {
        let label = dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| {
                Error::Config(format!("non-UTF-8 category directory {}", dir.display()))
            })?
            .to_string();
        categories.insert(&label);

        let mut files = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let path = entry.map_err(|e| Error::io(&dir, e))?.path();
            if path.is_file() && path.extension().is_some_and(|x| x == "txt") {
                files.push(path);
            }
        }
        files.sort();
        for file in files {
            let id = file
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::Config(format!("non-UTF-8 file name {}", file.display())))?
                .to_string();
            let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateId {
                    id,
                    line: documents.len() + 1,
                });
            }
            documents.push(LabeledDocument::new(id, text, label.clone()));
        }
    }
    Dataset::with_categories(documents, categories)
}

/// Writes a dataset in the canonical jsonl format.
pub fn write_jsonl(ds: &Dataset, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for d in ds.documents() {
        let record = Record {
            id: d.doc.id.clone(),
            text: d.doc.text.clone(),
            label: d.label.clone(),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads unlabeled documents (`{"id", "text"}` per line). Blank lines are
/// skipped.
pub fn parse_documents_jsonl(content: &str) -> Result<Vec<Document>> {
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
            line: i + 1,
            reason: e.to_string(),
        })?;
        if doc.id.is_empty() {
            return Err(Error::EmptyId { line: i + 1 });
        }
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId {
                id: doc.id,
                line: i + 1,
            });
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Number of training documents a category of size `n` contributes.
pub fn train_count(train_fraction: f64, n: usize) -> usize {
    // the epsilon keeps products like 0.6 * 5 from rounding up past an integer
    let raw = (train_fraction * n as f64 - 1e-9).ceil();
    (raw.max(0.0) as usize).min(n)
}

/// Stratified split: each category sends `ceil(fraction * n_c)` shuffled
/// documents to the training half. Both halves keep the source document order
/// and the full category set.
pub fn split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidFraction(train_fraction));
    }
    if ds.is_empty() {
        return Err(Error::EmptyCorpus(Default::default()));
    }
    let counts = ds.category_counts();
    for (c, &n) in ds.categories().iter().zip(&counts) {
        if n < 2 {
            return Err(Error::CategoryTooSmall {
                category: c.to_string(),
                count: n,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; ds.len()];
    for category in ds.categories().iter() {
        let mut members: Vec<usize> = ds
            .documents()
            .iter()
            .enumerate()
            .filter(|(_, d)| d.label == category)
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        let k = train_count(train_fraction, members.len());
        for &i in &members[..k] {
            in_train[i] = true;
        }
    }

    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (d, &t) in ds.documents().iter().zip(&in_train) {
        if t {
            train.push(d.clone());
        } else {
            test.push(d.clone());
        }
    }
    Ok((
        Dataset::with_categories(train, ds.categories().clone())?,
        Dataset::with_categories(test, ds.categories().clone())?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n_per: usize) -> Dataset {
        let mut docs = Vec::new();
        for c in ["a", "b"] {
            for i in 0..n_per {
                docs.push(LabeledDocument::new(format!("{c}{i}"), "x", c));
            }
        }
        Dataset::new(docs).unwrap()
    }

    #[test]
    fn jsonl_categories_in_first_appearance_order() {
        let text = r#"{"id":"1","text":"goal","label":"sport"}
{"id":"2","text":"match","label":"sport"}
{"id":"3","text":"bank","label":"economy"}
"#;
        let ds = parse_jsonl(text).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.categories().as_slice(), ["sport", "economy"]);
    }

    #[test]
    fn duplicate_id_reports_line() {
        let text = [
            r#"{"id":"d0","text":"","label":"a"}"#,
            r#"{"id":"d1","text":"","label":"a"}"#,
            r#"{"id":"d2","text":"","label":"b"}"#,
            r#"{"id":"d3","text":"","label":"b"}"#,
            r#"{"id":"d1","text":"","label":"b"}"#,
        ]
        .join("\n");
        let err = parse_jsonl(&text).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::DuplicateId { line: 5, .. }));
        assert!(msg.contains("d1") && msg.contains("line 5"), "{msg}");
    }

    #[test]
    fn malformed_record_reports_line() {
        let text = "{\"id\":\"a\",\"text\":\"\",\"label\":\"x\"}\n{\"id\": 3}\n";
        assert!(matches!(
            parse_jsonl(text),
            Err(Error::MalformedRecord { line: 2, .. })
        ));
    }

    #[test]
    fn empty_text_is_allowed() {
        let ds = parse_jsonl(r#"{"id":"e","text":"","label":"x"}"#).unwrap();
        assert_eq!(ds.documents()[0].doc.text, "");
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.jsonl");
        fs::write(&p, "\n").unwrap();
        assert!(matches!(
            load_corpus(&p, CorpusFormat::Jsonl),
            Err(Error::EmptyCorpus(_))
        ));
    }

    #[test]
    fn split_is_stratified_and_seeded() {
        let ds = toy(5);
        let (train, test) = split(&ds, 0.6, 42).unwrap();
        assert_eq!(train.category_counts(), vec![3, 3]);
        assert_eq!(test.category_counts(), vec![2, 2]);
        let (train2, test2) = split(&ds, 0.6, 42).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);
    }

    #[test]
    fn ceiling_rule() {
        // 0.637 * 115 = 73.255
        assert_eq!(train_count(0.637, 115), 74);
        assert_eq!(115 - train_count(0.637, 115), 41);
        assert_eq!(train_count(0.6, 5), 3);
    }

    #[test]
    fn split_rejects_singleton_category() {
        let mut docs = toy(3).documents().to_vec();
        docs.push(LabeledDocument::new("lonely", "x", "c"));
        let ds = Dataset::new(docs).unwrap();
        match split(&ds, 0.5, 1) {
            Err(Error::CategoryTooSmall { category, count }) => {
                assert_eq!(category, "c");
                assert_eq!(count, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let ds = toy(3);
        assert!(matches!(split(&ds, 1.0, 0), Err(Error::InvalidFraction(_))));
        assert!(matches!(split(&ds, 0.0, 0), Err(Error::InvalidFraction(_))));
    }
}
