//! Thesaurus loading, semantic sets and set-overlap similarity.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{normalize_with, Normalization};

/// Headword → related words. All strings are stored normalized.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Thesaurus {
    entries: BTreeMap<String, BTreeSet<String>>,
}

/// The related words of a term, never including the term itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticSet {
    pub term: String,
    pub members: BTreeSet<String>,
}

impl SemanticSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl Thesaurus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds relations for `headword`, merging with any existing entry. Inputs
    /// are expected to be normalized already.
    pub fn insert<I, S>(&mut self, headword: &str, related: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.entries
            .entry(headword.to_string())
            .or_default()
            .extend(related.into_iter().map(Into::into));
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Raw stored relations, as loaded.
    pub fn related(&self, headword: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(headword)
    }

    pub fn headwords(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn semantic_set(&self, term: &str) -> SemanticSet {
        let members = self
            .entries
            .get(term)
            .map(|rel| rel.iter().filter(|w| *w != term).cloned().collect())
            .unwrap_or_default();
        SemanticSet {
            term: term.to_string(),
            members,
        }
    }

    /// Closes the relation: whenever `a` lists `b`, `b` also lists `a`.
    pub fn symmetrize(&self) -> Thesaurus {
        let mut out = self.clone();
        for (head, related) in &self.entries {
            for r in related {
                if r != head {
                    out.entries
                        .entry(r.clone())
                        .or_default()
                        .insert(head.clone());
                }
            }
        }
        out
    }
}

/// Number of words the two sets share.
pub fn similarity(a: &SemanticSet, b: &SemanticSet) -> usize {
    let (small, large) = if a.members.len() <= b.members.len() {
        (&a.members, &b.members)
    } else {
        (&b.members, &a.members)
    };
    small.iter().filter(|w| large.contains(*w)).count()
}

/// Parses `headword<TAB>related1,related2,...` lines. `#` lines are comments,
/// blank lines are skipped, and repeated headwords are merged.
pub fn parse_thesaurus(content: &str, norm: &Normalization) -> Result<Thesaurus> {
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    let mut th = Thesaurus::new();
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (head, rest) = line
            .split_once('\t')
            .ok_or_else(|| Error::MalformedThesaurus {
                line: line_no,
                reason: "expected headword<TAB>related words".into(),
            })?;
        let head = normalize_with(head.trim(), norm);
        if head.is_empty() {
            return Err(Error::MalformedThesaurus {
                line: line_no,
                reason: "empty headword".into(),
            });
        }
        let related: Vec<String> = rest
            .split(',')
            .map(|w| normalize_with(w.trim(), norm))
            .filter(|w| !w.is_empty())
            .collect();
        th.insert(&head, related);
    }
    Ok(th)
}

pub fn load_thesaurus(path: &Path, norm: &Normalization) -> Result<Thesaurus> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_thesaurus(&content, norm)
}
