//! Text normalization, tokenization with half-space (ZWNJ) handling, stop-word
//! removal and light suffix stemming.
//!
//! Persian separates words with an ordinary space but joins the morphemes of
//! a single word with a zero-width non-joiner (U+200C). The tokenizer treats
//! whitespace, punctuation and symbols as word boundaries and keeps a ZWNJ
//! that sits between two word characters inside the token.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Canonical half-space joiner.
pub const ZWNJ: char = '\u{200C}';

const ARABIC_YEH: char = '\u{064A}';
const PERSIAN_YEH: char = '\u{06CC}';
const ARABIC_KAF: char = '\u{0643}';
const PERSIAN_KAF: char = '\u{06A9}';

/// Codepoints that show up in place of a real ZWNJ in the wild: zero-width
/// space, soft hyphen and the BOM used as a zero-width no-break space.
pub const DEFAULT_JOINER_SURROGATES: [char; 3] = ['\u{200B}', '\u{00AD}', '\u{FEFF}'];

pub const DEFAULT_SUFFIX_TABLE: &str = include_str!("../resources/suffixes.txt");
pub const DEFAULT_STOPWORDS: &str = include_str!("../resources/stopwords.txt");

/// A normalized, non-empty word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Token(String);

impl Token {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stemmer {
    #[default]
    None,
    LightSuffix,
}

/// Character folding applied by [`normalize_with`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    /// Extra codepoint substitutions, applied after the built-in Yeh/Kaf folds.
    #[serde(default)]
    pub char_map: Vec<(char, char)>,
    /// Codepoints folded into the canonical ZWNJ.
    #[serde(default = "default_surrogates")]
    pub joiner_surrogates: Vec<char>,
}

fn default_surrogates() -> Vec<char> {
    DEFAULT_JOINER_SURROGATES.to_vec()
}

impl Default for Normalization {
    fn default() -> Self {
        Self {
            char_map: Vec::new(),
            joiner_surrogates: default_surrogates(),
        }
    }
}

impl Normalization {
    fn map_char(&self, c: char) -> char {
        let c = match c {
            ARABIC_YEH => PERSIAN_YEH,
            ARABIC_KAF => PERSIAN_KAF,
            other => other,
        };
        let c = self
            .char_map
            .iter()
            .find(|(from, _)| *from == c)
            .map_or(c, |&(_, to)| to);
        if self.joiner_surrogates.contains(&c) {
            ZWNJ
        } else {
            c
        }
    }
}

/// Normalizes with the default folding table.
pub fn normalize(text: &str) -> String {
    normalize_with(text, &Normalization::default())
}

/// NFC, Persian letter folding, half-space canonicalization, lowercasing and
/// whitespace collapsing. Runs of joiners collapse to a single ZWNJ.
pub fn normalize_with(text: &str, norm: &Normalization) -> String {
    let mut folded = String::with_capacity(text.len());
    for c in text.nfc() {
        let c = norm.map_char(c);
        if c.is_uppercase() {
            folded.extend(c.to_lowercase());
        } else {
            folded.push(c);
        }
    }
    // folding and lowercasing can produce new composable sequences
    let recomposed: String = folded.nfc().collect();

    let mut out = String::with_capacity(recomposed.len());
    let mut prev: Option<char> = None;
    for c in recomposed.chars() {
        // folding ran before recomposition, so run it again on anything NFC produced
        let c = norm.map_char(c);
        let c = if c.is_whitespace() { ' ' } else { c };
        if (c == ' ' || c == ZWNJ) && prev == Some(c) {
            continue;
        }
        out.push(c);
        prev = Some(c);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Word,
    Joiner,
    Boundary,
}

fn classify(c: char, strip_digits: bool) -> CharClass {
    use GeneralCategory::*;
    if c == ZWNJ {
        return CharClass::Joiner;
    }
    match get_general_category(c) {
        UppercaseLetter | LowercaseLetter | TitlecaseLetter | ModifierLetter | OtherLetter
        | NonspacingMark | SpacingMark | EnclosingMark | LetterNumber | OtherNumber => {
            CharClass::Word
        }
        DecimalNumber if !strip_digits => CharClass::Word,
        _ => CharClass::Boundary,
    }
}

/// Splits normalized text into tokens. Digits are kept.
pub fn tokenize(text: &str) -> Vec<Token> {
    tokenize_with(text, false)
}

/// Splits normalized text into tokens. With `strip_digits`, decimal digits act
/// as boundaries and never appear in tokens.
pub fn tokenize_with(text: &str, strip_digits: bool) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut pending_joiner = false;
    for c in text.chars() {
        match classify(c, strip_digits) {
            CharClass::Word => {
                if pending_joiner {
                    current.push(ZWNJ);
                    pending_joiner = false;
                }
                current.push(c);
            }
            CharClass::Joiner => pending_joiner = !current.is_empty(),
            CharClass::Boundary => {
                pending_joiner = false;
                if !current.is_empty() {
                    tokens.push(Token(std::mem::take(&mut current)));
                }
            }
        }
    }
    if !current.is_empty() {
        tokens.push(Token(current));
    }
    tokens
}

/// Preprocessing options. Stop words and suffixes are stored normalized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    #[serde(default)]
    pub stopwords: BTreeSet<String>,
    #[serde(default)]
    pub stemmer: Stemmer,
    /// Suffix table for [`Stemmer::LightSuffix`], in priority order.
    #[serde(default = "default_suffixes")]
    pub suffixes: Vec<String>,
    #[serde(default)]
    pub strip_digits: bool,
    #[serde(default)]
    pub normalization: Normalization,
}

fn default_suffixes() -> Vec<String> {
    parse_word_list(DEFAULT_SUFFIX_TABLE, &Normalization::default())
        .expect("bundled suffix table parses")
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            stopwords: BTreeSet::new(),
            stemmer: Stemmer::None,
            suffixes: default_suffixes(),
            strip_digits: false,
            normalization: Normalization::default(),
        }
    }
}

impl PreprocessConfig {
    /// Replaces the stop-word set, normalizing each entry.
    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stopwords = words
            .into_iter()
            .map(|w| normalize_with(w.as_ref(), &self.normalization))
            .filter(|w| !w.is_empty())
            .collect();
        self
    }

    pub fn with_stemmer(mut self, stemmer: Stemmer) -> Self {
        self.stemmer = stemmer;
        self
    }

    pub fn normalize(&self, text: &str) -> String {
        normalize_with(text, &self.normalization)
    }

    /// Full pipeline: normalize, tokenize, drop stop words, stem.
    pub fn process(&self, text: &str) -> Vec<Token> {
        let tokens = tokenize_with(&self.normalize(text), self.strip_digits);
        stem(remove_stopwords(tokens, self), self)
    }
}

pub fn remove_stopwords(tokens: Vec<Token>, cfg: &PreprocessConfig) -> Vec<Token> {
    if cfg.stopwords.is_empty() {
        return tokens;
    }
    tokens
        .into_iter()
        .filter(|t| !cfg.stopwords.contains(t.as_str()))
        .collect()
}

pub fn stem(tokens: Vec<Token>, cfg: &PreprocessConfig) -> Vec<Token> {
    match cfg.stemmer {
        Stemmer::None => tokens,
        Stemmer::LightSuffix => tokens
            .into_iter()
            .map(|t| Token(strip_suffix(t.as_str(), &cfg.suffixes)))
            .collect(),
    }
}

const MIN_STEM_CHARS: usize = 2;

/// Strips the longest suffix from `table` that leaves at least two
/// codepoints. A joiner left dangling at the end of the stem is removed.
pub fn strip_suffix(word: &str, table: &[String]) -> String {
    let mut candidates: Vec<(usize, &String)> = table
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty() && word.ends_with(s.as_str()))
        .collect();
    candidates.sort_by(|a, b| {
        b.1.chars()
            .count()
            .cmp(&a.1.chars().count())
            .then(a.0.cmp(&b.0))
    });
    for (_, suffix) in candidates {
        let stem = word[..word.len() - suffix.len()].trim_end_matches(ZWNJ);
        if stem.chars().count() >= MIN_STEM_CHARS {
            return stem.to_string();
        }
    }
    word.to_string()
}

/// Parses a one-entry-per-line word list (stop words, suffixes). `#` starts a
/// comment; blank lines are skipped; entries are normalized. An entry may not
/// contain inner whitespace.
pub fn parse_word_list(content: &str, norm: &Normalization) -> Result<Vec<String>> {
    let mut words = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let word = normalize_with(line, norm);
        if word.contains(' ') {
            return Err(Error::MalformedWordList {
                line: i + 1,
                reason: format!("entry {line:?} contains whitespace"),
            });
        }
        words.push(word);
    }
    Ok(words)
}

pub fn load_word_list(path: &Path, norm: &Normalization) -> Result<Vec<String>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_word_list(&content, norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(xs: &[&str]) -> Vec<Token> {
        xs.iter().map(|s| Token(s.to_string())).collect()
    }

    fn surfaces(ts: &[Token]) -> Vec<&str> {
        ts.iter().map(Token::as_str).collect()
    }

    #[test]
    fn lowercases_latin() {
        assert_eq!(normalize("FOOTBALL"), "football");
    }

    #[test]
    fn folds_arabic_yeh_and_kaf() {
        let input = "عل\u{064A} \u{0643}تاب";
        assert_eq!(normalize(input), "عل\u{06CC} \u{06A9}تاب");
    }

    #[test]
    fn collapses_whitespace() {
        assert_eq!(normalize("a  \t b"), "a b");
    }

    #[test]
    fn surrogates_become_zwnj() {
        assert_eq!(normalize("می\u{200B}رود"), "می\u{200C}رود");
        assert_eq!(normalize("می\u{200C}\u{00AD}رود"), "می\u{200C}رود");
    }

    #[test]
    fn custom_char_map() {
        let norm = Normalization {
            char_map: vec![('\u{0649}', PERSIAN_YEH)],
            ..Normalization::default()
        };
        assert_eq!(normalize_with("\u{0649}", &norm), "\u{06CC}");
    }

    #[test]
    fn tokenize_basic() {
        assert!(tokenize("").is_empty());
        assert_eq!(
            surfaces(&tokenize("one two, three.")),
            ["one", "two", "three"]
        );
        assert!(tokenize("?!، ... «»").is_empty());
    }

    #[test]
    fn zwnj_binds_morphemes() {
        let t = tokenize("می\u{200C}رود به");
        assert_eq!(surfaces(&t), ["می\u{200C}رود", "به"]);
    }

    #[test]
    fn dangling_zwnj_is_dropped() {
        assert_eq!(
            surfaces(&tokenize("\u{200C}کتاب\u{200C} خوب")),
            ["کتاب", "خوب"]
        );
    }

    #[test]
    fn strip_digits_option() {
        assert_eq!(surfaces(&tokenize("sale 2024")), ["sale", "2024"]);
        assert_eq!(surfaces(&tokenize_with("sale 2024", true)), ["sale"]);
    }

    #[test]
    fn stopword_removal() {
        let cfg = PreprocessConfig::default().with_stopwords(["the"]);
        assert_eq!(
            surfaces(&remove_stopwords(toks(&["the", "cat"]), &cfg)),
            ["cat"]
        );
        let empty = PreprocessConfig::default();
        assert_eq!(
            remove_stopwords(toks(&["the", "cat"]), &empty),
            toks(&["the", "cat"])
        );
        let fa = PreprocessConfig::default().with_stopwords(["به"]);
        assert_eq!(
            surfaces(&remove_stopwords(toks(&["به", "توپ", "به"]), &fa)),
            ["توپ"]
        );
    }

    #[test]
    fn light_suffix_stemming() {
        let cfg = PreprocessConfig::default().with_stemmer(Stemmer::LightSuffix);
        assert_eq!(surfaces(&stem(toks(&["کتاب\u{200C}ها"]), &cfg)), ["کتاب"]);
        assert_eq!(surfaces(&stem(toks(&["ها"]), &cfg)), ["ها"]);
        assert_eq!(surfaces(&stem(toks(&["بزرگ\u{200C}ترین"]), &cfg)), ["بزرگ"]);
        let none = PreprocessConfig::default();
        assert_eq!(
            stem(toks(&["کتاب\u{200C}ها"]), &none),
            toks(&["کتاب\u{200C}ها"])
        );
    }

    #[test]
    fn longest_suffix_wins() {
        let table: Vec<String> = ["ها", "های"].iter().map(|s| s.to_string()).collect();
        assert_eq!(strip_suffix("کتابهای", &table), "کتاب");
    }

    #[test]
    fn word_list_comments_and_normalization() {
        let words = parse_word_list(
            "# header\nTHE\n\n\u{0643}ه # inline\n",
            &Normalization::default(),
        )
        .unwrap();
        assert_eq!(words, ["the", "\u{06A9}ه"]);
        assert!(matches!(
            parse_word_list("ok\ntwo words\n", &Normalization::default()),
            Err(Error::MalformedWordList { line: 2, .. })
        ));
    }

    #[test]
    fn bundled_lists_parse() {
        assert!(PreprocessConfig::default()
            .suffixes
            .contains(&"ها".to_string()));
        let stop = parse_word_list(DEFAULT_STOPWORDS, &Normalization::default()).unwrap();
        assert!(stop.contains(&"و".to_string()));
    }
}
