//! Seeded synthetic corpora with a planted thesaurus.
//!
//! Every category owns a set of marker words. Each marker has one synonym
//! (its substitute), and all markers and substitutes of a category share a
//! few "field" relatives in the thesaurus, so any two words of the same
//! category overlap in exactly `field_words` relatives while words of
//! different categories share none.
//!
//! A document of category `c` mixes
//! - markers of `c` (a few replaced by their substitutes in training, and
//!   `test_substitution` of them in test documents),
//! - distractor markers of the next category, `(c + 1) mod |C|`,
//! - general words drawn from a pool shared by all categories,
//! - stop words.
//!
//! Replacing markers with substitutes hides lexical evidence from a model
//! that only knows the training vocabulary, while the thesaurus still links
//! the substitutes to the category.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{CategorySet, Dataset, LabeledDocument};
use crate::error::Result;
use crate::thesaurus::Thesaurus;

const CATEGORY_NAMES: [&str; 6] = [
    "society", "economy", "politic", "culture", "medicine", "sport",
];
const STOPWORDS: [&str; 5] = ["the", "of", "and", "to", "in"];
const ONSETS: [&str; 16] = [
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "sh", "kh",
];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyCorpusConfig {
    pub categories: usize,
    pub train_per_category: usize,
    pub test_per_category: usize,
    pub markers_per_category: usize,
    pub field_words: usize,
    pub general_words: usize,
    /// Inclusive range of own-category marker tokens per document.
    pub own_markers: (usize, usize),
    /// Inclusive range of distractor marker tokens per document.
    pub distractor_markers: (usize, usize),
    /// Inclusive range of general-word tokens per document.
    pub general_tokens: (usize, usize),
    /// Probability that a training marker token is written as its substitute.
    pub train_substitution: f64,
    /// Fraction of a test document's own marker tokens written as substitutes.
    pub test_substitution: f64,
    pub seed: u64,
}

impl Default for ToyCorpusConfig {
    fn default() -> Self {
        Self {
            categories: 6,
            train_per_category: 40,
            test_per_category: 20,
            markers_per_category: 12,
            field_words: 3,
            general_words: 150,
            own_markers: (5, 8),
            distractor_markers: (1, 4),
            general_tokens: (15, 25),
            train_substitution: 0.08,
            test_substitution: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ToyCorpus {
    pub train: Dataset,
    pub test: Dataset,
    pub thesaurus: Thesaurus,
    pub stopwords: Vec<String>,
}

impl ToyCorpus {
    /// Thesaurus in its file format, one sorted entry per line.
    pub fn thesaurus_text(&self) -> String {
        let mut out = String::from("# synthetic thesaurus: headword<TAB>related words\n");
        for head in self.thesaurus.headwords() {
            let related: Vec<&str> = self
                .thesaurus
                .related(head)
                .unwrap()
                .iter()
                .map(String::as_str)
                .collect();
            out.push_str(head);
            out.push('\t');
            out.push_str(&related.join(","));
            out.push('\n');
        }
        out
    }

    pub fn stopwords_text(&self) -> String {
        let mut out = String::from("# synthetic stop words\n");
        for w in &self.stopwords {
            out.push_str(w);
            out.push('\n');
        }
        out
    }
}

struct WordMint {
    rng: ChaCha8Rng,
    used: BTreeSet<String>,
}

impl WordMint {
    fn mint(&mut self) -> String {
        loop {
            let syllables = self.rng.gen_range(2..=3);
            let word: String = (0..syllables)
                .map(|_| {
                    let onset = ONSETS.choose(&mut self.rng).unwrap();
                    let vowel = VOWELS.choose(&mut self.rng).unwrap();
                    format!("{onset}{vowel}")
                })
                .collect();
            if !STOPWORDS.contains(&word.as_str()) && self.used.insert(word.clone()) {
                return word;
            }
        }
    }

    fn mint_n(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.mint()).collect()
    }
}

struct CategoryWords {
    markers: Vec<String>,
    substitutes: Vec<String>,
}

fn category_name(i: usize, n: usize) -> String {
    if n <= CATEGORY_NAMES.len() {
        CATEGORY_NAMES[i].to_string()
    } else {
        format!("category{i:02}")
    }
}

pub fn generate(cfg: &ToyCorpusConfig) -> Result<ToyCorpus> {
    let mut mint = WordMint {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x005e_ed0f_70c0),
        used: BTreeSet::new(),
    };
    let mut thesaurus = Thesaurus::new();
    let mut words = Vec::with_capacity(cfg.categories);
    for _ in 0..cfg.categories {
        let markers = mint.mint_n(cfg.markers_per_category);
        let substitutes = mint.mint_n(cfg.markers_per_category);
        let field = mint.mint_n(cfg.field_words);
        for (m, s) in markers.iter().zip(&substitutes) {
            thesaurus.insert(m, field.iter().cloned().chain([s.clone()]));
            thesaurus.insert(s, field.iter().cloned().chain([m.clone()]));
        }
        words.push(CategoryWords {
            markers,
            substitutes,
        });
    }
    let general = mint.mint_n(cfg.general_words);

    let categories: CategorySet = (0..cfg.categories)
        .map(|i| category_name(i, cfg.categories))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for split in [Split::Train, Split::Test] {
        let per_category = match split {
            Split::Train => cfg.train_per_category,
            Split::Test => cfg.test_per_category,
        };
        for c in 0..cfg.categories {
            let name = categories.get(c).unwrap();
            for i in 0..per_category {
                let text = compose(cfg, &words, &general, c, split, &mut rng);
                let id = format!("{}-{name}-{i:03}", split.prefix());
                let doc = LabeledDocument::new(id, text, name);
                match split {
                    Split::Train => train.push(doc),
                    Split::Test => test.push(doc),
                }
            }
        }
    }

    Ok(ToyCorpus {
        train: Dataset::with_categories(train, categories.clone())?,
        test: Dataset::with_categories(test, categories)?,
        thesaurus,
        stopwords: STOPWORDS.iter().map(|s| s.to_string()).collect(),
    })
}

#[derive(Clone, Copy)]
enum Split {
    Train,
    Test,
}

impl Split {
    fn prefix(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

fn compose(
    cfg: &ToyCorpusConfig,
    words: &[CategoryWords],
    general: &[String],
    c: usize,
    split: Split,
    rng: &mut ChaCha8Rng,
) -> String {
    let own = &words[c];
    let neighbor = &words[(c + 1) % words.len()];
    let n_own = rng.gen_range(cfg.own_markers.0..=cfg.own_markers.1);
    let n_dis = rng.gen_range(cfg.distractor_markers.0..=cfg.distractor_markers.1);
    let n_gen = rng.gen_range(cfg.general_tokens.0..=cfg.general_tokens.1);

    let own_idx: Vec<usize> = (0..n_own)
        .map(|_| rng.gen_range(0..own.markers.len()))
        .collect();
    let substituted: Vec<bool> = match split {
        Split::Train => own_idx
            .iter()
            .map(|_| rng.gen_bool(cfg.train_substitution))
            .collect(),
        Split::Test => {
            let k = (cfg.test_substitution * n_own as f64).round() as usize;
            let mut flags: Vec<bool> = (0..n_own).map(|i| i < k).collect();
            flags.shuffle(rng);
            flags
        }
    };

    let mut tokens: Vec<&str> = Vec::with_capacity(n_own + n_dis + n_gen + 4);
    for (&i, &sub) in own_idx.iter().zip(&substituted) {
        tokens.push(if sub {
            &own.substitutes[i]
        } else {
            &own.markers[i]
        });
    }
    for _ in 0..n_dis {
        tokens.push(neighbor.markers.choose(rng).unwrap());
    }
    for _ in 0..n_gen {
        tokens.push(general.choose(rng).unwrap());
    }
    for _ in 0..rng.gen_range(2..=4) {
        tokens.push(STOPWORDS.choose(rng).unwrap());
    }
    tokens.shuffle(rng);

    let mut text = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            text.push(' ');
        }
        if i == 0 {
            let mut chars = t.chars();
            let first = chars.next().unwrap().to_ascii_uppercase();
            text.push(first);
            text.extend(chars);
        } else {
            text.push_str(t);
        }
        if (i + 1) % 9 == 0 && i + 1 < tokens.len() {
            text.push(',');
        }
    }
    text.push('.');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thesaurus::similarity;

    #[test]
    fn shapes_and_determinism() {
        let cfg = ToyCorpusConfig::default();
        let a = generate(&cfg).unwrap();
        assert_eq!(a.train.len(), 240);
        assert_eq!(a.test.len(), 120);
        assert_eq!(a.train.category_counts(), vec![40; 6]);
        assert_eq!(a.test.category_counts(), vec![20; 6]);
        let b = generate(&cfg).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.thesaurus_text(), b.thesaurus_text());
        let c = generate(&ToyCorpusConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn planted_relations() {
        let corpus = generate(&ToyCorpusConfig::default()).unwrap();
        let th = &corpus.thesaurus;
        let heads: Vec<&str> = th.headwords().collect();
        // markers and substitutes of all categories have entries
        assert_eq!(heads.len(), 6 * 12 * 2);
        for h in heads {
            assert_eq!(th.semantic_set(h).len(), 4);
        }
    }

    #[test]
    fn same_category_words_share_field() {
        let cfg = ToyCorpusConfig::default();
        let corpus = generate(&cfg).unwrap();
        let th = &corpus.thesaurus;
        let heads: Vec<&str> = th.headwords().collect();
        let mut shared = 0;
        let mut pairs = 0;
        for a in &heads {
            for b in &heads {
                if a < b {
                    let s = similarity(&th.semantic_set(a), &th.semantic_set(b));
                    assert!(s == 0 || s == cfg.field_words, "{a} {b} {s}");
                    shared += usize::from(s > 0);
                    pairs += 1;
                }
            }
        }
        // 6 categories of 24 linked words each
        assert_eq!(shared, 6 * 24 * 23 / 2);
        assert!(pairs > shared);
    }
}
