//! Run configuration: a TOML file overlaid by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use semweight::classifier::Hyperparameters;
use semweight::pipeline::PipelineConfig;
use semweight::preprocess::{load_word_list, Normalization, PreprocessConfig, Stemmer};
use semweight::selection::IcfMode;
use semweight::thesaurus::{load_thesaurus, Thesaurus};
use semweight::weighting::{CosineNorm, WeightingConfig};
use semweight::CorpusFormat;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    #[default]
    Jsonl,
    Directory,
}

impl From<FormatArg> for CorpusFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Jsonl => CorpusFormat::Jsonl,
            FormatArg::Directory => CorpusFormat::Directory,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum IcfModeArg {
    #[default]
    CategoryCount,
    DocRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CosineNormArg {
    #[default]
    SumOfSquares,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StemmerArg {
    #[default]
    None,
    LightSuffix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessSection {
    pub stemmer: StemmerArg,
    /// Suffix table file; the bundled table when absent.
    pub suffixes: Option<PathBuf>,
    pub strip_digits: bool,
}

impl Default for PreprocessSection {
    fn default() -> Self {
        Self {
            stemmer: StemmerArg::None,
            suffixes: None,
            strip_digits: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionSection {
    pub icf_mode: IcfModeArg,
    /// Overrides `5 / log10(|C|)`.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightingSection {
    pub semantic: bool,
    pub scale_semantic: bool,
    pub extend_vectors: bool,
    pub cosine_norm: CosineNormArg,
    pub symmetrize: bool,
}

impl Default for WeightingSection {
    fn default() -> Self {
        let w = WeightingConfig::default();
        Self {
            semantic: w.semantic,
            scale_semantic: w.scale_semantic,
            extend_vectors: w.extend_vectors,
            cosine_norm: CosineNormArg::SumOfSquares,
            symmetrize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSection {
    pub lambda: f64,
    pub epochs: usize,
    /// Initial step size; calibrated from the data when absent.
    pub learning_rate: Option<f64>,
    pub eq7_init: bool,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        let h = Hyperparameters::default();
        Self {
            lambda: h.lambda,
            epochs: h.epochs,
            learning_rate: h.learning_rate,
            eq7_init: h.eq7_init,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub train_fraction: f64,
    /// Held-out labeled file; when set, the corpus is used whole for training.
    pub test: Option<PathBuf>,
}

impl Default for SplitSection {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            test: None,
        }
    }
}

/// Everything that determines a training or comparison run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub format: FormatArg,
    pub thesaurus: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub seed: u64,
    pub preprocess: PreprocessSection,
    pub selection: SelectionSection,
    pub weighting: WeightingSection,
    pub classifier: ClassifierSection,
    pub split: SplitSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            format: FormatArg::Jsonl,
            thesaurus: None,
            stopwords: None,
            seed: 0,
            preprocess: PreprocessSection::default(),
            selection: SelectionSection::default(),
            weighting: WeightingSection::default(),
            classifier: ClassifierSection::default(),
            split: SplitSection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub model: Option<PathBuf>,
    pub log: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

/// Flags shared by `train` and `compare`. Unset flags leave the config file
/// value alone.
#[derive(Debug, Clone, Args, Default)]
pub struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Labeled corpus (jsonl file or directory of category folders).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Thesaurus file: `headword<TAB>rel1,rel2,...` per line.
    #[arg(long)]
    pub thesaurus: Option<PathBuf>,
    /// Stop-word list, one word per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Seed for the train/test split and the classifier shuffle.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub stemmer: Option<StemmerArg>,
    /// Suffix table for the light stemmer, one suffix per line.
    #[arg(long)]
    pub suffixes: Option<PathBuf>,
    /// Treat decimal digits as token boundaries.
    #[arg(long)]
    pub strip_digits: bool,
    #[arg(long, value_enum)]
    pub icf_mode: Option<IcfModeArg>,
    #[arg(long)]
    pub selection_threshold: Option<f64>,
    /// Disable semantic weights (tf-idf only).
    #[arg(long)]
    pub no_semantic: bool,
    /// Scale semantic weights by the document's largest semantic weight.
    #[arg(long)]
    pub scale_semantic: bool,
    /// Disable thesaurus extension of the vocabulary.
    #[arg(long)]
    pub no_extend: bool,
    #[arg(long, value_enum)]
    pub cosine_norm: Option<CosineNormArg>,
    /// Close the thesaurus relation under symmetry before use.
    #[arg(long)]
    pub symmetrize: bool,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Start thesaurus-origin weights at zero instead of their category priors.
    #[arg(long)]
    pub no_eq7_init: bool,
    /// Fraction of each category used for training when no --test file is given.
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Labeled held-out file; the whole corpus is then used for training.
    #[arg(long)]
    pub test: Option<PathBuf>,
}

impl RunArgs {
    /// Loads the config file, if any, and applies the flags on top.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => read_config(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($field:expr, $value:expr) => {
                if let Some(v) = $value.clone() {
                    $field = v;
                }
            };
        }
        if self.corpus.is_some() {
            cfg.corpus = self.corpus.clone();
        }
        set!(cfg.format, self.format);
        if self.thesaurus.is_some() {
            cfg.thesaurus = self.thesaurus.clone();
        }
        if self.stopwords.is_some() {
            cfg.stopwords = self.stopwords.clone();
        }
        set!(cfg.seed, self.seed);
        set!(cfg.preprocess.stemmer, self.stemmer);
        if self.suffixes.is_some() {
            cfg.preprocess.suffixes = self.suffixes.clone();
        }
        cfg.preprocess.strip_digits |= self.strip_digits;
        set!(cfg.selection.icf_mode, self.icf_mode);
        if self.selection_threshold.is_some() {
            cfg.selection.threshold = self.selection_threshold;
        }
        if self.no_semantic {
            cfg.weighting.semantic = false;
        }
        cfg.weighting.scale_semantic |= self.scale_semantic;
        if self.no_extend {
            cfg.weighting.extend_vectors = false;
        }
        set!(cfg.weighting.cosine_norm, self.cosine_norm);
        cfg.weighting.symmetrize |= self.symmetrize;
        set!(cfg.classifier.lambda, self.lambda);
        set!(cfg.classifier.epochs, self.epochs);
        if self.learning_rate.is_some() {
            cfg.classifier.learning_rate = self.learning_rate;
        }
        if self.no_eq7_init {
            cfg.classifier.eq7_init = false;
        }
        set!(cfg.split.train_fraction, self.train_fraction);
        if self.test.is_some() {
            cfg.split.test = self.test.clone();
        }
        Ok(cfg)
    }
}

pub fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn corpus_path(&self) -> Result<&Path, CliError> {
        self.corpus.as_deref().ok_or_else(|| {
            CliError::Config("no corpus given (use --corpus or `corpus` in the config file)".into())
        })
    }

    /// Builds the library configuration, reading stop-word and suffix files.
    pub fn pipeline_config(&self) -> Result<PipelineConfig, CliError> {
        let norm = Normalization::default();
        let mut preprocess = PreprocessConfig::default();
        if let Some(path) = &self.stopwords {
            preprocess = preprocess.with_stopwords(load_word_list(path, &norm)?);
        }
        if let Some(path) = &self.preprocess.suffixes {
            preprocess.suffixes = load_word_list(path, &norm)?;
        }
        preprocess.stemmer = match self.preprocess.stemmer {
            StemmerArg::None => Stemmer::None,
            StemmerArg::LightSuffix => Stemmer::LightSuffix,
        };
        preprocess.strip_digits = self.preprocess.strip_digits;
        Ok(PipelineConfig {
            preprocess,
            icf_mode: match self.selection.icf_mode {
                IcfModeArg::CategoryCount => IcfMode::CategoryCount,
                IcfModeArg::DocRatio => IcfMode::DocRatio,
            },
            selection_threshold: self.selection.threshold,
            weighting: WeightingConfig {
                semantic: self.weighting.semantic,
                scale_semantic: self.weighting.scale_semantic,
                extend_vectors: self.weighting.extend_vectors,
                cosine_norm: match self.weighting.cosine_norm {
                    CosineNormArg::SumOfSquares => CosineNorm::SumOfSquares,
                    CosineNormArg::AsPrinted => CosineNorm::AsPrinted,
                },
            },
            hyperparameters: Hyperparameters {
                lambda: self.classifier.lambda,
                epochs: self.classifier.epochs,
                seed: self.seed,
                learning_rate: self.classifier.learning_rate,
                eq7_init: self.classifier.eq7_init,
            },
            symmetrize_thesaurus: self.weighting.symmetrize,
        })
    }

    pub fn load_thesaurus(&self) -> Result<Option<Thesaurus>, CliError> {
        match &self.thesaurus {
            Some(path) => Ok(Some(load_thesaurus(path, &Normalization::default())?)),
            None => Ok(None),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("run config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "corpus = \"a.jsonl\"\nseed = 3\n[classifier]\nepochs = 7\n[weighting]\nsemantic = false\n",
        )
        .unwrap();
        let args = RunArgs {
            config: Some(path),
            seed: Some(9),
            ..Default::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.corpus.as_deref(), Some(Path::new("a.jsonl")));
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.classifier.epochs, 7);
        assert!(!cfg.weighting.semantic);
        assert!(cfg.weighting.extend_vectors);
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "corpsu = \"a.jsonl\"\n").unwrap();
        assert!(matches!(read_config(&path), Err(CliError::Config(_))));
    }

    #[test]
    fn defaults_match_library() {
        let cfg = RunConfig::default().pipeline_config().unwrap();
        assert_eq!(cfg.weighting, WeightingConfig::default());
        assert_eq!(cfg.hyperparameters, Hyperparameters::default());
        assert_eq!(cfg.preprocess, PreprocessConfig::default());
    }
}
