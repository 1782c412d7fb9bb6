use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use serde_json::json;

use semweight::corpus::{load_corpus, parse_documents_jsonl, split, write_jsonl};
use semweight::evaluation::{compare as compare_reports, ReportRecord};
use semweight::pipeline::{run_ablation, train_pipeline, Ablation, TrainingSummary};
use semweight::synthetic::{generate, ToyCorpusConfig};
use semweight::{EvalReport, TrainedPipeline};

use crate::config::{FormatArg, RunArgs, RunConfig};
use crate::CliError;

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn to_json_bytes<S: Serialize>(value: &S) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(semweight::Error::from)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn training_log(
    cfg: &RunConfig,
    n_docs: usize,
    n_categories: usize,
    summary: &TrainingSummary,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "run_config {}", cfg.to_json());
    let _ = writeln!(out, "documents {n_docs}");
    let _ = writeln!(out, "categories {n_categories}");
    let _ = writeln!(out, "vocabulary_size {}", summary.vocabulary_size);
    let _ = writeln!(out, "thesaurus_features {}", summary.thesaurus_features);
    for (epoch, loss) in summary.log.mean_loss().iter().enumerate() {
        let _ = write!(out, "epoch {} loss {loss:.6}", epoch + 1);
        for per_category in &summary.log.epoch_loss {
            let _ = write!(out, " {:.6}", per_category[epoch]);
        }
        out.push('\n');
    }
    out
}

pub fn train(args: &RunArgs, model: Option<PathBuf>, log: Option<PathBuf>) -> Result<(), CliError> {
    let mut cfg = args.resolve()?;
    if model.is_some() {
        cfg.output.model = model;
    }
    if log.is_some() {
        cfg.output.log = log;
    }
    let model_path = cfg
        .output
        .model
        .clone()
        .ok_or_else(|| CliError::Config("no model path given (use --model)".into()))?;
    let log_path = cfg
        .output
        .log
        .clone()
        .unwrap_or_else(|| model_path.with_extension("log"));
    cfg.output.log = Some(log_path.clone());

    let pipeline_cfg = cfg.pipeline_config()?;
    if pipeline_cfg.weighting.needs_thesaurus() && cfg.thesaurus.is_none() {
        return Err(CliError::Config(
            "a thesaurus is required unless both --no-semantic and --no-extend are given".into(),
        ));
    }
    let thesaurus = cfg.load_thesaurus()?;
    let corpus = load_corpus(cfg.corpus_path()?, cfg.format.into())?;
    info!(
        "training on {} documents in {} categories",
        corpus.len(),
        corpus.categories().len()
    );

    let (mut pipeline, summary) =
        train_pipeline::<f64>(&corpus, thesaurus.as_ref(), &pipeline_cfg)?;
    pipeline.run_config = cfg.to_json();
    write_file(&model_path, &pipeline.to_bytes()?)?;
    let log_text = training_log(&cfg, corpus.len(), corpus.categories().len(), &summary);
    write_file(&log_path, log_text.as_bytes())?;
    info!(
        "vocabulary {} ({} from the thesaurus); model written to {}",
        summary.vocabulary_size,
        summary.thesaurus_features,
        model_path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct PredictionRecord<'a, S> {
    id: &'a str,
    label: &'a str,
    scores: &'a S,
    oov: bool,
}

pub fn predict(model: &Path, input: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let pipeline = TrainedPipeline::load(model)?;
    let content = fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let docs = parse_documents_jsonl(&content)?;
    let predictions = pipeline.predict_all(&docs)?;

    let sink: Box<dyn Write> = match output {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            Box::new(fs::File::create(path).map_err(|e| CliError::io(path, e))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let out_name = output.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let mut sink = BufWriter::new(sink);
    let mut oov = 0;
    for (doc, p) in docs.iter().zip(&predictions) {
        let record = PredictionRecord {
            id: &doc.id,
            label: &p.prediction.label,
            scores: &p.prediction.scores,
            oov: p.oov,
        };
        oov += usize::from(p.oov);
        serde_json::to_writer(&mut sink, &record).map_err(semweight::Error::from)?;
        sink.write_all(b"\n")
            .map_err(|e| CliError::io(&out_name, e))?;
    }
    sink.flush().map_err(|e| CliError::io(&out_name, e))?;
    info!(
        "{} predictions, {} without in-vocabulary terms",
        predictions.len(),
        oov
    );
    Ok(())
}

fn report_text(run_config: &serde_json::Value, body: &str) -> String {
    format!("# run_config: {run_config}\n{body}")
}

pub fn evaluate(
    model: &Path,
    input: &Path,
    format: FormatArg,
    out_dir: &Path,
) -> Result<(), CliError> {
    let pipeline = TrainedPipeline::load(model)?;
    let test = load_corpus(input, format.into())?;
    let report = pipeline.evaluate(&test, "model")?;
    let run_config = json!({
        "model": pipeline.run_config,
        "evaluate": { "model": model, "input": input, "format": format },
    });
    write_file(
        &out_dir.join("report.txt"),
        report_text(&run_config, &report.to_text()).as_bytes(),
    )?;
    let doc = json!({
        "run_config": run_config,
        "report": report,
        "records": report.records(),
    });
    write_file(&out_dir.join("report.json"), &to_json_bytes(&doc)?)?;
    info!(
        "macro P {:.2}% R {:.2}% F1 {:.2}% over {} documents",
        report.p_ave * 100.0,
        report.r_ave * 100.0,
        report.f1_ave * 100.0,
        report.n_docs
    );
    Ok(())
}

pub fn compare(
    args: &RunArgs,
    out_dir: Option<PathBuf>,
    baseline_only: bool,
) -> Result<(), CliError> {
    let mut cfg = args.resolve()?;
    if out_dir.is_some() {
        cfg.output.out_dir = out_dir;
    }
    let out_dir = cfg
        .output
        .out_dir
        .clone()
        .ok_or_else(|| CliError::Config("no output directory given (use --out-dir)".into()))?;
    let configs: &[Ablation] = if baseline_only {
        &Ablation::ALL[..1]
    } else {
        &Ablation::ALL
    };
    if !baseline_only && cfg.thesaurus.is_none() {
        return Err(CliError::Config(format!(
            "configurations {:?} and {:?} need a thesaurus; pass --thesaurus or run --baseline-only",
            Ablation::TfIdfExtension.label(),
            Ablation::Proposed.label()
        )));
    }
    let base = cfg.pipeline_config()?;
    let thesaurus = cfg.load_thesaurus()?;
    let corpus = load_corpus(cfg.corpus_path()?, cfg.format.into())?;
    let (train_set, test_set) = match &cfg.split.test {
        Some(path) => (corpus, load_corpus(path, cfg.format.into())?),
        None => split(&corpus, cfg.split.train_fraction, cfg.seed)?,
    };
    info!(
        "{} training and {} test documents",
        train_set.len(),
        test_set.len()
    );

    let reports: Vec<EvalReport> =
        run_ablation(&train_set, &test_set, thesaurus.as_ref(), &base, configs)?;
    let run_config = cfg.to_json();
    let (text, records): (String, Vec<ReportRecord>) = if reports.len() >= 2 {
        let table = compare_reports(&reports)?;
        (table.to_text(), table.records())
    } else {
        (reports[0].to_text(), reports[0].records())
    };
    let text = report_text(&run_config, &text);
    write_file(&out_dir.join("comparison.txt"), text.as_bytes())?;
    let doc = json!({
        "run_config": run_config,
        "configs": configs.iter().map(|a| a.label()).collect::<Vec<_>>(),
        "reports": reports,
        "records": records,
    });
    write_file(&out_dir.join("comparison.json"), &to_json_bytes(&doc)?)?;
    print!("{text}");
    Ok(())
}

pub fn make_toy_data(
    out_dir: &Path,
    seed: u64,
    train_substitution: Option<f64>,
    test_substitution: Option<f64>,
) -> Result<(), CliError> {
    let mut cfg = ToyCorpusConfig {
        seed,
        ..Default::default()
    };
    if let Some(p) = train_substitution {
        cfg.train_substitution = p;
    }
    if let Some(p) = test_substitution {
        cfg.test_substitution = p;
    }
    for p in [cfg.train_substitution, cfg.test_substitution] {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Config(format!(
                "substitution rate {p} is outside [0, 1]"
            )));
        }
    }
    let corpus = generate(&cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    write_jsonl(&corpus.train, &out_dir.join("train.jsonl"))?;
    write_jsonl(&corpus.test, &out_dir.join("test.jsonl"))?;
    write_file(
        &out_dir.join("thesaurus.tsv"),
        corpus.thesaurus_text().as_bytes(),
    )?;
    write_file(
        &out_dir.join("stopwords.txt"),
        corpus.stopwords_text().as_bytes(),
    )?;
    write_file(&out_dir.join("generator.json"), &to_json_bytes(&cfg)?)?;
    info!(
        "wrote {} training and {} test documents to {}",
        corpus.train.len(),
        corpus.test.len(),
        out_dir.display()
    );
    Ok(())
}
