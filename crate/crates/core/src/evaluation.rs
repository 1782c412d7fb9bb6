//! Confusion counting, per-category and macro-averaged precision / recall /
//! F1, and side-by-side comparison of configurations.
//!
//! Conventions: a zero denominator yields 0 for precision, recall and F1.
//! Macro F1 is the harmonic mean of the macro precision and macro recall, not
//! the mean of the per-category F1 values.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::CategorySet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Single-label multiclass confusion counts. `matrix[gold][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub categories: CategorySet,
    pub matrix: Vec<Vec<usize>>,
}

impl ConfusionCounts {
    pub fn tp(&self, c: usize) -> usize {
        self.matrix[c][c]
    }

    pub fn fp(&self, c: usize) -> usize {
        self.matrix.iter().map(|row| row[c]).sum::<usize>() - self.tp(c)
    }

    pub fn fn_(&self, c: usize) -> usize {
        self.matrix[c].iter().sum::<usize>() - self.tp(c)
    }

    pub fn total(&self) -> usize {
        self.matrix.iter().flatten().sum()
    }
}

pub fn confusion<S: AsRef<str>>(
    gold: &[S],
    predicted: &[S],
    categories: &CategorySet,
) -> Result<ConfusionCounts> {
    if gold.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::NoPredictions);
    }
    let n = categories.len();
    let mut matrix = vec![vec![0; n]; n];
    let lookup = |label: &str| {
        categories
            .index_of(label)
            .ok_or_else(|| Error::UnknownCategory(label.to_string()))
    };
    for (g, p) in gold.iter().zip(predicted) {
        matrix[lookup(g.as_ref())?][lookup(p.as_ref())?] += 1;
    }
    Ok(ConfusionCounts {
        categories: categories.clone(),
        matrix,
    })
}

fn ratio<T: Scalar>(num: usize, den: usize) -> T {
    if den == 0 {
        T::zero()
    } else {
        T::count(num) / T::count(den)
    }
}

/// Per-category `(precision, recall)` in category order.
pub fn precision_recall<T: Scalar>(counts: &ConfusionCounts) -> Vec<(T, T)> {
    (0..counts.categories.len())
        .map(|c| {
            let tp = counts.tp(c);
            (ratio(tp, tp + counts.fp(c)), ratio(tp, tp + counts.fn_(c)))
        })
        .collect()
}

/// Harmonic mean of precision and recall.
pub fn f1<T: Scalar>(p: T, r: T) -> T {
    if p + r == T::zero() {
        T::zero()
    } else {
        T::lit(2.0) * p * r / (p + r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryMetrics<T> {
    pub category: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<T> {
    /// Which configuration produced the predictions.
    pub config: String,
    pub per_category: Vec<CategoryMetrics<T>>,
    pub p_ave: T,
    pub r_ave: T,
    pub f1_ave: T,
    pub n_docs: usize,
    /// Identity of the test set; reports are only comparable when equal.
    pub test_set: Option<String>,
}

pub fn macro_report<T: Scalar>(counts: &ConfusionCounts, config: &str) -> EvalReport<T> {
    let pr = precision_recall::<T>(counts);
    let per_category: Vec<CategoryMetrics<T>> = counts
        .categories
        .iter()
        .zip(&pr)
        .enumerate()
        .map(|(c, (name, &(p, r)))| CategoryMetrics {
            category: name.to_string(),
            tp: counts.tp(c),
            fp: counts.fp(c),
            fn_: counts.fn_(c),
            precision: p,
            recall: r,
            f1: f1(p, r),
        })
        .collect();
    let k = T::count(pr.len().max(1));
    let p_ave = pr.iter().map(|&(p, _)| p).sum::<T>() / k;
    let r_ave = pr.iter().map(|&(_, r)| r).sum::<T>() / k;
    EvalReport {
        config: config.to_string(),
        per_category,
        p_ave,
        r_ave,
        f1_ave: f1(p_ave, r_ave),
        n_docs: counts.total(),
        test_set: None,
    }
}

/// Order-sensitive digest of a labeled test set, for comparability checks.
pub fn test_set_fingerprint<A: AsRef<str>, B: AsRef<str>>(ids: &[A], gold: &[B]) -> String {
    let mut h = Sha256::new();
    for (id, g) in ids.iter().zip(gold) {
        h.update(id.as_ref().as_bytes());
        h.update([0]);
        h.update(g.as_ref().as_bytes());
        h.update([0]);
    }
    hex::encode(h.finalize())
}

fn pct<T: Scalar>(x: T) -> String {
    format!("{:.2}", x.as_f64() * 100.0)
}

impl<T: Scalar> EvalReport<T> {
    pub fn with_test_set(mut self, fingerprint: String) -> Self {
        self.test_set = Some(fingerprint);
        self
    }

    /// Mean of the per-category F1 values (reported for reference only).
    pub fn mean_category_f1(&self) -> T {
        let k = T::count(self.per_category.len().max(1));
        self.per_category.iter().map(|m| m.f1).sum::<T>() / k
    }

    /// Human-readable table, values in percent with two decimals.
    pub fn to_text(&self) -> String {
        let width = self
            .per_category
            .iter()
            .map(|m| m.category.chars().count())
            .max()
            .unwrap_or(0)
            .max("macro".len());
        let mut out = String::new();
        let _ = writeln!(out, "# configuration: {}", self.config);
        let _ = writeln!(out, "# documents: {}", self.n_docs);
        let _ = writeln!(
            out,
            "# zero denominators count as 0; macro F1 = harmonic mean of macro P and R"
        );
        let _ = writeln!(
            out,
            "{:<width$}  {:>5} {:>5} {:>5}  {:>9} {:>7} {:>10}",
            "category", "TP", "FP", "FN", "Precision", "Recall", "F1-measure"
        );
        for m in &self.per_category {
            let _ = writeln!(
                out,
                "{:<width$}  {:>5} {:>5} {:>5}  {:>9} {:>7} {:>10}",
                m.category,
                m.tp,
                m.fp,
                m.fn_,
                pct(m.precision),
                pct(m.recall),
                pct(m.f1)
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>5} {:>5} {:>5}  {:>9} {:>7} {:>10}",
            "macro",
            "",
            "",
            "",
            pct(self.p_ave),
            pct(self.r_ave),
            pct(self.f1_ave)
        );
        out
    }

    /// Flat records: one per category plus a `macro` row whose counts are
    /// totals.
    pub fn records(&self) -> Vec<ReportRecord> {
        let mut rows: Vec<ReportRecord> = self
            .per_category
            .iter()
            .map(|m| ReportRecord {
                config: self.config.clone(),
                category: m.category.clone(),
                tp: m.tp,
                fp: m.fp,
                fn_: m.fn_,
                precision: m.precision.as_f64(),
                recall: m.recall.as_f64(),
                f1: m.f1.as_f64(),
            })
            .collect();
        rows.push(ReportRecord {
            config: self.config.clone(),
            category: MACRO_ROW.to_string(),
            tp: self.per_category.iter().map(|m| m.tp).sum(),
            fp: self.per_category.iter().map(|m| m.fp).sum(),
            fn_: self.per_category.iter().map(|m| m.fn_).sum(),
            precision: self.p_ave.as_f64(),
            recall: self.r_ave.as_f64(),
            f1: self.f1_ave.as_f64(),
        });
        rows
    }
}

pub const MACRO_ROW: &str = "macro";

/// Machine-readable report row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub config: String,
    pub category: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Reports of several configurations over one test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable<T> {
    pub reports: Vec<EvalReport<T>>,
}

pub fn compare<T: Scalar>(reports: &[EvalReport<T>]) -> Result<ComparisonTable<T>> {
    if reports.len() < 2 {
        return Err(Error::TooFewReports(reports.len()));
    }
    let first = &reports[0];
    for r in &reports[1..] {
        let same_categories = r.per_category.len() == first.per_category.len()
            && r.per_category
                .iter()
                .zip(&first.per_category)
                .all(|(a, b)| a.category == b.category);
        if r.test_set != first.test_set || r.n_docs != first.n_docs || !same_categories {
            return Err(Error::MismatchedTestSets);
        }
    }
    Ok(ComparisonTable {
        reports: reports.to_vec(),
    })
}

impl<T: Scalar> ComparisonTable<T> {
    pub fn configs(&self) -> Vec<&str> {
        self.reports.iter().map(|r| r.config.as_str()).collect()
    }

    pub fn f1_ave(&self) -> Vec<T> {
        self.reports.iter().map(|r| r.f1_ave).collect()
    }

    /// One group of Precision / Recall / F1-measure columns per
    /// configuration, one row per category plus the macro row.
    pub fn to_text(&self) -> String {
        let labels: Vec<String> = self.reports[0]
            .per_category
            .iter()
            .map(|m| m.category.clone())
            .chain(std::iter::once(MACRO_ROW.to_string()))
            .collect();
        let width = labels
            .iter()
            .map(|l| l.chars().count())
            .max()
            .unwrap_or(0)
            .max("category".len());
        let group = 30;
        let mut out = String::new();
        let _ = write!(out, "{:<width$}", "");
        for r in &self.reports {
            let _ = write!(out, " | {:<group$}", r.config);
        }
        out.push('\n');
        let _ = write!(out, "{:<width$}", "category");
        for _ in &self.reports {
            let _ = write!(
                out,
                " | {:>9} {:>9} {:>10}",
                "Precision", "Recall", "F1-measure"
            );
        }
        out.push('\n');
        for (i, label) in labels.iter().enumerate() {
            let _ = write!(out, "{label:<width$}");
            for r in &self.reports {
                let (p, rc, f) = match r.per_category.get(i) {
                    Some(m) => (m.precision, m.recall, m.f1),
                    None => (r.p_ave, r.r_ave, r.f1_ave),
                };
                let _ = write!(out, " | {:>9} {:>9} {:>10}", pct(p), pct(rc), pct(f));
            }
            out.push('\n');
        }
        out
    }

    pub fn records(&self) -> Vec<ReportRecord> {
        self.reports.iter().flat_map(EvalReport::records).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cats(xs: &[&str]) -> CategorySet {
        xs.iter().collect()
    }

    #[test]
    fn perfect_predictions() {
        let gold = ["A", "B", "B", "C"];
        let c = confusion(&gold, &gold, &cats(&["A", "B", "C"])).unwrap();
        for i in 0..3 {
            assert_eq!(c.fp(i), 0);
            assert_eq!(c.fn_(i), 0);
        }
        assert_eq!(c.tp(1), 2);
        let r = macro_report::<f64>(&c, "x");
        assert_eq!((r.p_ave, r.r_ave, r.f1_ave), (1.0, 1.0, 1.0));
    }

    #[test]
    fn small_confusion() {
        let c = confusion(&["A", "A", "B"], &["A", "B", "B"], &cats(&["A", "B"])).unwrap();
        assert_eq!((c.tp(0), c.fp(0), c.fn_(0)), (1, 0, 1));
        assert_eq!((c.tp(1), c.fp(1), c.fn_(1)), (1, 1, 0));
        let pr = precision_recall::<f64>(&c);
        assert_eq!(pr[0], (1.0, 0.5));
    }

    #[test]
    fn confusion_errors() {
        let cs = cats(&["A", "B"]);
        assert!(matches!(
            confusion(&["A"], &["A", "B"], &cs),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            confusion(&["A"], &["Z"], &cs),
            Err(Error::UnknownCategory(_))
        ));
        let none: [&str; 0] = [];
        assert!(matches!(
            confusion(&none, &none, &cs),
            Err(Error::NoPredictions)
        ));
    }

    #[test]
    fn zero_denominator_convention() {
        // B is never predicted and never gold
        let c = confusion(&["A"], &["A"], &cats(&["A", "B"])).unwrap();
        assert_eq!(precision_recall::<f64>(&c)[1], (0.0, 0.0));
    }

    #[test]
    fn f1_cases() {
        assert_eq!(f1(1.0f64, 1.0), 1.0);
        assert!((f1(1.0f64, 0.5) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f1(0.0f64, 0.0), 0.0);
    }

    #[test]
    fn symmetric_macro_example() {
        // A: P=1, R=0.5; B: P=0.5, R=1
        let c = confusion(&["A", "A", "B"], &["A", "B", "B"], &cats(&["A", "B"])).unwrap();
        let r = macro_report::<f64>(&c, "x");
        assert_eq!(r.p_ave, 0.75);
        assert_eq!(r.r_ave, 0.75);
        assert_eq!(r.f1_ave, 0.75);
        assert!((r.mean_category_f1() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn text_report_uses_percentages() {
        let c = confusion(&["A", "A", "B"], &["A", "B", "B"], &cats(&["A", "B"])).unwrap();
        let text = macro_report::<f64>(&c, "proposed").to_text();
        assert!(text.contains("75.00"), "{text}");
        assert!(text.contains("# configuration: proposed"));
    }

    #[test]
    fn compare_requires_same_test_set() {
        let c = confusion(&["A", "B"], &["A", "B"], &cats(&["A", "B"])).unwrap();
        let a = macro_report::<f64>(&c, "a").with_test_set("s1".into());
        let b = macro_report::<f64>(&c, "b").with_test_set("s1".into());
        let other = macro_report::<f64>(&c, "c").with_test_set("s2".into());
        let table = compare(&[a.clone(), b.clone(), a.clone()]).unwrap();
        assert_eq!(table.configs(), ["a", "b", "a"]);
        assert_eq!(table.f1_ave()[0], table.f1_ave()[2]);
        assert!(matches!(
            compare(&[a.clone(), other]),
            Err(Error::MismatchedTestSets)
        ));
        assert!(matches!(compare(&[a]), Err(Error::TooFewReports(1))));
        assert_eq!(table.records().len(), 9);
    }
}
