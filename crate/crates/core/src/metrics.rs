//! Confusion matrices, per-class precision/recall, accuracy, and heat-map
//! export.
//!
//! Precision and recall are one-vs-rest per class. A zero denominator yields
//! 0. Accuracy is `trace / total`.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::codec::write_atomic;
use crate::error::{Error, Result};

/// `counts[t][p]` = examples of true class `t` predicted as `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
    pub labels: Vec<String>,
}

pub fn confusion(preds: &[usize], truths: &[usize], m: usize) -> Result<ConfusionMatrix> {
    if preds.len() != truths.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} predictions for {} truths",
            preds.len(),
            truths.len()
        )));
    }
    let mut counts = vec![vec![0u64; m]; m];
    for (&p, &t) in preds.iter().zip(truths) {
        if let Some(&label) = [p, t].iter().find(|&&l| l >= m) {
            return Err(Error::LabelOutOfRange { label, classes: m });
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        labels: (0..m).map(|i| i.to_string()).collect(),
    })
}

impl ConfusionMatrix {
    pub fn with_labels(mut self, labels: &[String]) -> Result<Self> {
        if labels.len() != self.m() {
            return Err(Error::ShapeMismatch(format!(
                "{} label names for {} classes",
                labels.len(),
                self.m()
            )));
        }
        self.labels = labels.to_vec();
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.m()).map(|i| self.counts[i][i]).sum()
    }

    pub fn true_positives(&self, c: usize) -> u64 {
        self.counts[c][c]
    }

    pub fn false_positives(&self, c: usize) -> u64 {
        (0..self.m())
            .filter(|&t| t != c)
            .map(|t| self.counts[t][c])
            .sum()
    }

    pub fn false_negatives(&self, c: usize) -> u64 {
        (0..self.m())
            .filter(|&p| p != c)
            .map(|p| self.counts[c][p])
            .sum()
    }

    /// Rows divided by their sums; all-zero rows stay zero.
    pub fn row_normalized(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|row| {
                let s: u64 = row.iter().sum();
                row.iter()
                    .map(|&c| if s == 0 { 0.0 } else { c as f64 / s as f64 })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    /// Unweighted mean over classes.
    #[default]
    Macro,
    /// Mean weighted by class support.
    Weighted,
}

impl FromStr for Averaging {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "macro" => Ok(Averaging::Macro),
            "weighted" => Ok(Averaging::Weighted),
            _ => Err(Error::InvalidConfig(format!(
                "unknown averaging `{s}` (macro|weighted)"
            ))),
        }
    }
}

impl fmt::Display for Averaging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Averaging::Macro => "macro",
            Averaging::Weighted => "weighted",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub labels: Vec<String>,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    /// True-class counts.
    pub support: Vec<u64>,
    pub accuracy: f64,
    pub averaging: Averaging,
    pub avg_precision: f64,
    pub avg_recall: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn report(cm: &ConfusionMatrix, averaging: Averaging) -> Result<EvalReport> {
    let total = cm.total();
    if cm.m() == 0 || total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let m = cm.m();
    let precision: Vec<f64> = (0..m)
        .map(|c| {
            ratio(
                cm.true_positives(c),
                cm.true_positives(c) + cm.false_positives(c),
            )
        })
        .collect();
    let recall: Vec<f64> = (0..m)
        .map(|c| {
            ratio(
                cm.true_positives(c),
                cm.true_positives(c) + cm.false_negatives(c),
            )
        })
        .collect();
    let support: Vec<u64> = cm.counts.iter().map(|r| r.iter().sum()).collect();
    let average = |v: &[f64]| match averaging {
        Averaging::Macro => v.iter().sum::<f64>() / m as f64,
        Averaging::Weighted => {
            v.iter()
                .zip(&support)
                .map(|(x, &s)| x * s as f64)
                .sum::<f64>()
                / total as f64
        }
    };
    Ok(EvalReport {
        labels: cm.labels.clone(),
        avg_precision: average(&precision),
        avg_recall: average(&recall),
        precision,
        recall,
        support,
        accuracy: ratio(cm.trace(), total),
        averaging,
    })
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,precision,recall,support\n");
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_field(l),
                self.precision[i],
                self.recall[i],
                self.support[i]
            );
        }
        let _ = writeln!(
            out,
            "{}_average,{},{},",
            self.averaging, self.avg_precision, self.avg_recall
        );
        let _ = writeln!(out, "accuracy,,,{}", self.accuracy);
        out
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .labels
            .iter()
            .map(|l| l.len())
            .max()
            .unwrap_or(0)
            .max(16);
        writeln!(
            f,
            "{:<width$}  {:>9}  {:>9}  {:>7}",
            "class", "precision", "recall", "support"
        )?;
        for (i, l) in self.labels.iter().enumerate() {
            writeln!(
                f,
                "{l:<width$}  {:>9.4}  {:>9.4}  {:>7}",
                self.precision[i], self.recall[i], self.support[i]
            )?;
        }
        let avg = format!("{} avg", self.averaging);
        writeln!(
            f,
            "{avg:<width$}  {:>9.4}  {:>9.4}",
            self.avg_precision, self.avg_recall
        )?;
        write!(f, "{:<width$}  {:>9.4}", "accuracy", self.accuracy)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Row-normalized confusion matrix as CSV with label names on both axes.
pub fn heatmap_csv(cm: &ConfusionMatrix) -> String {
    let mut out = String::from("true\\predicted");
    for l in &cm.labels {
        out.push(',');
        out.push_str(&csv_field(l));
    }
    out.push('\n');
    for (l, row) in cm.labels.iter().zip(cm.row_normalized()) {
        out.push_str(&csv_field(l));
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn emit_heatmap_csv(cm: &ConfusionMatrix, path: &Path) -> Result<()> {
    write_atomic(path, heatmap_csv(cm).as_bytes())
}
