use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use super::config::RunConfig;
use crate::codec::{read_file, write_atomic};
use crate::error::{Error, Result};
use crate::graph::dataset::DATASET_MAGIC;
use crate::graph::{split_dataset, ChainedGraph, Dataset};
use crate::ingest::FiveTuple;
use crate::metrics::{confusion, emit_heatmap_csv, report, EvalReport};
use crate::model::checkpoint::CHECKPOINT_MAGIC;
use crate::model::{init_model, CgnnModel, Checkpoint};
use crate::pipeline::{ingest_pcap, IngestStats};
use crate::train::{fit_from, predict as predict_graphs, TrainReport};

macro_rules! say {
    ($w:expr, $($arg:tt)*) => {
        writeln!($w, $($arg)*).map_err(|e| Error::io("<output>", e))?
    };
}

pub const CHECKPOINT_FILE: &str = "best.cgm1";
pub const REPORT_FILE: &str = "train_report.csv";

fn sorted_entries(dir: &Path, keep: impl Fn(&Path) -> bool) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if keep(&path) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Build a dataset from `<root>/<label>/*.pcap`. Label ids follow sorted
/// directory names.
pub fn preprocess(root: &Path, out: &Path, cfg: &RunConfig, w: &mut dyn Write) -> Result<Dataset> {
    cfg.validate()?;
    let label_dirs = sorted_entries(root, |p| p.is_dir())?;
    if label_dirs.is_empty() {
        return Err(Error::NoLabels(root.to_path_buf()));
    }
    let labels: Vec<String> = label_dirs.iter().map(|d| file_name(d)).collect();
    let mut files = Vec::new();
    for (label, dir) in label_dirs.iter().enumerate() {
        let pcaps = sorted_entries(dir, |p| {
            p.is_file() && p.extension().is_some_and(|e| e == "pcap")
        })?;
        files.extend(pcaps.into_iter().map(|p| (label, p)));
    }

    let opts = cfg.ingest_options();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results: Vec<Result<_>> = pool.install(|| {
        files
            .par_iter()
            .map(|(label, path)| {
                let bytes = read_file(path)?;
                ingest_pcap(&bytes, *label, &opts).map(|(g, s)| (g, s, path))
            })
            .collect()
    });

    let mut graphs = Vec::new();
    let mut per_label = vec![0usize; labels.len()];
    let mut stats = IngestStats::default();
    for r in results {
        let (sessions, s, path) = r?;
        if s.truncated {
            log::warn!("{}: capture ends inside a record", path.display());
        }
        stats += s;
        for sg in sessions {
            per_label[sg.graph.label] += 1;
            graphs.push(sg.graph);
        }
    }

    for (name, &count) in labels.iter().zip(&per_label) {
        say!(w, "{name}: {count} sessions");
        if count == 0 {
            log::warn!("label {name} yielded no sessions after cleaning");
            say!(
                w,
                "warning: label {name} yielded no sessions after cleaning"
            );
        }
    }
    say!(
        w,
        "records={} skipped={} undecodable={} discarded_packets={} dropped_sessions={}",
        stats.records,
        stats.skipped,
        stats.undecodable,
        stats.discarded,
        stats.dropped_sessions
    );
    if stats.dropped_sessions > 0 {
        say!(
            w,
            "warning: {} sessions had no payload-bearing packets and were dropped",
            stats.dropped_sessions
        );
    }

    let dataset = Dataset {
        p: cfg.p,
        labels,
        graphs,
    };
    dataset.save(out)?;
    say!(
        w,
        "wrote {} graphs to {}",
        dataset.graphs.len(),
        out.display()
    );
    Ok(dataset)
}

fn subset(graphs: &[ChainedGraph], idx: &[usize]) -> Vec<ChainedGraph> {
    idx.iter().map(|&i| graphs[i].clone()).collect()
}

/// Split 8:1:1, train, and write the best checkpoint and the epoch report.
pub fn train(
    dataset: &Path,
    out_dir: &Path,
    cfg: &RunConfig,
    w: &mut dyn Write,
) -> Result<(Checkpoint, TrainReport)> {
    cfg.validate()?;
    let data = Dataset::load(dataset)?;
    if data.p != cfg.p {
        return Err(Error::DimsMismatch(format!(
            "dataset has p={}, config has p={}",
            data.p, cfg.p
        )));
    }
    let dims = cfg.dims(data.num_classes());
    dims.validate()?;

    let split = split_dataset(&data.graphs, cfg.split_seed);
    let train = subset(&data.graphs, &split.train);
    let valid = subset(&data.graphs, &split.valid);
    if let Some(missing) = (0..dims.m).find(|&c| !train.iter().any(|g| g.label == c)) {
        return Err(Error::EmptySplit(format!(
            "train (class {})",
            data.labels[missing]
        )));
    }
    if valid.is_empty() {
        return Err(Error::EmptySplit("valid".into()));
    }
    say!(
        w,
        "train={} valid={} test={}",
        train.len(),
        valid.len(),
        split.test.len()
    );

    let mut model: CgnnModel<f32> = init_model(dims, cfg.seed)?;
    model.pooling = cfg.pooling;
    model.standardize = cfg.standardize;
    let (model, report) = fit_from(model, &train, &valid, &cfg.train_config())?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let ckpt = Checkpoint::new(model, data.labels.clone())?;
    ckpt.save(&out_dir.join(CHECKPOINT_FILE))?;
    write_atomic(&out_dir.join(REPORT_FILE), report.to_csv().as_bytes())?;
    match report.best() {
        Some(best) => say!(
            w,
            "best epoch {} of {}: valid_loss={:.6} valid_accuracy={:.4}{}",
            best.epoch,
            report.epochs.len(),
            best.valid_loss,
            best.valid_accuracy,
            if report.stopped_early {
                " (stopped early)"
            } else {
                ""
            }
        ),
        None => say!(w, "no epochs run"),
    }
    say!(w, "wrote {}", out_dir.join(CHECKPOINT_FILE).display());
    Ok((ckpt, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalSplit {
    #[default]
    Test,
    All,
}

impl FromStr for EvalSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "test" => Ok(EvalSplit::Test),
            "all" => Ok(EvalSplit::All),
            _ => Err(Error::InvalidConfig(format!(
                "unknown split `{s}` (test|all)"
            ))),
        }
    }
}

/// Score a checkpoint on a dataset split; prints the report and writes the
/// row-normalized confusion matrix to `heatmap`.
pub fn evaluate(
    dataset: &Path,
    checkpoint: &Path,
    split: EvalSplit,
    heatmap: &Path,
    cfg: &RunConfig,
    w: &mut dyn Write,
) -> Result<EvalReport> {
    let data = Dataset::load(dataset)?;
    let ckpt = Checkpoint::load(checkpoint)?;
    ckpt.model.ensure_compatible(data.p, data.num_classes())?;
    let graphs = match split {
        EvalSplit::All => data.graphs,
        EvalSplit::Test => subset(
            &data.graphs,
            &split_dataset(&data.graphs, cfg.split_seed).test,
        ),
    };
    if graphs.is_empty() {
        return Err(Error::EmptySplit(match split {
            EvalSplit::Test => "test".into(),
            EvalSplit::All => "all".into(),
        }));
    }
    let preds: Vec<usize> = predict_graphs(&ckpt.model, &graphs)?
        .iter()
        .map(|p| p.class)
        .collect();
    let truths: Vec<usize> = graphs.iter().map(|g| g.label).collect();
    let cm = confusion(&preds, &truths, ckpt.model.dims.m)?.with_labels(&ckpt.labels)?;
    let rep = report(&cm, cfg.average)?;
    say!(w, "{rep}");
    emit_heatmap_csv(&cm, heatmap)?;
    say!(w, "wrote {}", heatmap.display());
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionPrediction {
    pub session: FiveTuple,
    pub class: usize,
    pub label: String,
    pub confidence: f32,
    pub probs: Vec<f32>,
}

/// Classify every session of one capture.
pub fn predict(
    pcap: &Path,
    checkpoint: &Path,
    probs_csv: Option<&Path>,
    cfg: &RunConfig,
    w: &mut dyn Write,
) -> Result<Vec<SessionPrediction>> {
    let ckpt = Checkpoint::load(checkpoint)?;
    let mut opts = cfg.ingest_options();
    opts.clean.p = ckpt.model.dims.p;
    let (sessions, _) = ingest_pcap(&read_file(pcap)?, 0, &opts)?;
    if sessions.is_empty() {
        return Err(Error::NoSessions);
    }
    let graphs: Vec<ChainedGraph> = sessions.iter().map(|s| s.graph.clone()).collect();
    let preds = predict_graphs(&ckpt.model, &graphs)?;
    let out: Vec<SessionPrediction> = sessions
        .iter()
        .zip(preds)
        .map(|(s, p)| SessionPrediction {
            session: s.session,
            class: p.class,
            label: ckpt.labels[p.class].clone(),
            confidence: p.probs[p.class],
            probs: p.probs,
        })
        .collect();
    for p in &out {
        say!(w, "{}\t{}\t{:.4}", p.session, p.label, p.confidence);
    }
    if let Some(path) = probs_csv {
        let mut csv = String::from("graph_id,session,label");
        for l in &ckpt.labels {
            let _ = write!(csv, ",p_{l}");
        }
        csv.push('\n');
        for (i, p) in out.iter().enumerate() {
            let _ = write!(csv, "{i},{},{}", p.session, p.label);
            for v in &p.probs {
                let _ = write!(csv, ",{v}");
            }
            csv.push('\n');
        }
        write_atomic(path, csv.as_bytes())?;
    }
    Ok(out)
}

/// Graph-count per label and vertex-count histogram of a dataset.
pub fn histograms(data: &Dataset) -> (Vec<usize>, BTreeMap<usize, usize>) {
    let mut per_label = vec![0; data.num_classes()];
    let mut vertices = BTreeMap::new();
    for g in &data.graphs {
        per_label[g.label] += 1;
        *vertices.entry(g.n()).or_insert(0) += 1;
    }
    (per_label, vertices)
}

/// Describe a dataset or checkpoint file, detected by its magic.
pub fn inspect(path: &Path, w: &mut dyn Write) -> Result<()> {
    let bytes = read_file(path)?;
    let magic = bytes.get(..4).unwrap_or(&bytes);
    if magic == DATASET_MAGIC {
        let data = Dataset::from_bytes(&bytes)?;
        let (per_label, vertices) = histograms(&data);
        say!(
            w,
            "dataset p={} classes={} graphs={}",
            data.p,
            data.num_classes(),
            data.graphs.len()
        );
        for (i, (name, count)) in data.labels.iter().zip(per_label).enumerate() {
            say!(w, "  label {i} {name}: {count} graphs");
        }
        say!(w, "vertices per graph (n: graphs):");
        for (n, count) in vertices {
            say!(w, "  {n}: {count}");
        }
    } else if magic == CHECKPOINT_MAGIC {
        let ckpt = Checkpoint::from_bytes(&bytes)?;
        let d = ckpt.model.dims;
        say!(
            w,
            "checkpoint p={} d1={} d2={} m={} k1={} k2={} layers={}",
            d.p,
            d.d1,
            d.d2,
            d.m,
            d.k1,
            d.k2,
            d.layers
        );
        say!(
            w,
            "pooling={} standardize={} parameters={}",
            ckpt.model.pooling,
            ckpt.model.standardize,
            ckpt.model.params.len()
        );
        for (i, name) in ckpt.labels.iter().enumerate() {
            say!(w, "  label {i} {name}");
        }
    } else {
        return Err(Error::BadMagic {
            expected: "CGD1 or CGM1",
            found: magic.iter().map(|b| format!("{b:02x}")).collect(),
        });
    }
    Ok(())
}
