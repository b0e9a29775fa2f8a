use std::fmt::Write as _;

use ndarray::Axis;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::{adam_step, AdamState};
use super::backward::loss_and_gradients;
use super::loss::cross_entropy;
use crate::error::{Error, Result};
use crate::graph::{batch_graphs, ChainedGraph};
use crate::model::{argmax, init_model, CgnnModel, ModelDims};
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            max_epochs: 400,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            patience: 20,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if self.patience == 0 {
            return bad("patience must be at least 1".into());
        }
        for (name, b) in [
            ("adam_beta1", self.adam_beta1),
            ("adam_beta2", self.adam_beta2),
        ] {
            if !(b > 0.0 && b < 1.0) {
                return bad(format!("{name} must be in (0, 1), got {b}"));
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.adam_eps.is_nan() || self.adam_eps <= 0.0 {
            return bad(format!("adam_eps must be positive, got {}", self.adam_eps));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// 1-based.
    pub epoch: usize,
    pub train_loss: f64,
    pub valid_loss: f64,
    pub valid_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainReport {
    pub epochs: Vec<EpochStats>,
    /// 1-based; 0 when no epoch ran.
    pub best_epoch: usize,
    pub stopped_early: bool,
}

impl TrainReport {
    pub fn best(&self) -> Option<&EpochStats> {
        self.epochs.get(self.best_epoch.checked_sub(1)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,valid_loss,valid_accuracy\n");
        for e in &self.epochs {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                e.epoch, e.train_loss, e.valid_loss, e.valid_accuracy
            );
        }
        out
    }
}

/// Patience-based stopping on validation loss. An epoch counts as an
/// improvement only when its loss is strictly below the best so far.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best_loss: f64,
    best_epoch: usize,
    since_best: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    pub improved: bool,
    pub stop: bool,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience,
            best_loss: f64::INFINITY,
            best_epoch: 0,
            since_best: 0,
        }
    }

    pub fn observe(&mut self, epoch: usize, loss: f64) -> Observation {
        let improved = loss < self.best_loss;
        if improved {
            self.best_loss = loss;
            self.best_epoch = epoch;
            self.since_best = 0;
        } else {
            self.since_best += 1;
        }
        Observation {
            improved,
            stop: self.since_best >= self.patience,
        }
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    pub fn best_loss(&self) -> f64 {
        self.best_loss
    }
}

fn check_graphs(graphs: &[ChainedGraph], dims: &ModelDims) -> Result<()> {
    for g in graphs {
        if g.p() != dims.p {
            return Err(Error::DimsMismatch(format!(
                "graph width {} but model p={}",
                g.p(),
                dims.p
            )));
        }
        if g.label >= dims.m {
            return Err(Error::DimsMismatch(format!(
                "label {} but model has m={}",
                g.label, dims.m
            )));
        }
    }
    Ok(())
}

/// Mean cross-entropy and accuracy over a graph set, batched.
pub fn evaluate<T: Real>(
    model: &CgnnModel<T>,
    graphs: &[ChainedGraph],
    batch_size: usize,
) -> Result<(f64, f64)> {
    if graphs.is_empty() {
        return Err(Error::EmptyDataset("evaluation set"));
    }
    let mut loss_sum = 0.0;
    let mut correct = 0usize;
    for chunk in graphs.chunks(batch_size.max(1)) {
        let batch = batch_graphs::<T>(chunk, model.standardize)?;
        let probs = model.forward(&batch)?;
        loss_sum += cross_entropy(&probs, &batch.labels)?.to_f64().unwrap() * chunk.len() as f64;
        correct += probs
            .axis_iter(Axis(0))
            .zip(&batch.labels)
            .filter(|(row, &l)| argmax(row.view()) == l)
            .count();
    }
    let n = graphs.len() as f64;
    Ok((loss_sum / n, correct as f64 / n))
}

/// Train a freshly initialized model (seeded by `config.seed`).
pub fn fit<T: Real>(
    train: &[ChainedGraph],
    valid: &[ChainedGraph],
    dims: ModelDims,
    config: &TrainConfig,
) -> Result<(CgnnModel<T>, TrainReport)> {
    fit_from(init_model(dims, config.seed)?, train, valid, config)
}

/// Train `model` with mini-batch Adam, shuffling each epoch, and return the
/// weights from the epoch with the lowest validation loss.
pub fn fit_from<T: Real>(
    mut model: CgnnModel<T>,
    train: &[ChainedGraph],
    valid: &[ChainedGraph],
    config: &TrainConfig,
) -> Result<(CgnnModel<T>, TrainReport)> {
    config.validate()?;
    model.dims.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset("training set"));
    }
    if valid.is_empty() {
        return Err(Error::EmptyDataset("validation set"));
    }
    check_graphs(train, &model.dims)?;
    check_graphs(valid, &model.dims)?;

    let mut report = TrainReport::default();
    if config.max_epochs == 0 {
        return Ok((model, report));
    }

    // Separate stream from the one init_model consumed for the same seed.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_5eed_5eed_5eed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut adam = AdamState::new(&model);
    let mut stopper = EarlyStopping::new(config.patience);
    let mut best = model.clone();

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch = batch_graphs::<T>(chunk.iter().map(|&i| &train[i]), model.standardize)?;
            let (loss, grads) = loss_and_gradients(&model, &batch)?;
            adam_step(&mut model, &grads, &mut adam, config);
            loss_sum += loss.to_f64().unwrap() * chunk.len() as f64;
        }
        let (valid_loss, valid_accuracy) = evaluate(&model, valid, config.batch_size)?;
        let stats = EpochStats {
            epoch,
            train_loss: loss_sum / train.len() as f64,
            valid_loss,
            valid_accuracy,
        };
        log::info!(
            "epoch {epoch}: train_loss={:.6} valid_loss={valid_loss:.6} valid_acc={valid_accuracy:.4}",
            stats.train_loss
        );
        report.epochs.push(stats);

        let obs = stopper.observe(epoch, valid_loss);
        if obs.improved {
            best = model.clone();
        }
        if obs.stop {
            report.stopped_early = epoch < config.max_epochs;
            break;
        }
    }
    report.best_epoch = stopper.best_epoch();
    if report.best_epoch == 0 {
        // Validation loss was never finite; keep the final weights.
        best = model;
    }
    Ok((best, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T> {
    pub graph_id: usize,
    pub class: usize,
    pub probs: Vec<T>,
}

/// Classify each graph; ties resolve to the lowest class id.
pub fn predict<T: Real>(
    model: &CgnnModel<T>,
    graphs: &[ChainedGraph],
) -> Result<Vec<Prediction<T>>> {
    let mut out = Vec::with_capacity(graphs.len());
    for chunk in graphs.chunks(32) {
        if let Some(g) = chunk.iter().find(|g| g.p() != model.dims.p) {
            return Err(Error::DimsMismatch(format!(
                "graph width {} but model p={}",
                g.p(),
                model.dims.p
            )));
        }
        let batch = batch_graphs::<T>(chunk, model.standardize)?;
        for row in model.forward(&batch)?.axis_iter(Axis(0)) {
            out.push(Prediction {
                graph_id: out.len(),
                class: argmax(row),
                probs: row.to_vec(),
            });
        }
    }
    Ok(out)
}
