//! Run configuration: flat `key = value` text, overridable from flags.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::CleanOptions;
use crate::metrics::Averaging;
use crate::model::{ModelDims, PoolKind};
use crate::pipeline::IngestOptions;
use crate::train::TrainConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub p: usize,
    pub d1: usize,
    pub d2: usize,
    pub layers: usize,
    pub k1: usize,
    pub k2: usize,
    pub pooling: PoolKind,
    pub standardize: bool,
    pub fraction: f64,
    pub drop_dns: bool,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub patience: usize,
    pub seed: u64,
    pub split_seed: u64,
    pub threads: usize,
    pub average: Averaging,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        let d = ModelDims::new(2);
        RunConfig {
            p: d.p,
            d1: d.d1,
            d2: d.d2,
            layers: d.layers,
            k1: d.k1,
            k2: d.k2,
            pooling: PoolKind::Avg,
            standardize: false,
            fraction: 1.0,
            drop_dns: false,
            batch_size: t.batch_size,
            max_epochs: t.max_epochs,
            lr: t.learning_rate,
            beta1: t.adam_beta1,
            beta2: t.adam_beta2,
            eps: t.adam_eps,
            patience: t.patience,
            seed: t.seed,
            split_seed: 0,
            threads: 1,
            average: Averaging::Macro,
        }
    }
}

fn parse_value<V: FromStr>(key: &str, value: &str) -> Result<V> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::InvalidConfig(format!(
            "bad value `{value}` for `{key}` (true|false)"
        ))),
    }
}

impl RunConfig {
    pub const KEYS: [&'static str; 21] = [
        "p",
        "d1",
        "d2",
        "layers",
        "k1",
        "k2",
        "pooling",
        "standardize",
        "fraction",
        "drop_dns",
        "batch_size",
        "max_epochs",
        "lr",
        "beta1",
        "beta2",
        "eps",
        "patience",
        "seed",
        "split_seed",
        "threads",
        "average",
    ];

    /// Parse `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", no + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "p" => self.p = parse_value(key, value)?,
            "d1" => self.d1 = parse_value(key, value)?,
            "d2" => self.d2 = parse_value(key, value)?,
            "layers" => self.layers = parse_value(key, value)?,
            "k1" => self.k1 = parse_value(key, value)?,
            "k2" => self.k2 = parse_value(key, value)?,
            "pooling" => self.pooling = value.parse()?,
            "standardize" => self.standardize = parse_bool(key, value)?,
            "fraction" => self.fraction = parse_value(key, value)?,
            "drop_dns" => self.drop_dns = parse_bool(key, value)?,
            "batch_size" => self.batch_size = parse_value(key, value)?,
            "max_epochs" => self.max_epochs = parse_value(key, value)?,
            "lr" => self.lr = parse_value(key, value)?,
            "beta1" => self.beta1 = parse_value(key, value)?,
            "beta2" => self.beta2 = parse_value(key, value)?,
            "eps" => self.eps = parse_value(key, value)?,
            "patience" => self.patience = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "split_seed" => self.split_seed = parse_value(key, value)?,
            "threads" => self.threads = parse_value(key, value)?,
            "average" => self.average = value.parse()?,
            _ => return Err(Error::InvalidConfig(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        // m is checked once a dataset is known.
        self.dims(2).validate()?;
        self.train_config().validate()?;
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fraction must be in (0, 1], got {}",
                self.fraction
            )));
        }
        if self.threads == 0 {
            return Err(Error::InvalidConfig("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn dims(&self, m: usize) -> ModelDims {
        ModelDims {
            p: self.p,
            d1: self.d1,
            d2: self.d2,
            m,
            k1: self.k1,
            k2: self.k2,
            layers: self.layers,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            batch_size: self.batch_size,
            max_epochs: self.max_epochs,
            learning_rate: self.lr,
            adam_beta1: self.beta1,
            adam_beta2: self.beta2,
            adam_eps: self.eps,
            patience: self.patience,
            seed: self.seed,
        }
    }

    pub fn ingest_options(&self) -> IngestOptions {
        IngestOptions {
            clean: CleanOptions {
                p: self.p,
                drop_dns: self.drop_dns,
            },
            fraction: self.fraction,
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let values: [String; 21] = [
            self.p.to_string(),
            self.d1.to_string(),
            self.d2.to_string(),
            self.layers.to_string(),
            self.k1.to_string(),
            self.k2.to_string(),
            self.pooling.to_string(),
            self.standardize.to_string(),
            self.fraction.to_string(),
            self.drop_dns.to_string(),
            self.batch_size.to_string(),
            self.max_epochs.to_string(),
            self.lr.to_string(),
            self.beta1.to_string(),
            self.beta2.to_string(),
            self.eps.to_string(),
            self.patience.to_string(),
            self.seed.to_string(),
            self.split_seed.to_string(),
            self.threads.to_string(),
            self.average.to_string(),
        ];
        for (k, v) in Self::KEYS.iter().zip(values) {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
