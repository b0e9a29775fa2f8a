use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_LAYERS: usize = 3;

/// Layer widths and propagation depth.
///
/// With `layers == 1` only `d1` is used; with `layers == 3` the third graph
/// layer maps `d2 -> d2` and shares `k2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelDims {
    pub p: usize,
    pub d1: usize,
    pub d2: usize,
    pub m: usize,
    pub k1: usize,
    pub k2: usize,
    pub layers: usize,
}

impl ModelDims {
    /// Default widths (1500 -> 516 -> 256) for `m` classes.
    pub fn new(m: usize) -> Self {
        ModelDims {
            p: 1500,
            d1: 516,
            d2: 256,
            m,
            k1: 1,
            k2: 1,
            layers: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("p", self.p),
            ("d1", self.d1),
            ("d2", self.d2),
            ("k1", self.k1),
            ("k2", self.k2),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidConfig(format!("{name} must be positive")));
        }
        if self.m < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 classes, got {}",
                self.m
            )));
        }
        if !(1..=MAX_LAYERS).contains(&self.layers) {
            return Err(Error::InvalidConfig(format!(
                "layers must be 1..={MAX_LAYERS}, got {}",
                self.layers
            )));
        }
        Ok(())
    }

    /// Input and output width of every graph layer: `[p, d1, d2, ...]`.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.p, self.d1];
        w.extend(std::iter::repeat_n(self.d2, self.layers - 1));
        w
    }

    pub fn hops(&self, layer: usize) -> usize {
        if layer == 0 {
            self.k1
        } else {
            self.k2
        }
    }

    /// Width of the pooled graph vector.
    pub fn readout_width(&self) -> usize {
        *self.widths().last().unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PoolKind {
    #[default]
    Avg,
    Max,
    Sum,
}

impl PoolKind {
    pub(crate) fn code(self) -> u32 {
        match self {
            PoolKind::Avg => 0,
            PoolKind::Max => 1,
            PoolKind::Sum => 2,
        }
    }

    pub(crate) fn from_code(c: u32) -> Option<Self> {
        [PoolKind::Avg, PoolKind::Max, PoolKind::Sum]
            .into_iter()
            .find(|k| k.code() == c)
    }
}

impl fmt::Display for PoolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoolKind::Avg => "avg",
            PoolKind::Max => "max",
            PoolKind::Sum => "sum",
        })
    }
}

impl FromStr for PoolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "avg" => Ok(PoolKind::Avg),
            "max" => Ok(PoolKind::Max),
            "sum" => Ok(PoolKind::Sum),
            _ => Err(Error::InvalidConfig(format!(
                "unknown pooling `{s}` (avg|max|sum)"
            ))),
        }
    }
}
