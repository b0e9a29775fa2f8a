//! `CGM1` checkpoints.
//!
//! Little-endian: magic, version, p, d1, d2, m, k1, k2, layers, pooling code,
//! standardize flag, label count and length-prefixed names, then every weight
//! as f32 row-major in the order theta_1.., W, b.

use std::path::Path;

use ndarray::{Array1, Array2};

use super::dims::{ModelDims, PoolKind};
use super::network::{CgnnModel, Parameters};
use crate::codec::{check_magic, put_str, put_u32, read_file, write_atomic, ByteReader};
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"CGM1";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: CgnnModel<f32>,
    pub labels: Vec<String>,
}

impl Checkpoint {
    pub fn new(model: CgnnModel<f32>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != model.dims.m {
            return Err(Error::DimsMismatch(format!(
                "{} label names for m={}",
                labels.len(),
                model.dims.m
            )));
        }
        Ok(Checkpoint { model, labels })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let d = &self.model.dims;
        let mut out = Vec::with_capacity(64 + 4 * self.model.params.len());
        out.extend_from_slice(CHECKPOINT_MAGIC);
        put_u32(&mut out, CHECKPOINT_VERSION);
        for v in [d.p, d.d1, d.d2, d.m, d.k1, d.k2, d.layers] {
            put_u32(&mut out, v as u32);
        }
        put_u32(&mut out, self.model.pooling.code());
        put_u32(&mut out, u32::from(self.model.standardize));
        put_u32(&mut out, self.labels.len() as u32);
        for l in &self.labels {
            put_str(&mut out, l);
        }
        for s in self.model.params.slices() {
            for v in s {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        check_magic(&mut r, CHECKPOINT_MAGIC, "CGM1")?;
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::VersionMismatch {
                expected: CHECKPOINT_VERSION,
                found: version,
            });
        }
        let mut f = [0usize; 7];
        for v in &mut f {
            *v = r.u32()? as usize;
        }
        let [p, d1, d2, m, k1, k2, layers] = f;
        let dims = ModelDims {
            p,
            d1,
            d2,
            m,
            k1,
            k2,
            layers,
        };
        dims.validate()
            .map_err(|e| Error::DimsMismatch(format!("checkpoint dims invalid: {e}")))?;
        let code = r.u32()?;
        let pooling = PoolKind::from_code(code)
            .ok_or_else(|| Error::CorruptLength(format!("unknown pooling code {code}")))?;
        let standardize = match r.u32()? {
            0 => false,
            1 => true,
            v => return Err(Error::CorruptLength(format!("standardize flag {v}"))),
        };
        let n_labels = r.u32()? as usize;
        if n_labels != m {
            return Err(Error::DimsMismatch(format!(
                "{n_labels} label names for m={m}"
            )));
        }
        let labels = (0..n_labels)
            .map(|_| r.string())
            .collect::<Result<Vec<_>>>()?;

        let widths = dims.widths();
        let expected: usize =
            widths.windows(2).map(|w| w[0] * w[1]).sum::<usize>() + dims.readout_width() * m + m;
        if r.remaining() != expected * 4 {
            return Err(Error::CorruptLength(format!(
                "expected {} weight bytes, found {}",
                expected * 4,
                r.remaining()
            )));
        }
        let mut read_vec = |len: usize| -> Result<Vec<f32>> { (0..len).map(|_| r.f32()).collect() };
        let thetas = widths
            .windows(2)
            .map(|w| Ok(Array2::from_shape_vec((w[0], w[1]), read_vec(w[0] * w[1])?).unwrap()))
            .collect::<Result<Vec<_>>>()?;
        let w = Array2::from_shape_vec(
            (dims.readout_width(), m),
            read_vec(dims.readout_width() * m)?,
        )
        .unwrap();
        let b = Array1::from_vec(read_vec(m)?);
        r.finish()?;
        Ok(Checkpoint {
            model: CgnnModel {
                dims,
                pooling,
                standardize,
                params: Parameters { thetas, w, b },
            },
            labels,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&read_file(path)?)
    }
}

pub fn save_checkpoint(model: &CgnnModel<f32>, labels: &[String], path: &Path) -> Result<()> {
    Checkpoint::new(model.clone(), labels.to_vec())?.save(path)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    Checkpoint::load(path)
}
