//! `CGD1` dataset files.
//!
//! Layout, all integers little-endian u32:
//! magic `CGD1`, version, p, num_classes, num_classes label names
//! (length-prefixed UTF-8), num_graphs, then per graph: label, n, n*p bytes.

use std::path::Path;

use super::chain::ChainedGraph;
use crate::codec::{check_magic, put_str, put_u32, read_file, write_atomic, ByteReader};
use crate::error::{Error, Result};

pub const DATASET_MAGIC: &[u8; 4] = b"CGD1";
pub const DATASET_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub p: usize,
    pub labels: Vec<String>,
    pub graphs: Vec<ChainedGraph>,
}

impl Dataset {
    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let body: usize = self.graphs.iter().map(|g| 8 + g.bytes().len()).sum();
        let mut out = Vec::with_capacity(20 + body);
        out.extend_from_slice(DATASET_MAGIC);
        put_u32(&mut out, DATASET_VERSION);
        put_u32(&mut out, self.p as u32);
        put_u32(&mut out, self.labels.len() as u32);
        for l in &self.labels {
            put_str(&mut out, l);
        }
        put_u32(&mut out, self.graphs.len() as u32);
        for g in &self.graphs {
            if g.p() != self.p {
                return Err(Error::MixedFeatureWidth {
                    expected: self.p,
                    found: g.p(),
                });
            }
            if g.label >= self.labels.len() {
                return Err(Error::LabelOutOfRange {
                    label: g.label,
                    classes: self.labels.len(),
                });
            }
            put_u32(&mut out, g.label as u32);
            put_u32(&mut out, g.n() as u32);
            out.extend_from_slice(g.bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        check_magic(&mut r, DATASET_MAGIC, "CGD1")?;
        let version = r.u32()?;
        if version != DATASET_VERSION {
            return Err(Error::VersionMismatch {
                expected: DATASET_VERSION,
                found: version,
            });
        }
        let p = r.u32()? as usize;
        let num_classes = r.u32()? as usize;
        let labels = (0..num_classes)
            .map(|_| r.string())
            .collect::<Result<Vec<_>>>()?;
        let num_graphs = r.u32()? as usize;
        let mut graphs = Vec::with_capacity(num_graphs.min(r.remaining() / 8));
        for i in 0..num_graphs {
            let label = r.u32()? as usize;
            if label >= num_classes {
                return Err(Error::LabelOutOfRange {
                    label,
                    classes: num_classes,
                });
            }
            let n = r.u32()? as usize;
            if n == 0 || p == 0 {
                return Err(Error::CorruptLength(format!("graph {i} has n={n}, p={p}")));
            }
            let len = n
                .checked_mul(p)
                .ok_or_else(|| Error::CorruptLength(format!("graph {i} size overflows")))?;
            graphs.push(ChainedGraph::new(p, r.take(len)?.to_vec(), label)?);
        }
        r.finish()?;
        Ok(Dataset { p, labels, graphs })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&read_file(path)?)
    }
}
