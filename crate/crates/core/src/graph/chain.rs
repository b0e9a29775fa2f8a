use ndarray::Array2;

use crate::error::{Error, Result};
use crate::ingest::CleanPacket;
use crate::Real;

/// One session as a chain: vertex `i` is packet `i`, with undirected edges
/// between consecutive vertices only. Features are kept as raw bytes
/// (row-major, `n x p`) and widened at model input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainedGraph {
    features: Vec<u8>,
    p: usize,
    pub label: usize,
}

impl ChainedGraph {
    /// `features` holds `n * p` bytes, `n >= 1`.
    pub fn new(p: usize, features: Vec<u8>, label: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::ShapeMismatch(
                "feature width must be positive".into(),
            ));
        }
        if features.is_empty() {
            return Err(Error::EmptySession);
        }
        if !features.len().is_multiple_of(p) {
            return Err(Error::ShapeMismatch(format!(
                "{} feature bytes is not a multiple of width {p}",
                features.len()
            )));
        }
        Ok(ChainedGraph { features, p, label })
    }

    pub fn n(&self) -> usize {
        self.features.len() / self.p
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn edge_count(&self) -> usize {
        self.n() - 1
    }

    /// Edges `(i, i + 1)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> {
        (1..self.n()).map(|i| (i - 1, i))
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.features[i * self.p..(i + 1) * self.p]
    }

    pub fn bytes(&self) -> &[u8] {
        &self.features
    }

    /// Widen to reals, optionally dividing by 255.
    pub fn feature_matrix<T: Real>(&self, standardize: bool) -> Array2<T> {
        let scale = if standardize { 1.0 / 255.0 } else { 1.0 };
        Array2::from_shape_fn((self.n(), self.p), |(i, j)| {
            T::from_f64(f64::from(self.features[i * self.p + j]) * scale).unwrap()
        })
    }
}

/// Stack cleaned packets (all of equal width) into a chained graph.
pub fn build_chain_graph(packets: &[CleanPacket], label: usize) -> Result<ChainedGraph> {
    let first = packets.first().ok_or(Error::EmptySession)?;
    let p = first.bytes.len();
    let mut features = Vec::with_capacity(p * packets.len());
    for pkt in packets {
        if pkt.bytes.len() != p {
            return Err(Error::MixedFeatureWidth {
                expected: p,
                found: pkt.bytes.len(),
            });
        }
        features.extend_from_slice(&pkt.bytes);
    }
    ChainedGraph::new(p, features, label)
}

/// Keep the first `ceil(fraction * n)` vertices (at least one).
pub fn truncate_graph(g: &ChainedGraph, fraction: f64) -> Result<ChainedGraph> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "packet fraction {fraction} not in (0, 1]"
        )));
    }
    // Guard against 0.3 * 10 = 3.0000000000000004 rounding up to 4.
    let keep = ((fraction * g.n() as f64) - 1e-9).ceil().max(1.0) as usize;
    let keep = keep.min(g.n());
    ChainedGraph::new(g.p, g.features[..keep * g.p].to_vec(), g.label)
}
