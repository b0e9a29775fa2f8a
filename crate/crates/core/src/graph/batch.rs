use std::ops::Range;

use ndarray::{s, Array2};

use super::chain::ChainedGraph;
use super::propagation::PropagationMatrix;
use crate::error::{Error, Result};
use crate::Real;

/// Several chains packed into one disjoint graph: features stacked row-wise,
/// propagation block-diagonal, and segment offsets marking where each graph
/// starts.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchedGraph<T> {
    pub features: Array2<T>,
    pub offsets: Vec<usize>,
    pub labels: Vec<usize>,
    pub propagation: PropagationMatrix,
}

impl<T: Real> BatchedGraph<T> {
    /// Assemble from an already-stacked feature matrix and per-graph sizes.
    pub fn from_parts(features: Array2<T>, sizes: &[usize], labels: Vec<usize>) -> Result<Self> {
        if sizes.len() != labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} sizes but {} labels",
                sizes.len(),
                labels.len()
            )));
        }
        if let Some(g) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::EmptySegment(g));
        }
        let total: usize = sizes.iter().sum();
        if total != features.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "segments cover {total} rows, features have {}",
                features.nrows()
            )));
        }
        let offsets = sizes
            .iter()
            .scan(0, |acc, &n| {
                let start = *acc;
                *acc += n;
                Some(start)
            })
            .collect();
        Ok(BatchedGraph {
            features,
            offsets,
            labels,
            propagation: PropagationMatrix::block_diagonal(sizes),
        })
    }

    pub fn graph_count(&self) -> usize {
        self.offsets.len()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }

    pub fn segments(&self) -> Vec<Range<usize>> {
        segments(&self.offsets, self.features.nrows())
    }

    /// Feature rows of graph `g`.
    pub fn graph_features(&self, g: usize) -> ndarray::ArrayView2<'_, T> {
        let r = &self.segments()[g];
        self.features.slice(s![r.clone(), ..])
    }
}

pub(crate) fn segments(offsets: &[usize], total: usize) -> Vec<Range<usize>> {
    offsets
        .iter()
        .enumerate()
        .map(|(g, &start)| start..offsets.get(g + 1).copied().unwrap_or(total))
        .collect()
}

/// Pack graphs of equal feature width into one batch.
pub fn batch_graphs<'a, T: Real>(
    graphs: impl IntoIterator<Item = &'a ChainedGraph>,
    standardize: bool,
) -> Result<BatchedGraph<T>> {
    let graphs: Vec<&ChainedGraph> = graphs.into_iter().collect();
    let p = graphs.first().ok_or(Error::EmptyDataset("batch"))?.p();
    if let Some(bad) = graphs.iter().find(|g| g.p() != p) {
        return Err(Error::MixedFeatureWidth {
            expected: p,
            found: bad.p(),
        });
    }
    let sizes: Vec<usize> = graphs.iter().map(|g| g.n()).collect();
    let total: usize = sizes.iter().sum();
    let mut features = Array2::<T>::zeros((total, p));
    let mut row = 0;
    for g in &graphs {
        features
            .slice_mut(s![row..row + g.n(), ..])
            .assign(&g.feature_matrix::<T>(standardize));
        row += g.n();
    }
    BatchedGraph::from_parts(features, &sizes, graphs.iter().map(|g| g.label).collect())
}
