use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::chain::ChainedGraph;

/// Index sets into the graph list, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetSplit {
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified 8:1:1 split. Per label, `floor(n/10)` graphs go to each of
/// validation and test; the remainder goes to training.
pub fn split_dataset(graphs: &[ChainedGraph], seed: u64) -> DatasetSplit {
    let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, g) in graphs.iter().enumerate() {
        by_label.entry(g.label).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = DatasetSplit::default();
    for idx in by_label.values_mut() {
        idx.shuffle(&mut rng);
        let tenth = idx.len() / 10;
        split.test.extend_from_slice(&idx[..tenth]);
        split.valid.extend_from_slice(&idx[tenth..2 * tenth]);
        split.train.extend_from_slice(&idx[2 * tenth..]);
    }
    split.train.sort_unstable();
    split.valid.sort_unstable();
    split.test.sort_unstable();
    split
}
