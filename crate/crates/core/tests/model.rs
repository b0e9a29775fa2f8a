mod common;

use cgnn::graph::{batch_graphs, BatchedGraph, PropagationMatrix};
use cgnn::model::{init_model, CgnnModel, ModelDims, PoolKind};
use cgnn::train::{cross_entropy, loss_and_gradients, predict};
use cgnn::ChainedGraph;
use common::*;
use ndarray::{Array2, Axis};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dims(layers: usize, k1: usize, k2: usize, m: usize) -> ModelDims {
    ModelDims {
        p: 6,
        d1: 5,
        d2: 4,
        m,
        k1,
        k2,
        layers,
    }
}

#[test]
fn forward_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (case, pooling) in (0..24).zip(
        [PoolKind::Avg, PoolKind::Max, PoolKind::Sum]
            .into_iter()
            .cycle(),
    ) {
        let d = dims(1 + case % 3, 1 + case % 2, 1 + (case / 2) % 3, 2 + case % 4);
        let mut model: CgnnModel<f64> = init_model(d, case as u64).unwrap();
        model.pooling = pooling;
        model.standardize = case % 2 == 0;
        let graphs: Vec<ChainedGraph> = (0..5).map(|_| random_graph(&mut rng, 6, 9, d.m)).collect();
        let probs = model
            .forward(&batch_graphs(&graphs, model.standardize).unwrap())
            .unwrap();
        for (g, graph) in graphs.iter().enumerate() {
            let x = graph.feature_matrix::<f64>(model.standardize);
            let want = dense_forward(&model, &x);
            for (c, w) in want.iter().enumerate() {
                assert!((probs[[g, c]] - w).abs() < 1e-12, "case {case} graph {g}");
            }
        }
    }
}

#[test]
fn block_diagonal_matches_dense_blocks() {
    let sizes = [1, 4, 2, 3];
    let s = PropagationMatrix::block_diagonal(&sizes);
    let total: usize = sizes.iter().sum();
    let mut want = Array2::<f64>::zeros((total, total));
    let mut at = 0;
    for &n in &sizes {
        want.slice_mut(ndarray::s![at..at + n, at..at + n])
            .assign(&dense_propagation(n));
        at += n;
    }
    let got = s.to_dense();
    for (a, b) in got.iter().zip(want.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn gradient_check_every_architecture() {
    const H: f64 = 1e-4;
    for (trial, pooling) in (0..12u64).zip(
        [PoolKind::Avg, PoolKind::Sum, PoolKind::Max]
            .into_iter()
            .cycle(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let d = dims(
            1 + trial as usize % 3,
            1 + trial as usize % 2,
            2 - trial as usize % 2,
            3,
        );
        let mut model: CgnnModel<f64> = init_model(d, trial).unwrap();
        model.pooling = pooling;
        let sizes = [rng.random_range(1..5), rng.random_range(1..5)];
        let x = Array2::from_shape_fn((sizes[0] + sizes[1], 6), |_| rng.random_range(-1.0..1.0));
        let batch = BatchedGraph::from_parts(x, &sizes, vec![0, 2]).unwrap();
        let (_, grads) = loss_and_gradients(&model, &batch).unwrap();
        for block in 0..grads.slices().len() {
            for i in 0..grads.slices()[block].len() {
                let eval = |delta: f64| {
                    let mut probe = model.clone();
                    probe.params.slices_mut()[block][i] += delta;
                    loss_and_gradients(&probe, &batch).unwrap().0
                };
                let numeric = (eval(H) - eval(-H)) / (2.0 * H);
                let analytic = grads.slices()[block][i];
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-7);
                assert!(
                    rel <= 1e-4,
                    "trial {trial} block {block} index {i}: {analytic} vs {numeric}"
                );
            }
        }
    }
}

#[test]
fn single_vertex_graph_is_handled() {
    let model: CgnnModel<f64> = init_model(dims(2, 1, 1, 2), 1).unwrap();
    let g = ChainedGraph::new(6, vec![9; 6], 1).unwrap();
    let probs = model.forward(&batch_graphs([&g], false).unwrap()).unwrap();
    let want = dense_forward(&model, &g.feature_matrix(false));
    assert!((probs[[0, 0]] - want[0]).abs() < 1e-12);
}

#[test]
fn predictions_follow_forward() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let model: CgnnModel<f32> = init_model(
        ModelDims {
            p: 30,
            d1: 8,
            d2: 6,
            m: 4,
            k1: 1,
            k2: 1,
            layers: 2,
        },
        4,
    )
    .unwrap();
    let graphs: Vec<ChainedGraph> = (0..70).map(|_| random_graph(&mut rng, 30, 6, 4)).collect();
    let preds = predict(&model, &graphs).unwrap();
    assert_eq!(preds.len(), 70);
    let probs = model
        .forward(&batch_graphs(&graphs, false).unwrap())
        .unwrap();
    for (p, row) in preds.iter().zip(probs.axis_iter(Axis(0))) {
        assert_eq!(p.probs, row.to_vec());
        assert!(row.iter().all(|&v| v <= row[p.class]));
    }
    assert_eq!(
        preds.iter().map(|p| p.graph_id).collect::<Vec<_>>(),
        (0..70).collect::<Vec<_>>()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outputs_are_distributions(seed in any::<u64>(), layers in 1usize..4, pool in 0usize..3, std in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model: CgnnModel<f32> = init_model(ModelDims { p: 40, d1: 12, d2: 7, m: 5, k1: 2, k2: 1, layers }, seed).unwrap();
        model.pooling = [PoolKind::Avg, PoolKind::Max, PoolKind::Sum][pool];
        model.standardize = std;
        let graphs: Vec<ChainedGraph> = (0..8).map(|_| random_graph(&mut rng, 40, 10, 5)).collect();
        let probs = model.forward(&batch_graphs(&graphs, std).unwrap()).unwrap();
        for row in probs.axis_iter(Axis(0)) {
            prop_assert!((row.sum() - 1.0).abs() <= 1e-6);
            prop_assert!(row.iter().all(|&v| v >= 0.0));
        }
        let loss = cross_entropy(&probs, &graphs.iter().map(|g| g.label).collect::<Vec<_>>()).unwrap();
        prop_assert!(loss.is_finite() && loss >= 0.0);
    }

    #[test]
    fn batch_order_only_permutes_rows(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model: CgnnModel<f64> = init_model(dims(2, 1, 1, 3), seed).unwrap();
        let graphs: Vec<ChainedGraph> = (0..6).map(|_| random_graph(&mut rng, 6, 7, 3)).collect();
        let fwd = model.forward(&batch_graphs(&graphs, false).unwrap()).unwrap();
        let rev = model.forward(&batch_graphs(graphs.iter().rev(), false).unwrap()).unwrap();
        for g in 0..6 {
            for c in 0..3 {
                prop_assert!((fwd[[g, c]] - rev[[5 - g, c]]).abs() < 1e-12);
            }
        }
    }
}
