//! The CGNN network: graph layers of `ReLU(S^k H theta)`, a per-graph
//! pooling readout, and a softmax classifier `softmax(W^T y + b)`.

use std::ops::Range;

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dims::{ModelDims, PoolKind};
use super::layers::{argmax, pool, project, relu, segment_ranges, softmax};
use crate::error::{Error, Result};
use crate::graph::BatchedGraph;
use crate::Real;

/// Trainable weights. Also used for gradients and optimizer moments, which
/// share the same shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters<T> {
    /// One matrix per graph layer; `thetas[0]` is `p x d1`.
    pub thetas: Vec<Array2<T>>,
    /// `readout_width x m`.
    pub w: Array2<T>,
    pub b: Array1<T>,
}

impl<T: Real> Parameters<T> {
    pub fn zeros_like(&self) -> Self {
        Parameters {
            thetas: self
                .thetas
                .iter()
                .map(|t| Array2::zeros(t.raw_dim()))
                .collect(),
            w: Array2::zeros(self.w.raw_dim()),
            b: Array1::zeros(self.b.raw_dim()),
        }
    }

    /// Flat views in checkpoint order: thetas, then W, then b.
    pub fn slices(&self) -> Vec<&[T]> {
        let mut out: Vec<&[T]> = self.thetas.iter().map(|t| t.as_slice().unwrap()).collect();
        out.push(self.w.as_slice().unwrap());
        out.push(self.b.as_slice().unwrap());
        out
    }

    pub fn slices_mut(&mut self) -> Vec<&mut [T]> {
        let mut out: Vec<&mut [T]> = self
            .thetas
            .iter_mut()
            .map(|t| t.as_slice_mut().unwrap())
            .collect();
        out.push(self.w.as_slice_mut().unwrap());
        out.push(self.b.as_slice_mut().unwrap());
        out
    }

    pub fn len(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn all_finite(&self) -> bool {
        self.slices()
            .iter()
            .all(|s| s.iter().all(|v| v.is_finite()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgnnModel<T> {
    pub dims: ModelDims,
    pub pooling: PoolKind,
    /// Divide input bytes by 255 before the first layer.
    pub standardize: bool,
    pub params: Parameters<T>,
}

/// Glorot-uniform weights, zero bias, deterministic per seed.
pub fn init_model<T: Real>(dims: ModelDims, seed: u64) -> Result<CgnnModel<T>> {
    dims.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = |rows: usize, cols: usize| {
        let bound = (6.0 / (rows + cols) as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| T::from_f64(rng.random_range(-bound..=bound)).unwrap())
            .collect();
        Array2::from_shape_vec((rows, cols), data).unwrap()
    };
    let widths = dims.widths();
    let thetas = widths.windows(2).map(|w| uniform(w[0], w[1])).collect();
    let w = uniform(dims.readout_width(), dims.m);
    Ok(CgnnModel {
        dims,
        pooling: PoolKind::Avg,
        standardize: false,
        params: Parameters {
            thetas,
            w,
            b: Array1::zeros(dims.m),
        },
    })
}

/// Intermediate values of one forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardPass<T> {
    pub segments: Vec<Range<usize>>,
    /// Per graph layer: `S^k H_{l-1}`.
    pub propagated: Vec<Array2<T>>,
    /// Per graph layer: `S^k H_{l-1} theta_l`, before ReLU.
    pub pre_activations: Vec<Array2<T>>,
    /// Output of the last graph layer.
    pub hidden: Array2<T>,
    /// `G x readout_width`.
    pub pooled: Array2<T>,
    pub logits: Array2<T>,
    pub probs: Array2<T>,
}

impl<T: Real> CgnnModel<T> {
    pub fn theta(&self, layer: usize) -> &Array2<T> {
        &self.params.thetas[layer]
    }

    /// Check that a batch or dataset with width `p` and `m` classes fits.
    pub fn ensure_compatible(&self, p: usize, m: usize) -> Result<()> {
        if p != self.dims.p || m != self.dims.m {
            return Err(Error::DimsMismatch(format!(
                "model expects p={}, m={}; got p={p}, m={m}",
                self.dims.p, self.dims.m
            )));
        }
        Ok(())
    }

    pub fn forward_pass(&self, batch: &BatchedGraph<T>) -> Result<ForwardPass<T>> {
        if batch.p() != self.dims.p {
            return Err(Error::DimsMismatch(format!(
                "model expects p={}, batch has p={}",
                self.dims.p,
                batch.p()
            )));
        }
        let segments = segment_ranges(&batch.offsets, batch.features.nrows())?;
        let s = &batch.propagation;
        let mut propagated = Vec::with_capacity(self.dims.layers);
        let mut pre_activations = Vec::with_capacity(self.dims.layers);
        let mut h = batch.features.clone();
        for (l, theta) in self.params.thetas.iter().enumerate() {
            let k = self.dims.hops(l);
            let prop = s.apply_pow(&h, k)?;
            let z = project(&prop, theta)?;
            h = relu(&z);
            propagated.push(prop);
            pre_activations.push(z);
        }
        let pooled = pool(&h, &batch.offsets, self.pooling)?;
        let logits = pooled.dot(&self.params.w) + &self.params.b;
        let mut probs = Array2::zeros(logits.raw_dim());
        for (g, row) in logits.axis_iter(Axis(0)).enumerate() {
            probs.row_mut(g).assign(&softmax(row)?);
        }
        Ok(ForwardPass {
            segments,
            propagated,
            pre_activations,
            hidden: h,
            pooled,
            logits,
            probs,
        })
    }

    /// Per-graph class distributions, `G x m`.
    pub fn forward(&self, batch: &BatchedGraph<T>) -> Result<Array2<T>> {
        Ok(self.forward_pass(batch)?.probs)
    }

    /// Most probable class per graph (lowest id on ties).
    pub fn predict_labels(&self, batch: &BatchedGraph<T>) -> Result<Vec<usize>> {
        Ok(self
            .forward(batch)?
            .axis_iter(Axis(0))
            .map(argmax)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{batch_graphs, ChainedGraph};
    use ndarray::arr2;

    fn tiny_dims() -> ModelDims {
        ModelDims {
            p: 6,
            d1: 5,
            d2: 4,
            m: 2,
            k1: 1,
            k2: 1,
            layers: 2,
        }
    }

    #[test]
    fn init_is_deterministic() {
        let a: CgnnModel<f32> = init_model(ModelDims::new(3), 7).unwrap();
        let b: CgnnModel<f32> = init_model(ModelDims::new(3), 7).unwrap();
        assert_eq!(a, b);
        let c: CgnnModel<f32> = init_model(ModelDims::new(3), 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_shapes_bounds_and_zero_bias() {
        let m: CgnnModel<f32> = init_model(ModelDims::new(41), 1).unwrap();
        assert_eq!(m.theta(0).dim(), (1500, 516));
        assert_eq!(m.theta(1).dim(), (516, 256));
        assert_eq!(m.params.w.dim(), (256, 41));
        assert!(m.params.b.iter().all(|&v| v == 0.0));
        // sqrt(6 / (1500 + 516)) = 0.054554...
        let bound = (6.0f64 / 2016.0).sqrt() as f32;
        assert!((bound - 0.054_554).abs() < 1e-5);
        assert!(m.theta(0).iter().all(|v| v.abs() <= bound));
        assert!(m.theta(0).iter().any(|v| v.abs() > 0.9 * bound));
        assert!(m.params.all_finite());
    }

    #[test]
    fn init_rejects_bad_dims() {
        assert!(init_model::<f32>(
            ModelDims {
                d1: 0,
                ..tiny_dims()
            },
            0
        )
        .is_err());
    }

    #[test]
    fn zero_graph_zero_head_is_uniform() {
        for m in [2, 3, 7] {
            let dims = ModelDims { m, ..tiny_dims() };
            let mut model: CgnnModel<f64> = init_model(dims, 0).unwrap();
            model.params.w.fill(0.0);
            let g = ChainedGraph::new(6, vec![0; 6], 0).unwrap();
            let out = model.forward(&batch_graphs([&g], false).unwrap()).unwrap();
            assert_eq!(out.dim(), (1, m));
            assert!(out.iter().all(|&v| (v - 1.0 / m as f64).abs() < 1e-15));
        }
    }

    #[test]
    fn six_vertex_example_runs_end_to_end() {
        let model: CgnnModel<f32> = init_model(tiny_dims(), 3).unwrap();
        let g = ChainedGraph::new(6, (0..36).map(|i| (i * 7) as u8).collect(), 1).unwrap();
        let batch = batch_graphs([&g], false).unwrap();
        let pass = model.forward_pass(&batch).unwrap();
        assert_eq!(pass.pre_activations[0].dim(), (6, 5));
        assert_eq!(pass.hidden.dim(), (6, 4));
        assert_eq!(pass.pooled.dim(), (1, 4));
        assert_eq!(pass.probs.dim(), (1, 2));
        assert!((pass.probs.sum() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn one_and_three_layer_models_run() {
        for layers in [1, 3] {
            let dims = ModelDims {
                layers,
                ..tiny_dims()
            };
            let model: CgnnModel<f32> = init_model(dims, 3).unwrap();
            assert_eq!(model.params.thetas.len(), layers);
            let g = ChainedGraph::new(6, vec![5; 18], 0).unwrap();
            let out = model.forward(&batch_graphs([&g], false).unwrap()).unwrap();
            assert!((out.sum() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn width_mismatch_is_reported() {
        let model: CgnnModel<f32> = init_model(tiny_dims(), 3).unwrap();
        let g = ChainedGraph::new(4, vec![0; 4], 0).unwrap();
        assert!(matches!(
            model.forward(&batch_graphs([&g], false).unwrap()),
            Err(Error::DimsMismatch(_))
        ));
        assert!(model.ensure_compatible(6, 2).is_ok());
        assert!(model.ensure_compatible(6, 3).is_err());
    }

    #[test]
    fn parameter_views_cover_everything() {
        let mut model: CgnnModel<f64> = init_model(tiny_dims(), 3).unwrap();
        assert_eq!(model.params.len(), 6 * 5 + 5 * 4 + 4 * 2 + 2);
        for s in model.params.slices_mut() {
            s.fill(1.0);
        }
        assert_eq!(model.params.b, ndarray::arr1(&[1.0, 1.0]));
        assert_eq!(model.params.zeros_like().thetas[1], arr2(&[[0.0; 4]; 5]));
    }
}
