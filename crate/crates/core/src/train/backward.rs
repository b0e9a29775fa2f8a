//! Reverse-mode gradients of the mean cross-entropy through the network.
//!
//! With `G` graphs in the batch:
//! - logits: `(probs - onehot) / G`
//! - head: `dW = Y^T dL`, `db = sum_g dL_g`, `dY = dL W^T`
//! - pooling: avg spreads `dY_g / N_g` over the segment, sum copies `dY_g`,
//!   max routes each column to the first row holding the maximum
//! - graph layer `H = ReLU(P theta)`, `P = S^k H_prev`:
//!   `dZ = dH * [Z > 0]`, `dtheta = P^T dZ`, `dH_prev = S^k (dZ theta^T)`
//!   (S is symmetric, so its transpose is itself).

use ndarray::{s, Array2, Axis};

use crate::error::{Error, Result};
use crate::graph::BatchedGraph;
use crate::model::{CgnnModel, ForwardPass, Parameters, PoolKind};
use crate::Real;

use super::loss::cross_entropy;

/// Gradient of the mean cross-entropy w.r.t. the logits.
pub fn logit_gradient<T: Real>(probs: &Array2<T>, labels: &[usize]) -> Result<Array2<T>> {
    if probs.nrows() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows but {} labels",
            probs.nrows(),
            labels.len()
        )));
    }
    let m = probs.ncols();
    let scale = T::one() / T::from_usize(labels.len().max(1)).unwrap();
    let mut d = probs.clone();
    for (mut row, &label) in d.rows_mut().into_iter().zip(labels) {
        if label >= m {
            return Err(Error::LabelOutOfRange { label, classes: m });
        }
        row[label] -= T::one();
        row.mapv_inplace(|v| v * scale);
    }
    Ok(d)
}

/// Gradients for a batch given its cached forward pass.
pub fn backward<T: Real>(
    model: &CgnnModel<T>,
    batch: &BatchedGraph<T>,
    pass: &ForwardPass<T>,
) -> Result<Parameters<T>> {
    let params = &model.params;
    let layers = params.thetas.len();
    if pass.pre_activations.len() != layers || pass.propagated.len() != layers {
        return Err(Error::ShapeMismatch(
            "forward pass does not match model depth".into(),
        ));
    }
    let d_logits = logit_gradient(&pass.probs, &batch.labels)?;

    let d_w = pass.pooled.t().dot(&d_logits);
    let d_b = d_logits.sum_axis(Axis(0));
    let d_pooled = d_logits.dot(&params.w.t());

    let mut d_hidden = Array2::<T>::zeros(pass.hidden.raw_dim());
    for (g, seg) in pass.segments.iter().enumerate() {
        let dy = d_pooled.row(g);
        match model.pooling {
            PoolKind::Avg | PoolKind::Sum => {
                let scale = match model.pooling {
                    PoolKind::Avg => T::one() / T::from_usize(seg.len()).unwrap(),
                    _ => T::one(),
                };
                for mut row in d_hidden.slice_mut(s![seg.clone(), ..]).rows_mut() {
                    row.scaled_add(scale, &dy);
                }
            }
            PoolKind::Max => {
                let h = pass.hidden.slice(s![seg.clone(), ..]);
                for j in 0..h.ncols() {
                    let col = h.column(j);
                    let mut best = 0;
                    for (i, &v) in col.iter().enumerate() {
                        if v > col[best] {
                            best = i;
                        }
                    }
                    d_hidden[[seg.start + best, j]] += dy[j];
                }
            }
        }
    }

    let mut d_thetas = vec![Array2::zeros((0, 0)); layers];
    let mut d_h = d_hidden;
    for l in (0..layers).rev() {
        let z = &pass.pre_activations[l];
        let d_z =
            ndarray::Zip::from(&d_h)
                .and(z)
                .map_collect(|&d, &zv| if zv > T::zero() { d } else { T::zero() });
        d_thetas[l] = pass.propagated[l].t().dot(&d_z);
        if l > 0 {
            let d_prop = d_z.dot(&params.thetas[l].t());
            d_h = batch.propagation.apply_pow(&d_prop, model.dims.hops(l))?;
        }
    }
    Ok(Parameters {
        thetas: d_thetas,
        w: d_w,
        b: d_b,
    })
}

/// Forward, loss, and gradients in one call.
pub fn loss_and_gradients<T: Real>(
    model: &CgnnModel<T>,
    batch: &BatchedGraph<T>,
) -> Result<(T, Parameters<T>)> {
    let pass = model.forward_pass(batch)?;
    let loss = cross_entropy(&pass.probs, &batch.labels)?;
    let grads = backward(model, batch, &pass)?;
    Ok((loss, grads))
}
