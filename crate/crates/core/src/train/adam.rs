use crate::model::{CgnnModel, Parameters};
use crate::Real;

use super::TrainConfig;

/// First and second moment estimates for every parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub first: Parameters<T>,
    pub second: Parameters<T>,
    pub step: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new(model: &CgnnModel<T>) -> Self {
        AdamState {
            first: model.params.zeros_like(),
            second: model.params.zeros_like(),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update.
pub fn adam_step<T: Real>(
    model: &mut CgnnModel<T>,
    grads: &Parameters<T>,
    state: &mut AdamState<T>,
    config: &TrainConfig,
) {
    state.step += 1;
    let cast = |v: f64| T::from_f64(v).unwrap();
    let (b1, b2) = (cast(config.adam_beta1), cast(config.adam_beta2));
    let lr = cast(config.learning_rate);
    let eps = cast(config.adam_eps);
    let t = state.step as i32;
    let correct1 = T::one() - b1.powi(t);
    let correct2 = T::one() - b2.powi(t);

    let params = model.params.slices_mut();
    let firsts = state.first.slices_mut();
    let seconds = state.second.slices_mut();
    for (((p, g), m), v) in params
        .into_iter()
        .zip(grads.slices())
        .zip(firsts)
        .zip(seconds)
    {
        for i in 0..p.len() {
            m[i] = b1 * m[i] + (T::one() - b1) * g[i];
            v[i] = b2 * v[i] + (T::one() - b2) * g[i] * g[i];
            let m_hat = m[i] / correct1;
            let v_hat = v[i] / correct2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}
