//! Training: cross-entropy loss, backpropagation, Adam, and the epoch loop
//! with patience-based early stopping.

pub mod adam;
pub mod backward;
pub mod fit;
pub mod loss;

pub use adam::{adam_step, AdamState};
pub use backward::{backward, logit_gradient, loss_and_gradients};
pub use fit::{
    evaluate, fit, fit_from, predict, EarlyStopping, EpochStats, Prediction, TrainConfig,
    TrainReport,
};
pub use loss::cross_entropy;
