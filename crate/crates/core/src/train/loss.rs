use ndarray::Array2;

use crate::error::{Error, Result};
use crate::Real;

pub const PROB_FLOOR: f64 = 1e-12;

/// Mean over graphs of `-ln(p_true)`, with probabilities floored at 1e-12.
pub fn cross_entropy<T: Real>(probs: &Array2<T>, labels: &[usize]) -> Result<T> {
    if probs.nrows() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows but {} labels",
            probs.nrows(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Ok(T::zero());
    }
    let floor = T::from_f64(PROB_FLOOR).unwrap();
    let m = probs.ncols();
    let mut total = T::zero();
    for (row, &label) in probs.rows().into_iter().zip(labels) {
        if label >= m {
            return Err(Error::LabelOutOfRange { label, classes: m });
        }
        total -= row[label].max(floor).ln();
    }
    Ok(total / T::from_usize(labels.len()).unwrap())
}
