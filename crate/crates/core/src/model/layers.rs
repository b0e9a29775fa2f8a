use std::ops::Range;

use ndarray::{Array1, Array2, ArrayView1, Axis};

use super::dims::PoolKind;
use crate::error::{Error, Result};
use crate::graph::PropagationMatrix;
use crate::Real;

/// Simple graph convolution: `S^k X theta`, no activation.
pub fn sgc_layer<T: Real>(
    s: &PropagationMatrix,
    x: &Array2<T>,
    theta: &Array2<T>,
    k: usize,
) -> Result<Array2<T>> {
    if k == 0 {
        return Err(Error::ShapeMismatch(
            "propagation hops must be at least 1".into(),
        ));
    }
    project(&s.apply_pow(x, k)?, theta)
}

/// `X theta` with a shape check.
pub(crate) fn project<T: Real>(x: &Array2<T>, theta: &Array2<T>) -> Result<Array2<T>> {
    if x.ncols() != theta.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "features have width {}, theta is {}x{}",
            x.ncols(),
            theta.nrows(),
            theta.ncols()
        )));
    }
    Ok(x.dot(theta))
}

pub fn relu<T: Real>(x: &Array2<T>) -> Array2<T> {
    x.mapv(|v| if v > T::zero() { v } else { T::zero() })
}

/// Row ranges for segment start offsets over `rows` rows. Rejects offsets
/// that do not start at 0, decrease, or leave a segment empty.
pub fn segment_ranges(offsets: &[usize], rows: usize) -> Result<Vec<Range<usize>>> {
    let ranges = crate::graph::batch::segments(offsets, rows);
    if let Some(first) = ranges.first() {
        if first.start != 0 {
            return Err(Error::ShapeMismatch(format!(
                "first segment starts at row {}",
                first.start
            )));
        }
    }
    if let Some(g) = ranges.iter().position(|r| r.start >= r.end) {
        return Err(Error::EmptySegment(g));
    }
    Ok(ranges)
}

pub fn avg_pool<T: Real>(x: &Array2<T>, offsets: &[usize]) -> Result<Array2<T>> {
    pool(x, offsets, PoolKind::Avg)
}

/// Per-segment reduction of rows into one graph vector.
pub fn pool<T: Real>(x: &Array2<T>, offsets: &[usize], kind: PoolKind) -> Result<Array2<T>> {
    let ranges = segment_ranges(offsets, x.nrows())?;
    let mut out = Array2::<T>::zeros((ranges.len(), x.ncols()));
    for (g, r) in ranges.into_iter().enumerate() {
        let seg = x.slice(ndarray::s![r.clone(), ..]);
        let row = match kind {
            PoolKind::Sum => seg.sum_axis(Axis(0)),
            PoolKind::Avg => seg.sum_axis(Axis(0)) / T::from_usize(r.len()).unwrap(),
            PoolKind::Max => seg.fold_axis(Axis(0), T::neg_infinity(), |&a, &b| a.max(b)),
        };
        out.row_mut(g).assign(&row);
    }
    Ok(out)
}

/// Numerically stable softmax of one logit vector.
pub fn softmax<T: Real>(logits: ArrayView1<'_, T>) -> Result<Array1<T>> {
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("logits"));
    }
    let max = logits.fold(T::neg_infinity(), |a, &b| a.max(b));
    let exp = logits.mapv(|v| (v - max).exp());
    let total = exp.sum();
    Ok(exp / total)
}

/// `softmax(W^T y + b)`.
pub fn fc_softmax<T: Real>(
    y: ArrayView1<'_, T>,
    w: &Array2<T>,
    b: &Array1<T>,
) -> Result<Array1<T>> {
    if y.len() != w.nrows() || w.ncols() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "y has {} entries, W is {}x{}, b has {}",
            y.len(),
            w.nrows(),
            w.ncols(),
            b.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("graph vector"));
    }
    softmax((w.t().dot(&y) + b).view())
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax<T: Real>(v: ArrayView1<'_, T>) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
