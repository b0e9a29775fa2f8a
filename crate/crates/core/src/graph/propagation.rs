//! Symmetric-normalized adjacency with self-loops for chain graphs.
//!
//! For a chain, `D^-1/2 (A + I) D^-1/2` is tridiagonal and depends only on
//! the vertex count: augmented degree 2 at the ends, 3 inside, and 1 for an
//! isolated vertex. Batches of chains are block-diagonal, which is still
//! tridiagonal with zero couplings across block boundaries.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationMatrix {
    diag: Vec<f64>,
    /// `off[i] = S[i][i+1] = S[i+1][i]`.
    off: Vec<f64>,
}

fn chain_degree(i: usize, n: usize) -> f64 {
    match n {
        1 => 1.0,
        _ if i == 0 || i == n - 1 => 2.0,
        _ => 3.0,
    }
}

impl PropagationMatrix {
    pub fn chain(n: usize) -> Self {
        Self::block_diagonal(&[n])
    }

    /// Block-diagonal propagation for consecutive chains of the given sizes.
    pub fn block_diagonal(sizes: &[usize]) -> Self {
        let total: usize = sizes.iter().sum();
        let mut diag = Vec::with_capacity(total);
        let mut off = Vec::with_capacity(total.saturating_sub(1));
        for &n in sizes {
            if n == 0 {
                continue;
            }
            if !diag.is_empty() {
                off.push(0.0);
            }
            for i in 0..n {
                let d = chain_degree(i, n);
                diag.push(1.0 / d);
                if i + 1 < n {
                    off.push(1.0 / (d * chain_degree(i + 1, n)).sqrt());
                }
            }
        }
        PropagationMatrix { diag, off }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    /// Stored nonzeros of row `i` as `(column, value)`.
    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let left = (i > 0).then(|| (i - 1, self.off[i - 1]));
        let right = (i + 1 < self.n()).then(|| (i + 1, self.off[i]));
        left.into_iter()
            .chain(Some((i, self.diag[i])))
            .chain(right)
            .filter(|&(_, v)| v != 0.0)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.n(), self.n()), |(i, j)| self.get(i, j))
    }

    /// `S X`.
    pub fn apply<T: Real>(&self, x: &Array2<T>) -> Result<Array2<T>> {
        let n = self.n();
        if x.nrows() != n {
            return Err(Error::ShapeMismatch(format!(
                "S is {n}x{n}, input has {} rows",
                x.nrows()
            )));
        }
        let mut out = Array2::<T>::zeros(x.raw_dim());
        for i in 0..n {
            let mut row = out.row_mut(i);
            row.scaled_add(T::from_f64(self.diag[i]).unwrap(), &x.row(i));
            if i > 0 && self.off[i - 1] != 0.0 {
                row.scaled_add(T::from_f64(self.off[i - 1]).unwrap(), &x.row(i - 1));
            }
            if i + 1 < n && self.off[i] != 0.0 {
                row.scaled_add(T::from_f64(self.off[i]).unwrap(), &x.row(i + 1));
            }
        }
        Ok(out)
    }

    /// `S^k X`.
    pub fn apply_pow<T: Real>(&self, x: &Array2<T>, k: usize) -> Result<Array2<T>> {
        let mut cur = self.apply(x)?;
        for _ in 1..k {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }
}
