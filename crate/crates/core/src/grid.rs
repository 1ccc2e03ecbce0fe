//! Tensor-product grids on the unit box and the lexicographic unknown ordering.
//!
//! Unknowns are numbered with `x_1` slowest and `x_d` fastest, so a factor
//! acting on `x_1` alone sees `N / n_1` contiguous slabs of equal length.

use crate::error::{Error, Result};

/// Boundary condition at both ends of one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// First-order absorbing condition `∂u/∂n − iωu = 0`.
    Absorbing,
    Neumann,
    /// Wrap-around coupling; only for auxiliary pencils.
    Periodic,
}

/// Equidistant grid on `[0,1]^d` with `n_j` points and spacing `h_j = 1/(n_j - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: Vec<usize>,
    h: Vec<f64>,
}

impl Grid {
    pub fn new(n: &[usize]) -> Result<Self> {
        if !(2..=3).contains(&n.len()) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 2 or 3, got {}",
                n.len()
            )));
        }
        if let Some(&bad) = n.iter().find(|&&nj| nj < 3) {
            return Err(Error::InvalidGrid(format!(
                "every direction needs at least 3 points, got {bad}"
            )));
        }
        let h = n.iter().map(|&nj| 1.0 / (nj - 1) as f64).collect();
        Ok(Self { n: n.to_vec(), h })
    }

    pub fn new_2d(n1: usize, n2: usize) -> Result<Self> {
        Self::new(&[n1, n2])
    }

    pub fn new_3d(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        Self::new(&[n1, n2, n3])
    }

    pub fn dims(&self) -> usize {
        self.n.len()
    }

    pub fn n(&self) -> &[usize] {
        &self.n
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Total number of unknowns `N`.
    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of unknowns on one `x_1 = const` plane, `N / n_1`.
    pub fn plane_len(&self) -> usize {
        self.n[1..].iter().product()
    }

    /// Flat offset of a one-based multi-index.
    pub fn lex_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.n.len() {
            return Err(Error::DimensionMismatch {
                expected: self.n.len(),
                actual: idx.len(),
            });
        }
        let mut flat = 0;
        for (direction, (&i, &nj)) in idx.iter().zip(&self.n).enumerate() {
            if i == 0 || i > nj {
                return Err(Error::IndexOutOfRange {
                    direction: direction + 1,
                    index: i,
                    len: nj,
                });
            }
            flat = flat * nj + (i - 1);
        }
        Ok(flat)
    }

    /// Inverse of [`Grid::lex_index`]; returns one-based indices.
    pub fn multi_index(&self, flat: usize) -> Result<Vec<usize>> {
        let total = self.len();
        if flat >= total {
            return Err(Error::IndexOutOfRange {
                direction: 0,
                index: flat,
                len: total,
            });
        }
        let mut idx = vec![0; self.n.len()];
        let mut rem = flat;
        for (slot, &nj) in idx.iter_mut().zip(&self.n).rev() {
            *slot = rem % nj + 1;
            rem /= nj;
        }
        Ok(idx)
    }
}
