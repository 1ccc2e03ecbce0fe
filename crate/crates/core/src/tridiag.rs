//! Unpivoted LU for the shifted tridiagonal blocks `α M + K` of the
//! diagonalised systems. Small pivots are reported, never repaired.

use num_complex::Complex64 as C64;

use crate::assembly::Pencil1D;
use crate::error::{Error, Result};

/// Relative pivot threshold against the largest block entry.
pub const PIVOT_TOL: f64 = 1e-14;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Block `α M + K` of a pencil, entry access without materialising it.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedBlock<'a> {
    pub alpha: C64,
    pub pencil: &'a Pencil1D,
}

impl ShiftedBlock<'_> {
    fn diag(&self, i: usize) -> C64 {
        self.alpha * self.pencil.m.diag()[i] + self.pencil.k.diag()[i]
    }

    fn off(&self, i: usize) -> C64 {
        self.alpha * self.pencil.m.sup()[i] + self.pencil.k.sup()[i]
    }

    fn max_abs(&self) -> f64 {
        let n = self.pencil.n;
        (0..n)
            .map(|i| self.diag(i).norm())
            .chain((0..n - 1).map(|i| self.off(i).norm()))
            .fold(0.0, f64::max)
    }
}

/// Stored factors: multipliers of `L` and inverted pivots of `U`.
/// The super-diagonal of `U` is the block's own and is read on demand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TridiagLu {
    alpha: C64,
    mult: Vec<C64>,
    inv_pivot: Vec<C64>,
}

impl TridiagLu {
    pub fn factor(block: ShiftedBlock<'_>, index: usize) -> Result<Self> {
        let mut lu = Self::default();
        lu.refactor(block, index)?;
        Ok(lu)
    }

    /// Factors `block` reusing the existing allocations.
    pub fn refactor(&mut self, block: ShiftedBlock<'_>, index: usize) -> Result<()> {
        let n = block.pencil.n;
        self.alpha = block.alpha;
        self.mult.clear();
        self.mult.resize(n - 1, ZERO);
        self.inv_pivot.clear();
        self.inv_pivot.resize(n, ZERO);
        let threshold = PIVOT_TOL * block.max_abs();
        let mut pivot = block.diag(0);
        for i in 0..n {
            if i > 0 {
                let m = block.off(i - 1) * self.inv_pivot[i - 1];
                self.mult[i - 1] = m;
                pivot = block.diag(i) - m * block.off(i - 1);
            }
            if !(pivot.norm() >= threshold) || pivot.norm() == 0.0 {
                return Err(Error::SingularBlock {
                    block: index,
                    row: i,
                    pivot: pivot.norm(),
                    threshold,
                    outer: None,
                });
            }
            self.inv_pivot[i] = 1.0 / pivot;
        }
        Ok(())
    }

    pub fn solve_in_place(&self, pencil: &Pencil1D, rhs: &mut [C64]) {
        let block = ShiftedBlock {
            alpha: self.alpha,
            pencil,
        };
        let n = rhs.len();
        for i in 1..n {
            let prev = rhs[i - 1];
            rhs[i] -= self.mult[i - 1] * prev;
        }
        rhs[n - 1] *= self.inv_pivot[n - 1];
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] = (rhs[i] - block.off(i) * next) * self.inv_pivot[i];
        }
    }
}


/// Factor-and-solve in one go, reusing `work` between calls.
pub fn solve_shifted_in_place(
    block: ShiftedBlock<'_>,
    index: usize,
    rhs: &mut [C64],
    work: &mut TridiagLu,
) -> Result<()> {
    work.refactor(block, index)?;
    work.solve_in_place(block.pencil, rhs);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_pencil, BoundaryKind};

    #[test]
    fn solves_shifted_block() {
        let p = assemble_pencil(7, 1.0 / 6.0, 0.0, BoundaryKind::Neumann).unwrap();
        let alpha = C64::new(-3.0, 0.7);
        let want: Vec<C64> = (0..7).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect();
        let a = p.m.combine(alpha, &p.k, C64::new(1.0, 0.0));
        let mut rhs = a.matvec(&want);
        let lu = TridiagLu::factor(ShiftedBlock { alpha, pencil: &p }, 0).unwrap();
        let mut rhs2 = rhs.clone();
        lu.solve_in_place(&p, &mut rhs);
        solve_shifted_in_place(ShiftedBlock { alpha, pencil: &p }, 0, &mut rhs2, &mut TridiagLu::default()).unwrap();
        for ((x, y), w) in rhs.iter().zip(&rhs2).zip(&want) {
            assert!((x - w).norm() < 1e-12);
            assert_eq!(x, y);
        }
    }

    #[test]
    fn neumann_stiffness_is_singular() {
        let p = assemble_pencil(9, 0.125, 0.0, BoundaryKind::Neumann).unwrap();
        let err = TridiagLu::factor(ShiftedBlock { alpha: C64::new(0.0, 0.0), pencil: &p }, 4).unwrap_err();
        assert!(matches!(err, Error::SingularBlock { block: 4, row: 8, .. }));
    }

    #[test]
    fn coercive_shift_is_well_conditioned() {
        let p = assemble_pencil(33, 1.0 / 32.0, 0.0, BoundaryKind::Neumann).unwrap();
        // α = 1 (σ = −1 relative to a zero eigenvalue): SPD block
        let lu = TridiagLu::factor(ShiftedBlock { alpha: C64::new(1.0, 0.0), pencil: &p }, 0).unwrap();
        let smallest = lu.inv_pivot.iter().map(|z| 1.0 / z.norm()).fold(f64::INFINITY, f64::min);
        assert!(smallest > 1e-3);
    }
}
