//! Fast direct solver for the Helmholtz equation `−Δu − ω²u = f` on 2D and 3D
//! rectangular grids, discretised with bilinear/trilinear elements, with
//! first-order absorbing ends along `x_1` and Neumann conditions elsewhere.
//!
//! The solver replaces the absorbing ends by periodic ones, solves the periodic
//! problem with FFTs, corrects the end-plane values with a partial solution in
//! the exact eigenbasis of the `x_1` pencil, and solves the periodic problem once
//! more with the corrected right-hand side. Cost is `O(N log N)`.
//!
//! ```
//! use helmfft::{Grid, BoundaryKind, SolverPlan2D, build_operator_a};
//! use num_complex::Complex64;
//!
//! let grid = Grid::new_2d(17, 9).unwrap();
//! let omega = 2.0 * std::f64::consts::PI;
//! let plan = SolverPlan2D::new(&grid, omega, BoundaryKind::Absorbing).unwrap();
//! let f = vec![Complex64::new(1.0, 0.0); grid.len()];
//! let u = plan.solve(&f).unwrap();
//!
//! let a = build_operator_a(&grid, omega, &[BoundaryKind::Absorbing, BoundaryKind::Neumann]).unwrap();
//! let r = a.apply(&u).unwrap();
//! let err: f64 = r.iter().zip(&f).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
//! assert!(err < 1e-9 * (grid.len() as f64).sqrt());
//! ```

pub mod assembly;
mod dd;
pub mod error;
pub mod grid;
pub mod matrix;
pub mod oracle;
pub mod solver2d;
pub mod solver3d;
pub mod spectral;
pub mod tridiag;

pub use assembly::{
    assemble_pencil, assemble_periodic_pencil, build_correction, build_operator_a, build_operator_b,
    CorrectionMatrix, CrossTerms, Pencil1D, PencilDifference,
};
pub use error::{Error, Result};
pub use grid::{BoundaryKind, Grid};
pub use matrix::{kron_apply, KroneckerOperator, TriCornerMatrix};
pub use solver2d::{PartialSolution, Scratch, SolverPlan2D, Which};
pub use solver3d::SolverPlan3D;
pub use spectral::{EigenBasis, LineTransformPlan, RestrictedDirection};

pub use num_complex::Complex64;

/// Relative residual `‖A u − f‖₂ / ‖f‖₂`, evaluated matrix-free. Returns the
/// absolute residual norm when `f = 0`.
pub fn relative_residual(op: &KroneckerOperator, u: &[Complex64], f: &[Complex64]) -> Result<f64> {
    let au = op.apply(u)?;
    let num: f64 = au.iter().zip(f).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(if den > 0.0 { num / den } else { num })
}
