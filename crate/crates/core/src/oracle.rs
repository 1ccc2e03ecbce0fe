//! Brute-force reference: dense assembly of `A` and `B` by explicit Kronecker
//! products and dense LU solves. Independent of the fast path; it builds its
//! own 1D matrices and shares only grid types with the rest of the crate.

use faer::linalg::solvers::PartialPivLu;
use faer::prelude::*;
use faer::Mat;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{check_len, Error, Result};
use crate::grid::{BoundaryKind, Grid};
use crate::matrix::TriCornerMatrix;

/// Largest `N` the oracle will factor densely.
pub const ORACLE_SIZE_LIMIT: usize = 20_000;

/// Reciprocal condition proxy below which a dense factorisation is declared singular.
const SINGULAR_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenseOperator {
    A,
    B,
}

/// Dense `A` and `B` for one grid, `ω` and `x_1` boundary kind.
pub struct DenseProblem {
    pub grid: Grid,
    pub omega: f64,
    pub a: Mat<C64>,
    pub b: Mat<C64>,
}

pub struct DenseSolution {
    pub u: Vec<C64>,
    /// `‖M u − f‖₂ / ‖f‖₂` with the dense matrix.
    pub residual: f64,
}

/// Dense 1D stiffness and mass written straight from the element formulas.
pub fn dense_pencil_1d(n: usize, omega: f64, bc: BoundaryKind) -> (Mat<C64>, Mat<C64>) {
    let h = 1.0 / (n - 1) as f64;
    let mut k = Mat::<C64>::zeros(n, n);
    let mut m = Mat::<C64>::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = C64::new(2.0 / h, 0.0);
        m[(i, i)] = C64::new(4.0 * h / 6.0, 0.0);
        let j = (i + 1) % n;
        if i + 1 < n || bc == BoundaryKind::Periodic {
            k[(i, j)] = C64::new(-1.0 / h, 0.0);
            k[(j, i)] = C64::new(-1.0 / h, 0.0);
            m[(i, j)] = C64::new(h / 6.0, 0.0);
            m[(j, i)] = C64::new(h / 6.0, 0.0);
        }
    }
    if bc != BoundaryKind::Periodic {
        let end = match bc {
            BoundaryKind::Absorbing => C64::new(1.0, -omega * h) / h,
            _ => C64::new(1.0 / h, 0.0),
        };
        for i in [0, n - 1] {
            k[(i, i)] = end;
            m[(i, i)] = C64::new(2.0 * h / 6.0, 0.0);
        }
    }
    (k, m)
}

/// Dense Kronecker product.
pub fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Dense copy of a structured 1D factor.
pub fn dense_from_tricorner(t: &TriCornerMatrix) -> Mat<C64> {
    let n = t.n();
    Mat::from_fn(n, n, |i, j| t.get(i, j))
}

/// `(K_1 − σ M_1) ⊗ ΠM + M_1 ⊗ Σ K_j ⊗ ..`, all dense.
pub fn dense_separable(k1: &Mat<C64>, m1: &Mat<C64>, sigma: C64, cross: &[(Mat<C64>, Mat<C64>)]) -> Mat<C64> {
    let shifted = Mat::from_fn(k1.nrows(), k1.ncols(), |i, j| k1[(i, j)] - sigma * m1[(i, j)]);
    let mut mass = cross[0].1.clone();
    for (_, m) in &cross[1..] {
        mass = kron(&mass, m);
    }
    let mut stiff: Option<Mat<C64>> = None;
    for j in 0..cross.len() {
        let mut term = if j == 0 { cross[0].0.clone() } else { cross[0].1.clone() };
        for (i, (k, m)) in cross.iter().enumerate().skip(1) {
            term = kron(&term, if i == j { k } else { m });
        }
        stiff = Some(match stiff {
            None => term,
            Some(s) => &s + &term,
        });
    }
    let stiff = stiff.expect("at least one cross direction");
    &kron(&shifted, &mass) + &kron(m1, &stiff)
}

impl DenseProblem {
    pub fn new(grid: &Grid, omega: f64, bc_x1: BoundaryKind) -> Result<Self> {
        let size = grid.len();
        if size > ORACLE_SIZE_LIMIT {
            return Err(Error::SizeLimit {
                size,
                limit: ORACLE_SIZE_LIMIT,
            });
        }
        let n = grid.n();
        let cross: Vec<(Mat<C64>, Mat<C64>)> = n[1..]
            .iter()
            .map(|&nj| dense_pencil_1d(nj, 0.0, BoundaryKind::Neumann))
            .collect();
        let sigma = C64::new(omega * omega, 0.0);
        let (k1, m1) = dense_pencil_1d(n[0], omega, bc_x1);
        let (k1b, m1b) = dense_pencil_1d(n[0], omega, BoundaryKind::Periodic);
        Ok(Self {
            grid: grid.clone(),
            omega,
            a: dense_separable(&k1, &m1, sigma, &cross),
            b: dense_separable(&k1b, &m1b, sigma, &cross),
        })
    }

    pub fn matrix(&self, which: DenseOperator) -> &Mat<C64> {
        match which {
            DenseOperator::A => &self.a,
            DenseOperator::B => &self.b,
        }
    }
}

/// Dense LU solve with partial pivoting of an arbitrary square matrix.
pub fn dense_solve_matrix(mat: &Mat<C64>, f: &[C64]) -> Result<DenseSolution> {
    let n = mat.nrows();
    if n > ORACLE_SIZE_LIMIT {
        return Err(Error::SizeLimit {
            size: n,
            limit: ORACLE_SIZE_LIMIT,
        });
    }
    check_len(n, f.len())?;
    let lu: PartialPivLu<C64> = mat.partial_piv_lu();
    let u_factor = lu.U();
    let pivots: Vec<f64> = (0..n).map(|i| u_factor[(i, i)].norm()).collect();
    let max = pivots.iter().cloned().fold(0.0, f64::max);
    let min = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > SINGULAR_RATIO * max) {
        return Err(Error::SingularMatrix {
            ratio: if max > 0.0 { min / max } else { 0.0 },
        });
    }
    let rhs = Mat::from_fn(n, 1, |i, _| f[i]);
    let x = lu.solve(&rhs);
    let u: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();
    let r = mat * &x;
    let num: f64 = (0..n).map(|i| (r[(i, 0)] - f[i]).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(DenseSolution {
        u,
        residual: if den > 0.0 { num / den } else { num },
    })
}

pub fn dense_solve(p: &DenseProblem, which: DenseOperator, f: &[C64]) -> Result<DenseSolution> {
    dense_solve_matrix(p.matrix(which), f)
}

/// Full dense solve restricted to the `x_1 ∈ {1, n_1}` planes, `[first, last]`.
pub fn dense_partial_solution(p: &DenseProblem, which: DenseOperator, f: &[C64]) -> Result<Vec<C64>> {
    let sol = dense_solve(p, which, f)?;
    Ok(end_planes(&p.grid, &sol.u))
}

/// The two `x_1` end planes of a field, `[first, last]`.
pub fn end_planes(grid: &Grid, u: &[C64]) -> Vec<C64> {
    let m = grid.plane_len();
    let n1 = grid.n()[0];
    let mut out = u[..m].to_vec();
    out.extend_from_slice(&u[(n1 - 1) * m..]);
    out
}

/// Generalised eigenpairs of `K v = λ M v` by a generic dense route:
/// eigenvalues of `M⁻¹K` from a complex Schur form, eigenvectors by inverse
/// iteration on `K − λM`. Eigenvectors are unit 2-norm columns.
pub fn dense_eigensolve_pencil(k: &Mat<C64>, m: &Mat<C64>) -> Result<(Vec<C64>, Mat<C64>)> {
    let n = k.nrows();
    if n > 512 {
        return Err(Error::SizeLimit { size: n, limit: 512 });
    }
    let mk = m.partial_piv_lu().solve(k);
    let dm = DMatrix::<C64>::from_fn(n, n, |i, j| mk[(i, j)]);
    let lambdas: Vec<C64> = nalgebra::Schur::try_new(dm, 1e-15, 10_000)
        .ok_or_else(|| Error::EigensolverFailure("Schur iteration did not converge".into()))?
        .eigenvalues()
        .ok_or_else(|| Error::EigensolverFailure("no eigenvalues".into()))?
        .iter()
        .cloned()
        .collect();
    let scale = lambdas.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut vectors = Mat::<C64>::zeros(n, n);
    for (l, &lam) in lambdas.iter().enumerate() {
        let shift = lam + C64::new(1e-10 * scale, 1e-10 * scale);
        let op = Mat::from_fn(n, n, |i, j| k[(i, j)] - shift * m[(i, j)]);
        let lu = op.partial_piv_lu();
        let mut x = Mat::from_fn(n, 1, |i, _| C64::new(1.0 + (i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()));
        for _ in 0..3 {
            let y = lu.solve(&(m * &x));
            let norm: f64 = (0..n).map(|i| y[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
            x = Mat::from_fn(n, 1, |i, _| y[(i, 0)] / norm);
        }
        for i in 0..n {
            vectors[(i, l)] = x[(i, 0)];
        }
    }
    Ok((lambdas, vectors))
}
