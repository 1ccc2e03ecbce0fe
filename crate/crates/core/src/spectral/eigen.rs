use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use super::refine::refine_pair;
use super::EigenBasis;
use crate::assembly::{BoundaryKind, Pencil1D};
use crate::error::{Error, Result};

const MASS_EPS: f64 = 1e-14;
const TNORM_EPS: f64 = 1e-12;

/// `e^{−2πi(k−1)(l−1)/n}` for one-based `k`, `l`.
pub fn dft_entry(n: usize, k: usize, l: usize) -> C64 {
    debug_assert!((1..=n).contains(&k) && (1..=n).contains(&l));
    // reduce the exponent first so large n keeps full phase accuracy
    let e = ((k - 1) * (l - 1)) % n;
    let theta = -2.0 * std::f64::consts::PI * e as f64 / n as f64;
    C64::new(theta.cos(), theta.sin())
}

fn check_periodic(pencil: &Pencil1D) -> Result<()> {
    if pencil.bc != BoundaryKind::Periodic {
        return Err(Error::UnsupportedBoundary(
            "closed-form circulant eigenpairs need a periodic pencil".into(),
        ));
    }
    Ok(())
}

/// Symbol of a symmetric circulant at mode `l` (zero-based): `c_11 + c_1n e^{−iθ} + c_12 e^{−iθ(n−1)}`.
fn circulant_symbol(first: C64, corner: C64, next: C64, n: usize, l: usize) -> C64 {
    first + corner * dft_entry(n, l + 1, 2) + next * dft_entry(n, l + 1, n)
}

/// Eigenvalues `μ_l` of the circulant mass matrix.
pub fn circulant_mass_eigenvalues(pencil: &Pencil1D) -> Result<Vec<C64>> {
    check_periodic(pencil)?;
    let m = &pencil.m;
    let n = pencil.n;
    Ok((0..n)
        .map(|l| circulant_symbol(m.get(0, 0), m.get(0, n - 1), m.get(0, 1), n, l))
        .collect())
}

/// Generalised eigenvalues `Λ^B_l` of a circulant pencil, as the ratio of
/// the stiffness and mass symbols at `θ_l = 2π(l−1)/n`.
pub fn circulant_eigenvalues(pencil: &Pencil1D) -> Result<Vec<C64>> {
    check_periodic(pencil)?;
    let k = &pencil.k;
    let n = pencil.n;
    let mu = circulant_mass_eigenvalues(pencil)?;
    mu.iter()
        .enumerate()
        .map(|(l, &den)| {
            if den.norm() < MASS_EPS {
                return Err(Error::DegenerateMass {
                    mode: l,
                    value: den.norm(),
                });
            }
            let num = circulant_symbol(k.get(0, 0), k.get(0, n - 1), k.get(0, 1), n, l);
            Ok(num / den)
        })
        .collect()
}

/// Eigenbasis of a periodic pencil: closed-form eigenvalues, DFT columns,
/// `s_l = μ_l^{-1/2}`.
pub(crate) fn circulant_basis(pencil: &Pencil1D) -> Result<EigenBasis> {
    let lambdas = circulant_eigenvalues(pencil)?;
    let scales = circulant_mass_eigenvalues(pencil)?
        .into_iter()
        .map(|mu| 1.0 / mu.sqrt())
        .collect();
    Ok(EigenBasis::circulant(lambdas, scales))
}

/// Full eigendecomposition `K V = M V Λ` of an absorbing or Neumann pencil,
/// normalised so that `VᵀMV = I` and `VᵀKV = Λ` (plain transpose).
///
/// `M` is real SPD tridiagonal: the pencil is reduced to `C = L⁻¹ K L⁻ᵀ` with
/// `M = L Lᵀ`. Eigenvalues are returned sorted by real part, then imaginary part.
pub fn solve_pencil_eigen(pencil: &Pencil1D) -> Result<EigenBasis> {
    if pencil.bc == BoundaryKind::Periodic {
        return circulant_basis(pencil);
    }
    let n = pencil.n;
    let (ld, ls) = bidiagonal_cholesky(pencil)?;

    // X = L⁻¹ K, column by column (K is symmetric so rows and columns agree).
    let kd = pencil.k.to_dense();
    let mut x = Mat::<C64>::zeros(n, n);
    for j in 0..n {
        let mut col: Vec<C64> = (0..n).map(|i| kd[i * n + j]).collect();
        lower_solve(&ld, &ls, &mut col);
        for i in 0..n {
            x[(i, j)] = col[i];
        }
    }
    // C = L⁻¹ Xᵀ, then symmetrise against round-off.
    let mut c = Mat::<C64>::zeros(n, n);
    for j in 0..n {
        let mut col: Vec<C64> = (0..n).map(|i| x[(j, i)]).collect();
        lower_solve(&ld, &ls, &mut col);
        for i in 0..n {
            c[(i, j)] = col[i];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = (c[(i, j)] + c[(j, i)]) * 0.5;
            c[(i, j)] = avg;
            c[(j, i)] = avg;
        }
    }

    let real = c_is_real(&c);
    let (lambdas, y) = if real {
        let cr = Mat::<f64>::from_fn(n, n, |i, j| c[(i, j)].re);
        let evd = cr
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::EigensolverFailure(format!("{e:?}")))?;
        let lam: Vec<C64> = (0..n).map(|l| C64::new(evd.S()[l], 0.0)).collect();
        let u = evd.U();
        (lam, Mat::<C64>::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0)))
    } else {
        let evd = c
            .eigen()
            .map_err(|e| Error::EigensolverFailure(format!("{e:?}")))?;
        let lam: Vec<C64> = (0..n).map(|l| evd.S()[l]).collect();
        let u = evd.U();
        (lam, Mat::<C64>::from_fn(n, n, |i, j| u[(i, j)]))
    };
    if lambdas.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigensolverFailure("non-finite eigenvalue".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        lambdas[a]
            .re
            .total_cmp(&lambdas[b].re)
            .then(lambdas[a].im.total_cmp(&lambdas[b].im))
    });

    let mut sorted = Vec::with_capacity(n);
    let mut tails = Vec::with_capacity(n);
    let mut scales = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for (slot, &l) in order.iter().enumerate() {
        let mut v: Vec<C64> = (0..n).map(|i| y[(i, l)]).collect();
        upper_solve(&ld, &ls, &mut v);
        let mv = pencil.m.matvec(&v);
        let tnorm: C64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
        let hnorm: f64 = v.iter().zip(&mv).map(|(a, b)| a.norm() * b.norm()).sum();
        if !(tnorm.norm() >= TNORM_EPS * hnorm) {
            return Err(Error::NormalizationFailure {
                index: slot,
                norm: tnorm.norm() / hnorm,
            });
        }
        let s = 1.0 / tnorm.sqrt();
        let (lambda, tail) = refine_pair(pencil, lambdas[l], &mut v);
        vectors.extend(v);
        scales.push(s);
        sorted.push(lambda);
        tails.push(tail);
    }
    Ok(EigenBasis::numeric(n, sorted, tails, scales, vectors))
}

fn c_is_real(c: &Mat<C64>) -> bool {
    (0..c.ncols()).all(|j| (0..c.nrows()).all(|i| c[(i, j)].im == 0.0))
}

/// `M = L Lᵀ` for a real symmetric tridiagonal `M`; returns diagonal and
/// sub-diagonal of `L`.
fn bidiagonal_cholesky(pencil: &Pencil1D) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = &pencil.m;
    let n = pencil.n;
    if m.diag().iter().chain(m.sub()).any(|z| z.im != 0.0) || !m.is_symmetric() {
        return Err(Error::EigensolverFailure(
            "mass matrix must be real symmetric".into(),
        ));
    }
    let mut d = vec![0.0; n];
    let mut s = vec![0.0; n - 1];
    let mut prev = 0.0;
    for i in 0..n {
        let mut p = m.diag()[i].re;
        if i > 0 {
            s[i - 1] = m.sub()[i - 1].re / prev;
            p -= s[i - 1] * s[i - 1];
        }
        if !(p > 0.0) {
            return Err(Error::EigensolverFailure(
                "mass matrix is not positive definite".into(),
            ));
        }
        d[i] = p.sqrt();
        prev = d[i];
    }
    Ok((d, s))
}

fn lower_solve(d: &[f64], s: &[f64], x: &mut [C64]) {
    x[0] /= d[0];
    for i in 1..x.len() {
        x[i] = (x[i] - x[i - 1] * s[i - 1]) / d[i];
    }
}

fn upper_solve(d: &[f64], s: &[f64], x: &mut [C64]) {
    let n = x.len();
    x[n - 1] /= d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (x[i] - x[i + 1] * s[i]) / d[i];
    }
}
