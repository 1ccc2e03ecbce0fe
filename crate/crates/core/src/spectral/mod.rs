//! Eigen-infrastructure for the swept direction: closed-form circulant
//! eigenpairs, a numeric eigensolver for complex-symmetric pencils, and the
//! batched line transforms that apply the periodic basis with an FFT.
//!
//! Both bases are exposed through the same pair of operators:
//!
//! * analysis `Φ` maps nodal values to mode coefficients,
//! * synthesis `Ψ` maps mode coefficients back,
//!
//! with `Φ M Ψ = I` and `Φ K Ψ = Λ`.
//!
//! For a numeric pencil `Φ = Vᵀ` and `Ψ = V` with `VᵀMV = I`. For the periodic
//! pencil `Φ = diag(s) F` and `Ψ = F⁻¹ diag(s)` where `F` is the unnormalised DFT
//! and `s_l = μ_l^{-1/2}` absorbs the circulant mass eigenvalue `μ_l`. In both
//! cases `(K − σM)⁻¹ = Ψ (Λ − σ)⁻¹ Φ`.

mod eigen;
mod refine;
mod transform;

pub use eigen::{circulant_eigenvalues, circulant_mass_eigenvalues, dft_entry, solve_pencil_eigen};
pub use transform::{LineTransformPlan, TransformScratch};

use num_complex::Complex64 as C64;

use crate::error::{check_len, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    NumericPencil,
    CirculantClosedForm,
}

/// Eigenvalues and normalised eigenvectors of one 1D pencil.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    pub n: usize,
    pub kind: BasisKind,
    pub lambdas: Vec<C64>,
    /// Rounding remainders of `lambdas` (zero when they are exact in `f64`).
    lambda_tails: Vec<C64>,
    /// Normalisation factors already folded into `vectors` (numeric) or
    /// applied by the transforms (circulant).
    pub scales: Vec<C64>,
    /// Column-major `n x n` scaled eigenvectors; empty for the circulant basis.
    pub vectors: Vec<C64>,
    /// Rows `1` and `n` of the synthesis operator, `[end][mode]`.
    synth_ends: [Vec<C64>; 2],
    /// Columns `1` and `n` of the analysis operator, `[end][mode]`.
    analysis_ends: [Vec<C64>; 2],
}

/// Which way a boundary-restricted product goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestrictedDirection {
    /// Mode coefficients (length `n·block`) to end-plane values (length `2·block`).
    Forward,
    /// End-plane data (length `2·block`) to mode coefficients (length `n·block`).
    Adjoint,
}

impl EigenBasis {
    fn numeric(
        n: usize,
        lambdas: Vec<C64>,
        lambda_tails: Vec<C64>,
        scales: Vec<C64>,
        vectors: Vec<C64>,
    ) -> Self {
        let row = |i: usize| -> Vec<C64> { (0..n).map(|l| vectors[l * n + i]).collect() };
        let ends = [row(0), row(n - 1)];
        Self {
            n,
            kind: BasisKind::NumericPencil,
            lambdas,
            lambda_tails,
            scales,
            vectors: vectors.clone(),
            synth_ends: ends.clone(),
            analysis_ends: ends,
        }
    }

    fn circulant(lambdas: Vec<C64>, scales: Vec<C64>) -> Self {
        let n = lambdas.len();
        let inv_n = 1.0 / n as f64;
        let synth_first = scales.iter().map(|&s| s * inv_n).collect();
        // Ψ(n, l) = conj(F(n, l)) s_l / n, Φ(l, n) = F(l, n) s_l
        let synth_last = (0..n)
            .map(|l| dft_entry(n, n, l + 1).conj() * scales[l] * inv_n)
            .collect();
        let analysis_first = scales.clone();
        let analysis_last = (0..n).map(|l| dft_entry(n, l + 1, n) * scales[l]).collect();
        Self {
            n,
            kind: BasisKind::CirculantClosedForm,
            lambda_tails: vec![C64::new(0.0, 0.0); n],
            lambdas,
            scales,
            vectors: Vec::new(),
            synth_ends: [synth_first, synth_last],
            analysis_ends: [analysis_first, analysis_last],
        }
    }

    /// `λ_l - sigma` with the tail of `λ_l` added after the subtraction, so
    /// shifts close to an eigenvalue keep their relative accuracy.
    pub fn shift(&self, l: usize, sigma: C64) -> C64 {
        (self.lambdas[l] - sigma) + self.lambda_tails[l]
    }

    /// Synthesis coefficient `Ψ(end, mode)`; `end` is 0 for row 1 and 1 for row `n`.
    pub fn synthesis_end(&self, end: usize) -> &[C64] {
        &self.synth_ends[end]
    }

    /// Analysis coefficient `Φ(mode, end)`.
    pub fn analysis_end(&self, end: usize) -> &[C64] {
        &self.analysis_ends[end]
    }

    /// Zero-based `V(i, l)` for numeric bases.
    pub fn vector_entry(&self, i: usize, l: usize) -> Option<C64> {
        (self.kind == BasisKind::NumericPencil).then(|| self.vectors[l * self.n + i])
    }

    /// Products with the end-row restriction of the eigenvector matrix.
    ///
    /// `Forward` evaluates `(Ψ_b ⊗ I) z`, `Adjoint` evaluates `(Φ_b ⊗ I) y`; for
    /// numeric bases `Φ_b = Ψ_bᵀ`. Cost is `O(n·block)`.
    pub fn boundary_restricted_product(
        &self,
        input: &[C64],
        block: usize,
        direction: RestrictedDirection,
    ) -> Result<Vec<C64>> {
        let n = self.n;
        match direction {
            RestrictedDirection::Forward => {
                check_len(n * block, input.len())?;
                let mut out = vec![C64::new(0.0, 0.0); 2 * block];
                let (first, last) = out.split_at_mut(block);
                for (l, z) in input.chunks_exact(block).enumerate() {
                    let (a, b) = (self.synth_ends[0][l], self.synth_ends[1][l]);
                    for ((o0, o1), &zi) in first.iter_mut().zip(last.iter_mut()).zip(z) {
                        *o0 += a * zi;
                        *o1 += b * zi;
                    }
                }
                Ok(out)
            }
            RestrictedDirection::Adjoint => {
                check_len(2 * block, input.len())?;
                let (y0, y1) = input.split_at(block);
                let mut out = vec![C64::new(0.0, 0.0); n * block];
                for (l, plane) in out.chunks_exact_mut(block).enumerate() {
                    let (a, b) = (self.analysis_ends[0][l], self.analysis_ends[1][l]);
                    for ((o, &p), &q) in plane.iter_mut().zip(y0).zip(y1) {
                        *o = a * p + b * q;
                    }
                }
                Ok(out)
            }
        }
    }
}
