//! Three-step fast solver for `(K_1 − σM_1) ⊗ M_2 + M_1 ⊗ K_2`.
//!
//! 1. Solve the auxiliary periodic problem `B v = f` in the DFT basis, keeping
//!    only the end-plane values `v_b`.
//! 2. Solve `A w = (B − A) v` for the end-plane values `w_b` only, using the
//!    numeric eigenbasis of the `x_1` pencil; the right-hand side lives on the
//!    end planes so every product is restricted to two rows of `V_1`.
//! 3. Solve `B u = f + (B − A)(v + w)` in full and transform back.
//!
//! The same machinery serves the standalone 2D problem (`σ = ω²`) and the
//! `n_1` inner problems of the 3D solver (`σ = ω² − Λ_{1,l}`).

use num_complex::Complex64 as C64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::assembly::{
    assemble_pencil, assemble_periodic_pencil, build_correction, separable_operator, CorrectionMatrix,
    CorrectionScratch, CrossTerms, Pencil1D, PencilDifference,
};
use crate::error::{check_len, Error, Result};
use crate::grid::{BoundaryKind, Grid};
use crate::matrix::{KroneckerOperator, TriCornerMatrix};
use crate::spectral::{solve_pencil_eigen, EigenBasis, LineTransformPlan, TransformScratch};
use crate::tridiag::{solve_shifted_in_place, ShiftedBlock, TridiagLu};

/// Selects the diagonalised original (`H_A`) or auxiliary (`H_B`) system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    A,
    B,
}

/// Pencils and eigenbases of the swept direction (the one carrying the
/// non-periodic ends).
#[derive(Debug, Clone)]
pub struct SweptSetup {
    pub original: Pencil1D,
    pub periodic: Pencil1D,
    pub basis_a: EigenBasis,
    pub basis_b: EigenBasis,
    pub diff: PencilDifference,
}

impl SweptSetup {
    pub fn new(n: usize, h: f64, omega: f64, bc: BoundaryKind) -> Result<Self> {
        if bc == BoundaryKind::Periodic {
            return Err(Error::UnsupportedBoundary(
                "the swept direction must be absorbing or Neumann".into(),
            ));
        }
        let original = assemble_pencil(n, h, omega, bc)?;
        let periodic = assemble_periodic_pencil(n, h)?;
        let basis_a = solve_pencil_eigen(&original)?;
        let basis_b = solve_pencil_eigen(&periodic)?;
        let diff = PencilDifference::between(&original, &periodic)?;
        Ok(Self {
            original,
            periodic,
            basis_a,
            basis_b,
            diff,
        })
    }

    pub fn n(&self) -> usize {
        self.original.n
    }

    pub fn basis(&self, which: Which) -> &EigenBasis {
        match which {
            Which::A => &self.basis_a,
            Which::B => &self.basis_b,
        }
    }
}

/// Values on the two end planes of the swept direction, `[first plane, last plane]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSolution {
    pub values: Vec<C64>,
}

impl PartialSolution {
    pub fn zeros(plane_len: usize) -> Self {
        Self {
            values: vec![C64::new(0.0, 0.0); 2 * plane_len],
        }
    }

    pub fn plane_len(&self) -> usize {
        self.values.len() / 2
    }

    pub fn first(&self) -> &[C64] {
        &self.values[..self.plane_len()]
    }

    pub fn last(&self) -> &[C64] {
        &self.values[self.plane_len()..]
    }
}

/// Per-call work buffers. One instance per concurrent solve.
#[derive(Debug, Default)]
pub struct Scratch {
    pub(crate) tri: TridiagLu,
    pub(crate) tmp: Vec<C64>,
    pub(crate) transform: TransformScratch,
    pub(crate) correction: CorrectionScratch,
    pub(crate) inner: Option<Box<Scratch>>,
}

impl Scratch {
    pub(crate) fn inner(&mut self) -> &mut Scratch {
        self.inner.get_or_insert_with(Default::default)
    }
}

/// Solves one diagonal block `(Λ_l − σ) ⊗ (cross mass) + (cross stiffness)` in place.
pub(crate) trait BlockSolver: Sync {
    fn solve_block(&self, which: Which, l: usize, rhs: &mut [C64], scratch: &mut Scratch) -> Result<()>;
}

/// Tridiagonal blocks factored once at plan time.
#[derive(Debug, Clone)]
struct FactoredBlocks {
    cross: Pencil1D,
    lu_a: Vec<TridiagLu>,
    lu_b: Vec<TridiagLu>,
}

impl BlockSolver for FactoredBlocks {
    fn solve_block(&self, which: Which, l: usize, rhs: &mut [C64], _: &mut Scratch) -> Result<()> {
        let lu = match which {
            Which::A => &self.lu_a[l],
            Which::B => &self.lu_b[l],
        };
        lu.solve_in_place(&self.cross, rhs);
        Ok(())
    }
}

/// Tridiagonal blocks factored on the fly for each solve.
pub(crate) struct OnTheFlyBlocks<'a> {
    pub basis_a: &'a EigenBasis,
    pub basis_b: &'a EigenBasis,
    pub sigma: C64,
    pub cross: &'a Pencil1D,
}

impl BlockSolver for OnTheFlyBlocks<'_> {
    fn solve_block(&self, which: Which, l: usize, rhs: &mut [C64], scratch: &mut Scratch) -> Result<()> {
        let basis = match which {
            Which::A => self.basis_a,
            Which::B => self.basis_b,
        };
        let block = ShiftedBlock {
            alpha: basis.shift(l, self.sigma),
            pencil: self.cross,
        };
        solve_shifted_in_place(block, l, rhs, &mut scratch.tri)
    }
}

/// Number of independent accumulation chunks over the swept modes; a
/// function of `n` only so results do not depend on the thread count.
fn chunk_count(n: usize) -> usize {
    (n / 8).clamp(1, 16)
}

/// The three steps over one `n x block` array with a pluggable block solver.
pub(crate) struct ThreeStep<'a, S: BlockSolver> {
    pub swept: &'a SweptSetup,
    pub transform: &'a LineTransformPlan,
    pub correction: &'a CorrectionMatrix,
    pub blocks: &'a S,
    pub parallel: bool,
}

impl<S: BlockSolver> ThreeStep<'_, S> {
    fn n(&self) -> usize {
        self.transform.n()
    }

    fn block(&self) -> usize {
        self.transform.block()
    }

    /// Sums `body(l, ...)` contributions to a `2·block` accumulator over all modes.
    fn accumulate<F>(&self, body: F) -> Result<Vec<C64>>
    where
        F: Fn(usize, &mut [C64], &mut Scratch) -> Result<()> + Sync,
    {
        let n = self.n();
        let m = self.block();
        let chunks = chunk_count(n);
        let run = |c: usize| -> Result<Vec<C64>> {
            let mut acc = vec![C64::zero(); 2 * m];
            let mut scratch = Scratch::default();
            for l in c * n / chunks..(c + 1) * n / chunks {
                body(l, &mut acc, &mut scratch)?;
            }
            Ok(acc)
        };
        let partials: Vec<Vec<C64>> = if self.parallel && chunks > 1 {
            (0..chunks).into_par_iter().map(run).collect::<Result<_>>()?
        } else {
            (0..chunks).map(run).collect::<Result<_>>()?
        };
        let mut it = partials.into_iter();
        let mut total = it.next().expect("at least one chunk");
        for p in it {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        Ok(total)
    }

    /// Step 1. `data` holds `f` on entry and `f̂ = (Φ_B ⊗ I) f` on exit.
    pub fn aux_partial(&self, data: &mut [C64], scratch: &mut Scratch) -> Result<PartialSolution> {
        let m = self.block();
        let basis = &self.swept.basis_b;
        self.transform
            .forward_in_place(data, Some(&basis.scales), &mut scratch.transform)?;
        let f_hat: &[C64] = data;
        let (s0, s1) = (basis.synthesis_end(0), basis.synthesis_end(1));
        let values = self.accumulate(|l, acc: &mut [C64], scratch| {
            let mut tmp = std::mem::take(&mut scratch.tmp);
            tmp.clear();
            tmp.extend_from_slice(&f_hat[l * m..(l + 1) * m]);
            self.blocks.solve_block(Which::B, l, &mut tmp, scratch)?;
            let (a0, a1) = acc.split_at_mut(m);
            for ((x0, x1), &z) in a0.iter_mut().zip(a1.iter_mut()).zip(&tmp) {
                *x0 += s0[l] * z;
                *x1 += s1[l] * z;
            }
            scratch.tmp = tmp;
            Ok(())
        })?;
        Ok(PartialSolution { values })
    }

    /// Step 2. End-plane values of `A⁻¹ (B − A) v`; `O(N)`, with the
    /// spectral right-hand side streamed one mode at a time.
    pub fn correction_step(&self, v_b: &PartialSolution, scratch: &mut Scratch) -> Result<PartialSolution> {
        let m = self.block();
        check_len(2 * m, v_b.values.len())?;
        let mut c = vec![C64::zero(); 2 * m];
        self.correction.apply_into(&v_b.values, &mut c, &mut scratch.correction)?;
        let basis = &self.swept.basis_a;
        let (p0, p1) = (basis.analysis_end(0), basis.analysis_end(1));
        let (s0, s1) = (basis.synthesis_end(0), basis.synthesis_end(1));
        let (c0, c1) = c.split_at(m);
        let values = self.accumulate(|l, acc: &mut [C64], scratch| {
            let mut z = std::mem::take(&mut scratch.tmp);
            z.clear();
            z.extend(c0.iter().zip(c1).map(|(&x, &y)| p0[l] * x + p1[l] * y));
            self.blocks.solve_block(Which::A, l, &mut z, scratch)?;
            let (a0, a1) = acc.split_at_mut(m);
            for ((x0, x1), &zi) in a0.iter_mut().zip(a1.iter_mut()).zip(&z) {
                *x0 += s0[l] * zi;
                *x1 += s1[l] * zi;
            }
            scratch.tmp = z;
            Ok(())
        })?;
        Ok(PartialSolution { values })
    }

    /// Step 3. `data` holds `f̂` on entry and `u` on exit.
    pub fn finish(
        &self,
        data: &mut [C64],
        v_b: &PartialSolution,
        w_b: &PartialSolution,
        scratch: &mut Scratch,
    ) -> Result<()> {
        let m = self.block();
        check_len(self.transform.len(), data.len())?;
        check_len(2 * m, v_b.values.len())?;
        check_len(2 * m, w_b.values.len())?;
        let sum: Vec<C64> = v_b.values.iter().zip(&w_b.values).map(|(a, b)| a + b).collect();
        let mut d = vec![C64::zero(); 2 * m];
        self.correction.apply_into(&sum, &mut d, &mut scratch.correction)?;
        let basis = &self.swept.basis_b;
        let (p0, p1) = (basis.analysis_end(0), basis.analysis_end(1));
        let (d0, d1) = d.split_at(m);
        let body = |(l, slab): (usize, &mut [C64]), scratch: &mut Scratch| -> Result<()> {
            for ((x, &a), &b) in slab.iter_mut().zip(d0).zip(d1) {
                *x += p0[l] * a + p1[l] * b;
            }
            self.blocks.solve_block(Which::B, l, slab, scratch)
        };
        if self.parallel && self.n() > 1 {
            data.par_chunks_mut(m)
                .enumerate()
                .try_for_each_init(Scratch::default, |s, item| body(item, s))?;
        } else {
            for item in data.chunks_mut(m).enumerate() {
                body(item, scratch)?;
            }
        }
        self.transform
            .inverse_in_place(data, Some(&basis.scales), &mut scratch.transform)
    }

    pub fn solve_in_place(&self, data: &mut [C64], scratch: &mut Scratch) -> Result<()> {
        check_len(self.transform.len(), data.len())?;
        let v_b = self.aux_partial(data, scratch)?;
        let w_b = self.correction_step(&v_b, scratch)?;
        self.finish(data, &v_b, &w_b, scratch)
    }
}

/// Precomputed state of the 2D solver: eigenbases of the `x_1` pencils, the
/// boundary block `C_bb(σ)` and LU factors of all `2·n_1` tridiagonal blocks.
#[derive(Debug, Clone)]
pub struct SolverPlan2D {
    grid: Grid,
    omega: f64,
    sigma: C64,
    swept: SweptSetup,
    correction: CorrectionMatrix,
    transform: LineTransformPlan,
    blocks: FactoredBlocks,
    parallel: bool,
}

impl SolverPlan2D {
    /// Plan for `A u = f` with `σ = ω²`.
    pub fn new(grid: &Grid, omega: f64, bc_x1: BoundaryKind) -> Result<Self> {
        Self::with_shift(grid, omega, C64::new(omega * omega, 0.0), bc_x1)
    }

    /// Plan for `(K_1 − σ M_1) ⊗ M_2 + M_1 ⊗ K_2`; `omega` only enters
    /// absorbing ends of `K_1`.
    pub fn with_shift(grid: &Grid, omega: f64, sigma: C64, bc_x1: BoundaryKind) -> Result<Self> {
        if grid.dims() != 2 {
            return Err(Error::InvalidGrid(format!(
                "2D plan needs a 2D grid, got d = {}",
                grid.dims()
            )));
        }
        let (n, h) = (grid.n(), grid.h());
        let swept = SweptSetup::new(n[0], h[0], omega, bc_x1)?;
        let cross = assemble_pencil(n[1], h[1], 0.0, BoundaryKind::Neumann)?;
        let correction = build_correction(
            &swept.diff,
            CrossTerms::from_pencils(std::slice::from_ref(&cross))?,
            sigma,
        );
        let factor = |basis: &EigenBasis| -> Result<Vec<TridiagLu>> {
            (0..basis.n)
                .map(|l| {
                    TridiagLu::factor(
                        ShiftedBlock {
                            alpha: basis.shift(l, sigma),
                            pencil: &cross,
                        },
                        l,
                    )
                })
                .collect()
        };
        let lu_a = factor(&swept.basis_a)?;
        let lu_b = factor(&swept.basis_b)?;
        Ok(Self {
            grid: grid.clone(),
            omega,
            sigma,
            correction,
            transform: LineTransformPlan::new(n[0], n[1]),
            blocks: FactoredBlocks { cross, lu_a, lu_b },
            swept,
            parallel: true,
        })
    }

    /// Toggles data-parallel loops over the `x_1` modes. Results are identical either way.
    pub fn set_parallel(&mut self, parallel: bool) {
        self.parallel = parallel;
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn sigma(&self) -> C64 {
        self.sigma
    }

    pub fn swept(&self) -> &SweptSetup {
        &self.swept
    }

    pub fn cross_pencil(&self) -> &Pencil1D {
        &self.blocks.cross
    }

    pub fn correction(&self) -> &CorrectionMatrix {
        &self.correction
    }

    /// Tridiagonal block `l` (zero-based) of `H_A` or `H_B`: `(Λ_l − σ) M_2 + K_2`.
    pub fn block_matrix(&self, which: Which, l: usize) -> TriCornerMatrix {
        let alpha = self.swept.basis(which).shift(l, self.sigma);
        let p = &self.blocks.cross;
        p.m.combine(alpha, &p.k, C64::new(1.0, 0.0))
    }

    /// The operator this plan inverts.
    pub fn operator(&self) -> Result<KroneckerOperator> {
        separable_operator(&self.swept.original, self.sigma, std::slice::from_ref(&self.blocks.cross))
    }

    /// The auxiliary periodic operator.
    pub fn aux_operator(&self) -> Result<KroneckerOperator> {
        separable_operator(&self.swept.periodic, self.sigma, std::slice::from_ref(&self.blocks.cross))
    }

    fn steps(&self) -> ThreeStep<'_, FactoredBlocks> {
        ThreeStep {
            swept: &self.swept,
            transform: &self.transform,
            correction: &self.correction,
            blocks: &self.blocks,
            parallel: self.parallel,
        }
    }

    /// Step 1: returns `v_b` and the saved transformed right-hand side `f̂`.
    pub fn solve_aux_partial(&self, f: &[C64]) -> Result<(PartialSolution, Vec<C64>)> {
        check_len(self.grid.len(), f.len())?;
        let mut f_hat = f.to_vec();
        let v_b = self.steps().aux_partial(&mut f_hat, &mut Scratch::default())?;
        Ok((v_b, f_hat))
    }

    /// Step 2: `w_b` from `v_b`.
    pub fn solve_correction(&self, v_b: &PartialSolution) -> Result<PartialSolution> {
        self.steps().correction_step(v_b, &mut Scratch::default())
    }

    /// Step 3: the full solution from `f̂`, `v_b` and `w_b`.
    pub fn solve_final(&self, mut f_hat: Vec<C64>, v_b: &PartialSolution, w_b: &PartialSolution) -> Result<Vec<C64>> {
        self.steps().finish(&mut f_hat, v_b, w_b, &mut Scratch::default())?;
        Ok(f_hat)
    }

    pub fn solve(&self, f: &[C64]) -> Result<Vec<C64>> {
        let mut u = vec![C64::new(0.0, 0.0); f.len()];
        self.solve_with(f, &mut u, &mut Scratch::default())?;
        Ok(u)
    }

    /// Solves into a caller buffer. Concurrent calls need separate scratch.
    pub fn solve_with(&self, f: &[C64], u: &mut [C64], scratch: &mut Scratch) -> Result<()> {
        check_len(self.grid.len(), f.len())?;
        check_len(self.grid.len(), u.len())?;
        u.copy_from_slice(f);
        self.steps().solve_in_place(u, scratch)
    }

    /// Runs Step 2 alone on the given `v_b`; used for timing the correction step.
    pub fn correction_only(&self, v_b: &PartialSolution, scratch: &mut Scratch) -> Result<PartialSolution> {
        self.steps().correction_step(v_b, scratch)
    }
}

/// Shift-parameterised on-the-fly 2D solve used inside the 3D solver.
pub(crate) fn solve_inner_in_place(
    swept: &SweptSetup,
    transform: &LineTransformPlan,
    cross: &Pencil1D,
    cross_terms: &CrossTerms,
    sigma: C64,
    data: &mut [C64],
    scratch: &mut Scratch,
) -> Result<()> {
    let correction = build_correction(&swept.diff, cross_terms.clone(), sigma);
    let blocks = OnTheFlyBlocks {
        basis_a: &swept.basis_a,
        basis_b: &swept.basis_b,
        sigma,
        cross,
    };
    ThreeStep {
        swept,
        transform,
        correction: &correction,
        blocks: &blocks,
        parallel: false,
    }
    .solve_in_place(data, scratch)
}

