//! Three-step solver in 3D. The block systems `H_A`, `H_B` split into `n_1`
//! independent `n_2 x n_3` problems, each solved by the 2D fast solver with
//! shift `p_l = ω² − Λ_{1,l}` and its own periodic auxiliary problem in `x_2`.
//! Inner tridiagonal blocks are factored during the solve, so the plan holds
//! only 1D data.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::assembly::{assemble_pencil, build_correction, separable_operator, CorrectionMatrix, CrossTerms, Pencil1D};
use crate::error::{check_len, Error, Result};
use crate::grid::{BoundaryKind, Grid};
use crate::matrix::KroneckerOperator;
use crate::solver2d::{solve_inner_in_place, BlockSolver, Scratch, SweptSetup, ThreeStep, Which};
use crate::spectral::LineTransformPlan;

#[derive(Debug, Clone)]
pub struct SolverPlan3D {
    grid: Grid,
    omega: f64,
    /// `x_1`: absorbing pencil and its periodic counterpart.
    x1: SweptSetup,
    /// `x_2`: Neumann pencil and its periodic counterpart, swept by the inner solver.
    x2: SweptSetup,
    x3: Pencil1D,
    inner_cross: CrossTerms,
    outer_correction: CorrectionMatrix,
    outer_transform: LineTransformPlan,
    inner_transform: LineTransformPlan,
    parallel: bool,
}

struct OuterBlocks<'a> {
    plan: &'a SolverPlan3D,
}

impl BlockSolver for OuterBlocks<'_> {
    fn solve_block(&self, which: Which, l: usize, rhs: &mut [C64], scratch: &mut Scratch) -> Result<()> {
        let p = self.plan;
        let shift = p.shift(which, l);
        solve_inner_in_place(
            &p.x2,
            &p.inner_transform,
            &p.x3,
            &p.inner_cross,
            shift,
            rhs,
            scratch.inner(),
        )
        .map_err(|e| match e {
            Error::SingularBlock {
                block,
                row,
                pivot,
                threshold,
                ..
            } => Error::SingularBlock {
                block,
                row,
                pivot,
                threshold,
                outer: Some(l),
            },
            other => other,
        })
    }
}

impl SolverPlan3D {
    /// Plan for `A u = f` with absorbing ends along `x_1`, Neumann elsewhere.
    pub fn new(grid: &Grid, omega: f64) -> Result<Self> {
        Self::with_boundary(grid, omega, BoundaryKind::Absorbing)
    }

    pub fn with_boundary(grid: &Grid, omega: f64, bc_x1: BoundaryKind) -> Result<Self> {
        if grid.dims() != 3 {
            return Err(Error::InvalidGrid(format!(
                "3D plan needs a 3D grid, got d = {}",
                grid.dims()
            )));
        }
        let (n, h) = (grid.n(), grid.h());
        let x1 = SweptSetup::new(n[0], h[0], omega, bc_x1)?;
        let x2 = SweptSetup::new(n[1], h[1], omega, BoundaryKind::Neumann)?;
        let x3 = assemble_pencil(n[2], h[2], 0.0, BoundaryKind::Neumann)?;
        let outer_cross = CrossTerms::from_pencils(&[x2.original.clone(), x3.clone()])?;
        let outer_correction = build_correction(&x1.diff, outer_cross, C64::new(omega * omega, 0.0));
        let inner_cross = CrossTerms::from_pencils(std::slice::from_ref(&x3))?;
        Ok(Self {
            grid: grid.clone(),
            omega,
            outer_transform: LineTransformPlan::new(n[0], n[1] * n[2]),
            inner_transform: LineTransformPlan::new(n[1], n[2]),
            x1,
            x2,
            x3,
            inner_cross,
            outer_correction,
            parallel: true,
        })
    }

    pub fn set_parallel(&mut self, parallel: bool) {
        self.parallel = parallel;
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn x1(&self) -> &SweptSetup {
        &self.x1
    }

    pub fn x2(&self) -> &SweptSetup {
        &self.x2
    }

    pub fn x3(&self) -> &Pencil1D {
        &self.x3
    }

    /// Inner shift `p_{X,l} = ω² − Λ^X_{1,l}`.
    pub fn shift(&self, which: Which, l: usize) -> C64 {
        -self.x1.basis(which).shift(l, C64::new(self.omega * self.omega, 0.0))
    }

    /// Number of complex scalars held by the plan (eigenvectors, pencils and scales).
    pub fn footprint(&self) -> usize {
        let swept = |s: &SweptSetup| s.basis_a.vectors.len() + 4 * s.n() + 10 * s.n();
        swept(&self.x1) + swept(&self.x2) + 6 * self.x3.n
    }

    /// The operator `A` this plan inverts.
    pub fn operator(&self) -> Result<KroneckerOperator> {
        separable_operator(
            &self.x1.original,
            C64::new(self.omega * self.omega, 0.0),
            &[self.x2.original.clone(), self.x3.clone()],
        )
    }

    fn steps<'a>(&'a self, blocks: &'a OuterBlocks<'a>) -> ThreeStep<'a, OuterBlocks<'a>> {
        ThreeStep {
            swept: &self.x1,
            transform: &self.outer_transform,
            correction: &self.outer_correction,
            blocks,
            parallel: self.parallel,
        }
    }

    /// Solves `H_X z = rhs` for a right-hand side already in `x_1` mode space.
    pub fn solve_block_system(&self, which: Which, rhs: &[C64]) -> Result<Vec<C64>> {
        check_len(self.grid.len(), rhs.len())?;
        let m = self.grid.plane_len();
        let blocks = OuterBlocks { plan: self };
        let mut out = rhs.to_vec();
        let body = |(l, slab): (usize, &mut [C64]), s: &mut Scratch| blocks.solve_block(which, l, slab, s);
        if self.parallel {
            out.par_chunks_mut(m)
                .enumerate()
                .try_for_each_init(Scratch::default, |s, item| body(item, s))?;
        } else {
            let mut s = Scratch::default();
            for item in out.chunks_mut(m).enumerate() {
                body(item, &mut s)?;
            }
        }
        Ok(out)
    }

    pub fn solve(&self, f: &[C64]) -> Result<Vec<C64>> {
        let mut u = vec![C64::new(0.0, 0.0); f.len()];
        self.solve_with(f, &mut u, &mut Scratch::default())?;
        Ok(u)
    }

    pub fn solve_with(&self, f: &[C64], u: &mut [C64], scratch: &mut Scratch) -> Result<()> {
        check_len(self.grid.len(), f.len())?;
        check_len(self.grid.len(), u.len())?;
        u.copy_from_slice(f);
        let blocks = OuterBlocks { plan: self };
        self.steps(&blocks).solve_in_place(u, scratch)
    }
}
