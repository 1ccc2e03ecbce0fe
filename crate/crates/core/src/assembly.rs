//! Bilinear/trilinear finite element pencils and the separable operators built from them.

use num_complex::Complex64 as C64;

use crate::error::{check_len, Error, Result};
pub use crate::grid::BoundaryKind;
use crate::grid::Grid;
use crate::matrix::{KroneckerOperator, TriCornerMatrix};

/// 1D stiffness/mass pair for one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil1D {
    pub k: TriCornerMatrix,
    pub m: TriCornerMatrix,
    pub bc: BoundaryKind,
    pub n: usize,
    pub h: f64,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Closed-form 1D element matrices: `K = tridiag(-1, 2, -1)/h`, `M = tridiag(1, 4, 1)·h/6`
/// with the boundary rows set by `bc`. `omega` only enters the absorbing ends of `K`.
pub fn assemble_pencil(n: usize, h: f64, omega: f64, bc: BoundaryKind) -> Result<Pencil1D> {
    if n < 3 {
        return Err(Error::InvalidGrid(format!("pencil needs n >= 3, got {n}")));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
    }
    let end = match bc {
        BoundaryKind::Periodic => return assemble_periodic_pencil(n, h),
        BoundaryKind::Neumann => re(1.0 / h),
        BoundaryKind::Absorbing => C64::new(1.0, -omega * h) / h,
    };
    let mut kd = vec![re(2.0 / h); n];
    kd[0] = end;
    kd[n - 1] = end;
    let k = TriCornerMatrix::symmetric(kd, vec![re(-1.0 / h); n - 1], re(0.0));

    let mut md = vec![re(4.0 * h / 6.0); n];
    md[0] = re(2.0 * h / 6.0);
    md[n - 1] = re(2.0 * h / 6.0);
    let m = TriCornerMatrix::symmetric(md, vec![re(h / 6.0); n - 1], re(0.0));
    Ok(Pencil1D { k, m, bc, n, h })
}

/// Circulant pencil with first rows `(2, -1, 0, .., 0, -1)/h` and `(4, 1, 0, .., 0, 1)·h/6`.
pub fn assemble_periodic_pencil(n: usize, h: f64) -> Result<Pencil1D> {
    if n < 3 {
        return Err(Error::InvalidGrid(format!("pencil needs n >= 3, got {n}")));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
    }
    let k = TriCornerMatrix::symmetric(vec![re(2.0 / h); n], vec![re(-1.0 / h); n - 1], re(-1.0 / h));
    let m = TriCornerMatrix::symmetric(
        vec![re(4.0 * h / 6.0); n],
        vec![re(h / 6.0); n - 1],
        re(h / 6.0),
    );
    Ok(Pencil1D {
        k,
        m,
        bc: BoundaryKind::Periodic,
        n,
        h,
    })
}

/// `aux − original` restricted to the corner index set `{1, n}`.
///
/// Stored as 2x2 blocks indexed `[first/last][first/last]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilDifference {
    pub n: usize,
    pub dk: [[C64; 2]; 2],
    pub dm: [[C64; 2]; 2],
}

impl PencilDifference {
    /// Fails if the two pencils differ anywhere outside rows/columns `{1, n}`.
    pub fn between(original: &Pencil1D, aux: &Pencil1D) -> Result<Self> {
        check_len(original.n, aux.n)?;
        let n = original.n;
        let ends = [0, n - 1];
        let corner = |a: &TriCornerMatrix, b: &TriCornerMatrix| {
            let mut blk = [[re(0.0); 2]; 2];
            for (r, &i) in ends.iter().enumerate() {
                for (c, &j) in ends.iter().enumerate() {
                    blk[r][c] = b.get(i, j) - a.get(i, j);
                }
            }
            blk
        };
        for (a, b) in [(&original.k, &aux.k), (&original.m, &aux.m)] {
            for i in 0..n {
                for j in i.saturating_sub(1)..(i + 2).min(n) {
                    let on_ends = ends.contains(&i) && ends.contains(&j);
                    if !on_ends && a.get(i, j) != b.get(i, j) {
                        return Err(Error::UnsupportedBoundary(format!(
                            "pencils differ at interior entry ({}, {})",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(Self {
            n,
            dk: corner(&original.k, &aux.k),
            dm: corner(&original.m, &aux.m),
        })
    }

    /// `D_K − σ D_M` on the corner block.
    pub fn shifted(&self, sigma: C64) -> [[C64; 2]; 2] {
        let mut out = [[re(0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = self.dk[r][c] - sigma * self.dm[r][c];
            }
        }
        out
    }
}

/// Mass and stiffness combinations of the directions orthogonal to the swept one:
/// `mass = M_2 ⊗ .. ⊗ M_d`, `stiffness = Σ_j M_2 ⊗ .. K_j .. ⊗ M_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossTerms {
    pub mass: KroneckerOperator,
    pub stiffness: KroneckerOperator,
}

impl CrossTerms {
    pub fn from_pencils(cross: &[Pencil1D]) -> Result<Self> {
        if cross.is_empty() {
            return Err(Error::InvalidGrid("no cross directions".into()));
        }
        let dims: Vec<usize> = cross.iter().map(|p| p.n).collect();
        let masses: Vec<TriCornerMatrix> = cross.iter().map(|p| p.m.clone()).collect();
        let mass = KroneckerOperator::new(dims.clone()).with_term(re(1.0), masses.clone())?;
        let mut stiffness = KroneckerOperator::new(dims);
        for (j, p) in cross.iter().enumerate() {
            let mut factors = masses.clone();
            factors[j] = p.k.clone();
            stiffness.push_term(re(1.0), factors)?;
        }
        Ok(Self { mass, stiffness })
    }

    pub fn plane_len(&self) -> usize {
        self.mass.len()
    }
}

/// Boundary block `C_bb(σ) = (D_K − σ D_M)|_bb ⊗ mass + D_M|_bb ⊗ stiffness`,
/// applied to values on the two swept-direction end planes.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionMatrix {
    pub sigma: C64,
    pub shifted_corner: [[C64; 2]; 2],
    pub mass_corner: [[C64; 2]; 2],
    pub cross: CrossTerms,
}

pub fn build_correction(diff: &PencilDifference, cross: CrossTerms, sigma: C64) -> CorrectionMatrix {
    CorrectionMatrix {
        sigma,
        shifted_corner: diff.shifted(sigma),
        mass_corner: diff.dm,
        cross,
    }
}

impl CorrectionMatrix {
    /// Size of one end plane.
    pub fn plane_len(&self) -> usize {
        self.cross.plane_len()
    }

    /// `out = C_bb · y` where `y = [first plane, last plane]`.
    pub fn apply_into(&self, y: &[C64], out: &mut [C64], scratch: &mut CorrectionScratch) -> Result<()> {
        let m = self.plane_len();
        check_len(2 * m, y.len())?;
        check_len(2 * m, out.len())?;
        let s = scratch;
        s.resize(m);
        let (y0, y1) = y.split_at(m);
        self.cross.mass.apply_into(y0, &mut s.mass[0], &mut s.tmp)?;
        self.cross.mass.apply_into(y1, &mut s.mass[1], &mut s.tmp)?;
        self.cross.stiffness.apply_into(y0, &mut s.stiff[0], &mut s.tmp)?;
        self.cross.stiffness.apply_into(y1, &mut s.stiff[1], &mut s.tmp)?;
        for (r, plane) in out.chunks_exact_mut(m).enumerate() {
            let a = self.shifted_corner[r];
            let d = self.mass_corner[r];
            for (i, o) in plane.iter_mut().enumerate() {
                *o = a[0] * s.mass[0][i]
                    + a[1] * s.mass[1][i]
                    + d[0] * s.stiff[0][i]
                    + d[1] * s.stiff[1][i];
            }
        }
        Ok(())
    }

    pub fn apply(&self, y: &[C64]) -> Result<Vec<C64>> {
        let mut out = vec![re(0.0); y.len()];
        self.apply_into(y, &mut out, &mut CorrectionScratch::default())?;
        Ok(out)
    }
}

/// Per-call buffers for [`CorrectionMatrix::apply_into`].
#[derive(Debug, Default, Clone)]
pub struct CorrectionScratch {
    mass: [Vec<C64>; 2],
    stiff: [Vec<C64>; 2],
    tmp: Vec<C64>,
}

impl CorrectionScratch {
    fn resize(&mut self, m: usize) {
        for v in self.mass.iter_mut().chain(self.stiff.iter_mut()) {
            v.resize(m, re(0.0));
        }
    }
}

/// `(K_a − σ M_a) ⊗ mass + M_a ⊗ stiffness` for a swept pencil and its cross directions.
pub fn separable_operator(swept: &Pencil1D, sigma: C64, cross: &[Pencil1D]) -> Result<KroneckerOperator> {
    let mut dims = vec![swept.n];
    dims.extend(cross.iter().map(|p| p.n));
    let shifted = swept.k.combine(re(1.0), &swept.m, -sigma);
    let masses: Vec<TriCornerMatrix> = cross.iter().map(|p| p.m.clone()).collect();
    let mut op = KroneckerOperator::new(dims);
    let mut first = vec![shifted];
    first.extend(masses.iter().cloned());
    op.push_term(re(1.0), first)?;
    for (j, p) in cross.iter().enumerate() {
        let mut factors = vec![swept.m.clone()];
        let mut rest = masses.clone();
        rest[j] = p.k.clone();
        factors.extend(rest);
        op.push_term(re(1.0), factors)?;
    }
    Ok(op)
}

fn cross_pencils(grid: &Grid) -> Result<Vec<Pencil1D>> {
    grid.n()[1..]
        .iter()
        .zip(&grid.h()[1..])
        .map(|(&n, &h)| assemble_pencil(n, h, 0.0, BoundaryKind::Neumann))
        .collect()
}

/// The discrete Helmholtz operator `A`. `bcs[0]` selects the `x_1` ends
/// (absorbing or Neumann); every other direction must be Neumann.
pub fn build_operator_a(grid: &Grid, omega: f64, bcs: &[BoundaryKind]) -> Result<KroneckerOperator> {
    check_len(grid.dims(), bcs.len())?;
    if bcs[0] == BoundaryKind::Periodic {
        return Err(Error::UnsupportedBoundary(
            "periodic ends are only used by the auxiliary operator".into(),
        ));
    }
    if let Some(j) = bcs[1..].iter().position(|&b| b != BoundaryKind::Neumann) {
        return Err(Error::UnsupportedBoundary(format!(
            "direction x_{} must be Neumann; absorbing ends are only supported along x_1",
            j + 2
        )));
    }
    let first = assemble_pencil(grid.n()[0], grid.h()[0], omega, bcs[0])?;
    separable_operator(&first, re(omega * omega), &cross_pencils(grid)?)
}

/// Auxiliary operator `B`: as `A` but with periodic `x_1` pencils.
pub fn build_operator_b(grid: &Grid, omega: f64) -> Result<KroneckerOperator> {
    let first = assemble_periodic_pencil(grid.n()[0], grid.h()[0])?;
    separable_operator(&first, re(omega * omega), &cross_pencils(grid)?)
}
