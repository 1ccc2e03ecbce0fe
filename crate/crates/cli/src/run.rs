use std::time::Instant;

use helmfft::oracle::{dense_solve, DenseOperator, DenseProblem, ORACLE_SIZE_LIMIT};
use helmfft::{relative_residual, Complex64 as C64, Grid, KroneckerOperator, Scratch, SolverPlan2D, SolverPlan3D};

use crate::config::{Mode, RunConfig};
use crate::error::{CliError, Result};
use crate::record::RunRecord;
use crate::rhs::build_rhs;

/// A built plan of either dimension.
pub enum Plan {
    D2(SolverPlan2D),
    D3(SolverPlan3D),
}

impl Plan {
    pub fn new(cfg: &RunConfig, grid: &Grid) -> Result<Plan> {
        Ok(match cfg.d {
            2 => Plan::D2(SolverPlan2D::new(grid, cfg.omega, cfg.bc)?),
            _ => Plan::D3(SolverPlan3D::with_boundary(grid, cfg.omega, cfg.bc)?),
        })
    }

    pub fn solve_with(&self, f: &[C64], u: &mut [C64], scratch: &mut Scratch) -> Result<()> {
        match self {
            Plan::D2(p) => p.solve_with(f, u, scratch)?,
            Plan::D3(p) => p.solve_with(f, u, scratch)?,
        }
        Ok(())
    }

    pub fn operator(&self) -> Result<KroneckerOperator> {
        Ok(match self {
            Plan::D2(p) => p.operator()?,
            Plan::D3(p) => p.operator()?,
        })
    }
}

/// Sets the global worker count once; later calls are ignored.
pub fn configure_threads(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

/// Runs one configured problem. In verify mode a record is returned even
/// when the tolerance is missed; [`check`] turns that into an error.
pub fn run_one(cfg: &RunConfig) -> Result<RunRecord> {
    let grid = Grid::new(cfg.dims())?;
    if cfg.mode == Mode::Verify && grid.len() > ORACLE_SIZE_LIMIT {
        return Err(helmfft::Error::SizeLimit {
            size: grid.len(),
            limit: ORACLE_SIZE_LIMIT,
        }
        .into());
    }
    let f = build_rhs(&cfg.rhs, cfg.dims())?;

    let t = Instant::now();
    let plan = Plan::new(cfg, &grid)?;
    let init_seconds = t.elapsed().as_secs_f64();

    let mut u = vec![C64::new(0.0, 0.0); f.len()];
    let mut scratch = Scratch::default();
    let mut solve_seconds = f64::INFINITY;
    for _ in 0..cfg.repeats {
        let t = Instant::now();
        plan.solve_with(&f, &mut u, &mut scratch)?;
        solve_seconds = solve_seconds.min(t.elapsed().as_secs_f64());
    }
    let residual = relative_residual(&plan.operator()?, &u, &f)?;

    let oracle_error = if cfg.mode == Mode::Verify {
        let dense = DenseProblem::new(&grid, cfg.omega, cfg.bc)?;
        let reference = dense_solve(&dense, DenseOperator::A, &f)?.u;
        let num: f64 = u.iter().zip(&reference).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = reference.iter().map(|b| b.norm_sqr()).sum();
        Some((num / den).sqrt())
    } else {
        None
    };

    Ok(RunRecord {
        mode: cfg.mode.as_str().to_string(),
        d: cfg.d,
        n1: cfg.n[0],
        n2: cfg.n[1],
        n3: (cfg.d == 3).then_some(cfg.n[2]),
        omega: cfg.omega,
        init_seconds,
        solve_seconds,
        residual,
        oracle_error,
    })
}

pub fn run(cfg: &RunConfig) -> Result<Vec<RunRecord>> {
    cfg.expand().iter().map(run_one).collect()
}

/// Fails when any verify record misses the tolerance.
pub fn check(cfg: &RunConfig, records: &[RunRecord]) -> Result<()> {
    for r in records {
        if let Some(e) = r.oracle_error {
            if !(e <= cfg.tol) {
                return Err(CliError::Verify(format!(
                    "oracle error {e:e} exceeds {:e} for n = ({}, {}{})",
                    cfg.tol,
                    r.n1,
                    r.n2,
                    r.n3.map(|n| format!(", {n}")).unwrap_or_default()
                )));
            }
        }
    }
    Ok(())
}
