//! End-to-end acceptance run. Prints one `PASS`/`FAIL` line per criterion and
//! exits non-zero if any fails.
//!
//! ```text
//! cargo test --release -p helmfft-cli --test acceptance            # all
//! cargo test --release -p helmfft-cli --test acceptance -- 1 3 7   # a subset
//! ```

use std::alloc::{GlobalAlloc, Layout, System};
use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::sync::atomic::{AtomicUsize, Ordering::Relaxed};
use std::time::Instant;

use helmfft::assembly::{assemble_pencil, Pencil1D};
use helmfft::oracle::{dense_eigensolve_pencil, dense_pencil_1d, dense_solve, DenseOperator, DenseProblem};
use helmfft::spectral::{circulant_eigenvalues, solve_pencil_eigen};
use helmfft::{
    relative_residual, BoundaryKind, Complex64 as C64, EigenBasis, Error, Grid, Scratch, SolverPlan2D, SolverPlan3D,
    Which,
};
use helmfft_cli::rhs::{paper_rhs, random_rhs};
use helmfft_cli::slope::loglog_slope;

struct Counting;

static LIVE: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = LIVE.fetch_add(layout.size(), Relaxed) + layout.size();
            PEAK.fetch_max(now, Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        LIVE.fetch_sub(layout.size(), Relaxed);
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

type Outcome = Result<String, String>;

const TWO_PI: f64 = 2.0 * PI;

fn rel_err(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn oracle_error(grid: &Grid, omega: f64, f: &[C64], u: &[C64]) -> f64 {
    let dense = DenseProblem::new(grid, omega, BoundaryKind::Absorbing).expect("dense problem");
    let reference = dense_solve(&dense, DenseOperator::A, f).expect("dense solve").u;
    rel_err(u, &reference)
}

/// Worst oracle error over the given grids, frequencies and seeds.
fn oracle_sweep(grids: &[Vec<usize>], omegas: &[f64], seeds: u64) -> Outcome {
    let mut worst = (0.0f64, String::new());
    for dims in grids {
        let grid = Grid::new(dims).map_err(|e| e.to_string())?;
        for &omega in omegas {
            for seed in 0..seeds {
                let f = random_rhs(seed, grid.len());
                let u = match dims.len() {
                    2 => SolverPlan2D::new(&grid, omega, BoundaryKind::Absorbing).and_then(|p| p.solve(&f)),
                    _ => SolverPlan3D::new(&grid, omega).and_then(|p| p.solve(&f)),
                }
                .map_err(|e| format!("{dims:?}: {e}"))?;
                let e = oracle_error(&grid, omega, &f, &u);
                if !(e <= worst.0) {
                    worst = (e, format!("{dims:?} omega={omega:.4} seed={seed}"));
                }
            }
        }
    }
    let msg = format!("max oracle error {:.2e} at {} (limit 1e-9)", worst.0, worst.1);
    if worst.0 <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_1() -> Outcome {
    let sizes = [3, 5, 9, 17];
    let grids: Vec<Vec<usize>> = sizes.iter().flat_map(|&a| sizes.iter().map(move |&b| vec![a, b])).collect();
    oracle_sweep(&grids, &[1.0, TWO_PI], 5)
}

fn criterion_2() -> Outcome {
    let grids = vec![vec![3, 3, 3], vec![5, 5, 5], vec![9, 9, 9], vec![17, 9, 5]];
    oracle_sweep(&grids, &[1.0, TWO_PI], 3)
}

fn criterion_3() -> Outcome {
    let grid = Grid::new_2d(65, 65).unwrap();
    let plan = SolverPlan2D::new(&grid, TWO_PI, BoundaryKind::Absorbing).map_err(|e| e.to_string())?;
    let f = paper_rhs(65, grid.len());
    let u = plan.solve(&f).map_err(|e| e.to_string())?;
    let res = relative_residual(&plan.operator().unwrap(), &u, &f).unwrap();
    let err = oracle_error(&grid, TWO_PI, &f, &u);
    let msg = format!("residual {res:.3e} (limit 1e-10), oracle error {err:.3e} (limit 1e-9)");
    if res <= 1e-10 && err <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Minimum wall time of `repeats` calls.
fn min_time(repeats: usize, mut f: impl FnMut()) -> f64 {
    (0..repeats)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

fn time_2d(n1: usize, n2: usize, repeats: usize) -> Result<f64, String> {
    let grid = Grid::new_2d(n1, n2).unwrap();
    let plan = SolverPlan2D::new(&grid, TWO_PI, BoundaryKind::Absorbing).map_err(|e| e.to_string())?;
    let f = random_rhs(1, grid.len());
    let mut u = vec![C64::new(0.0, 0.0); grid.len()];
    let mut s = Scratch::default();
    Ok(min_time(repeats, || plan.solve_with(&f, &mut u, &mut s).unwrap()))
}

fn time_3d(dims: [usize; 3], repeats: usize) -> Result<f64, String> {
    let grid = Grid::new_3d(dims[0], dims[1], dims[2]).unwrap();
    let plan = SolverPlan3D::new(&grid, TWO_PI).map_err(|e| e.to_string())?;
    let f = random_rhs(1, grid.len());
    let mut u = vec![C64::new(0.0, 0.0); grid.len()];
    let mut s = Scratch::default();
    Ok(min_time(repeats, || plan.solve_with(&f, &mut u, &mut s).unwrap()))
}

fn fmt_times(pts: &[(f64, f64)]) -> String {
    pts.iter().map(|(n, t)| format!("{n:.0}:{t:.3e}s")).collect::<Vec<_>>().join(" ")
}

fn criterion_4() -> Outcome {
    let mut pts = Vec::new();
    for n in [257, 513, 1025, 2049] {
        pts.push(((n * n) as f64, time_2d(n, n, if n < 2049 { 7 } else { 5 })?));
    }
    let slope = loglog_slope(&pts).map_err(|e| e.to_string())?;
    let ratio = pts[3].1 / pts[2].1;
    let msg = format!(
        "slope {slope:.3} (want [0.9, 1.3]), t(2049)/t(1025) = {ratio:.2} (want [3.2, 6.0]); {}",
        fmt_times(&pts)
    );
    if (0.9..=1.3).contains(&slope) && (3.2..=6.0).contains(&ratio) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Outcome {
    let mut pts = Vec::new();
    for n in [33, 65, 129] {
        pts.push(((n * n * n) as f64, time_3d([n; 3], 3)?));
    }
    // the largest grid is timed once, with the allocator watching
    let n = 257;
    let grid = Grid::new_3d(n, n, n).unwrap();
    let f = random_rhs(1, grid.len());
    let mut u = vec![C64::new(0.0, 0.0); grid.len()];
    let base = LIVE.load(Relaxed);
    PEAK.store(base, Relaxed);
    let plan = SolverPlan3D::new(&grid, TWO_PI).map_err(|e| e.to_string())?;
    let mut s = Scratch::default();
    let t = Instant::now();
    plan.solve_with(&f, &mut u, &mut s).map_err(|e| e.to_string())?;
    pts.push((grid.len() as f64, t.elapsed().as_secs_f64()));
    let extra = (PEAK.load(Relaxed) - base) as f64 / std::mem::size_of::<C64>() as f64;
    drop((plan, s, u, f));

    let slope = loglog_slope(&pts).map_err(|e| e.to_string())?;
    let ratio = extra / grid.len() as f64;
    let msg = format!(
        "slope {slope:.3} (want [0.9, 1.35]); peak extra memory at 257^3 {ratio:.2} N complex (limit 6); {}",
        fmt_times(&pts)
    );
    if (0.9..=1.35).contains(&slope) && ratio <= 6.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Outcome {
    let a = time_2d(65, 2049, 7)?;
    let b = time_2d(2049, 65, 7)?;
    let r2 = a.max(b) / a.min(b);
    let perms = [[9, 9, 513], [9, 513, 9], [513, 9, 9]];
    let t3: Vec<f64> = perms.iter().map(|&p| time_3d(p, 5)).collect::<Result<_, _>>()?;
    let r3 = t3.iter().cloned().fold(0.0, f64::max) / t3.iter().cloned().fold(f64::INFINITY, f64::min);
    let msg = format!(
        "2D (65,2049) {a:.3e}s vs (2049,65) {b:.3e}s, ratio {r2:.2} (limit 3); 3D perms {:?} ratio {r3:.2} (limit 5)",
        t3.iter().map(|t| format!("{t:.3e}s")).collect::<Vec<_>>()
    );
    if r2 <= 3.0 && r3 <= 5.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Max-norm of `VᵀMV − I` and `VᵀKV − Λ`.
fn orthogonality_defect(p: &Pencil1D, b: &EigenBasis) -> f64 {
    let n = p.n;
    let cols: Vec<Vec<C64>> = (0..n)
        .map(|l| (0..n).map(|i| b.vector_entry(i, l).unwrap()).collect())
        .collect();
    let mut worst = 0.0f64;
    for j in 0..n {
        let (mv, kv) = (p.m.matvec(&cols[j]), p.k.matvec(&cols[j]));
        for i in 0..n {
            let vm: C64 = cols[i].iter().zip(&mv).map(|(a, b)| a * b).sum();
            let vk: C64 = cols[i].iter().zip(&kv).map(|(a, b)| a * b).sum();
            let (em, ek) = if i == j { (C64::new(1.0, 0.0), b.lambdas[i]) } else { (C64::new(0.0, 0.0), C64::new(0.0, 0.0)) };
            worst = worst.max((vm - em).norm()).max((vk - ek).norm());
        }
    }
    worst
}

fn criterion_7() -> Outcome {
    let mut ortho = 0.0f64;
    for n in 3..=64 {
        let h = 1.0 / (n - 1) as f64;
        for omega in [0.0, 1.0, TWO_PI] {
            for bc in [BoundaryKind::Neumann, BoundaryKind::Absorbing] {
                let p = assemble_pencil(n, h, omega, bc).map_err(|e| e.to_string())?;
                let b = solve_pencil_eigen(&p).map_err(|e| e.to_string())?;
                ortho = ortho.max(orthogonality_defect(&p, &b));
            }
        }
    }
    let mut circ = 0.0f64;
    for n in 3..=16 {
        let p = assemble_pencil(n, 1.0 / (n - 1) as f64, 0.0, BoundaryKind::Periodic).unwrap();
        let mut closed = circulant_eigenvalues(&p).map_err(|e| e.to_string())?;
        let (k, m) = dense_pencil_1d(n, 0.0, BoundaryKind::Periodic);
        let (dense, _) = dense_eigensolve_pencil(&k, &m).map_err(|e| e.to_string())?;
        for d in dense {
            let (idx, dist) = closed
                .iter()
                .enumerate()
                .map(|(i, c)| (i, (c - d).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            circ = circ.max(dist);
            closed.swap_remove(idx);
        }
    }
    let msg = format!("orthonormality defect {ortho:.2e}, circulant multiset distance {circ:.2e} (limit 1e-10)");
    if ortho <= 1e-10 && circ <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8() -> Outcome {
    let n2 = 257;
    let mut pts = Vec::new();
    for n1 in [257, 513, 1025] {
        let grid = Grid::new_2d(n1, n2).unwrap();
        let plan = SolverPlan2D::new(&grid, TWO_PI, BoundaryKind::Absorbing).map_err(|e| e.to_string())?;
        let (v_b, _) = plan.solve_aux_partial(&random_rhs(3, grid.len())).map_err(|e| e.to_string())?;
        let mut s = Scratch::default();
        let t = min_time(9, || {
            plan.correction_only(&v_b, &mut s).unwrap();
        });
        pts.push((grid.len() as f64, t));
    }
    let slope = loglog_slope(&pts).map_err(|e| e.to_string())?;
    let msg = format!("step-2 slope {slope:.3} at n2 = {n2} (want [0.7, 1.2]); {}", fmt_times(&pts));
    if (0.7..=1.2).contains(&slope) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_9() -> Outcome {
    let grid = Grid::new_2d(9, 7).unwrap();
    let probe = SolverPlan2D::new(&grid, 1.0, BoundaryKind::Neumann).map_err(|e| e.to_string())?;
    let lambdas = probe.swept().basis(Which::A).lambdas.clone();
    let mut hits = 0;
    for (l, lambda) in lambdas.iter().enumerate() {
        let omega = lambda.re.max(0.0).sqrt();
        match SolverPlan2D::with_shift(&grid, omega, *lambda, BoundaryKind::Neumann)
            .and_then(|p| p.solve(&random_rhs(0, grid.len())))
        {
            Err(Error::SingularBlock { .. }) => hits += 1,
            Err(e) => return Err(format!("mode {l}: unexpected error {e}")),
            Ok(_) => return Err(format!("mode {l}: sigma = {lambda} solved without error")),
        }
    }
    let omega = lambdas[3].re.sqrt().to_string();
    let status = Command::new(env!("CARGO_BIN_EXE_helmfft"))
        .args(["solve", "--n1", "9", "--n2", "7", "--bc", "neumann", "--omega", &omega, "--repeats", "1"])
        .output()
        .map_err(|e| e.to_string())?
        .status;
    let msg = format!(
        "SingularBlock for {hits}/{} resonant shifts; CLI at omega = {omega} exited with {:?} (want 3)",
        lambdas.len(),
        status.code()
    );
    if status.code() == Some(3) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "2D oracle equivalence", criterion_1),
        (2, "3D oracle equivalence", criterion_2),
        (3, "65x65 reference problem", criterion_3),
        (4, "2D scaling", criterion_4),
        (5, "3D scaling and memory", criterion_5),
        (6, "direction balance", criterion_6),
        (7, "spectral invariants", criterion_7),
        (8, "step-2 cost", criterion_8),
        (9, "singular blocks", criterion_9),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        failed += outcome.is_err() as usize;
        println!("criterion {id} [{tag}] {name} ({secs:.1}s): {detail}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
