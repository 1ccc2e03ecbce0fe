//! Log-log fits of timing against problem size.

use crate::error::{CliError, Result};
use crate::record::RunRecord;

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(CliError::Config("a slope needs at least two points".into()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(CliError::Config("slope needs positive sizes and times".into()));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(CliError::Config("all points have the same size".into()));
    }
    Ok(sxy / sxx)
}

/// Which timing column to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Column {
    #[default]
    Solve,
    Init,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeReport {
    pub slope: f64,
    /// Time of the largest problem over the time of the next largest.
    pub last_ratio: f64,
    pub points: usize,
}

pub fn slope_of(records: &[RunRecord], column: Column) -> Result<SlopeReport> {
    let mut pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| {
            let t = match column {
                Column::Solve => r.solve_seconds,
                Column::Init => r.init_seconds,
            };
            (r.unknowns() as f64, t)
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let slope = loglog_slope(&pts)?;
    let k = pts.len();
    Ok(SlopeReport {
        slope,
        last_ratio: pts[k - 1].1 / pts[k - 2].1,
        points: k,
    })
}
