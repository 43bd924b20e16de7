use super::grid::MomentGrid;
use super::scalar::Scalar;
use crate::numeric::linear_fit;
use crate::{Error, Result};
use serde::Serialize;

/// Smallest grid the diagonal fit accepts.
pub const MIN_FIT_SIZE: usize = 16;
/// Entries dropped from the top of the fit window.
pub const FIT_TRIM: usize = 2;

#[derive(Debug, Clone, Serialize)]
pub struct BetaEstimate {
    pub beta: f64,
    pub degenerate: bool,
    /// Largest absolute residual of the log-log fit.
    pub fit_residual: f64,
    /// Sign changes along the whole diagonal.
    pub sign_changes: usize,
    pub window: (usize, usize),
    pub points: usize,
    pub note: &'static str,
}

const LIMSUP_NOTE: &str = "finite-N slope; limsup and lim are indistinguishable";

/// `β̂ = 1 + slope` of `log|ρ_kk|` against `log k`, with `k = 1, 2, …`
/// counting diagonal entries from the boundary cell.
pub fn diagonal_beta_estimate<S: Scalar>(grid: &MomentGrid<S>) -> Result<BetaEstimate> {
    if grid.size() < MIN_FIT_SIZE {
        return Err(Error::invalid("n", format!("diagonal fit needs N >= {MIN_FIT_SIZE}")));
    }
    let diag: Vec<f64> = grid.diagonal().iter().map(Scalar::to_f64).collect();
    let sign_changes = diag
        .iter()
        .filter(|v| **v != 0.0)
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|p| p[0].signum() != p[1].signum())
        .count();
    let len = diag.len();
    let start = len.div_ceil(2);
    let end = len - FIT_TRIM;
    let degenerate = |window| BetaEstimate {
        beta: 0.0,
        degenerate: true,
        fit_residual: 0.0,
        sign_changes,
        window,
        points: 0,
        note: LIMSUP_NOTE,
    };
    if diag[1..].iter().all(|v| *v == 0.0) {
        return Ok(degenerate((start + 1, end)));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..end)
        .filter(|&k| diag[k] != 0.0)
        .map(|k| (((k + 1) as f64).ln(), diag[k].abs().ln()))
        .unzip();
    if xs.len() < 2 {
        return Ok(degenerate((start + 1, end)));
    }
    let (slope, _, resid) = linear_fit(&xs, &ys);
    Ok(BetaEstimate {
        beta: 1.0 + slope,
        degenerate: false,
        fit_residual: resid,
        sign_changes,
        window: (start + 1, end),
        points: xs.len(),
        note: LIMSUP_NOTE,
    })
}
