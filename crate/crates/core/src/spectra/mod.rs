//! Closed-form β-spectra, truncation curves of the three-term system and
//! the two blow-up-rate extractors.

mod closed;
mod ode;
mod theorem;
mod tridiagonal;
mod truncation;

pub use closed::{
    beta_closed_form, branch_thresholds, branch_value, critical_q, gamma, gamma_roots, q_of_gamma, Branch,
    SpectrumPoint,
};
pub use ode::{ode_lambda, rec3_initial_values, rec3_solution, OdeLambda, DEFAULT_DELTA, FIT_RESIDUAL_LIMIT};
pub use theorem::{closed_form_diagonal, verify_q2_theorem, TheoremReport};
pub use tridiagonal::{frobenius_lambda, FrobeniusResult, TridiagonalSystem};
pub use truncation::{rec3_coeffs, truncation_curve, write_truncation_csv, Rec3, TruncationPoint, TruncationRow};

use std::io::Write;

pub fn write_spectrum_csv<W: Write>(points: &[SpectrumPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "q,kappa,beta,branch")?;
    for p in points {
        writeln!(out, "{},{},{},{}", p.q, p.kappa, p.beta, p.branch)?;
    }
    Ok(())
}
