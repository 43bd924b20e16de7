//! Coefficient grids `ρ_ij` of `⟨|F′|^q⟩` from the nine-term recurrence.
//!
//! Interior grids expand `Σ ρ_ij w^{i−1} w̄^{j−1}` for `i, j ≥ 1` with
//! `ρ_11 = 1`; exterior grids are Laurent coefficients in `1/w`, indexed
//! from `−1` with `ρ_{−1,−1} = 1`.

mod beta;
mod closed_form;
mod eta;
mod eval;
mod grid;
mod scalar;

pub use beta::{diagonal_beta_estimate, BetaEstimate, FIT_TRIM, MIN_FIT_SIZE};
pub use closed_form::{closed_form_reference, TheoremCase};
pub use eta::EtaProfile;
pub use eval::{rho_eval, RhoValue, TAIL_WARNING_FRACTION};
pub use grid::{build_grid, coefficients, lowest_index, GridMetadata, MomentGrid, COMPENSATED_ABOVE};
pub use scalar::{Scalar, ScalarKind};
