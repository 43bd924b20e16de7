//! Slit maps, their compositions into Loewner chains, whole-plane
//! approximations, and Monte-Carlo derivative moments.

mod chain;
mod monte_carlo;
mod spike;

pub use chain::{chain_eval, trace_hull, whole_plane_map, write_hull_csv, MapChain, SpikeEvent};
pub use monte_carlo::{
    estimate_moment, horizon_doubling_check, sample_moment, MomentEstimate, MomentQuery,
    MAX_REJECTED_FRACTION,
};
pub use spike::{spike_map, ComplexSample, SLIT_BASE_TOLERANCE};
