use super::chain::{whole_plane_map, MapChain};
use crate::levy::{path_rng, sample_path_with, LevyDescriptor};
use crate::numeric::mean_and_std_error;
use crate::{Error, Result, Version};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Fraction of singular paths above which an estimate is refused.
pub const MAX_REJECTED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct MomentQuery {
    pub q: f64,
    pub w: Complex64,
    pub version: Version,
    /// Truncation horizon `T` of the whole-plane limit.
    pub horizon: f64,
    pub max_step: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Monte-Carlo estimate of `⟨|𝓕̃′(w)|^q⟩`; serializes to the moment JSON
/// record.
#[derive(Debug, Clone, Serialize)]
pub struct MomentEstimate {
    pub q: f64,
    pub w: [f64; 2],
    pub version: Version,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub max_step: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_error: f64,
    pub rejected: usize,
}

/// `|derivative|^q` of the tip-centered whole-plane approximation for one
/// sampled driver.
pub fn sample_moment(d: &LevyDescriptor, query: &MomentQuery, index: u64) -> Result<f64> {
    let mut rng = path_rng(query.seed, index);
    let path = sample_path_with(d, query.horizon, query.max_step, &mut rng)?;
    let chain = MapChain::from_path(&path)?;
    let s = whole_plane_map(&chain, query.w, query.version, true)?;
    Ok(s.derivative.norm().powf(query.q))
}

/// Mean and standard error of `|𝓕̃′(w)|^q` over `n_samples` independent
/// drivers. Paths are evaluated in parallel; every path owns the RNG stream
/// `(seed, index)` and the reduction tree is fixed, so the result is
/// bit-identical for any number of worker threads.
pub fn estimate_moment(d: &LevyDescriptor, query: &MomentQuery) -> Result<MomentEstimate> {
    if query.n_samples < 2 {
        return Err(Error::invalid("n_samples", "need at least 2 samples"));
    }
    if !query.q.is_finite() {
        return Err(Error::invalid("q", "must be finite"));
    }
    // Domain checks happen once up front rather than per path.
    match query.version {
        Version::Exterior if !(query.w.norm() > 1.0) => {
            return Err(Error::invalid("w", "exterior moments need |w| > 1"))
        }
        Version::Interior if !(query.w.norm() > 0.0 && query.w.norm() < 1.0) => {
            return Err(Error::invalid("w", "interior moments need 0 < |w| < 1"))
        }
        _ => {}
    }
    let mut estimate = MomentEstimate {
        q: query.q,
        w: [query.w.re, query.w.im],
        version: query.version,
        horizon: query.horizon,
        max_step: query.max_step,
        n_samples: query.n_samples,
        seed: query.seed,
        mean: 1.0,
        std_error: 0.0,
        rejected: 0,
    };
    if query.q == 0.0 {
        return Ok(estimate);
    }

    let outcomes: Vec<Result<f64>> = (0..query.n_samples as u64)
        .into_par_iter()
        .map(|k| sample_moment(d, query, k))
        .collect();
    let mut values = Vec::with_capacity(outcomes.len());
    let mut rejected = 0;
    for o in outcomes {
        match o {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => rejected += 1,
            Err(e) if is_singular(&e) => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    if rejected as f64 > MAX_REJECTED_FRACTION * query.n_samples as f64 {
        return Err(Error::RejectionOverflow {
            rejected,
            total: query.n_samples,
        });
    }
    let (mean, se) = mean_and_std_error(&values);
    estimate.mean = mean;
    estimate.std_error = se;
    estimate.rejected = rejected;
    Ok(estimate)
}

fn is_singular(e: &Error) -> bool {
    match e {
        Error::SlitBase { .. } | Error::InversionPole => true,
        Error::AtEvent { source, .. } => is_singular(source),
        _ => false,
    }
}

/// Runs the estimate at `T` and `2T`; the difference in units of the
/// combined standard error indicates whether `T` is past the whole-plane
/// transient.
pub fn horizon_doubling_check(
    d: &LevyDescriptor,
    query: &MomentQuery,
) -> Result<(MomentEstimate, MomentEstimate, f64)> {
    let base = estimate_moment(d, query)?;
    let doubled = estimate_moment(
        d,
        &MomentQuery {
            horizon: 2.0 * query.horizon,
            ..query.clone()
        },
    )?;
    let se = base.std_error.hypot(doubled.std_error);
    let z = if se > 0.0 {
        (base.mean - doubled.mean).abs() / se
    } else {
        0.0
    };
    Ok((base, doubled, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(q: f64, n: usize) -> MomentQuery {
        MomentQuery {
            q,
            w: Complex64::new(0.5, 0.0),
            version: Version::Interior,
            horizon: 4.0,
            max_step: 0.05,
            n_samples: n,
            seed: 11,
        }
    }

    #[test]
    fn q_zero_is_exactly_one() {
        let d = LevyDescriptor::brownian(2.0).unwrap();
        let e = estimate_moment(&d, &query(0.0, 10)).unwrap();
        assert_eq!((e.mean, e.std_error), (1.0, 0.0));
    }

    #[test]
    fn needs_two_samples_and_valid_point() {
        let d = LevyDescriptor::brownian(2.0).unwrap();
        assert!(estimate_moment(&d, &query(2.0, 1)).is_err());
        let mut q = query(2.0, 10);
        q.w = Complex64::new(2.0, 0.0);
        assert!(estimate_moment(&d, &q).is_err());
    }

    #[test]
    fn estimate_is_reproducible() {
        let d = LevyDescriptor::uniform_jump(3.0).unwrap();
        let a = estimate_moment(&d, &query(2.0, 64)).unwrap();
        let b = estimate_moment(&d, &query(2.0, 64)).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn thread_count_does_not_change_the_bits() {
        let d = LevyDescriptor::uniform_jump(3.0).unwrap();
        let q = query(2.0, 200);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate_moment(&d, &q)).unwrap();
        let b = four.install(|| estimate_moment(&d, &q)).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    }
}
