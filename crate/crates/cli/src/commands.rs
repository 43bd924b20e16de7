use crate::args::*;
use crate::error::CliError;
use loewner_core::levy::sample_path;
use loewner_core::multifractal::{
    Flag, beta_from_f, beta_from_f_omega, f_from_beta, linspace, positive_truncation, tau_and_dimensions, Label,
    SpectrumGrid,
};
use loewner_core::numeric::{parse_rational, Rational};
use loewner_core::recurrence::{
    build_grid, diagonal_beta_estimate, rho_eval, MomentGrid, Scalar, ScalarKind, TheoremCase,
};
use loewner_core::slit::{estimate_moment, horizon_doubling_check, trace_hull, write_hull_csv, MapChain, MomentQuery};
use loewner_core::spectra::{
    beta_closed_form, frobenius_lambda, ode_lambda, truncation_curve, verify_q2_theorem, write_spectrum_csv,
    write_truncation_csv, Branch, TruncationRow,
};
use loewner_core::Version;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

/// Float grids whose re-substitution residual exceeds this are flagged.
pub const GRID_RESIDUAL_WARNING: f64 = 1e-10;

/// Drift between the `T` and `2T` estimates, in standard errors, above
/// which the horizon is reported as too short.
pub const DOUBLING_Z_WARNING: f64 = 3.0;

pub enum SidePath {
    /// Appended to the `--out` path; dropped when writing to stdout.
    Suffix(&'static str),
    Explicit(PathBuf),
}

pub struct Side {
    pub path: SidePath,
    pub bytes: Vec<u8>,
}

#[derive(Default)]
pub struct Outcome {
    pub body: Vec<u8>,
    pub sides: Vec<Side>,
    pub warnings: Vec<String>,
    /// Set when the artifacts were produced but report a failed check.
    pub failure: Option<String>,
}

impl Outcome {
    fn with_body(body: Vec<u8>) -> Self {
        Outcome {
            body,
            ..Default::default()
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("plain data serializes");
    out.push(b'\n');
    out
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut out = Vec::new();
    write(&mut out).expect("writing to memory");
    out
}

fn grid_points(explicit: &[f64], spec: Option<GridSpec>, flag: &str) -> Result<Vec<f64>, CliError> {
    let mut points = explicit.to_vec();
    if let Some(g) = spec {
        points.extend(linspace(g.lo, g.hi, g.n).map_err(|e| CliError::usage(format!("--{flag}-grid: {e}")))?);
    }
    if points.is_empty() {
        return Err(CliError::usage(format!("give --{flag} or --{flag}-grid")));
    }
    Ok(points)
}

pub fn run(seed: u64, command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Eta(a) => eta(a),
        Command::Simulate(a) => simulate(seed, a),
        Command::Grid(a) => grid(a),
        Command::BetaEst(a) => beta_est(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Truncation(a) => truncation(a),
        Command::Frobenius(a) => frobenius(a),
        Command::OdeLambda(a) => ode(a),
        Command::Legendre(a) => legendre(a),
        Command::Trace(a) => trace(seed, a),
        Command::Verify(a) => verify(a),
    }
}

fn eta(a: &EtaArgs) -> Result<Outcome, CliError> {
    a.eta.validate()?;
    let mut body = String::from("m,eta\n");
    for m in 0..=a.m_max as i64 {
        body.push_str(&format!("{m},{}\n", a.eta.eval_exact(m)));
    }
    Ok(Outcome::with_body(body.into_bytes()))
}

fn simulate(seed: u64, a: &SimulateArgs) -> Result<Outcome, CliError> {
    let query = MomentQuery {
        q: a.q,
        w: a.w.0,
        version: a.version,
        horizon: a.horizon,
        max_step: a.max_step,
        n_samples: a.n_samples,
        seed,
    };
    if !a.doubling_check {
        return Ok(Outcome::with_body(to_json(&estimate_moment(&a.eta, &query)?)));
    }
    let (base, doubled, z) = horizon_doubling_check(&a.eta, &query)?;
    let mut out = Outcome::with_body(to_json(&json!({ "base": base, "doubled": doubled, "z": z })));
    if z > DOUBLING_Z_WARNING {
        out.warnings.push(format!(
            "estimates at T = {} and 2T differ by {z:.2} standard errors; the horizon is too short",
            a.horizon
        ));
    }
    Ok(out)
}

enum AnyGrid {
    Exact(MomentGrid<Rational>),
    Float(MomentGrid<f64>),
}

fn build_any(a: &GridArgs) -> Result<AnyGrid, CliError> {
    if a.exact {
        let q = parse_rational(&a.q).map_err(|e| CliError::usage(format!("--q: {e}")))?;
        Ok(AnyGrid::Exact(build_grid(a.version, &a.eta, q, a.n)?))
    } else {
        let q: f64 = a
            .q
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("--q: `{}` is not a number", a.q)))?;
        Ok(AnyGrid::Float(build_grid(a.version, &a.eta, q, a.n)?))
    }
}

fn grid_outcome<S: Scalar>(g: &MomentGrid<S>) -> Outcome {
    let mut out = Outcome::with_body(csv_bytes(|w| g.write_csv(w)));
    let mut meta = serde_json::to_value(g.metadata()).expect("plain data serializes");
    if S::KIND == ScalarKind::Float {
        let residual = g.max_residual();
        meta["max_residual"] = json!(residual);
        if residual > GRID_RESIDUAL_WARNING {
            out.warnings
                .push(format!("relative re-substitution residual {residual:.3e} exceeds {GRID_RESIDUAL_WARNING:e}"));
        }
    }
    out.sides.push(Side {
        path: SidePath::Suffix(".meta.json"),
        bytes: to_json(&meta),
    });
    out
}

fn grid(a: &GridArgs) -> Result<Outcome, CliError> {
    Ok(match build_any(a)? {
        AnyGrid::Exact(g) => grid_outcome(&g),
        AnyGrid::Float(g) => grid_outcome(&g),
    })
}

fn beta_outcome<S: Scalar>(g: &MomentGrid<S>, w: Option<ComplexArg>) -> Result<Outcome, CliError> {
    let estimate = diagonal_beta_estimate(g)?;
    let rho = w.map(|w| rho_eval(g, w.0)).transpose()?;
    let mut out = Outcome::with_body(to_json(&json!({
        "metadata": g.metadata(),
        "estimate": estimate,
        "rho": rho,
    })));
    if let Some(msg) = rho.as_ref().and_then(|r| r.warning.clone()) {
        out.warnings.push(msg);
    }
    if estimate.degenerate {
        out.warnings.push("diagonal vanishes beyond the boundary cell; no growth rate".into());
    }
    Ok(out)
}

fn beta_est(a: &BetaEstArgs) -> Result<Outcome, CliError> {
    match build_any(&a.grid)? {
        AnyGrid::Exact(g) => beta_outcome(&g, a.w),
        AnyGrid::Float(g) => beta_outcome(&g, a.w),
    }
}

fn spectrum(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let qs = grid_points(&a.q, a.q_grid, "q")?;
    let mut points = Vec::with_capacity(qs.len() * a.kappa.len());
    for &kappa in &a.kappa {
        for &q in &qs {
            points.push(beta_closed_form(a.version, q, kappa)?);
        }
    }
    Ok(Outcome::with_body(csv_bytes(|w| write_spectrum_csv(&points, w))))
}

fn truncation(a: &TruncationArgs) -> Result<Outcome, CliError> {
    let gammas = grid_points(&a.gamma, a.gamma_grid, "gamma")?;
    let mut rows = Vec::with_capacity(gammas.len());
    let mut warnings = Vec::new();
    for &g in &gammas {
        let point = truncation_curve(a.version, a.m, g)?;
        let closed = beta_closed_form(a.version, point.q, point.kappa)?;
        if closed.branch != Branch::High {
            warnings.push(format!(
                "γ = {g}: (κ, q) = ({}, {}) lies on the {} branch, where λ need not equal β",
                point.kappa, point.q, closed.branch
            ));
        }
        let (frob, ode_value) = match a.version {
            Version::Interior => {
                let frob = frobenius_lambda(a.m, g, point.kappa)?.lambda_max;
                let ode_value = if a.skip_ode {
                    None
                } else {
                    Some(ode_lambda(a.m, g, point.kappa, a.delta)?.lambda)
                };
                (Some(frob), ode_value)
            }
            Version::Exterior => (None, None),
        };
        rows.push(TruncationRow {
            point,
            lambda_frobenius: frob,
            lambda_ode: ode_value,
            beta_closed_form: Some(closed.beta),
        });
    }
    if a.version == Version::Exterior {
        warnings.push("exterior rows carry the closed form only; the three-term extractors are interior".into());
    }
    let mut out = Outcome::with_body(csv_bytes(|w| write_truncation_csv(&rows, w)));
    out.warnings = warnings;
    Ok(out)
}

fn curve_kappa(m: usize, gamma: f64, kappa: Option<f64>) -> Result<f64, CliError> {
    match kappa {
        Some(k) => Ok(k),
        None => Ok(truncation_curve(Version::Interior, m, gamma)?.kappa),
    }
}

fn merge_json(head: Value, tail: impl Serialize) -> Value {
    let mut head = head;
    let tail = serde_json::to_value(tail).expect("plain data serializes");
    if let (Some(h), Value::Object(t)) = (head.as_object_mut(), tail) {
        h.extend(t);
    }
    head
}

fn frobenius(a: &FrobeniusArgs) -> Result<Outcome, CliError> {
    let kappa = curve_kappa(a.m, a.gamma, a.kappa)?;
    let result = frobenius_lambda(a.m, a.gamma, kappa)?;
    let head = json!({ "M": a.m, "gamma": a.gamma, "kappa": kappa });
    Ok(Outcome::with_body(to_json(&merge_json(head, result))))
}

fn ode(a: &OdeLambdaArgs) -> Result<Outcome, CliError> {
    let kappa = curve_kappa(a.m, a.gamma, a.kappa)?;
    let result = ode_lambda(a.m, a.gamma, kappa, a.delta)?;
    let head = json!({ "M": a.m, "gamma": a.gamma, "kappa": kappa, "delta": a.delta });
    Ok(Outcome::with_body(to_json(&merge_json(head, result))))
}

fn legendre(a: &LegendreArgs) -> Result<Outcome, CliError> {
    let label = match a.transform {
        Transform::FFromBeta => Label::Beta,
        _ => Label::F,
    };
    let file = std::fs::File::open(&a.input).map_err(|e| CliError::io(format!("--input {}", a.input.display()), e))?;
    let input = SpectrumGrid::read_csv(label, file)?;
    let points = || -> Result<Vec<f64>, CliError> {
        let g = a
            .grid
            .ok_or_else(|| CliError::usage("--grid is required for this transform"))?;
        linspace(g.lo, g.hi, g.n).map_err(|e| CliError::usage(format!("--grid: {e}")))
    };
    let mut warnings = Vec::new();
    let result = match a.transform {
        Transform::FFromBeta => f_from_beta(&input, &points()?)?,
        Transform::BetaFromF => beta_from_f(&input, &points()?)?,
        Transform::BetaFromFOmega => beta_from_f_omega(&input, &points()?)?,
        Transform::Tau => tau_and_dimensions(&input, &points()?)?.0,
        Transform::Dimension => tau_and_dimensions(&input, &points()?)?.1,
        Transform::Truncate => {
            let t = positive_truncation(&input)?;
            if t.is_empty() {
                warnings.push("f is negative everywhere; the truncated spectrum is empty".into());
            }
            t.grid
        }
    };
    let boundary = result
        .flags()
        .iter()
        .filter(|f| **f == Flag::Boundary)
        .count();
    if boundary > 0 {
        warnings.push(format!("{boundary} points have their optimum on the edge of the input grid"));
    }
    let mut out = Outcome::with_body(csv_bytes(|w| result.write_csv(w)));
    out.warnings = warnings;
    Ok(out)
}

fn trace(seed: u64, a: &TraceArgs) -> Result<Outcome, CliError> {
    let path = sample_path(&a.eta, a.horizon, a.max_step, seed)?;
    let chain = MapChain::from_path(&path)?;
    let hull = trace_hull(&chain, a.samples_per_event)?;
    let mut out = Outcome::with_body(csv_bytes(|w| write_hull_csv(&hull, w)));
    if let Some(p) = &a.driver_out {
        out.sides.push(Side {
            path: SidePath::Explicit(p.clone()),
            bytes: csv_bytes(|w| path.write_csv(w)),
        });
    }
    Ok(out)
}

fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let cases = match a.case {
        Some(c) => vec![c],
        None => vec![TheoremCase::One, TheoremCase::Two],
    };
    let reports = cases
        .into_iter()
        .map(verify_q2_theorem)
        .collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.passed());
    let mut out = Outcome::with_body(to_json(&json!({ "passed": passed, "reports": reports })));
    if !passed {
        let failures: Vec<String> = reports.iter().flat_map(|r| r.failures.iter().cloned()).collect();
        out.failure = Some(format!("verification failed: {}", failures.join("; ")));
    }
    Ok(out)
}
