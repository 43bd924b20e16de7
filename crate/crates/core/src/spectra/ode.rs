use super::tridiagonal::check_on_curve;
use super::truncation::rec3_coeffs;
use crate::numeric::linear_fit;
use crate::{Error, Result};
use serde::Serialize;

/// Series/ODE hand-over point.
pub const SERIES_RADIUS: f64 = 0.25;
/// Terms kept in the series at the hand-over point.
pub const SERIES_ORDER: usize = 120;
pub const ODE_RTOL: f64 = 1e-10;
pub const DEFAULT_DELTA: f64 = 1e-6;
/// Samples in the fit window.
pub const FIT_POINTS: usize = 41;
pub const FIT_RESIDUAL_LIMIT: f64 = 1e-3;

/// The reduced three-term system for `f_0..f_M`.
struct Rec3System {
    m: usize,
    a_up: Vec<f64>,
    a_down: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Rec3System {
    fn new(m: usize, gamma: f64, kappa: f64) -> Self {
        let idx = 0..=m as i64;
        Rec3System {
            m,
            a_up: idx.clone().map(|n| rec3_coeffs(n + 1, gamma, kappa).a).collect(),
            a_down: idx.clone().map(|n| rec3_coeffs(-n + 1, gamma, kappa).a).collect(),
            b: idx.clone().map(|n| rec3_coeffs(n, gamma, kappa).b).collect(),
            c: idx.map(|n| rec3_coeffs(n, gamma, kappa).c).collect(),
        }
    }

    /// Taylor coefficients `a[n][k]` of `f_n` at `ξ = 0`, with `f_0(0) = 1`.
    fn series(&self, order: usize) -> Result<Vec<Vec<f64>>> {
        let m = self.m;
        let mut a = vec![vec![0.0; order]; m + 1];
        for k in 0..order {
            for n in 0..=m {
                if n == 0 && k == 0 {
                    a[0][0] = 1.0;
                    continue;
                }
                let below = if n == 0 {
                    // f_{−1} = ξ f_1
                    if k >= 1 && m >= 1 { a[1][k - 1] } else { 0.0 }
                } else {
                    a[n - 1][k]
                };
                let mut rhs = self.a_down[n] * below;
                if k >= 1 {
                    let above = if n < m { a[n + 1][k - 1] } else { 0.0 };
                    rhs += self.a_up[n] * above - self.c[n] * a[n][k - 1] + 2.0 * (k as f64 - 1.0) * a[n][k - 1];
                }
                let pivot = self.b[n] + self.c[n] - 2.0 * k as f64;
                let scale = self.b[n].abs() + self.c[n].abs() + 2.0 * k as f64 + 1.0;
                if pivot.abs() <= 1e-12 * scale {
                    if rhs.abs() <= 1e-12 * scale && n == 0 {
                        continue;
                    }
                    return Err(Error::Indeterminate { n, k });
                }
                a[n][k] = -rhs / pivot;
            }
        }
        Ok(a)
    }

    /// `d f / ds` with `ξ = 1 − e^{−s}`.
    fn rhs(&self, s: f64, y: &[f64], dy: &mut [f64]) {
        let m = self.m;
        let xi = -(-s).exp_m1();
        let one_minus = (-s).exp();
        for n in 0..=m {
            let above = if n < m { y[n + 1] } else { 0.0 };
            let below = if n == 0 {
                if m >= 1 { xi * y[1] } else { 0.0 }
            } else {
                y[n - 1]
            };
            let x = xi * self.a_up[n] * above + self.a_down[n] * below + (self.b[n] + one_minus * self.c[n]) * y[n];
            dy[n] = x / (2.0 * xi);
        }
    }
}

fn eval_series(a: &[Vec<f64>], xi: f64) -> Vec<f64> {
    a.iter()
        .map(|coef| coef.iter().rev().fold(0.0, |acc, c| acc * xi + c))
        .collect()
}

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive Dormand–Prince 5(4) from `t0` to `t1`; returns accepted steps.
fn dopri5(
    f: &impl Fn(f64, &[f64], &mut [f64]),
    t0: f64,
    t1: f64,
    y: &mut [f64],
    h: &mut f64,
    rtol: f64,
) -> Result<usize> {
    let d = y.len();
    let mut k = vec![vec![0.0; d]; 7];
    let mut tmp = vec![0.0; d];
    let mut t = t0;
    let mut steps = 0;
    while t < t1 {
        let step = h.min(t1 - t);
        if step <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::Domain(format!("step size underflow at s = {t}")));
        }
        f(t, y, &mut k[0]);
        for stage in 1..7 {
            for i in 0..d {
                tmp[i] = y[i] + step * A[stage - 1].iter().enumerate().map(|(j, a)| a * k[j][i]).sum::<f64>();
            }
            f(t + C[stage - 1] * step, &tmp, &mut k[stage]);
        }
        // the last stage was evaluated at the 5th-order solution, now in tmp
        let ymax = y.iter().chain(tmp.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        let mut err = 0.0f64;
        for i in 0..d {
            let e = step * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            let sc = rtol * ymax.max(f64::MIN_POSITIVE);
            err = err.max((e / sc).abs());
        }
        if err <= 1.0 {
            t += step;
            y.copy_from_slice(&tmp);
            steps += 1;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        *h = if err <= 1.0 && step < *h {
            // a step shortened to land on t1 says little about the next one
            h.max(step * fac)
        } else {
            step * fac
        };
    }
    Ok(steps)
}

/// `f_0..f_M` at each requested `ξ ∈ [0, 1)`.
pub fn rec3_solution(m: usize, gamma: f64, kappa: f64, xis: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_on_curve(m, gamma, kappa)?;
    if let Some(x) = xis.iter().find(|x| !(0.0..1.0).contains(*x)) {
        return Err(Error::invalid("xi", format!("{x} outside [0, 1)")));
    }
    let sys = Rec3System::new(m, gamma, kappa);
    let series = sys.series(SERIES_ORDER)?;
    let mut order: Vec<usize> = (0..xis.len()).collect();
    order.sort_by(|&a, &b| xis[a].total_cmp(&xis[b]));
    let mut out = vec![Vec::new(); xis.len()];
    let mut s = -(-SERIES_RADIUS).ln_1p();
    let mut y = eval_series(&series, SERIES_RADIUS);
    let mut h = 1e-3;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| sys.rhs(t, y, dy);
    for k in order {
        let xi = xis[k];
        if xi <= SERIES_RADIUS {
            out[k] = eval_series(&series, xi);
            continue;
        }
        let target = -(-xi).ln_1p();
        dopri5(&rhs, s, target, &mut y, &mut h, ODE_RTOL)?;
        s = target;
        out[k] = y.clone();
    }
    Ok(out)
}

/// `f_n(0)`, `n = 0..=M`.
pub fn rec3_initial_values(m: usize, gamma: f64, kappa: f64) -> Result<Vec<f64>> {
    let sys = Rec3System::new(m, gamma, kappa);
    Ok(sys.series(1)?.into_iter().map(|c| c[0]).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct OdeLambda {
    pub lambda: f64,
    pub fit_residual: f64,
    /// Fit window in `ξ`.
    pub window: (f64, f64),
    pub points: usize,
    pub steps: usize,
}

/// Blow-up rate of `f_0` from the slope of `log|f_0|` against
/// `−log(1−ξ)` over the last decade before `ξ = 1 − delta`.
pub fn ode_lambda(m: usize, gamma: f64, kappa: f64, delta: f64) -> Result<OdeLambda> {
    if !(delta > 0.0 && delta < 1e-2) {
        return Err(Error::invalid("delta", format!("must lie in (0, 0.01), got {delta}")));
    }
    check_on_curve(m, gamma, kappa)?;
    let sys = Rec3System::new(m, gamma, kappa);
    let series = sys.series(SERIES_ORDER)?;
    let mut y = eval_series(&series, SERIES_RADIUS);
    let mut s = -(-SERIES_RADIUS).ln_1p();
    let s_end = -delta.ln();
    let s_start = s_end - std::f64::consts::LN_10;
    let mut h = 1e-3;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| sys.rhs(t, y, dy);
    let mut steps = dopri5(&rhs, s, s_start, &mut y, &mut h, ODE_RTOL)?;
    s = s_start;
    let mut xs = Vec::with_capacity(FIT_POINTS);
    let mut ys = Vec::with_capacity(FIT_POINTS);
    for p in 0..FIT_POINTS {
        let target = s_start + (s_end - s_start) * p as f64 / (FIT_POINTS - 1) as f64;
        steps += dopri5(&rhs, s, target, &mut y, &mut h, ODE_RTOL)?;
        s = target;
        if y[0] == 0.0 || !y[0].is_finite() {
            return Err(Error::Domain(format!("f_0 degenerate at s = {s}")));
        }
        xs.push(s);
        ys.push(y[0].abs().ln());
    }
    let (slope, _, resid) = linear_fit(&xs, &ys);
    if resid > FIT_RESIDUAL_LIMIT {
        return Err(Error::FitResidual {
            residual: resid,
            limit: FIT_RESIDUAL_LIMIT,
        });
    }
    Ok(OdeLambda {
        lambda: slope,
        fit_residual: resid,
        window: (1.0 - (-s_start).exp(), 1.0 - delta),
        points: FIT_POINTS,
        steps,
    })
}
