//! Legendre-transform calculus among β(q), f(α), τ(q) and D(q) on
//! sampled grids.
//!
//! Transforms are discrete inf/sup over the supplied grids. An optimum
//! attained at the first or last usable input point is flagged
//! [`Flag::Boundary`]; transforms read only `ok` and `limit` inputs.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Beta,
    F,
    Tau,
    D,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Beta => "beta",
            Label::F => "f",
            Label::Tau => "tau",
            Label::D => "d",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "beta" => Ok(Label::Beta),
            "f" => Ok(Label::F),
            "tau" => Ok(Label::Tau),
            "d" => Ok(Label::D),
            other => Err(Error::parse(other, "expected beta, f, tau or d")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Ok,
    /// Optimum sits on the edge of the input grid.
    Boundary,
    /// No value.
    Absent,
    /// Removable singularity filled by a difference quotient.
    Limit,
}

impl Flag {
    fn usable(self) -> bool {
        matches!(self, Flag::Ok | Flag::Limit)
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::Ok => "ok",
            Flag::Boundary => "boundary",
            Flag::Absent => "absent",
            Flag::Limit => "limit",
        })
    }
}

impl FromStr for Flag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ok" | "" => Ok(Flag::Ok),
            "boundary" => Ok(Flag::Boundary),
            "absent" => Ok(Flag::Absent),
            "limit" => Ok(Flag::Limit),
            other => Err(Error::parse(other, "flag must be ok, boundary, absent or limit")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    label: Label,
    abscissae: Vec<f64>,
    ordinates: Vec<Option<f64>>,
    flags: Vec<Flag>,
}

fn check_abscissae(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::invalid("grid", "must not be empty"));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("grid", "abscissae must be finite"));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid", "abscissae must be strictly increasing"));
    }
    Ok(())
}

impl SpectrumGrid {
    /// All-`ok` grid of finite samples.
    pub fn new(label: Label, abscissae: Vec<f64>, ordinates: Vec<f64>) -> Result<Self> {
        let n = ordinates.len();
        Self::with_flags(label, abscissae, ordinates.into_iter().map(Some).collect(), vec![Flag::Ok; n])
    }

    pub fn with_flags(
        label: Label,
        abscissae: Vec<f64>,
        ordinates: Vec<Option<f64>>,
        flags: Vec<Flag>,
    ) -> Result<Self> {
        check_abscissae(&abscissae)?;
        if ordinates.len() != abscissae.len() || flags.len() != abscissae.len() {
            return Err(Error::invalid("grid", "abscissae, ordinates and flags differ in length"));
        }
        for (y, f) in ordinates.iter().zip(&flags) {
            match (y, f) {
                (None, Flag::Absent) => {}
                (Some(v), flag) if *flag != Flag::Absent && v.is_finite() => {}
                _ => return Err(Error::invalid("grid", "ordinate must be finite, or absent with flag `absent`")),
            }
        }
        Ok(SpectrumGrid {
            label,
            abscissae,
            ordinates,
            flags,
        })
    }

    /// Samples `f` on `n` evenly spaced points of `[lo, hi]`.
    pub fn sample(label: Label, lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let xs = linspace(lo, hi, n)?;
        let ys = xs.iter().map(|&x| f(x)).collect();
        Self::new(label, xs, ys)
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn ordinates(&self) -> &[Option<f64>] {
        &self.ordinates
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    /// `(x, y)` of entries flagged `ok` or `limit`.
    pub fn usable(&self) -> Vec<(f64, f64)> {
        self.abscissae
            .iter()
            .zip(&self.ordinates)
            .zip(&self.flags)
            .filter(|(_, f)| f.usable())
            .map(|((x, y), _)| (*x, y.expect("usable entries carry a value")))
            .collect()
    }

    pub fn value_at(&self, x: f64) -> Option<f64> {
        let k = self.abscissae.iter().position(|a| *a == x)?;
        self.ordinates[k]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,flag")?;
        for k in 0..self.len() {
            let y = self.ordinates[k].map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{}", self.abscissae[k], y, self.flags[k])?;
        }
        Ok(())
    }

    /// Reads `x,y[,flag]`. The ordinate is the column named after `label`
    /// when the header has one (so spectrum CSVs load directly), otherwise
    /// the second column; the flag column is used only when named `flag`.
    pub fn read_csv<R: Read>(label: Label, input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(input);
        let headers = reader
            .headers()
            .map_err(|e| Error::parse("header", e.to_string()))?
            .clone();
        let name = label.to_string();
        let y_col = headers.iter().position(|h| h.eq_ignore_ascii_case(&name)).unwrap_or(1);
        let flag_col = headers.iter().position(|h| h.eq_ignore_ascii_case("flag"));
        let (mut xs, mut ys, mut flags) = (Vec::new(), Vec::new(), Vec::new());
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(format!("row {}", line + 2), e.to_string()))?;
            let field = |k: usize| rec.get(k).unwrap_or("");
            let x: f64 = field(0)
                .parse()
                .map_err(|_| Error::parse(field(0), "x must be a number"))?;
            let flag: Flag = flag_col.map_or(Ok(Flag::Ok), |k| field(k).parse())?;
            let y = match field(y_col) {
                "" => None,
                s => Some(s.parse::<f64>().map_err(|_| Error::parse(s, "y must be a number"))?),
            };
            let flag = if y.is_none() { Flag::Absent } else { flag };
            xs.push(x);
            ys.push(y);
            flags.push(flag);
        }
        Self::with_flags(label, xs, ys, flags)
    }
}

/// `n ≥ 2` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("grid", "need n >= 2 points and lo < hi"));
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

fn require_label(g: &SpectrumGrid, want: Label) -> Result<()> {
    if g.label == want {
        Ok(())
    } else {
        Err(Error::invalid("grid", format!("expected a `{want}` grid, got `{}`", g.label)))
    }
}

/// Discrete optimum of `objective` over `points`; `Boundary` when it sits
/// on the first or last point of a multi-point input.
fn optimise(points: &[(f64, f64)], maximise: bool, objective: impl Fn(f64, f64) -> f64) -> (Option<f64>, Flag) {
    let mut best: Option<(usize, f64)> = None;
    for (k, (x, y)) in points.iter().enumerate() {
        let v = objective(*x, *y);
        let better = match best {
            None => true,
            Some((_, b)) => {
                if maximise {
                    v > b
                } else {
                    v < b
                }
            }
        };
        if better {
            best = Some((k, v));
        }
    }
    match best {
        None => (None, Flag::Absent),
        Some((k, v)) => {
            let edge = points.len() > 1 && (k == 0 || k == points.len() - 1);
            (Some(v), if edge { Flag::Boundary } else { Flag::Ok })
        }
    }
}

fn assemble(label: Label, xs: &[f64], results: Vec<(Option<f64>, Flag)>) -> Result<SpectrumGrid> {
    let (ys, flags) = results.into_iter().unzip();
    SpectrumGrid::with_flags(label, xs.to_vec(), ys, flags)
}

/// `f(α) = inf_q [q + α(β(q) + 1 − q)]`.
pub fn f_from_beta(beta: &SpectrumGrid, alphas: &[f64]) -> Result<SpectrumGrid> {
    require_label(beta, Label::Beta)?;
    check_abscissae(alphas)?;
    let pts = beta.usable();
    let out = alphas
        .iter()
        .map(|&a| optimise(&pts, false, |q, b| q + a * (b + 1.0 - q)))
        .collect();
    assemble(Label::F, alphas, out)
}

fn positive_alphas(pts: &[(f64, f64)]) -> Result<()> {
    if pts.iter().any(|(a, _)| *a <= 0.0) {
        return Err(Error::invalid("alpha", "α grid must be strictly positive"));
    }
    Ok(())
}

/// `β(q) = sup_α [q − 1 + (f(α) − q)/α]`.
pub fn beta_from_f(f: &SpectrumGrid, qs: &[f64]) -> Result<SpectrumGrid> {
    require_label(f, Label::F)?;
    check_abscissae(qs)?;
    let pts = f.usable();
    positive_alphas(&pts)?;
    let out = qs
        .iter()
        .map(|&q| optimise(&pts, true, |a, fa| q - 1.0 + (fa - q) / a))
        .collect();
    assemble(Label::Beta, qs, out)
}

/// Same transform through `ω(a) = a f(1/a)`:
/// `β(q) = sup_a [ω(a) − (a − 1)q] − 1`.
pub fn beta_from_f_omega(f: &SpectrumGrid, qs: &[f64]) -> Result<SpectrumGrid> {
    require_label(f, Label::F)?;
    check_abscissae(qs)?;
    let pts = f.usable();
    positive_alphas(&pts)?;
    let omega: Vec<(f64, f64)> = pts.iter().rev().map(|(a, fa)| (1.0 / a, fa / a)).collect();
    let out = qs
        .iter()
        .map(|&q| {
            let (v, flag) = optimise(&omega, true, |a, w| w - (a - 1.0) * q);
            (v.map(|v| v - 1.0), flag)
        })
        .collect();
    assemble(Label::Beta, qs, out)
}

/// `τ(q) = inf_α [qα − f(α)]` and `D(q) = τ(q)/(q − 1)`; at `q = 1` the
/// latter is a difference quotient of τ flagged `limit`.
pub fn tau_and_dimensions(f: &SpectrumGrid, qs: &[f64]) -> Result<(SpectrumGrid, SpectrumGrid)> {
    require_label(f, Label::F)?;
    check_abscissae(qs)?;
    let pts = f.usable();
    let tau: Vec<(Option<f64>, Flag)> = qs
        .iter()
        .map(|&q| optimise(&pts, false, |a, fa| q * a - fa))
        .collect();
    let dims = qs
        .iter()
        .enumerate()
        .map(|(k, &q)| {
            let (t, flag) = tau[k];
            if (q - 1.0).abs() > 1e-12 {
                return (t.map(|t| t / (q - 1.0)), flag);
            }
            let lo = k.checked_sub(1).filter(|&j| tau[j].0.is_some()).unwrap_or(k);
            let hi = Some(k + 1).filter(|&j| j < qs.len() && tau[j].0.is_some()).unwrap_or(k);
            match (tau[lo].0, tau[hi].0) {
                (Some(a), Some(b)) if hi > lo => (Some((b - a) / (qs[hi] - qs[lo])), Flag::Limit),
                _ => (None, Flag::Absent),
            }
        })
        .collect();
    Ok((assemble(Label::Tau, qs, tau)?, assemble(Label::D, qs, dims)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Truncated {
    pub grid: SpectrumGrid,
    /// Smallest and largest α with `f(α) ≥ 0`; `None` when empty.
    pub support: Option<(f64, f64)>,
}

impl Truncated {
    pub fn is_empty(&self) -> bool {
        self.support.is_none()
    }
}

/// Drops `f(α) < 0` (zero-probability events).
pub fn positive_truncation(f: &SpectrumGrid) -> Result<Truncated> {
    require_label(f, Label::F)?;
    let mut grid = f.clone();
    let mut support: Option<(f64, f64)> = None;
    for k in 0..grid.len() {
        match grid.ordinates[k] {
            Some(v) if v < 0.0 => {
                grid.ordinates[k] = None;
                grid.flags[k] = Flag::Absent;
            }
            Some(_) => {
                let x = grid.abscissae[k];
                support = Some(support.map_or((x, x), |(lo, _)| (lo, x)));
            }
            None => {}
        }
    }
    Ok(Truncated { grid, support })
}

/// Largest second difference of the usable entries over a uniform
/// neighbourhood (positive means locally convex).
pub fn max_second_difference(g: &SpectrumGrid) -> f64 {
    second_differences(g).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

pub fn min_second_difference(g: &SpectrumGrid) -> f64 {
    second_differences(g).into_iter().fold(f64::INFINITY, f64::min)
}

fn second_differences(g: &SpectrumGrid) -> Vec<f64> {
    g.usable()
        .windows(3)
        .map(|w| {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            let (x2, y2) = w[2];
            // divided difference scaled back to unit spacing
            let d = ((y2 - y1) / (x2 - x1) - (y1 - y0) / (x1 - x0)) * 2.0 / (x2 - x0);
            d * ((x2 - x0) / 2.0).powi(2)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_beta() -> SpectrumGrid {
        SpectrumGrid::sample(Label::Beta, -2.0, 2.0, 2001, |q| q * q / 2.0).unwrap()
    }

    #[test]
    fn f_at_one() {
        let f = f_from_beta(&toy_beta(), &[1.0]).unwrap();
        assert!((f.ordinates()[0].unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(f.flags()[0], Flag::Ok);
    }

    #[test]
    fn constant_beta_hits_boundary() {
        let b = SpectrumGrid::sample(Label::Beta, -2.0, 2.0, 101, |_| 0.7).unwrap();
        let f = f_from_beta(&b, &[0.5, 0.9, 1.1, 2.0]).unwrap();
        assert!(f.flags().iter().all(|fl| *fl == Flag::Boundary));
    }

    #[test]
    fn beta_of_parabola_at_one() {
        let f = SpectrumGrid::sample(Label::F, 0.5, 1.5, 1001, |a| 1.0 - (a - 1.0).powi(2)).unwrap();
        let b = beta_from_f(&f, &[1.0]).unwrap();
        assert!(b.ordinates()[0].unwrap().abs() < 1e-12);
    }

    #[test]
    fn omega_form_agrees() {
        let f = SpectrumGrid::sample(Label::F, 0.3, 3.0, 500, |a| 1.2 - (a - 1.4).powi(2)).unwrap();
        let qs = linspace(-3.0, 3.0, 61).unwrap();
        let a = beta_from_f(&f, &qs).unwrap();
        let b = beta_from_f_omega(&f, &qs).unwrap();
        for (x, y) in a.ordinates().iter().zip(b.ordinates()) {
            assert!((x.unwrap() - y.unwrap()).abs() < 1e-10);
        }
        assert_eq!(a.flags(), b.flags());
    }

    #[test]
    fn point_mass() {
        let f = SpectrumGrid::new(Label::F, vec![2.0], vec![2.0]).unwrap();
        let qs = [-1.0, 0.0, 0.5, 1.0, 2.0, 3.0];
        let (tau, d) = tau_and_dimensions(&f, &qs).unwrap();
        for (k, q) in qs.iter().enumerate() {
            assert_eq!(tau.ordinates()[k], Some(2.0 * q - 2.0));
            assert!((d.ordinates()[k].unwrap() - 2.0).abs() < 1e-12);
        }
        assert_eq!(d.flags()[3], Flag::Limit);
        assert_eq!(d.flags()[0], Flag::Ok);
    }

    #[test]
    fn hausdorff_readout() {
        let f = SpectrumGrid::sample(Label::F, 0.2, 3.0, 281, |a| 1.3 - 0.4 * (a - 1.1).powi(2)).unwrap();
        let (tau, _) = tau_and_dimensions(&f, &[0.0]).unwrap();
        let max_f = f.usable().iter().map(|p| p.1).fold(f64::MIN, f64::max);
        assert_eq!(-tau.ordinates()[0].unwrap(), max_f);
    }

    #[test]
    fn truncation_support() {
        let f = SpectrumGrid::sample(Label::F, -1.0, 3.0, 401, |a| 1.0 - (a - 1.0).powi(2)).unwrap();
        let t = positive_truncation(&f).unwrap();
        let (lo, hi) = t.support.unwrap();
        assert!(lo.abs() < 1e-9 && (hi - 2.0).abs() < 1e-9);
        let pos = SpectrumGrid::sample(Label::F, 0.0, 1.0, 11, |a| a).unwrap();
        assert_eq!(positive_truncation(&pos).unwrap().grid, pos);
        let neg = SpectrumGrid::sample(Label::F, 0.0, 1.0, 11, |a| -1.0 - a).unwrap();
        let t = positive_truncation(&neg).unwrap();
        assert!(t.is_empty());
        assert!(t.grid.flags().iter().all(|f| *f == Flag::Absent));
    }

    #[test]
    fn csv_round_trip() {
        let f = SpectrumGrid::with_flags(
            Label::F,
            vec![0.5, 1.0, 1.5],
            vec![Some(0.75), None, Some(0.5)],
            vec![Flag::Boundary, Flag::Absent, Flag::Ok],
        )
        .unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "x,y,flag\n0.5,0.75,boundary\n1,,absent\n1.5,0.5,ok\n");
        assert_eq!(SpectrumGrid::read_csv(Label::F, buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn reads_spectrum_columns_by_name() {
        let text = "q,kappa,beta,branch\n-1,2,0.5,middle\n2,2,4,high\n";
        let g = SpectrumGrid::read_csv(Label::Beta, text.as_bytes()).unwrap();
        assert_eq!(g.abscissae(), [-1.0, 2.0]);
        assert_eq!(g.ordinates(), [Some(0.5), Some(4.0)]);
        assert_eq!(g.flags(), [Flag::Ok, Flag::Ok]);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(SpectrumGrid::new(Label::F, vec![1.0, 0.5], vec![0.0, 0.0]).is_err());
        assert!(beta_from_f(&SpectrumGrid::new(Label::F, vec![-1.0, 1.0], vec![0.0, 0.0]).unwrap(), &[0.0]).is_err());
    }
}
