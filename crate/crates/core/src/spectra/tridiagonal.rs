use super::truncation::{a_scale, rec3_coeffs};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

/// Curve tolerance for `A_{−M}` relative to its natural scale.
pub const OFF_CURVE_TOLERANCE: f64 = 1e-8;
/// Largest allowed `|g_{−n} − g_n|` of a max-normalised eigenvector.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

/// Rows `n = −M..=M` of `T g = 2λ g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TridiagonalSystem {
    pub m: usize,
    /// `B_n`.
    pub diag: Vec<f64>,
    /// `A_{n+1}` for rows `−M..M−1`.
    pub upper: Vec<f64>,
    /// `A_{−n+1}` for rows `−M+1..=M`.
    pub lower: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(m: usize, gamma: f64, kappa: f64) -> Self {
        let mi = m as i64;
        let diag = (-mi..=mi).map(|n| rec3_coeffs(n, gamma, kappa).b).collect();
        let upper = (-mi..mi).map(|n| rec3_coeffs(n + 1, gamma, kappa).a).collect();
        let lower = (-mi + 1..=mi).map(|n| rec3_coeffs(-n + 1, gamma, kappa).a).collect();
        TridiagonalSystem { m, diag, upper, lower }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut t = DMatrix::zeros(d, d);
        for k in 0..d {
            t[(k, k)] = self.diag[k];
        }
        for k in 0..d - 1 {
            t[(k, k + 1)] = self.upper[k];
            t[(k + 1, k)] = self.lower[k];
        }
        t
    }

    /// All eigenvalues. Symmetrisable systems go through a symmetric
    /// solver, others through the real Schur form.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut vals: Vec<Complex64> = match self.symmetrised() {
            Some(s) => SymmetricEigen::new(s)
                .eigenvalues
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
            None => self.to_dense().complex_eigenvalues().iter().copied().collect(),
        };
        vals.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        vals
    }

    /// `D T D⁻¹`, symmetric, when every `upper_k · lower_k` is positive.
    fn symmetrised(&self) -> Option<DMatrix<f64>> {
        let d = self.dim();
        let mut s = DMatrix::zeros(d, d);
        for k in 0..d {
            s[(k, k)] = self.diag[k];
        }
        for k in 0..d - 1 {
            let p = self.upper[k] * self.lower[k];
            if !(p > 0.0) {
                return None;
            }
            let off = p.sqrt().copysign(self.upper[k]);
            s[(k, k + 1)] = off;
            s[(k + 1, k)] = off;
        }
        Some(s)
    }

    /// Reflection-symmetric eigenvector for `mu`, normalised to max-norm 1
    /// with a positive centre entry, if the eigenspace contains one.
    fn symmetric_vector(&self, mu: f64) -> Option<DVector<f64>> {
        let d = self.dim();
        let t = self.to_dense();
        let shifted = &t - DMatrix::identity(d, d) * mu;
        let scale = t.norm().max(1.0);
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.as_ref()?;
        let null: Vec<DVector<f64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s <= 1e-9 * scale)
            .map(|(k, _)| v_t.row(k).transpose())
            .collect();
        if null.is_empty() {
            return None;
        }
        let basis = DMatrix::from_columns(&null);
        // (R − I)·basis·c = 0 picks the symmetric combination.
        let mut rm = DMatrix::zeros(d, d);
        for k in 0..d {
            rm[(k, d - 1 - k)] = 1.0;
        }
        rm -= DMatrix::identity(d, d);
        let proj = &rm * &basis;
        let c = if proj.norm() <= 1e-12 {
            DVector::from_element(basis.ncols(), 1.0)
        } else {
            let svd = proj.clone().svd(false, true);
            let v_t = svd.v_t.as_ref()?;
            let (k, smin) = svd
                .singular_values
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))?;
            if *smin > 1e-8 {
                return None;
            }
            v_t.row(k).transpose()
        };
        let mut g = basis * c;
        let big = g.amax();
        if big == 0.0 {
            return None;
        }
        let centre = g[d / 2];
        let sign = if centre != 0.0 {
            centre.signum()
        } else {
            g.iter().copied().find(|x| x.abs() > 1e-12 * big).map_or(1.0, f64::signum)
        };
        g *= sign / big;
        let asym = (0..d).map(|k| (g[k] - g[d - 1 - k]).abs()).fold(0.0, f64::max);
        (asym <= SYMMETRY_TOLERANCE).then_some(g)
    }
}

/// Errors unless `A_{−M}(γ, κ)` vanishes to [`OFF_CURVE_TOLERANCE`].
pub(crate) fn check_on_curve(m: usize, gamma: f64, kappa: f64) -> Result<()> {
    let a = rec3_coeffs(-(m as i64), gamma, kappa).a;
    if a.abs() > OFF_CURVE_TOLERANCE * a_scale(-(m as i64), gamma, kappa) {
        return Err(Error::OffCurve {
            m,
            gamma,
            kappa,
            residual: a,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct FrobeniusResult {
    pub lambda_max: f64,
    /// `g_{−M}..g_M`.
    pub eigenvector: Vec<f64>,
    /// Eigenvalues `μ = 2λ` of `T` as `(re, im)`.
    pub eigenvalues: Vec<(f64, f64)>,
    pub system: TridiagonalSystem,
}

/// Largest blow-up rate `λ = μ/2` over the symmetric eigenvectors of `T`.
pub fn frobenius_lambda(m: usize, gamma: f64, kappa: f64) -> Result<FrobeniusResult> {
    if !(gamma.is_finite() && kappa.is_finite()) || kappa <= 0.0 {
        return Err(Error::invalid("kappa", "must be positive and finite"));
    }
    check_on_curve(m, gamma, kappa)?;
    let system = TridiagonalSystem::new(m, gamma, kappa);
    let eigenvalues = system.eigenvalues();
    let scale = system.to_dense().norm().max(1.0);
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mu in eigenvalues.iter().rev() {
        if mu.im.abs() > 1e-9 * scale {
            continue;
        }
        if best.as_ref().is_some_and(|(b, _)| mu.re <= *b) {
            continue;
        }
        if let Some(g) = system.symmetric_vector(mu.re) {
            best = Some((mu.re, g));
        }
    }
    let (mu, g) = best.ok_or(Error::NoSymmetricMode)?;
    Ok(FrobeniusResult {
        lambda_max: mu / 2.0,
        eigenvector: g.iter().copied().collect(),
        eigenvalues: eigenvalues.iter().map(|z| (z.re, z.im)).collect(),
        system,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::truncation_curve;
    use crate::Version;

    #[test]
    fn three_by_three_reference() {
        let r = frobenius_lambda(1, 1.0, 2.0).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[4.0, -2.0, 0.0, -2.0, 6.0, -2.0, 0.0, -2.0, 4.0]);
        assert_eq!(r.system.to_dense(), want);
        let ev: Vec<f64> = r.eigenvalues.iter().map(|e| e.0).collect();
        for (a, b) in ev.iter().zip([2.0, 4.0, 8.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((r.lambda_max - 4.0).abs() < 1e-12);
        assert!((r.eigenvector[0] - r.eigenvector[2]).abs() < 1e-12);
    }

    #[test]
    fn scalar_case() {
        let r = frobenius_lambda(0, 1.0, 6.0).unwrap();
        assert!((r.lambda_max - 3.0).abs() < 1e-12);
        for k in 1..=20 {
            let g = 0.75 + 1.25 * k as f64 / 20.0;
            let p = truncation_curve(Version::Interior, 0, g).unwrap();
            let r = frobenius_lambda(0, g, p.kappa).unwrap();
            assert!((r.lambda_max - 3.0 * g * g / (2.0 * g - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn off_curve_rejected() {
        assert!(matches!(frobenius_lambda(1, 1.0, 3.0), Err(Error::OffCurve { .. })));
    }

    #[test]
    fn larger_systems_have_symmetric_modes() {
        for m in 2..6 {
            let p = truncation_curve(Version::Interior, m, 1.1).unwrap();
            let r = frobenius_lambda(m, 1.1, p.kappa).unwrap();
            let g = &r.eigenvector;
            for k in 0..g.len() {
                assert!((g[k] - g[g.len() - 1 - k]).abs() < 1e-8);
            }
        }
    }
}
