use super::eta::EtaProfile;
use super::scalar::{Scalar, ScalarKind};
use crate::{Error, Result, Version};
use serde::Serialize;
use std::io::Write;

/// Grids above this size accumulate float relations in doubled precision.
pub const COMPENSATED_ABOVE: usize = 256;

/// Lowest index of the coefficient grid.
pub fn lowest_index(version: Version) -> i64 {
    match version {
        Version::Interior => 1,
        Version::Exterior => -1,
    }
}

/// Coefficients `C^{lm}_{ij}` of the nine-term relation, `[l][m]`
/// multiplying `ρ_{i−l, j−m}`. `eta(k)` must return `η_k` for any `k`.
pub fn coefficients<S: Scalar>(
    version: Version,
    i: i64,
    j: i64,
    q: &S,
    eta: &impl Fn(i64) -> S,
) -> [[S; 3]; 3] {
    // a·η + b + c·q
    let lin = |a: i64, e: &S, b: i64, c: i64| -> S {
        S::from_int(a)
            .mul_ref(e)
            .add_ref(&S::from_int(b))
            .add_ref(&S::from_int(c).mul_ref(q))
    };
    let d = i - j;
    let e0 = eta(d);
    let ep1 = eta(d + 1);
    let ep2 = eta(d + 2);
    let em1 = eta(-d + 1);
    let em2 = eta(-d + 2);
    match version {
        Version::Interior => [
            [
                lin(-1, &e0, -i - j + 2, 0),
                lin(2, &ep1, 2 * (i - 1), -2),
                lin(-1, &ep2, j - i - 2, 1),
            ],
            [
                lin(2, &em1, 2 * (j - 1), -2),
                lin(-4, &e0, 0, 8),
                lin(2, &ep1, 2 * (3 - j), -4),
            ],
            [
                lin(-1, &em2, i - j - 2, 1),
                lin(2, &em1, 2 * (3 - i), -4),
                lin(-1, &e0, i + j - 6, 2),
            ],
        ],
        Version::Exterior => [
            [
                lin(-1, &e0, -i - j - 2, 0),
                lin(2, &ep1, 2 * (i + 1), 0),
                lin(-1, &ep2, j - i - 2, -1),
            ],
            [
                lin(2, &em1, 2 * (j + 1), 0),
                lin(-4, &e0, 0, 0),
                lin(2, &ep1, 2 * (1 - j), 2),
            ],
            [
                lin(-1, &em2, i - j - 2, -1),
                lin(2, &em1, 2 * (1 - i), 2),
                lin(-1, &e0, i + j - 2, -2),
            ],
        ],
    }
}

/// Coefficients `ρ_ij` of `⟨|F′|^q⟩`, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentGrid<S> {
    version: Version,
    q: S,
    size: usize,
    eta: EtaProfile,
    eta_table: Vec<S>,
    entries: Vec<S>,
    zero: S,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridMetadata {
    pub version: Version,
    pub q: String,
    pub eta: String,
    pub n: usize,
    pub scalar_kind: ScalarKind,
}

impl<S: Scalar> MomentGrid<S> {
    pub fn version(&self) -> Version {
        self.version
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    /// Largest index `N`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn eta(&self) -> &EtaProfile {
        &self.eta
    }

    pub fn lowest(&self) -> i64 {
        lowest_index(self.version)
    }

    /// Number of indices per axis.
    pub fn dim(&self) -> usize {
        (self.size as i64 - self.lowest() + 1) as usize
    }

    fn offset(&self, i: i64, j: i64) -> Option<usize> {
        let lo = self.lowest();
        let hi = self.size as i64;
        if i < lo || j < lo || i > hi || j > hi {
            return None;
        }
        Some((i - lo) as usize * self.dim() + (j - lo) as usize)
    }

    /// `ρ_ij`, zero outside the stored range.
    pub fn get(&self, i: i64, j: i64) -> &S {
        self.offset(i, j).map_or(&self.zero, |k| &self.entries[k])
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.lowest()..=self.size as i64
    }

    pub fn diagonal(&self) -> Vec<S> {
        self.indices().map(|i| self.get(i, i).clone()).collect()
    }

    fn eta_at(&self, m: i64) -> S {
        self.eta_table[m.unsigned_abs() as usize].clone()
    }

    /// Signed value of relation `(i, j)` and the sum of its term magnitudes.
    pub fn relation(&self, i: i64, j: i64) -> (S, f64) {
        let c = coefficients(self.version, i, j, &self.q, &|m| self.eta_at(m));
        let mut sum = S::zero();
        let mut scale = 0.0;
        for (l, row) in c.iter().enumerate() {
            for (m, coef) in row.iter().enumerate() {
                let t = coef.mul_ref(self.get(i - l as i64, j - m as i64));
                scale += t.to_f64().abs();
                sum = sum.add_ref(&t);
            }
        }
        (sum, scale)
    }

    /// Largest relative re-substitution residual over all non-boundary cells.
    pub fn max_residual(&self) -> f64 {
        let lo = self.lowest();
        let mut worst = 0.0f64;
        for i in self.indices() {
            for j in self.indices() {
                if (i, j) == (lo, lo) {
                    continue;
                }
                let (r, scale) = self.relation(i, j);
                if r.is_zero() {
                    continue;
                }
                let rel = r.to_f64().abs() / scale.max(f64::MIN_POSITIVE);
                worst = worst.max(rel);
            }
        }
        worst
    }

    pub fn metadata(&self) -> GridMetadata {
        GridMetadata {
            version: self.version,
            q: self.q.to_text(),
            eta: self.eta.to_string(),
            n: self.size,
            scalar_kind: S::KIND,
        }
    }

    /// Writes `i,j,value` rows in fill order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,j,value")?;
        for i in self.indices() {
            for j in self.indices() {
                writeln!(out, "{i},{j},{}", self.get(i, j).to_text())?;
            }
        }
        Ok(())
    }

    /// `max(|ρ_ij|, |ρ_ii|, |ρ_jj|)`, the magnitude against which float
    /// entries are compared.
    pub fn local_scale(&self, i: i64, j: i64) -> f64 {
        [self.get(i, j), self.get(i, i), self.get(j, j)]
            .iter()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> MomentGrid<f64> {
        MomentGrid {
            version: self.version,
            q: self.q.to_f64(),
            size: self.size,
            eta: self.eta.clone(),
            eta_table: self.eta_table.iter().map(Scalar::to_f64).collect(),
            entries: self.entries.iter().map(Scalar::to_f64).collect(),
            zero: 0.0,
        }
    }
}

/// Fills the grid row by row, solving each relation for its `(0,0)` term.
pub fn build_grid<S: Scalar>(
    version: Version,
    eta: &EtaProfile,
    q: S,
    size: usize,
) -> Result<MomentGrid<S>> {
    if size < 1 {
        return Err(Error::invalid("n", "grid size must be at least 1"));
    }
    eta.validate()?;
    let lo = lowest_index(version);
    let dim = (size as i64 - lo + 1) as usize;
    let eta_table: Vec<S> = (0..=dim as i64 + 2)
        .map(|m| S::from_rational(&eta.eval_exact(m)))
        .collect();
    if eta_table.iter().any(Scalar::is_negative) {
        return Err(Error::invalid("eta", "exponents must be non-negative"));
    }
    let mut grid = MomentGrid {
        version,
        q,
        size,
        eta: eta.clone(),
        eta_table,
        entries: vec![S::zero(); dim * dim],
        zero: S::zero(),
    };
    grid.entries[0] = S::one();
    let compensated = S::KIND == ScalarKind::Float && size > COMPENSATED_ABOVE;

    for i in grid.indices() {
        for j in grid.indices() {
            if (i, j) == (lo, lo) {
                continue;
            }
            let c = coefficients(version, i, j, &grid.q, &|m| grid.eta_at(m));
            let pivot = &c[0][0];
            if pivot.is_zero() {
                return Err(Error::ZeroPivot { i, j });
            }
            debug_assert!(pivot.is_negative(), "pivot at ({i},{j}) is positive");
            let mut pairs: Vec<(&S, &S)> = Vec::with_capacity(8);
            for (l, row) in c.iter().enumerate() {
                for (m, coef) in row.iter().enumerate() {
                    if l + m == 0 {
                        continue;
                    }
                    let rho = grid.get(i - l as i64, j - m as i64);
                    if !rho.is_zero() && !coef.is_zero() {
                        pairs.push((coef, rho));
                    }
                }
            }
            if pairs.is_empty() {
                continue;
            }
            let value = -S::dot(&pairs, compensated).div_ref(pivot);
            let k = grid.offset(i, j).expect("in range");
            grid.entries[k] = value;
        }
    }
    Ok(grid)
}
