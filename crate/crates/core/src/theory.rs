//! Closed-form layer of the exponent phase diagram.
//!
//! For an m-linear form `T` on `ℓ_p^n` the coefficient inequality reads
//!
//! ```text
//! (Σ |T(e_j1, …, e_jm)|^r)^(1/r) ≤ D · n^s · ‖T‖
//! ```
//!
//! and this module answers, for a point `(m, r, p)`, which region of the
//! `(r, p)` plane it lives in, the exponent `s` (optimal or a window), and
//! the best available upper bound for `D`. All formulas are written in
//! terms of `1/p` so that `p = ∞` is evaluated as an exact limit.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default `ε` used when evaluating the ε-dependent exponent of region [`Region::PropB`].
pub const DEFAULT_EPSILON: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

impl std::str::FromStr for ScalarField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(ScalarField::Real),
            "complex" | "c" => Ok(ScalarField::Complex),
            other => Err(Error::Domain(format!("unknown scalar field {other:?}"))),
        }
    }
}

/// A query `(m, r, p)` in the phase diagram.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    m: u32,
    r: f64,
    p: ExtendedReal,
}

impl ParamPoint {
    pub fn new(m: u32, r: f64, p: ExtendedReal) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("degree m = {m} must be at least 2")));
        }
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::Domain(format!("r = {r} must be a finite real >= 1")));
        }
        p.require_lebesgue("p")?;
        Ok(ParamPoint { m, r, p })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn p(&self) -> ExtendedReal {
        self.p
    }
}

/// The five regions partitioning `[1, ∞) × [1, ∞]` for fixed `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `r ∈ [1, 2]`, `p ∈ [2, 2m)`.
    #[serde(rename = "ThmA-low")]
    ThmALow,
    /// `r ∈ [1, ∞)`, `p ∈ [2m, ∞]`.
    #[serde(rename = "ThmA-high")]
    ThmAHigh,
    /// `r ∈ [2, ∞)`, `p ∈ (m, 2m]`.
    #[serde(rename = "ThmB")]
    ThmB,
    /// `r ∈ [1, 2]`, `p ∈ [1, 2)`: exponent known only up to a window.
    #[serde(rename = "PropA")]
    PropA,
    /// `r ∈ (2, ∞)`, `p ∈ [1, m]`: exponent known only up to a window.
    #[serde(rename = "PropB")]
    PropB,
}

impl Region {
    pub fn is_optimal(self) -> bool {
        matches!(self, Region::ThmALow | Region::ThmAHigh | Region::ThmB)
    }

    pub fn label(self) -> &'static str {
        match self {
            Region::ThmALow => "ThmA-low",
            Region::ThmAHigh => "ThmA-high",
            Region::ThmB => "ThmB",
            Region::PropA => "PropA",
            Region::PropB => "PropB",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub region: Region,
    /// Exponent `s` of `n` in the upper bound.
    pub exponent_upper: f64,
    pub optimal: bool,
    /// Best known lower bound on the optimal exponent, for the non-optimal regions.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exponent_lower: Option<f64>,
    /// Whether `exponent_upper` carries an additive `ε/(pr)` term.
    pub epsilon_in_exponent: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub constant_upper: Option<f64>,
}

/// Conjugate exponent `p*` with `1/p + 1/p* = 1`.
pub fn conjugate(p: ExtendedReal) -> Result<ExtendedReal> {
    p.require_lebesgue("p")?;
    Ok(match p {
        ExtendedReal::Infinity => ExtendedReal::ONE,
        ExtendedReal::Finite(1.0) => ExtendedReal::Infinity,
        ExtendedReal::Finite(v) => ExtendedReal::Finite(v / (v - 1.0)),
    })
}

// (2mr + 2mp − mpr − pr) / (2pr), rewritten with 1/p.
fn raw_exponent_a(m: f64, r: f64, inv_p: f64) -> f64 {
    (2.0 * m - r * (m + 1.0)) / (2.0 * r) + m * inv_p
}

/// `max{(2mr + 2mp − mpr − pr)/(2pr), 0}`.
pub fn exponent_thm_a(m: u32, r: f64, p: ExtendedReal) -> f64 {
    raw_exponent_a(m as f64, r, p.recip()).max(0.0)
}

/// `max{(p + mr − rp)/(pr), 0}`.
pub fn exponent_thm_b(m: u32, r: f64, p: ExtendedReal) -> f64 {
    let m = m as f64;
    (1.0 / r + m * p.recip() - 1.0).max(0.0)
}

fn region_of(pt: &ParamPoint) -> Region {
    let m = pt.m as f64;
    let p = pt.p.as_f64();
    let r = pt.r;
    if r <= 2.0 {
        if p < 2.0 {
            Region::PropA
        } else if p < 2.0 * m {
            Region::ThmALow
        } else {
            Region::ThmAHigh
        }
    } else if p >= 2.0 * m {
        Region::ThmAHigh
    } else if p > m {
        Region::ThmB
    } else {
        Region::PropB
    }
}

/// Classifies with the real field and the default `ε`.
pub fn classify(pt: &ParamPoint) -> RegionVerdict {
    classify_with(pt, ScalarField::Real, DEFAULT_EPSILON)
}

/// Classifies `pt`; `field` selects the constant ledger and `epsilon` is the
/// value substituted for `ε` in the [`Region::PropB`] exponent when `p > 2`.
pub fn classify_with(pt: &ParamPoint, field: ScalarField, epsilon: f64) -> RegionVerdict {
    let region = region_of(pt);
    let (m, r) = (pt.m as f64, pt.r);
    let inv_p = pt.p.recip();
    let p = pt.p.as_f64();

    let (exponent_upper, exponent_lower, epsilon_in_exponent) = match region {
        Region::ThmALow | Region::ThmAHigh => (exponent_thm_a(pt.m, r, pt.p), None, false),
        Region::ThmB => (exponent_thm_b(pt.m, r, pt.p), None, false),
        Region::PropA => (raw_exponent_a(m, r, inv_p), Some((2.0 * m - r) / (2.0 * r)), false),
        Region::PropB => {
            let with_eps = p > 2.0;
            let eps = if with_eps { epsilon } else { 0.0 };
            // (2m − p + ε) / (pr)
            let upper = (2.0 * m * inv_p - 1.0 + eps * inv_p) / r;
            let lower = if p < 2.0 {
                (2.0 * m - r) / (2.0 * r)
            } else {
                raw_exponent_a(m, r, inv_p)
            };
            (upper, Some(lower), with_eps)
        }
    };

    RegionVerdict {
        region,
        exponent_upper,
        optimal: region.is_optimal(),
        exponent_lower,
        epsilon_in_exponent,
        constant_upper: constant_for(pt, region, field),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalExponents {
    /// Bohnenblust–Hille `2m/(m+1)`.
    pub bh: f64,
    /// Hardy–Littlewood/Praciano-Pereira `2mp/(mp+p−2m)`, for `p ≥ 2m`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hl_pp: Option<f64>,
    /// Hardy–Littlewood/Dimant–Sevilla-Peris `p/(p−m)`, for `m < p < 2m`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hl_dsp: Option<f64>,
}

pub fn classical_exponents(m: u32, p: ExtendedReal) -> ClassicalExponents {
    let mf = m as f64;
    let inv_p = p.recip();
    let pv = p.as_f64();
    let hl_pp = (pv >= 2.0 * mf).then(|| 2.0 * mf / (mf + 1.0 - 2.0 * mf * inv_p));
    let hl_dsp = (pv > mf && pv < 2.0 * mf).then(|| 1.0 / (1.0 - mf * inv_p));
    ClassicalExponents {
        bh: 2.0 * mf / (mf + 1.0),
        hl_pp,
        hl_dsp,
    }
}

/// `sup_{φ ∈ B_(ℓ_p^n)*} (Σ_j |φ(e_j)|^q)^(1/q)`, i.e. `n^(1/q − 1/p*)` when
/// `q ≤ p*` and `1` otherwise.
pub fn weak_basis_lq(n: u64, p: ExtendedReal, q: f64) -> f64 {
    let inv_p_star = 1.0 - p.recip();
    let expo = 1.0 / q - inv_p_star;
    if expo <= 0.0 {
        1.0
    } else {
        (n as f64).powf(expo)
    }
}

/// Best known upper estimate `η_(K,m)` for the Bohnenblust–Hille constant.
///
/// The products are accumulated as sums of logarithms.
pub fn eta(m: u32, field: ScalarField) -> f64 {
    let log_eta: f64 = match field {
        ScalarField::Complex => (2..=m)
            .map(|j| {
                let j = j as f64;
                j / (2.0 - 2.0 * j) * ln_gamma(2.0 - 1.0 / j)
            })
            .sum(),
        ScalarField::Real if m <= 13 => {
            let power: f64 = (2..=m).map(|j| 1.0 / (2.0 * j as f64 - 2.0)).sum();
            return 2f64.powf(power);
        }
        ScalarField::Real => {
            let ln2 = std::f64::consts::LN_2;
            let half_ln_pi = 0.5 * std::f64::consts::PI.ln();
            let head = ln2 * (446_381.0 / 55_440.0 - m as f64 / 2.0);
            let tail: f64 = (14..=m)
                .map(|j| {
                    let j = j as f64;
                    j / (2.0 - 2.0 * j) * (ln_gamma(1.5 - 1.0 / j) - half_ln_pi)
                })
                .sum();
            head + tail
        }
    };
    log_eta.exp()
}

/// `σ_R = √2`, `σ_C = 2/√π`.
pub fn sigma(field: ScalarField) -> f64 {
    match field {
        ScalarField::Real => std::f64::consts::SQRT_2,
        ScalarField::Complex => 2.0 / std::f64::consts::PI.sqrt(),
    }
}

/// Lower bound `2^(1 − 1/m)` for the real Bohnenblust–Hille constant.
pub fn bh_lower_real(m: u32) -> f64 {
    2f64.powf(1.0 - 1.0 / m as f64)
}

/// Upper bound for the optimal constant `D^K_(m,r,p)`, absent in the
/// windowed regions where no explicit constant is available.
pub fn constants_table(pt: &ParamPoint, field: ScalarField) -> Option<f64> {
    constant_for(pt, region_of(pt), field)
}

fn constant_for(pt: &ParamPoint, region: Region, field: ScalarField) -> Option<f64> {
    let m = pt.m as f64;
    let r = pt.r;
    let inv_p = pt.p.recip();
    let eta = eta(pt.m, field);
    let sigma = sigma(field);
    match region {
        Region::ThmALow => {
            if r <= 2.0 * m / (m + 1.0) {
                Some(eta)
            } else {
                let s_exp = (m - 1.0) * (m * r + r - 2.0 * m) / r;
                let e_exp = (2.0 * m - r * m) / r;
                Some(sigma.powf(s_exp) * eta.powf(e_exp))
            }
        }
        Region::ThmAHigh => {
            let threshold = 2.0 * m * m * m - 4.0 * m * m + 2.0 * m;
            if pt.p.as_f64() > threshold {
                Some(eta)
            } else {
                let s_exp = 2.0 * m * (m - 1.0) * inv_p;
                let e_exp = 1.0 - 2.0 * m * inv_p;
                Some(sigma.powf(s_exp) * eta.powf(e_exp))
            }
        }
        Region::ThmB => Some(std::f64::consts::SQRT_2.powf(m - 1.0)),
        Region::PropA | Region::PropB => None,
    }
}
