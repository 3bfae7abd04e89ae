//! Empirical certification: growth-rate fits over `n`, Kahane–Salem–Zygmund
//! Monte Carlo, and instance-wise checks of the coefficient inequality.
//!
//! Randomness is keyed per instance from `(seed, n, index)`, and parallel
//! loops collect in index order before reducing, so reports are bit-identical
//! across runs and thread counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::normest::{estimate_norm, exact_diagonal_norm, MethodChoice, NormMethod, NormPolicy};
use crate::rng::derive_seed;
use crate::tensors::{CoeffTensor, Family, DEFAULT_ENTRY_BUDGET};
use crate::theory::{self, ParamPoint, ScalarField};

/// `α(p) = max(0, 1/2 − 1/p)`.
pub fn alpha(p: ExtendedReal) -> f64 {
    (0.5 - p.recip()).max(0.0)
}

/// Ordinary least squares fit of `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidConfig("a line fit needs at least two points".into()));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("abscissae must not all coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(LineFit { slope, intercept, r_squared })
}

/// Log-log fit of `value` against `n`.
pub fn loglog_fit(points: &[FitPoint]) -> Result<LineFit> {
    if let Some(bad) = points.iter().find(|pt| !(pt.value > 0.0)) {
        return Err(Error::Domain(format!("non-positive value {} at n = {}", bad.value, bad.n)));
    }
    let xs: Vec<f64> = points.iter().map(|pt| (pt.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|pt| pt.value.ln()).collect();
    ols(&xs, &ys)
}

fn check_n_list(n_list: &[usize], min_len: usize) -> Result<()> {
    if n_list.len() < min_len {
        return Err(Error::InvalidConfig(format!("n list needs at least {min_len} entries")));
    }
    if n_list[0] < 1 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("n list must be positive and strictly increasing".into()));
    }
    Ok(())
}

fn instance_seed(seed: u64, n: usize, index: usize) -> u64 {
    derive_seed(derive_seed(seed, n as u64), index as u64)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthFamily {
    /// The diagonal form.
    Diagonal,
    /// Sign form of smallest norm among the samples.
    SignRandomMin,
    /// Median ratio over Gaussian samples.
    GaussianMedian,
}

impl std::str::FromStr for GrowthFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal" => Ok(GrowthFamily::Diagonal),
            "sign" | "sign_random_min" => Ok(GrowthFamily::SignRandomMin),
            "gaussian" | "gaussian_median" => Ok(GrowthFamily::GaussianMedian),
            other => Err(Error::Domain(format!("unknown growth family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    /// Exact oracles only; fails where none applies.
    ExactOracle,
    /// Alternating ascent for every instance.
    Ascent,
}

impl std::str::FromStr for NormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_oracle" => Ok(NormMode::ExactOracle),
            "ascent" => Ok(NormMode::Ascent),
            other => Err(Error::Domain(format!("unknown norm mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub n: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<FitPoint>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theoretical_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slope_gap: Option<f64>,
}

/// Parameters of a growth-rate fit of `‖coefficients‖_r / ‖T‖` against `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthSpec {
    pub family: GrowthFamily,
    pub m: u32,
    pub r: f64,
    pub p: ExtendedReal,
    pub n_list: Vec<usize>,
    pub mode: NormMode,
    pub field: ScalarField,
    /// Instances per `n` for the random families.
    pub samples: usize,
    pub policy: NormPolicy,
    pub seed: u64,
}

impl GrowthSpec {
    pub fn new(family: GrowthFamily, m: u32, r: f64, p: ExtendedReal, n_list: Vec<usize>, mode: NormMode) -> Self {
        GrowthSpec {
            family,
            m,
            r,
            p,
            n_list,
            mode,
            field: ScalarField::Real,
            samples: 8,
            policy: NormPolicy::default(),
            seed: 0,
        }
    }
}

fn norm_in_mode(t: &CoeffTensor, p: ExtendedReal, mode: NormMode, policy: &NormPolicy) -> Result<f64> {
    let choice = match mode {
        NormMode::Ascent => MethodChoice::Ascent,
        NormMode::ExactOracle => policy.oracle_for(t, p).ok_or_else(|| {
            Error::OracleUnavailable(format!(
                "no exact norm for m={}, n={}, p={p}, field={:?}",
                t.degree(),
                t.dim(),
                t.field()
            ))
        })?,
    };
    Ok(estimate_norm(t, p, choice, policy)?.value)
}

pub fn growth_fit(spec: &GrowthSpec) -> Result<FitResult> {
    let point = ParamPoint::new(spec.m, spec.r, spec.p)?;
    check_n_list(&spec.n_list, 4)?;
    if spec.samples < 1 {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }
    let m = spec.m as usize;
    let r = ExtendedReal::Finite(spec.r);

    let points = spec
        .n_list
        .iter()
        .map(|&n| -> Result<FitPoint> {
            let value = match spec.family {
                GrowthFamily::Diagonal => match spec.mode {
                    // Sparse path: n unit coefficients and the closed-form norm.
                    NormMode::ExactOracle => (n as f64).powf(1.0 / spec.r) / exact_diagonal_norm(m, n, spec.p),
                    NormMode::Ascent => {
                        let t = Family::Diagonal.build(m, n, spec.field, 0, DEFAULT_ENTRY_BUDGET)?;
                        t.coeff_lr_norm(r) / norm_in_mode(&t, spec.p, spec.mode, &spec.policy)?
                    }
                },
                GrowthFamily::SignRandomMin | GrowthFamily::GaussianMedian => {
                    let family = if spec.family == GrowthFamily::SignRandomMin { Family::Sign } else { Family::Gaussian };
                    let pairs = (0..spec.samples)
                        .into_par_iter()
                        .map(|i| -> Result<(f64, f64)> {
                            let t = family.build(m, n, spec.field, instance_seed(spec.seed, n, i), DEFAULT_ENTRY_BUDGET)?;
                            let mut policy = spec.policy;
                            policy.ascent.seed = instance_seed(spec.policy.ascent.seed, n, i);
                            Ok((t.coeff_lr_norm(r), norm_in_mode(&t, spec.p, spec.mode, &policy)?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if spec.family == GrowthFamily::SignRandomMin {
                        // All sign forms share the coefficient norm n^(m/r).
                        let (coeff, norm) = pairs
                            .into_iter()
                            .reduce(|a, b| if b.1 < a.1 { b } else { a })
                            .expect("samples >= 1");
                        coeff / norm
                    } else {
                        median(pairs.into_iter().map(|(c, nrm)| c / nrm).collect())
                    }
                }
            };
            Ok(FitPoint { n, value })
        })
        .collect::<Result<Vec<_>>>()?;

    let fit = loglog_fit(&points)?;
    let verdict = theory::classify(&point);
    let theoretical_exponent = verdict.optimal.then_some(verdict.exponent_upper);
    Ok(FitResult {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        points,
        theoretical_exponent,
        slope_gap: theoretical_exponent.map(|s| fit.slope - s),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KszPoint {
    pub n: usize,
    /// Smallest computed norm over the samples.
    pub min_norm: f64,
    pub max_norm: f64,
    /// Whether every norm at this `n` came from an exact oracle.
    pub exact: bool,
    /// `n^((m+1)/2) / η_(K,m)`, the floor forced by Bohnenblust–Hille (only at `p = ∞`).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bh_floor: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KszReport {
    pub m: u32,
    pub p: ExtendedReal,
    pub field: ScalarField,
    pub samples: usize,
    pub points: Vec<KszPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `1/2 + m·α(p)`.
    pub theoretical_exponent: f64,
    /// `max_n min_norm(n) / n^(1/2 + m·α(p))`, an empirical stand-in for `C_m`.
    pub c_m_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KszSpec {
    pub m: u32,
    pub p: ExtendedReal,
    pub n_list: Vec<usize>,
    pub samples: usize,
    pub field: ScalarField,
    pub policy: NormPolicy,
    pub seed: u64,
}

/// Minimum norm of random sign forms per `n`, with a log-log slope.
pub fn ksz_min_norm(spec: &KszSpec) -> Result<KszReport> {
    if spec.m < 2 {
        return Err(Error::Domain("degree must be at least 2".into()));
    }
    spec.p.require_lebesgue("p")?;
    check_n_list(&spec.n_list, 2)?;
    if spec.samples < 1 {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }
    let m = spec.m as usize;
    let theoretical_exponent = 0.5 + spec.m as f64 * alpha(spec.p);
    let eta = theory::eta(spec.m, spec.field);

    let mut points = Vec::with_capacity(spec.n_list.len());
    for &n in &spec.n_list {
        let norms = (0..spec.samples)
            .into_par_iter()
            .map(|i| -> Result<(f64, bool)> {
                let t = Family::Sign.build(m, n, spec.field, instance_seed(spec.seed, n, i), DEFAULT_ENTRY_BUDGET)?;
                let mut policy = spec.policy;
                policy.ascent.seed = instance_seed(spec.policy.ascent.seed, n, i);
                let est = estimate_norm(&t, spec.p, MethodChoice::Auto, &policy)?;
                Ok((est.value, est.is_exact))
            })
            .collect::<Result<Vec<_>>>()?;
        let min_norm = norms.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
        let max_norm = norms.iter().map(|x| x.0).fold(0.0, f64::max);
        let bh_floor = spec
            .p
            .is_infinite()
            .then(|| (n as f64).powf((spec.m as f64 + 1.0) / 2.0) / eta);
        points.push(KszPoint { n, min_norm, max_norm, exact: norms.iter().all(|x| x.1), bh_floor });
    }

    let fit_points: Vec<FitPoint> = points.iter().map(|pt| FitPoint { n: pt.n, value: pt.min_norm }).collect();
    let fit = loglog_fit(&fit_points)?;
    let c_m_estimate = points
        .iter()
        .map(|pt| pt.min_norm / (pt.n as f64).powf(theoretical_exponent))
        .fold(0.0, f64::max);
    Ok(KszReport {
        m: spec.m,
        p: spec.p,
        field: spec.field,
        samples: spec.samples,
        points,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        theoretical_exponent,
        c_m_estimate,
    })
}

/// Where certification instances come from.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    /// Instance `i` is drawn from `family` with `n = n_values[i mod len]`.
    Family { family: Family, n_values: Vec<usize>, instances: usize },
    Tensors(Vec<CoeffTensor>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifySpec {
    pub point: ParamPoint,
    pub field: ScalarField,
    pub source: InstanceSource,
    /// Overrides the constant from the ledger.
    pub constant: Option<f64>,
    /// Relative slack: a violation needs `margin < −slack·max(rhs, 1)`.
    pub slack: f64,
    /// `ε` for the windowed region whose exponent depends on it.
    pub epsilon: f64,
    pub policy: NormPolicy,
    pub seed: u64,
}

pub const DEFAULT_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertInstance {
    pub index: usize,
    pub n: usize,
    pub coeff_norm: f64,
    pub operator_norm: f64,
    pub method: NormMethod,
    pub rhs: f64,
    /// `rhs − coeff_norm`.
    pub margin: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub point: ParamPoint,
    pub field: ScalarField,
    pub constant: f64,
    pub exponent: f64,
    pub slack: f64,
    pub instances: Vec<CertInstance>,
    pub min_margin: f64,
    pub violations: usize,
    /// Violations whose norm came from ascent (a lower bound), so possibly
    /// an artifact of the optimizer rather than of the inequality.
    pub inexact_violations: usize,
}

/// Checks `‖coefficients‖_r ≤ C · n^s · ‖T‖` instance by instance.
pub fn certify(spec: &CertifySpec) -> Result<CertReport> {
    if !(spec.slack >= 0.0) {
        return Err(Error::InvalidConfig("slack must be non-negative".into()));
    }
    let verdict = theory::classify_with(&spec.point, spec.field, spec.epsilon);
    let constant = spec.constant.or(verdict.constant_upper).ok_or(Error::MissingConstant)?;
    let exponent = verdict.exponent_upper;
    let m = spec.point.m() as usize;
    let r = ExtendedReal::Finite(spec.point.r());
    let p = spec.point.p();

    let count = match &spec.source {
        InstanceSource::Family { n_values, instances, .. } => {
            if n_values.is_empty() || n_values.contains(&0) {
                return Err(Error::InvalidConfig("instance sizes must be positive".into()));
            }
            *instances
        }
        InstanceSource::Tensors(ts) => {
            if let Some(t) = ts.iter().find(|t| t.degree() != m) {
                return Err(Error::DimensionMismatch { expected: m, got: t.degree() });
            }
            ts.len()
        }
    };
    if count < 1 {
        return Err(Error::InvalidConfig("at least one instance is required".into()));
    }

    let instances = (0..count)
        .into_par_iter()
        .map(|i| -> Result<CertInstance> {
            let owned;
            let t = match &spec.source {
                InstanceSource::Family { family, n_values, .. } => {
                    let n = n_values[i % n_values.len()];
                    owned = family.build(m, n, spec.field, instance_seed(spec.seed, n, i), DEFAULT_ENTRY_BUDGET)?;
                    &owned
                }
                InstanceSource::Tensors(ts) => &ts[i],
            };
            let mut policy = spec.policy;
            policy.ascent.seed = instance_seed(spec.policy.ascent.seed, t.dim(), i);
            let est = estimate_norm(t, p, MethodChoice::Auto, &policy)?;
            let coeff_norm = t.coeff_lr_norm(r);
            let rhs = constant * (t.dim() as f64).powf(exponent) * est.value;
            let margin = rhs - coeff_norm;
            Ok(CertInstance {
                index: i,
                n: t.dim(),
                coeff_norm,
                operator_norm: est.value,
                method: est.method,
                rhs,
                margin,
                violated: margin < -spec.slack * rhs.max(1.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let min_margin = instances.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
    let violations = instances.iter().filter(|c| c.violated).count();
    let inexact_violations = instances
        .iter()
        .filter(|c| c.violated && c.method == NormMethod::Alternating)
        .count();
    Ok(CertReport {
        point: spec.point,
        field: spec.field,
        constant,
        exponent,
        slack: spec.slack,
        instances,
        min_margin,
        violations,
        inexact_violations,
    })
}
