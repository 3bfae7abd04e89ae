//! Operator norms `‖T‖ = sup |T(x^(1), …, x^(m))|` over unit `ℓ_p` balls.
//!
//! The general method is alternating dual-norm ascent: each slot in turn is
//! replaced by the exact maximizer of the linear functional obtained by
//! fixing the other slots. Every reported value is `|T(witness)|` for a
//! feasible witness, hence a certified lower bound on `‖T‖`. Exact oracles
//! cover the real `ℓ_∞` case (vertex enumeration), bilinear forms on `ℓ_2`
//! (top singular value) and the diagonal form.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::rng;
use crate::tensors::{lr_norm, CoeffTensor, Vector};
use crate::theory::ScalarField;

/// Largest `n·(m−1)` accepted by [`vertex_exact`].
pub const VERTEX_MAX_BITS: u32 = 24;

const POWER_ITER_CAP: usize = 100_000;
const POWER_ITER_TOL: f64 = 1e-14;
// Slack on the per-slot monotonicity check (float noise only).
const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Alternating,
    VertexExact,
    DiagonalExact,
    BilinearL2Oracle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub method: NormMethod,
    pub is_exact: bool,
    pub restarts_used: usize,
    pub sweeps: usize,
    pub converged: bool,
    pub witness: Vec<Vector>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Relative objective improvement between sweeps below which a restart stops.
    pub tol: f64,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig { restarts: 32, max_sweeps: 500, tol: 1e-12, seed: 0 }
    }
}

impl AscentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        Ok(())
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `conj(z)/|z|`, with `1` at zero.
fn align(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z.conj() / r
    }
}

fn basis(n: usize, j: usize) -> Vector {
    let mut e = vec![zero(); n];
    e[j] = Complex64::new(1.0, 0.0);
    e
}

/// Maximizer of `Re Σ_j c_j x_j` over the unit `ℓ_p` ball.
///
/// Returns the witness and the value `‖c‖_(p*)`. A zero `c` yields `(e_1, 0)`.
/// At `p = 1` ties go to the lowest index.
pub fn dual_maximizer(c: &[Complex64], p: ExtendedReal) -> (Vector, f64) {
    let n = c.len();
    let mags = c.iter().map(|z| z.norm());
    let max = mags.clone().fold(0.0f64, f64::max);
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    if max == 0.0 {
        return (basis(n, 0), 0.0);
    }
    match p {
        ExtendedReal::Infinity => {
            let x = c.iter().map(|&z| align(z)).collect();
            (x, mags.sum())
        }
        ExtendedReal::Finite(1.0) => {
            let j = c.iter().position(|z| z.norm() == max).unwrap_or(0);
            let mut x = vec![zero(); n];
            x[j] = align(c[j]);
            (x, max)
        }
        ExtendedReal::Finite(pv) => {
            let q = pv / (pv - 1.0);
            let value = lr_norm(mags, ExtendedReal::Finite(q));
            let x = c
                .iter()
                .map(|&z| align(z) * (z.norm() / value).powf(q - 1.0))
                .collect();
            (x, value)
        }
    }
}

fn unit_lp(v: Vector, p: ExtendedReal) -> Vector {
    let norm = lr_norm(v.iter().map(|z| z.norm()), p);
    if norm == 0.0 {
        return basis(v.len(), 0);
    }
    v.into_iter().map(|z| z / norm).collect()
}

fn random_unit(g: &mut impl rand::RngCore, n: usize, p: ExtendedReal, field: ScalarField) -> Vector {
    let v: Vector = match field {
        ScalarField::Real => {
            let mut re = vec![0.0; n];
            rng::fill_normal(g, &mut re);
            re.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
        }
        ScalarField::Complex => (0..n).map(|_| rng::complex_normal(g)).collect(),
    };
    unit_lp(v, p)
}

struct RestartOutcome {
    value: f64,
    sweeps: usize,
    converged: bool,
    witness: Vec<Vector>,
}

fn others_of(xs: &[Vector], slot: usize) -> Vec<&[Complex64]> {
    xs.iter()
        .enumerate()
        .filter(|(k, _)| *k != slot)
        .map(|(_, v)| v.as_slice())
        .collect()
}

fn objective(t: &CoeffTensor, xs: &[Vector]) -> f64 {
    let last = t.degree() - 1;
    let c = t.contract_except(last, &others_of(xs, last));
    c.iter().zip(&xs[last]).map(|(a, b)| a * b).sum::<Complex64>().norm()
}

fn run_restart(t: &CoeffTensor, p: ExtendedReal, cfg: &AscentConfig, index: usize) -> RestartOutcome {
    let (m, n) = (t.degree(), t.dim());
    let mut g = rng::stream_rng(cfg.seed, index as u64 + 1);
    let mut xs: Vec<Vector> = if index == 0 {
        let ones = vec![Complex64::new(1.0, 0.0); n];
        vec![unit_lp(ones, p); m]
    } else {
        (0..m).map(|_| random_unit(&mut g, n, p, t.field())).collect()
    };

    let mut obj = objective(t, &xs);
    let mut sweeps = 0;
    let mut converged = false;
    let mut rerandomized = false;
    while sweeps < cfg.max_sweeps {
        let before = obj;
        for slot in 0..m {
            let c = t.contract_except(slot, &others_of(&xs, slot));
            if c.iter().all(|z| *z == zero()) {
                continue;
            }
            let (x, value) = dual_maximizer(&c, p);
            assert!(
                value >= obj * (1.0 - MONOTONE_SLACK),
                "ascent objective decreased: {obj} -> {value}"
            );
            xs[slot] = x;
            obj = value;
        }
        sweeps += 1;
        if sweeps == 1 && obj == 0.0 && !rerandomized {
            rerandomized = true;
            xs = (0..m).map(|_| random_unit(&mut g, n, p, t.field())).collect();
            obj = objective(t, &xs);
            sweeps = 0;
            continue;
        }
        if obj == 0.0 || obj - before <= cfg.tol * obj {
            converged = true;
            break;
        }
    }

    RestartOutcome { value: objective(t, &xs), sweeps, converged, witness: xs }
}

/// Alternating dual-norm ascent with `cfg.restarts` independent restarts.
///
/// Restart 0 starts from the normalized all-ones vector in every slot; the
/// others draw Gaussian starts from the stream `(cfg.seed, k + 1)`. The best
/// restart wins, ties to the lowest index, so the result does not depend on
/// how restarts are scheduled across threads.
pub fn alternating_ascent(t: &CoeffTensor, p: ExtendedReal, cfg: &AscentConfig) -> Result<NormEstimate> {
    p.require_lebesgue("p")?;
    cfg.validate()?;
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| run_restart(t, p, cfg, k))
        .collect();
    let best = outcomes
        .into_iter()
        .reduce(|best, o| if o.value > best.value { o } else { best })
        .expect("at least one restart");
    Ok(NormEstimate {
        value: best.value,
        method: NormMethod::Alternating,
        is_exact: false,
        restarts_used: cfg.restarts,
        sweeps: best.sweeps,
        converged: best.converged,
        witness: best.witness,
    })
}

/// `‖R‖ = n^max(0, 1 − m/p)` for the diagonal form `R`.
pub fn exact_diagonal_norm(m: usize, n: usize, p: ExtendedReal) -> f64 {
    let expo = (1.0 - m as f64 * p.recip()).max(0.0);
    (n as f64).powf(expo)
}

/// Exact norm of the diagonal form with its extremal witness: the flat vector
/// `n^(−1/p)(1, …, 1)` when `p ≥ m`, `e_1` otherwise.
pub fn diagonal_exact(m: usize, n: usize, p: ExtendedReal) -> Result<NormEstimate> {
    p.require_lebesgue("p")?;
    if m < 2 || n < 1 {
        return Err(Error::Domain(format!("diagonal form needs m >= 2 and n >= 1, got m={m}, n={n}")));
    }
    let x = if p.as_f64() >= m as f64 {
        vec![Complex64::new((n as f64).powf(-p.recip()), 0.0); n]
    } else {
        basis(n, 0)
    };
    Ok(NormEstimate {
        value: exact_diagonal_norm(m, n, p),
        method: NormMethod::DiagonalExact,
        is_exact: true,
        restarts_used: 0,
        sweeps: 0,
        converged: true,
        witness: vec![x; m],
    })
}

/// Exact `ℓ_∞` norm of a real form by enumerating the sign vertices of
/// slots `1..m−1` and solving the last slot in closed form.
pub fn vertex_exact(t: &CoeffTensor) -> Result<NormEstimate> {
    vertex_exact_with_budget(t, VERTEX_MAX_BITS)
}

pub fn vertex_exact_with_budget(t: &CoeffTensor, max_bits: u32) -> Result<NormEstimate> {
    if t.field() != ScalarField::Real {
        return Err(Error::OracleUnavailable("vertex enumeration needs a real tensor".into()));
    }
    let (m, n) = (t.degree(), t.dim());
    let bits = n * (m - 1);
    if bits > max_bits as usize {
        return Err(Error::OracleUnavailable(format!(
            "vertex enumeration over {bits} signs exceeds the budget of {max_bits}"
        )));
    }

    // x ↦ −x in slot 1 leaves |T| unchanged, so its first sign is pinned to +1.
    let free = bits - 1;
    let signs_of = |pattern: u64| -> Vec<Vector> {
        (0..m - 1)
            .map(|slot| {
                (0..n)
                    .map(|j| {
                        let bit = slot * n + j;
                        let s = if bit == 0 || (pattern >> (bit - 1)) & 1 == 0 { 1.0 } else { -1.0 };
                        Complex64::new(s, 0.0)
                    })
                    .collect()
            })
            .collect()
    };

    let best_pattern = if m == 2 {
        best_vertex_bilinear(t)
    } else {
        (0..1u64 << free)
            .into_par_iter()
            .map(|pattern| {
                let xs = signs_of(pattern);
                let refs: Vec<&[Complex64]> = xs.iter().map(Vec::as_slice).collect();
                let c = t.contract_except(m - 1, &refs);
                (c.iter().map(|z| z.re.abs()).sum::<f64>(), pattern)
            })
            .reduce(
                || (f64::NEG_INFINITY, u64::MAX),
                |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
            )
            .1
    };

    let mut witness = signs_of(best_pattern);
    let refs: Vec<&[Complex64]> = witness.iter().map(Vec::as_slice).collect();
    let c = t.contract_except(m - 1, &refs);
    let (last, _) = dual_maximizer(&c, ExtendedReal::Infinity);
    witness.push(last);
    Ok(NormEstimate {
        value: objective(t, &witness),
        method: NormMethod::VertexExact,
        is_exact: true,
        restarts_used: 0,
        sweeps: 0,
        converged: true,
        witness,
    })
}

/// Gray-code walk over `x ∈ {±1}^n` (first sign fixed) maximizing
/// `Σ_j |Σ_i x_i a_ij|`; returns the winning pattern in the bit layout of
/// [`vertex_exact_with_budget`].
fn best_vertex_bilinear(t: &CoeffTensor) -> u64 {
    let n = t.dim();
    let a: Vec<f64> = t.entries().iter().map(|z| z.re).collect();
    let mut x = vec![1.0f64; n];
    let mut c: Vec<f64> = (0..n).map(|j| (0..n).map(|i| a[i * n + j]).sum()).collect();
    let score = |c: &[f64]| c.iter().map(|v| v.abs()).sum::<f64>();
    let mut best = (score(&c), 0u64);
    let mut gray = 0u64;
    for step in 1..1u64 << (n - 1) {
        let flip = step.trailing_zeros() as usize + 1;
        gray ^= 1 << (flip - 1);
        let old = x[flip];
        x[flip] = -old;
        let row = &a[flip * n..(flip + 1) * n];
        for (cj, aj) in c.iter_mut().zip(row) {
            *cj -= 2.0 * old * aj;
        }
        let s = score(&c);
        if s > best.0 {
            best = (s, gray);
        }
    }
    best.1
}

/// Largest singular value of a bilinear form's coefficient matrix, which is
/// its norm on `ℓ_2 × ℓ_2`. Power iteration on `A^H A`.
pub fn bilinear_l2_oracle(t: &CoeffTensor) -> Result<NormEstimate> {
    if t.degree() != 2 {
        return Err(Error::OracleUnavailable(format!(
            "singular-value oracle needs a bilinear form, got degree {}",
            t.degree()
        )));
    }
    let n = t.dim();
    let a = t.entries();
    let apply = |v: &[Complex64]| -> Vector {
        a.chunks_exact(n)
            .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
            .collect()
    };
    let apply_adjoint = |w: &[Complex64]| -> Vector {
        let mut u = vec![zero(); n];
        for (row, wi) in a.chunks_exact(n).zip(w) {
            for (uj, aij) in u.iter_mut().zip(row) {
                *uj += aij.conj() * wi;
            }
        }
        u
    };
    let l2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let mut g = rng::stream_rng(0x5EED, 0);
    let mut v = random_unit(&mut g, n, ExtendedReal::TWO, t.field());
    let mut previous = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < POWER_ITER_CAP {
        iterations += 1;
        let w = apply(&v);
        let lambda = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let u = apply_adjoint(&w);
        let norm_u = l2(&u);
        if norm_u == 0.0 {
            converged = true;
            break;
        }
        v = u.into_iter().map(|z| z / norm_u).collect();
        if (lambda - previous).abs() <= POWER_ITER_TOL * lambda {
            converged = true;
            break;
        }
        previous = lambda;
    }

    let w = apply(&v);
    let sigma = l2(&w);
    let x = if sigma == 0.0 {
        basis(n, 0)
    } else {
        w.iter().map(|z| z.conj() / sigma).collect()
    };
    let witness = vec![x, v];
    Ok(NormEstimate {
        value: objective(t, &witness),
        method: NormMethod::BilinearL2Oracle,
        is_exact: true,
        restarts_used: 0,
        sweeps: iterations,
        converged,
        witness,
    })
}

/// True when `t` is exactly the diagonal form `Σ_j x_j^(1) ⋯ x_j^(m)`.
pub fn is_diagonal_form(t: &CoeffTensor) -> bool {
    let (m, n) = (t.degree(), t.dim());
    let stride = (0..m).fold(0usize, |acc, _| acc * n + 1);
    t.entries().iter().enumerate().all(|(off, z)| {
        let on_diag = off % stride == 0 && off / stride < n;
        *z == if on_diag { Complex64::new(1.0, 0.0) } else { zero() }
    })
}

/// Which computation [`estimate_norm`] should run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Exact oracle when one applies, ascent otherwise.
    Auto,
    Ascent,
    Vertex,
    Svd,
    Diagonal,
}

impl std::str::FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(MethodChoice::Auto),
            "ascent" => Ok(MethodChoice::Ascent),
            "vertex" => Ok(MethodChoice::Vertex),
            "svd" => Ok(MethodChoice::Svd),
            "diagonal" => Ok(MethodChoice::Diagonal),
            other => Err(Error::Domain(format!("unknown norm method {other:?}"))),
        }
    }
}

/// Knobs shared by every norm computation in an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormPolicy {
    pub ascent: AscentConfig,
    /// Vertex enumeration is used automatically only up to this many signs.
    pub vertex_max_bits: u32,
}

impl Default for NormPolicy {
    fn default() -> Self {
        NormPolicy { ascent: AscentConfig::default(), vertex_max_bits: VERTEX_MAX_BITS }
    }
}

impl NormPolicy {
    /// The exact oracle `Auto` would pick for `t`, if any.
    pub fn oracle_for(&self, t: &CoeffTensor, p: ExtendedReal) -> Option<MethodChoice> {
        let bits = t.dim() * (t.degree() - 1);
        if is_diagonal_form(t) {
            Some(MethodChoice::Diagonal)
        } else if t.field() == ScalarField::Real && p.is_infinite() && bits <= self.vertex_max_bits as usize {
            Some(MethodChoice::Vertex)
        } else if t.degree() == 2 && p == ExtendedReal::TWO {
            Some(MethodChoice::Svd)
        } else {
            None
        }
    }
}

pub fn estimate_norm(
    t: &CoeffTensor,
    p: ExtendedReal,
    choice: MethodChoice,
    policy: &NormPolicy,
) -> Result<NormEstimate> {
    p.require_lebesgue("p")?;
    let choice = match choice {
        MethodChoice::Auto => policy.oracle_for(t, p).unwrap_or(MethodChoice::Ascent),
        other => other,
    };
    match choice {
        MethodChoice::Ascent | MethodChoice::Auto => alternating_ascent(t, p, &policy.ascent),
        MethodChoice::Vertex => {
            if !p.is_infinite() {
                return Err(Error::OracleUnavailable("vertex enumeration requires p = inf".into()));
            }
            vertex_exact_with_budget(t, VERTEX_MAX_BITS.max(policy.vertex_max_bits))
        }
        MethodChoice::Svd => {
            if p != ExtendedReal::TWO {
                return Err(Error::OracleUnavailable("singular-value oracle requires p = 2".into()));
            }
            bilinear_l2_oracle(t)
        }
        MethodChoice::Diagonal => {
            if !is_diagonal_form(t) {
                return Err(Error::OracleUnavailable("tensor is not the diagonal form".into()));
            }
            diagonal_exact(t.degree(), t.dim(), p)
        }
    }
}
