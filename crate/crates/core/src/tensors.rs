//! Dense coefficient tensors of m-linear forms on `K^n`.
//!
//! Entry `(j_1, …, j_m)` holds `T(e_j1, …, e_jm)` and lives at the row-major
//! offset `Σ_k j_k · n^(m−1−k)` (0-based), so `j_1` varies slowest. Scalars
//! are stored as `Complex64` for both fields; real tensors keep every
//! imaginary part at zero, which keeps real arithmetic exact.

use std::borrow::Cow;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::rng;
use crate::theory::ScalarField;

pub type Vector = Vec<Complex64>;

/// Default cap on `n^m`.
pub const DEFAULT_ENTRY_BUDGET: usize = 10_000_000;

/// `n^m`, or `None` on overflow.
pub fn entry_count(m: usize, n: usize) -> Option<usize> {
    n.checked_pow(u32::try_from(m).ok()?)
}

fn check_capacity(m: usize, n: usize, budget: usize) -> Result<usize> {
    if m < 2 {
        return Err(Error::Domain(format!("degree m = {m} must be at least 2")));
    }
    if n < 1 {
        return Err(Error::Domain("dimension n must be at least 1".into()));
    }
    match entry_count(m, n) {
        Some(count) if count <= budget => Ok(count),
        Some(count) => Err(Error::Capacity { entries: count.to_string(), budget }),
        None => Err(Error::Capacity { entries: format!("{n}^{m}"), budget }),
    }
}

/// Test families of forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `Σ_j x_j^(1) ⋯ x_j^(m)`.
    Diagonal,
    /// Independent uniform `±1` coefficients.
    Sign,
    /// Independent standard normal coefficients.
    Gaussian,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal" => Ok(Family::Diagonal),
            "sign" => Ok(Family::Sign),
            "gaussian" => Ok(Family::Gaussian),
            other => Err(Error::Domain(format!("unknown family {other:?}"))),
        }
    }
}

impl Family {
    /// Builds an instance, checking `n^m` against `budget`. `seed` is ignored
    /// by the deterministic diagonal family.
    pub fn build(
        self,
        m: usize,
        n: usize,
        field: ScalarField,
        seed: u64,
        budget: usize,
    ) -> Result<CoeffTensor> {
        let len = check_capacity(m, n, budget)?;
        let entries = match self {
            Family::Diagonal => {
                let mut e = vec![Complex64::new(0.0, 0.0); len];
                let stride = diagonal_stride(m, n);
                for j in 0..n {
                    e[j * stride] = Complex64::new(1.0, 0.0);
                }
                e
            }
            Family::Sign => {
                let mut g = rng::stream_rng(seed, 0);
                (0..len).map(|_| Complex64::new(rng::sign(&mut g), 0.0)).collect()
            }
            Family::Gaussian => {
                let mut g = rng::stream_rng(seed, 0);
                match field {
                    ScalarField::Real => {
                        let mut re = vec![0.0; len];
                        rng::fill_normal(&mut g, &mut re);
                        re.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
                    }
                    ScalarField::Complex => (0..len).map(|_| rng::complex_normal(&mut g)).collect(),
                }
            }
        };
        Ok(CoeffTensor { m, n, field, entries })
    }
}

// Offset step between consecutive diagonal entries: Σ_k n^k for k < m.
fn diagonal_stride(m: usize, n: usize) -> usize {
    (0..m).fold(0usize, |acc, _| acc * n + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTensor {
    m: usize,
    n: usize,
    field: ScalarField,
    entries: Vec<Complex64>,
}

impl CoeffTensor {
    pub fn from_entries(
        m: usize,
        n: usize,
        field: ScalarField,
        entries: Vec<Complex64>,
    ) -> Result<Self> {
        let len = check_capacity(m, n, usize::MAX)?;
        if entries.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: entries.len() });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("tensor entries must be finite".into()));
        }
        if field == ScalarField::Real && entries.iter().any(|z| z.im != 0.0) {
            return Err(Error::Domain("real tensor has a nonzero imaginary part".into()));
        }
        Ok(CoeffTensor { m, n, field, entries })
    }

    /// Real tensor from real coefficients.
    pub fn from_real(m: usize, n: usize, entries: &[f64]) -> Result<Self> {
        let entries = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_entries(m, n, ScalarField::Real, entries)
    }

    pub fn zeros(m: usize, n: usize, field: ScalarField) -> Result<Self> {
        let len = check_capacity(m, n, DEFAULT_ENTRY_BUDGET)?;
        Ok(CoeffTensor { m, n, field, entries: vec![Complex64::new(0.0, 0.0); len] })
    }

    pub fn diagonal(m: usize, n: usize, field: ScalarField) -> Result<Self> {
        Family::Diagonal.build(m, n, field, 0, DEFAULT_ENTRY_BUDGET)
    }

    pub fn sign_random(m: usize, n: usize, seed: u64, field: ScalarField) -> Result<Self> {
        Family::Sign.build(m, n, field, seed, DEFAULT_ENTRY_BUDGET)
    }

    pub fn gaussian(m: usize, n: usize, seed: u64, field: ScalarField) -> Result<Self> {
        Family::Gaussian.build(m, n, field, seed, DEFAULT_ENTRY_BUDGET)
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Row-major offset of a 0-based multi-index.
    pub fn offset(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: index.len() });
        }
        index.iter().try_fold(0usize, |acc, &j| {
            if j >= self.n {
                Err(Error::DimensionMismatch { expected: self.n, got: j })
            } else {
                Ok(acc * self.n + j)
            }
        })
    }

    /// Inverse of [`CoeffTensor::offset`].
    pub fn multi_index(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.m];
        for slot in idx.iter_mut().rev() {
            *slot = offset % self.n;
            offset /= self.n;
        }
        idx
    }

    pub fn get(&self, index: &[usize]) -> Result<Complex64> {
        Ok(self.entries[self.offset(index)?])
    }

    /// `α · T`.
    pub fn scaled(&self, alpha: Complex64) -> Result<Self> {
        let entries = self.entries.iter().map(|&z| z * alpha).collect();
        Self::from_entries(self.m, self.n, self.field, entries)
    }

    fn check_vectors<V: AsRef<[Complex64]>>(&self, vs: &[V], expected: usize) -> Result<()> {
        if vs.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: vs.len() });
        }
        for v in vs {
            let v = v.as_ref();
            if v.len() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
            }
        }
        Ok(())
    }

    /// `T(x^(1), …, x^(m))`.
    pub fn evaluate<V: AsRef<[Complex64]>>(&self, args: &[V]) -> Result<Complex64> {
        self.check_vectors(args, self.m)?;
        let last = self.m - 1;
        let c = self.contract_slot(last, &args[..last])?;
        Ok(c.iter().zip(args[last].as_ref()).map(|(a, b)| a * b).sum())
    }

    /// The vector `c` with `c_j = T(…, e_j at slot, …)`, the other slots
    /// fixed to `others` (given in slot order, skipping `slot`).
    pub fn contract_slot<V: AsRef<[Complex64]>>(&self, slot: usize, others: &[V]) -> Result<Vector> {
        if slot >= self.m {
            return Err(Error::SlotOutOfRange { slot, degree: self.m });
        }
        self.check_vectors(others, self.m - 1)?;
        let refs: Vec<&[Complex64]> = others.iter().map(AsRef::as_ref).collect();
        Ok(self.contract_except(slot, &refs))
    }

    /// Contracts every slot except `slot`; `others` has `m − 1` entries of
    /// length `n` (unchecked).
    pub(crate) fn contract_except(&self, slot: usize, others: &[&[Complex64]]) -> Vector {
        let n = self.n;
        let mut buf: Cow<'_, [Complex64]> = Cow::Borrowed(&self.entries);
        // Trailing slots, innermost first.
        for k in (slot + 1..self.m).rev() {
            let x = others[k - 1];
            let next: Vec<Complex64> = buf
                .chunks_exact(n)
                .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect();
            buf = Cow::Owned(next);
        }
        // Leading slots, outermost first.
        for &x in &others[..slot] {
            let rest = buf.len() / n;
            let mut next = vec![Complex64::new(0.0, 0.0); rest];
            for (i, xi) in x.iter().enumerate() {
                if *xi == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let block = &buf[i * rest..(i + 1) * rest];
                for (acc, a) in next.iter_mut().zip(block) {
                    *acc += xi * a;
                }
            }
            buf = Cow::Owned(next);
        }
        buf.into_owned()
    }

    /// `(Σ |T(e_j1, …, e_jm)|^r)^(1/r)`, or the max modulus at `r = ∞`.
    pub fn coeff_lr_norm(&self, r: ExtendedReal) -> f64 {
        lr_norm(self.entries.iter().map(|z| z.norm()), r)
    }

    pub fn to_record(&self) -> TensorRecord {
        let entries = match self.field {
            ScalarField::Real => self.entries.iter().map(|z| z.re).collect(),
            ScalarField::Complex => self.entries.iter().flat_map(|z| [z.re, z.im]).collect(),
        };
        TensorRecord { m: self.m, n: self.n, field: self.field, entries }
    }

    pub fn from_record(rec: TensorRecord) -> Result<Self> {
        let entries = match rec.field {
            ScalarField::Real => rec.entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            ScalarField::Complex => {
                if !rec.entries.len().is_multiple_of(2) {
                    return Err(Error::Domain("complex entries must be interleaved re/im pairs".into()));
                }
                rec.entries.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
            }
        };
        Self::from_entries(rec.m, rec.n, rec.field, entries)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_record(serde_json::from_str(s)?)
    }
}

/// On-disk form: complex entries are interleaved `re, im`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub m: usize,
    pub n: usize,
    pub field: ScalarField,
    pub entries: Vec<f64>,
}

/// `ℓ_r` norm of a sequence of moduli, scaled by the maximum.
pub fn lr_norm(mags: impl Iterator<Item = f64> + Clone, r: ExtendedReal) -> f64 {
    let max = mags.clone().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    match r {
        ExtendedReal::Infinity => max,
        ExtendedReal::Finite(r) => {
            let s: f64 = mags.map(|a| (a / max).powf(r)).sum();
            max * s.powf(1.0 / r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn basis(n: usize, j: usize) -> Vector {
        let mut v = vec![c(0.0); n];
        v[j] = c(1.0);
        v
    }

    #[test]
    fn diagonal_examples() {
        let d = CoeffTensor::diagonal(2, 2, ScalarField::Real).unwrap();
        assert_eq!(d.entries(), &[c(1.0), c(0.0), c(0.0), c(1.0)]);
        let d3 = CoeffTensor::diagonal(3, 2, ScalarField::Real).unwrap();
        assert_eq!(d3.entries().iter().filter(|z| z.norm() != 0.0).count(), 2);
        assert_eq!(d3.get(&[1, 1, 1]).unwrap(), c(1.0));
        for (m, n, r) in [(2, 4, 2.0), (3, 5, 1.5), (4, 3, 3.0)] {
            let d = CoeffTensor::diagonal(m, n, ScalarField::Real).unwrap();
            let got = d.coeff_lr_norm(ExtendedReal::Finite(r));
            assert!((got - (n as f64).powf(1.0 / r)).abs() < 1e-12);
        }
    }

    #[test]
    fn capacity_errors() {
        let err = Family::Diagonal.build(3, 100, ScalarField::Real, 0, 1000).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        let err = Family::Sign.build(64, 1000, ScalarField::Real, 0, DEFAULT_ENTRY_BUDGET).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        assert!(CoeffTensor::diagonal(1, 3, ScalarField::Real).is_err());
    }

    #[test]
    fn sign_tensor_properties() {
        let t = CoeffTensor::sign_random(3, 4, 9, ScalarField::Real).unwrap();
        assert!(t.entries().iter().all(|z| z.norm() == 1.0 && z.im == 0.0));
        let again = CoeffTensor::sign_random(3, 4, 9, ScalarField::Real).unwrap();
        assert_eq!(t, again);
        let a = CoeffTensor::sign_random(2, 2, 0, ScalarField::Real).unwrap();
        let b = CoeffTensor::sign_random(2, 2, 0, ScalarField::Real).unwrap();
        assert_eq!(a, b);
        let r = 4.0 / 3.0;
        let s = CoeffTensor::sign_random(2, 3, 1, ScalarField::Real).unwrap();
        assert!((s.coeff_lr_norm(ExtendedReal::Finite(r)) - 5.196_152_422_706_632).abs() < 1e-12);
        assert!((t.coeff_lr_norm(ExtendedReal::Finite(2.5)) - 64f64.powf(1.0 / 2.5)).abs() < 1e-12);
    }

    #[test]
    fn sign_stream_is_pinned() {
        // Frozen draw: guards the cross-platform reproducibility contract.
        let t = CoeffTensor::sign_random(2, 3, 42, ScalarField::Real).unwrap();
        let signs: Vec<i32> = t.entries().iter().map(|z| z.re as i32).collect();
        let mut g = rng::stream_rng(42, 0);
        let expected: Vec<i32> = (0..9).map(|_| rng::sign(&mut g) as i32).collect();
        assert_eq!(signs, expected);
    }

    #[test]
    fn gaussian_properties() {
        let t = CoeffTensor::gaussian(2, 3, 5, ScalarField::Real).unwrap();
        assert_eq!(t.entries().len(), 9);
        assert!(t.entries().iter().all(|z| z.re.is_finite() && z.im == 0.0));
        assert_eq!(t, CoeffTensor::gaussian(2, 3, 5, ScalarField::Real).unwrap());
        assert_ne!(t, CoeffTensor::gaussian(2, 3, 6, ScalarField::Real).unwrap());

        // 317^2 = 100_489 samples; 4σ/√N ≈ 0.0126 < 0.02.
        let big = CoeffTensor::gaussian(2, 317, 1, ScalarField::Real).unwrap();
        let mean = big.entries().iter().map(|z| z.re).sum::<f64>() / big.entries().len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");

        let z = CoeffTensor::gaussian(2, 3, 5, ScalarField::Complex).unwrap();
        assert!(z.entries().iter().any(|z| z.im != 0.0));
    }

    #[test]
    fn evaluate_examples() {
        let d = CoeffTensor::diagonal(2, 2, ScalarField::Real).unwrap();
        assert_eq!(d.evaluate(&[basis(2, 0), basis(2, 0)]).unwrap(), c(1.0));
        assert_eq!(d.evaluate(&[basis(2, 0), basis(2, 1)]).unwrap(), c(0.0));
        let t = CoeffTensor::gaussian(3, 3, 2, ScalarField::Complex).unwrap();
        let zero = vec![c(0.0); 3];
        assert_eq!(t.evaluate(&[zero.clone(), zero.clone(), zero]).unwrap(), c(0.0));
    }

    #[test]
    fn evaluate_rejects_bad_shapes() {
        let d = CoeffTensor::diagonal(2, 2, ScalarField::Real).unwrap();
        assert!(matches!(d.evaluate(&[basis(2, 0)]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(d.evaluate(&[basis(3, 0), basis(2, 0)]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(d.contract_slot(2, &[basis(2, 0)]), Err(Error::SlotOutOfRange { .. })));
    }

    #[test]
    fn contract_examples() {
        let d = CoeffTensor::diagonal(2, 2, ScalarField::Real).unwrap();
        let got = d.contract_slot(1, &[vec![c(2.5), c(-1.0)]]).unwrap();
        assert_eq!(got, vec![c(2.5), c(-1.0)]);
        let s = CoeffTensor::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0]).unwrap();
        assert_eq!(s.contract_slot(1, &[vec![c(1.0), c(0.0)]]).unwrap(), vec![c(1.0), c(1.0)]);
    }

    #[test]
    fn entry_order_round_trip() {
        let t = CoeffTensor::zeros(3, 4, ScalarField::Real).unwrap();
        for off in 0..64 {
            let idx = t.multi_index(off);
            assert_eq!(t.offset(&idx).unwrap(), off);
            // 1-based formula Σ_k (j_k − 1) n^(m−k).
            let one_based: usize = idx.iter().enumerate().map(|(k, j)| j * 4usize.pow((2 - k) as u32)).sum();
            assert_eq!(one_based, off);
        }
        let t = CoeffTensor::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        // T(e_1, e_2) = 2: slot 1 varies slowest.
        assert_eq!(t.evaluate(&[basis(2, 0), basis(2, 1)]).unwrap(), c(2.0));
        assert_eq!(t.evaluate(&[basis(2, 1), basis(2, 0)]).unwrap(), c(3.0));
    }

    #[test]
    fn json_format() {
        let err = CoeffTensor::from_entries(2, 2, ScalarField::Real, vec![Complex64::new(1.0, -2.0); 4]);
        assert!(err.is_err(), "real tensor with imaginary parts");
        let t = CoeffTensor::gaussian(2, 2, 3, ScalarField::Complex).unwrap();
        let rec = t.to_record();
        assert_eq!(rec.entries.len(), 8);
        assert_eq!(rec.entries[0], t.entries()[0].re);
        assert_eq!(rec.entries[1], t.entries()[0].im);
        assert_eq!(CoeffTensor::from_json(&t.to_json().unwrap()).unwrap(), t);

        let text = r#"{"m":2,"n":2,"field":"real","entries":[1,0,0,1]}"#;
        let d = CoeffTensor::from_json(text).unwrap();
        assert_eq!(d, CoeffTensor::diagonal(2, 2, ScalarField::Real).unwrap());
        assert!(CoeffTensor::from_json(r#"{"m":2,"n":2,"field":"real","entries":[1,0,0]}"#).is_err());
    }

    #[test]
    fn coeff_norm_infinity_is_max() {
        let t = CoeffTensor::from_real(2, 2, &[0.5, -3.0, 2.0, 1.0]).unwrap();
        assert_eq!(t.coeff_lr_norm(ExtendedReal::Infinity), 3.0);
        assert_eq!(CoeffTensor::zeros(2, 3, ScalarField::Real).unwrap().coeff_lr_norm(ExtendedReal::Finite(2.0)), 0.0);
    }

    fn random_vec(seed: u64, n: usize) -> Vector {
        let mut g = rng::stream_rng(seed, 99);
        (0..n).map(|_| rng::complex_normal(&mut g)).collect()
    }

    /// Independent brute-force evaluation over all multi-indices.
    fn brute_evaluate(t: &CoeffTensor, args: &[Vector]) -> Complex64 {
        (0..t.entries().len())
            .map(|off| {
                let idx = t.multi_index(off);
                idx.iter().enumerate().fold(t.entries()[off], |acc, (k, &j)| acc * args[k][j])
            })
            .sum()
    }

    proptest! {
        #[test]
        fn multilinear_in_every_slot(m in 2usize..5, n in 1usize..5, seed in 0u64..1000, slot in 0usize..4,
                                     a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let slot = slot % m;
            let t = CoeffTensor::gaussian(m, n, seed, ScalarField::Complex).unwrap();
            let args: Vec<Vector> = (0..m).map(|k| random_vec(seed + k as u64, n)).collect();
            let y = random_vec(seed + 50, n);
            let mut mixed = args.clone();
            mixed[slot] = args[slot].iter().zip(&y).map(|(x, y)| x * a + y * b).collect();
            let mut with_y = args.clone();
            with_y[slot] = y;
            let lhs = t.evaluate(&mixed).unwrap();
            let rhs = t.evaluate(&args).unwrap() * a + t.evaluate(&with_y).unwrap() * b;
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm().max(rhs.norm())));
        }

        #[test]
        fn contraction_matches_brute_force(m in 2usize..5, n in 1usize..5, seed in 0u64..1000) {
            let t = CoeffTensor::gaussian(m, n, seed, ScalarField::Real).unwrap();
            let args: Vec<Vector> = (0..m).map(|k| random_vec(seed * 7 + k as u64, n)).collect();
            let full = brute_evaluate(&t, &args);
            prop_assert!((t.evaluate(&args).unwrap() - full).norm() <= 1e-10 * (1.0 + full.norm()));
            for slot in 0..m {
                let others: Vec<Vector> = args.iter().enumerate().filter(|(k, _)| *k != slot).map(|(_, v)| v.clone()).collect();
                let cvec = t.contract_slot(slot, &others).unwrap();
                let dot: Complex64 = cvec.iter().zip(&args[slot]).map(|(a, b)| a * b).sum();
                prop_assert!((dot - full).norm() <= 1e-10 * (1.0 + full.norm()));
                for (j, &got) in cvec.iter().enumerate() {
                    let mut with_basis = args.clone();
                    with_basis[slot] = basis(n, j);
                    let direct = brute_evaluate(&t, &with_basis);
                    prop_assert!((got - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
                }
            }
        }

        #[test]
        fn lr_norm_non_increasing(seed in 0u64..1000, r in 1.0f64..6.0, dr in 0.0f64..4.0) {
            let t = CoeffTensor::gaussian(3, 3, seed, ScalarField::Complex).unwrap();
            let a = t.coeff_lr_norm(ExtendedReal::Finite(r));
            let b = t.coeff_lr_norm(ExtendedReal::Finite(r + dr));
            prop_assert!(b <= a * (1.0 + 1e-12));
            prop_assert!(t.coeff_lr_norm(ExtendedReal::Infinity) <= b * (1.0 + 1e-12));
        }
    }
}
