//! Exponent phase diagram for the Hardy–Littlewood / Bohnenblust–Hille
//! coefficient inequalities of m-linear forms on `ℓ_p^n`, together with the
//! numerical machinery that certifies it: multilinear operator norms on
//! `ℓ_p` balls, extremal and random form families, and growth-rate fits.
//!
//! - [`theory`]: regions, exponents and constants in closed form.
//! - [`tensors`]: dense coefficient tensors and the test families.
//! - [`normest`]: operator norms by alternating ascent and exact oracles.
//! - [`experiments`]: growth fits, Kahane–Salem–Zygmund sampling, certification.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod extended;
pub mod normest;
pub mod plot;
pub mod rng;
pub mod tensors;
pub mod theory;

pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use num_complex::Complex64;
pub use tensors::{CoeffTensor, Family, Vector};
pub use theory::{ParamPoint, Region, RegionVerdict, ScalarField};
