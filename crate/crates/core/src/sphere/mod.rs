//! Berezin–Toeplitz quantization of `ℂP¹` with `L = O(1)`.
//!
//! Conventions: `∫ω = 1`, `dv = ω`, Fubini–Study metric on `O(1)`. The chart
//! is `z = (x₁ − i x₂)/(1 + x₃)` around the north pole, so that
//! `x₁ = (z+z̄)/(1+|z|²)`, `x₂ = i(z−z̄)/(1+|z|²)`, `x₃ = (1−|z|²)/(1+|z|²)`,
//! `ω = dx dy / (π(1+|z|²)²)` and the sections are `s_k = z^k`,
//! `k = 0..p`, with `|s_k|²_h = |z|^{2k}/(1+|z|²)^p`. With this orientation
//! `{x₁,x₂} = 2x₃` and `[T_f, T_g] ≈ (i/p) T_{{f,g}}`.

mod supnorm;
mod symbol;
mod toeplitz;

use thiserror::Error;

use crate::parse::ParseError;

pub use supnorm::{fibonacci_sphere, sup_norm};
pub use symbol::{poisson_sphere, SphereSymbol, D_MAX};
pub(crate) use toeplitz::bergman_partial;
pub use toeplitz::{
    bergman_diag, commutator_residual, norm_defect, product_residual, section_norms, toeplitz_sphere,
    toeplitz_sphere_exact, SectionBasis,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SphereError {
    #[error("tensor power must be at least 1, got {0}")]
    InvalidPower(i64),
    #[error("symbol degree {degree} exceeds the maximum {max}")]
    DegreeTooHigh { degree: u32, max: u32 },
    #[error("symbol `{0}` is not real-valued")]
    NotReal(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
