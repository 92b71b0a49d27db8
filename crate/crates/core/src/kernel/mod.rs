//! Exact calculus of model Bergman kernels on ℂⁿ.
//!
//! The model operator is `ℒ = Σ b_j b_j⁺` with
//! `b_j = −2∂/∂z_j + ½a_j z̄_j` and `b_j⁺ = 2∂/∂z̄_j + ½a_j z_j`. Its null
//! space is spanned by holomorphic polynomials times `exp(−¼Σa_j|z_j|²)`, and
//! the orthogonal projection onto it has the Gaussian kernel
//! `𝒫(Z,Z′) = Π(a_j/2π)·exp(−¼Σa_j(|z_j|²+|z′_j|²−2z_j z̄′_j))`.
//!
//! Operators with kernels `F(Z,Z′)𝒫(Z,Z′)` for polynomial `F` form an
//! algebra under composition; [`compose_k`] computes the polynomial
//! `𝒦[F,G]` with `(F𝒫)∘(G𝒫) = 𝒦[F,G]𝒫` exactly.

mod calculus;
mod jet;
mod kpoly;
mod model;

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::{rat_to_f64, rat_to_string, Rational};

pub use calculus::{bz_push, compose_k, normal_order, project_left, NormalForm};
pub use jet::{c1_antisymmetric, poisson_at_point, q1_of_jet, SymbolJet};
pub use kpoly::{KernelPoly, KernelVar};
pub use model::{model_kernel_eval, phi_beta_eval, phi_norm_sqr, spectrum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("model weights must be a nonempty non-decreasing list of positive rationals, got [{0}]")]
    InvalidWeights(String),
    #[error("coordinate index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("spectrum cutoff must be nonnegative, got {0}")]
    NegativeCutoff(String),
    #[error("malformed kernel polynomial JSON: {0}")]
    Json(String),
}

/// Curvature eigenvalues `0 < a_1 ≤ … ≤ a_n` of the model operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelWeights {
    a: Vec<Rational>,
}

impl ModelWeights {
    pub fn new(a: Vec<Rational>) -> Result<Self, KernelError> {
        let ok = !a.is_empty()
            && a.iter().all(|x| x.is_positive())
            && a.windows(2).all(|w| w[0] <= w[1]);
        if !ok {
            let shown: Vec<String> = a.iter().map(rat_to_string).collect();
            return Err(KernelError::InvalidWeights(shown.join(", ")));
        }
        Ok(Self { a })
    }

    /// Convenience constructor from integers.
    pub fn from_ints(a: &[i64]) -> Result<Self, KernelError> {
        Self::new(a.iter().map(|&v| crate::exact::rat_int(v)).collect())
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn get(&self, j: usize) -> &Rational {
        &self.a[j]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.a.iter().map(rat_to_f64).collect()
    }
}

impl fmt::Display for ModelWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.a.iter().map(rat_to_string).collect();
        write!(f, "({})", shown.join(", "))
    }
}

/// A multi-index `α ∈ ℕⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[j] = 1;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|α| = Σ α_j`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| v.is_zero())
    }

    /// `α! = Π α_j!` as an exact integer.
    pub fn factorial(&self) -> Rational {
        let mut acc = Rational::from_integer(1.into());
        for &k in &self.0 {
            for i in 2..=k {
                acc *= Rational::from_integer(i.into());
            }
        }
        acc
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// All multi-indices of length `n` with `|α| ≤ max_order`, graded by `|α|`
    /// and, within one degree, in decreasing lexicographic order
    /// (`(1,0)` before `(0,1)`).
    pub fn graded(n: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for d in 0..=max_order {
            let mut cur = vec![0u32; n];
            fill_degree(&mut cur, 0, d, &mut out);
        }
        out
    }
}

fn fill_degree(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    if cur.is_empty() {
        return;
    }
    for v in (0..=remaining).rev() {
        cur[pos] = v;
        fill_degree(cur, pos + 1, remaining - v, out);
    }
    cur[pos] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", shown.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn weights_validation() {
        assert!(ModelWeights::new(vec![rat(1, 2), rat(3, 1)]).is_ok());
        assert!(ModelWeights::new(vec![]).is_err());
        assert!(ModelWeights::new(vec![rat(3, 1), rat(1, 1)]).is_err());
        assert!(ModelWeights::new(vec![rat(0, 1)]).is_err());
        assert!(ModelWeights::new(vec![rat(-1, 1)]).is_err());
    }

    #[test]
    fn graded_enumeration() {
        let idx = MultiIndex::graded(2, 1);
        assert_eq!(idx, vec![MultiIndex(vec![0, 0]), MultiIndex(vec![1, 0]), MultiIndex(vec![0, 1])]);
        assert_eq!(MultiIndex::graded(2, 3).len(), 10);
        assert_eq!(MultiIndex::graded(1, 2).len(), 3);
        assert_eq!(MultiIndex::graded(3, 4).len(), 35);
    }

    #[test]
    fn factorial_and_order() {
        let a = MultiIndex(vec![3, 0, 2]);
        assert_eq!(a.order(), 5);
        assert_eq!(a.factorial(), rat(12, 1));
    }
}
