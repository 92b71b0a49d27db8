//! Berezin–Toeplitz quantization on the model space `ker ℒ ⊂ L²(ℝ²ⁿ)`.
//!
//! Two bases are used. [`FockBasis`] is the orthonormal basis `φ_β` of
//! `ker ℒ`; Toeplitz and kernel-operator matrices on it have closed-form
//! entries computed from Gaussian moments. [`LandauBasis`] spans all of
//! `L²(ℝ²ⁿ)`: per coordinate it is the two-mode oscillator basis `|m,l⟩`
//! built from `b_j` (which raises the level `m`) and `d_j⁺ = ½a_j z_j − 2∂/∂z̄_j`
//! (which raises `l` and commutes with `b_j, b_j⁺`). There
//! `z_j = (b_j⁺ + d_j⁺)/a_j` and `z̄_j = (b_j + d_j)/a_j`, and `ker ℒ` is the
//! level `m = 0`. Compositions of kernel operators pass through all of
//! `L²`, so they are checked in the Landau basis.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{GaussianRational, Rational, Surd};
use crate::kernel::{compose_k, KernelError, KernelPoly, ModelWeights, MultiIndex};
use crate::matrix::{block_operator_norm, BasisInfo, ExactMatrix, ToeplitzMatrix};
use crate::poly::Exponents;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FockError {
    #[error("degree cutoff must be nonnegative, got {0}")]
    NegativeCutoff(i64),
    #[error("dimension mismatch: basis has n = {expected}, operand has n = {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("margin {margin} too large for cutoff {cutoff} and operand degree {degree}")]
    MarginTooLarge { margin: u32, cutoff: u32, degree: u32 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Orthonormal basis `φ_β`, `|β| ≤ B`, of the truncated model space.
#[derive(Debug, Clone)]
pub struct FockBasis {
    weights: ModelWeights,
    cutoff: u32,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
}

pub fn fock_basis(w: &ModelWeights, cutoff: i64) -> Result<FockBasis, FockError> {
    if cutoff < 0 {
        return Err(FockError::NegativeCutoff(cutoff));
    }
    let cutoff = cutoff as u32;
    let indices = MultiIndex::graded(w.n(), cutoff);
    let lookup = indices.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
    Ok(FockBasis { weights: w.clone(), cutoff, indices, lookup })
}

impl FockBasis {
    pub fn weights(&self) -> &ModelWeights {
        &self.weights
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index_of(&self, beta: &MultiIndex) -> Option<usize> {
        self.lookup.get(beta).copied()
    }

    fn info(&self) -> BasisInfo {
        BasisInfo::Fock { n: self.n(), cutoff: self.cutoff }
    }

    /// `Π_j (a_j/2)^{β_j+γ_j} / (β_j! γ_j!)`: the common radicand of every
    /// closed-form matrix entry in row `β`, column `γ`.
    fn radicand(&self, beta: &MultiIndex, gamma: &MultiIndex) -> Rational {
        let mut r = Rational::one();
        for (j, a) in self.weights.a().iter().enumerate() {
            let half = a / Rational::from_integer(2.into());
            r *= pow_rat(&half, beta.0[j] + gamma.0[j]) / (factorial(beta.0[j]) * factorial(gamma.0[j]));
        }
        r
    }
}

fn factorial(k: u32) -> Rational {
    (2..=k).fold(Rational::one(), |acc, i| acc * Rational::from_integer(i.into()))
}

fn pow_rat(r: &Rational, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * r)
}

fn check_len(basis: &FockBasis, idx: &MultiIndex) -> Result<(), FockError> {
    if idx.len() != basis.n() {
        return Err(FockError::DimensionMismatch { expected: basis.n(), found: idx.len() });
    }
    Ok(())
}

/// Exact entries `⟨φ_β, z^μ z̄^ν φ_γ⟩`; nonzero only when `β + ν = γ + μ`.
pub fn toeplitz_monomial_exact(basis: &FockBasis, mu: &MultiIndex, nu: &MultiIndex) -> Result<ExactMatrix, FockError> {
    check_len(basis, mu)?;
    check_len(basis, nu)?;
    let mut out = ExactMatrix::new(basis.len());
    let a = basis.weights.a();
    for (col, gamma) in basis.indices.iter().enumerate() {
        let shifted: Option<Vec<u32>> = (0..basis.n())
            .map(|j| (gamma.0[j] + mu.0[j]).checked_sub(nu.0[j]))
            .collect();
        let Some(beta) = shifted.map(MultiIndex) else { continue };
        let Some(row) = basis.index_of(&beta) else { continue };
        let mut coef = Rational::one();
        for j in 0..basis.n() {
            let m = gamma.0[j] + mu.0[j];
            coef *= factorial(m) * pow_rat(&(Rational::from_integer(2.into()) / &a[j]), m);
        }
        out.entries.insert((row, col), Surd::new(GaussianRational::real(coef), basis.radicand(&beta, gamma)));
    }
    Ok(out)
}

pub fn toeplitz_monomial_matrix(basis: &FockBasis, mu: &MultiIndex, nu: &MultiIndex) -> Result<ToeplitzMatrix, FockError> {
    let exact = toeplitz_monomial_exact(basis, mu, nu)?;
    Ok(ToeplitzMatrix::new(basis.info(), format!("z^{mu} zbar^{nu}"), exact.to_dense()))
}

/// Splits a kernel exponent vector into `(p, q, r, s)` for `z^p z̄^q z′^r z̄′^s`.
fn split_exponents(e: &Exponents, n: usize) -> [&[u32]; 4] {
    [&e[0..n], &e[n..2 * n], &e[2 * n..3 * n], &e[3 * n..4 * n]]
}

/// Exact entries `⟨φ_β, (Q𝒫)φ_γ⟩` from Gaussian moments.
///
/// For `Q = z^p z̄^q z′^r z̄′^s`, expanding `exp(½a z z̄′)` in the kernel leaves a
/// single surviving power `k = β+q−p = γ+r−s` per coordinate and the entry
/// `√R_{βγ} · Π (a/2)^k/k! · (β+q)!(γ+r)!(2/a)^{β+q+γ+r}`.
pub fn kernel_operator_exact(basis: &FockBasis, q: &KernelPoly) -> Result<ExactMatrix, FockError> {
    let n = basis.n();
    if q.n() != n {
        return Err(FockError::DimensionMismatch { expected: n, found: q.n() });
    }
    let a = basis.weights.a();
    let two = Rational::from_integer(2.into());
    let mut coefs: BTreeMap<(usize, usize), GaussianRational> = BTreeMap::new();
    for (e, c) in q.terms() {
        let [pz, qz, rz, sz] = split_exponents(e, n);
        for (col, gamma) in basis.indices.iter().enumerate() {
            let mut beta = vec![0u32; n];
            let mut coef = Rational::one();
            let mut ok = true;
            for j in 0..n {
                let Some(k) = (gamma.0[j] + rz[j]).checked_sub(sz[j]) else {
                    ok = false;
                    break;
                };
                let Some(b) = (k + pz[j]).checked_sub(qz[j]) else {
                    ok = false;
                    break;
                };
                beta[j] = b;
                let half = &a[j] / &two;
                let inv_half = &two / &a[j];
                coef *= pow_rat(&half, k) / factorial(k)
                    * factorial(b + qz[j])
                    * factorial(gamma.0[j] + rz[j])
                    * pow_rat(&inv_half, b + qz[j] + gamma.0[j] + rz[j]);
            }
            if !ok {
                continue;
            }
            let Some(row) = basis.index_of(&MultiIndex(beta)) else { continue };
            let slot = coefs.entry((row, col)).or_insert_with(GaussianRational::zero);
            *slot += &c.scale(&coef);
        }
    }
    let mut out = ExactMatrix::new(basis.len());
    for ((row, col), c) in coefs {
        if c.is_zero() {
            continue;
        }
        let r = basis.radicand(&basis.indices[row], &basis.indices[col]);
        out.entries.insert((row, col), Surd::new(c, r));
    }
    Ok(out)
}

pub fn kernel_operator_matrix(basis: &FockBasis, q: &KernelPoly) -> Result<ToeplitzMatrix, FockError> {
    let exact = kernel_operator_exact(basis, q)?;
    Ok(ToeplitzMatrix::new(basis.info(), q.to_string(), exact.to_dense()))
}

/// Truncated orthonormal basis `|m,l⟩` of all of `L²(ℝ²ⁿ)`, `|m|+|l| ≤ B`.
#[derive(Debug, Clone)]
pub struct LandauBasis {
    weights: ModelWeights,
    a: Vec<f64>,
    cutoff: u32,
    /// `[m_1..m_n, l_1..l_n]`
    states: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, usize>,
}

impl LandauBasis {
    pub fn new(w: &ModelWeights, cutoff: u32) -> Self {
        let n = w.n();
        let states: Vec<Vec<u32>> = MultiIndex::graded(2 * n, cutoff).into_iter().map(|m| m.0).collect();
        let lookup = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self { weights: w.clone(), a: w.to_f64(), cutoff, states, lookup }
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Landau level `m` and in-level index `l` of a basis state.
    pub fn state(&self, index: usize) -> (MultiIndex, MultiIndex) {
        let s = &self.states[index];
        let n = self.n();
        (MultiIndex(s[..n].to_vec()), MultiIndex(s[n..].to_vec()))
    }

    pub fn index_of(&self, level: &MultiIndex, beta: &MultiIndex) -> Option<usize> {
        let key: Vec<u32> = level.0.iter().chain(&beta.0).copied().collect();
        self.lookup.get(&key).copied()
    }

    fn degree(&self, index: usize) -> u32 {
        self.states[index].iter().sum()
    }

    /// One coordinate of `z^p z̄^q Π₀ z^r z̄^s` applied to `|m,l⟩`.
    fn coordinate_action(&self, j: usize, m: u32, l: u32, exps: [u32; 4]) -> Vec<((u32, u32), f64)> {
        let a = self.a[j];
        let [p, q, r, s] = exps;
        let mut v: Vec<((u32, u32), f64)> = vec![((m, l), 1.0)];
        let apply = |v: Vec<((u32, u32), f64)>, holomorphic: bool| -> Vec<((u32, u32), f64)> {
            let mut out: BTreeMap<(u32, u32), f64> = BTreeMap::new();
            for ((m, l), c) in v {
                if holomorphic {
                    // z = (b⁺ + d⁺)/a
                    if m > 0 {
                        *out.entry((m - 1, l)).or_default() += c * (2.0 * a * m as f64).sqrt() / a;
                    }
                    *out.entry((m, l + 1)).or_default() += c * (2.0 * a * (l + 1) as f64).sqrt() / a;
                } else {
                    // z̄ = (b + d)/a
                    *out.entry((m + 1, l)).or_default() += c * (2.0 * a * (m + 1) as f64).sqrt() / a;
                    if l > 0 {
                        *out.entry((m, l - 1)).or_default() += c * (2.0 * a * l as f64).sqrt() / a;
                    }
                }
            }
            out.into_iter().collect()
        };
        for _ in 0..s {
            v = apply(v, false);
        }
        for _ in 0..r {
            v = apply(v, true);
        }
        v.retain(|&((m, _), _)| m == 0);
        for _ in 0..q {
            v = apply(v, false);
        }
        for _ in 0..p {
            v = apply(v, true);
        }
        v
    }

    /// Exact action of the kernel monomial on basis state `index`, as
    /// `(state, amplitude)` pairs; output states may lie outside the basis.
    fn monomial_action(&self, e: &Exponents, index: usize) -> Vec<(Vec<u32>, f64)> {
        let n = self.n();
        let [p, q, r, s] = split_exponents(e, n);
        let st = &self.states[index];
        let mut acc: Vec<(Vec<u32>, f64)> = vec![(vec![0; 2 * n], 1.0)];
        for j in 0..n {
            let local = self.coordinate_action(j, st[j], st[n + j], [p[j], q[j], r[j], s[j]]);
            let mut next = Vec::with_capacity(acc.len() * local.len());
            for (key, c) in &acc {
                for &((m, l), d) in &local {
                    let mut k = key.clone();
                    k[j] = m;
                    k[n + j] = l;
                    next.push((k, c * d));
                }
            }
            acc = next;
        }
        acc
    }

    /// Dense matrix of `Q𝒫` on this basis.
    pub fn kernel_matrix(&self, q: &KernelPoly) -> ToeplitzMatrix {
        let mut m = DMatrix::from_element(self.len(), self.len(), Complex64::new(0.0, 0.0));
        for (e, c) in q.terms() {
            let c = c.to_complex();
            for col in 0..self.len() {
                for (key, v) in self.monomial_action(e, col) {
                    if let Some(&row) = self.lookup.get(&key) {
                        m[(row, col)] += c * v;
                    }
                }
            }
        }
        ToeplitzMatrix::new(BasisInfo::Landau { n: self.n(), cutoff: self.cutoff }, q.to_string(), m)
    }
}

/// Sparse columns of one kernel monomial on a Landau basis.
type SparseColumns = Vec<Vec<(usize, f64)>>;

/// Checks `(F𝒫)∘(G𝒫) = 𝒦[F,G]𝒫` at the matrix level for many pairs on one
/// truncated Landau basis, caching the sparse matrices of kernel monomials.
pub struct CompositionVerifier {
    basis: LandauBasis,
    margin: u32,
    interior: Vec<usize>,
    cache: Mutex<HashMap<Exponents, Arc<SparseColumns>>>,
}

impl CompositionVerifier {
    pub fn new(basis: &FockBasis, margin: u32) -> Result<Self, FockError> {
        if margin >= basis.cutoff() {
            return Err(FockError::MarginTooLarge { margin, cutoff: basis.cutoff(), degree: 0 });
        }
        let landau = LandauBasis::new(basis.weights(), basis.cutoff());
        let bound = basis.cutoff() - margin;
        let interior = (0..landau.len()).filter(|&i| landau.degree(i) <= bound).collect();
        Ok(Self { basis: landau, margin, interior, cache: Default::default() })
    }

    pub fn interior_len(&self) -> usize {
        self.interior.len()
    }

    fn columns(&self, e: &Exponents) -> Arc<SparseColumns> {
        if let Some(hit) = self.cache.lock().unwrap().get(e) {
            return hit.clone();
        }
        let cols: SparseColumns = (0..self.basis.len())
            .map(|col| {
                let mut entries: Vec<(usize, f64)> = self
                    .basis
                    .monomial_action(e, col)
                    .into_iter()
                    .filter_map(|(key, v)| self.basis.lookup.get(&key).map(|&row| (row, v)))
                    .collect();
                entries.sort_by_key(|x| x.0);
                entries
            })
            .collect();
        let cols = Arc::new(cols);
        self.cache.lock().unwrap().insert(e.clone(), cols.clone());
        cols
    }

    fn prepared(&self, q: &KernelPoly) -> Vec<(Complex64, Arc<SparseColumns>)> {
        q.terms().map(|(e, c)| (c.to_complex(), self.columns(e))).collect()
    }

    /// Operator norm of `M(F𝒫)·M(G𝒫) − M(𝒦[F,G]𝒫)` on the interior block.
    pub fn residual(&self, f: &KernelPoly, g: &KernelPoly) -> Result<f64, FockError> {
        let n = self.basis.n();
        for op in [f, g] {
            if op.n() != n {
                return Err(FockError::DimensionMismatch { expected: n, found: op.n() });
            }
            if op.degree() > self.margin {
                return Err(FockError::MarginTooLarge { margin: self.margin, cutoff: self.basis.cutoff, degree: op.degree() });
            }
        }
        let k = compose_k(&self.basis.weights, f, g)?;
        Ok(self.residual_with(f, g, &k))
    }

    /// Same as [`residual`](Self::residual) with a caller-supplied right-hand side.
    pub fn residual_with(&self, f: &KernelPoly, g: &KernelPoly, k: &KernelPoly) -> f64 {
        let bound = self.basis.cutoff - self.margin;
        let (fm, gm, km) = (self.prepared(f), self.prepared(g), self.prepared(k));
        let zero = Complex64::new(0.0, 0.0);
        let apply = |ops: &[(Complex64, Arc<SparseColumns>)], col: usize, scale: Complex64, out: &mut BTreeMap<usize, Complex64>| {
            for (c, cols) in ops {
                for &(row, v) in &cols[col] {
                    *out.entry(row).or_insert(zero) += scale * c * v;
                }
            }
        };
        let columns: Vec<Vec<(usize, Complex64)>> = self
            .interior
            .par_iter()
            .map(|&col| {
                let mut mid = BTreeMap::new();
                apply(&gm, col, Complex64::new(1.0, 0.0), &mut mid);
                let mut diff: BTreeMap<usize, Complex64> = BTreeMap::new();
                for (&row, &v) in &mid {
                    apply(&fm, row, v, &mut diff);
                }
                apply(&km, col, Complex64::new(-1.0, 0.0), &mut diff);
                diff.into_iter().filter(|&(r, x)| self.basis.degree(r) <= bound && x != zero).collect()
            })
            .collect();
        let mut entries = BTreeMap::new();
        for (&col, column) in self.interior.iter().zip(columns) {
            for (row, x) in column {
                entries.insert((row, col), x);
            }
        }
        block_operator_norm(&entries)
    }
}

/// Residual of the composition law on the interior block `|m|+|l| ≤ B − margin`
/// of the Landau basis with the cutoff of `basis`.
pub fn verify_composition(basis: &FockBasis, f: &KernelPoly, g: &KernelPoly, margin: u32) -> Result<f64, FockError> {
    CompositionVerifier::new(basis, margin)?.residual(f, g)
}

/// Every monomial of total degree `≤ max_degree` in `(z, z̄, z′, z̄′)`.
pub fn kernel_monomials(n: usize, max_degree: u32) -> Vec<KernelPoly> {
    MultiIndex::graded(4 * n, max_degree)
        .into_iter()
        .map(|e| KernelPoly::from_poly(n, crate::poly::Poly::monomial(e.0, GaussianRational::one())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn basis_enumeration() {
        let w1 = ModelWeights::from_ints(&[2]).unwrap();
        let b = fock_basis(&w1, 2).unwrap();
        assert_eq!(b.indices(), &[idx(&[0]), idx(&[1]), idx(&[2])]);
        let w2 = ModelWeights::from_ints(&[2, 3]).unwrap();
        assert_eq!(fock_basis(&w2, 1).unwrap().indices(), &[idx(&[0, 0]), idx(&[1, 0]), idx(&[0, 1])]);
        assert_eq!(fock_basis(&w2, 3).unwrap().len(), 10);
        assert_eq!(fock_basis(&w2, -1).unwrap_err(), FockError::NegativeCutoff(-1));
    }

    #[test]
    fn creation_entries() {
        let w = ModelWeights::new(vec![rat(3, 2), rat(5, 1)]).unwrap();
        let b = fock_basis(&w, 5).unwrap();
        for j in 0..2 {
            let t = toeplitz_monomial_matrix(&b, &MultiIndex::unit(2, j), &MultiIndex::zero(2)).unwrap();
            let a = w.to_f64()[j];
            for (col, beta) in b.indices().iter().enumerate() {
                let up = beta.plus(&MultiIndex::unit(2, j));
                if let Some(row) = b.index_of(&up) {
                    let expect = (2.0 * (beta.0[j] + 1) as f64 / a).sqrt();
                    assert!((t.get(row, col).re - expect).abs() < 1e-14);
                }
            }
            let nnz = t.data.iter().filter(|v| v.norm() > 0.0).count();
            assert_eq!(nnz, b.indices().iter().filter(|x| x.order() < 5).count());
        }
    }

    #[test]
    fn identity_and_number_operator() {
        let w = ModelWeights::new(vec![rat(7, 4)]).unwrap();
        let b = fock_basis(&w, 6).unwrap();
        let one = toeplitz_monomial_exact(&b, &idx(&[0]), &idx(&[0])).unwrap();
        for i in 0..b.len() {
            assert!(one.get(i, i).exact_eq(&Surd::rational(GaussianRational::one())));
        }
        let num = toeplitz_monomial_exact(&b, &idx(&[1]), &idx(&[1])).unwrap();
        assert_eq!(num.entries.len(), b.len());
        for (i, beta) in b.indices().iter().enumerate() {
            let expect = rat(8, 7) * Rational::from_integer((beta.0[0] + 1).into());
            assert!(num.get(i, i).exact_eq(&Surd::rational(GaussianRational::real(expect))));
        }
        assert!(num.is_hermitian_exact());
    }

    #[test]
    fn kernel_matrix_examples() {
        let w = ModelWeights::new(vec![rat(1, 1), rat(5, 2)]).unwrap();
        let n = 2;
        let b = fock_basis(&w, 6).unwrap();
        let id = kernel_operator_matrix(&b, &KernelPoly::one(n)).unwrap();
        assert!((id.data.clone() - DMatrix::identity(b.len(), b.len())).norm() < 1e-13);
        for j in 0..n {
            let q = kernel_operator_matrix(&b, &KernelPoly::zbarp(n, j)).unwrap();
            let t = toeplitz_monomial_matrix(&b, &MultiIndex::zero(n), &MultiIndex::unit(n, j)).unwrap();
            assert!((q.data - t.data).norm() < 1e-12);
        }
    }

    #[test]
    fn landau_lowest_level_matches_closed_form() {
        let w = ModelWeights::new(vec![rat(3, 2)]).unwrap();
        let b = fock_basis(&w, 8).unwrap();
        let landau = LandauBasis::new(&w, 8);
        let q = &(&KernelPoly::z(1, 0) * &KernelPoly::zbar(1, 0)) + &(&KernelPoly::zp(1, 0) * &KernelPoly::zbarp(1, 0)).scale(&GaussianRational::i());
        let closed = kernel_operator_matrix(&b, &q).unwrap();
        let full = landau.kernel_matrix(&q);
        for (i, bi) in b.indices().iter().enumerate() {
            for (j, bj) in b.indices().iter().enumerate() {
                let li = landau.index_of(&idx(&[0]), bi).unwrap();
                let lj = landau.index_of(&idx(&[0]), bj).unwrap();
                if bi.order() + 2 <= 8 && bj.order() + 2 <= 8 {
                    assert!((closed.get(i, j) - full.get(li, lj)).norm() < 1e-12, "{i},{j}");
                }
            }
        }
    }

    #[test]
    fn composition_residuals() {
        let w = ModelWeights::from_ints(&[2]).unwrap();
        let b = fock_basis(&w, 16).unwrap();
        let one = KernelPoly::one(1);
        assert_eq!(verify_composition(&b, &one, &one, 4).unwrap(), 0.0);
        let r = verify_composition(&b, &KernelPoly::z(1, 0), &KernelPoly::zbar(1, 0), 4).unwrap();
        assert!(r <= 1e-10, "{r}");
        assert!(matches!(verify_composition(&b, &one, &one, 16), Err(FockError::MarginTooLarge { .. })));
    }
}
