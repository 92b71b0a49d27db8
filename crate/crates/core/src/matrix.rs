//! Dense complex matrices of quantized operators, their norms and exports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::exact::Surd;

/// Which quantum space a matrix lives on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisInfo {
    /// `ker ℒ` on ℂⁿ truncated at total degree `cutoff`.
    Fock { n: usize, cutoff: u32 },
    /// All Landau levels on ℂⁿ truncated at total degree `cutoff`.
    Landau { n: usize, cutoff: u32 },
    /// `H⁰(ℂP¹, O(p))`.
    Sphere { p: u32 },
    /// ℤₖ-invariant sections of `O(p)` on ℂP¹.
    Orbifold { k: u32, p: u32, indices: Vec<usize> },
}

impl BasisInfo {
    pub fn describe(&self) -> String {
        match self {
            BasisInfo::Fock { n, cutoff } => format!("fock(n={n},B={cutoff})"),
            BasisInfo::Landau { n, cutoff } => format!("landau(n={n},B={cutoff})"),
            BasisInfo::Sphere { p } => format!("cp1(p={p})"),
            BasisInfo::Orbifold { k, p, .. } => format!("cp1/Z{k}(p={p})"),
        }
    }
}

/// Matrix of `P f P` (or of a kernel operator) in an orthonormal basis.
#[derive(Debug, Clone)]
pub struct ToeplitzMatrix {
    pub basis: BasisInfo,
    pub symbol: String,
    pub data: DMatrix<Complex64>,
}

impl ToeplitzMatrix {
    pub fn new(basis: BasisInfo, symbol: impl Into<String>, data: DMatrix<Complex64>) -> Self {
        Self { basis, symbol: symbol.into(), data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        is_hermitian(&self.data, tol)
    }

    /// Row-major CSV, one `"re,im"` cell per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.data.nrows() {
            let row: Vec<String> = (0..self.data.ncols())
                .map(|j| {
                    let v = self.data[(i, j)];
                    format!("\"{:.16e},{:.16e}\"", v.re, v.im)
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.data.nrows())
            .map(|i| {
                Value::Array(
                    (0..self.data.ncols())
                        .map(|j| {
                            let v = self.data[(i, j)];
                            json!([v.re, v.im])
                        })
                        .collect(),
                )
            })
            .collect();
        json!({ "basis": self.basis.describe(), "symbol": self.symbol, "dim": self.dim(), "entries": rows })
    }
}

/// Sparse matrix with exact surd entries.
#[derive(Debug, Clone, Default)]
pub struct ExactMatrix {
    pub dim: usize,
    pub entries: BTreeMap<(usize, usize), Surd>,
}

impl ExactMatrix {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: BTreeMap::new() }
    }

    pub fn get(&self, i: usize, j: usize) -> Surd {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Surd::zero)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, Complex64::new(0.0, 0.0));
        for (&(i, j), v) in &self.entries {
            m[(i, j)] = v.to_complex();
        }
        m
    }

    /// `M_{ij} = conj(M_{ji})` checked entry by entry in exact arithmetic.
    pub fn is_hermitian_exact(&self) -> bool {
        self.entries.iter().all(|(&(i, j), v)| v.conj().exact_eq(&self.get(j, i)))
            && self.entries.keys().all(|&(i, j)| self.entries.contains_key(&(j, i)) || self.get(i, j).is_zero())
    }
}

pub fn is_hermitian(m: &DMatrix<Complex64>, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let n = m.nrows();
    (0..n).all(|i| (0..=i).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

/// Largest singular value; the spectral radius when `m` is Hermitian.
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
        return 0.0;
    }
    let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if m.nrows() == m.ncols() && is_hermitian(m, 1e-14 * scale) {
        let h = (m + m.adjoint()).scale(0.5);
        let eig = h.symmetric_eigenvalues();
        return eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
    }
    let sv = m.clone().singular_values();
    sv.iter().copied().fold(0.0, f64::max)
}

/// Operator norm of a matrix given by its nonzero entries, splitting it into
/// independent blocks (connected components of the row/column incidence
/// graph) before taking singular values.
pub fn block_operator_norm(entries: &BTreeMap<(usize, usize), Complex64>) -> f64 {
    if entries.is_empty() {
        return 0.0;
    }
    // union-find over rows (even ids) and columns (odd ids)
    let mut ids: BTreeMap<(bool, usize), usize> = BTreeMap::new();
    for &(i, j) in entries.keys() {
        let len = ids.len();
        ids.entry((false, i)).or_insert(len);
        let len = ids.len();
        ids.entry((true, j)).or_insert(len);
    }
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for &(i, j) in entries.keys() {
        let a = find(&mut parent, ids[&(false, i)]);
        let b = find(&mut parent, ids[&(true, j)]);
        if a != b {
            parent[a] = b;
        }
    }
    let mut blocks: BTreeMap<usize, Vec<(usize, usize, Complex64)>> = BTreeMap::new();
    for (&(i, j), &v) in entries {
        let root = find(&mut parent, ids[&(false, i)]);
        blocks.entry(root).or_default().push((i, j, v));
    }
    let mut best = 0.0f64;
    for block in blocks.values() {
        let rows: BTreeMap<usize, usize> = block.iter().map(|e| e.0).collect::<std::collections::BTreeSet<_>>().into_iter().enumerate().map(|(k, r)| (r, k)).collect();
        let cols: BTreeMap<usize, usize> = block.iter().map(|e| e.1).collect::<std::collections::BTreeSet<_>>().into_iter().enumerate().map(|(k, c)| (c, k)).collect();
        let mut m = DMatrix::from_element(rows.len(), cols.len(), Complex64::new(0.0, 0.0));
        for &(i, j, v) in block {
            m[(rows[&i], cols[&j])] = v;
        }
        let norm = if m.nrows() == 1 || m.ncols() == 1 {
            m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
        } else {
            m.singular_values().iter().copied().fold(0.0, f64::max)
        };
        best = best.max(norm);
    }
    best
}

pub fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b - b * a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norm() {
        let m = DMatrix::<Complex64>::identity(7, 7);
        assert!((operator_norm(&m) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_norm() {
        // nilpotent Jordan block scaled by 3
        let mut m = DMatrix::from_element(3, 3, Complex64::new(0.0, 0.0));
        m[(0, 1)] = Complex64::new(3.0, 0.0);
        m[(1, 2)] = Complex64::new(0.0, 2.0);
        assert!((operator_norm(&m) - 3.0).abs() < 1e-12);
        let entries: BTreeMap<(usize, usize), Complex64> = [((0, 1), m[(0, 1)]), ((1, 2), m[(1, 2)])].into_iter().collect();
        assert!((block_operator_norm(&entries) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn block_norm_matches_dense() {
        let mut entries = BTreeMap::new();
        let vals = [(0, 0, 1.0, 0.5), (0, 2, -0.3, 0.0), (2, 0, 0.7, -0.1), (1, 1, 2.0, 0.0), (3, 3, 0.2, 0.2)];
        let mut dense = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
        for &(i, j, re, im) in &vals {
            entries.insert((i, j), Complex64::new(re, im));
            dense[(i, j)] = Complex64::new(re, im);
        }
        let a = block_operator_norm(&entries);
        let b = dense.singular_values().max();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn csv_cells() {
        let m = ToeplitzMatrix::new(BasisInfo::Sphere { p: 1 }, "1", DMatrix::<Complex64>::identity(2, 2));
        let csv = m.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("\"1.0000000000000000e0,0.0000000000000000e0\","));
    }
}
