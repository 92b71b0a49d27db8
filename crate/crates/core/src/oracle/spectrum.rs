use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::kernel::{ModelWeights, MultiIndex};

/// Eigenvalues `≤ cutoff` of `ℒ` on the span of `z^P z̄^Q e^{−¼Σa|z|²}`,
/// `|P|+|Q| ≤ degree`, from a dense Schur decomposition.
///
/// `ℒ_j(z^P z̄^Q e) = 2a_j Q_j z^P z̄^Q e − 4P_j Q_j z^{P−e_j} z̄^{Q−e_j} e`, so
/// the subspace is invariant.
pub fn spectrum_bruteforce(w: &ModelWeights, degree: u32, cutoff: f64) -> Vec<f64> {
    let n = w.n();
    let a = w.to_f64();
    let basis = MultiIndex::graded(2 * n, degree);
    let lookup: HashMap<&[u32], usize> = basis.iter().enumerate().map(|(i, b)| (b.entries(), i)).collect();
    let dim = basis.len();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (col, e) in basis.iter().enumerate() {
        for j in 0..n {
            let (p, q) = (e.0[j], e.0[n + j]);
            m[(col, col)] += 2.0 * a[j] * q as f64;
            if p > 0 && q > 0 {
                let mut lower = e.0.clone();
                lower[j] -= 1;
                lower[n + j] -= 1;
                let row = lookup[lower.as_slice()];
                m[(row, col)] -= 4.0 * (p * q) as f64;
            }
        }
    }
    let mut eig: Vec<f64> = m.complex_eigenvalues().iter().map(|c| c.re).filter(|&v| v <= cutoff + 1e-9).collect();
    eig.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for v in eig {
        if out.last().is_none_or(|&last| (v - last).abs() > 1e-8) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_levels() {
        let w = ModelWeights::from_ints(&[3]).unwrap();
        let e = spectrum_bruteforce(&w, 8, 20.0);
        assert_eq!(e.len(), 4);
        for (v, expect) in e.iter().zip([0.0, 6.0, 12.0, 18.0]) {
            assert!((v - expect).abs() < 1e-8);
        }
    }
}
