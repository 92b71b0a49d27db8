//! Kernel composition checked on truncated matrices, and Toeplitz matrices on the model space.

use btq::fock::{fock_basis, kernel_monomials, toeplitz_monomial_exact, CompositionVerifier};
use btq::kernel::{ModelWeights, MultiIndex};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let w = ModelWeights::from_ints(&[2])?;
    let basis = fock_basis(&w, 4)?;
    let t = toeplitz_monomial_exact(&basis, &MultiIndex(vec![1]), &MultiIndex(vec![1]))?;
    println!("T_(|z|^2) on |b| <= 4, exact entries:");
    for i in 0..basis.len() {
        println!("  [{i},{i}] = {}", t.get(i, i).to_complex().re);
    }

    let basis = fock_basis(&w, 16)?;
    let verifier = CompositionVerifier::new(&basis, 4)?;
    let mono = kernel_monomials(1, 2);
    let mut worst = 0f64;
    for f in &mono {
        for g in &mono {
            worst = worst.max(verifier.residual(f, g)?);
        }
    }
    println!("{} monomial pairs, interior dimension {}, max residual {worst:.3e}", mono.len().pow(2), verifier.interior_len());
    Ok(())
}
