//! Toeplitz operators on invariant sections of the Z_k football.

use btq::harness::u_power_real;
use btq::orbifold::{invariant_basis, orbifold_commutator_residual, orbifold_toeplitz};
use btq::sphere::SphereSymbol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = SphereSymbol::parse("x3")?;
    for k in [2u32, 3] {
        let g = u_power_real(k);
        println!("k = {k}, g = {g}");
        let small = invariant_basis(k, 6, 0)?;
        let t = orbifold_toeplitz(&g, &small)?;
        println!("  T_g at p = 6 on sections {:?}:", small.indices);
        for i in 0..t.dim() {
            let row: Vec<String> = (0..t.dim()).map(|j| format!("{:8.5}", t.get(i, j).re)).collect();
            println!("    {}", row.join(" "));
        }
        for p in [8i64, 16, 32, 64, 128] {
            let data = invariant_basis(k, p, 0)?;
            let r = orbifold_commutator_residual(&f, &g, &data)?;
            println!("  p = {p:>3}  residual {r:.6e}  p^2 residual {:.4}", r * (p * p) as f64);
        }
    }
    Ok(())
}
