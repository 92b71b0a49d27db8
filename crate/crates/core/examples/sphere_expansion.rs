//! Commutator and product residuals on the sphere.

use btq::asymptotics::{fit_power_law, ExperimentRecord};
use btq::sphere::{commutator_residual, poisson_sphere, product_residual, SphereSymbol};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = SphereSymbol::parse("x1")?;
    let g = SphereSymbol::parse("x2")?;
    println!("{{{f}, {g}}} = {}", poisson_sphere(&f, &g));
    let grid = [8u32, 16, 32, 64, 128];
    let mut comm = Vec::new();
    let mut prod = Vec::new();
    for &p in &grid {
        let c = commutator_residual(&f, &g, p as i64)?;
        let q = product_residual(&f, &g, p as i64)?;
        println!("p = {p:>3}  commutator {c:.6e} (p^2: {:.4})  product {q:.6e} (p: {:.4})", c * (p * p) as f64, q * p as f64);
        comm.push(ExperimentRecord::new("commutator", p, c));
        prod.push(ExperimentRecord::new("product", p, q));
    }
    println!("commutator rate {:.4}", fit_power_law(&comm)?.rate);
    println!("product rate {:.4}", fit_power_law(&prod)?.rate);
    Ok(())
}
