//! Operator norms of sphere Toeplitz operators approach the sup norm.

use btq::asymptotics::{fit_power_law, richardson_extrapolate, ExperimentRecord};
use btq::matrix::operator_norm;
use btq::sphere::{sup_norm, toeplitz_sphere, SphereSymbol};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = SphereSymbol::parse("x1")?;
    let sup = sup_norm(&f);
    let mut norms = Vec::new();
    let mut defects = Vec::new();
    for p in [8u32, 16, 32, 64, 128] {
        let norm = operator_norm(&toeplitz_sphere(&f, p as i64)?.data);
        println!("p = {p:>3}  |T| = {norm:.12}  defect = {:.6e}", sup - norm);
        norms.push(ExperimentRecord::new("norm", p, norm));
        defects.push(ExperimentRecord::new("defect", p, sup - norm));
    }
    let fit = fit_power_law(&defects)?;
    println!("defect ~ {:.4} p^-{:.4} (smallest p dropped: {})", fit.amplitude, fit.rate, fit.dropped_smallest);
    println!("Richardson limit {:.8}, sup {sup}", richardson_extrapolate(&norms, 1)?);
    Ok(())
}
