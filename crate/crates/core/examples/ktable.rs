//! Composition identities of the kernel calculus for two coordinates.

use btq::exact::rat;
use btq::kernel::{compose_k, KernelPoly, ModelWeights};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let w = ModelWeights::new(vec![rat(3, 2), rat(5, 1)])?;
    let n = w.n();
    let one = KernelPoly::one(n);
    let cases = [
        ("K[1, zbar1]", one.clone(), KernelPoly::zbar(n, 0)),
        ("K[1, z2]", one.clone(), KernelPoly::z(n, 1)),
        ("K[z1, zbar2]", KernelPoly::z(n, 0), KernelPoly::zbar(n, 1)),
        ("K[zbar2, z1]", KernelPoly::zbar(n, 1), KernelPoly::z(n, 0)),
        ("K[zbar'1, z1]", KernelPoly::zbarp(n, 0), KernelPoly::z(n, 0)),
        ("K[zbar'2, z1]", KernelPoly::zbarp(n, 1), KernelPoly::z(n, 0)),
    ];
    println!("weights {w}");
    for (name, f, g) in cases {
        println!("{name:>14} = {}", compose_k(&w, &f, &g)?);
    }
    // second-order terms come out of the same routine
    let f = &KernelPoly::zbarp(n, 0) * &KernelPoly::zbarp(n, 0);
    let g = &KernelPoly::z(n, 0) * &KernelPoly::z(n, 0);
    println!("{:>14} = {}", "K[zbar'1^2, z1^2]", compose_k(&w, &f, &g)?);
    Ok(())
}
