//! Bergman density of O(p) on the sphere and on the Z_k quotients.

use btq::orbifold::{invariant_basis, orbifold_bergman_diag, orbifold_bergman_group_sum};
use btq::sphere::bergman_diag;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = [0.48, -0.6, 0.64];
    for p in [4i64, 16, 64] {
        println!("sphere p = {p:>2}: B = {:.12}", bergman_diag(p, x)?);
    }
    let p = 64;
    for k in [2u32, 3, 5] {
        let data = invariant_basis(k, p, 0)?;
        let equator = orbifold_bergman_diag(&data, [1.0, 0.0, 0.0]);
        let north = orbifold_bergman_diag(&data, [0.0, 0.0, 1.0]);
        let via_group = orbifold_bergman_group_sum(&data, [1.0, 0.0, 0.0]);
        println!(
            "k = {k}: {} invariant sections, equator {equator:.6} (group sum {via_group:.6}), north pole / (p+1) = {:.6}",
            data.indices.len(),
            north / (p + 1) as f64
        );
    }
    Ok(())
}
