//! The antisymmetrized first coefficient against the Poisson bracket on random jets.

use btq::exact::GaussianRational;
use btq::harness::{random_jet, random_weights};
use btq::kernel::{c1_antisymmetric, poisson_at_point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3 {
        let w = random_weights(&mut rng, n);
        let f = random_jet(&mut rng, n, 2);
        let g = random_jet(&mut rng, n, 2);
        let lhs = c1_antisymmetric(&w, &f, &g)?;
        let rhs = &GaussianRational::i() * &poisson_at_point(&w, &f, &g)?;
        println!("n = {n}, a = {w}");
        println!("  C1(f,g) - C1(g,f) = {lhs}");
        println!("  i {{f,g}}          = {rhs}");
        assert_eq!(lhs, rhs);
    }
    Ok(())
}
