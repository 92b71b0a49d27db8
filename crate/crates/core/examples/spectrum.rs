//! Levels of the model operator, exactly and from a brute-force matrix.

use btq::exact::{rat_to_string, Rational};
use btq::kernel::{spectrum, ModelWeights};
use btq::oracle::spectrum_bruteforce;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let w = ModelWeights::from_ints(&[2, 6])?;
    let cutoff = Rational::from_integer(30.into());
    let exact = spectrum(&w, &cutoff)?;
    let shown: Vec<String> = exact.iter().map(rat_to_string).collect();
    println!("exact      : {}", shown.join(", "));
    let brute = spectrum_bruteforce(&w, 8, 30.0);
    let shown: Vec<String> = brute.iter().map(|v| format!("{v:.10}")).collect();
    println!("brute force: {}", shown.join(", "));
    Ok(())
}
