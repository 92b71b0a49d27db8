use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::{KernelError, ModelWeights, MultiIndex};
use crate::exact::{rat_to_string, Rational};

/// `𝒫(Z,Z′) = Π(a_i/2π)·exp(−¼Σa_i(|z_i|²+|z′_i|²−2z_i z̄′_i))`.
pub fn model_kernel_eval(w: &ModelWeights, z: &[f64], zp: &[f64]) -> Complex64 {
    let a = w.to_f64();
    assert!(z.len() == 2 * a.len() && zp.len() == 2 * a.len(), "points must lie in R^2n");
    let mut prefactor = 1.0;
    let mut exponent = Complex64::new(0.0, 0.0);
    for (j, &aj) in a.iter().enumerate() {
        let zj = Complex64::new(z[2 * j], z[2 * j + 1]);
        let zpj = Complex64::new(zp[2 * j], zp[2 * j + 1]);
        prefactor *= aj / (2.0 * PI);
        exponent += aj * (zj.norm_sqr() + zpj.norm_sqr() - 2.0 * zj * zpj.conj());
    }
    prefactor * (-exponent / 4.0).exp()
}

/// `‖z^β e^{−¼Σa|z|²}‖⁻² = a^β Πa_i / ((2π)ⁿ 2^{|β|} β!)`, the squared
/// normalization constant of `φ_β`.
pub fn phi_norm_sqr(w: &ModelWeights, beta: &MultiIndex) -> f64 {
    let a = w.to_f64();
    let mut c = 1.0;
    for (j, &b) in beta.entries().iter().enumerate() {
        c *= a[j] / (2.0 * PI);
        for k in 1..=b {
            c *= a[j] / (2.0 * k as f64);
        }
    }
    c
}

/// The orthonormal basis element `φ_β` of `ker ℒ` evaluated at `Z ∈ ℝ²ⁿ`.
pub fn phi_beta_eval(w: &ModelWeights, beta: &MultiIndex, z: &[f64]) -> Complex64 {
    let a = w.to_f64();
    assert_eq!(beta.len(), a.len());
    assert_eq!(z.len(), 2 * a.len());
    let mut value = Complex64::new(phi_norm_sqr(w, beta).sqrt(), 0.0);
    let mut gauss = 0.0;
    for (j, &b) in beta.entries().iter().enumerate() {
        let zj = Complex64::new(z[2 * j], z[2 * j + 1]);
        value *= zj.powu(b);
        gauss += a[j] * zj.norm_sqr();
    }
    value * (-gauss / 4.0).exp()
}

/// Distinct eigenvalues `2Σα_i a_i ≤ cutoff` of `ℒ`, ascending.
pub fn spectrum(w: &ModelWeights, cutoff: &Rational) -> Result<Vec<Rational>, KernelError> {
    if cutoff.is_negative() {
        return Err(KernelError::NegativeCutoff(rat_to_string(cutoff)));
    }
    let mut out = BTreeSet::new();
    let two = Rational::from_integer(2.into());
    let steps: Vec<Rational> = w.a().iter().map(|a| a * &two).collect();
    enumerate_levels(&steps, 0, Rational::zero(), cutoff, &mut out);
    Ok(out.into_iter().collect())
}

fn enumerate_levels(steps: &[Rational], pos: usize, acc: Rational, cutoff: &Rational, out: &mut BTreeSet<Rational>) {
    if pos == steps.len() {
        out.insert(acc);
        return;
    }
    let mut cur = acc;
    while &cur <= cutoff {
        enumerate_levels(steps, pos + 1, cur.clone(), cutoff, out);
        cur += &steps[pos];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    #[test]
    fn kernel_values() {
        // a = 2π makes the prefactor one; the weight is irrational so build it in floats
        let w = ModelWeights::new(vec![Rational::from_float(2.0 * PI).unwrap()]).unwrap();
        let v = model_kernel_eval(&w, &[0.0, 0.0], &[0.0, 0.0]);
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let w = ModelWeights::from_ints(&[2]).unwrap();
        let v = model_kernel_eval(&w, &[1.0, 0.0], &[0.0, 0.0]);
        assert!((v.re - (-0.5f64).exp() / PI).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn kernel_hermitian() {
        let w = ModelWeights::new(vec![rat(1, 2), rat(3, 2)]).unwrap();
        let z = [0.3, -0.7, 1.1, 0.2];
        let zp = [-0.4, 0.5, 0.9, -1.3];
        let a = model_kernel_eval(&w, &z, &zp);
        let b = model_kernel_eval(&w, &zp, &z);
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn phi_values() {
        let w = ModelWeights::new(vec![Rational::from_float(2.0 * PI).unwrap()]).unwrap();
        let v = phi_beta_eval(&w, &MultiIndex(vec![0]), &[0.0, 0.0]);
        assert!((v.re - 1.0).abs() < 1e-14);
        let w = ModelWeights::from_ints(&[2, 3]).unwrap();
        assert_eq!(phi_beta_eval(&w, &MultiIndex(vec![1, 0]), &[0.0; 4]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn spectrum_examples() {
        let w = ModelWeights::from_ints(&[2, 6]).unwrap();
        assert_eq!(spectrum(&w, &rat_int(10)).unwrap(), vec![rat_int(0), rat_int(4), rat_int(8)]);
        assert_eq!(spectrum(&w, &rat_int(0)).unwrap(), vec![rat_int(0)]);
        assert!(spectrum(&w, &rat_int(-1)).is_err());
        let w = ModelWeights::new(vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(spectrum(&w, &rat_int(3)).unwrap(), vec![rat_int(0), rat_int(1), rat_int(2), rat_int(3)]);
    }
}
