use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{poisson_sphere, sup_norm, SphereError, SphereSymbol, D_MAX};
use crate::exact::{GaussianRational, Rational, Surd};
use crate::matrix::{commutator, operator_norm, BasisInfo, ExactMatrix, ToeplitzMatrix};
use crate::poly::Poly;

/// Squared norms `‖s_k‖² = k!(p−k)!/(p+1)!` of the monomial sections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionBasis {
    pub p: u32,
    pub norms: Vec<Rational>,
}

fn check_power(p: i64) -> Result<u32, SphereError> {
    if p < 1 || p > u32::MAX as i64 {
        return Err(SphereError::InvalidPower(p));
    }
    Ok(p as u32)
}

fn factorials(upto: u32) -> Vec<BigInt> {
    let mut f = vec![BigInt::one()];
    for i in 1..=upto {
        let next = &f[i as usize - 1] * BigInt::from(i);
        f.push(next);
    }
    f
}

pub fn section_norms(p: i64) -> Result<SectionBasis, SphereError> {
    let p = check_power(p)?;
    let f = factorials(p + 1);
    let norms = (0..=p as usize)
        .map(|k| Rational::new(&f[k] * &f[p as usize - k], f[p as usize + 1].clone()))
        .collect();
    Ok(SectionBasis { p, norms })
}

fn ln_factorials(upto: u32) -> Vec<f64> {
    let mut out = vec![0.0];
    for i in 1..=upto {
        out.push(out[i as usize - 1] + (i as f64).ln());
    }
    out
}

/// `Σ_{k∈I} (p+1)·C(p,k)·((1−x₃)/2)^k ((1+x₃)/2)^{p−k}`, i.e. the Bergman
/// density `Σ |s_k|²_h/‖s_k‖²` restricted to the index set `I`.
pub(crate) fn bergman_partial(p: u32, x: [f64; 3], indices: impl Iterator<Item = usize>) -> f64 {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let x3 = (x[2] / r).clamp(-1.0, 1.0);
    let s = (1.0 - x3) / 2.0;
    let c = (1.0 + x3) / 2.0;
    let lf = ln_factorials(p);
    let mut acc = 0.0;
    for k in indices {
        let w = if s == 0.0 {
            if k == 0 { 1.0 } else { 0.0 }
        } else if c == 0.0 {
            if k == p as usize { 1.0 } else { 0.0 }
        } else {
            let ln_binom = lf[p as usize] - lf[k] - lf[p as usize - k];
            (ln_binom + k as f64 * s.ln() + (p as usize - k) as f64 * c.ln()).exp()
        };
        acc += w;
    }
    (p + 1) as f64 * acc
}

/// `Σ_k |s_k(x)|²_h / ‖s_k‖²` at `x ∈ S²`; identically `p + 1`.
pub fn bergman_diag(p: i64, x: [f64; 3]) -> Result<f64, SphereError> {
    let p = check_power(p)?;
    Ok(bergman_partial(p, x, 0..=p as usize))
}

/// Chart form of `x₁^a x₂^b x₃^c`: numerator polynomial in `(z, z̄)` over
/// `(1+|z|²)^{a+b+c}`.
fn chart_monomial(a: u32, b: u32, c: u32) -> Poly {
    let z = Poly::var(2, 0);
    let zb = Poly::var(2, 1);
    let x1 = &z + &zb;
    let x2 = (&z - &zb).scale(&GaussianRational::i());
    let x3 = &Poly::one(2) - &(&z * &zb);
    &(&x1.pow(a) * &x2.pow(b)) * &x3.pow(c)
}

/// Exact entries `⟨s_j, f s_k⟩ / √(‖s_j‖²‖s_k‖²)`.
///
/// A chart term `z^α z̄^β (1+|z|²)^{−d}` links `k` to `j = k + α − β` through
/// the Beta integral `∫ |z|^{2m}(1+|z|²)^{−(p+d+2)} dxdy/π = m!(p+d−m)!/(p+d+1)!`
/// with `m = k + α`; the entry is stored as `(B/‖s_j‖²)·√(‖s_j‖²/‖s_k‖²)`.
pub fn toeplitz_sphere_exact(f: &SphereSymbol, p: i64) -> Result<ExactMatrix, SphereError> {
    let p = check_power(p)?;
    f.check_degree(D_MAX)?;
    let fact = factorials(p + D_MAX + 1);
    let pu = p as usize;
    let norm = |j: usize| Rational::new(&fact[j] * &fact[pu - j], fact[pu + 1].clone());
    let mut coefs: BTreeMap<(usize, usize), GaussianRational> = BTreeMap::new();
    for (e, c) in f.poly().terms() {
        let d = (e[0] + e[1] + e[2]) as usize;
        let chart = chart_monomial(e[0], e[1], e[2]);
        for (ce, cc) in chart.terms() {
            let coef = c * cc;
            let (alpha, beta) = (ce[0] as usize, ce[1] as usize);
            for k in 0..=pu {
                let Some(j) = (k + alpha).checked_sub(beta) else { continue };
                if j > pu {
                    continue;
                }
                let m = k + alpha;
                // B(m+1, p+d+1−m) / ‖s_j‖²
                let ratio = Rational::new(
                    &fact[m] * &fact[pu + d - m] * &fact[pu + 1],
                    &fact[pu + d + 1] * &fact[j] * &fact[pu - j],
                );
                let slot = coefs.entry((j, k)).or_insert_with(GaussianRational::zero);
                *slot += &coef.scale(&ratio);
            }
        }
    }
    let mut out = ExactMatrix::new(pu + 1);
    for ((j, k), c) in coefs {
        if c.is_zero() {
            continue;
        }
        let radicand = norm(j) / norm(k);
        out.entries.insert((j, k), Surd::new(c, radicand));
    }
    Ok(out)
}

pub fn toeplitz_sphere(f: &SphereSymbol, p: i64) -> Result<ToeplitzMatrix, SphereError> {
    let exact = toeplitz_sphere_exact(f, p)?;
    Ok(ToeplitzMatrix::new(BasisInfo::Sphere { p: p as u32 }, f.to_string(), exact.to_dense()))
}

fn require_real(f: &SphereSymbol) -> Result<(), SphereError> {
    if !f.is_real() {
        return Err(SphereError::NotReal(f.to_string()));
    }
    Ok(())
}

/// `‖[T_f, T_g] − (i/p) T_{{f,g}}‖`.
pub fn commutator_residual(f: &SphereSymbol, g: &SphereSymbol, p: i64) -> Result<f64, SphereError> {
    require_real(f)?;
    require_real(g)?;
    let bracket = poisson_sphere(f, g);
    let tf = toeplitz_sphere(f, p)?;
    let tg = toeplitz_sphere(g, p)?;
    let tb = toeplitz_sphere(&bracket, p)?;
    let scale = Complex64::new(0.0, 1.0 / p as f64);
    let m = commutator(&tf.data, &tg.data) - tb.data * scale;
    Ok(operator_norm(&m))
}

/// `‖T_f T_g − T_{fg}‖`.
pub fn product_residual(f: &SphereSymbol, g: &SphereSymbol, p: i64) -> Result<f64, SphereError> {
    let fg = f.mul(g);
    fg.check_degree(D_MAX)?;
    let tf = toeplitz_sphere(f, p)?;
    let tg = toeplitz_sphere(g, p)?;
    let tfg = toeplitz_sphere(&fg, p)?;
    Ok(operator_norm(&(tf.data * tg.data - tfg.data)))
}

/// `‖f‖_∞ − ‖T_{f,p}‖`.
pub fn norm_defect(f: &SphereSymbol, p: i64) -> Result<f64, SphereError> {
    require_real(f)?;
    let t = toeplitz_sphere(f, p)?;
    Ok(sup_norm(f) - operator_norm(&t.data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use nalgebra::DMatrix;

    fn s(text: &str) -> SphereSymbol {
        SphereSymbol::parse(text).unwrap()
    }

    #[test]
    fn norms() {
        assert_eq!(section_norms(1).unwrap().norms, vec![rat(1, 2), rat(1, 2)]);
        let b = section_norms(9).unwrap();
        for k in 0..=9 {
            assert_eq!(b.norms[k], b.norms[9 - k]);
        }
        assert!(section_norms(0).is_err());
    }

    #[test]
    fn bergman_constant() {
        assert!((bergman_diag(5, [0.0, 0.0, 1.0]).unwrap() - 6.0).abs() < 1e-12);
        assert!((bergman_diag(5, [0.0, 0.0, -1.0]).unwrap() - 6.0).abs() < 1e-12);
        assert!((bergman_diag(64, [0.6, 0.0, 0.8]).unwrap() - 65.0).abs() < 1e-10);
    }

    #[test]
    fn closed_forms() {
        let one = toeplitz_sphere(&SphereSymbol::one(), 6).unwrap();
        assert!((one.data - DMatrix::identity(7, 7)).norm() < 1e-15);
        for p in [1i64, 4, 11] {
            let t = toeplitz_sphere_exact(&s("x3"), p).unwrap();
            assert_eq!(t.entries.len(), (0..=p).filter(|&k| p != 2 * k).count());
            for k in 0..=p as usize {
                let expect = Rational::new((p - 2 * k as i64).into(), (p + 2).into());
                if expect.is_zero() {
                    assert!(t.get(k, k).is_zero());
                } else {
                    assert!(t.get(k, k).exact_eq(&Surd::rational(GaussianRational::real(expect))));
                }
            }
            assert!((operator_norm(&t.to_dense()) - p as f64 / (p + 2) as f64).abs() < 1e-14);
        }
        let t = toeplitz_sphere_exact(&s("x1"), 1).unwrap();
        let third = Surd::rational(GaussianRational::real(rat(1, 3)));
        assert!(t.get(0, 1).exact_eq(&third) && t.get(1, 0).exact_eq(&third));
        assert!(t.get(0, 0).is_zero() && t.get(1, 1).is_zero());
    }

    #[test]
    fn hermitian_and_contractive() {
        for f in ["x1", "x2*x3 + x1^2", "x1^3*x2 - x3", "2*x2^4 - x1*x3"] {
            let f = SphereSymbol::parse(f).unwrap();
            let t = toeplitz_sphere_exact(&f, 7).unwrap();
            assert!(t.is_hermitian_exact());
            assert!(operator_norm(&t.to_dense()) <= sup_norm(&f) + 1e-12);
        }
        assert!(toeplitz_sphere(&s("x1^5"), 3).is_err());
    }

    #[test]
    fn reflection_equivariance() {
        let p = 9;
        let t = toeplitz_sphere(&s("x3"), p).unwrap().data;
        let minus = toeplitz_sphere(&s("-x3"), p).unwrap().data;
        let n = p as usize + 1;
        let flip = DMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        assert!((&flip * t * &flip - minus).norm() < 1e-14);
    }

    #[test]
    fn residual_basics() {
        let x1 = s("x1");
        assert_eq!(commutator_residual(&x1, &x1, 8).unwrap(), 0.0);
        assert_eq!(commutator_residual(&s("3/2"), &s("x2"), 8).unwrap(), 0.0);
        assert_eq!(product_residual(&SphereSymbol::one(), &x1, 8).unwrap(), 0.0);
        // the fuzzy-sphere relation gives a closed form
        for p in [8i64, 16] {
            let r = commutator_residual(&x1, &s("x2"), p).unwrap();
            assert!((r - 4.0 / ((p + 2) * (p + 2)) as f64).abs() < 1e-13);
        }
        let r8 = product_residual(&x1, &s("x2"), 8).unwrap();
        let r16 = product_residual(&x1, &s("x2"), 16).unwrap();
        assert!(r16 > 0.0 && r16 < r8);
        assert!(commutator_residual(&s("i*x1"), &x1, 8).is_err());
        let d = norm_defect(&s("x3"), 10).unwrap();
        assert!((d - 2.0 / 12.0).abs() < 1e-12);
        assert!(norm_defect(&SphereSymbol::one(), 10).unwrap().abs() < 1e-14);
    }
}
