use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::SphereError;
use crate::exact::{rat_to_string, GaussianRational, Rational};
use crate::parse::parse_polynomial;
use crate::poly::Poly;

/// Maximum symbol degree accepted by the Toeplitz layer.
pub const D_MAX: u32 = 4;

/// Polynomial in the ambient coordinates `(x₁, x₂, x₃)` of `S² ⊂ ℝ³`, stored
/// in the normal form where `x₃` appears at most linearly (every `x₃²` is
/// rewritten as `1 − x₁² − x₂²`), so two symbols agree on the sphere iff they
/// are equal as stored polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereSymbol {
    poly: Poly,
}

impl SphereSymbol {
    pub fn from_poly(poly: Poly) -> Self {
        assert_eq!(poly.nvars(), 3, "sphere symbols live in three variables");
        Self { poly: normalize(&poly) }
    }

    pub fn parse(text: &str) -> Result<Self, SphereError> {
        let poly = parse_polynomial(text, 3, |name| match name {
            "x1" => Some(0),
            "x2" => Some(1),
            "x3" => Some(2),
            _ => None,
        })?;
        Ok(Self::from_poly(poly))
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(Poly::constant(3, c))
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    /// The coordinate function `x_{i+1}`.
    pub fn coordinate(i: usize) -> Self {
        Self::from_poly(Poly::var(3, i))
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.poly.terms().all(|(_, c)| c.is_real())
    }

    pub fn check_degree(&self, max: u32) -> Result<(), SphereError> {
        if self.degree() > max {
            return Err(SphereError::DegreeTooHigh { degree: self.degree(), max });
        }
        Ok(())
    }

    pub fn add(&self, other: &SphereSymbol) -> SphereSymbol {
        Self { poly: &self.poly + &other.poly }
    }

    pub fn sub(&self, other: &SphereSymbol) -> SphereSymbol {
        Self { poly: &self.poly - &other.poly }
    }

    pub fn mul(&self, other: &SphereSymbol) -> SphereSymbol {
        Self::from_poly(&self.poly * &other.poly)
    }

    pub fn scale(&self, c: &GaussianRational) -> SphereSymbol {
        Self { poly: self.poly.scale(c) }
    }

    /// Value at a point of `ℝ³` (callers pass unit vectors).
    pub fn eval(&self, x: [f64; 3]) -> Complex64 {
        let v = [Complex64::new(x[0], 0.0), Complex64::new(x[1], 0.0), Complex64::new(x[2], 0.0)];
        self.poly.eval(&v)
    }

    /// Real part of the value, gradient and Hessian of the ambient polynomial.
    pub(crate) fn real_jet(&self, x: [f64; 3]) -> (f64, [f64; 3], [[f64; 3]; 3]) {
        let mut value = 0.0;
        let mut grad = [0.0; 3];
        let mut hess = [[0.0; 3]; 3];
        for (e, c) in self.poly.terms() {
            let c = c.to_complex().re;
            let m = |shift: [u32; 3]| -> f64 {
                let mut acc = c;
                for i in 0..3 {
                    let k = e[i];
                    let s = shift[i];
                    if s > k {
                        return 0.0;
                    }
                    let falling: f64 = (0..s).map(|t| (k - t) as f64).product();
                    acc *= falling * x[i].powi((k - s) as i32);
                }
                acc
            };
            value += m([0, 0, 0]);
            for i in 0..3 {
                let mut s = [0; 3];
                s[i] = 1;
                grad[i] += m(s);
                for j in 0..3 {
                    let mut s = [0; 3];
                    s[i] += 1;
                    s[j] += 1;
                    hess[i][j] += m(s);
                }
            }
        }
        (value, grad, hess)
    }

    /// Invariance under the rotation by `2π/k` about the `x₃`-axis, decided
    /// exactly: in `u = x₁ + i x₂`, `ū`, `x₃` every monomial `u^a ū^b x₃^c`
    /// must satisfy `a ≡ b (mod k)`.
    pub fn is_rotation_invariant(&self, k: u32) -> bool {
        if k <= 1 {
            return true;
        }
        self.in_u_coordinates().terms().all(|(e, _)| (e[0] as i64 - e[1] as i64).rem_euclid(k as i64) == 0)
    }

    /// The symbol as a polynomial in `(u, ū, x₃)`.
    pub fn in_u_coordinates(&self) -> Poly {
        let half = GaussianRational::real(Rational::new(1.into(), 2.into()));
        let minus_half_i = GaussianRational::new(Rational::zero(), Rational::new((-1).into(), 2.into()));
        let u = Poly::var(3, 0);
        let ubar = Poly::var(3, 1);
        // x₁ = (u + ū)/2, x₂ = (u − ū)/(2i)
        let x1 = (&u + &ubar).scale(&half);
        let x2 = (&u - &ubar).scale(&minus_half_i);
        self.poly.compose(&[x1, x2, Poly::var(3, 2)])
    }
}

/// Rewrites `x₃^{2m+e}` as `(1 − x₁² − x₂²)^m x₃^e`.
fn normalize(poly: &Poly) -> Poly {
    let one_minus = &Poly::one(3) - &(&Poly::var(3, 0).pow(2) + &Poly::var(3, 1).pow(2));
    let mut out = Poly::zero(3);
    for (e, c) in poly.terms() {
        let m = e[2] / 2;
        let rest = Poly::monomial(vec![e[0], e[1], e[2] % 2], c.clone());
        out = &out + &(&rest * &one_minus.pow(m));
    }
    out
}

/// `{f,g} = 2 x·(∇f × ∇g)`, the Poisson bracket of `(S², 2πω)` with `∫ω = 1`.
///
/// The ambient expression only sees tangential derivatives on the sphere,
/// so it is independent of the polynomial extension; `{x₁,x₂} = 2x₃`.
pub fn poisson_sphere(f: &SphereSymbol, g: &SphereSymbol) -> SphereSymbol {
    let df: Vec<Poly> = (0..3).map(|i| f.poly.derivative(i)).collect();
    let dg: Vec<Poly> = (0..3).map(|i| g.poly.derivative(i)).collect();
    let mut acc = Poly::zero(3);
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let cross = &(&df[j] * &dg[k]) - &(&df[k] * &dg[j]);
        acc = &acc + &(&Poly::var(3, i) * &cross);
    }
    SphereSymbol::from_poly(acc.scale(&GaussianRational::from_int(2)))
}

impl fmt::Display for SphereSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // highest degree first
        let mut terms: Vec<_> = self.poly.terms().collect();
        terms.sort_by(|a, b| b.0.iter().sum::<u32>().cmp(&a.0.iter().sum::<u32>()).then_with(|| b.0.cmp(a.0)));
        for (e, c) in terms {
            let mono: Vec<String> = (0..3)
                .filter(|&i| e[i] > 0)
                .map(|i| if e[i] == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e[i]) })
                .collect();
            let (sign, body) = if c.is_real() {
                let r = &c.re;
                let neg = r < &Rational::zero();
                let abs = if neg { -r.clone() } else { r.clone() };
                let coef = if abs.is_one() && !mono.is_empty() { String::new() } else { rat_to_string(&abs) };
                (neg, coef)
            } else {
                (false, format!("({c})"))
            };
            let body = match (body.is_empty(), mono.is_empty()) {
                (true, _) => mono.join("*"),
                (false, true) => body,
                (false, false) => format!("{body}*{}", mono.join("*")),
            };
            match (first, sign) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> SphereSymbol {
        SphereSymbol::parse(text).unwrap()
    }

    #[test]
    fn parse_and_normalize() {
        assert_eq!(s("x3"), SphereSymbol::coordinate(2));
        assert_eq!(s("x1^2 - x2^2").degree(), 2);
        assert!(SphereSymbol::parse("x4").is_err());
        assert_eq!(s("x1^2 + x2^2 + x3^2"), SphereSymbol::one());
        assert_eq!(s("x3^3"), s("x3 - x1^2*x3 - x2^2*x3"));
        assert!(s("x1*x2").is_real());
        assert!(!s("i*x1").is_real());
    }

    #[test]
    fn brackets() {
        let x = |i| SphereSymbol::coordinate(i);
        assert_eq!(poisson_sphere(&x(0), &x(1)), x(2).scale(&GaussianRational::from_int(2)));
        assert_eq!(poisson_sphere(&x(1), &x(2)), x(0).scale(&GaussianRational::from_int(2)));
        assert_eq!(poisson_sphere(&x(2), &x(0)), x(1).scale(&GaussianRational::from_int(2)));
        let f = s("x1*x2 + x3");
        assert!(poisson_sphere(&f, &f).is_zero());
        assert!(poisson_sphere(&x(2), &s("x1^2 + x2^2")).is_zero());
    }

    #[test]
    fn rotation_invariance() {
        assert!(s("x3").is_rotation_invariant(5));
        assert!(s("x1^2 - x2^2").is_rotation_invariant(2));
        assert!(!s("x1^2 - x2^2").is_rotation_invariant(3));
        assert!(s("x1^3 - 3*x1*x2^2").is_rotation_invariant(3));
        assert!(!s("x1").is_rotation_invariant(2));
        assert!(s("x1^2 + x2^2").is_rotation_invariant(7));
    }

    #[test]
    fn jets_and_display() {
        let f = s("x1^2*x2 - 3*x3");
        let (v, g, h) = f.real_jet([0.5, -1.0, 2.0]);
        assert!((v - (-0.25 - 6.0)).abs() < 1e-14);
        assert_eq!(g, [-1.0, 0.25, -3.0]);
        assert_eq!(h[0][0], -2.0);
        assert_eq!(h[0][1], 1.0);
        assert_eq!(f.to_string(), "x1^2*x2 - 3*x3");
        assert_eq!(s("-1/2 + x1").to_string(), "x1 - 1/2");
    }
}
