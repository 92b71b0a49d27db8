//! Exact coefficient arithmetic: Gaussian rationals and square-root surds.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn rat_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `p`, `p/q`, or a terminating decimal such as `1.25`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    let err = || ParseRationalError(text.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int.trim_start().starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| err())?
        };
        let frac_part = BigInt::from_str(frac).map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mut value = BigRational::from_integer(int_part.abs()) + BigRational::new(frac_part, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| err())
}

/// An element of ℚ(i).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::real(rat_int(v))
    }

    pub fn i() -> Self {
        Self { re: Rational::zero(), im: Rational::one() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let d = self.norm_sqr();
        if d.is_zero() {
            return None;
        }
        Some(Self { re: &self.re / &d, im: -&self.im / &d })
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self * &r)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self { re: &self.re * r, im: &self.im * r }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", rat_to_string(&self.re)),
            (true, false) => write!(f, "{}i", rat_to_string(&self.im)),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", rat_to_string(&self.re), rat_to_string(&-self.im.clone()))
                } else {
                    write!(f, "{}+{}i", rat_to_string(&self.re), rat_to_string(&self.im))
                }
            }
        }
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self { re: Rational::zero(), im: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: GaussianRational) -> GaussianRational {
        &self + &rhs
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: GaussianRational) -> GaussianRational {
        &self - &rhs
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: GaussianRational) -> GaussianRational {
        &self * &rhs
    }
}

impl Div for GaussianRational {
    type Output = GaussianRational;
    /// Panics on division by zero; use [`GaussianRational::checked_div`] otherwise.
    fn div(self, rhs: GaussianRational) -> GaussianRational {
        self.checked_div(&rhs).expect("division by zero Gaussian rational")
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

/// `coef · √radicand` with a nonnegative rational radicand.
///
/// Matrix entries of Toeplitz operators in orthonormal monomial bases are of
/// this form: a rational moment divided by the square root of a product of
/// rational norms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub coef: GaussianRational,
    pub radicand: Rational,
}

impl Surd {
    pub fn new(coef: GaussianRational, radicand: Rational) -> Self {
        debug_assert!(!radicand.is_negative());
        Self { coef, radicand }
    }

    pub fn zero() -> Self {
        Self { coef: GaussianRational::zero(), radicand: Rational::one() }
    }

    pub fn rational(coef: GaussianRational) -> Self {
        Self { coef, radicand: Rational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero() || self.radicand.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { coef: self.coef.conj(), radicand: self.radicand.clone() }
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        Surd { coef: &self.coef * &other.coef, radicand: &self.radicand * &other.radicand }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coef.to_complex() * rat_to_f64(&self.radicand).sqrt()
    }

    /// Exact equality of the represented complex numbers.
    ///
    /// `a√r = b√s` iff `a²r = b²s` and the two values are not negatives of
    /// each other; the latter is decided on the floating approximations,
    /// which differ by a factor of −1 whenever the squares agree.
    pub fn exact_eq(&self, other: &Surd) -> bool {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return true,
            (true, false) | (false, true) => return false,
            _ => {}
        }
        let lhs = (&self.coef * &self.coef).scale(&self.radicand);
        let rhs = (&other.coef * &other.coef).scale(&other.radicand);
        if lhs != rhs {
            return false;
        }
        let a = self.to_complex();
        let b = other.to_complex();
        (a - b).norm() <= (a + b).norm()
    }
}
