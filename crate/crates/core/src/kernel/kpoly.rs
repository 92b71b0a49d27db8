use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::KernelError;
use crate::exact::{parse_rational, rat_to_string, GaussianRational};
use crate::poly::{Exponents, Poly};

/// One of the four variable families of a kernel polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelVar {
    Z(usize),
    ZBar(usize),
    ZPrime(usize),
    ZBarPrime(usize),
}

impl KernelVar {
    fn slot(self, n: usize) -> usize {
        match self {
            KernelVar::Z(j) => j,
            KernelVar::ZBar(j) => n + j,
            KernelVar::ZPrime(j) => 2 * n + j,
            KernelVar::ZBarPrime(j) => 3 * n + j,
        }
    }

    fn coordinate(self) -> usize {
        match self {
            KernelVar::Z(j) | KernelVar::ZBar(j) | KernelVar::ZPrime(j) | KernelVar::ZBarPrime(j) => j,
        }
    }

    fn name(slot: usize, n: usize) -> String {
        let (family, j) = (slot / n, slot % n + 1);
        match family {
            0 => format!("z{j}"),
            1 => format!("zbar{j}"),
            2 => format!("zp{j}"),
            _ => format!("zbarp{j}"),
        }
    }

    pub fn parse(name: &str) -> Option<KernelVar> {
        let (family, digits): (fn(usize) -> KernelVar, &str) = if let Some(d) = name.strip_prefix("zbarp") {
            (KernelVar::ZBarPrime, d)
        } else if let Some(d) = name.strip_prefix("zbar") {
            (KernelVar::ZBar, d)
        } else if let Some(d) = name.strip_prefix("zp") {
            (KernelVar::ZPrime, d)
        } else if let Some(d) = name.strip_prefix('z') {
            (KernelVar::Z, d)
        } else {
            return None;
        };
        let j: usize = digits.parse().ok()?;
        if j == 0 {
            return None;
        }
        Some(family(j - 1))
    }
}

/// A polynomial `F(Z,Z′) ∈ ℚ(i)[z, z̄, z′, z̄′]`, standing for the operator with
/// kernel `F·𝒫`.
///
/// Storage layout of the underlying [`Poly`]: slots `0..n` hold `z`, `n..2n`
/// hold `z̄`, `2n..3n` hold `z′` and `3n..4n` hold `z̄′`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KernelPoly {
    n: usize,
    poly: Poly,
}

impl KernelPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, poly: Poly::zero(4 * n) }
    }

    pub fn one(n: usize) -> Self {
        Self { n, poly: Poly::one(4 * n) }
    }

    pub fn constant(n: usize, c: GaussianRational) -> Self {
        Self { n, poly: Poly::constant(4 * n, c) }
    }

    pub fn var(n: usize, v: KernelVar) -> Self {
        assert!(v.coordinate() < n, "kernel variable {v:?} out of range for n = {n}");
        Self { n, poly: Poly::var(4 * n, v.slot(n)) }
    }

    pub fn z(n: usize, j: usize) -> Self {
        Self::var(n, KernelVar::Z(j))
    }

    pub fn zbar(n: usize, j: usize) -> Self {
        Self::var(n, KernelVar::ZBar(j))
    }

    pub fn zp(n: usize, j: usize) -> Self {
        Self::var(n, KernelVar::ZPrime(j))
    }

    pub fn zbarp(n: usize, j: usize) -> Self {
        Self::var(n, KernelVar::ZBarPrime(j))
    }

    /// Monomial `c · z^p z̄^q z′^r z̄′^s` (one exponent vector per family).
    pub fn monomial(p: &[u32], q: &[u32], r: &[u32], s: &[u32], c: GaussianRational) -> Self {
        let n = p.len();
        assert!(q.len() == n && r.len() == n && s.len() == n);
        let e: Exponents = p.iter().chain(q).chain(r).chain(s).copied().collect();
        Self { n, poly: Poly::monomial(e, c) }
    }

    pub fn from_poly(n: usize, poly: Poly) -> Self {
        assert_eq!(poly.nvars(), 4 * n, "kernel polynomial needs 4n variables");
        Self { n, poly }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn into_poly(self) -> Poly {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self { n: self.n, poly: self.poly.scale(c) }
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.poly.constant_term()
    }

    /// True if no `z̄` variable occurs.
    pub fn is_free_of_zbar(&self) -> bool {
        (0..self.n).all(|j| !self.poly.involves(self.n + j))
    }

    /// Polynomial of the adjoint operator, `conj F(Z′, Z)`: the variables map
    /// as `z ↦ z̄′, z̄ ↦ z′, z′ ↦ z̄, z̄′ ↦ z` and coefficients are conjugated.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let map: Vec<usize> = (0..4 * n).map(|s| (3 - s / n) * n + s % n).collect();
        let poly = self.poly.conj_coefficients().remap(4 * n, &map);
        Self { n, poly }
    }

    /// Evaluates at real points `Z, Z′ ∈ ℝ²ⁿ` with `z_j = Z_{2j−1} + iZ_{2j}`.
    pub fn eval(&self, zr: &[f64], zpr: &[f64]) -> Complex64 {
        let z = complex_coords(zr);
        let zp = complex_coords(zpr);
        self.eval_complex(&z, &zp)
    }

    pub fn eval_complex(&self, z: &[Complex64], zp: &[Complex64]) -> Complex64 {
        assert!(z.len() == self.n && zp.len() == self.n);
        let values: Vec<Complex64> = z
            .iter()
            .copied()
            .chain(z.iter().map(|v| v.conj()))
            .chain(zp.iter().copied())
            .chain(zp.iter().map(|v| v.conj()))
            .collect();
        self.poly.eval(&values)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &GaussianRational)> {
        self.poly.terms()
    }

    fn monomial_key(&self, e: &[u32]) -> String {
        let parts: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(slot, &k)| {
                let name = KernelVar::name(slot, self.n);
                if k == 1 {
                    name
                } else {
                    format!("{name}^{k}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Canonical JSON: monomial keys sorted, coefficients as `"p/q"` strings.
    pub fn to_json(&self) -> Value {
        let sorted: BTreeMap<String, &GaussianRational> =
            self.poly.terms().map(|(e, c)| (self.monomial_key(e), c)).collect();
        let terms: Vec<Value> = sorted
            .into_iter()
            .map(|(k, c)| json!({ "monomial": k, "re": rat_to_string(&c.re), "im": rat_to_string(&c.im) }))
            .collect();
        json!({ "n": self.n, "terms": terms })
    }

    pub fn from_json(value: &Value) -> Result<Self, KernelError> {
        let bad = |m: &str| KernelError::Json(m.to_string());
        let n = value.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing n"))? as usize;
        if n == 0 {
            return Err(bad("n must be positive"));
        }
        let terms = value.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))?;
        let mut poly = Poly::zero(4 * n);
        for t in terms {
            let key = t.get("monomial").and_then(Value::as_str).ok_or_else(|| bad("missing monomial"))?;
            let re = t.get("re").and_then(Value::as_str).ok_or_else(|| bad("missing re"))?;
            let im = t.get("im").and_then(Value::as_str).ok_or_else(|| bad("missing im"))?;
            let c = GaussianRational::new(
                parse_rational(re).map_err(|e| KernelError::Json(e.to_string()))?,
                parse_rational(im).map_err(|e| KernelError::Json(e.to_string()))?,
            );
            let mut e = vec![0u32; 4 * n];
            if key != "1" {
                for factor in key.split('*') {
                    let (name, pow) = match factor.split_once('^') {
                        Some((v, k)) => (v, k.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                        None => (factor, 1),
                    };
                    let var = KernelVar::parse(name).ok_or_else(|| bad("unknown variable"))?;
                    if var.coordinate() >= n {
                        return Err(bad("variable index exceeds n"));
                    }
                    e[var.slot(n)] += pow;
                }
            }
            poly.add_term(e, c);
        }
        Ok(Self { n, poly })
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<(), KernelError> {
        if self.n != n {
            return Err(KernelError::DimensionMismatch { expected: n, found: self.n });
        }
        Ok(())
    }
}

fn complex_coords(real: &[f64]) -> Vec<Complex64> {
    assert!(real.len().is_multiple_of(2), "real coordinates come in pairs");
    real.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

impl fmt::Display for KernelPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.poly.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let key = self.monomial_key(e);
            if key == "1" {
                write!(f, "({c})")?;
            } else if c.is_one() {
                write!(f, "{key}")?;
            } else {
                write!(f, "({c})*{key}")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a KernelPoly> for &'a KernelPoly {
    type Output = KernelPoly;
    fn add(self, rhs: &KernelPoly) -> KernelPoly {
        assert_eq!(self.n, rhs.n);
        KernelPoly { n: self.n, poly: &self.poly + &rhs.poly }
    }
}

impl<'a> Sub<&'a KernelPoly> for &'a KernelPoly {
    type Output = KernelPoly;
    fn sub(self, rhs: &KernelPoly) -> KernelPoly {
        assert_eq!(self.n, rhs.n);
        KernelPoly { n: self.n, poly: &self.poly - &rhs.poly }
    }
}

impl<'a> Mul<&'a KernelPoly> for &'a KernelPoly {
    type Output = KernelPoly;
    fn mul(self, rhs: &KernelPoly) -> KernelPoly {
        assert_eq!(self.n, rhs.n);
        KernelPoly { n: self.n, poly: &self.poly * &rhs.poly }
    }
}

impl Neg for &KernelPoly {
    type Output = KernelPoly;
    fn neg(self) -> KernelPoly {
        KernelPoly { n: self.n, poly: -&self.poly }
    }
}

impl Zero for KernelPoly {
    /// One-dimensional zero; prefer [`KernelPoly::zero`] with an explicit `n`.
    fn zero() -> Self {
        KernelPoly::zero(1)
    }
    fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

impl Add for KernelPoly {
    type Output = KernelPoly;
    fn add(self, rhs: KernelPoly) -> KernelPoly {
        &self + &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn adjoint_is_involution() {
        let n = 2;
        let c = GaussianRational::new(rat(1, 3), rat(-2, 1));
        let f = &(&KernelPoly::z(n, 0) * &KernelPoly::zbarp(n, 1)).scale(&c) + &KernelPoly::zbar(n, 1);
        assert_eq!(f.adjoint().adjoint(), f);
        // c·z_1 z̄′_2 ↦ c̄·z̄′_1 z_2 and z̄_2 ↦ z′_2
        let expect = &(&KernelPoly::zbarp(n, 0) * &KernelPoly::z(n, 1)).scale(&c.conj()) + &KernelPoly::zp(n, 1);
        assert_eq!(f.adjoint(), expect);
    }

    #[test]
    fn json_round_trip() {
        let n = 1;
        let f = &(&KernelPoly::z(n, 0) * &KernelPoly::z(n, 0)).scale(&GaussianRational::real(rat(2, 3)))
            + &KernelPoly::constant(n, GaussianRational::i());
        let j = f.to_json();
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(text, r#"{"n":1,"terms":[{"im":"1","monomial":"1","re":"0"},{"im":"0","monomial":"z1^2","re":"2/3"}]}"#);
        assert_eq!(KernelPoly::from_json(&j).unwrap(), f);
    }

    #[test]
    fn var_names_parse() {
        assert_eq!(KernelVar::parse("zbarp2"), Some(KernelVar::ZBarPrime(1)));
        assert_eq!(KernelVar::parse("zp1"), Some(KernelVar::ZPrime(0)));
        assert_eq!(KernelVar::parse("zbar3"), Some(KernelVar::ZBar(2)));
        assert_eq!(KernelVar::parse("z0"), None);
        assert_eq!(KernelVar::parse("x1"), None);
    }
}
