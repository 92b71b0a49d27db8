//! Sparse multivariate polynomials over ℚ(i).
//!
//! Variables are anonymous indices `0..nvars`; the kernel and symbol types
//! assign them meaning. Terms are kept in a `BTreeMap` keyed by exponent
//! vectors so iteration order (and every serialized form) is deterministic.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::exact::{GaussianRational, Rational};

pub type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, GaussianRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::monomial(e, GaussianRational::one())
    }

    pub fn monomial(exponents: Exponents, c: GaussianRational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, GaussianRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> GaussianRational {
        self.terms.get(exponents).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coefficient(&vec![0; self.nvars])
    }

    /// Adds `c·x^e`, dropping the entry if the coefficient cancels.
    pub fn add_term(&mut self, exponents: Exponents, c: GaussianRational) {
        assert_eq!(exponents.len(), self.nvars, "exponent vector has wrong arity");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exponents) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, c: &GaussianRational) {
        assert_eq!(self.nvars, other.nvars);
        if c.is_zero() {
            return;
        }
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn scale_rational(&self, r: &Rational) -> Poly {
        self.scale(&GaussianRational::real(r.clone()))
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// Total degree restricted to a subset of the variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms.keys().map(|e| vars.iter().map(|&v| e[v]).sum::<u32>()).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    /// True when every monomial has total degree of the given parity.
    pub fn has_parity(&self, odd: bool) -> bool {
        self.terms.keys().all(|e| (e.iter().sum::<u32>() % 2 == 1) == odd)
    }

    pub fn conj_coefficients(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v.conj())).collect() }
    }

    /// Formal partial derivative in variable `var`.
    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            let k = e2[var];
            e2[var] -= 1;
            out.add_term(e2, c.scale(&Rational::from_integer(k.into())));
        }
        out
    }

    /// Re-indexes variables: old variable `i` becomes new variable `map[i]`.
    /// Several old variables may land on one new variable (their exponents add).
    pub fn remap(&self, new_nvars: usize, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars);
        let mut out = Poly::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; new_nvars];
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Substitutes every variable by a polynomial (all in a common ring).
    pub fn compose(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Poly::zero(target);
        // cache powers per variable
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(p.nvars)]).collect();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = &out + &term;
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, values: &[Complex64]) -> Complex64 {
        assert_eq!(values.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = c.to_complex();
                for (v, &k) in values.iter().zip(e) {
                    if k > 0 {
                        m *= v.powu(k);
                    }
                }
                m
            })
            .sum()
    }

    pub fn eval_exact(&self, values: &[GaussianRational]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (v, &k) in values.iter().zip(e) {
                if k > 0 {
                    m = &m * &v.pow(k);
                }
            }
            acc += &m;
        }
        acc
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &GaussianRational::one());
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &GaussianRational::from_int(-1));
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&GaussianRational::from_int(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn cancellation_removes_terms() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x * &y) - &(&y * &x);
        assert!(p.is_zero());
    }

    #[test]
    fn derivative_and_remap() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x * &x) * &y; // x²y
        assert_eq!(p.derivative(0), (&x * &y).scale(&GaussianRational::from_int(2)));
        // identify y with x
        assert_eq!(p.remap(1, &[0, 0]), Poly::var(1, 0).pow(3));
    }

    #[test]
    fn compose_substitutes() {
        let x = Poly::var(1, 0);
        let p = &x * &x;
        let img = &Poly::one(1) + &x;
        let q = p.compose(&[img]);
        // (1+x)² = 1 + 2x + x²
        assert_eq!(q.coefficient(&[1]), GaussianRational::from_int(2));
        assert_eq!(q.constant_term(), GaussianRational::one());
        let half = GaussianRational::real(rat(1, 2));
        assert_eq!(q.eval_exact(&[half]), GaussianRational::real(rat(9, 4)));
    }
}
