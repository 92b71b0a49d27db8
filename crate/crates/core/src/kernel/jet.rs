use num_traits::Zero;

use super::{compose_k, KernelError, KernelPoly, ModelWeights};
use crate::exact::{GaussianRational, Rational};
use crate::poly::Poly;

/// Taylor jet of a symbol at the base point `0`, as a polynomial in
/// `(z_1..z_n, z̄_1..z̄_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolJet {
    n: usize,
    poly: Poly,
}

impl SymbolJet {
    pub fn from_poly(n: usize, poly: Poly) -> Self {
        assert_eq!(poly.nvars(), 2 * n, "a jet needs 2n variables");
        Self { n, poly }
    }

    pub fn z(n: usize, j: usize) -> Self {
        Self::from_poly(n, Poly::var(2 * n, j))
    }

    pub fn zbar(n: usize, j: usize) -> Self {
        Self::from_poly(n, Poly::var(2 * n, n + j))
    }

    pub fn constant(n: usize, c: GaussianRational) -> Self {
        Self::from_poly(n, Poly::constant(2 * n, c))
    }

    /// Jet with prescribed first derivatives `∂f/∂z_j(0)`, `∂f/∂z̄_j(0)`.
    pub fn linear(dz: &[GaussianRational], dzbar: &[GaussianRational]) -> Self {
        let n = dz.len();
        assert_eq!(dzbar.len(), n);
        let mut poly = Poly::zero(2 * n);
        for j in 0..n {
            poly.add_scaled(&Poly::var(2 * n, j), &dz[j]);
            poly.add_scaled(&Poly::var(2 * n, n + j), &dzbar[j]);
        }
        Self { n, poly }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn add(&self, other: &SymbolJet) -> SymbolJet {
        assert_eq!(self.n, other.n);
        SymbolJet { n: self.n, poly: &self.poly + &other.poly }
    }

    pub fn scale(&self, c: &GaussianRational) -> SymbolJet {
        SymbolJet { n: self.n, poly: self.poly.scale(c) }
    }

    pub fn mul(&self, other: &SymbolJet) -> SymbolJet {
        assert_eq!(self.n, other.n);
        SymbolJet { n: self.n, poly: &self.poly * &other.poly }
    }

    /// `∂f/∂z_j(0)`.
    pub fn dz(&self, j: usize) -> GaussianRational {
        let mut e = vec![0; 2 * self.n];
        e[j] = 1;
        self.poly.coefficient(&e)
    }

    /// `∂f/∂z̄_j(0)`.
    pub fn dzbar(&self, j: usize) -> GaussianRational {
        let mut e = vec![0; 2 * self.n];
        e[self.n + j] = 1;
        self.poly.coefficient(&e)
    }

    /// Real-valued jets are fixed by `z ↔ z̄` with conjugated coefficients.
    pub fn is_real(&self) -> bool {
        let n = self.n;
        let map: Vec<usize> = (0..2 * n).map(|s| (s + n) % (2 * n)).collect();
        self.poly.conj_coefficients().remap(2 * n, &map) == self.poly
    }

    fn check_dim(&self, n: usize) -> Result<(), KernelError> {
        if self.n != n {
            return Err(KernelError::DimensionMismatch { expected: n, found: self.n });
        }
        Ok(())
    }
}

/// `Q₁(f) = 𝒦[1, Σ_j ∂f/∂Z_j(0) Z_j]` in the Kähler case, where the first
/// Bergman coefficient vanishes.
pub fn q1_of_jet(w: &ModelWeights, f: &SymbolJet) -> Result<KernelPoly, KernelError> {
    let n = w.n();
    f.check_dim(n)?;
    let mut linear = KernelPoly::zero(n);
    for j in 0..n {
        linear = &linear + &KernelPoly::z(n, j).scale(&f.dz(j));
        linear = &linear + &KernelPoly::zbar(n, j).scale(&f.dzbar(j));
    }
    compose_k(w, &KernelPoly::one(n), &linear)
}

/// `{f,g}(0) = −i Σ_i (2/a_i)(∂_{z̄_i}f ∂_{z_i}g − ∂_{z_i}f ∂_{z̄_i}g)`.
pub fn poisson_at_point(w: &ModelWeights, f: &SymbolJet, g: &SymbolJet) -> Result<GaussianRational, KernelError> {
    let n = w.n();
    f.check_dim(n)?;
    g.check_dim(n)?;
    let mut acc = GaussianRational::zero();
    for i in 0..n {
        let two_over_a = Rational::from_integer(2.into()) / w.get(i);
        let bracket = &(&f.dzbar(i) * &g.dz(i)) - &(&f.dz(i) * &g.dzbar(i));
        acc += &bracket.scale(&two_over_a);
    }
    Ok(&acc * &-GaussianRational::i())
}

/// Constant term of `𝒦[Q₁(f),Q₁(g)] − 𝒦[Q₁(g),Q₁(f)]` at `Z = Z′ = 0`.
pub fn c1_antisymmetric(w: &ModelWeights, f: &SymbolJet, g: &SymbolJet) -> Result<GaussianRational, KernelError> {
    let qf = q1_of_jet(w, f)?;
    let qg = q1_of_jet(w, g)?;
    let fg = compose_k(w, &qf, &qg)?;
    let gf = compose_k(w, &qg, &qf)?;
    Ok((&fg - &gf).constant_term())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    #[test]
    fn q1_examples() {
        let w = ModelWeights::new(vec![rat(3, 2)]).unwrap();
        assert_eq!(q1_of_jet(&w, &SymbolJet::z(1, 0)).unwrap(), KernelPoly::z(1, 0));
        assert_eq!(q1_of_jet(&w, &SymbolJet::zbar(1, 0)).unwrap(), KernelPoly::zbarp(1, 0));
        let c = SymbolJet::constant(1, GaussianRational::from_int(5));
        assert!(q1_of_jet(&w, &c).unwrap().is_zero());
    }

    #[test]
    fn poisson_example() {
        let a1 = rat(7, 3);
        let w = ModelWeights::new(vec![a1.clone()]).unwrap();
        let one = GaussianRational::from_int(1);
        let i = GaussianRational::i();
        let f = SymbolJet::linear(&[one.clone()], &[one]);
        let g = SymbolJet::linear(&[-&i], &[i]);
        let expect = GaussianRational::real(rat_int(-4) / &a1);
        assert_eq!(poisson_at_point(&w, &f, &g).unwrap(), expect);
        assert_eq!(c1_antisymmetric(&w, &f, &g).unwrap(), &expect * &GaussianRational::i());
        assert!(poisson_at_point(&w, &f, &f).unwrap().is_zero());
        assert!(c1_antisymmetric(&w, &f, &f).unwrap().is_zero());
    }

    #[test]
    fn two_dimensional_example() {
        let w = ModelWeights::from_ints(&[2, 4]).unwrap();
        let n = 2;
        let f = SymbolJet::z(n, 0).mul(&SymbolJet::zbar(n, 1)).add(&SymbolJet::zbar(n, 0).mul(&SymbolJet::z(n, 1)));
        let i = GaussianRational::i();
        let g = SymbolJet::z(n, 0).add(&SymbolJet::zbar(n, 0).scale(&GaussianRational::from_int(-1))).scale(&i);
        assert!(f.is_real() && g.is_real());
        let lhs = c1_antisymmetric(&w, &f, &g).unwrap();
        let rhs = &poisson_at_point(&w, &f, &g).unwrap() * &i;
        assert_eq!(lhs, rhs);
    }
}
