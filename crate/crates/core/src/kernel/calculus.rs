//! Normal ordering, projection and composition of kernels `F𝒫`.
//!
//! Everything reduces to two identities for the outer variable of a kernel
//! `g(Z,Z′)𝒫(Z,Z′)`:
//!
//! * `z̄_j 𝒫 = (b_{j,z}/a_j) 𝒫 + z̄′_j 𝒫`
//! * `g · b_{j,z}(h𝒫) = b_{j,z}(g h 𝒫) + 2 (∂g/∂z_j) h 𝒫`
//!
//! The internal routines work on a bare [`Poly`] with a [`Chart`] naming
//! which slots play the role of `z`, `z̄` and `z̄′`, so the same code orders a
//! two-point kernel in `Z` and a three-point integrand in the middle variable.

use std::collections::{BTreeMap, HashMap};

use super::{KernelError, KernelPoly, ModelWeights, MultiIndex};
use crate::exact::{GaussianRational, Rational};
use crate::poly::{Exponents, Poly};

/// Slots of the holomorphic, antiholomorphic and partner (`z̄′`) variables
/// of the kernel being ordered.
struct Chart<'a> {
    hol: Vec<usize>,
    anti: Vec<usize>,
    partner: Vec<usize>,
    a: &'a [Rational],
}

impl<'a> Chart<'a> {
    fn standard(w: &'a ModelWeights) -> Self {
        let n = w.n();
        Self {
            hol: (0..n).collect(),
            anti: (n..2 * n).collect(),
            partner: (3 * n..4 * n).collect(),
            a: w.a(),
        }
    }

    /// `h` with `b_j(g𝒫) = h𝒫`, namely `a_j(z̄_j − z̄′_j)g − 2∂g/∂z_j`.
    fn push(&self, g: &Poly, j: usize) -> Poly {
        let nv = g.nvars();
        let diff = &Poly::var(nv, self.anti[j]) - &Poly::var(nv, self.partner[j]);
        let mut h = (&diff * g).scale_rational(&self.a[j]);
        h.add_scaled(&g.derivative(self.hol[j]), &GaussianRational::from_int(-2));
        h
    }

    fn push_multi(&self, g: &Poly, alpha: &MultiIndex) -> Poly {
        let mut out = g.clone();
        for (j, &k) in alpha.entries().iter().enumerate() {
            for _ in 0..k {
                out = self.push(&out, j);
            }
        }
        out
    }

    fn normal_order(&self, poly: &Poly) -> BTreeMap<MultiIndex, Poly> {
        let mut memo = HashMap::new();
        let mut out = BTreeMap::new();
        for (e, c) in poly.terms() {
            let nf = self.order_monomial(e, &mut memo);
            accumulate(&mut out, nf, c, None);
        }
        out
    }

    fn order_monomial(
        &self,
        e: &Exponents,
        memo: &mut HashMap<Exponents, BTreeMap<MultiIndex, Poly>>,
    ) -> BTreeMap<MultiIndex, Poly> {
        if let Some(hit) = memo.get(e) {
            return hit.clone();
        }
        let n = self.hol.len();
        let nv = e.len();
        // eliminate the z̄ of highest exponent first
        let pick = (0..n).filter(|&j| e[self.anti[j]] > 0).max_by_key(|&j| (e[self.anti[j]], std::cmp::Reverse(j)));
        let result = match pick {
            None => {
                let mut m = BTreeMap::new();
                m.insert(MultiIndex::zero(n), Poly::monomial(e.clone(), GaussianRational::from_int(1)));
                m
            }
            Some(j) => {
                let mut rest = e.clone();
                rest[self.anti[j]] -= 1;
                let inv_a = GaussianRational::real(Rational::from_integer(1.into()) / &self.a[j]);
                let mut out = BTreeMap::new();
                // (1/a_j) b_j (M𝒫)
                let nf_rest = self.order_monomial(&rest, memo);
                accumulate(&mut out, nf_rest, &inv_a, Some(j));
                // ((2/a_j) ∂_j M + M z̄′_j) 𝒫
                let m = Poly::monomial(rest, GaussianRational::from_int(1));
                let mut tail = &m * &Poly::var(nv, self.partner[j]);
                tail.add_scaled(&m.derivative(self.hol[j]), &inv_a.scale(&Rational::from_integer(2.into())));
                for (te, tc) in tail.terms() {
                    let nf = self.order_monomial(te, memo);
                    accumulate(&mut out, nf, tc, None);
                }
                out
            }
        };
        memo.insert(e.clone(), result.clone());
        result
    }
}

fn accumulate(
    out: &mut BTreeMap<MultiIndex, Poly>,
    nf: BTreeMap<MultiIndex, Poly>,
    c: &GaussianRational,
    shift: Option<usize>,
) {
    for (mut alpha, p) in nf {
        if let Some(j) = shift {
            alpha.0[j] += 1;
        }
        let nv = p.nvars();
        let slot = out.entry(alpha.clone()).or_insert_with(|| Poly::zero(nv));
        slot.add_scaled(&p, c);
        if slot.is_zero() {
            out.remove(&alpha);
        }
    }
}

/// `F𝒫 = Σ_α b_z^α (F_α𝒫)` with every `F_α` free of `z̄`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    n: usize,
    summands: BTreeMap<MultiIndex, KernelPoly>,
}

impl NormalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn summands(&self) -> &BTreeMap<MultiIndex, KernelPoly> {
        &self.summands
    }

    pub fn get(&self, alpha: &MultiIndex) -> KernelPoly {
        self.summands.get(alpha).cloned().unwrap_or_else(|| KernelPoly::zero(self.n))
    }

    /// Expands every `b_z^α` back into a polynomial factor.
    pub fn reconstruct(&self, w: &ModelWeights) -> KernelPoly {
        let chart = Chart::standard(w);
        let mut acc = Poly::zero(4 * self.n);
        for (alpha, f) in &self.summands {
            acc = &acc + &chart.push_multi(f.poly(), alpha);
        }
        KernelPoly::from_poly(self.n, acc)
    }
}

/// `h` with `b_{j,z}(g𝒫) = h𝒫`.
pub fn bz_push(w: &ModelWeights, j: usize, g: &KernelPoly) -> Result<KernelPoly, KernelError> {
    g.check_dim(w.n())?;
    if j >= w.n() {
        return Err(KernelError::IndexOutOfRange { index: j, n: w.n() });
    }
    let chart = Chart::standard(w);
    Ok(KernelPoly::from_poly(w.n(), chart.push(g.poly(), j)))
}

pub fn normal_order(w: &ModelWeights, f: &KernelPoly) -> Result<NormalForm, KernelError> {
    f.check_dim(w.n())?;
    let chart = Chart::standard(w);
    let summands = chart
        .normal_order(f.poly())
        .into_iter()
        .map(|(alpha, p)| (alpha, KernelPoly::from_poly(w.n(), p)))
        .collect();
    Ok(NormalForm { n: w.n(), summands })
}

/// `F₀` with `𝒫∘(F𝒫) = F₀𝒫`: the `α = 0` summand of the normal form.
pub fn project_left(w: &ModelWeights, f: &KernelPoly) -> Result<KernelPoly, KernelError> {
    Ok(normal_order(w, f)?.get(&MultiIndex::zero(w.n())))
}

/// The polynomial `𝒦[F,G]` with `(F𝒫)∘(G𝒫) = 𝒦[F,G]𝒫`.
///
/// `F(Z,W)` is normal ordered in the outer variable, each `F_α(z,W)G(W,Z′)`
/// is projected over the middle variable `W` (the `b_w` terms are killed by
/// `𝒫` and the remaining holomorphic factor is reproduced at `w = z`), and the
/// outer `b_z^α` are pushed back through the result.
pub fn compose_k(w: &ModelWeights, f: &KernelPoly, g: &KernelPoly) -> Result<KernelPoly, KernelError> {
    let n = w.n();
    f.check_dim(n)?;
    g.check_dim(n)?;
    let a = w.a();
    // three-point slots: z, z̄, w, w̄, z′, z̄′
    let nv = 6 * n;
    let seq = |k: usize| (k * n..(k + 1) * n).collect::<Vec<_>>();
    let outer = Chart { hol: seq(0), anti: seq(1), partner: seq(3), a };
    let middle = Chart { hol: seq(2), anti: seq(3), partner: seq(5), a };
    // F(Z,W): z→z, z̄→z̄, z′→w, z̄′→w̄
    let f_map: Vec<usize> = (0..4 * n).collect();
    let f3 = f.poly().remap(nv, &f_map);
    // G(W,Z′): z→w, z̄→w̄, z′→z′, z̄′→z̄′
    let g_map: Vec<usize> = (0..4 * n).map(|s| s + 2 * n).collect();
    let g3 = g.poly().remap(nv, &g_map);
    // back to two points after w ↦ z: z→z, (z̄ absent), w→z, w̄ (absent), z′, z̄′
    let collapse: Vec<usize> = (0..nv)
        .map(|s| match s / n {
            0 | 2 => s % n,
            1 | 3 => n + s % n,
            4 => 2 * n + s % n,
            _ => 3 * n + s % n,
        })
        .collect();
    let two_point = Chart::standard(w);
    let zero = MultiIndex::zero(n);
    let mut acc = Poly::zero(4 * n);
    for (alpha, f_alpha) in outer.normal_order(&f3) {
        let integrand = &f_alpha * &g3;
        let projected = middle.normal_order(&integrand).remove(&zero).unwrap_or_else(|| Poly::zero(nv));
        if projected.is_zero() {
            continue;
        }
        let reproduced = projected.remap(4 * n, &collapse);
        acc = &acc + &two_point.push_multi(&reproduced, &alpha);
    }
    Ok(KernelPoly::from_poly(n, acc))
}

impl NormalForm {
    /// Checks `|α| + deg F_α ≡ deg F (mod 2)` monomial by monomial, for a
    /// source of uniform parity.
    pub fn parity_consistent(&self, source_odd: bool) -> bool {
        self.summands
            .iter()
            .all(|(alpha, f)| f.poly().has_parity(source_odd ^ (alpha.order() % 2 == 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    fn w1() -> ModelWeights {
        ModelWeights::new(vec![rat(5, 2)]).unwrap()
    }

    fn real(r: Rational) -> GaussianRational {
        GaussianRational::real(r)
    }

    #[test]
    fn push_examples() {
        let w = w1();
        let a = real(w.get(0).clone());
        let one = KernelPoly::one(1);
        let expect = (&KernelPoly::zbar(1, 0) - &KernelPoly::zbarp(1, 0)).scale(&a);
        assert_eq!(bz_push(&w, 0, &one).unwrap(), expect);
        let z = KernelPoly::z(1, 0);
        let expect_z = &(&expect * &z) - &KernelPoly::constant(1, GaussianRational::from_int(2));
        assert_eq!(bz_push(&w, 0, &z).unwrap(), expect_z);
        let zb = KernelPoly::zbar(1, 0);
        assert_eq!(bz_push(&w, 0, &zb).unwrap(), &expect * &zb);
        assert!(matches!(bz_push(&w, 1, &one), Err(KernelError::IndexOutOfRange { .. })));
    }

    #[test]
    fn normal_order_examples() {
        let w = ModelWeights::new(vec![rat(2, 1), rat(7, 3)]).unwrap();
        let n = 2;
        for j in 0..n {
            let nf = normal_order(&w, &KernelPoly::zbar(n, j)).unwrap();
            assert_eq!(nf.summands().len(), 2);
            let inv = real(rat_int(1) / w.get(j));
            assert_eq!(nf.get(&MultiIndex::unit(n, j)), KernelPoly::constant(n, inv));
            assert_eq!(nf.get(&MultiIndex::zero(n)), KernelPoly::zbarp(n, j));
        }
        for i in 0..n {
            for j in 0..n {
                let f = &KernelPoly::z(n, i) * &KernelPoly::zbar(n, j);
                let nf = normal_order(&w, &f).unwrap();
                let inv = real(rat_int(1) / w.get(j));
                assert_eq!(nf.get(&MultiIndex::unit(n, j)), KernelPoly::z(n, i).scale(&inv));
                let mut f0 = &KernelPoly::z(n, i) * &KernelPoly::zbarp(n, j);
                if i == j {
                    f0 = &f0 + &KernelPoly::constant(n, inv.scale(&rat_int(2)));
                }
                assert_eq!(nf.get(&MultiIndex::zero(n)), f0);
            }
            let nf = normal_order(&w, &KernelPoly::z(n, i)).unwrap();
            assert_eq!(nf.summands().len(), 1);
            assert_eq!(nf.get(&MultiIndex::zero(n)), KernelPoly::z(n, i));
        }
    }

    #[test]
    fn normal_form_round_trip_high_degree() {
        let w = ModelWeights::new(vec![rat(1, 2), rat(3, 1)]).unwrap();
        let n = 2;
        let f = &(&KernelPoly::zbar(n, 0) * &KernelPoly::zbar(n, 0)) * &(&KernelPoly::z(n, 0) * &KernelPoly::zbar(n, 1));
        let f = &f + &(&KernelPoly::z(n, 1) * &KernelPoly::zbarp(n, 0));
        let nf = normal_order(&w, &f).unwrap();
        assert!(nf.summands().values().all(KernelPoly::is_free_of_zbar));
        assert_eq!(nf.reconstruct(&w), f);
    }

    #[test]
    fn project_left_examples() {
        let w = ModelWeights::new(vec![rat(3, 4), rat(2, 1)]).unwrap();
        let n = 2;
        assert_eq!(project_left(&w, &KernelPoly::zbar(n, 1)).unwrap(), KernelPoly::zbarp(n, 1));
        assert_eq!(project_left(&w, &KernelPoly::z(n, 0)).unwrap(), KernelPoly::z(n, 0));
        let f = &KernelPoly::z(n, 0) * &KernelPoly::zbar(n, 0);
        let expect = &KernelPoly::constant(n, real(rat(8, 3))) + &(&KernelPoly::z(n, 0) * &KernelPoly::zbarp(n, 0));
        assert_eq!(project_left(&w, &f).unwrap(), expect);
        let f = &KernelPoly::z(n, 0) * &KernelPoly::zbar(n, 1);
        assert_eq!(project_left(&w, &f).unwrap(), &KernelPoly::z(n, 0) * &KernelPoly::zbarp(n, 1));
    }

    #[test]
    fn compose_identity_and_errors() {
        let w = w1();
        let one = KernelPoly::one(1);
        assert_eq!(compose_k(&w, &one, &one).unwrap(), one);
        let two = KernelPoly::one(2);
        assert!(matches!(compose_k(&w, &one, &two), Err(KernelError::DimensionMismatch { .. })));
    }
}
