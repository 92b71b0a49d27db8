use crate::exact::Rational;
use crate::kernel::{KernelError, KernelPoly, ModelWeights};
use crate::poly::Poly;

/// `𝒦[F,G]` as a Gaussian expectation.
///
/// `𝒫(Z,W)𝒫(W,Z′) = 𝒫(Z,Z′)·Π(a_j/2π)exp(−½a_j u_j ū_j)` with
/// `w = z + u`, `w̄ = z̄′ + ū`, so `𝒦[F,G] = E[F(Z,W)G(W,Z′)]` where the
/// only nonzero moments are `E[u_j^m ū_j^m] = m!(2/a_j)^m`.
pub fn wick_compose(w: &ModelWeights, f: &KernelPoly, g: &KernelPoly) -> Result<KernelPoly, KernelError> {
    let n = w.n();
    f.check_dim(n)?;
    g.check_dim(n)?;
    // ring layout: [z, z̄, z′, z̄′, u, ū]
    let nv = 6 * n;
    let var = |block: usize, j: usize| Poly::var(nv, block * n + j);
    let shifted_w: Vec<Poly> = (0..n).map(|j| &var(0, j) + &var(4, j)).collect();
    let shifted_wbar: Vec<Poly> = (0..n).map(|j| &var(3, j) + &var(5, j)).collect();
    let mut f_images = Vec::with_capacity(4 * n);
    let mut g_images = Vec::with_capacity(4 * n);
    for j in 0..n {
        f_images.push(var(0, j));
    }
    for j in 0..n {
        f_images.push(var(1, j));
    }
    f_images.extend(shifted_w.iter().cloned());
    f_images.extend(shifted_wbar.iter().cloned());
    g_images.extend(shifted_w.iter().cloned());
    g_images.extend(shifted_wbar.iter().cloned());
    for j in 0..n {
        g_images.push(var(2, j));
    }
    for j in 0..n {
        g_images.push(var(3, j));
    }
    let product = &f.poly().compose(&f_images) * &g.poly().compose(&g_images);
    let mut out = Poly::zero(4 * n);
    for (e, c) in product.terms() {
        let mut weight = Rational::from_integer(1.into());
        let mut ok = true;
        for j in 0..n {
            let (m, l) = (e[4 * n + j], e[5 * n + j]);
            if m != l {
                ok = false;
                break;
            }
            let two_over_a = Rational::from_integer(2.into()) / w.get(j);
            for t in 1..=m {
                weight *= Rational::from_integer(t.into()) * &two_over_a;
            }
        }
        if !ok {
            continue;
        }
        out.add_term(e[..4 * n].to_vec(), c.scale(&weight));
    }
    Ok(KernelPoly::from_poly(n, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::compose_k;

    #[test]
    fn table_entries() {
        let w = ModelWeights::from_ints(&[3]).unwrap();
        let z = KernelPoly::z(1, 0);
        let zb = KernelPoly::zbar(1, 0);
        assert_eq!(wick_compose(&w, &KernelPoly::one(1), &zb).unwrap(), KernelPoly::zbarp(1, 0));
        assert_eq!(wick_compose(&w, &z, &KernelPoly::one(1)).unwrap(), z);
        assert_eq!(
            wick_compose(&w, &KernelPoly::zbarp(1, 0), &KernelPoly::zbar(1, 0)).unwrap(),
            compose_k(&w, &KernelPoly::zbarp(1, 0), &KernelPoly::zbar(1, 0)).unwrap()
        );
    }
}
