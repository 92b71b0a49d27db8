//! `ℂP¹/ℤₖ`: the generator rotates the chart by `z ↦ ζz`, `ζ = e^{2πi/k}`,
//! fixing the two poles (the cone points), and acts on `s_j = z^j` by
//! `ζ^{j − w}` for the lift weight `w`. Invariant sections are the `s_j` with
//! `j ≡ w (mod k)`.

use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::{commutator, operator_norm, BasisInfo, ToeplitzMatrix};
use crate::sphere::{self, poisson_sphere, SphereError, SphereSymbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbifoldError {
    #[error("group order must be at least 1, got {0}")]
    InvalidOrder(u32),
    #[error("lift weight {weight} must lie in [0, {k})")]
    InvalidLift { weight: u32, k: u32 },
    #[error("no invariant sections for k = {k}, p = {p}, lift weight {weight}")]
    EmptyBasis { k: u32, p: u32, weight: u32 },
    #[error("symbol `{0}` is not invariant under the rotation group")]
    NotInvariant(String),
    #[error(transparent)]
    Sphere(#[from] SphereError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbifoldData {
    pub k: u32,
    pub p: u32,
    pub lift_weight: u32,
    /// Invariant section indices `I ⊂ {0..p}`, ascending.
    pub indices: Vec<usize>,
}

pub fn invariant_basis(k: u32, p: i64, lift_weight: u32) -> Result<OrbifoldData, OrbifoldError> {
    if k == 0 {
        return Err(OrbifoldError::InvalidOrder(k));
    }
    if lift_weight >= k {
        return Err(OrbifoldError::InvalidLift { weight: lift_weight, k });
    }
    if p < 1 {
        return Err(SphereError::InvalidPower(p).into());
    }
    let p = p as u32;
    let indices: Vec<usize> = (0..=p as usize).filter(|j| j % k as usize == lift_weight as usize).collect();
    if indices.is_empty() {
        return Err(OrbifoldError::EmptyBasis { k, p, weight: lift_weight });
    }
    Ok(OrbifoldData { k, p, lift_weight, indices })
}

/// `k · Σ_{j∈I} |s_j(x)|²_h / ‖s_j‖²`; the factor `k` accounts for the
/// quotient having `1/k` of the sphere's volume.
pub fn orbifold_bergman_diag(data: &OrbifoldData, x: [f64; 3]) -> f64 {
    data.k as f64 * sphere::bergman_partial(data.p, x, data.indices.iter().copied())
}

/// The same density from the group-sum formula
/// `Σ_g (g,1)·P_p(g⁻¹x, x)`: with `c = (1+x₃)/2`, `s = (1−x₃)/2` this is
/// `(p+1) Σ_{g=0}^{k−1} ζ^{−g w} (c + ζ^g s)^p`.
pub fn orbifold_bergman_group_sum(data: &OrbifoldData, x: [f64; 3]) -> f64 {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let x3 = x[2] / r;
    let c = (1.0 + x3) / 2.0;
    let s = (1.0 - x3) / 2.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for g in 0..data.k {
        let angle = 2.0 * std::f64::consts::PI * g as f64 / data.k as f64;
        let zeta = Complex64::from_polar(1.0, angle);
        let twist = Complex64::from_polar(1.0, -angle * data.lift_weight as f64);
        acc += twist * (c + zeta * s).powu(data.p);
    }
    (data.p + 1) as f64 * acc.re
}

fn require_invariant(f: &SphereSymbol, k: u32) -> Result<(), OrbifoldError> {
    if !f.is_rotation_invariant(k) {
        return Err(OrbifoldError::NotInvariant(f.to_string()));
    }
    Ok(())
}

/// Rows and columns `I` of a square matrix.
pub fn restrict(m: &ToeplitzMatrix, data: &OrbifoldData) -> ToeplitzMatrix {
    let idx = &data.indices;
    let block = nalgebra::DMatrix::from_fn(idx.len(), idx.len(), |a, b| m.data[(idx[a], idx[b])]);
    let basis = BasisInfo::Orbifold { k: data.k, p: data.p, indices: idx.clone() };
    ToeplitzMatrix::new(basis, m.symbol.clone(), block)
}

/// `T_{f,p}` on the invariant sections. Invariant symbols preserve every
/// residue class of section indices, so this is the sphere matrix on `I`.
pub fn orbifold_toeplitz(f: &SphereSymbol, data: &OrbifoldData) -> Result<ToeplitzMatrix, OrbifoldError> {
    require_invariant(f, data.k)?;
    let full = sphere::toeplitz_sphere(f, data.p as i64)?;
    Ok(restrict(&full, data))
}

/// `‖[T_f, T_g] − (i/p) T_{{f,g}}‖` on the invariant block.
pub fn orbifold_commutator_residual(f: &SphereSymbol, g: &SphereSymbol, data: &OrbifoldData) -> Result<f64, OrbifoldError> {
    for s in [f, g] {
        if !s.is_real() {
            return Err(SphereError::NotReal(s.to_string()).into());
        }
    }
    let bracket = poisson_sphere(f, g);
    let tf = orbifold_toeplitz(f, data)?;
    let tg = orbifold_toeplitz(g, data)?;
    let tb = orbifold_toeplitz(&bracket, data)?;
    let m = commutator(&tf.data, &tg.data) - tb.data * Complex64::new(0.0, 1.0 / data.p as f64);
    Ok(operator_norm(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> SphereSymbol {
        SphereSymbol::parse(text).unwrap()
    }

    #[test]
    fn index_sets() {
        assert_eq!(invariant_basis(2, 4, 0).unwrap().indices, vec![0, 2, 4]);
        assert_eq!(invariant_basis(3, 6, 0).unwrap().indices, vec![0, 3, 6]);
        for (k, p, w) in [(3u32, 10i64, 1u32), (4, 9, 3), (5, 17, 2)] {
            let d = invariant_basis(k, p, w).unwrap();
            assert_eq!(d.indices.len() as i64, (p - w as i64) / k as i64 + 1);
        }
        assert!(invariant_basis(3, 4, 3).is_err());
        assert!(invariant_basis(5, 2, 4).is_err());
    }

    #[test]
    fn bergman_routes_agree() {
        for (k, p, w) in [(2u32, 12i64, 0u32), (3, 10, 1), (4, 9, 2)] {
            let d = invariant_basis(k, p, w).unwrap();
            for x in [[0.0, 0.0, 1.0], [0.3, -0.4, 0.866], [1.0, 0.0, 0.0], [0.0, 0.6, -0.8]] {
                let a = orbifold_bergman_diag(&d, x);
                let b = orbifold_bergman_group_sum(&d, x);
                assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "{k} {p} {w} {x:?}: {a} vs {b}");
            }
        }
        let trivial = invariant_basis(1, 7, 0).unwrap();
        assert!((orbifold_bergman_diag(&trivial, [0.6, 0.0, 0.8]) - 8.0).abs() < 1e-12);
        let d = invariant_basis(2, 64, 0).unwrap();
        assert!((orbifold_bergman_diag(&d, [0.0, 0.0, 1.0]) / 65.0 - 2.0).abs() < 1e-12);
        assert!((orbifold_bergman_diag(&d, [1.0, 0.0, 0.0]) - 65.0).abs() < 0.01);
    }

    #[test]
    fn toeplitz_restriction() {
        let d = invariant_basis(3, 9, 0).unwrap();
        let t = orbifold_toeplitz(&s("x3"), &d).unwrap();
        for (a, &j) in d.indices.iter().enumerate() {
            assert!((t.get(a, a).re - (9.0 - 2.0 * j as f64) / 11.0).abs() < 1e-14);
        }
        let one = orbifold_toeplitz(&SphereSymbol::one(), &d).unwrap();
        assert!((one.data - nalgebra::DMatrix::identity(4, 4)).norm() < 1e-15);
        assert!(matches!(orbifold_toeplitz(&s("x1"), &d), Err(OrbifoldError::NotInvariant(_))));
    }

    #[test]
    fn off_block_entries_vanish() {
        let d = invariant_basis(2, 10, 0).unwrap();
        let f = s("x1^2 - x2^2 + x3");
        let full = sphere::toeplitz_sphere_exact(&f, 10).unwrap();
        for &(i, j) in full.entries.keys() {
            assert_eq!(i % 2, j % 2);
        }
        let block = orbifold_toeplitz(&f, &d).unwrap();
        assert_eq!(block.dim(), 6);
    }

    #[test]
    fn commutator_consistency() {
        let f = s("x3");
        let g = s("x1^2 - x2^2");
        let d = invariant_basis(2, 12, 0).unwrap();
        assert_eq!(orbifold_commutator_residual(&f, &f, &d).unwrap(), 0.0);
        let r = orbifold_commutator_residual(&f, &g, &d).unwrap();
        let tf = sphere::toeplitz_sphere(&f, 12).unwrap();
        let tg = sphere::toeplitz_sphere(&g, 12).unwrap();
        let tb = sphere::toeplitz_sphere(&poisson_sphere(&f, &g), 12).unwrap();
        let full = commutator(&tf.data, &tg.data) - tb.data * Complex64::new(0.0, 1.0 / 12.0);
        let m = ToeplitzMatrix::new(BasisInfo::Sphere { p: 12 }, "", full);
        let direct = operator_norm(&restrict(&m, &d).data);
        assert!((r - direct).abs() < 1e-14);
    }
}
