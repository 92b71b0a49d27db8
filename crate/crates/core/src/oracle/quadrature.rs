use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::kernel::{model_kernel_eval, phi_norm_sqr, KernelPoly, ModelWeights, MultiIndex};
use crate::sphere::SphereSymbol;

/// Golub–Welsch nodes and weights from a symmetric tridiagonal Jacobi matrix.
fn golub_welsch(off: &[f64], mass: f64) -> (Vec<f64>, Vec<f64>) {
    let n = off.len() + 1;
    let j = DMatrix::from_fn(n, n, |r, c| if r + 1 == c { off[r] } else if c + 1 == r { off[c] } else { 0.0 });
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mass * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Nodes and weights for `∫ g(x) e^{−x²} dx`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    golub_welsch(&off, std::f64::consts::PI.sqrt())
}

/// Nodes and weights for `∫_{−1}^{1} g(x) dx`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let off: Vec<f64> = (1..n).map(|k| k as f64 / ((4 * k * k - 1) as f64).sqrt()).collect();
    golub_welsch(&off, 2.0)
}

/// `∫_ℂ |z|^{2k} (1+|z|²)^{−p−2} dxdy/π` by quadrature in `r = tan θ`.
pub fn section_norm_quadrature(p: u32, k: u32, nodes: usize) -> f64 {
    let (x, wts) = gauss_legendre(nodes);
    let half = std::f64::consts::FRAC_PI_4;
    x.iter()
        .zip(&wts)
        .map(|(&t, &wt)| {
            let theta = half * (t + 1.0);
            // 2r dr / (1+r²)^{p+2} · r^{2k} with r = tan θ
            2.0 * theta.sin().powi(2 * k as i32 + 1) * theta.cos().powi(2 * (p - k) as i32 + 1) * wt * half
        })
        .sum()
}

/// `⟨s_j, f s_k⟩/√(‖s_j‖²‖s_k‖²)` by quadrature over the sphere in polar
/// angles, where `s̄_j s_k h = sin^{j+k}(θ/2) cos^{2p−j−k}(θ/2) e^{i(j−k)φ}`
/// and `ω = sin θ dθ dφ / 4π`.
pub fn sphere_toeplitz_quadrature(f: &SphereSymbol, p: u32, nodes: usize) -> DMatrix<Complex64> {
    let (x, wts) = gauss_legendre(nodes);
    let m = 2 * p as usize + 2 * f.degree() as usize + 8;
    let dim = p as usize + 1;
    let mut raw = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut norms = vec![0.0; dim];
    let pi = std::f64::consts::PI;
    for (&t, &wt) in x.iter().zip(&wts) {
        let theta = pi / 2.0 * (t + 1.0);
        let (sh, ch) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        let radial = wt * pi / 2.0 * theta.sin() / (4.0 * pi);
        for k in 0..dim {
            norms[k] += radial * 2.0 * pi * sh.powi(2 * k as i32) * ch.powi(2 * (p as i32 - k as i32));
        }
        for s in 0..m {
            let phi = 2.0 * pi * s as f64 / m as f64;
            let point = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let fv = f.eval(point) * (radial * 2.0 * pi / m as f64);
            for j in 0..dim {
                for k in 0..dim {
                    let amp = sh.powi((j + k) as i32) * ch.powi(2 * p as i32 - (j + k) as i32);
                    let phase = Complex64::from_polar(1.0, (j as f64 - k as f64) * phi);
                    raw[(j, k)] += fv * phase * amp;
                }
            }
        }
    }
    DMatrix::from_fn(dim, dim, |j, k| raw[(j, k)] / (norms[j] * norms[k]).sqrt())
}

/// `⟨φ_β, z^μ z̄^ν φ_γ⟩` by tensor Gauss–Hermite quadrature in each
/// coordinate plane.
pub fn fock_toeplitz_quadrature(
    w: &ModelWeights,
    beta: &MultiIndex,
    gamma: &MultiIndex,
    mu: &MultiIndex,
    nu: &MultiIndex,
    nodes: usize,
) -> Complex64 {
    let (x, wts) = gauss_hermite(nodes);
    let a = w.to_f64();
    let mut value = Complex64::new((phi_norm_sqr(w, beta) * phi_norm_sqr(w, gamma)).sqrt(), 0.0);
    for j in 0..w.n() {
        let s = (2.0 / a[j]).sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&xi, &wi) in x.iter().zip(&wts) {
            for (&yi, &wk) in x.iter().zip(&wts) {
                let z = Complex64::new(s * xi, s * yi);
                let zb = z.conj();
                acc += wi * wk * zb.powu(beta.0[j] + nu.0[j]) * z.powu(gamma.0[j] + mu.0[j]);
            }
        }
        value *= acc * s * s;
    }
    value
}

/// `∫ F(Z,W) G(W,Z′) 𝒫(Z,W) 𝒫(W,Z′) dW` by tensor Gauss–Hermite quadrature
/// against `e^{−½Σa|w|²}`. Points are complex coordinates.
pub fn composition_quadrature(
    w: &ModelWeights,
    f: &KernelPoly,
    g: &KernelPoly,
    z: &[Complex64],
    zp: &[Complex64],
    nodes: usize,
) -> Complex64 {
    let n = w.n();
    let a = w.to_f64();
    let (x, wts) = gauss_hermite(nodes);
    let to_real = |c: &[Complex64]| -> Vec<f64> { c.iter().flat_map(|v| [v.re, v.im]).collect() };
    let zr = to_real(z);
    let zpr = to_real(zp);
    let mut total = Complex64::new(0.0, 0.0);
    let points = nodes.pow(2 * n as u32);
    for idx in 0..points {
        let mut rest = idx;
        let mut wv = vec![Complex64::new(0.0, 0.0); n];
        let mut weight = 1.0;
        for j in 0..n {
            let ix = rest % nodes;
            rest /= nodes;
            let iy = rest % nodes;
            rest /= nodes;
            let s = (2.0 / a[j]).sqrt();
            wv[j] = Complex64::new(s * x[ix], s * x[iy]);
            weight *= wts[ix] * wts[iy] * s * s;
        }
        let wr = to_real(&wv);
        // 𝒫(Z,W)𝒫(W,Z′) with the Gaussian weight divided out
        let mut gauss = 0.0;
        for j in 0..n {
            gauss += a[j] * wv[j].norm_sqr() / 2.0;
        }
        let kernels = model_kernel_eval(w, &zr, &wr) * model_kernel_eval(w, &wr, &zpr) * gauss.exp();
        total += weight * f.eval_complex(z, &wv) * g.eval_complex(&wv, zp) * kernels;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials() {
        let (x, w) = gauss_hermite(12);
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
        let (x, w) = gauss_legendre(8);
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert!((i - 2.0 / 7.0).abs() < 1e-14);
    }
}
