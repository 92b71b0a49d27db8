use btq::exact::{rat, rat_to_f64, GaussianRational};
use btq::fock::{fock_basis, toeplitz_monomial_exact};
use btq::harness::{random_jet, random_weights};
use btq::kernel::{compose_k, model_kernel_eval, q1_of_jet, spectrum, KernelPoly, ModelWeights, MultiIndex};
use btq::matrix::operator_norm;
use btq::oracle::{
    composition_quadrature, fock_toeplitz_quadrature, section_norm_quadrature, sphere_toeplitz_quadrature,
    spectrum_bruteforce, wick_compose,
};
use btq::sphere::{section_norms, toeplitz_sphere, SphereSymbol};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn wick_agrees_with_normal_ordering() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=2 {
        for _ in 0..10 {
            let w = random_weights(&mut rng, n);
            let f = q1_of_jet(&w, &random_jet(&mut rng, n, 3)).unwrap();
            let g = q1_of_jet(&w, &random_jet(&mut rng, n, 3)).unwrap();
            let g = &g + &(&KernelPoly::zbar(n, 0) * &KernelPoly::zbarp(n, n - 1));
            assert_eq!(wick_compose(&w, &f, &g).unwrap(), compose_k(&w, &f, &g).unwrap());
        }
    }
}

#[test]
fn composition_matches_quadrature() {
    let w = ModelWeights::new(vec![rat(3, 2), rat(4, 1)]).unwrap();
    let n = 2;
    let f = &(&KernelPoly::zbarp(n, 0) * &KernelPoly::z(n, 1)) + &KernelPoly::zbar(n, 1);
    let g = &(&KernelPoly::z(n, 0) * &KernelPoly::zbar(n, 0)) + &KernelPoly::zp(n, 1).scale(&GaussianRational::i());
    let k = compose_k(&w, &f, &g).unwrap();
    let z = [Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.4)];
    let zp = [Complex64::new(0.2, 0.1), Complex64::new(0.5, -0.3)];
    let quad = composition_quadrature(&w, &f, &g, &z, &zp, 16);
    let real = |c: &[Complex64]| -> Vec<f64> { c.iter().flat_map(|v| [v.re, v.im]).collect() };
    let exact = k.eval_complex(&z, &zp) * model_kernel_eval(&w, &real(&z), &real(&zp));
    assert!((quad - exact).norm() < 1e-10 * exact.norm().max(1e-3), "{quad} vs {exact}");
}

#[test]
fn fock_toeplitz_matches_quadrature() {
    let w = ModelWeights::new(vec![rat(5, 2)]).unwrap();
    let basis = fock_basis(&w, 5).unwrap();
    let (mu, nu) = (MultiIndex(vec![2]), MultiIndex(vec![1]));
    let exact = toeplitz_monomial_exact(&basis, &mu, &nu).unwrap();
    for (i, beta) in basis.indices().iter().enumerate() {
        for (j, gamma) in basis.indices().iter().enumerate() {
            let q = fock_toeplitz_quadrature(&w, beta, gamma, &mu, &nu, 24);
            assert!((q - exact.get(i, j).to_complex()).norm() < 1e-10, "{i} {j}");
        }
    }
}

#[test]
fn sphere_matrices_match_quadrature() {
    for (text, p) in [("x1^2*x2 - x3", 6u32), ("x1*x3 + 2*x2^2", 9), ("x3^4", 4)] {
        let f = SphereSymbol::parse(text).unwrap();
        let exact = toeplitz_sphere(&f, p as i64).unwrap().data;
        let quad = sphere_toeplitz_quadrature(&f, p, 40);
        assert!(operator_norm(&(exact - quad)) < 1e-11, "{text}");
    }
    let norms = section_norms(10).unwrap();
    for (k, nrm) in norms.norms.iter().enumerate() {
        assert!((section_norm_quadrature(10, k as u32, 30) - rat_to_f64(nrm)).abs() < 1e-14);
    }
}

#[test]
fn spectrum_matches_brute_force() {
    let w = ModelWeights::new(vec![rat(3, 1), rat(7, 2)]).unwrap();
    let exact = spectrum(&w, &rat(20, 1)).unwrap();
    let brute = spectrum_bruteforce(&w, 6, 20.0);
    assert_eq!(exact.len(), brute.len());
    for (e, b) in exact.iter().zip(brute) {
        assert!((rat_to_f64(e) - b).abs() < 1e-8);
    }
}
