use super::SphereSymbol;
use crate::poly::Poly;

const LATTICE_POINTS: usize = 4096;
const NEWTON_STEPS: usize = 20;
const SEEDS: usize = 8;

/// Fibonacci lattice of `n` nearly uniform points on `S²`.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalized(a: [f64; 3]) -> [f64; 3] {
    let r = dot(a, a).sqrt();
    [a[0] / r, a[1] / r, a[2] / r]
}

fn tangent_frame(x: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axis = (0..3).min_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs())).unwrap();
    let mut a = [0.0; 3];
    a[axis] = 1.0;
    let ax = dot(a, x);
    let e1 = normalized([a[0] - ax * x[0], a[1] - ax * x[1], a[2] - ax * x[2]]);
    (e1, cross(x, e1))
}

/// Newton step along concave eigendirections of the tangent Hessian and a
/// damped gradient step along the rest.
fn ascent_step(h: [[f64; 2]; 2], g: [f64; 2]) -> [f64; 2] {
    let mean = 0.5 * (h[0][0] + h[1][1]);
    let gap = (0.25 * (h[0][0] - h[1][1]).powi(2) + h[0][1] * h[0][1]).sqrt();
    let lambdas = [mean - gap, mean + gap];
    let theta = 0.5 * (2.0 * h[0][1]).atan2(h[0][0] - h[1][1]);
    // eigenvector of mean + gap is (cos θ, sin θ)
    let vecs = [[-theta.sin(), theta.cos()], [theta.cos(), theta.sin()]];
    let scale = 1.0 / (1.0 + lambdas[0].abs().max(lambdas[1].abs()));
    let mut step = [0.0; 2];
    for (lambda, v) in lambdas.iter().zip(vecs) {
        let gv = g[0] * v[0] + g[1] * v[1];
        let c = if *lambda < -1e-12 { -gv / lambda } else { gv * scale };
        step[0] += c * v[0];
        step[1] += c * v[1];
    }
    step
}

/// Riemannian Newton ascent of `h` from `x`, with backtracking so the value
/// never decreases; falls back to a gradient step where `h` is not concave.
fn refine(h: &SphereSymbol, mut x: [f64; 3]) -> f64 {
    let mut best = h.real_jet(x).0;
    for _ in 0..NEWTON_STEPS {
        let (_, grad, hess) = h.real_jet(x);
        let (e1, e2) = tangent_frame(x);
        let radial = dot(x, grad);
        let g = [dot(e1, grad), dot(e2, grad)];
        let apply = |u: [f64; 3], v: [f64; 3]| -> f64 {
            (0..3).map(|i| (0..3).map(|j| u[i] * hess[i][j] * v[j]).sum::<f64>()).sum()
        };
        let h11 = apply(e1, e1) - radial;
        let h22 = apply(e2, e2) - radial;
        let h12 = apply(e1, e2);
        let step = ascent_step([[h11, h12], [h12, h22]], g);
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let cand = normalized([
                x[0] + t * (step[0] * e1[0] + step[1] * e2[0]),
                x[1] + t * (step[0] * e1[1] + step[1] * e2[1]),
                x[2] + t * (step[0] * e1[2] + step[1] * e2[2]),
            ]);
            let v = h.real_jet(cand).0;
            if v >= best {
                x = cand;
                best = v;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    best
}

fn maximize(h: &SphereSymbol) -> f64 {
    let lattice = fibonacci_sphere(LATTICE_POINTS);
    let mut scored: Vec<(f64, [f64; 3])> = lattice.into_iter().map(|x| (h.real_jet(x).0, x)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.iter().take(SEEDS).map(|&(_, x)| refine(h, x)).fold(f64::NEG_INFINITY, f64::max)
}

/// `sup_{S²} |f|` by lattice sampling plus Newton refinement.
pub fn sup_norm(f: &SphereSymbol) -> f64 {
    if f.is_real() {
        let up = maximize(f);
        let down = maximize(&f.scale(&crate::exact::GaussianRational::from_int(-1)));
        return up.max(down).max(0.0);
    }
    // |f|² = f·f̄ is a real polynomial
    let conj = SphereSymbol::from_poly(Poly::conj_coefficients(f.poly()));
    maximize(&f.mul(&conj)).max(0.0).sqrt()
}
