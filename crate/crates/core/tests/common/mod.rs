//! Independent oracles for the integration tests. Everything here is written
//! from the defining formulas with plain nalgebra calls and never goes
//! through the library's spectral or modular machinery.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(r: &mut ChaCha8Rng, n: usize) -> M {
    M::from_fn(n, n, |_, _| {
        let re: f64 = r.sample(StandardNormal);
        let im: f64 = r.sample(StandardNormal);
        c(re, im) / 2f64.sqrt()
    })
}

pub fn hermitian(r: &mut ChaCha8Rng, n: usize) -> M {
    let g = ginibre(r, n);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// A full-rank density matrix with spectrum bounded away from zero.
pub fn random_state(r: &mut ChaCha8Rng, n: usize) -> M {
    let g = ginibre(r, n);
    let m = &g * g.adjoint() + M::identity(n, n) * c(0.2, 0.0);
    let tr = m.trace();
    m / tr
}

pub fn frob(m: &M) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn unit(m: M) -> M {
    let s = frob(&m);
    m / c(s, 0.0)
}

/// `f(rho)` for Hermitian `rho` via nalgebra's eigendecomposition.
pub fn hermitian_function(h: &M, f: impl Fn(f64) -> Complex64) -> M {
    let eig = h.clone().symmetric_eigen();
    let d = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&l| f(l)));
    &eig.eigenvectors * M::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

pub fn rho_pow(rho: &M, p: f64) -> M {
    hermitian_function(rho, |l| c(l.powf(p), 0.0))
}

/// `rho^{it}`.
pub fn rho_it(rho: &M, t: f64) -> M {
    hermitian_function(rho, |l| Complex64::from_polar(1.0, t * l.ln()))
}

/// `A -> rho^{1/4} A rho^{1/4}`.
pub fn i0(rho: &M, a: &M) -> M {
    let q = rho_pow(rho, 0.25);
    &q * a * &q
}

/// `sigma_{t + i s}(A) = rho^{i(t+is)} A rho^{-i(t+is)}`, i.e.
/// `rho^{it} rho^{-s} A rho^{s} rho^{-it}`.
pub fn sigma(rho: &M, a: &M, t: f64, s: f64) -> M {
    let u = rho_it(rho, t);
    &u * rho_pow(rho, -s) * a * rho_pow(rho, s) * u.adjoint()
}

pub fn f0(t: f64) -> f64 {
    1.0 / (2.0 * std::f64::consts::PI * t).cosh()
}

/// `int f0(t) e^{i kappa t} dt` in closed form.
pub fn f0_hat(kappa: f64) -> f64 {
    1.0 / ((kappa / 4.0).exp() + (-kappa / 4.0).exp())
}

/// Trapezoid rule on `[-T, T]`; spectrally accurate for `f0`, whose
/// integrands are analytic and decay like `e^{-2 pi |t|}`.
pub fn trapezoid<F: FnMut(f64) -> M>(n: usize, half_width: f64, step: f64, mut g: F) -> M {
    let k = (half_width / step).round() as i64;
    let mut acc = M::zeros(n, n);
    for i in -k..=k {
        let t = i as f64 * step;
        acc += g(t) * c(step, 0.0);
    }
    acc
}

/// `E[xi] = int f0(t) sum_{y in {x, x*}} ||sigma_{t-i/4}(y) xi - xi sigma_{t+i/4}(y)||^2 dt`.
pub fn f0_form(rho: &M, x: &M, xi: &M) -> f64 {
    let step = 0.01;
    let k = (10.0 / step) as i64;
    let mut acc = 0.0;
    for i in -k..=k {
        let t = i as f64 * step;
        for y in [x.clone(), x.adjoint()] {
            let d = sigma(rho, &y, t, -0.25) * xi - xi * sigma(rho, &y, t, 0.25);
            acc += step * f0(t) * frob(&d).powi(2);
        }
    }
    acc
}

/// `sum_k (y* y A - 2 y* A y + A y* y) + i [Q, A]`, written out term by term.
pub fn lindblad(ys: &[M], q: &M, a: &M) -> M {
    let mut out = (q * a - a * q) * c(0.0, 1.0);
    for y in ys {
        let ya = y.adjoint();
        out += &ya * y * a - (&ya * a * y) * c(2.0, 0.0) + a * &ya * y;
    }
    out
}

/// Real basis `E_i` of the Hermitian 2x2 matrices for the coordinates
/// `Y = [[a, b + ic], [b - ic, d]]`.
fn hermitian_basis_2x2() -> [M; 4] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    [
        M::from_row_slice(2, 2, &[o, z, z, z]),
        M::from_row_slice(2, 2, &[z, o, o, z]),
        M::from_row_slice(2, 2, &[z, c(0.0, 1.0), c(0.0, -1.0), z]),
        M::from_row_slice(2, 2, &[z, z, z, o]),
    ]
}

/// Nearest point of `{Y Hermitian : 0 <= Y <= top}` to `eta` in the
/// Hilbert-Schmidt norm for 2x2 matrices, by a log-barrier path-following
/// Newton method on the four real coordinates of `Y`.
///
/// The barrier Hessian `tr(Y^-1 E_i Y^-1 E_j)` is formed as a Gram matrix of
/// `Y^-1/2 E_i Y^-1/2`, so it stays positive semidefinite near the boundary.
pub fn interval_projection_2x2(top: &M, eta: &M) -> M {
    let basis = hermitian_basis_2x2();
    let from = |v: &[f64; 4]| {
        basis
            .iter()
            .zip(v)
            .fold(M::zeros(2, 2), |acc, (e, x)| acc + e * c(*x, 0.0))
    };
    let pd = |m: &M| m.clone().symmetric_eigen().eigenvalues.min() > 0.0;
    let logdet = |m: &M| {
        m.clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|l| l.ln())
            .sum::<f64>()
    };
    let objective = |y: &M, mu: f64| frob(&(y - eta)).powi(2) - mu * (logdet(y) + logdet(&(top - y)));

    // Adds the gradient and Hessian of `-mu log det(m)` where `m` is `Y`
    // (sign +1) or `top - Y` (sign -1).
    let barrier = |m: &M, sign: f64, mu: f64, g: &mut DVector<f64>, h: &mut DMatrix<f64>| {
        let w = hermitian_function(m, |l| c(l.powf(-0.5), 0.0));
        let wew: Vec<M> = basis.iter().map(|e| &w * e * &w).collect();
        for i in 0..4 {
            g[i] -= sign * mu * wew[i].trace().re;
            for j in 0..4 {
                h[(i, j)] += mu * (&wew[i] * &wew[j]).trace().re;
            }
        }
    };

    let mut y = top * c(0.5, 0.0);
    let mut mu = 1.0;
    while mu > 1e-16 {
        for _ in 0..100 {
            let mut g = DVector::<f64>::zeros(4);
            let mut h = DMatrix::<f64>::zeros(4, 4);
            let d = &y - eta;
            for i in 0..4 {
                g[i] = 2.0 * (basis[i].adjoint() * &d).trace().re;
                for j in 0..4 {
                    h[(i, j)] = 2.0 * (&basis[i] * &basis[j]).trace().re;
                }
            }
            barrier(&y, 1.0, mu, &mut g, &mut h);
            barrier(&(top - &y), -1.0, mu, &mut g, &mut h);
            let Some(chol) = h.cholesky() else { break };
            let step = chol.solve(&(-&g));
            let decrement = -g.dot(&step);
            if decrement < 1e-24 {
                break;
            }
            let f_now = objective(&y, mu);
            let mut s = 1.0;
            let mut moved = false;
            while s > 1e-20 {
                let v = [s * step[0], s * step[1], s * step[2], s * step[3]];
                let cand = &y + from(&v);
                if pd(&cand) && pd(&(top - &cand)) && objective(&cand, mu) <= f_now - 0.25 * s * decrement {
                    y = cand;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            if !moved {
                break;
            }
        }
        mu *= 0.1;
    }
    y
}

/// Applies a superoperator stored in the eigenbasis `u` of `rho` (pair
/// index `a * n + b`) to an input-basis matrix. `u` must be the basis the
/// operator was built in, since eigenvector phases are a convention.
pub fn apply_eigen_super(h: &M, u: &M, x: &M) -> M {
    let n = x.nrows();
    let xe = u.adjoint() * x * u;
    let v = DVector::from_fn(n * n, |k, _| xe[(k / n, k % n)]);
    let w = h * v;
    let ye = M::from_fn(n, n, |a, b| w[a * n + b]);
    u * ye * u.adjoint()
}
