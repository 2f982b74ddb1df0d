//! Seeded random matrices for property checks.
//!
//! Everything is driven by a `ChaCha8Rng`, so a `(seed, call sequence)` pair
//! replays exactly. Ginibre entries are complex Gaussians with unit variance
//! split evenly between real and imaginary parts.

use crate::linalg::{c, cr, CMat, HermitianEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn ginibre(&mut self, n: usize) -> CMat {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMat::from_fn(n, n, |_, _| c(s * self.normal(), s * self.normal()))
    }

    pub fn hermitian(&mut self, n: usize) -> CMat {
        let g = self.ginibre(n);
        (&g + g.adjoint()) * cr(0.5)
    }

    /// Random positive semidefinite matrix `G G* / n`.
    pub fn psd(&mut self, n: usize) -> CMat {
        let g = self.ginibre(n);
        &g * g.adjoint() * cr(1.0 / n as f64)
    }

    /// Haar-ish unitary from the eigenvectors of a random Hermitian matrix.
    pub fn unitary(&mut self, n: usize) -> CMat {
        let h = self.hermitian(n);
        let qr = self.ginibre(n).qr();
        let q = qr.q();
        // Mix in a second source so the result is not tied to the canonical
        // eigenvector phases.
        HermitianEigen::new(&h).vectors * q
    }

    /// Random Hermitian `0 <= m <= 1` with eigenvalues uniform in [0, 1].
    pub fn contraction(&mut self, n: usize) -> CMat {
        let u = self.unitary(n);
        let d: Vec<f64> = (0..n).map(|_| self.uniform()).collect();
        &u * crate::linalg::diag_real(&d) * u.adjoint()
    }

    /// Random orthogonal projection of random rank in `0..=n`.
    pub fn projection(&mut self, n: usize) -> CMat {
        let u = self.unitary(n);
        let d: Vec<f64> = (0..n).map(|_| if self.uniform() < 0.5 { 0.0 } else { 1.0 }).collect();
        &u * crate::linalg::diag_real(&d) * u.adjoint()
    }

    /// Faithful Gibbs state `e^{-beta h} / Z` for a random Hermitian `h`.
    pub fn gibbs_state(&mut self, n: usize, beta: f64) -> CMat {
        let h = self.hermitian(n);
        let e = crate::linalg::hermitian_exp(&h, -beta);
        let z = crate::linalg::trace(&e).re;
        e * cr(1.0 / z)
    }
}
