//! The quadratic form
//!
//! `E(eta, xi) = int <D_t eta, D_t xi> f(t) dt + int <D'_t eta, D'_t xi> f(t) dt`
//!
//! with `D_t = sigma_{t-i/4}(x) - j(sigma_{t-i/4}(x*))` and `D'_t` the same
//! with `x` and `x*` exchanged, and its operator `H`.
//!
//! In the matrix model `j(sigma_{t-i/4}(x*))` is right multiplication by
//! `sigma_{t+i/4}(x)`, so `D_t X = sigma_{t-i/4}(x) X - X sigma_{t+i/4}(x)`.
//!
//! Two engines build `H`:
//!
//! * `ExactSpectral`: `H = int Delta^{it} K Delta^{-it} f(t) dt` with
//!   `K = D_0* D_0 + D'_0* D'_0`, i.e. entry `[(a,b),(c,d)]` of `K` (in the
//!   eigenbasis of `rho`) times `hat(kappa_ab - kappa_cd)`;
//! * `Quadrature`: sums `D_t* D_t + D'_t* D'_t` over a quadrature rule in
//!   `t`, with every `sigma` evaluated from powers of `rho`.

use crate::error::{MdfError, Result};
use crate::kernel::{check_admissible, AdmissibilityCertificate, KernelFunction, KernelRule};
use crate::linalg::{cr, max_abs, CMat, HermitianEigen};
use crate::modular::{modular_map_super, smear_super, superop_frequency_range, ModularMap};
use crate::sampling::Sampler;
use crate::standard_form::{jordan_decompose, HsVector, StandardForm};
use crate::superop::SuperOperator;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

pub const H_XI0_TOL: f64 = 1e-8;
pub const J_REAL_TOL: f64 = 1e-8;
pub const CROSS_TERM_TOL: f64 = 1e-9;
pub const CONE_FORM_TOL: f64 = 1e-8;
pub const PSD_TOL: f64 = 1e-9;
/// Relative disagreement at which [`cross_check_engines`] reports an error.
pub const ENGINE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    ExactSpectral,
    Quadrature,
}

#[derive(Clone, Debug)]
pub struct DirichletSpec {
    x: CMat,
    kernel: KernelFunction,
    engine: Engine,
    certificate: AdmissibilityCertificate,
}

impl DirichletSpec {
    /// Fails with `NotAdmissible` unless the kernel is `f0` or passes
    /// [`check_admissible`].
    pub fn new(x: CMat, kernel: KernelFunction, engine: Engine) -> Result<Self> {
        if x.nrows() != x.ncols() {
            return Err(MdfError::InvalidInput("coefficient must be square".into()));
        }
        let certificate = check_admissible(&kernel);
        if !certificate.usable() {
            return Err(MdfError::NotAdmissible(format!(
                "kernel {} fails the admissibility check (positivity {}, boundary sum {:?}, decay exponent {:.3})",
                kernel.name(),
                certificate.positivity_ok,
                certificate.boundary_sum,
                certificate.decay_exponent
            )));
        }
        Ok(Self {
            x,
            kernel,
            engine,
            certificate,
        })
    }

    pub fn with_engine(&self, engine: Engine) -> Self {
        Self { engine, ..self.clone() }
    }

    pub fn x(&self) -> &CMat {
        &self.x
    }

    pub fn kernel(&self) -> &KernelFunction {
        &self.kernel
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn certificate(&self) -> &AdmissibilityCertificate {
        &self.certificate
    }
}

/// `D* D` for `D = L(a) - R(b)`:
/// `L(a* a) + R(b b*) - L(a*) R(b) - L(a) R(b*)`.
fn derivation_square(a: &CMat, b: &CMat) -> SuperOperator {
    let a_adj = a.adjoint();
    let b_adj = b.adjoint();
    let mut k = &SuperOperator::left(&(&a_adj * a)) + &SuperOperator::right(&(b * &b_adj));
    k = &k - &SuperOperator::sandwich(&a_adj, b);
    &k - &SuperOperator::sandwich(a, &b_adj)
}

/// `(sigma_{t-i/4}(y), sigma_{t+i/4}(y))` in the input basis, from powers of `rho`.
fn shifted_pair(sf: &StandardForm, y: &CMat, t: f64) -> (CMat, CMat) {
    let u = sf.rho_imaginary_power(t);
    let u_adj = u.adjoint();
    let q = sf.rho_quarter();
    let qi = sf.rho_neg_quarter();
    let a = &u * q * y * qi * &u_adj;
    let b = &u * qi * y * q * &u_adj;
    (a, b)
}

/// `delta(t): X -> sigma_{t-i/4}(x) X - X sigma_{t+i/4}(x)`.
pub fn derivation_at(sf: &StandardForm, x: &CMat, t: f64) -> Result<SuperOperator> {
    sf.check_dim(x)?;
    let (a, b) = shifted_pair(sf, x, t);
    Ok(&sf.left_super(&a) - &sf.right_super(&b))
}

/// `K = D_0* D_0 + D'_0* D'_0` in the eigenbasis.
pub fn dirichlet_integrand(sf: &StandardForm, x: &CMat) -> Result<SuperOperator> {
    sf.check_dim(x)?;
    let plus = |y: &CMat| {
        let e = sf.to_eigenbasis(y);
        if sf.is_tracial() {
            return (e.clone(), e);
        }
        let a = CMat::from_fn(e.nrows(), e.ncols(), |j, k| {
            e[(j, k)] * (sf.kappa()[(j, k)] / 4.0).exp()
        });
        let b = CMat::from_fn(e.nrows(), e.ncols(), |j, k| {
            e[(j, k)] * (-sf.kappa()[(j, k)] / 4.0).exp()
        });
        (a, b)
    };
    let (a, b) = plus(x);
    let (ap, bp) = plus(&x.adjoint());
    Ok(&derivation_square(&a, &b) + &derivation_square(&ap, &bp))
}

fn exact_operator(sf: &StandardForm, x: &CMat, f: &KernelFunction) -> Result<SuperOperator> {
    smear_super(sf, &dirichlet_integrand(sf, x)?, f)
}

fn quadrature_operator(sf: &StandardForm, x: &CMat, f: &KernelFunction) -> Result<SuperOperator> {
    let (lo, hi) = superop_frequency_range(sf);
    let rule = KernelRule::new(f, lo, hi, 0)?;
    let n = sf.dim();
    let x_adj = x.adjoint();
    let mut acc = SuperOperator::zeros(n);
    for &(t, w) in rule.nodes() {
        let (a, b) = shifted_pair(sf, x, t);
        let (ap, bp) = shifted_pair(sf, &x_adj, t);
        let term = &derivation_square(&sf.to_eigenbasis(&a), &sf.to_eigenbasis(&b))
            + &derivation_square(&sf.to_eigenbasis(&ap), &sf.to_eigenbasis(&bp));
        acc = &acc + &term.scale(cr(w));
    }
    Ok(acc)
}

/// The operator `H` of the form, built with `spec.engine()`.
pub fn dirichlet_operator(spec: &DirichletSpec, sf: &StandardForm) -> Result<SuperOperator> {
    sf.check_dim(&spec.x)?;
    match spec.engine {
        Engine::ExactSpectral => exact_operator(sf, &spec.x, &spec.kernel),
        Engine::Quadrature => quadrature_operator(sf, &spec.x, &spec.kernel),
    }
}

/// `E(eta, xi) = <eta, H xi>` for an already assembled `H`.
pub fn form_value(sf: &StandardForm, h: &SuperOperator, eta: &HsVector, xi: &HsVector) -> Result<Complex64> {
    Ok(eta.inner(&sf.apply(h, xi)?))
}

/// `E(eta, xi)`. The quadrature engine integrates `<D_t eta, D_t xi>`
/// directly without forming `H`.
pub fn form_eval(spec: &DirichletSpec, sf: &StandardForm, eta: &HsVector, xi: &HsVector) -> Result<Complex64> {
    sf.check_dim(eta.matrix())?;
    sf.check_dim(xi.matrix())?;
    match spec.engine {
        Engine::ExactSpectral => form_value(sf, &dirichlet_operator(spec, sf)?, eta, xi),
        Engine::Quadrature => {
            let (lo, hi) = superop_frequency_range(sf);
            let rule = KernelRule::new(&spec.kernel, lo, hi, 0)?;
            let x_adj = spec.x.adjoint();
            let apply = |a: &CMat, b: &CMat, v: &HsVector| a * v.matrix() - v.matrix() * b;
            let mut total = Complex64::new(0.0, 0.0);
            for &(t, w) in rule.nodes() {
                for y in [&spec.x, &x_adj] {
                    let (a, b) = shifted_pair(sf, y, t);
                    let de = HsVector::new(apply(&a, &b, eta));
                    let dx = HsVector::new(apply(&a, &b, xi));
                    total += de.inner(&dx) * w;
                }
            }
            Ok(total)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EngineComparison {
    pub max_abs_difference: f64,
    pub relative: f64,
}

/// Builds `H` with both engines and compares them entrywise, relative to the
/// largest entry of the exact operator.
pub fn compare_engines(sf: &StandardForm, x: &CMat, f: &KernelFunction) -> Result<EngineComparison> {
    sf.check_dim(x)?;
    let exact = exact_operator(sf, x, f)?;
    let quad = quadrature_operator(sf, x, f)?;
    let diff = max_abs(&(exact.matrix() - quad.matrix()));
    let scale = exact.max_abs();
    let relative = if scale > 0.0 { diff / scale } else { diff };
    Ok(EngineComparison {
        max_abs_difference: diff,
        relative,
    })
}

/// [`compare_engines`], failing with `EngineDisagreement` above `tolerance`.
pub fn cross_check_engines(
    sf: &StandardForm,
    x: &CMat,
    f: &KernelFunction,
    tolerance: f64,
) -> Result<EngineComparison> {
    let cmp = compare_engines(sf, x, f)?;
    if !(cmp.relative <= tolerance) {
        return Err(MdfError::EngineDisagreement {
            relative: cmp.relative,
            tolerance,
        });
    }
    Ok(cmp)
}

/// `x1 = (x + x*) / sqrt 2`, `x2 = i (x - x*) / sqrt 2`.
pub fn split_self_adjoint(x: &CMat) -> (CMat, CMat) {
    let x_adj = x.adjoint();
    let x1 = (x + &x_adj) * cr(FRAC_1_SQRT_2);
    let x2 = (x - &x_adj) * Complex64::new(0.0, FRAC_1_SQRT_2);
    (x1, x2)
}

/// Compares `int T(sigma_t(C)) f(t) dt` (multiplier route) with
/// `int sigma_t(C) (f(t + i/4) + f(t - i/4)) dt` (quadrature against the
/// boundary-sum kernel) for `C = x j(x) + x* j(x*)`. For `f0` the right side
/// is `C` itself. Returns the Frobenius norm of the difference.
pub fn boundary_identity_residual(sf: &StandardForm, x: &CMat, f: &KernelFunction) -> Result<f64> {
    sf.check_dim(x)?;
    let cross = |y: &CMat| {
        let e = sf.to_eigenbasis(y);
        &SuperOperator::sandwich(&e, &e.adjoint()) + &SuperOperator::sandwich(&e.adjoint(), &e)
    };
    let c_op = cross(x);
    let lhs = modular_map_super(sf, &smear_super(sf, &c_op, f)?, ModularMap::T)?;
    let rhs = match f.boundary_sum_kernel() {
        None => c_op,
        Some(g) => {
            let (lo, hi) = superop_frequency_range(sf);
            let rule = KernelRule::new(&g, lo, hi, 0)?;
            let mut acc = SuperOperator::zeros(sf.dim());
            for &(t, w) in rule.nodes() {
                let u = sf.rho_imaginary_power(t);
                let xt = &u * x * u.adjoint();
                acc = &acc + &cross(&xt).scale(cr(w));
            }
            acc
        }
    };
    Ok((&lhs - &rhs).frobenius_norm())
}

#[derive(Clone, Debug, Serialize)]
pub struct DirichletReport {
    pub kernel: String,
    pub engine: Engine,
    pub samples: usize,
    pub seed: u64,
    /// `||H xi0||`.
    pub h_xi0_residual: f64,
    /// `||J H J - H||_F`.
    pub j_real_residual: f64,
    /// Largest `|E[J xi] - conj(E[xi])|` over sampled vectors.
    pub j_form_residual: f64,
    /// `||H - H*||_F`.
    pub self_adjoint_residual: f64,
    /// Samples with `Re E(xi+, xi-) > CROSS_TERM_TOL`.
    pub negativity_violations: usize,
    /// Largest `Re E(xi+, xi-)` seen.
    pub max_cross_term: f64,
    /// Largest `|E(xi, xi0)|` over sampled cone elements.
    pub cone_form_residual: f64,
    /// Smallest eigenvalue of `H`.
    pub psd_min_eig: f64,
}

impl DirichletReport {
    /// Names of the checks that failed.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.h_xi0_residual < H_XI0_TOL) {
            out.push(format!("||H xi0|| = {:e}", self.h_xi0_residual));
        }
        if !(self.j_real_residual < J_REAL_TOL) {
            out.push(format!("||JHJ - H|| = {:e}", self.j_real_residual));
        }
        if !(self.j_form_residual < J_REAL_TOL) {
            out.push(format!("|E[J xi] - conj E[xi]| = {:e}", self.j_form_residual));
        }
        if self.negativity_violations > 0 {
            out.push(format!(
                "{} samples with E(xi+, xi-) > {CROSS_TERM_TOL:e} (max {:e})",
                self.negativity_violations, self.max_cross_term
            ));
        }
        if !(self.cone_form_residual < CONE_FORM_TOL) {
            out.push(format!("|E(xi, xi0)| = {:e}", self.cone_form_residual));
        }
        if !(self.psd_min_eig >= -PSD_TOL) {
            out.push(format!("min eig H = {:e}", self.psd_min_eig));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Samples the Dirichlet-form properties of `H`.
pub fn verify_dirichlet(spec: &DirichletSpec, sf: &StandardForm, samples: usize, seed: u64) -> Result<DirichletReport> {
    if samples == 0 {
        return Err(MdfError::InvalidInput("samples must be at least 1".into()));
    }
    let h = dirichlet_operator(spec, sf)?;
    verify_operator(spec, sf, &h, samples, seed)
}

/// [`verify_dirichlet`] for an operator that has already been assembled.
pub fn verify_operator(
    spec: &DirichletSpec,
    sf: &StandardForm,
    h: &SuperOperator,
    samples: usize,
    seed: u64,
) -> Result<DirichletReport> {
    let n = sf.dim();
    let h_xi0_residual = sf.apply(h, sf.xi0())?.norm();
    let j_real_residual = h.j_reality_residual();
    let self_adjoint_residual = h.self_adjointness_residual();
    let psd_min_eig = HermitianEigen::new(&crate::linalg::hermitian_part(h.matrix())).min();

    let mut rng = Sampler::new(seed);
    let mut j_form_residual: f64 = 0.0;
    let mut negativity_violations = 0;
    let mut max_cross_term = f64::NEG_INFINITY;
    let mut cone_form_residual: f64 = 0.0;
    for _ in 0..samples {
        let v = HsVector::new(rng.ginibre(n));
        let e = form_value(sf, h, &v, &v)?;
        let ej = form_value(sf, h, &v.conj_j(), &v.conj_j())?;
        j_form_residual = j_form_residual.max((ej - e.conj()).norm());

        let xi = HsVector::new(rng.hermitian(n));
        let (plus, minus) = jordan_decompose(sf, &xi)?;
        let cross = form_value(sf, h, &plus, &minus)?.re;
        max_cross_term = max_cross_term.max(cross);
        if cross > CROSS_TERM_TOL {
            negativity_violations += 1;
        }

        let p = HsVector::new(rng.psd(n));
        cone_form_residual = cone_form_residual.max(form_value(sf, h, &p, sf.xi0())?.norm());
    }
    Ok(DirichletReport {
        kernel: spec.kernel.name(),
        engine: spec.engine,
        samples,
        seed,
        h_xi0_residual,
        j_real_residual,
        j_form_residual,
        self_adjoint_residual,
        negativity_violations,
        max_cross_term,
        cone_form_residual,
        psd_min_eig,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, diag_real, hs_inner, matrix_unit};
    use crate::standard_form::DensityMatrix;

    fn sf_random(seed: u64, n: usize) -> StandardForm {
        let mut s = Sampler::new(seed);
        StandardForm::new(DensityMatrix::new(s.gibbs_state(n, 1.0)).unwrap()).unwrap()
    }

    fn tracial(n: usize) -> StandardForm {
        StandardForm::new(DensityMatrix::tracial(n).unwrap()).unwrap()
    }

    #[test]
    fn derivation_kills_xi0() {
        let sf = sf_random(1, 3);
        let mut s = Sampler::new(2);
        for _ in 0..5 {
            let x = s.ginibre(3);
            let d = derivation_at(&sf, &x, 0.0).unwrap();
            assert!(sf.apply(&d, sf.xi0()).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn tracial_derivation_is_commutator() {
        let sf = tracial(3);
        let mut s = Sampler::new(3);
        let x = s.ginibre(3);
        let v = s.ginibre(3);
        for &t in &[0.0, 1.3] {
            let d = derivation_at(&sf, &x, t).unwrap();
            let out = sf.apply(&d, &HsVector::new(v.clone())).unwrap();
            assert!(max_abs(&(out.matrix() - commutator(&x, &v))) < 1e-12);
        }
    }

    #[test]
    fn identity_coefficient_gives_zero() {
        let sf = sf_random(4, 3);
        let id = CMat::identity(3, 3);
        assert!(derivation_at(&sf, &id, 0.4).unwrap().max_abs() < 1e-12);
        let spec = DirichletSpec::new(id, KernelFunction::F0, Engine::ExactSpectral).unwrap();
        assert!(dirichlet_operator(&spec, &sf).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn tracial_form_is_commutator_pairing() {
        let sf = tracial(3);
        let mut s = Sampler::new(5);
        let x = s.hermitian(3);
        let spec = DirichletSpec::new(x.clone(), KernelFunction::F0, Engine::ExactSpectral).unwrap();
        let eta = HsVector::new(s.ginibre(3));
        let xi = HsVector::new(s.ginibre(3));
        let e = form_eval(&spec, &sf, &eta, &xi).unwrap();
        let oracle = hs_inner(&commutator(&x, eta.matrix()), &commutator(&x, xi.matrix()));
        assert!((e - oracle).norm() < 1e-10);
        let h = dirichlet_operator(&spec, &sf).unwrap();
        let dc = commutator(&x, &commutator(&x, xi.matrix()));
        assert!(max_abs(&(sf.apply(&h, &xi).unwrap().matrix() - dc)) < 1e-10);
    }

    #[test]
    fn form_and_operator_agree() {
        let sf = sf_random(6, 3);
        let mut s = Sampler::new(7);
        let x = s.ginibre(3);
        let spec = DirichletSpec::new(x, KernelFunction::F0, Engine::ExactSpectral).unwrap();
        let q = spec.with_engine(Engine::Quadrature);
        let eta = HsVector::new(s.ginibre(3));
        let xi = HsVector::new(s.ginibre(3));
        let e1 = form_eval(&spec, &sf, &eta, &xi).unwrap();
        let e2 = form_eval(&q, &sf, &eta, &xi).unwrap();
        assert!((e1 - e2).norm() < 1e-8 * e1.norm().max(1.0));
        assert!(form_eval(&spec, &sf, sf.xi0(), sf.xi0()).unwrap().norm() < 1e-10);
    }

    #[test]
    fn engines_agree_for_f0() {
        let sf = sf_random(8, 3);
        let mut s = Sampler::new(9);
        let x = s.ginibre(3);
        let cmp = cross_check_engines(&sf, &x, &KernelFunction::F0, 1e-7).unwrap();
        assert!(cmp.relative < 1e-9, "{cmp:?}");
    }

    #[test]
    fn engines_agree_for_cauchy_two_level() {
        let sf = StandardForm::new(DensityMatrix::new(diag_real(&[0.75, 0.25])).unwrap()).unwrap();
        let mut s = Sampler::new(10);
        let x = s.ginibre(2);
        let cmp = compare_engines(&sf, &x, &KernelFunction::cauchy(1.0).unwrap()).unwrap();
        assert!(cmp.relative < 1e-7, "{cmp:?}");
    }

    #[test]
    fn split_formula() {
        let x = matrix_unit(2, 0, 1);
        let (x1, x2) = split_self_adjoint(&x);
        let e21 = matrix_unit(2, 1, 0);
        assert!(max_abs(&(x1 - (&x + &e21) * cr(FRAC_1_SQRT_2))) < 1e-15);
        assert!(max_abs(&(x2 - (&x - &e21) * Complex64::new(0.0, FRAC_1_SQRT_2))) < 1e-15);
        let h = diag_real(&[1.0, -2.0]);
        let (h1, h2) = split_self_adjoint(&h);
        assert!(max_abs(&(h1 - &h * cr(2f64.sqrt()))) < 1e-15);
        assert!(max_abs(&h2) < 1e-15);
    }

    #[test]
    fn split_operator_identity() {
        let sf = sf_random(11, 3);
        let mut s = Sampler::new(12);
        let x = s.ginibre(3);
        let (x1, x2) = split_self_adjoint(&x);
        let op = |y: CMat| {
            dirichlet_operator(
                &DirichletSpec::new(y, KernelFunction::F0, Engine::ExactSpectral).unwrap(),
                &sf,
            )
            .unwrap()
        };
        let h = op(x);
        let avg = (&op(x1) + &op(x2)).scale(cr(0.5));
        assert!((&h - &avg).max_abs() < 1e-9);
    }

    #[test]
    fn verify_passes_for_random_coefficients() {
        let sf = sf_random(13, 3);
        let mut s = Sampler::new(14);
        for kernel in [KernelFunction::F0, KernelFunction::cauchy(1.0).unwrap()] {
            let spec = DirichletSpec::new(s.ginibre(3), kernel, Engine::ExactSpectral).unwrap();
            let report = verify_dirichlet(&spec, &sf, 50, 3).unwrap();
            assert!(report.passed(), "{:?}", report.failures());
        }
    }

    #[test]
    fn boundary_identity_holds() {
        let sf = sf_random(15, 3);
        let mut s = Sampler::new(16);
        let x = s.ginibre(3);
        assert!(boundary_identity_residual(&sf, &x, &KernelFunction::F0).unwrap() < 1e-10);
        let sf2 = StandardForm::new(DensityMatrix::new(diag_real(&[0.75, 0.25])).unwrap()).unwrap();
        let x2 = s.ginibre(2);
        let r = boundary_identity_residual(&sf2, &x2, &KernelFunction::cauchy(1.0).unwrap()).unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn gaussian_kernel_is_rejected() {
        let f = KernelFunction::Tabulated(crate::kernel::TabulatedKernel::gaussian());
        let err = DirichletSpec::new(CMat::identity(2, 2), f, Engine::ExactSpectral).unwrap_err();
        assert!(matches!(err, MdfError::NotAdmissible(_)));
    }
}
