//! Concrete standard form of the n x n matrix algebra with a faithful state.
//!
//! The GNS space is the matrix algebra itself with the Hilbert-Schmidt inner
//! product. With `rho` the density matrix:
//!
//! * `xi0 = rho^{1/2}`, `J X = X*`, `Delta X = rho X rho^{-1}`;
//! * the algebra acts by left multiplication and `j(A) X = X A*`;
//! * the natural cone is the set of positive semidefinite matrices.
//!
//! Internally everything modular is computed in the eigenbasis of `rho`,
//! where `Delta^{iz}` acts on the matrix unit `|e_j><e_k|` by the phase
//! `exp(i z kappa_jk)` with `kappa_jk = log(lambda_j) - log(lambda_k)`.

use crate::error::{MdfError, Result};
use crate::linalg::{cr, frobenius, hermitian_part, hermiticity_residual, hs_inner, trace, CMat, HermitianEigen};
use crate::superop::SuperOperator;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Smallest eigenvalue accepted for a faithful state.
pub const FAITHFUL_EPS: f64 = 1e-8;
/// Tolerance for Hermiticity and unit trace of a density matrix.
pub const STATE_TOL: f64 = 1e-12;
/// Hermiticity tolerance for J-real inputs.
pub const J_REAL_TOL: f64 = 1e-10;
/// Default largest supported matrix size.
pub const DEFAULT_MAX_DIM: usize = 32;

/// Dykstra stopping rule for [`project_order_interval`].
pub const DYKSTRA_STEP_TOL: f64 = 1e-10;
pub const DYKSTRA_MAX_ITER: usize = 10_000;
pub const DYKSTRA_ACCEPT_RESIDUAL: f64 = 1e-6;

/// Largest supported dimension, overridable through `MDF_MAX_DIM`.
pub fn max_dim() -> usize {
    std::env::var("MDF_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_DIM)
}

/// A faithful state on the n x n matrix algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: CMat,
}

impl DensityMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(MdfError::NotAState(format!(
                "density matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm = hermiticity_residual(&entries);
        if herm > STATE_TOL {
            return Err(MdfError::NotAState(format!(
                "Hermiticity residual {herm:e} exceeds {STATE_TOL:e}"
            )));
        }
        let tr = trace(&entries);
        if (tr - cr(1.0)).norm() > STATE_TOL {
            return Err(MdfError::NotAState(format!("trace {tr} differs from 1")));
        }
        let min = HermitianEigen::new(&entries).min();
        if min < FAITHFUL_EPS {
            return Err(MdfError::NotFaithful {
                min_eigenvalue: min,
                threshold: FAITHFUL_EPS,
            });
        }
        Ok(Self { entries })
    }

    /// The tracial state `I / n`.
    pub fn tracial(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(MdfError::NotAState("dimension must be positive".into()));
        }
        Self::new(CMat::identity(n, n) * cr(1.0 / n as f64))
    }

    /// Gibbs state `exp(-beta h) / Tr exp(-beta h)` for Hermitian `h`.
    pub fn gibbs(hamiltonian: &CMat, beta: f64) -> Result<Self> {
        if hamiltonian.nrows() != hamiltonian.ncols() {
            return Err(MdfError::NotAState("Hamiltonian must be square".into()));
        }
        let herm = hermiticity_residual(hamiltonian);
        if herm > J_REAL_TOL {
            return Err(MdfError::NotAState(format!(
                "Hamiltonian is not Hermitian (residual {herm:e})"
            )));
        }
        if !beta.is_finite() {
            return Err(MdfError::NotAState("beta must be finite".into()));
        }
        let eig = HermitianEigen::new(hamiltonian);
        // Shift by the ground energy so the exponentials cannot overflow.
        let shift = if beta >= 0.0 { eig.min() } else { eig.max() };
        let weights: Vec<f64> = eig.values.iter().map(|e| (-beta * (e - shift)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let n = hamiltonian.nrows();
        let mut values = vec![0.0; n];
        for (v, w) in values.iter_mut().zip(&weights) {
            *v = w / z;
        }
        let rho = {
            let mut scaled = eig.vectors.clone();
            for j in 0..n {
                for i in 0..n {
                    scaled[(i, j)] *= cr(values[j]);
                }
            }
            hermitian_part(&(scaled * eig.vectors.adjoint()))
        };
        Self::new(rho)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }
}

/// Element of the GNS Hilbert space: an n x n matrix with `<X, Y> = Tr(X* Y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HsVector(CMat);

impl HsVector {
    pub fn new(m: CMat) -> Self {
        Self(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMat::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn inner(&self, other: &HsVector) -> Complex64 {
        hs_inner(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        frobenius(&self.0)
    }

    /// The modular conjugation `J X = X*`.
    pub fn conj_j(&self) -> HsVector {
        HsVector(self.0.adjoint())
    }

    /// Distance from being J-real (largest entry of `X - X*`).
    pub fn j_real_residual(&self) -> f64 {
        hermiticity_residual(&self.0)
    }

    pub fn is_j_real(&self, tol: f64) -> bool {
        self.j_real_residual() <= tol
    }
}

impl From<CMat> for HsVector {
    fn from(m: CMat) -> Self {
        Self(m)
    }
}

/// Eigendata of `rho`, `xi0` and the modular exponents.
#[derive(Clone, Debug)]
pub struct StandardForm {
    rho: DensityMatrix,
    eigenvalues: Vec<f64>,
    log_eigenvalues: Vec<f64>,
    eigenvectors: CMat,
    kappa: DMatrix<f64>,
    tracial: bool,
    xi0: HsVector,
    rho_quarter: CMat,
    rho_neg_quarter: CMat,
}

impl StandardForm {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        let n = rho.dim();
        let max = max_dim();
        if n > max {
            return Err(MdfError::DimensionTooLarge { dim: n, max });
        }
        let eig = HermitianEigen::new(rho.matrix());
        if eig.min() < FAITHFUL_EPS {
            return Err(MdfError::NotFaithful {
                min_eigenvalue: eig.min(),
                threshold: FAITHFUL_EPS,
            });
        }
        let log_eigenvalues: Vec<f64> = eig.values.iter().map(|v| v.ln()).collect();
        let kappa = DMatrix::from_fn(n, n, |j, k| log_eigenvalues[j] - log_eigenvalues[k]);
        let tracial = kappa.iter().all(|&v| v == 0.0);
        let power = |p: f64| eig.map(|v| cr(v.powf(p)));
        let xi0 = HsVector(hermitian_part(&power(0.5)));
        let rho_quarter = power(0.25);
        let rho_neg_quarter = power(-0.25);
        Ok(Self {
            rho,
            eigenvalues: eig.values,
            log_eigenvalues,
            eigenvectors: eig.vectors,
            kappa,
            tracial,
            xi0,
            rho_quarter,
            rho_neg_quarter,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    /// Eigenvalues of `rho`, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn log_eigenvalues(&self) -> &[f64] {
        &self.log_eigenvalues
    }

    /// Unitary whose columns are the eigenvectors of `rho`.
    pub fn eigenvectors(&self) -> &CMat {
        &self.eigenvectors
    }

    /// `kappa_jk = log(lambda_j) - log(lambda_k)`.
    pub fn kappa(&self) -> &DMatrix<f64> {
        &self.kappa
    }

    pub fn max_abs_kappa(&self) -> f64 {
        self.kappa.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// True when every modular exponent vanishes exactly (`rho = I / n`).
    pub fn is_tracial(&self) -> bool {
        self.tracial
    }

    pub fn xi0(&self) -> &HsVector {
        &self.xi0
    }

    pub fn rho_power(&self, p: f64) -> CMat {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let w = cr(self.eigenvalues[j].powf(p));
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `rho^{is}` for real `s`, computed from the eigendecomposition.
    pub fn rho_imaginary_power(&self, s: f64) -> CMat {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let w = Complex64::from_polar(1.0, s * self.log_eigenvalues[j]);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn check_dim(&self, m: &CMat) -> Result<()> {
        let n = self.dim();
        if m.nrows() != n || m.ncols() != n {
            return Err(MdfError::DimMismatch {
                expected: n,
                got: if m.nrows() != n { m.nrows() } else { m.ncols() },
            });
        }
        Ok(())
    }

    /// `U* A U`: the matrix in the eigenbasis of `rho`.
    pub fn to_eigenbasis(&self, a: &CMat) -> CMat {
        self.eigenvectors.adjoint() * a * &self.eigenvectors
    }

    /// Inverse of [`Self::to_eigenbasis`].
    pub fn from_eigenbasis(&self, a: &CMat) -> CMat {
        &self.eigenvectors * a * self.eigenvectors.adjoint()
    }

    /// Multiplies entry (j, k) of `a` (in the eigenbasis) by `m(kappa_jk)`.
    ///
    /// In the tracial case every exponent is zero and the result is the
    /// scalar multiple `m(0) a`, with no change of basis.
    pub fn kappa_multiplier<F: Fn(f64) -> Complex64>(&self, a: &CMat, m: F) -> CMat {
        if self.tracial {
            let factor = m(0.0);
            if factor == cr(1.0) {
                return a.clone();
            }
            return a * factor;
        }
        let mut e = self.to_eigenbasis(a);
        let n = self.dim();
        for j in 0..n {
            for k in 0..n {
                e[(j, k)] *= m(self.kappa[(j, k)]);
            }
        }
        self.from_eigenbasis(&e)
    }

    /// `Delta^{it} X`, computed with the kappa phases.
    pub fn delta_it(&self, x: &HsVector, t: f64) -> HsVector {
        HsVector(self.kappa_multiplier(x.matrix(), |k| Complex64::from_polar(1.0, t * k)))
    }

    /// Applies a superoperator (stored in the eigenbasis) to a vector given
    /// in the input basis.
    pub fn apply(&self, op: &SuperOperator, x: &HsVector) -> Result<HsVector> {
        self.check_dim(x.matrix())?;
        if op.n() != self.dim() {
            return Err(MdfError::DimMismatch {
                expected: self.dim(),
                got: op.n(),
            });
        }
        let e = self.to_eigenbasis(x.matrix());
        Ok(HsVector(self.from_eigenbasis(&op.apply_eigen(&e))))
    }

    /// Same as [`Self::apply`] for a map acting on algebra elements.
    pub fn apply_map(&self, op: &SuperOperator, a: &CMat) -> Result<CMat> {
        Ok(self.apply(op, &HsVector(a.clone()))?.0)
    }

    /// Superoperator of left multiplication by `a` (input basis).
    pub fn left_super(&self, a: &CMat) -> SuperOperator {
        SuperOperator::left(&self.to_eigenbasis(a))
    }

    /// Superoperator of right multiplication by `b` (input basis).
    pub fn right_super(&self, b: &CMat) -> SuperOperator {
        SuperOperator::right(&self.to_eigenbasis(b))
    }

    /// Superoperator of `j(a)`: `X -> X a*`.
    pub fn j_super(&self, a: &CMat) -> SuperOperator {
        SuperOperator::right(&self.to_eigenbasis(&a.adjoint()))
    }

    /// Builds a superoperator from its action on input-basis matrices.
    pub fn super_from_fn<F: Fn(&CMat) -> CMat>(&self, f: F) -> SuperOperator {
        SuperOperator::from_fn(self.dim(), |e| self.to_eigenbasis(&f(&self.from_eigenbasis(e))))
    }

    pub fn rho_quarter(&self) -> &CMat {
        &self.rho_quarter
    }

    pub fn rho_neg_quarter(&self) -> &CMat {
        &self.rho_neg_quarter
    }
}

/// Convenience wrapper around [`StandardForm::new`].
pub fn build_standard_form(rho: DensityMatrix) -> Result<StandardForm> {
    StandardForm::new(rho)
}

/// `A X`.
pub fn left_act(sf: &StandardForm, a: &CMat, x: &HsVector) -> Result<HsVector> {
    sf.check_dim(a)?;
    sf.check_dim(x.matrix())?;
    Ok(HsVector(a * x.matrix()))
}

/// `j(A) X = X A*`.
pub fn right_j_act(sf: &StandardForm, a: &CMat, x: &HsVector) -> Result<HsVector> {
    sf.check_dim(a)?;
    sf.check_dim(x.matrix())?;
    Ok(HsVector(x.matrix() * a.adjoint()))
}

/// Splits a J-real vector into orthogonal positive and negative parts.
pub fn jordan_decompose(sf: &StandardForm, xi: &HsVector) -> Result<(HsVector, HsVector)> {
    sf.check_dim(xi.matrix())?;
    let residual = xi.j_real_residual();
    if residual > J_REAL_TOL {
        return Err(MdfError::NotJReal { residual });
    }
    let eig = HermitianEigen::new(xi.matrix());
    let plus = eig.map(|v| cr(v.max(0.0)));
    let minus = eig.map(|v| cr((-v).max(0.0)));
    Ok((HsVector(plus), HsVector(minus)))
}

fn project_psd(m: &CMat) -> CMat {
    HermitianEigen::new(m).map(|v| cr(v.max(0.0)))
}

/// Nearest point of the order interval `[0, xi0]` (Hilbert-Schmidt norm),
/// by Dykstra's alternating projections between `{eta >= 0}` and
/// `{eta <= xi0}`.
pub fn project_order_interval(sf: &StandardForm, eta: &HsVector) -> Result<HsVector> {
    sf.check_dim(eta.matrix())?;
    let residual = eta.j_real_residual();
    if residual > J_REAL_TOL {
        return Err(MdfError::NotJReal { residual });
    }
    let top = sf.xi0().matrix();
    let mut x = hermitian_part(eta.matrix());
    let n = sf.dim();
    let mut p = CMat::zeros(n, n);
    let mut q = CMat::zeros(n, n);
    let mut step = f64::INFINITY;
    for _ in 0..DYKSTRA_MAX_ITER {
        let y = project_psd(&(&x + &p));
        p = &x + &p - &y;
        let shifted = &y + &q;
        let x_next = top - project_psd(&(top - &shifted));
        q = shifted - &x_next;
        step = frobenius(&(&x_next - &x));
        x = hermitian_part(&x_next);
        if step < DYKSTRA_STEP_TOL {
            return Ok(HsVector(x));
        }
    }
    if step > DYKSTRA_ACCEPT_RESIDUAL {
        return Err(MdfError::NoConvergence {
            iterations: DYKSTRA_MAX_ITER,
            residual: step,
        });
    }
    Ok(HsVector(x))
}

/// `i0(A) = Delta^{1/4} A xi0 = rho^{1/4} A rho^{1/4}`.
pub fn symmetric_embed(sf: &StandardForm, a: &CMat) -> Result<HsVector> {
    sf.check_dim(a)?;
    Ok(HsVector(sf.rho_quarter() * a * sf.rho_quarter()))
}

/// Inverse of [`symmetric_embed`]: `rho^{-1/4} X rho^{-1/4}`.
pub fn symmetric_unembed(sf: &StandardForm, x: &HsVector) -> Result<CMat> {
    sf.check_dim(x.matrix())?;
    Ok(sf.rho_neg_quarter() * x.matrix() * sf.rho_neg_quarter())
}
