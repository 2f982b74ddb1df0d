//! Lindblad-type generators
//!
//! `L(A) = sum_k (y_k* y_k A - 2 y_k* A y_k + A y_k* y_k) + i [Q, A]`
//!
//! on the algebra, and the operator `H` they induce on the Hilbert space
//! through `i0(A) = rho^{1/4} A rho^{1/4}`, `H i0(A) = i0(L(A))`.
//!
//! Maps on the algebra are stored like Hilbert-space operators: as
//! [`SuperOperator`]s in the eigenbasis of `rho`.

use crate::dirichlet::{dirichlet_operator, split_self_adjoint, DirichletSpec, Engine};
use crate::error::{MdfError, Result};
use crate::kernel::{check_admissible, KernelFunction};
use crate::linalg::{c, commutator, cr, frobenius, hermiticity_residual, hs_inner, CMat};
use crate::modular::{
    apply_i0_super, boundary_combination_smear, modular_map, modular_map_super, sigma, smear, HatTable, ModularMap,
};
use crate::sampling::Sampler;
use crate::standard_form::{DensityMatrix, StandardForm};
use crate::superop::SuperOperator;
use num_complex::Complex64;
use serde::Serialize;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const BALANCE_TOL: f64 = 1e-8;
pub const SELF_ADJOINT_TOL: f64 = 1e-8;
pub const TRACIAL_TOL: f64 = 1e-9;
/// Random matrices drawn for the sampled identities when none is given.
pub const DEFAULT_SAMPLES: usize = 50;

fn quarter(sign: f64) -> Complex64 {
    c(0.0, sign * 0.25)
}

/// `y -> x = sigma_{i/4}(y)`.
fn x_from_y(sf: &StandardForm, y: &CMat) -> Result<CMat> {
    sigma(sf, y, quarter(1.0))
}

/// `x -> y = sigma_{-i/4}(x)`.
fn y_from_x(sf: &StandardForm, x: &CMat) -> Result<CMat> {
    sigma(sf, x, quarter(-1.0))
}

#[derive(Clone, Debug)]
pub struct LindbladSpec {
    ys: Vec<CMat>,
    xs: Vec<CMat>,
    q: CMat,
    central_offset: f64,
}

impl LindbladSpec {
    /// Generator with jump operators `ys` and Hamiltonian part `q`.
    pub fn new(sf: &StandardForm, ys: Vec<CMat>, q: CMat) -> Result<Self> {
        if ys.is_empty() {
            return Err(MdfError::InvalidInput("at least one coefficient is required".into()));
        }
        sf.check_dim(&q)?;
        let residual = hermiticity_residual(&q);
        if residual > HERMITIAN_TOL {
            return Err(MdfError::InvalidInput(format!(
                "Q must be Hermitian (||Q - Q*|| = {residual:e})"
            )));
        }
        let mut xs = Vec::with_capacity(ys.len());
        for y in &ys {
            sf.check_dim(y)?;
            xs.push(x_from_y(sf, y)?);
        }
        Ok(Self {
            ys,
            xs,
            q,
            central_offset: 0.0,
        })
    }

    /// Generator given through `x_k = sigma_{i/4}(y_k)`. With `q = None` the
    /// drift is [`build_q`] with `f0`.
    pub fn from_coefficients(sf: &StandardForm, xs: Vec<CMat>, q: Option<CMat>) -> Result<Self> {
        let mut ys = Vec::with_capacity(xs.len());
        for x in &xs {
            sf.check_dim(x)?;
            ys.push(y_from_x(sf, x)?);
        }
        let q = match q {
            Some(q) => q,
            None => build_q(sf, &xs, &KernelFunction::F0)?,
        };
        Self::new(sf, ys, q)
    }

    /// Adds `c * I` to the drift. Central terms drop out of `L` and `H`.
    pub fn with_central_offset(mut self, c: f64) -> Self {
        self.central_offset = c;
        self
    }

    pub fn ys(&self) -> &[CMat] {
        &self.ys
    }

    pub fn xs(&self) -> &[CMat] {
        &self.xs
    }

    /// The drift without the central offset.
    pub fn q(&self) -> &CMat {
        &self.q
    }

    pub fn central_offset(&self) -> f64 {
        self.central_offset
    }

    pub fn effective_q(&self) -> CMat {
        let n = self.q.nrows();
        &self.q + CMat::identity(n, n) * cr(self.central_offset)
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }
}

/// `L(A)`, directly from the matrix products.
pub fn lindblad_apply(spec: &LindbladSpec, sf: &StandardForm, a: &CMat) -> Result<CMat> {
    sf.check_dim(a)?;
    if spec.dim() != sf.dim() {
        return Err(MdfError::DimMismatch {
            expected: sf.dim(),
            got: spec.dim(),
        });
    }
    let mut out = commutator(&spec.effective_q(), a) * c(0.0, 1.0);
    for y in &spec.ys {
        let y_adj = y.adjoint();
        let yy = &y_adj * y;
        out += &yy * a - (&y_adj * a * y) * cr(2.0) + a * &yy;
    }
    Ok(out)
}

/// The map `L` as a superoperator in the eigenbasis.
pub fn lindblad_super(spec: &LindbladSpec, sf: &StandardForm) -> Result<SuperOperator> {
    if spec.dim() != sf.dim() {
        return Err(MdfError::DimMismatch {
            expected: sf.dim(),
            got: spec.dim(),
        });
    }
    let q = sf.to_eigenbasis(&spec.effective_q());
    let mut out = (&SuperOperator::left(&q) - &SuperOperator::right(&q)).scale(c(0.0, 1.0));
    for y in &spec.ys {
        out = &out + &dissipator(&sf.to_eigenbasis(y));
    }
    Ok(out)
}

/// `A -> y* y A - 2 y* A y + A y* y` for an eigenbasis `y`.
fn dissipator(y: &CMat) -> SuperOperator {
    let y_adj = y.adjoint();
    let yy = &y_adj * y;
    let sum = &SuperOperator::left(&yy) + &SuperOperator::right(&yy);
    &sum - &SuperOperator::sandwich(&y_adj, y).scale(cr(2.0))
}

/// `i0 K i0^{-1}` for a map `K` on the algebra.
pub fn embed_map(sf: &StandardForm, k: &SuperOperator) -> Result<SuperOperator> {
    if k.n() != sf.dim() {
        return Err(MdfError::DimMismatch {
            expected: sf.dim(),
            got: k.n(),
        });
    }
    if sf.is_tracial() {
        return Ok(k.clone());
    }
    let s: Vec<f64> = sf.eigenvalues().iter().map(|l| l.powf(0.25)).collect();
    Ok(k.map_entries(|a, b, cc, d| cr(s[a] * s[b] / (s[cc] * s[d]))))
}

/// `H = i0 L i0^{-1}`.
pub fn induced_operator(spec: &LindbladSpec, sf: &StandardForm) -> Result<SuperOperator> {
    embed_map(sf, &lindblad_super(spec, sf)?)
}

/// `sum_k i int (sigma_t(x*) sigma_{t-i/2}(x) - sigma_{t+i/2}(x*) sigma_t(x)) f(t) dt`,
/// i.e. `i (smear(x* sigma_{-i/2}(x)) - smear(sigma_{i/2}(x*) x))` per term.
pub fn build_q(sf: &StandardForm, xs: &[CMat], f: &KernelFunction) -> Result<CMat> {
    let n = sf.dim();
    let mut q = CMat::zeros(n, n);
    for x in xs {
        sf.check_dim(x)?;
        let x_adj = x.adjoint();
        let g2 = &x_adj * sigma(sf, x, c(0.0, -0.5))?;
        let g1 = sigma(sf, &x_adj, c(0.0, 0.5))? * x;
        q += (smear(sf, &g2, f)? - smear(sf, &g1, f)?) * c(0.0, 1.0);
    }
    Ok(q)
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    /// `||sum_k (x_k j(x_k) - x_k* j(x_k*))||_F` as a superoperator.
    pub condition_residual: f64,
    /// Largest `||sum sigma_{i/4}(x_k) A sigma_{-i/4}(x_k*) - sum sigma_{i/4}(x_k*) A sigma_{-i/4}(x_k)||`
    /// over sampled `A` with `||A|| = 1`.
    pub dressed_residual: f64,
    pub samples: usize,
    /// Both residuals below [`BALANCE_TOL`], or both above.
    pub equivalent: bool,
}

impl BalanceReport {
    pub fn balanced(&self) -> bool {
        self.condition_residual < BALANCE_TOL
    }
}

/// Residuals of `sum x_k j(x_k) = sum x_k* j(x_k*)` and of its dressed form.
pub fn check_balance_condition(sf: &StandardForm, xs: &[CMat], samples: usize, seed: u64) -> Result<BalanceReport> {
    let n = sf.dim();
    let mut cond = CMat::zeros(n * n, n * n);
    let mut dressed = Vec::with_capacity(xs.len());
    for x in xs {
        sf.check_dim(x)?;
        let x_adj = x.adjoint();
        cond += SuperOperator::sandwich(x, &x_adj).into_matrix();
        cond -= SuperOperator::sandwich(&x_adj, x).into_matrix();
        dressed.push((
            sigma(sf, x, quarter(1.0))?,
            sigma(sf, &x_adj, quarter(-1.0))?,
            sigma(sf, &x_adj, quarter(1.0))?,
            sigma(sf, x, quarter(-1.0))?,
        ));
    }
    let condition_residual = frobenius(&cond);
    let mut rng = Sampler::new(seed);
    let mut dressed_residual: f64 = 0.0;
    for _ in 0..samples {
        let a = rng.ginibre(n);
        let a = &a / cr(frobenius(&a));
        let mut diff = CMat::zeros(n, n);
        for (xp, xam, xap, xm) in &dressed {
            diff += xp * &a * xam - xap * &a * xm;
        }
        dressed_residual = dressed_residual.max(frobenius(&diff));
    }
    let equivalent = (condition_residual < BALANCE_TOL) == (dressed_residual < BALANCE_TOL);
    Ok(BalanceReport {
        condition_residual,
        dressed_residual,
        samples,
        equivalent,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfAdjointnessReport {
    /// `||H - H*||_F`.
    pub h_residual: f64,
    /// `||lhs - rhs||_F` of the operator identity
    /// `i T(Q) - i T(j(Q)) = -S(y*y) + S(j(y*y)) + 2 s(y*) j(s(y*)) - 2 s'(y) j(s'(y))`
    /// with `s = sigma_{-i/4}`, `s' = sigma_{i/4}`.
    pub identity_residual: f64,
    /// Both below [`SELF_ADJOINT_TOL`], or both above.
    pub consistent: bool,
}

impl SelfAdjointnessReport {
    pub fn self_adjoint(&self) -> bool {
        self.h_residual < SELF_ADJOINT_TOL
    }
}

/// `||H - H*||` together with the residual of the operator identity that
/// characterizes it.
pub fn selfadjointness_residual(spec: &LindbladSpec, sf: &StandardForm) -> Result<SelfAdjointnessReport> {
    let h = induced_operator(spec, sf)?;
    let h_residual = h.self_adjointness_residual();

    let q = sf.to_eigenbasis(&spec.effective_q());
    let lq = SuperOperator::left(&q);
    let rq = SuperOperator::right(&q);
    let lhs =
        (&modular_map_super(sf, &lq, ModularMap::T)? - &modular_map_super(sf, &rq, ModularMap::T)?).scale(c(0.0, 1.0));
    let mut rhs = SuperOperator::zeros(sf.dim());
    for y in &spec.ys {
        let ye = sf.to_eigenbasis(y);
        let y_adj = ye.adjoint();
        let yy = &y_adj * &ye;
        rhs = &rhs - &modular_map_super(sf, &SuperOperator::left(&yy), ModularMap::S)?;
        rhs = &rhs + &modular_map_super(sf, &SuperOperator::right(&yy), ModularMap::S)?;
        let s_minus = modular_map(sf, &y.adjoint(), ModularMap::DPlusQuarter)?;
        let s_plus = modular_map(sf, y, ModularMap::DMinusQuarter)?;
        let first = &sf.left_super(&s_minus) * &sf.j_super(&s_minus);
        let second = &sf.left_super(&s_plus) * &sf.j_super(&s_plus);
        rhs = &rhs + &(&first - &second).scale(cr(2.0));
    }
    let identity_residual = (&lhs - &rhs).frobenius_norm();
    let consistent = (h_residual < SELF_ADJOINT_TOL) == (identity_residual < SELF_ADJOINT_TOL);
    Ok(SelfAdjointnessReport {
        h_residual,
        identity_residual,
        consistent,
    })
}

fn require_balance(sf: &StandardForm, xs: &[CMat]) -> Result<()> {
    let report = check_balance_condition(sf, xs, 0, 0)?;
    if !report.balanced() {
        return Err(MdfError::BalanceViolated {
            residual: report.condition_residual,
        });
    }
    Ok(())
}

/// `[H_k]` with `H_k` the Dirichlet operator of `x_k` and kernel `f`. Their
/// sum is the operator induced by the generator with drift [`build_q`].
pub fn decompose_h(sf: &StandardForm, xs: &[CMat], f: &KernelFunction) -> Result<Vec<SuperOperator>> {
    require_balance(sf, xs)?;
    xs.iter()
        .map(|x| dirichlet_operator(&DirichletSpec::new(x.clone(), f.clone(), Engine::ExactSpectral)?, sf))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentDecomposition {
    /// `(x_k + x_k*)/sqrt 2` and `i (x_k - x_k*)/sqrt 2` for each `k`.
    #[serde(skip)]
    pub components: Vec<CMat>,
    /// Largest `||L(A) - 1/2 sum L_k(A)||` over sampled `A` with `||A|| = 1`.
    pub residual: f64,
    pub samples: usize,
}

/// Splits each coefficient into self-adjoint parts and compares the
/// generator with drift [`build_q`] against half the sum of the generators
/// of the parts, each with its own drift.
pub fn selfadjoint_component_decomposition(
    sf: &StandardForm,
    xs: &[CMat],
    samples: usize,
    seed: u64,
) -> Result<ComponentDecomposition> {
    require_balance(sf, xs)?;
    let mut components = Vec::with_capacity(2 * xs.len());
    for x in xs {
        let (x1, x2) = split_self_adjoint(x);
        components.push(x1);
        components.push(x2);
    }
    let whole = LindbladSpec::from_coefficients(sf, xs.to_vec(), None)?;
    let parts = components
        .iter()
        .map(|xt| LindbladSpec::from_coefficients(sf, vec![xt.clone()], None))
        .collect::<Result<Vec<_>>>()?;
    let n = sf.dim();
    let mut rng = Sampler::new(seed);
    let mut residual: f64 = 0.0;
    for _ in 0..samples {
        let a = rng.ginibre(n);
        let a = &a / cr(frobenius(&a));
        let mut half = CMat::zeros(n, n);
        for p in &parts {
            half += lindblad_apply(p, sf, &a)?;
        }
        half *= cr(0.5);
        residual = residual.max(frobenius(&(lindblad_apply(&whole, sf, &a)? - half)));
    }
    Ok(ComponentDecomposition {
        components,
        residual,
        samples,
    })
}

/// The generator `L = L1 + L2` attached to the Dirichlet operator of `x`
/// and `f`:
///
/// `L1(A) = 1/2 int {s+(x*) s-(x) A - 2 s+(x*) A s-(x) + A s+(x*) s-(x)} (f(t-i/4) + f(t+i/4)) dt + i/2 [Q1, A]`
///
/// with `s+- = sigma_{t +- i/4}`, `Q1` from [`build_q`] with `f`, and `L2`
/// the same with `x` and `x*` exchanged. Returned as a superoperator on the
/// algebra.
pub fn general_f_generator(sf: &StandardForm, x: &CMat, f: &KernelFunction) -> Result<SuperOperator> {
    sf.check_dim(x)?;
    if !f.is_f0() && !check_admissible(f).usable() {
        return Err(MdfError::NotAdmissible(format!(
            "kernel {} fails the admissibility check",
            f.name()
        )));
    }
    let n = sf.dim();
    let kappa = sf.kappa();
    let mut table = HatTable::new(f);
    let mut out = SuperOperator::zeros(n);
    for p in [x.clone(), x.adjoint()] {
        let y = y_from_x(sf, &p)?;
        let cm = sf.to_eigenbasis(&boundary_combination_smear(sf, &(y.adjoint() * &y), f)?);
        let pe = sf.to_eigenbasis(&p);
        let sw = SuperOperator::sandwich(&pe.adjoint(), &pe);
        let mut weights = vec![Complex64::new(0.0, 0.0); n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        let omega = kappa[(a, cc)] + kappa[(d, b)];
                        let boundary = if f.is_f0() {
                            1.0
                        } else {
                            2.0 * (omega / 4.0).cosh() * table.get(omega)?
                        };
                        let shift = ((kappa[(d, b)] - kappa[(a, cc)]) / 4.0).exp();
                        weights[((a * n + b) * n + cc) * n + d] = cr(shift * boundary);
                    }
                }
            }
        }
        let m = sw.map_entries(|a, b, cc, d| weights[((a * n + b) * n + cc) * n + d]);
        let q1 = sf.to_eigenbasis(&build_q(sf, std::slice::from_ref(&p), f)?);
        let half = (&SuperOperator::left(&cm) + &SuperOperator::right(&cm)).scale(cr(0.5));
        let drift = (&SuperOperator::left(&q1) - &SuperOperator::right(&q1)).scale(c(0.0, 0.5));
        out = &out + &(&(&half - &m) + &drift);
    }
    Ok(out)
}

/// `H = D(y*y) - 2 s(y*) j(s(y*)) + D'(j(y*y)) + i D(Q) - i D'(j(Q))` with
/// `D = D_{1/4}`, `D' = D_{-1/4}` acting on operators and `s = sigma_{-i/4}`.
pub fn assemble_h_from_modular_maps(spec: &LindbladSpec, sf: &StandardForm) -> Result<SuperOperator> {
    let plus = |k: &SuperOperator| modular_map_super(sf, k, ModularMap::DPlusQuarter);
    let minus = |k: &SuperOperator| modular_map_super(sf, k, ModularMap::DMinusQuarter);
    let q = spec.effective_q();
    let mut h = &plus(&sf.left_super(&q))?.scale(c(0.0, 1.0)) - &minus(&sf.j_super(&q))?.scale(c(0.0, 1.0));
    for y in &spec.ys {
        let yy = y.adjoint() * y;
        let s = modular_map(sf, &y.adjoint(), ModularMap::DPlusQuarter)?;
        h = &h + &plus(&sf.left_super(&yy))?;
        h = &h - &(&sf.left_super(&s) * &sf.j_super(&s)).scale(cr(2.0));
        h = &h + &minus(&sf.j_super(&yy))?;
    }
    Ok(h)
}

/// The adjoint of [`assemble_h_from_modular_maps`], written out term by term:
/// `D'(y*y) - 2 s'(y) j(s'(y)) + D(j(y*y)) - i D'(Q) + i D(j(Q))`.
pub fn assemble_h_adjoint(spec: &LindbladSpec, sf: &StandardForm) -> Result<SuperOperator> {
    let plus = |k: &SuperOperator| modular_map_super(sf, k, ModularMap::DPlusQuarter);
    let minus = |k: &SuperOperator| modular_map_super(sf, k, ModularMap::DMinusQuarter);
    let q = spec.effective_q();
    let mut h = &plus(&sf.j_super(&q))?.scale(c(0.0, 1.0)) - &minus(&sf.left_super(&q))?.scale(c(0.0, 1.0));
    for y in &spec.ys {
        let yy = y.adjoint() * y;
        let s = modular_map(sf, y, ModularMap::DMinusQuarter)?;
        h = &h + &minus(&sf.left_super(&yy))?;
        h = &h - &(&sf.left_super(&s) * &sf.j_super(&s)).scale(cr(2.0));
        h = &h + &plus(&sf.j_super(&yy))?;
    }
    Ok(h)
}

/// `H = 2 I0(y*y) - 2 T(I0(s(y*) j(s(y*)))) + 2 I0(j(y*y))`, valid when the
/// drift is [`build_q`].
pub fn assemble_h_with_canonical_drift(spec: &LindbladSpec, sf: &StandardForm) -> Result<SuperOperator> {
    let mut h = SuperOperator::zeros(sf.dim());
    for y in &spec.ys {
        let yy = y.adjoint() * y;
        let s = modular_map(sf, &y.adjoint(), ModularMap::DPlusQuarter)?;
        let cross = &sf.left_super(&s) * &sf.j_super(&s);
        let cross = modular_map_super(sf, &apply_i0_super(sf, &cross)?, ModularMap::T)?;
        let diag = &sf.left_super(&yy) + &sf.j_super(&yy);
        h = &h + &(&apply_i0_super(sf, &diag)? - &cross).scale(cr(2.0));
    }
    Ok(h)
}

/// `H = sum_k I0(D_k* D_k + D'_k* D'_k)` with
/// `D_k = s(x_k) - j(s(x_k*))`, `D'_k = s(x_k*) - j(s(x_k))`.
pub fn assemble_h_as_dirichlet_sum(spec: &LindbladSpec, sf: &StandardForm) -> Result<SuperOperator> {
    let mut k = SuperOperator::zeros(sf.dim());
    for x in &spec.xs {
        let sx = y_from_x(sf, x)?;
        let sx_adj = y_from_x(sf, &x.adjoint())?;
        let d = &sf.left_super(&sx) - &sf.j_super(&sx_adj);
        let dp = &sf.left_super(&sx_adj) - &sf.j_super(&sx);
        k = &k + &(&(&d.adjoint() * &d) + &(&dp.adjoint() * &dp));
    }
    apply_i0_super(sf, &k)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofRegression {
    /// `||H(modular maps) - H(i0 conjugation)||_F`.
    pub modular_vs_conjugation: f64,
    /// `||H*(term by term) - H(modular maps)*||_F`.
    pub adjoint_vs_transpose: f64,
    /// `||H(canonical drift) - H(i0 conjugation)||_F`.
    pub canonical_vs_conjugation: f64,
    /// `||H(Dirichlet sum) - H(i0 conjugation)||_F`.
    pub dirichlet_vs_conjugation: f64,
    /// `||H(Dirichlet sum) - H(modular maps)||_F`.
    pub dirichlet_vs_modular: f64,
}

impl ProofRegression {
    pub fn max(&self) -> f64 {
        [
            self.modular_vs_conjugation,
            self.adjoint_vs_transpose,
            self.canonical_vs_conjugation,
            self.dirichlet_vs_conjugation,
            self.dirichlet_vs_modular,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Builds `H` along every assembly path. The last three entries only vanish
/// for the canonical drift, and the Dirichlet sum needs the balance
/// condition.
pub fn proof_regression(spec: &LindbladSpec, sf: &StandardForm) -> Result<ProofRegression> {
    let conj = induced_operator(spec, sf)?;
    let modular = assemble_h_from_modular_maps(spec, sf)?;
    let adjoint = assemble_h_adjoint(spec, sf)?;
    let canonical = assemble_h_with_canonical_drift(spec, sf)?;
    let dirichlet = assemble_h_as_dirichlet_sum(spec, sf)?;
    Ok(ProofRegression {
        modular_vs_conjugation: (&modular - &conj).frobenius_norm(),
        adjoint_vs_transpose: (&adjoint - &modular.adjoint()).frobenius_norm(),
        canonical_vs_conjugation: (&canonical - &conj).frobenius_norm(),
        dirichlet_vs_conjugation: (&dirichlet - &conj).frobenius_norm(),
        dirichlet_vs_modular: (&dirichlet - &modular).frobenius_norm(),
    })
}

/// Largest `|<s(L(A)) xi0, s(B) xi0> - <s(A) xi0, s(L(B)) xi0>|` over
/// sampled unit `A`, `B`, with `s = sigma_{-i/4}`.
pub fn kms_residual(spec: &LindbladSpec, sf: &StandardForm, samples: usize, seed: u64) -> Result<f64> {
    let n = sf.dim();
    let xi0 = sf.xi0().matrix();
    let embed = |a: &CMat| -> Result<CMat> { Ok(y_from_x(sf, a)? * xi0) };
    let mut rng = Sampler::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let a = rng.ginibre(n);
        let a = &a / cr(frobenius(&a));
        let b = rng.ginibre(n);
        let b = &b / cr(frobenius(&b));
        let lhs = hs_inner(&embed(&lindblad_apply(spec, sf, &a)?)?, &embed(&b)?);
        let rhs = hs_inner(&embed(&a)?, &embed(&lindblad_apply(spec, sf, &b)?)?);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// `||sum_k 2 y_k* y_k - sum_k (s(x_k)* s(x_k) + s(x_k*)* s(x_k*))||`, which
/// vanishes under the balance condition.
pub fn y_reconstruction_residual(sf: &StandardForm, xs: &[CMat]) -> Result<f64> {
    let n = sf.dim();
    let mut diff = CMat::zeros(n, n);
    for x in xs {
        let y = y_from_x(sf, x)?;
        let yp = y_from_x(sf, &x.adjoint())?;
        diff += (y.adjoint() * &y) * cr(2.0);
        diff -= y.adjoint() * &y + yp.adjoint() * &yp;
    }
    Ok(frobenius(&diff))
}

/// Largest change of `L` or `H` (Frobenius, as superoperators) when `c * I`
/// is added to the drift.
pub fn central_offset_residual(spec: &LindbladSpec, sf: &StandardForm, c: f64) -> Result<f64> {
    let shifted = spec.clone().with_central_offset(spec.central_offset + c);
    let dl = (&lindblad_super(&shifted, sf)? - &lindblad_super(spec, sf)?).frobenius_norm();
    let dh = (&induced_operator(&shifted, sf)? - &induced_operator(spec, sf)?).frobenius_norm();
    Ok(dl.max(dh))
}

/// `1/2 sum (y* y A - 2 y* A y + A y* y) + 1/2 sum (y y* A - 2 y A y* + A y y*)`.
pub fn symmetrized_generator(ys: &[CMat], a: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows(), a.ncols());
    for y in ys {
        let y_adj = y.adjoint();
        let yy = &y_adj * y;
        let yyt = y * &y_adj;
        out += &yy * a - (&y_adj * a * y) * cr(2.0) + a * &yy;
        out += &yyt * a - (y * a * &y_adj) * cr(2.0) + a * &yyt;
    }
    out * cr(0.5)
}

#[derive(Clone, Debug, Serialize)]
pub struct TracialReport {
    pub dim: usize,
    pub samples: usize,
    /// `max |Q_jk|` for the drift from [`build_q`]; exactly zero.
    pub q_max_abs: f64,
    pub balanced: bool,
    /// Largest `||i[Q, A] - sum (y* A y - y A y*)||` over unit `A`.
    pub commutator_residual: f64,
    /// Largest `||L(A) - L_sym(A)||` over unit `A`.
    pub symmetrized_residual: f64,
    /// `||H_sym - H_sym*||_F` for the symmetrized generator.
    pub symmetrized_self_adjoint_residual: f64,
}

impl TracialReport {
    /// For balanced families all identities must hold; for unbalanced ones
    /// only the exact vanishing of `Q` and the symmetry of `L_sym`.
    pub fn passed(&self) -> bool {
        let base = self.q_max_abs == 0.0 && self.symmetrized_self_adjoint_residual < TRACIAL_TOL;
        if self.balanced {
            base && self.commutator_residual < TRACIAL_TOL && self.symmetrized_residual < TRACIAL_TOL
        } else {
            base
        }
    }
}

/// Checks the tracial reductions with `rho = I/n`, where `x_k = y_k`.
pub fn verify_tracial_case(xs: &[CMat], samples: usize, seed: u64) -> Result<TracialReport> {
    let n = xs
        .first()
        .ok_or_else(|| MdfError::InvalidInput("at least one coefficient is required".into()))?
        .nrows();
    let sf = StandardForm::new(DensityMatrix::tracial(n)?)?;
    let balance = check_balance_condition(&sf, xs, 0, seed)?;
    let spec = LindbladSpec::from_coefficients(&sf, xs.to_vec(), None)?;
    let q_max_abs = crate::linalg::max_abs(spec.q());
    let ys = spec.ys().to_vec();

    let sym = SuperOperator::from_fn(n, |a| symmetrized_generator(&ys, a));
    let symmetrized_self_adjoint_residual = sym.self_adjointness_residual();

    let mut rng = Sampler::new(seed);
    let mut commutator_residual: f64 = 0.0;
    let mut symmetrized_residual: f64 = 0.0;
    for _ in 0..samples {
        let a = rng.ginibre(n);
        let a = &a / cr(frobenius(&a));
        let mut rhs = CMat::zeros(n, n);
        for y in &ys {
            rhs += y.adjoint() * &a * y - y * &a * y.adjoint();
        }
        let lhs = commutator(spec.q(), &a) * c(0.0, 1.0);
        commutator_residual = commutator_residual.max(frobenius(&(lhs - rhs)));
        let l = lindblad_apply(&spec, &sf, &a)?;
        symmetrized_residual = symmetrized_residual.max(frobenius(&(l - symmetrized_generator(&ys, &a))));
    }
    Ok(TracialReport {
        dim: n,
        samples,
        q_max_abs,
        balanced: balance.balanced(),
        commutator_residual,
        symmetrized_residual,
        symmetrized_self_adjoint_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, matrix_unit, max_abs};

    fn gibbs(seed: u64, n: usize) -> StandardForm {
        let mut s = Sampler::new(seed);
        StandardForm::new(DensityMatrix::new(s.gibbs_state(n, 1.0)).unwrap()).unwrap()
    }

    #[test]
    fn conservative_and_hermiticity_preserving() {
        let sf = gibbs(1, 3);
        let mut s = Sampler::new(2);
        let spec = LindbladSpec::new(&sf, vec![s.ginibre(3), s.ginibre(3)], s.hermitian(3)).unwrap();
        let id = CMat::identity(3, 3);
        assert!(max_abs(&lindblad_apply(&spec, &sf, &id).unwrap()) < 1e-10);
        let a = s.ginibre(3);
        let la = lindblad_apply(&spec, &sf, &a).unwrap();
        let la_adj = lindblad_apply(&spec, &sf, &a.adjoint()).unwrap();
        assert!(max_abs(&(la_adj - la.adjoint())) < 1e-10);
    }

    #[test]
    fn superoperator_matches_direct_application() {
        let sf = gibbs(3, 3);
        let mut s = Sampler::new(4);
        let spec = LindbladSpec::new(&sf, vec![s.ginibre(3)], s.hermitian(3)).unwrap();
        let l = lindblad_super(&spec, &sf).unwrap();
        let a = s.ginibre(3);
        let direct = lindblad_apply(&spec, &sf, &a).unwrap();
        assert!(max_abs(&(sf.apply_map(&l, &a).unwrap() - direct)) < 1e-10);
    }

    #[test]
    fn induced_operator_intertwines() {
        let sf = gibbs(5, 3);
        let mut s = Sampler::new(6);
        let spec = LindbladSpec::new(&sf, vec![s.ginibre(3)], s.hermitian(3)).unwrap();
        let h = induced_operator(&spec, &sf).unwrap();
        let a = s.ginibre(3);
        let i0 = |m: &CMat| sf.rho_quarter() * m * sf.rho_quarter();
        let lhs = sf.apply_map(&h, &i0(&a)).unwrap();
        let rhs = i0(&lindblad_apply(&spec, &sf, &a).unwrap());
        assert!(max_abs(&(lhs - rhs)) < 1e-10);
        assert!(sf.apply(&h, sf.xi0()).unwrap().norm() < 1e-9);
    }

    #[test]
    fn canonical_drift_is_hermitian_and_matches_closed_form() {
        let sf = gibbs(7, 3);
        let mut s = Sampler::new(8);
        let x = s.ginibre(3);
        let q = build_q(&sf, std::slice::from_ref(&x), &KernelFunction::F0).unwrap();
        assert!(hermiticity_residual(&q) < 1e-9);
        // i I0(S(y* y)) with y = sigma_{-i/4}(x)
        let y = y_from_x(&sf, &x).unwrap();
        let s_yy = modular_map(&sf, &(y.adjoint() * &y), ModularMap::S).unwrap();
        let alt = crate::modular::apply_i0(&sf, &s_yy).unwrap() * c(0.0, 1.0);
        assert!(max_abs(&(q - alt)) < 1e-10);
    }

    #[test]
    fn tracial_drift_vanishes_exactly() {
        let sf = StandardForm::new(DensityMatrix::tracial(3).unwrap()).unwrap();
        let mut s = Sampler::new(9);
        let q = build_q(&sf, &[s.ginibre(3)], &KernelFunction::F0).unwrap();
        assert_eq!(max_abs(&q), 0.0);
    }

    #[test]
    fn balance_examples() {
        let sf = gibbs(10, 2);
        let mut s = Sampler::new(11);
        let h = s.hermitian(2);
        let r = check_balance_condition(&sf, &[h], 50, 1).unwrap();
        assert!(r.condition_residual < 1e-12 && r.dressed_residual < 1e-10 && r.equivalent);
        let e12 = matrix_unit(2, 0, 1);
        let r = check_balance_condition(&sf, std::slice::from_ref(&e12), 50, 1).unwrap();
        assert!(r.condition_residual > 0.1 && r.dressed_residual > 1e-3 && r.equivalent);
        let x = s.ginibre(2);
        let r = check_balance_condition(&sf, &[x.clone(), x.adjoint()], 50, 1).unwrap();
        assert!(r.condition_residual < 1e-12 && r.equivalent);
    }

    #[test]
    fn canonical_drift_gives_self_adjoint_h() {
        let sf = gibbs(12, 3);
        let mut s = Sampler::new(13);
        let x = s.ginibre(3);
        let spec = LindbladSpec::from_coefficients(&sf, vec![x.clone(), x.adjoint()], None).unwrap();
        let r = selfadjointness_residual(&spec, &sf).unwrap();
        assert!(r.h_residual < 1e-8 && r.consistent, "{r:?}");
        assert!((r.h_residual - r.identity_residual).abs() < 1e-9);
    }

    #[test]
    fn perturbed_drift_breaks_self_adjointness() {
        let sf = StandardForm::new(DensityMatrix::new(diag_real(&[0.75, 0.25])).unwrap()).unwrap();
        let mut s = Sampler::new(14);
        let x = s.hermitian(2);
        let base = LindbladSpec::from_coefficients(&sf, vec![x.clone()], None).unwrap();
        let p = crate::linalg::hermitian_part(&matrix_unit(2, 0, 1)) * cr(2.0 * 0.1 / 2f64.sqrt());
        let spec = LindbladSpec::new(&sf, base.ys().to_vec(), base.q() + p).unwrap();
        let r = selfadjointness_residual(&spec, &sf).unwrap();
        assert!(r.h_residual > 1e-3 && r.consistent, "{r:?}");
        assert!((r.h_residual - r.identity_residual).abs() < 1e-9);
    }

    #[test]
    fn dirichlet_sum_matches_induced_operator() {
        let sf = gibbs(15, 3);
        let mut s = Sampler::new(16);
        let x = s.ginibre(3);
        let xs = vec![x.clone(), x.adjoint()];
        let parts = decompose_h(&sf, &xs, &KernelFunction::F0).unwrap();
        let spec = LindbladSpec::from_coefficients(&sf, xs, None).unwrap();
        let h = induced_operator(&spec, &sf).unwrap();
        let sum = &parts[0] + &parts[1];
        assert!((&h - &sum).frobenius_norm() < 1e-7);
    }

    #[test]
    fn decomposition_refuses_unbalanced_family() {
        let sf = gibbs(17, 2);
        let err = decompose_h(&sf, &[matrix_unit(2, 0, 1)], &KernelFunction::F0).unwrap_err();
        assert!(matches!(err, MdfError::BalanceViolated { .. }));
    }

    #[test]
    fn proof_paths_agree() {
        let sf = gibbs(18, 3);
        let mut s = Sampler::new(19);
        let x = s.ginibre(3);
        let spec = LindbladSpec::from_coefficients(&sf, vec![x.clone(), x.adjoint(), s.hermitian(3)], None).unwrap();
        let r = proof_regression(&spec, &sf).unwrap();
        assert!(r.max() < 1e-8, "{r:?}");
    }

    #[test]
    fn component_decomposition_reproduces_generator() {
        let sf = gibbs(20, 3);
        let mut s = Sampler::new(21);
        let x = s.ginibre(3);
        let r = selfadjoint_component_decomposition(&sf, &[x.clone(), x.adjoint()], 20, 1).unwrap();
        assert_eq!(r.components.len(), 4);
        assert!(r.residual < 1e-7, "{}", r.residual);
    }

    #[test]
    fn general_generator_with_f0_matches_canonical() {
        let sf = gibbs(22, 3);
        let mut s = Sampler::new(23);
        let x = s.hermitian(3);
        let g = general_f_generator(&sf, &x, &KernelFunction::F0).unwrap();
        let spec = LindbladSpec::from_coefficients(&sf, vec![x], None).unwrap();
        let l = lindblad_super(&spec, &sf).unwrap();
        assert!((&g - &l).frobenius_norm() < 1e-7);
    }

    #[test]
    fn general_generator_intertwines_with_dirichlet_operator() {
        let sf = StandardForm::new(DensityMatrix::new(diag_real(&[0.75, 0.25])).unwrap()).unwrap();
        let mut s = Sampler::new(24);
        let f = KernelFunction::cauchy(1.0).unwrap();
        for x in [s.hermitian(2), s.ginibre(2)] {
            let g = general_f_generator(&sf, &x, &f).unwrap();
            let h = dirichlet_operator(&DirichletSpec::new(x, f.clone(), Engine::ExactSpectral).unwrap(), &sf).unwrap();
            let r = (&embed_map(&sf, &g).unwrap() - &h).frobenius_norm();
            assert!(r < 1e-7, "{r}");
        }
    }

    #[test]
    fn identity_coefficient_gives_zero_generator() {
        let sf = gibbs(25, 3);
        let g = general_f_generator(&sf, &CMat::identity(3, 3), &KernelFunction::cauchy(1.0).unwrap()).unwrap();
        assert!(g.max_abs() < 1e-12);
    }

    #[test]
    fn kms_matches_self_adjointness() {
        let sf = gibbs(26, 3);
        let mut s = Sampler::new(27);
        let x = s.hermitian(3);
        let good = LindbladSpec::from_coefficients(&sf, vec![x], None).unwrap();
        assert!(kms_residual(&good, &sf, 20, 1).unwrap() < 1e-8);
        let bad = LindbladSpec::new(&sf, good.ys().to_vec(), good.q() + s.hermitian(3)).unwrap();
        assert!(kms_residual(&bad, &sf, 20, 1).unwrap() > 1e-4);
    }

    #[test]
    fn y_reconstruction_under_balance() {
        let sf = gibbs(28, 3);
        let mut s = Sampler::new(29);
        let x = s.ginibre(3);
        assert!(y_reconstruction_residual(&sf, &[x.clone(), x.adjoint()]).unwrap() < 1e-9);
        assert!(y_reconstruction_residual(&sf, &[s.hermitian(3)]).unwrap() < 1e-9);
    }

    #[test]
    fn central_offset_is_invisible() {
        let sf = gibbs(30, 3);
        let mut s = Sampler::new(31);
        let spec = LindbladSpec::from_coefficients(&sf, vec![s.hermitian(3)], None).unwrap();
        assert!(central_offset_residual(&spec, &sf, 2.5).unwrap() < 1e-12);
    }

    #[test]
    fn tracial_case() {
        let mut s = Sampler::new(32);
        let x = s.ginibre(3);
        let r = verify_tracial_case(&[x.clone(), x.adjoint()], 50, 1).unwrap();
        assert!(r.balanced && r.passed(), "{r:?}");
        let r = verify_tracial_case(&[matrix_unit(2, 0, 1)], 50, 1).unwrap();
        assert!(!r.balanced && r.passed() && r.commutator_residual > 0.1, "{r:?}");
        assert!(r.symmetrized_residual > 0.1);
    }
}
