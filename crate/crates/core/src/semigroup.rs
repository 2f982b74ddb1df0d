//! Symmetric semigroups `T_t = e^{-tH}` and sampled Markovianity checks.

use crate::dirichlet::dirichlet_integrand;
use crate::error::{MdfError, Result};
use crate::kernel::KernelFunction;
use crate::linalg::{cr, frobenius, hermitian_part, min_eigenvalue, to_rows, CMat, HermitianEigen, MatrixRows};
use crate::modular::{super_multiplier, HatTable};
use crate::sampling::Sampler;
use crate::standard_form::{project_order_interval, HsVector, StandardForm};
use crate::superop::SuperOperator;
use rayon::prelude::*;
use serde::Serialize;

/// Largest `||H - H*||_F` accepted before exponentiating.
pub const SELF_ADJOINT_GATE: f64 = 1e-8;
/// Eigenvalue slack for the order-interval and positivity checks.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Slack for `E[eta_I] <= E[eta]`.
pub const FORM_TOL: f64 = 1e-8;
/// Eigenvalues of `H` at or below this count as zero.
pub const KERNEL_THRESHOLD: f64 = 1e-10;
/// Witnesses kept per report.
pub const MAX_WITNESSES: usize = 16;
pub const DEFAULT_FORM_SAMPLES: usize = 20;

fn gate(h: &SuperOperator) -> Result<()> {
    let residual = h.self_adjointness_residual();
    if !(residual <= SELF_ADJOINT_GATE) {
        return Err(MdfError::NotSelfAdjoint { residual });
    }
    Ok(())
}

/// Spectral data of a self-adjoint `H`, reused for every `t`.
#[derive(Clone, Debug)]
pub struct Semigroup {
    n: usize,
    eigen: HermitianEigen,
}

impl Semigroup {
    pub fn new(h: &SuperOperator) -> Result<Self> {
        gate(h)?;
        Ok(Self {
            n: h.n(),
            eigen: HermitianEigen::new(&hermitian_part(h.matrix())),
        })
    }

    /// Eigenvalues of `H`, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    /// `e^{-tH}`.
    pub fn propagator(&self, t: f64) -> Result<SuperOperator> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(MdfError::InvalidInput(format!(
                "time must be finite and nonnegative, got {t}"
            )));
        }
        Ok(SuperOperator::from_matrix(
            self.n,
            self.eigen.map(|l| cr((-t * l).exp())),
        ))
    }

    /// `e^{-tH} xi`.
    pub fn evolve(&self, sf: &StandardForm, xi: &HsVector, t: f64) -> Result<HsVector> {
        sf.apply(&self.propagator(t)?, xi)
    }
}

/// `e^{-tH} xi` via the eigendecomposition of `H`.
pub fn evolve(sf: &StandardForm, h: &SuperOperator, xi: &HsVector, t: f64) -> Result<HsVector> {
    Semigroup::new(h)?.evolve(sf, xi, t)
}

#[derive(Clone, Debug)]
pub struct SemigroupProbe {
    h: SuperOperator,
    times: Vec<f64>,
    samples: usize,
    form_samples: usize,
    seed: u64,
}

impl SemigroupProbe {
    pub fn new(h: SuperOperator, times: Vec<f64>, samples: usize, seed: u64) -> Result<Self> {
        gate(&h)?;
        if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(MdfError::InvalidInput(format!(
                "time must be finite and nonnegative, got {t}"
            )));
        }
        Ok(Self {
            h,
            times,
            samples,
            form_samples: DEFAULT_FORM_SAMPLES.min(samples),
            seed,
        })
    }

    /// Number of Hermitian vectors used for `E[eta_I] <= E[eta]`; each needs
    /// one order-interval projection.
    pub fn with_form_samples(mut self, k: usize) -> Self {
        self.form_samples = k;
        self
    }

    pub fn h(&self) -> &SuperOperator {
        &self.h
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    BelowZero,
    AboveXi0,
    ExtremePoint,
    Positivity,
    Form,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub kind: ViolationKind,
    /// `None` for form-level violations.
    pub t: Option<f64>,
    pub sample: usize,
    /// Most negative eigenvalue (or `E[eta] - E[eta_I]`).
    pub margin: f64,
    /// The probed vector, for replay.
    pub vector: MatrixRows,
}

#[derive(Clone, Debug, Serialize)]
pub struct TimeReport {
    pub t: f64,
    /// Interval samples with `T_t eta` below zero or above `xi0`.
    pub interval_violations: usize,
    /// Smallest eigenvalue of `T_t eta` and of `xi0 - T_t eta` over samples.
    pub interval_margin: f64,
    /// Same checks on `rho^{1/4} P rho^{1/4}` for projections `P`.
    pub extreme_violations: usize,
    pub extreme_margin: f64,
    pub positivity_violations: usize,
    pub positivity_margin: f64,
    /// `||T_t xi0 - xi0||`.
    pub markov_residual: f64,
    /// `||J T_t J - T_t||_F`.
    pub j_real_residual: f64,
}

impl TimeReport {
    pub fn violations(&self) -> usize {
        self.interval_violations
            + self.extreme_violations
            + self.positivity_violations
            + usize::from(self.markov_residual > MEMBERSHIP_TOL)
            + usize::from(self.j_real_residual > MEMBERSHIP_TOL)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkovianityReport {
    pub samples: usize,
    pub form_samples: usize,
    pub seed: u64,
    pub times: Vec<TimeReport>,
    pub form_violations: usize,
    /// Largest `E[eta_I] - E[eta]`.
    pub form_margin: f64,
    pub witnesses: Vec<Witness>,
}

impl MarkovianityReport {
    pub fn violations(&self) -> usize {
        self.times.iter().map(TimeReport::violations).sum::<usize>() + self.form_violations
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

struct Samples {
    interval: Vec<CMat>,
    extreme: Vec<CMat>,
    cone: Vec<CMat>,
    form: Vec<CMat>,
}

fn draw_samples(sf: &StandardForm, samples: usize, form_samples: usize, seed: u64) -> Samples {
    let n = sf.dim();
    let mut rng = Sampler::new(seed);
    let dress = |m: &CMat| sf.rho_quarter() * m * sf.rho_quarter();
    let interval = (0..samples).map(|_| dress(&rng.contraction(n))).collect();
    let extreme = (0..samples).map(|_| dress(&rng.projection(n))).collect();
    let cone = (0..samples).map(|_| rng.psd(n)).collect();
    let form = (0..form_samples).map(|_| rng.hermitian(n)).collect();
    Samples {
        interval,
        extreme,
        cone,
        form,
    }
}

/// Smallest eigenvalue of the Hermitian part; `T_t` maps Hermitian matrices
/// to Hermitian matrices up to rounding.
fn min_eig(m: &CMat) -> f64 {
    min_eigenvalue(&hermitian_part(m))
}

fn probe_time(
    sf: &StandardForm,
    semigroup: &Semigroup,
    samples: &Samples,
    t: f64,
) -> Result<(TimeReport, Vec<Witness>)> {
    let tt = semigroup.propagator(t)?;
    let xi0 = sf.xi0().matrix();
    let mut witnesses = Vec::new();
    let mut interval_check = |set: &[CMat], extreme: bool| -> Result<(usize, f64)> {
        let mut count = 0;
        let mut margin = f64::INFINITY;
        for (i, eta) in set.iter().enumerate() {
            let out = sf.apply_map(&tt, eta)?;
            let low = min_eig(&out);
            let high = min_eig(&(xi0 - &out));
            margin = margin.min(low).min(high);
            if low < -MEMBERSHIP_TOL || high < -MEMBERSHIP_TOL {
                count += 1;
                let kind = if extreme {
                    ViolationKind::ExtremePoint
                } else if low < -MEMBERSHIP_TOL {
                    ViolationKind::BelowZero
                } else {
                    ViolationKind::AboveXi0
                };
                witnesses.push(Witness {
                    kind,
                    t: Some(t),
                    sample: i,
                    margin: low.min(high),
                    vector: to_rows(eta),
                });
            }
        }
        Ok((count, margin))
    };
    let (interval_violations, interval_margin) = interval_check(&samples.interval, false)?;
    let (extreme_violations, extreme_margin) = interval_check(&samples.extreme, true)?;

    let mut positivity_violations = 0;
    let mut positivity_margin = f64::INFINITY;
    for (i, xi) in samples.cone.iter().enumerate() {
        let m = min_eig(&sf.apply_map(&tt, xi)?);
        positivity_margin = positivity_margin.min(m);
        if m < -MEMBERSHIP_TOL {
            positivity_violations += 1;
            witnesses.push(Witness {
                kind: ViolationKind::Positivity,
                t: Some(t),
                sample: i,
                margin: m,
                vector: to_rows(xi),
            });
        }
    }
    let markov_residual = frobenius(&(sf.apply_map(&tt, xi0)? - xi0));
    Ok((
        TimeReport {
            t,
            interval_violations,
            interval_margin,
            extreme_violations,
            extreme_margin,
            positivity_violations,
            positivity_margin,
            markov_residual,
            j_real_residual: tt.j_reality_residual(),
        },
        witnesses,
    ))
}

/// Runs every check for every `t` of the probe. Samples are drawn once from
/// the seed, so the report does not depend on scheduling.
pub fn markovianity_report(probe: &SemigroupProbe, sf: &StandardForm) -> Result<MarkovianityReport> {
    if probe.h.n() != sf.dim() {
        return Err(MdfError::DimMismatch {
            expected: sf.dim(),
            got: probe.h.n(),
        });
    }
    let semigroup = Semigroup::new(&probe.h)?;
    let samples = draw_samples(sf, probe.samples, probe.form_samples, probe.seed);
    let per_time: Vec<(TimeReport, Vec<Witness>)> = probe
        .times
        .par_iter()
        .map(|&t| probe_time(sf, &semigroup, &samples, t))
        .collect::<Result<_>>()?;

    let mut witnesses = Vec::new();
    let mut times = Vec::with_capacity(per_time.len());
    for (report, w) in per_time {
        times.push(report);
        witnesses.extend(w);
    }

    let energy = |v: &CMat| -> Result<f64> {
        let hv = sf.apply_map(&probe.h, v)?;
        Ok(crate::linalg::hs_inner(v, &hv).re)
    };
    let mut form_violations = 0;
    let mut form_margin = f64::NEG_INFINITY;
    for (i, eta) in samples.form.iter().enumerate() {
        let projected = project_order_interval(sf, &HsVector::new(eta.clone()))?;
        let gap = energy(projected.matrix())? - energy(eta)?;
        form_margin = form_margin.max(gap);
        if gap > FORM_TOL {
            form_violations += 1;
            witnesses.push(Witness {
                kind: ViolationKind::Form,
                t: None,
                sample: i,
                margin: -gap,
                vector: to_rows(eta),
            });
        }
    }
    witnesses.truncate(MAX_WITNESSES);
    Ok(MarkovianityReport {
        samples: probe.samples,
        form_samples: probe.form_samples,
        seed: probe.seed,
        times,
        form_violations,
        form_margin,
        witnesses,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralGap {
    /// Smallest eigenvalue above [`KERNEL_THRESHOLD`]; `None` when `H = 0`.
    pub gap: Option<f64>,
    pub kernel_dim: usize,
    pub min_eigenvalue: f64,
}

pub fn spectral_gap(h: &SuperOperator) -> Result<SpectralGap> {
    let semigroup = Semigroup::new(h)?;
    let values = semigroup.eigenvalues();
    let kernel_dim = values.iter().filter(|l| l.abs() <= KERNEL_THRESHOLD).count();
    let gap = values
        .iter()
        .copied()
        .filter(|l| *l > KERNEL_THRESHOLD)
        .reduce(f64::min);
    Ok(SpectralGap {
        gap,
        kernel_dim,
        min_eigenvalue: values.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// The operator of the form of `x` with every `f0` weight `hat(omega)`
/// replaced by `-hat(omega)`, i.e. minus the Dirichlet operator. It is
/// self-adjoint and kills `xi0`, but `e^{-tH}` grows and leaves the order
/// interval.
pub fn non_markovian_control(sf: &StandardForm, x: &CMat) -> Result<SuperOperator> {
    let f = KernelFunction::F0;
    let mut table = HatTable::new(&f);
    super_multiplier(sf, &dirichlet_integrand(sf, x)?, |w| table.get(w).map(|v| cr(-v)))
}
