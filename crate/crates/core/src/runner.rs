//! Executes the verification suites of a scenario and collects a report.

use crate::dirichlet::{
    boundary_identity_residual, compare_engines, dirichlet_operator, split_self_adjoint, verify_operator,
    DirichletSpec, Engine, CONE_FORM_TOL, CROSS_TERM_TOL, H_XI0_TOL, J_REAL_TOL, PSD_TOL,
};
use crate::error::{MdfError, Result};
use crate::kernel::{check_admissible, fourier_hat_quadrature, KernelFunction};
use crate::linalg::{cr, frobenius, hermitian_part, max_abs, min_eigenvalue, trace, CMat};
use crate::lindblad::{
    build_q, central_offset_residual, check_balance_condition, decompose_h, embed_map, general_f_generator,
    induced_operator, kms_residual, lindblad_apply, proof_regression, selfadjoint_component_decomposition,
    selfadjointness_residual, verify_tracial_case, y_reconstruction_residual, LindbladSpec,
};
use crate::modular::{apply_i0, modular_map, sigma_real, smear, smear_by_quadrature, ModularMap};
use crate::sampling::Sampler;
use crate::scenario::{Prepared, Scenario, Suite};
use crate::semigroup::{markovianity_report, non_markovian_control, spectral_gap, Semigroup, SemigroupProbe};
use crate::standard_form::{
    jordan_decompose, left_act, project_order_interval, right_j_act, symmetric_embed, symmetric_unembed, HsVector,
};
use crate::superop::SuperOperator;
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Gate for the order-interval projection and for Markov-type memberships.
const MEMBERSHIP_TOL: f64 = 1e-8;
/// Gate for identities that hold up to rounding only.
const ROUNDING_TOL: f64 = 1e-10;
/// Norm of the drift perturbation in the self-adjointness negative control.
const DRIFT_PERTURBATION: f64 = 0.1;
/// `||H - H*||` the perturbed drift must exceed.
const PERTURBATION_DETECTION: f64 = 1e-4;
/// Interval projections run per standard-form suite.
const PROJECTION_SAMPLES: usize = 20;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    /// `None` for values that are only reported.
    pub tolerance: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SuiteStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub status: SuiteStatus,
    pub residuals: Vec<Residual>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub library_version: String,
    pub wall_clock_seconds: f64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

#[derive(Default)]
struct Table {
    residuals: Vec<Residual>,
    notes: Vec<String>,
    details: serde_json::Map<String, serde_json::Value>,
}

impl Table {
    /// Passes when `value <= tol`; NaN fails.
    fn check(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        self.residuals.push(Residual {
            name: name.into(),
            value,
            tolerance: Some(tol),
            passed: value <= tol,
        });
    }

    /// Passes when `value > threshold`.
    fn check_above(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.residuals.push(Residual {
            name: name.into(),
            value,
            tolerance: Some(threshold),
            passed: value > threshold,
        });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.residuals.push(Residual {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            tolerance: None,
            passed: ok,
        });
    }

    fn info(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.push(Residual {
            name: name.into(),
            value,
            tolerance: None,
            passed: true,
        });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn detail<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.details.insert(key.to_string(), v);
    }

    fn finish(self, suite: Suite) -> SuiteReport {
        let ok = self.residuals.iter().all(|r| r.passed);
        SuiteReport {
            suite,
            status: if ok { SuiteStatus::Pass } else { SuiteStatus::Fail },
            residuals: self.residuals,
            notes: self.notes,
            details: if self.details.is_empty() {
                serde_json::Value::Null
            } else {
                serde_json::Value::Object(self.details)
            },
        }
    }
}

struct Context<'a> {
    scenario: &'a Scenario,
    p: &'a Prepared,
    seed: u64,
}

impl Context<'_> {
    fn n(&self) -> usize {
        self.p.sf.dim()
    }

    fn rng(&self, salt: u64) -> Sampler {
        Sampler::new(self.suite_seed(salt))
    }

    fn suite_seed(&self, salt: u64) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt)
    }

    fn samples(&self) -> usize {
        self.scenario.samples
    }

    fn q_is_auto(&self) -> bool {
        self.p.q.is_none()
    }

    fn lindblad_spec(&self) -> Result<LindbladSpec> {
        LindbladSpec::from_coefficients(&self.p.sf, self.p.xs.clone(), self.p.q.clone())
    }

    fn canonical_spec(&self) -> Result<LindbladSpec> {
        LindbladSpec::from_coefficients(&self.p.sf, self.p.xs.clone(), None)
    }

    fn dirichlet_spec(&self, x: &CMat) -> Result<DirichletSpec> {
        DirichletSpec::new(x.clone(), self.p.kernel.clone(), Engine::ExactSpectral)
    }
}

fn unit(m: CMat) -> CMat {
    let norm = frobenius(&m);
    m / cr(norm)
}

fn standard_form_suite(ctx: &Context, t: &mut Table) -> Result<()> {
    let sf = &ctx.p.sf;
    let tol = ctx.scenario.tolerances.standard_form;
    let n = ctx.n();
    t.check("xi0_norm_squared_minus_one", (sf.xi0().norm().powi(2) - 1.0).abs(), tol);
    t.check("xi0_j_real", sf.xi0().j_real_residual(), tol);
    t.check("rho_trace_minus_one", (trace(sf.rho().matrix()) - cr(1.0)).norm(), tol);
    let mut rng = ctx.rng(1);
    let (mut recon, mut ortho, mut neg, mut embed, mut commute) = (0f64, 0f64, 0f64, 0f64, 0f64);
    for _ in 0..ctx.samples() {
        let xi = HsVector::new(rng.hermitian(n));
        let (plus, minus) = jordan_decompose(sf, &xi)?;
        recon = recon.max(frobenius(&(xi.matrix() - (plus.matrix() - minus.matrix()))));
        ortho = ortho.max(plus.inner(&minus).norm());
        neg = neg
            .max(-min_eigenvalue(plus.matrix()))
            .max(-min_eigenvalue(minus.matrix()));
        let a = unit(rng.ginibre(n));
        let back = symmetric_unembed(sf, &symmetric_embed(sf, &a)?)?;
        embed = embed.max(frobenius(&(back - &a)));
        let b = rng.ginibre(n);
        let x = HsVector::new(rng.ginibre(n));
        let ab = left_act(sf, &a, &right_j_act(sf, &b, &x)?)?;
        let ba = right_j_act(sf, &b, &left_act(sf, &a, &x)?)?;
        commute = commute.max(frobenius(&(ab.matrix() - ba.matrix())));
    }
    t.check("jordan_reconstruction", recon, tol);
    t.check("jordan_orthogonality", ortho, tol);
    t.check("jordan_parts_negativity", neg.max(0.0), tol);
    t.check("symmetric_embedding_round_trip", embed, tol);
    t.check("left_right_actions_commute", commute, tol);
    let id = CMat::identity(n, n);
    t.check(
        "embedding_of_identity_is_xi0",
        frobenius(&(symmetric_embed(sf, &id)?.matrix() - sf.xi0().matrix())),
        tol,
    );

    let (mut feasibility, mut idempotence) = (0f64, 0f64);
    for _ in 0..PROJECTION_SAMPLES.min(ctx.samples()) {
        let eta = HsVector::new(rng.hermitian(n));
        let proj = project_order_interval(sf, &eta)?;
        let low = min_eigenvalue(proj.matrix());
        let high = min_eigenvalue(&(sf.xi0().matrix() - proj.matrix()));
        feasibility = feasibility.max(-low).max(-high);
        let again = project_order_interval(sf, &proj)?;
        idempotence = idempotence.max(frobenius(&(again.matrix() - proj.matrix())));
    }
    t.check("order_interval_feasibility", feasibility.max(0.0), MEMBERSHIP_TOL);
    t.check("order_interval_idempotence", idempotence, MEMBERSHIP_TOL);
    t.info("max_abs_kappa", sf.max_abs_kappa());
    t.info(
        "min_eigenvalue_rho",
        sf.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min),
    );
    Ok(())
}

fn modular_suite(ctx: &Context, t: &mut Table) -> Result<()> {
    let sf = &ctx.p.sf;
    let tols = &ctx.scenario.tolerances;
    let n = ctx.n();
    let mut rng = ctx.rng(2);
    let (mut ti, mut it, mut group, mut smear_gap) = (0f64, 0f64, 0f64, 0f64);
    for _ in 0..ctx.samples() {
        let a = unit(rng.ginibre(n));
        let t_of_i0 = modular_map(sf, &apply_i0(sf, &a)?, ModularMap::T)?;
        ti = ti.max(frobenius(&(t_of_i0 - &a)));
        let i0_of_t = apply_i0(sf, &modular_map(sf, &a, ModularMap::T)?)?;
        it = it.max(frobenius(&(i0_of_t - &a)));
        let composed = sigma_real(sf, &sigma_real(sf, &a, 1.1)?, 0.3)?;
        group = group.max(frobenius(&(composed - sigma_real(sf, &a, 1.4)?)));
    }
    for _ in 0..ctx.samples().min(5) {
        let a = unit(rng.ginibre(n));
        let exact = smear(sf, &a, &ctx.p.kernel)?;
        let quad = smear_by_quadrature(sf, &a, &ctx.p.kernel)?;
        smear_gap = smear_gap.max(frobenius(&(exact - quad)));
    }
    t.check("t_after_i0_minus_identity", ti, tols.modular_inverse);
    t.check("i0_after_t_minus_identity", it, tols.modular_inverse);
    t.check("flow_group_law", group, tols.modular_inverse);
    t.check("smearing_engines", smear_gap, tols.engine);

    let mut fourier = 0f64;
    let mut kappas: Vec<f64> = sf.kappa().iter().copied().collect();
    kappas.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    kappas.dedup();
    for &k in &kappas {
        let f0 = KernelFunction::F0;
        fourier = fourier.max((fourier_hat_quadrature(&f0, k)? - f0.hat(k)?).abs());
    }
    t.check("f0_fourier_identity", fourier, tols.fourier);

    let cert = check_admissible(&ctx.p.kernel);
    t.flag("kernel_usable", cert.usable());
    t.info("kernel_decay_exponent", cert.decay_exponent);
    t.detail("admissibility", &cert);
    Ok(())
}

fn dirichlet_suite(ctx: &Context, t: &mut Table) -> Result<()> {
    let sf = &ctx.p.sf;
    let tols = &ctx.scenario.tolerances;
    let mut reports = Vec::new();
    let (mut xi0, mut jr, mut jf, mut cross, mut cone, mut psd) =
        (0f64, 0f64, 0f64, f64::NEG_INFINITY, 0f64, f64::INFINITY);
    let (mut engines, mut boundary, mut split) = (0f64, 0f64, 0f64);
    for (k, x) in ctx.p.xs.iter().enumerate() {
        let spec = ctx.dirichlet_spec(x)?;
        let h = dirichlet_operator(&spec, sf)?;
        let r = verify_operator(&spec, sf, &h, ctx.samples(), ctx.suite_seed(30 + k as u64))?;
        xi0 = xi0.max(r.h_xi0_residual);
        jr = jr.max(r.j_real_residual);
        jf = jf.max(r.j_form_residual);
        cross = cross.max(r.max_cross_term);
        cone = cone.max(r.cone_form_residual);
        psd = psd.min(r.psd_min_eig);
        reports.push(r);

        engines = engines.max(compare_engines(sf, x, &ctx.p.kernel)?.relative);
        boundary = boundary.max(boundary_identity_residual(sf, x, &ctx.p.kernel)?);
        let (x1, x2) = split_self_adjoint(x);
        let h1 = dirichlet_operator(&ctx.dirichlet_spec(&x1)?, sf)?;
        let h2 = dirichlet_operator(&ctx.dirichlet_spec(&x2)?, sf)?;
        split = split.max((&h - &(&h1 + &h2).scale(cr(0.5))).frobenius_norm());
    }
    t.check("h_xi0", xi0, H_XI0_TOL);
    t.check("j_commutation", jr, J_REAL_TOL);
    t.check("j_form", jf, J_REAL_TOL);
    t.check("max_cross_term", cross.max(0.0), CROSS_TERM_TOL);
    t.check("cone_form", cone, CONE_FORM_TOL);
    t.check("psd_negativity", (-psd).max(0.0), PSD_TOL);
    t.check("engine_relative_difference", engines, tols.engine);
    t.check("boundary_identity", boundary, tols.boundary);
    t.check("self_adjoint_split", split, tols.decomposition);
    t.detail("coefficients", &reports);
    Ok(())
}

fn lindblad_suite(ctx: &Context, t: &mut Table) -> Result<()> {
    let sf = &ctx.p.sf;
    let tols = &ctx.scenario.tolerances;
    let n = ctx.n();
    let spec = ctx.lindblad_spec()?;
    let h = induced_operator(&spec, sf)?;
    let id = CMat::identity(n, n);
    t.check(
        "generator_of_identity",
        frobenius(&lindblad_apply(&spec, sf, &id)?),
        ROUNDING_TOL,
    );
    t.check("h_xi0", sf.apply(&h, sf.xi0())?.norm(), 1e-9);
    let mut rng = ctx.rng(4);
    let mut star = 0f64;
    for _ in 0..ctx.samples() {
        let a = unit(rng.ginibre(n));
        let l = lindblad_apply(&spec, sf, &a)?;
        star = star.max(frobenius(&(lindblad_apply(&spec, sf, &a.adjoint())? - l.adjoint())));
    }
    t.check("hermiticity_preservation", star, ROUNDING_TOL);

    let balance = check_balance_condition(sf, &ctx.p.xs, ctx.samples(), ctx.suite_seed(41))?;
    t.info("balance_condition_residual", balance.condition_residual);
    t.info("balance_dressed_residual", balance.dressed_residual);
    t.flag("balance_residuals_agree", balance.equivalent);
    t.detail("balance", &balance);

    let sa = selfadjointness_residual(&spec, sf)?;
    t.info("h_minus_adjoint", sa.h_residual);
    t.info("self_adjointness_identity", sa.identity_residual);
    t.flag("self_adjointness_residuals_agree", sa.consistent);
    let kms = kms_residual(&spec, sf, ctx.samples(), ctx.suite_seed(42))?;
    t.info("kms_residual", kms);
    t.flag(
        "kms_matches_self_adjointness",
        (kms < tols.self_adjoint) == sa.self_adjoint(),
    );
    t.check(
        "central_offset_invisible",
        central_offset_residual(&spec, sf, 1.0)?,
        ROUNDING_TOL,
    );

    let canonical = ctx.q_is_auto();
    if !canonical {
        t.note("drift given explicitly: canonical-drift checks use the drift built from the coefficients");
    }
    let auto = ctx.canonical_spec()?;
    let q_residual = frobenius(&(auto.q() - auto.q().adjoint()));
    t.check("canonical_drift_hermitian", q_residual, 1e-9);

    if balance.balanced() {
        let auto_sa = selfadjointness_residual(&auto, sf)?;
        t.check("canonical_h_minus_adjoint", auto_sa.h_residual, tols.self_adjoint);

        let mut p = hermitian_part(&rng.ginibre(n));
        let tr = trace(&p) / cr(n as f64);
        p -= CMat::identity(n, n) * tr;
        if frobenius(&p) > 0.0 && n > 1 {
            let p = unit(p) * cr(DRIFT_PERTURBATION);
            let perturbed = LindbladSpec::new(sf, auto.ys().to_vec(), auto.q() + p)?;
            t.check_above(
                "perturbed_drift_h_minus_adjoint",
                selfadjointness_residual(&perturbed, sf)?.h_residual,
                PERTURBATION_DETECTION,
            );
        }

        let parts = decompose_h(sf, &ctx.p.xs, &KernelFunction::F0)?;
        let mut sum = SuperOperator::zeros(n);
        for part in &parts {
            sum = &sum + part;
        }
        let h_auto = induced_operator(&auto, sf)?;
        t.check(
            "h_minus_dirichlet_sum",
            (&h_auto - &sum).frobenius_norm(),
            tols.decomposition,
        );
        let comp = selfadjoint_component_decomposition(sf, &ctx.p.xs, ctx.samples(), ctx.suite_seed(43))?;
        t.check("self_adjoint_components", comp.residual, tols.decomposition);
        t.check(
            "y_reconstruction",
            y_reconstruction_residual(sf, &ctx.p.xs)?,
            tols.tracial,
        );
    } else {
        t.note(format!(
            "decompose_H skipped: {}",
            MdfError::BalanceViolated {
                residual: balance.condition_residual
            }
        ));
    }

    let mut general = 0f64;
    for x in &ctx.p.xs {
        let g = general_f_generator(sf, x, &ctx.p.kernel)?;
        let hx = dirichlet_operator(&ctx.dirichlet_spec(x)?, sf)?;
        general = general.max((&embed_map(sf, &g)? - &hx).frobenius_norm());
    }
    t.check("general_kernel_intertwining", general, tols.general_f);

    if sf.is_tracial() {
        let r = verify_tracial_case(&ctx.p.xs, ctx.samples(), ctx.suite_seed(44))?;
        t.check("tracial_drift_max_abs", r.q_max_abs, 0.0);
        t.check(
            "tracial_symmetrized_self_adjoint",
            r.symmetrized_self_adjoint_residual,
            tols.tracial,
        );
        if r.balanced {
            t.check("tracial_commutator_identity", r.commutator_residual, tols.tracial);
            t.check("tracial_symmetrized_generator", r.symmetrized_residual, tols.tracial);
        } else {
            t.info("tracial_commutator_identity", r.commutator_residual);
            t.info("tracial_symmetrized_generator", r.symmetrized_residual);
        }
        t.detail("tracial", &r);
    }
    Ok(())
}

fn semigroup_suite(ctx: &Context, t: &mut Table) -> Result<()> {
    let sf = &ctx.p.sf;
    let n = ctx.n();
    let mut h = SuperOperator::zeros(n);
    for x in &ctx.p.xs {
        h = &h + &dirichlet_operator(&ctx.dirichlet_spec(x)?, sf)?;
    }
    let gap = spectral_gap(&h)?;
    if let Some(g) = gap.gap {
        t.info("spectral_gap", g);
    } else {
        t.note("H = 0: spectral gap undefined");
    }
    t.info("kernel_dimension", gap.kernel_dim as f64);
    t.detail("spectral_gap", &gap);

    let semigroup = Semigroup::new(&h)?;
    let (mut law, mut sym) = (0f64, 0f64);
    for &s in &ctx.scenario.times {
        for &u in &ctx.scenario.times {
            let lhs = semigroup.propagator(s + u)?;
            let rhs = &semigroup.propagator(s)? * &semigroup.propagator(u)?;
            law = law.max((&lhs - &rhs).max_abs());
        }
        sym = sym.max(semigroup.propagator(s)?.self_adjointness_residual());
    }
    t.check("semigroup_law", law, 1e-9);
    t.check("propagator_symmetry", sym, 1e-9);

    let probe = SemigroupProbe::new(h, ctx.scenario.times.clone(), ctx.samples(), ctx.suite_seed(5))?;
    let report = markovianity_report(&probe, sf)?;
    t.check("markovianity_violations", report.violations() as f64, 0.0);
    let margin = report
        .times
        .iter()
        .map(|r| r.interval_margin.min(r.extreme_margin).min(r.positivity_margin))
        .fold(f64::INFINITY, f64::min);
    t.info("worst_membership_margin", margin);
    t.info("worst_form_gap", report.form_margin);
    t.detail("markovianity", &report);

    let mut control = SuperOperator::zeros(n);
    for x in &ctx.p.xs {
        control = &control + &non_markovian_control(sf, x)?;
    }
    if control.max_abs() > 0.0 {
        let probe = SemigroupProbe::new(control, ctx.scenario.times.clone(), ctx.samples(), ctx.suite_seed(6))?;
        let r = markovianity_report(&probe, sf)?;
        t.check_above("negative_control_violations", r.violations() as f64, 0.0);
    } else {
        t.note("negative control skipped: the Dirichlet operator vanishes");
    }
    Ok(())
}

fn proof_regression_suite(ctx: &Context, t: &mut Table) -> Result<()> {
    let sf = &ctx.p.sf;
    let tol = ctx.scenario.tolerances.proof_regression;
    let spec = ctx.canonical_spec()?;
    let r = proof_regression(&spec, sf)?;
    t.check("modular_maps_vs_conjugation", r.modular_vs_conjugation, tol);
    t.check("adjoint_term_by_term", r.adjoint_vs_transpose, tol);
    t.check("canonical_drift_vs_conjugation", r.canonical_vs_conjugation, tol);
    let balanced = check_balance_condition(sf, &ctx.p.xs, 0, 0)?.balanced();
    if balanced {
        t.check("dirichlet_sum_vs_conjugation", r.dirichlet_vs_conjugation, tol);
        t.check("dirichlet_sum_vs_modular_maps", r.dirichlet_vs_modular, tol);
    } else {
        t.info("dirichlet_sum_vs_conjugation", r.dirichlet_vs_conjugation);
        t.info("dirichlet_sum_vs_modular_maps", r.dirichlet_vs_modular);
        t.note("balance condition fails: the Dirichlet-sum path is reported, not gated");
    }
    let q = build_q(sf, &ctx.p.xs, &KernelFunction::F0)?;
    t.info("canonical_drift_max_abs", max_abs(&q));
    Ok(())
}

fn run_suite(ctx: &Context, suite: Suite) -> SuiteReport {
    let mut t = Table::default();
    let outcome = match suite {
        Suite::StandardForm => standard_form_suite(ctx, &mut t),
        Suite::Modular => modular_suite(ctx, &mut t),
        Suite::Dirichlet => dirichlet_suite(ctx, &mut t),
        Suite::Lindblad => lindblad_suite(ctx, &mut t),
        Suite::Semigroup => semigroup_suite(ctx, &mut t),
        Suite::ProofRegression => proof_regression_suite(ctx, &mut t),
    };
    let mut report = t.finish(suite);
    if let Err(e) = outcome {
        report.status = SuiteStatus::Fail;
        report.notes.push(format!("error: {e}"));
    }
    report
}

/// Runs the requested suites. Input problems (schema, sizes, states that are
/// not faithful) are returned as errors; numerical failures inside a suite
/// mark that suite as failed.
pub fn run_scenario(scenario: &Scenario, seed: Option<u64>, suites: Option<&[Suite]>) -> Result<RunReport> {
    let start = Instant::now();
    let p = scenario.prepare()?;
    let seed = seed.unwrap_or(scenario.seed);
    let ctx = Context { scenario, p: &p, seed };
    let wanted: Vec<Suite> = suites.map(<[Suite]>::to_vec).unwrap_or_else(|| scenario.suites.clone());
    let reports: Vec<SuiteReport> = Suite::ALL
        .into_iter()
        .map(|s| {
            if wanted.contains(&s) {
                run_suite(&ctx, s)
            } else {
                SuiteReport {
                    suite: s,
                    status: SuiteStatus::Skipped,
                    residuals: Vec::new(),
                    notes: vec!["not requested".into()],
                    details: serde_json::Value::Null,
                }
            }
        })
        .collect();
    let passed = reports.iter().all(|r| r.status != SuiteStatus::Fail);
    Ok(RunReport {
        scenario: scenario.clone(),
        seed,
        library_version: LIBRARY_VERSION.to_string(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        passed,
        suites: reports,
    })
}

/// Writes the report next to `path` via a temporary file and a rename.
pub fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    let io = |e: std::io::Error| MdfError::InvalidInput(format!("cannot write {}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut file = std::fs::File::create(&tmp).map_err(io)?;
        let text = serde_json::to_string_pretty(report).expect("report serializes");
        file.write_all(text.as_bytes()).map_err(io)?;
        file.write_all(b"\n").map_err(io)?;
        file.sync_all().map_err(io)?;
    }
    std::fs::rename(&tmp, path).map_err(io)
}

/// Human-readable summary: one line per suite, then the failing rows.
pub fn summary(report: &RunReport) -> String {
    let mut out = format!(
        "scenario {} (n = {}, seed {}): {}\n",
        report.scenario.name,
        report.scenario.dim,
        report.seed,
        if report.passed { "PASS" } else { "FAIL" }
    );
    for s in &report.suites {
        let status = match s.status {
            SuiteStatus::Pass => "pass",
            SuiteStatus::Fail => "FAIL",
            SuiteStatus::Skipped => "skipped",
        };
        out.push_str(&format!("  {:<17} {status}\n", s.suite.name()));
        for r in s.residuals.iter().filter(|r| !r.passed) {
            match r.tolerance {
                Some(tol) => out.push_str(&format!("    {} = {:.3e} (tolerance {:.1e})\n", r.name, r.value, tol)),
                None => out.push_str(&format!("    {} failed\n", r.name)),
            }
        }
        if s.status == SuiteStatus::Fail {
            for note in &s.notes {
                out.push_str(&format!("    note: {note}\n"));
            }
        }
    }
    out
}
