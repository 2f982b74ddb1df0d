//! Smearing kernels on the real line: evaluation on the strip
//! `|Im z| <= 1/4`, Fourier transforms, quadrature rules and the
//! admissibility check.

use crate::error::{MdfError, Result};
use crate::linalg::c;
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Gauss-Legendre nodes per panel.
pub const GL_NODES: usize = 64;
/// Panel width of the composite rule before refinement.
pub const PANEL_WIDTH: f64 = 0.5;
/// Truncation point is chosen so that the kernel mass beyond it is below this.
pub const TAIL_TOL: f64 = 1e-12;
/// Relative target of the adaptive Fourier transform.
pub const HAT_REL_TOL: f64 = 1e-9;
/// Absolute floor added to [`HAT_REL_TOL`] for transforms that are tiny.
pub const HAT_ABS_FLOOR: f64 = 1e-15;
/// Number of panel halvings tried before giving up.
pub const MAX_REFINEMENTS: u32 = 8;
/// Largest `|kappa|` accepted by [`KernelFunction::hat`].
pub const MAX_FREQUENCY: f64 = 700.0;
/// Smallest Cauchy scale: the poles at `+-i s` must stay off the strip.
pub const MIN_CAUCHY_SCALE: f64 = 0.25;

const TRUNCATION_SEARCH_LIMIT: f64 = 200.0;
const NEAR_FIELD: f64 = 8.0;
const MAX_FAR_PANEL: f64 = 4.0;
/// Largest `omega * h` per panel; 64 nodes resolve this many radians easily.
const MAX_PHASE_PER_PANEL: f64 = 40.0;
const WINDOW_MIN: f64 = 200.0;
const WINDOW_MAX: f64 = 20_000.0;
/// `omega_min * T` needed for the window's Fourier leakage to be negligible.
const WINDOW_RESOLUTION: f64 = 264.0;

pub type StripFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
pub type TailFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied kernel: an analytic function on the strip plus a bound on
/// its two-sided tail mass `int_{|t| > T} |f(t)| dt`.
#[derive(Clone)]
pub struct TabulatedKernel {
    name: String,
    f: StripFn,
    tail: TailFn,
    mass: Option<f64>,
}

impl TabulatedKernel {
    pub fn new(name: impl Into<String>, f: StripFn, tail: TailFn) -> Self {
        Self {
            name: name.into(),
            f,
            tail,
            mass: None,
        }
    }

    /// Records the total mass, which enables windowed quadrature for slowly
    /// decaying kernels.
    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = Some(mass);
        self
    }

    /// `sech(a t)`, analytic for `|Im z| < pi / (2a)`; `a = pi` gives unit
    /// mass and Fourier transform `sech(kappa / 2)`.
    pub fn sech(a: f64) -> Self {
        Self::new(
            format!("sech({a})"),
            Arc::new(move |z: Complex64| {
                let w = if z.re >= 0.0 { z } else { -z };
                let e = (-a * w).exp();
                e * 2.0 / (e * e + 1.0)
            }),
            Arc::new(move |t: f64| 4.0 * (-a * t).exp() / a),
        )
    }

    /// `exp(-t^2)`: entire, but its boundary sum changes sign.
    pub fn gaussian() -> Self {
        Self::new(
            "gaussian",
            Arc::new(|z: Complex64| (-z * z).exp()),
            Arc::new(|t: f64| (-t * t).exp() / t.max(1e-300)),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for TabulatedKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TabulatedKernel").field("name", &self.name).finish()
    }
}

#[derive(Clone, Debug)]
pub enum KernelFunction {
    /// `f0(t) = 2 / (e^{2 pi t} + e^{-2 pi t})`.
    F0,
    /// `s / (pi (s^2 + t^2))`, unit mass.
    Cauchy {
        scale: f64,
    },
    Tabulated(TabulatedKernel),
}

impl KernelFunction {
    pub fn cauchy(scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale <= MIN_CAUCHY_SCALE {
            return Err(MdfError::NotAdmissible(format!(
                "Cauchy scale must exceed {MIN_CAUCHY_SCALE}, got {scale}"
            )));
        }
        Ok(Self::Cauchy { scale })
    }

    pub fn name(&self) -> String {
        match self {
            Self::F0 => "f0".into(),
            Self::Cauchy { scale } => format!("cauchy({scale})"),
            Self::Tabulated(t) => t.name.clone(),
        }
    }

    pub fn is_f0(&self) -> bool {
        matches!(self, Self::F0)
    }

    /// Value at complex argument `z`.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        match self {
            Self::F0 => {
                // 1 / cosh(2 pi z), written to avoid overflow for large |Re z|.
                let w = if z.re >= 0.0 { z } else { -z };
                let e = (w * (-2.0 * PI)).exp();
                e * 2.0 / (e * e + 1.0)
            }
            Self::Cauchy { scale } => c(*scale / PI, 0.0) / (z * z + scale * scale),
            Self::Tabulated(t) => (t.f)(z),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_complex(c(t, 0.0)).re
    }

    /// `f(t + i s)`.
    pub fn strip_eval(&self, t: f64, s: f64) -> Complex64 {
        self.eval_complex(c(t, s))
    }

    /// Bound on `int_{|t| > T} |f(t)| dt`.
    pub fn tail_mass(&self, t: f64) -> f64 {
        match self {
            Self::F0 => 2.0 * (-2.0 * PI * t).exp() / PI,
            Self::Cauchy { scale } => 1.0 - 2.0 / PI * (t / scale).atan(),
            Self::Tabulated(k) => (k.tail)(t),
        }
    }

    /// Total mass `int f`, when known in closed form.
    pub fn closed_form_mass(&self) -> Option<f64> {
        match self {
            Self::F0 => Some(0.5),
            Self::Cauchy { .. } => Some(1.0),
            Self::Tabulated(t) => t.mass,
        }
    }

    /// Fourier transform `int f(t) e^{i kappa t} dt`.
    pub fn hat(&self, kappa: f64) -> Result<f64> {
        if !kappa.is_finite() || kappa.abs() > MAX_FREQUENCY {
            return Err(MdfError::Overflow { exponent: kappa });
        }
        match self {
            Self::F0 => {
                let a = kappa.abs() / 4.0;
                let e = (-a).exp();
                Ok(e / (1.0 + e * e))
            }
            Self::Cauchy { scale } => Ok((-scale * kappa.abs()).exp()),
            Self::Tabulated(_) => fourier_hat_quadrature(self, kappa),
        }
    }

    /// The kernel `t -> f(t + i/4) + f(t - i/4)` as an ordinary kernel.
    ///
    /// `None` for `f0`, whose boundary sum is a point mass at the origin.
    pub fn boundary_sum_kernel(&self) -> Option<KernelFunction> {
        if self.is_f0() {
            return None;
        }
        let inner = self.clone();
        let tail_src = self.clone();
        let shift = c(0.0, 0.25);
        let mut k = TabulatedKernel::new(
            format!("boundary_sum({})", self.name()),
            Arc::new(move |z: Complex64| inner.eval_complex(z + shift) + inner.eval_complex(z - shift)),
            // Loose: on the strip lines the tails are comparable to the real-line tail.
            Arc::new(move |t: f64| 4.0 * tail_src.tail_mass(t)),
        );
        if let Some(m) = self.closed_form_mass() {
            k = k.with_mass(2.0 * m);
        }
        Some(KernelFunction::Tabulated(k))
    }
}

/// Closed form where available, adaptive quadrature otherwise.
pub fn fourier_hat(f: &KernelFunction, kappa: f64) -> Result<f64> {
    f.hat(kappa)
}

fn gl64() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let rule = GaussLegendre::new(GL_NODES.try_into().expect("nonzero"));
        let mut pairs = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
        pairs
    })
}

/// Composite Gauss-Legendre nodes on `[a, b]` with panels of width at most `h`.
fn panel_nodes(a: f64, b: f64, h: f64, out: &mut Vec<(f64, f64)>) {
    if b <= a {
        return;
    }
    let panels = ((b - a) / h).ceil().max(1.0) as usize;
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        for &(x, w) in gl64() {
            out.push((mid + 0.5 * width * x, 0.5 * width * w));
        }
    }
}

/// A quadrature rule for `int f(t) g(t) dt`: the integral is approximated by
/// `sum c_i g(t_i)` over the stored `(t_i, c_i)`.
#[derive(Clone, Debug)]
pub struct KernelRule {
    nodes: Vec<(f64, f64)>,
    truncation: f64,
    windowed: bool,
}

impl KernelRule {
    /// Rule adapted to integrands whose nonzero frequencies lie in
    /// `[omega_min, omega_max]`.
    ///
    /// Kernels whose tail mass drops below [`TAIL_TOL`] within a few hundred
    /// units are truncated there. Slowly decaying kernels with known mass are
    /// integrated against a smooth window `w` and the missing mass is
    /// restored with the window average of the integrand:
    /// `int f g ~ int f w g + (mass - int f w) * int w g / int w`.
    /// This is exact for constant integrands and has negligible error for
    /// oscillating ones once `omega_min * T` is large.
    pub fn new(f: &KernelFunction, omega_min: f64, omega_max: f64, refine: u32) -> Result<Self> {
        let scale = 0.5_f64.powi(refine as i32);
        let omega_max = omega_max.abs();
        let mut h_near = PANEL_WIDTH * scale;
        if omega_max > 0.0 {
            h_near = h_near.min(MAX_PHASE_PER_PANEL / omega_max * scale);
        }
        if let Some(t) = truncation_point(f) {
            let mut nodes = Vec::new();
            panel_nodes(-t, t, h_near, &mut nodes);
            for node in &mut nodes {
                node.1 *= f.eval(node.0);
            }
            return Ok(Self {
                nodes,
                truncation: t,
                windowed: false,
            });
        }
        let mass = f.closed_form_mass().ok_or_else(|| {
            MdfError::QuadratureNotConverged(format!(
                "kernel {} decays too slowly to truncate and has no closed-form mass",
                f.name()
            ))
        })?;
        let t_far = if omega_min > 0.0 {
            (WINDOW_RESOLUTION / omega_min).clamp(WINDOW_MIN, WINDOW_MAX)
        } else {
            WINDOW_MIN
        };
        let mut h_far = MAX_FAR_PANEL * scale;
        if omega_max > 0.0 {
            h_far = h_far.min(MAX_PHASE_PER_PANEL / omega_max * scale);
        }
        let mut raw = Vec::new();
        panel_nodes(-t_far, -NEAR_FIELD, h_far, &mut raw);
        panel_nodes(-NEAR_FIELD, NEAR_FIELD, h_near, &mut raw);
        panel_nodes(NEAR_FIELD, t_far, h_far, &mut raw);
        let centre = 0.75 * t_far;
        let width = t_far / 24.0;
        let window = |t: f64| 0.5 * libm::erfc((t.abs() - centre) / width);
        let mut nodes = Vec::with_capacity(raw.len());
        let mut captured = 0.0;
        let mut window_mass = 0.0;
        for &(t, w) in &raw {
            let win = window(t);
            let coef = w * win * f.eval(t);
            captured += coef;
            window_mass += w * win;
            nodes.push((t, coef));
        }
        let missing = (mass - captured) / window_mass;
        for (node, &(t, w)) in nodes.iter_mut().zip(&raw) {
            node.1 += missing * w * window(t);
        }
        Ok(Self {
            nodes,
            truncation: t_far,
            windowed: true,
        })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn is_windowed(&self) -> bool {
        self.windowed
    }

    pub fn integrate<G: FnMut(f64) -> Complex64>(&self, mut g: G) -> Complex64 {
        self.nodes.iter().map(|&(t, w)| g(t) * w).sum()
    }
}

/// Smallest multiple of the panel width beyond which the tail mass is below
/// [`TAIL_TOL`], if one exists below the search limit.
fn truncation_point(f: &KernelFunction) -> Option<f64> {
    let mut t = PANEL_WIDTH;
    while t <= TRUNCATION_SEARCH_LIMIT {
        if f.tail_mass(t) <= TAIL_TOL {
            return Some(t);
        }
        t += PANEL_WIDTH;
    }
    None
}

/// `int f(t) e^{i kappa t} dt` by composite Gauss-Legendre quadrature, halving
/// the panels until two successive results agree to [`HAT_REL_TOL`].
pub fn fourier_hat_quadrature(f: &KernelFunction, kappa: f64) -> Result<f64> {
    if !kappa.is_finite() || kappa.abs() > MAX_FREQUENCY {
        return Err(MdfError::Overflow { exponent: kappa });
    }
    let w = kappa.abs();
    let eval = |refine: u32| -> Result<f64> {
        let rule = KernelRule::new(f, w, w, refine)?;
        Ok(rule.nodes().iter().map(|&(t, c)| c * (kappa * t).cos()).sum())
    };
    let mut prev = eval(0)?;
    for refine in 1..=MAX_REFINEMENTS {
        let next = eval(refine)?;
        if (next - prev).abs() <= HAT_REL_TOL * next.abs() + HAT_ABS_FLOOR {
            return Ok(next);
        }
        prev = next;
    }
    Err(MdfError::QuadratureNotConverged(format!(
        "Fourier transform of {} at kappa = {kappa} did not settle after {MAX_REFINEMENTS} refinements",
        f.name()
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryStatus {
    Holds,
    Fails,
    /// The boundary sum is a point mass at the origin (the `f0` case).
    Distributional,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
    pub fit_range: (f64, f64),
    pub strip_lines: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityCertificate {
    pub kernel: String,
    pub positivity_ok: bool,
    pub min_value: f64,
    pub boundary_sum: BoundaryStatus,
    pub min_boundary_real: f64,
    pub max_boundary_imag: f64,
    /// Fitted decay exponent `p` (capped at [`DECAY_EXPONENT_CAP`]).
    pub decay_exponent: f64,
    /// Smallest `M` with `|f(t + is)| <= M (1 + |t|)^{-p}` on the grid.
    pub decay_constant: f64,
    pub decay_ok: bool,
    pub grid: AdmissibilityGrid,
}

impl AdmissibilityCertificate {
    /// All three conditions hold on the grid.
    pub fn granted(&self) -> bool {
        self.positivity_ok && self.boundary_sum == BoundaryStatus::Holds && self.decay_ok
    }

    /// Granted, or `f0`-like: positive, decaying, boundary sum a point mass.
    pub fn usable(&self) -> bool {
        self.positivity_ok
            && self.decay_ok
            && matches!(
                self.boundary_sum,
                BoundaryStatus::Holds | BoundaryStatus::Distributional
            )
    }
}

pub const DECAY_EXPONENT_CAP: f64 = 50.0;
const GRID_HALF_WIDTH: f64 = 50.0;
const GRID_STEP: f64 = 0.01;
const FIT_RANGE: (f64, f64) = (10.0, 50.0);
const POSITIVITY_TOL: f64 = 1e-15;
const BOUNDARY_REAL_TOL: f64 = 1e-12;
const BOUNDARY_IMAG_TOL: f64 = 1e-10;

/// Samples the three admissibility conditions on fixed grids.
pub fn check_admissible(f: &KernelFunction) -> AdmissibilityCertificate {
    let steps = (2.0 * GRID_HALF_WIDTH / GRID_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| -GRID_HALF_WIDTH + k as f64 * GRID_STEP).collect();
    let strip_lines: Vec<f64> = (0..9).map(|k| -0.25 + k as f64 * 0.0625).collect();

    let min_value = grid.iter().map(|&t| f.eval(t)).fold(f64::INFINITY, f64::min);
    let positivity_ok = min_value >= -POSITIVITY_TOL;

    let mut min_boundary_real = f64::INFINITY;
    let mut max_boundary_imag: f64 = 0.0;
    for &t in &grid {
        if f.is_f0() && t.abs() < 1e-9 {
            continue;
        }
        let s = f.strip_eval(t, 0.25) + f.strip_eval(t, -0.25);
        min_boundary_real = min_boundary_real.min(s.re);
        max_boundary_imag = max_boundary_imag.max(s.im.abs());
    }
    let boundary_sum = if f.is_f0() {
        BoundaryStatus::Distributional
    } else if min_boundary_real >= -BOUNDARY_REAL_TOL && max_boundary_imag <= BOUNDARY_IMAG_TOL {
        BoundaryStatus::Holds
    } else {
        BoundaryStatus::Fails
    };

    let mut p = DECAY_EXPONENT_CAP;
    for &s in &strip_lines {
        let pts: Vec<(f64, f64)> = grid
            .iter()
            .filter(|t| t.abs() >= FIT_RANGE.0 && t.abs() <= FIT_RANGE.1)
            .filter_map(|&t| {
                let v = f.strip_eval(t, s).norm();
                (v > 0.0 && v.is_finite()).then(|| ((1.0 + t.abs()).ln(), v.ln()))
            })
            .collect();
        if pts.len() < 2 {
            // Underflows everywhere on the fit window: faster than any power.
            continue;
        }
        p = p.min(-least_squares_slope(&pts));
    }
    let p = p.min(DECAY_EXPONENT_CAP);
    let mut log_m = f64::NEG_INFINITY;
    for &s in &strip_lines {
        for &t in &grid {
            let v = f.strip_eval(t, s).norm();
            if v > 0.0 {
                log_m = log_m.max(v.ln() + p * (1.0 + t.abs()).ln());
            }
        }
    }
    let decay_constant = log_m.exp();
    let decay_ok = p > 1.0 && decay_constant.is_finite();

    AdmissibilityCertificate {
        kernel: f.name(),
        positivity_ok,
        min_value,
        boundary_sum,
        min_boundary_real,
        max_boundary_imag,
        decay_exponent: p,
        decay_constant,
        decay_ok,
        grid: AdmissibilityGrid {
            t_min: -GRID_HALF_WIDTH,
            t_max: GRID_HALF_WIDTH,
            step: GRID_STEP,
            fit_range: FIT_RANGE,
            strip_lines,
        },
    }
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f0_hat_oracle(k: f64) -> f64 {
        1.0 / ((k / 4.0).exp() + (-k / 4.0).exp())
    }

    #[test]
    fn f0_values() {
        let f = KernelFunction::F0;
        assert!((f.eval(0.0) - 1.0).abs() < 1e-15);
        let t = 0.3;
        let direct = 2.0 / ((2.0 * PI * t).exp() + (-2.0 * PI * t).exp());
        assert!((f.eval(t) - direct).abs() < 1e-15);
        assert!((f.eval(-t) - direct).abs() < 1e-15);
        assert!(f.eval(200.0) >= 0.0);
    }

    #[test]
    fn f0_hat_closed_form() {
        let f = KernelFunction::F0;
        assert_eq!(f.hat(0.0).unwrap(), 0.5);
        let expected = 1.0 / (1f64.exp() + (-1f64).exp());
        assert!((f.hat(4.0).unwrap() - expected).abs() < 1e-15);
        assert!((f.hat(4.0).unwrap() - 0.324_027).abs() < 1e-6);
    }

    #[test]
    fn f0_quadrature_matches_closed_form() {
        let f = KernelFunction::F0;
        for k in -8..=8 {
            let k = k as f64;
            let q = fourier_hat_quadrature(&f, k).unwrap();
            assert!((q - f0_hat_oracle(k)).abs() < 1e-8, "kappa {k}: {q}");
        }
    }

    #[test]
    fn cauchy_transform() {
        let f = KernelFunction::cauchy(1.0).unwrap();
        assert!((f.hat(2.0).unwrap() - (-2f64).exp()).abs() < 1e-15);
        for &k in &[0.0, 0.5, 1.0, 3.0] {
            let q = fourier_hat_quadrature(&f, k).unwrap();
            assert!((q - (-k).exp()).abs() < 1e-8, "kappa {k}: {q}");
        }
    }

    #[test]
    fn cauchy_scale_must_clear_the_strip() {
        assert!(KernelFunction::cauchy(0.25).is_err());
        assert!(KernelFunction::cauchy(-1.0).is_err());
        assert!(KernelFunction::cauchy(0.3).is_ok());
    }

    #[test]
    fn sech_kernel_transform() {
        // int sech(pi t) e^{i k t} dt = sech(k / 2)
        let f = KernelFunction::Tabulated(TabulatedKernel::sech(PI));
        for &k in &[0.0, 1.0, 2.5, -4.0] {
            let expected = 1.0 / (k / 2.0f64).cosh();
            assert!((f.hat(k).unwrap() - expected).abs() < 1e-9, "kappa {k}");
        }
    }

    #[test]
    fn hat_rejects_huge_frequency() {
        assert!(matches!(KernelFunction::F0.hat(701.0), Err(MdfError::Overflow { .. })));
    }

    #[test]
    fn f0_boundary_sum_vanishes_away_from_origin() {
        let f = KernelFunction::F0;
        for &t in &[0.1, 0.7, -2.0] {
            let s = f.strip_eval(t, 0.25) + f.strip_eval(t, -0.25);
            assert!(s.norm() < 1e-12, "t {t}: {s}");
        }
    }

    #[test]
    fn cauchy_is_admissible() {
        let cert = check_admissible(&KernelFunction::cauchy(1.0).unwrap());
        assert!(cert.granted(), "{cert:?}");
        assert!((cert.decay_exponent - 2.0).abs() < 0.2);
    }

    #[test]
    fn gaussian_fails_boundary_condition() {
        let cert = check_admissible(&KernelFunction::Tabulated(TabulatedKernel::gaussian()));
        assert!(cert.positivity_ok);
        assert_eq!(cert.boundary_sum, BoundaryStatus::Fails);
        assert!(!cert.granted());
        // 2 e^{1/16 - t^2} cos(t/2) is negative for pi < t < 3 pi
        let f = KernelFunction::Tabulated(TabulatedKernel::gaussian());
        let t = 4.0_f64;
        let s = f.strip_eval(t, 0.25) + f.strip_eval(t, -0.25);
        let oracle = 2.0 * (-t * t + 1.0 / 16.0).exp() * (t / 2.0).cos();
        assert!((s.re - oracle).abs() < 1e-15);
    }

    #[test]
    fn f0_is_distributional() {
        let cert = check_admissible(&KernelFunction::F0);
        assert!(cert.positivity_ok);
        assert!(cert.decay_ok);
        assert_eq!(cert.boundary_sum, BoundaryStatus::Distributional);
        assert!(!cert.granted());
        assert!(cert.usable());
    }

    #[test]
    fn sech_kernel_is_admissible() {
        let cert = check_admissible(&KernelFunction::Tabulated(TabulatedKernel::sech(PI)));
        assert!(cert.granted(), "{cert:?}");
    }

    #[test]
    fn windowed_rule_integrates_constants_exactly() {
        let f = KernelFunction::cauchy(1.0).unwrap();
        let rule = KernelRule::new(&f, 1.0, 1.0, 0).unwrap();
        assert!(rule.is_windowed());
        let total = rule.integrate(|_| c(1.0, 0.0));
        assert!((total.re - 1.0).abs() < 1e-13);
    }
}
