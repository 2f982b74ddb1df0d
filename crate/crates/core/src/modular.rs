//! The modular flow and the maps built from it.
//!
//! Every map here is an entrywise multiplier in the eigenbasis of `rho`:
//! on matrices the entry `(j, k)` is scaled by a function of `kappa_jk`, on
//! superoperators the entry `[(a,b),(c,d)]` is scaled by a function of
//! `kappa_ab - kappa_cd` (the flow `Delta^{iz} K Delta^{-iz}`).

use crate::error::{MdfError, Result};
use crate::kernel::{KernelFunction, KernelRule};
use crate::linalg::{c, cr, CMat};
use crate::standard_form::StandardForm;
use crate::superop::SuperOperator;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// `sigma_z` is refused when `|Im z| * max |kappa|` exceeds this.
pub const EXPONENT_LIMIT: f64 = 700.0;
/// Frequencies below this are treated as zero when sizing quadrature rules.
pub const FREQUENCY_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModularMap {
    /// `D_{1/4}(A) = sigma_{-i/4}(A)`, entry factor `e^{kappa/4}`.
    DPlusQuarter,
    /// `D_{-1/4}(A) = sigma_{i/4}(A)`, entry factor `e^{-kappa/4}`.
    DMinusQuarter,
    /// `D_{1/4} + D_{-1/4}`.
    T,
    /// `D_{1/4} - D_{-1/4}`.
    S,
}

impl ModularMap {
    pub fn factor(self, kappa: f64) -> f64 {
        let p = (kappa / 4.0).exp();
        let m = (-kappa / 4.0).exp();
        match self {
            Self::DPlusQuarter => p,
            Self::DMinusQuarter => m,
            Self::T => p + m,
            Self::S => p - m,
        }
    }
}

fn check_exponent(z: Complex64, spread: f64) -> Result<()> {
    let exponent = z.im.abs() * spread;
    if exponent > EXPONENT_LIMIT {
        return Err(MdfError::Overflow { exponent });
    }
    Ok(())
}

/// `e^{i z kappa}`.
fn phase(z: Complex64, kappa: f64) -> Complex64 {
    (c(0.0, 1.0) * z * kappa).exp()
}

/// `sigma_z(A) = rho^{iz} A rho^{-iz}`.
pub fn sigma(sf: &StandardForm, a: &CMat, z: Complex64) -> Result<CMat> {
    sf.check_dim(a)?;
    check_exponent(z, sf.max_abs_kappa())?;
    Ok(sf.kappa_multiplier(a, |k| phase(z, k)))
}

/// `sigma_t` for real `t`.
pub fn sigma_real(sf: &StandardForm, a: &CMat, t: f64) -> Result<CMat> {
    sigma(sf, a, cr(t))
}

pub fn modular_map(sf: &StandardForm, a: &CMat, which: ModularMap) -> Result<CMat> {
    sf.check_dim(a)?;
    Ok(sf.kappa_multiplier(a, |k| cr(which.factor(k))))
}

/// `I0(A) = int sigma_t(A) f0(t) dt`, entry factor `1 / (e^{kappa/4} + e^{-kappa/4})`.
pub fn apply_i0(sf: &StandardForm, a: &CMat) -> Result<CMat> {
    smear(sf, a, &KernelFunction::F0)
}

/// Memoized Fourier transform; tabulated kernels need quadrature per value.
pub struct HatTable<'a> {
    f: &'a KernelFunction,
    cache: HashMap<u64, f64>,
}

impl<'a> HatTable<'a> {
    pub fn new(f: &'a KernelFunction) -> Self {
        Self {
            f,
            cache: HashMap::new(),
        }
    }

    pub fn get(&mut self, kappa: f64) -> Result<f64> {
        match self.f {
            KernelFunction::Tabulated(_) => {
                // The transforms of real even kernels are even.
                let key = kappa.abs().to_bits();
                if let Some(v) = self.cache.get(&key) {
                    return Ok(*v);
                }
                let v = self.f.hat(kappa.abs())?;
                self.cache.insert(key, v);
                Ok(v)
            }
            _ => self.f.hat(kappa),
        }
    }
}

fn multiplier_matrix<F: FnMut(f64) -> Result<Complex64>>(sf: &StandardForm, a: &CMat, mut m: F) -> Result<CMat> {
    if sf.is_tracial() {
        let factor = m(0.0)?;
        return Ok(a * factor);
    }
    let n = sf.dim();
    let mut e = sf.to_eigenbasis(a);
    for j in 0..n {
        for k in 0..n {
            e[(j, k)] *= m(sf.kappa()[(j, k)])?;
        }
    }
    Ok(sf.from_eigenbasis(&e))
}

/// `int sigma_t(A) f(t) dt`, entry factor `hat(kappa)`.
pub fn smear(sf: &StandardForm, a: &CMat, f: &KernelFunction) -> Result<CMat> {
    sf.check_dim(a)?;
    let mut table = HatTable::new(f);
    multiplier_matrix(sf, a, |k| table.get(k).map(cr))
}

/// `int sigma_t(A) (f(t + i/4) + f(t - i/4)) dt`, entry factor
/// `(e^{kappa/4} + e^{-kappa/4}) hat(kappa)`. For `f0` this is `A` itself.
pub fn boundary_combination_smear(sf: &StandardForm, a: &CMat, f: &KernelFunction) -> Result<CMat> {
    sf.check_dim(a)?;
    if f.is_f0() {
        return Ok(a.clone());
    }
    let mut table = HatTable::new(f);
    multiplier_matrix(sf, a, |k| Ok(cr(ModularMap::T.factor(k) * table.get(k)?)))
}

/// Smallest nonzero and largest `|kappa_jk|`.
pub fn kappa_range(sf: &StandardForm) -> (f64, f64) {
    frequency_range(sf.kappa().iter().copied())
}

/// Smallest nonzero and largest `|kappa_ab - kappa_cd|`.
pub fn superop_frequency_range(sf: &StandardForm) -> (f64, f64) {
    let l = sf.log_eigenvalues();
    let mut gaps: Vec<f64> = Vec::with_capacity(l.len() * l.len());
    for a in l {
        for b in l {
            gaps.push(a - b);
        }
    }
    gaps.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    gaps.dedup();
    let mut freqs = Vec::with_capacity(gaps.len() * gaps.len());
    for g in &gaps {
        for h in &gaps {
            freqs.push(g - h);
        }
    }
    frequency_range(freqs.into_iter())
}

fn frequency_range<I: Iterator<Item = f64>>(it: I) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for w in it {
        let w = w.abs();
        hi = hi.max(w);
        if w > FREQUENCY_EPS {
            lo = lo.min(w);
        }
    }
    (if lo.is_finite() { lo } else { 0.0 }, hi)
}

/// `int rho^{it} A rho^{-it} f(t) dt` by direct quadrature in `t`, with no
/// use of the multiplier formulas.
pub fn smear_by_quadrature(sf: &StandardForm, a: &CMat, f: &KernelFunction) -> Result<CMat> {
    sf.check_dim(a)?;
    let (lo, hi) = kappa_range(sf);
    let rule = KernelRule::new(f, lo, hi, 0)?;
    let n = sf.dim();
    let mut acc = CMat::zeros(n, n);
    for &(t, w) in rule.nodes() {
        let u = sf.rho_imaginary_power(t);
        acc += (&u * a * u.adjoint()) * cr(w);
    }
    Ok(acc)
}

/// `Delta^{iz} K Delta^{-iz}`.
pub fn sigma_super(sf: &StandardForm, k: &SuperOperator, z: Complex64) -> Result<SuperOperator> {
    check_exponent(z, 2.0 * sf.max_abs_kappa())?;
    super_multiplier(sf, k, |w| Ok(phase(z, w)))
}

pub fn modular_map_super(sf: &StandardForm, k: &SuperOperator, which: ModularMap) -> Result<SuperOperator> {
    super_multiplier(sf, k, |w| Ok(cr(which.factor(w))))
}

pub fn apply_i0_super(sf: &StandardForm, k: &SuperOperator) -> Result<SuperOperator> {
    smear_super(sf, k, &KernelFunction::F0)
}

/// `int Delta^{it} K Delta^{-it} f(t) dt`.
pub fn smear_super(sf: &StandardForm, k: &SuperOperator, f: &KernelFunction) -> Result<SuperOperator> {
    let mut table = HatTable::new(f);
    super_multiplier(sf, k, |w| table.get(w).map(cr))
}

/// Multiplies entry `[(a,b),(c,d)]` by `m(kappa_ab - kappa_cd)`.
pub fn super_multiplier<F: FnMut(f64) -> Result<Complex64>>(
    sf: &StandardForm,
    k: &SuperOperator,
    mut m: F,
) -> Result<SuperOperator> {
    let n = sf.dim();
    if k.n() != n {
        return Err(MdfError::DimMismatch {
            expected: n,
            got: k.n(),
        });
    }
    if sf.is_tracial() {
        return Ok(k.scale(m(0.0)?));
    }
    let kappa = sf.kappa();
    let mut mat = k.matrix().clone();
    for a in 0..n {
        for b in 0..n {
            let row = a * n + b;
            let kab = kappa[(a, b)];
            for cc in 0..n {
                for d in 0..n {
                    mat[(row, cc * n + d)] *= m(kab - kappa[(cc, d)])?;
                }
            }
        }
    }
    Ok(SuperOperator::from_matrix(n, mat))
}
