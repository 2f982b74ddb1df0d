//! Scenario files: the JSON input of the `mdf` command.
//!
//! Matrices are written as rows of `[re, im]` pairs.

use crate::error::{MdfError, Result};
use crate::kernel::KernelFunction;
use crate::linalg::{from_rows, hermitian_part, to_rows, CMat, MatrixRows};
use crate::sampling::Sampler;
use crate::standard_form::{max_dim, DensityMatrix, StandardForm};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    StandardForm,
    Modular,
    Dirichlet,
    Lindblad,
    Semigroup,
    ProofRegression,
}

impl Suite {
    /// Every suite, in execution order.
    pub const ALL: [Suite; 6] = [
        Suite::StandardForm,
        Suite::Modular,
        Suite::Dirichlet,
        Suite::Lindblad,
        Suite::Semigroup,
        Suite::ProofRegression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::StandardForm => "standard_form",
            Suite::Modular => "modular",
            Suite::Dirichlet => "dirichlet",
            Suite::Lindblad => "lindblad",
            Suite::Semigroup => "semigroup",
            Suite::ProofRegression => "proof_regression",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Tracial,
    Gibbs { hamiltonian: MatrixRows, beta: f64 },
    Density(MatrixRows),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    Hermitian,
    Ginibre,
    /// `{x, x*}` for a Ginibre `x`, repeated `count` times.
    BalancedPair,
}

impl CoefficientKind {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientKind::Hermitian => "hermitian",
            CoefficientKind::Ginibre => "ginibre",
            CoefficientKind::BalancedPair => "balanced_pair",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Hermitian, Self::Ginibre, Self::BalancedPair]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCoefficients {
    pub kind: CoefficientKind,
    pub count: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomWrapper {
    pub random: RandomCoefficients,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    List(Vec<MatrixRows>),
    Random(RandomWrapper),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    F0,
    Cauchy { scale: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DriftSpec {
    /// The canonical drift built from the coefficients.
    Auto(AutoTag),
    Matrix(MatrixRows),
}

impl Default for DriftSpec {
    fn default() -> Self {
        DriftSpec::Auto(AutoTag::Auto)
    }
}

/// Gates applied by the runner. Anything left out keeps its default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub standard_form: f64,
    pub modular_inverse: f64,
    pub fourier: f64,
    pub engine: f64,
    pub boundary: f64,
    pub self_adjoint: f64,
    pub decomposition: f64,
    pub proof_regression: f64,
    pub tracial: f64,
    pub general_f: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            standard_form: 1e-9,
            modular_inverse: 1e-10,
            fourier: 1e-8,
            engine: 1e-7,
            boundary: 1e-8,
            self_adjoint: 1e-8,
            decomposition: 1e-7,
            proof_regression: 1e-8,
            tracial: 1e-9,
            general_f: 1e-7,
        }
    }
}

fn default_samples() -> usize {
    50
}

fn default_times() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}

fn default_suites() -> Vec<Suite> {
    Suite::ALL.to_vec()
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub dim: usize,
    pub state: StateSpec,
    pub coefficients: CoefficientSpec,
    pub kernel: KernelSpec,
    #[serde(default, skip_serializing_if = "is_default")]
    pub q: DriftSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub tolerances: Tolerances,
}

/// A scenario with every matrix materialized and validated.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub sf: StandardForm,
    pub xs: Vec<CMat>,
    /// `None` means the canonical drift.
    pub q: Option<CMat>,
    pub kernel: KernelFunction,
}

fn matrix(rows: &MatrixRows, n: usize, what: &str) -> Result<CMat> {
    let m = from_rows(rows).ok_or_else(|| MdfError::InvalidInput(format!("{what}: ragged or empty matrix")))?;
    if m.nrows() != n || m.ncols() != n {
        return Err(MdfError::InvalidInput(format!(
            "{what}: expected {n}x{n}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(MdfError::InvalidInput(format!("{what}: non-finite entry")));
    }
    Ok(m)
}

/// Draws `count` coefficients (or pairs) of the given kind.
pub fn random_coefficients(kind: CoefficientKind, n: usize, count: usize, seed: u64) -> Vec<CMat> {
    let mut rng = Sampler::new(seed);
    let mut out = Vec::new();
    for _ in 0..count {
        match kind {
            CoefficientKind::Hermitian => out.push(rng.hermitian(n)),
            CoefficientKind::Ginibre => out.push(rng.ginibre(n)),
            CoefficientKind::BalancedPair => {
                let x = rng.ginibre(n);
                out.push(x.adjoint());
                out.insert(out.len() - 1, x);
            }
        }
    }
    out
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            MdfError::InvalidInput(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MdfError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Builds the state, coefficients, drift and kernel, checking every
    /// size and the schema-level invariants.
    pub fn prepare(&self) -> Result<Prepared> {
        let n = self.dim;
        let limit = max_dim();
        if n == 0 {
            return Err(MdfError::InvalidInput("dim must be at least 1".into()));
        }
        if n > limit {
            return Err(MdfError::DimensionTooLarge { dim: n, max: limit });
        }
        if self.samples == 0 {
            return Err(MdfError::InvalidInput("samples must be at least 1".into()));
        }
        if let Some(t) = self.times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(MdfError::InvalidInput(format!(
                "times: {t} is not a finite nonnegative number"
            )));
        }
        let rho = match &self.state {
            StateSpec::Tracial => DensityMatrix::tracial(n)?,
            StateSpec::Gibbs { hamiltonian, beta } => {
                let h = matrix(hamiltonian, n, "state.gibbs.hamiltonian")?;
                if !beta.is_finite() {
                    return Err(MdfError::InvalidInput("state.gibbs.beta must be finite".into()));
                }
                DensityMatrix::gibbs(&h, *beta)?
            }
            StateSpec::Density(rows) => DensityMatrix::new(matrix(rows, n, "state.density")?)?,
        };
        let sf = StandardForm::new(rho)?;
        let xs = match &self.coefficients {
            CoefficientSpec::List(list) => {
                if list.is_empty() {
                    return Err(MdfError::InvalidInput(
                        "coefficients: at least one matrix is required".into(),
                    ));
                }
                list.iter()
                    .enumerate()
                    .map(|(i, m)| matrix(m, n, &format!("coefficients[{i}]")))
                    .collect::<Result<Vec<_>>>()?
            }
            CoefficientSpec::Random(RandomWrapper { random }) => {
                if random.count == 0 {
                    return Err(MdfError::InvalidInput(
                        "coefficients.random.count must be at least 1".into(),
                    ));
                }
                random_coefficients(random.kind, n, random.count, random.seed)
            }
        };
        let q = match &self.q {
            DriftSpec::Auto(_) => None,
            DriftSpec::Matrix(rows) => Some(matrix(rows, n, "q")?),
        };
        let kernel = match self.kernel {
            KernelSpec::F0 => KernelFunction::F0,
            KernelSpec::Cauchy { scale } => KernelFunction::cauchy(scale)?,
        };
        Ok(Prepared { sf, xs, q, kernel })
    }
}

/// A reproducible random scenario: Gibbs state of a random Hamiltonian at
/// `beta = 1`, explicit coefficients of the given kind, kernel `f0`.
pub fn generate_scenario(seed: u64, n: usize, kind: CoefficientKind) -> Result<Scenario> {
    let limit = max_dim();
    if n == 0 || n > limit {
        return Err(MdfError::DimensionTooLarge { dim: n, max: limit });
    }
    let mut rng = Sampler::new(seed);
    let hamiltonian = hermitian_part(&rng.hermitian(n));
    let xs = random_coefficients(kind, n, 1, seed.wrapping_add(1));
    Ok(Scenario {
        name: format!("generated-{}-n{n}-s{seed}", kind.name()),
        dim: n,
        state: StateSpec::Gibbs {
            hamiltonian: to_rows(&hamiltonian),
            beta: 1.0,
        },
        coefficients: CoefficientSpec::List(xs.iter().map(to_rows).collect()),
        kernel: KernelSpec::F0,
        q: DriftSpec::default(),
        seed,
        samples: default_samples(),
        times: default_times(),
        suites: default_suites(),
        tolerances: Tolerances::default(),
    })
}
