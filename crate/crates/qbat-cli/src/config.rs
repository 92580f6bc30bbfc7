//! Run configuration: a flat JSON document describing one simulation
//! instance, with strict validation and a canonical content hash.
//!
//! Complex numbers are written as `[re, im]` pairs. Unknown fields are
//! rejected so typos fail loudly. The content hash covers the physics
//! (Hamiltonians, temperature, extension, battery, optimizer) but not the
//! output section, so rerouting a report does not change an instance's
//! identity.

use crate::error::{CliError, CliResult};
use num_complex::Complex64;
use qbat_core::channel::{EnergyPreservingUnitary, IsometricExtension};
use qbat_core::random::{random_fixed_purity, rng_from};
use qbat_core::retrieval::OptimizerConfig;
use qbat_core::state::{DensityOperator, StateVector};
use qbat_core::thermal::{Hamiltonian, InverseTemperature};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Tolerance for unit-modulus validation of the `gamma_phase` direction.
const PHASE_MODULUS_TOL: f64 = 1e-6;
/// Tolerance for eigenvalue-sum and orthonormality validation.
const MIXTURE_TOL: f64 = 1e-8;

/// Top-level run configuration document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// System (battery) energy levels, one per basis state.
    pub hamiltonian_s: Vec<f64>,
    /// Bath energy levels, one per basis state.
    pub hamiltonian_b: Vec<f64>,
    /// Inverse temperature: positive number or `"inf"`.
    pub beta: BetaValue,
    /// Coupling unitary family.
    pub extension: ExtensionConfig,
    /// Initial battery state.
    pub battery: BatteryConfig,
    /// Measurement-search settings.
    #[serde(default)]
    pub optimizer: OptimizerSection,
    /// Report destination and format.
    #[serde(default)]
    pub output: OutputSection,
}

/// Inverse temperature as written in the document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaValue {
    /// Finite positive inverse temperature.
    Number(f64),
    /// The literal `"inf"`.
    Text(String),
}

/// Coupling-unitary selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", tag = "kind")]
pub enum ExtensionConfig {
    /// Qubit interaction family: |00⟩, |11⟩ fixed; the single-excitation
    /// block rotated by α and γ = √(1−|α|²)·(phase direction).
    QubitFamily {
        /// Block rotation amplitude as `[re, im]`, |α| ≤ 1.
        alpha: [f64; 2],
        /// Unit-modulus direction of γ as `[re, im]`.
        gamma_phase: [f64; 2],
    },
    /// Haar-random block unitary on the degenerate total-energy sectors.
    RandomBlock {
        /// Sampling seed.
        seed: u64,
    },
}

/// Initial battery state selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase", tag = "kind")]
pub enum BatteryConfig {
    /// Pure state from explicit amplitudes (`[re, im]` per basis state).
    Pure { amplitudes: Vec<[f64; 2]> },
    /// Mixed state from a spectral decomposition.
    Mixed {
        /// Eigenvalues; nonnegative, summing to one.
        eigenvalues: Vec<f64>,
        /// Orthonormal eigenvectors, one complex vector per eigenvalue.
        eigenvectors: Vec<Vec<[f64; 2]>>,
    },
    /// Seeded random state of prescribed purity: a Haar-random pure state
    /// mixed with the maximally mixed state.
    Random {
        /// Target Tr ρ², in [1/d, 1].
        purity: f64,
        /// Sampling seed.
        seed: u64,
    },
}

/// Measurement-search settings with engine defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    /// Independent restarts per outcome-count choice.
    pub restarts: usize,
    /// Iteration cap per local search.
    pub max_iters: usize,
    /// Convergence tolerance on the best value.
    pub tol: f64,
    /// Fixed bath outcome count (default: try d and d²).
    pub outcomes_b: Option<usize>,
    /// Fixed reference outcome count (default: try d and d²).
    #[serde(rename = "outcomes_R")]
    pub outcomes_r: Option<usize>,
    /// Restart-stream seed.
    pub seed: u64,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        Self {
            restarts: d.restarts,
            max_iters: d.max_iters,
            tol: d.tol,
            outcomes_b: d.outcomes_b,
            outcomes_r: d.outcomes_r,
            seed: d.seed,
        }
    }
}

/// Report destination and format.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Serialization format.
    pub format: OutputFormat,
    /// Output file; stdout when omitted.
    pub path: Option<PathBuf>,
}

/// Report serialization format.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Comma-separated values with a header row.
    #[default]
    Csv,
    /// Array of flat objects with the same field names.
    Json,
}

impl RunConfig {
    /// Reads and parses a configuration file; parse failures report the
    /// offending line and column.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::Config(format!(
                "{}:{}:{}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })
    }

    /// Stable content hash of the physics portion of the document.
    pub fn content_hash(&self) -> u64 {
        #[derive(Serialize)]
        struct Physics<'a> {
            hamiltonian_s: &'a [f64],
            hamiltonian_b: &'a [f64],
            beta: &'a BetaValue,
            extension: &'a ExtensionConfig,
            battery: &'a BatteryConfig,
            optimizer: &'a OptimizerSection,
        }
        let canonical = serde_json::to_string(&Physics {
            hamiltonian_s: &self.hamiltonian_s,
            hamiltonian_b: &self.hamiltonian_b,
            beta: &self.beta,
            extension: &self.extension,
            battery: &self.battery,
            optimizer: &self.optimizer,
        })
        .expect("config serialization cannot fail");
        qbat_core::stable_hash64(canonical.as_bytes())
    }
}

impl BetaValue {
    /// Converts to the engine representation.
    pub fn to_core(&self) -> CliResult<InverseTemperature> {
        match self {
            BetaValue::Number(x) => {
                InverseTemperature::finite(*x).map_err(|e| CliError::from_config_stage(e, "beta"))
            }
            BetaValue::Text(s) if s == "inf" => Ok(InverseTemperature::Infinite),
            BetaValue::Text(s) => Err(CliError::Config(format!(
                "beta: expected a positive number or \"inf\", got {s:?}"
            ))),
        }
    }

    /// Column representation: the number's shortest form, or `inf`.
    pub fn label(&self) -> String {
        match self {
            BetaValue::Number(x) => format!("{x}"),
            BetaValue::Text(_) => "inf".to_string(),
        }
    }
}

/// A fully built simulation instance plus its report labels.
#[derive(Debug)]
pub struct Instance {
    /// Isometric extension of the configured thermal operation.
    pub ext: IsometricExtension,
    /// Initial battery state.
    pub battery: DensityOperator,
    /// Measurement-search settings.
    pub optimizer: OptimizerConfig,
    /// Physics content hash of the effective configuration.
    pub config_hash: u64,
    /// `beta` column text.
    pub beta_label: String,
    /// `alpha` column text; empty when the extension has no α.
    pub alpha_label: String,
    /// `battery_desc` column text.
    pub battery_desc: String,
}

/// Formats a complex number compactly as `re+imi`.
pub fn fmt_complex(re: f64, im: f64) -> String {
    if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// Validates the document and builds the engine objects.
pub fn build_instance(cfg: &RunConfig) -> CliResult<Instance> {
    let ds = cfg.hamiltonian_s.len();
    let beta = cfg.beta.to_core()?;
    let ext = build_extension(cfg, beta)?;
    let battery = build_battery(&cfg.battery, ds)?;
    let optimizer = build_optimizer(&cfg.optimizer);

    let alpha_label = match &cfg.extension {
        ExtensionConfig::QubitFamily { alpha, .. } => fmt_complex(alpha[0], alpha[1]),
        ExtensionConfig::RandomBlock { .. } => String::new(),
    };
    Ok(Instance {
        ext,
        battery,
        optimizer,
        config_hash: cfg.content_hash(),
        beta_label: cfg.beta.label(),
        alpha_label,
        battery_desc: battery_desc(&cfg.battery),
    })
}

fn build_extension(cfg: &RunConfig, beta: InverseTemperature) -> CliResult<IsometricExtension> {
    match &cfg.extension {
        ExtensionConfig::QubitFamily { alpha, gamma_phase } => {
            if cfg.hamiltonian_s != [0.0, 1.0] || cfg.hamiltonian_b != [0.0, 1.0] {
                return Err(CliError::Config(
                    "extension.kind qubit-family requires hamiltonian_s and \
                     hamiltonian_b equal to [0, 1]"
                        .into(),
                ));
            }
            let phase = Complex64::new(gamma_phase[0], gamma_phase[1]);
            if (phase.norm() - 1.0).abs() > PHASE_MODULUS_TOL {
                return Err(CliError::Config(format!(
                    "extension.gamma_phase: expected modulus 1, got {}",
                    phase.norm()
                )));
            }
            IsometricExtension::qubit_family(Complex64::new(alpha[0], alpha[1]), phase.arg(), beta)
                .map_err(|e| CliError::from_config_stage(e, "extension"))
        }
        ExtensionConfig::RandomBlock { seed } => {
            let hs = Hamiltonian::new(cfg.hamiltonian_s.clone())
                .map_err(|e| CliError::from_config_stage(e, "hamiltonian_s"))?;
            let hb = Hamiltonian::new(cfg.hamiltonian_b.clone())
                .map_err(|e| CliError::from_config_stage(e, "hamiltonian_b"))?;
            let u = EnergyPreservingUnitary::random(hs, hb, *seed)
                .map_err(|e| CliError::from_config_stage(e, "extension"))?;
            IsometricExtension::new(u, beta)
                .map_err(|e| CliError::from_config_stage(e, "extension"))
        }
    }
}

fn build_battery(battery: &BatteryConfig, ds: usize) -> CliResult<DensityOperator> {
    match battery {
        BatteryConfig::Pure { amplitudes } => {
            if amplitudes.len() != ds {
                return Err(CliError::Config(format!(
                    "battery.amplitudes: expected {ds} entries to match \
                     hamiltonian_s, got {}",
                    amplitudes.len()
                )));
            }
            let amps: Vec<Complex64> = amplitudes
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect();
            let psi = StateVector::new(vec![ds], amps)
                .map_err(|e| CliError::from_config_stage(e, "battery.amplitudes"))?;
            Ok(psi.to_density())
        }
        BatteryConfig::Mixed {
            eigenvalues,
            eigenvectors,
        } => build_mixed(eigenvalues, eigenvectors, ds),
        BatteryConfig::Random { purity, seed } => build_random(*purity, *seed, ds),
    }
}

fn build_mixed(
    eigenvalues: &[f64],
    eigenvectors: &[Vec<[f64; 2]>],
    ds: usize,
) -> CliResult<DensityOperator> {
    if eigenvalues.len() != eigenvectors.len() {
        return Err(CliError::Config(format!(
            "battery: {} eigenvalues but {} eigenvectors",
            eigenvalues.len(),
            eigenvectors.len()
        )));
    }
    if eigenvalues.is_empty() || eigenvalues.len() > ds {
        return Err(CliError::Config(format!(
            "battery.eigenvalues: expected between 1 and {ds} entries, got {}",
            eigenvalues.len()
        )));
    }
    let sum: f64 = eigenvalues.iter().sum();
    if (sum - 1.0).abs() > MIXTURE_TOL || eigenvalues.iter().any(|&w| w < -MIXTURE_TOL) {
        return Err(CliError::Config(format!(
            "battery.eigenvalues: must be nonnegative and sum to 1 (sum = {sum})"
        )));
    }
    let vecs: Vec<Vec<Complex64>> = eigenvectors
        .iter()
        .enumerate()
        .map(|(k, v)| {
            if v.len() != ds {
                return Err(CliError::Config(format!(
                    "battery.eigenvectors[{k}]: expected {ds} entries, got {}",
                    v.len()
                )));
            }
            Ok(v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
        })
        .collect::<CliResult<_>>()?;
    for (i, a) in vecs.iter().enumerate() {
        for (j, b) in vecs.iter().enumerate() {
            let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            if (dot.norm() - expected).abs() > MIXTURE_TOL {
                return Err(CliError::Config(format!(
                    "battery.eigenvectors: vectors {i} and {j} are not \
                     orthonormal (|⟨{i}|{j}⟩| = {})",
                    dot.norm()
                )));
            }
        }
    }
    let mut mat = nalgebra_matrix_zeros(ds);
    for (w, v) in eigenvalues.iter().zip(&vecs) {
        for i in 0..ds {
            for j in 0..ds {
                mat[(i, j)] += w * v[i] * v[j].conj();
            }
        }
    }
    DensityOperator::new(vec![ds], mat).map_err(|e| CliError::from_config_stage(e, "battery"))
}

fn build_random(purity: f64, seed: u64, ds: usize) -> CliResult<DensityOperator> {
    random_fixed_purity(ds, purity, &mut rng_from(seed))
        .map_err(|e| CliError::from_config_stage(e, "battery.purity"))
}

fn nalgebra_matrix_zeros(d: usize) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::zeros(d, d)
}

fn build_optimizer(section: &OptimizerSection) -> OptimizerConfig {
    OptimizerConfig {
        restarts: section.restarts,
        max_iters: section.max_iters,
        tol: section.tol,
        outcomes_b: section.outcomes_b,
        outcomes_r: section.outcomes_r,
        seed: section.seed,
    }
}

/// `battery_desc` column text; `;`-separated so CSV stays comma-clean.
fn battery_desc(battery: &BatteryConfig) -> String {
    match battery {
        BatteryConfig::Pure { amplitudes } => {
            let parts: Vec<String> = amplitudes
                .iter()
                .map(|[re, im]| fmt_complex(*re, *im))
                .collect();
            format!("pure:{}", parts.join(";"))
        }
        BatteryConfig::Mixed { eigenvalues, .. } => {
            let parts: Vec<String> = eigenvalues.iter().map(|w| format!("{w}")).collect();
            format!("mixed:{}", parts.join(";"))
        }
        BatteryConfig::Random { purity, seed } => {
            format!("random:purity={purity};seed={seed}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(beta: &str) -> String {
        format!(
            r#"{{
                "hamiltonian_s": [0.0, 1.0],
                "hamiltonian_b": [0.0, 1.0],
                "beta": {beta},
                "extension": {{"kind": "qubit-family", "alpha": [1.0, 0.0],
                               "gamma_phase": [1.0, 0.0]}},
                "battery": {{"kind": "pure",
                             "amplitudes": [[0.6, 0.0], [0.8, 0.0]]}}
            }}"#
        )
    }

    fn parse(text: &str) -> serde_json::Result<RunConfig> {
        serde_json::from_str(text)
    }

    #[test]
    fn minimal_config_parses_and_builds() {
        let cfg = parse(&minimal("1.0")).unwrap();
        let inst = build_instance(&cfg).unwrap();
        assert_eq!(inst.beta_label, "1");
        assert_eq!(inst.alpha_label, "1+0i");
        assert_eq!(inst.battery_desc, "pure:0.6+0i;0.8+0i");
        assert_eq!(inst.optimizer.restarts, OptimizerConfig::default().restarts);
    }

    #[test]
    fn infinite_beta_is_the_string_inf() {
        let cfg = parse(&minimal("\"inf\"")).unwrap();
        assert!(cfg.beta.to_core().unwrap().is_infinite());
        assert_eq!(cfg.beta.label(), "inf");
        assert!(parse(&minimal("\"cold\"")).unwrap().beta.to_core().is_err());
        assert!(parse(&minimal("-2.0")).unwrap().beta.to_core().is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = minimal("1.0").replace("\"beta\"", "\"temperature\"");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn qubit_family_requires_unit_qubit_hamiltonians() {
        let text = minimal("1.0").replace(
            "\"hamiltonian_s\": [0.0, 1.0]",
            "\"hamiltonian_s\": [0.0, 2.0]",
        );
        let cfg = parse(&text).unwrap();
        let err = build_instance(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn non_normalized_amplitudes_are_rejected() {
        let text = minimal("1.0").replace("[[0.6, 0.0], [0.8, 0.0]]", "[[0.7, 0.0], [0.8, 0.0]]");
        let cfg = parse(&text).unwrap();
        assert_eq!(build_instance(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn mixed_battery_builds_and_validates() {
        let text = minimal("1.0").replace(
            r#"{"kind": "pure",
                             "amplitudes": [[0.6, 0.0], [0.8, 0.0]]}"#,
            r#"{"kind": "mixed",
                "eigenvalues": [0.75, 0.25],
                "eigenvectors": [[[1.0, 0.0], [0.0, 0.0]],
                                 [[0.0, 0.0], [1.0, 0.0]]]}"#,
        );
        let cfg = parse(&text).unwrap();
        let inst = build_instance(&cfg).unwrap();
        assert_eq!(inst.battery_desc, "mixed:0.75;0.25");
        assert!((inst.battery.purity() - 0.625).abs() < 1e-12);

        let bad = text.replace("[0.75, 0.25]", "[0.9, 0.25]");
        let cfg = parse(&bad).unwrap();
        assert_eq!(build_instance(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn random_battery_matches_requested_purity() {
        let text = minimal("1.0").replace(
            r#"{"kind": "pure",
                             "amplitudes": [[0.6, 0.0], [0.8, 0.0]]}"#,
            r#"{"kind": "random", "purity": 0.8, "seed": 5}"#,
        );
        let cfg = parse(&text).unwrap();
        let inst = build_instance(&cfg).unwrap();
        assert!((inst.battery.purity() - 0.8).abs() < 1e-10);

        let bad = text.replace("\"purity\": 0.8", "\"purity\": 0.2");
        assert_eq!(
            build_instance(&parse(&bad).unwrap())
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn content_hash_tracks_physics_not_output() {
        let base = parse(&minimal("1.0")).unwrap();
        let mut with_output = base.clone();
        with_output.output.path = Some("elsewhere.csv".into());
        assert_eq!(base.content_hash(), with_output.content_hash());

        let mut reseeded = base.clone();
        reseeded.optimizer.seed = 99;
        assert_ne!(base.content_hash(), reseeded.content_hash());
    }
}
