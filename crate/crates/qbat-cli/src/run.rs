//! Instance execution: turns a built configuration into a result record,
//! and expands sweep specifications into per-value configurations.

use crate::config::{self, BatteryConfig, BetaValue, ExtensionConfig, Instance, RunConfig};
use crate::error::{CliError, CliResult};
use crate::record::Record;
use num_complex::Complex64;
use qbat_core::entangle::eof_wootters;
use qbat_core::retrieval::{optimize_both, weak_closed_form};
use qbat_core::thermal;
use rayon::prelude::*;

/// Per-record diagnostics, reported on stderr so piped output stays clean.
pub struct Diagnostics {
    /// Analytic value of the weak optimum (lower bound for mixed
    /// batteries), when the engine could evaluate it.
    pub weak_closed_form: Option<f64>,
    /// Restarts spent by the weak and strong searches.
    pub restarts: (usize, usize),
}

/// Runs one instance and assembles its output record.
pub fn run_instance(inst: &Instance) -> CliResult<(Record, Diagnostics)> {
    let both = optimize_both(&inst.ext, &inst.battery, &inst.optimizer)
        .map_err(CliError::from_run_stage)?;

    let sigma = inst
        .ext
        .apply(&inst.battery)
        .map_err(CliError::from_run_stage)?;
    let sigma_s = sigma
        .partial_trace(&[0])
        .map_err(CliError::from_run_stage)?;
    let h = inst.ext.system_hamiltonian();
    let beta = inst.ext.beta();
    let e_sigma = thermal::energy(&sigma_s, h).map_err(CliError::from_run_stage)?;
    let f_sigma = thermal::free_energy_raw(&sigma_s, h, beta).map_err(CliError::from_run_stage)?;

    // System–reference entanglement, reported when that marginal is 2⊗2.
    let n_subsystems = sigma.dims().len();
    let sigma_sr = sigma
        .partial_trace(&[0, n_subsystems - 1])
        .map_err(CliError::from_run_stage)?;
    let eof_s_r = if sigma_sr.dims() == [2, 2] {
        Some(
            eof_wootters(&sigma_sr)
                .map_err(CliError::from_run_stage)?
                .value,
        )
    } else {
        None
    };

    let closed_form = weak_closed_form(&inst.ext, &inst.battery).ok();

    let record = Record {
        config_hash: inst.config_hash,
        seed: inst.optimizer.seed,
        beta: inst.beta_label.clone(),
        alpha: inst.alpha_label.clone(),
        battery_desc: inst.battery_desc.clone(),
        w_weak_raw: both.weak.value_raw,
        w_weak_rescaled: both.weak.value_rescaled,
        w_weak_clamped: both.weak.value_clamped,
        w_strong_raw: both.strong.value_raw,
        w_strong_rescaled: both.strong.value_rescaled,
        gap: both.gap,
        eof_s_r,
        e_sigma,
        f_sigma,
        converged_weak: both.weak.converged,
        converged_strong: both.strong.converged,
    };
    let diag = Diagnostics {
        weak_closed_form: closed_form,
        restarts: (both.weak.restarts_used, both.strong.restarts_used),
    };
    Ok((record, diag))
}

/// Builds and runs every configuration, in parallel, preserving order.
pub fn run_all(configs: &[RunConfig]) -> CliResult<Vec<(Record, Diagnostics)>> {
    let instances: Vec<Instance> = configs
        .iter()
        .map(config::build_instance)
        .collect::<CliResult<_>>()?;
    instances.par_iter().map(run_instance).collect()
}

/// A parsed `--sweep <param> <v1,v2,...>` specification.
#[derive(Debug)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<String>,
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Inverse temperature.
    Beta,
    /// Coupling modulus |α|, keeping the configured phase.
    Alpha,
    /// Pure-battery angle: amplitudes become [cos θ, sin θ].
    Theta,
    /// Mixing weight: eigenvalues become [p, 1 − p].
    P,
}

impl SweepSpec {
    /// Parses the two raw flag arguments.
    pub fn parse(param: &str, values: &str) -> CliResult<Self> {
        let param = match param {
            "beta" => SweepParam::Beta,
            "alpha" => SweepParam::Alpha,
            "theta" => SweepParam::Theta,
            "p" => SweepParam::P,
            other => {
                return Err(CliError::Config(format!(
                    "unknown sweep parameter {other:?}; expected beta, alpha, \
                     theta, or p"
                )))
            }
        };
        let values: Vec<String> = values
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(str::to_owned)
            .collect();
        if values.is_empty() {
            return Err(CliError::Config("sweep values list is empty".into()));
        }
        Ok(Self { param, values })
    }

    /// Produces one configuration per sweep value.
    pub fn expand(&self, base: &RunConfig) -> CliResult<Vec<RunConfig>> {
        self.values
            .iter()
            .map(|v| substitute(base, self.param, v))
            .collect()
    }
}

fn parse_value(text: &str, what: &str) -> CliResult<f64> {
    text.parse()
        .map_err(|_| CliError::Config(format!("sweep {what}: {text:?} is not a number")))
}

fn substitute(base: &RunConfig, param: SweepParam, value: &str) -> CliResult<RunConfig> {
    let mut cfg = base.clone();
    match param {
        SweepParam::Beta => {
            cfg.beta = if value == "inf" {
                BetaValue::Text("inf".into())
            } else {
                BetaValue::Number(parse_value(value, "beta")?)
            };
        }
        SweepParam::Alpha => {
            let modulus = parse_value(value, "alpha")?;
            match &mut cfg.extension {
                ExtensionConfig::QubitFamily { alpha, .. } => {
                    let old = Complex64::new(alpha[0], alpha[1]);
                    let dir = if old.norm() > 0.0 {
                        old / old.norm()
                    } else {
                        Complex64::new(1.0, 0.0)
                    };
                    let new = dir * modulus;
                    *alpha = [new.re, new.im];
                }
                ExtensionConfig::RandomBlock { .. } => {
                    return Err(CliError::Config(
                        "sweep alpha requires a qubit-family extension".into(),
                    ))
                }
            }
        }
        SweepParam::Theta => {
            let theta = parse_value(value, "theta")?;
            match &mut cfg.battery {
                BatteryConfig::Pure { amplitudes } if amplitudes.len() == 2 => {
                    *amplitudes = vec![[theta.cos(), 0.0], [theta.sin(), 0.0]];
                }
                _ => {
                    return Err(CliError::Config(
                        "sweep theta requires a pure two-level battery".into(),
                    ))
                }
            }
        }
        SweepParam::P => {
            let p = parse_value(value, "p")?;
            match &mut cfg.battery {
                BatteryConfig::Mixed {
                    eigenvalues,
                    eigenvectors,
                } if eigenvectors.len() == 2 => {
                    *eigenvalues = vec![p, 1.0 - p];
                }
                _ => {
                    return Err(CliError::Config(
                        "sweep p requires a mixed battery with two eigenvectors".into(),
                    ))
                }
            }
        }
    }
    Ok(cfg)
}
