//! Experiment configs: a TOML table plus `--set key=value` overrides, checked
//! against the selected experiment's schema before anything is computed.

use std::path::PathBuf;

use clap::ValueEnum;
use icebox_core::dynamics::PropagatorConfig;
use icebox_core::linalg::lanczos::LanczosOptions;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Default resource ceiling in complex amplitudes.
pub const DEFAULT_MAX_AMPLITUDES: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    ToyWave,
    Nonlocal,
    LocalEvolve,
    Gap,
    Scaling,
    Wavepacket,
    GroverCheck,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::ToyWave => "toy-wave",
            ExperimentId::Nonlocal => "nonlocal",
            ExperimentId::LocalEvolve => "local-evolve",
            ExperimentId::Gap => "gap",
            ExperimentId::Scaling => "scaling",
            ExperimentId::Wavepacket => "wavepacket",
            ExperimentId::GroverCheck => "grover-check",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub max_amplitudes: u64,
    pub params: Params,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub plot: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Params {
    ToyWave(ToyWaveParams),
    Nonlocal(NonlocalParams),
    LocalEvolve(LocalEvolveParams),
    Gap(GapParams),
    Scaling(ScalingParams),
    Wavepacket(WavepacketParams),
    GroverCheck(GroverParams),
}

fn default_gamma() -> Vec<f64> {
    vec![1.0, 1.16]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToyWaveParams {
    pub n_b: usize,
    pub j: f64,
    pub b: f64,
    pub lambda: f64,
    pub t_max: f64,
    pub dt: f64,
    /// Weak coupling used for the perturbative comparison; 0 skips it.
    pub spinwave_lambda: f64,
    pub spinwave_t_max: f64,
}

impl Default for ToyWaveParams {
    fn default() -> Self {
        Self {
            n_b: 13,
            j: 1.0,
            b: 1.0,
            lambda: 1.0,
            t_max: 10.0,
            dt: 0.05,
            spinwave_lambda: 0.2,
            spinwave_t_max: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlocalParams {
    pub n_s: usize,
    pub n_b: usize,
    /// Defaults to `3 pi / omega`.
    pub t_max: Option<f64>,
    pub dt: f64,
    /// Fixed target; otherwise drawn from the seed.
    pub target: Option<usize>,
    pub g_b: usize,
}

impl Default for NonlocalParams {
    fn default() -> Self {
        Self {
            n_s: 5,
            n_b: 5,
            t_max: None,
            dt: 0.05,
            target: None,
            g_b: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// `N_s^{-1/2} sum_j |j_s, g_b>`
    Uniform,
    /// `|j_s, g_b>` with `j_s` at distance `l_j` from the target.
    Well,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolveMethod {
    /// Propagate the whole `2^{2 n_s}` composite state.
    Full,
    /// Propagate each parity block on the system register and sum.
    Blocks,
    /// Like `Blocks`, but one block per Hamming distance weighted by its
    /// multiplicity; blocks at equal distance are relabelings of each other.
    Distances,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateParams {
    pub a0: f64,
    pub amplitudes: Vec<f64>,
}

impl Default for EstimateParams {
    fn default() -> Self {
        Self {
            a0: 1.0,
            amplitudes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalEvolveParams {
    pub n_s: usize,
    pub gamma: Vec<f64>,
    pub t_max: f64,
    pub dt: f64,
    pub initial: InitialState,
    pub l_j: usize,
    pub method: EvolveMethod,
    pub target: Option<usize>,
    pub g_b: usize,
    pub min_prominence: f64,
    pub estimate: EstimateParams,
}

impl Default for LocalEvolveParams {
    fn default() -> Self {
        Self {
            n_s: 8,
            gamma: default_gamma(),
            t_max: 3000.0,
            dt: 1.5,
            initial: InitialState::Uniform,
            l_j: 4,
            method: EvolveMethod::Full,
            target: None,
            g_b: 0,
            min_prominence: 0.02,
            estimate: EstimateParams::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GapParams {
    pub n_s: usize,
    pub gamma: Vec<f64>,
    /// Overrides the strength derived from `gamma`.
    pub lambda: Option<f64>,
    /// Hamming distances to solve; empty means `1..=n_s`.
    pub distances: Vec<usize>,
    /// Distance whose wave packet is written shell by shell; 0 skips it.
    pub profile_distance: usize,
    pub target: Option<usize>,
    pub tolerance: f64,
}

impl Default for GapParams {
    fn default() -> Self {
        Self {
            n_s: 12,
            gamma: default_gamma(),
            lambda: None,
            distances: Vec::new(),
            profile_distance: 6,
            target: None,
            tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingParams {
    pub sizes: Vec<usize>,
    pub gamma: Vec<f64>,
    pub tolerance: f64,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self {
            sizes: (8..=16).collect(),
            gamma: default_gamma(),
            tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WavepacketParams {
    pub n_s: usize,
    pub gamma: Vec<f64>,
    pub lambda: Option<f64>,
    pub orders: Vec<usize>,
    /// Defaults to `n_s`.
    pub h_max: Option<usize>,
}

impl Default for WavepacketParams {
    fn default() -> Self {
        Self {
            n_s: 18,
            gamma: default_gamma(),
            lambda: None,
            orders: vec![1, 2, 3],
            h_max: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroverParams {
    pub n: usize,
    pub steps: usize,
    pub target: Option<usize>,
}

impl Default for GroverParams {
    fn default() -> Self {
        Self {
            n: 6,
            steps: 6,
            target: None,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("{name} must be finite, got {v}")))
    }
}

fn in_range(name: &str, v: usize, lo: usize, hi: usize) -> Result<(), CliError> {
    if (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(usage(format!("{name} must lie in {lo}..={hi}, got {v}")))
    }
}

fn label(name: &str, v: Option<usize>, qubits: usize) -> Result<(), CliError> {
    match v {
        Some(x) if x >> qubits != 0 => Err(usage(format!("{name} = {x} does not fit in {qubits} qubits"))),
        _ => Ok(()),
    }
}

fn gamma(g: &[f64]) -> Result<(), CliError> {
    if g.is_empty() || g.iter().any(|x| !x.is_finite()) {
        return Err(usage("gamma must be a non-empty list of finite numbers"));
    }
    Ok(())
}

fn time_grid(t_max: f64, dt: f64) -> Result<(), CliError> {
    positive("t_max", t_max)?;
    positive("dt", dt)?;
    if t_max / dt > 1e7 {
        return Err(usage(format!("time grid of {:.0} samples is too long", t_max / dt)));
    }
    Ok(())
}

impl Params {
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            Params::ToyWave(p) => {
                in_range("n_b", p.n_b, 3, 30)?;
                finite("j", p.j)?;
                finite("b", p.b)?;
                finite("lambda", p.lambda)?;
                time_grid(p.t_max, p.dt)?;
                finite("spinwave_lambda", p.spinwave_lambda)?;
                if p.spinwave_lambda != 0.0 {
                    time_grid(p.spinwave_t_max, p.dt)?;
                }
            }
            Params::Nonlocal(p) => {
                in_range("n_s", p.n_s, 1, 30)?;
                in_range("n_b", p.n_b, 1, 30)?;
                if let Some(t) = p.t_max {
                    positive("t_max", t)?;
                }
                positive("dt", p.dt)?;
                label("target", p.target, p.n_s)?;
                label("g_b", Some(p.g_b), p.n_b)?;
            }
            Params::LocalEvolve(p) => {
                in_range("n_s", p.n_s, 2, 30)?;
                gamma(&p.gamma)?;
                time_grid(p.t_max, p.dt)?;
                if p.t_max / p.dt < 16.0 {
                    return Err(usage("the spectrum needs at least 16 samples; lower dt or raise t_max"));
                }
                if p.initial == InitialState::Well {
                    in_range("l_j", p.l_j, 1, p.n_s)?;
                }
                label("target", p.target, p.n_s)?;
                label("g_b", Some(p.g_b), p.n_s)?;
                if !(0.0..1.0).contains(&p.min_prominence) {
                    return Err(usage("min_prominence must lie in [0, 1)"));
                }
                finite("estimate.a0", p.estimate.a0)?;
                if p.estimate.amplitudes.iter().any(|a| !a.is_finite()) {
                    return Err(usage("estimate.amplitudes must be finite"));
                }
            }
            Params::Gap(p) => {
                in_range("n_s", p.n_s, 2, 30)?;
                gamma(&p.gamma)?;
                if let Some(l) = p.lambda {
                    finite("lambda", l)?;
                }
                for &l in &p.distances {
                    in_range("distance", l, 1, p.n_s)?;
                }
                in_range("profile_distance", p.profile_distance, 0, p.n_s)?;
                label("target", p.target, p.n_s)?;
                positive("tolerance", p.tolerance)?;
            }
            Params::Scaling(p) => {
                if p.sizes.len() < 4 {
                    return Err(usage(format!("scaling needs at least four sizes, got {}", p.sizes.len())));
                }
                for &n in &p.sizes {
                    in_range("size", n, 8, 20)?;
                }
                let mut sorted = p.sizes.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != p.sizes.len() {
                    return Err(usage("scaling sizes must be distinct"));
                }
                gamma(&p.gamma)?;
                positive("tolerance", p.tolerance)?;
            }
            Params::Wavepacket(p) => {
                in_range("n_s", p.n_s, 1, 64)?;
                gamma(&p.gamma)?;
                if let Some(l) = p.lambda {
                    finite("lambda", l)?;
                }
                if p.orders.is_empty() {
                    return Err(usage("orders must not be empty"));
                }
                for &o in &p.orders {
                    in_range("order", o, 1, 3)?;
                }
                if let Some(h) = p.h_max {
                    in_range("h_max", h, 1, p.n_s)?;
                }
            }
            Params::GroverCheck(p) => {
                in_range("n", p.n, 1, 30)?;
                in_range("steps", p.steps, 1, 10_000)?;
                label("target", p.target, p.n)?;
            }
        }
        Ok(())
    }

    /// Peak working set in complex amplitudes: the largest state times the
    /// vectors its solver keeps alongside it.
    pub fn amplitudes(&self) -> u128 {
        // Krylov propagation holds its basis plus two work vectors; the Lanczos
        // eigensolver keeps its real basis plus two, i.e. half as many complex.
        let krylov = |n: usize| pow(n).saturating_mul(PropagatorConfig::default().krylov_dim as u128 + 2);
        let lanczos = |n: usize| pow(n).saturating_mul(LanczosOptions::default().basis_size as u128 + 2) / 2;
        match self {
            Params::ToyWave(p) => krylov(1 + p.n_b),
            Params::Nonlocal(p) => krylov(p.n_s + p.n_b),
            Params::LocalEvolve(p) => match p.method {
                EvolveMethod::Full => krylov(2 * p.n_s),
                EvolveMethod::Blocks | EvolveMethod::Distances => krylov(p.n_s).max(lanczos(p.n_s)),
            },
            Params::Gap(p) => lanczos(p.n_s),
            Params::Scaling(p) => p.sizes.iter().map(|&n| lanczos(n)).max().unwrap_or(0),
            Params::Wavepacket(p) => p.n_s as u128 + 1,
            Params::GroverCheck(p) => pow(p.n).saturating_mul(4),
        }
    }
}

fn pow(n: usize) -> u128 {
    1u128.checked_shl(n as u32).unwrap_or(u128::MAX)
}

/// Parses `value` as a TOML value, falling back to a bare string.
fn parse_value(value: &str) -> toml::Value {
    format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()))
}

/// Applies one `key=value` override; dotted keys address nested tables.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| usage(format!("override `{assignment}` is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(usage(format!("bad override key `{key}`")));
    }
    let mut node = table;
    for part in &path[..path.len() - 1] {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| usage(format!("override `{key}`: `{part}` is not a table")))?;
    }
    node.insert(path[path.len() - 1].to_string(), parse_value(value.trim()));
    Ok(())
}

fn take<T: DeserializeOwned>(table: &mut toml::Table, key: &str) -> Result<Option<T>, CliError> {
    table
        .remove(key)
        .map(|v| v.try_into().map_err(|e| usage(format!("`{key}`: {e}"))))
        .transpose()
}

fn params<T: DeserializeOwned>(table: toml::Table, experiment: ExperimentId) -> Result<T, CliError> {
    toml::Value::Table(table)
        .try_into()
        .map_err(|e| usage(format!("invalid {} config: {e}", experiment.name())))
}

impl ExperimentConfig {
    /// Builds and validates a config from TOML text (may be empty) and overrides.
    pub fn from_sources(
        experiment: ExperimentId,
        text: &str,
        overrides: &[String],
        out: PathBuf,
        plot: bool,
    ) -> Result<Self, CliError> {
        let mut table: toml::Table = text.parse().map_err(|e| usage(format!("config is not valid TOML: {e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        if let Some(named) = take::<ExperimentId>(&mut table, "experiment")? {
            if named != experiment {
                return Err(usage(format!(
                    "config is for `{}` but `{}` was requested",
                    named.name(),
                    experiment.name()
                )));
            }
        }
        let seed = take::<u64>(&mut table, "seed")?.unwrap_or(1);
        let max_amplitudes = take::<u64>(&mut table, "max_amplitudes")?.unwrap_or(DEFAULT_MAX_AMPLITUDES);
        let params = match experiment {
            ExperimentId::ToyWave => Params::ToyWave(params(table, experiment)?),
            ExperimentId::Nonlocal => Params::Nonlocal(params(table, experiment)?),
            ExperimentId::LocalEvolve => Params::LocalEvolve(params(table, experiment)?),
            ExperimentId::Gap => Params::Gap(params(table, experiment)?),
            ExperimentId::Scaling => Params::Scaling(params(table, experiment)?),
            ExperimentId::Wavepacket => Params::Wavepacket(params(table, experiment)?),
            ExperimentId::GroverCheck => Params::GroverCheck(params(table, experiment)?),
        };
        params.validate()?;
        Ok(Self {
            experiment,
            seed,
            max_amplitudes,
            params,
            out,
            plot,
        })
    }

    /// Refuses runs whose largest state exceeds `max_amplitudes`.
    pub fn check_resources(&self) -> Result<(), CliError> {
        let need = self.params.amplitudes();
        if need > self.max_amplitudes as u128 {
            return Err(CliError::Capacity(format!(
                "{} needs {need} amplitudes, limit is {}",
                self.experiment.name(),
                self.max_amplitudes
            )));
        }
        Ok(())
    }
}
