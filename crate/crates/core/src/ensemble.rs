//! Declarative experiment configuration, disorder-ensemble execution
//! with deterministic parallelism, figure presets, and CSV/JSON result
//! emission.
//!
//! Configs carry only dimensionless products (J0*T, W*T, g*T1); the
//! engine fixes T = 1 internally, so couplings and fields in physical
//! units equal the configured products numerically.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::{
    evolve_record, prepare_polarized, prepare_tilted, DriveProtocol, EvolutionError,
    ObservableSet, StateVector, StroboscopicTrace,
};
use crate::network::{
    build_ladder, build_power_law_chain, derive_seed, half_partition, sample_disorder, BoundsMode,
    DisorderField, NetworkError, PowerLawExponent, Region, RegionPartition, SpinNetwork,
};
use crate::observables::reference_entropies;

/// Internal drive period. Everything dimensionless in configs is turned
/// physical by dividing by this.
pub const PERIOD: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config at `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("unknown preset `{name}`; available: {}", available.join(", "))]
    UnknownPreset { name: String, available: Vec<String> },
}

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("network construction failed: {0}")]
    Network(#[from] NetworkError),
    #[error("evolution failed: {0}")]
    Evolution(#[from] EvolutionError),
    #[error("realization {index} failed: {source}")]
    Realization { index: u64, source: EvolutionError },
    #[error("{} realizations failed: indices {:?}", indices.len(), indices)]
    RealizationsFailed { indices: Vec<u64> },
    #[error("i/o failure at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Network builder selection with dimensionless couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkConfig {
    PowerLawChain { n_sites: usize, j0t: f64, alpha: AlphaSpec },
    Ladder { n_rungs: usize, jt: f64 },
    Custom { n_sites: usize, edges: Vec<(usize, usize, f64)> },
}

impl NetworkConfig {
    pub fn n_sites(&self) -> usize {
        match self {
            Self::PowerLawChain { n_sites, .. } | Self::Custom { n_sites, .. } => *n_sites,
            Self::Ladder { n_rungs, .. } => 2 * n_rungs,
        }
    }

    fn build(&self, t: f64) -> Result<SpinNetwork, NetworkError> {
        match self {
            Self::PowerLawChain { n_sites, j0t, alpha } => {
                build_power_law_chain(*n_sites, j0t / t, alpha.exponent())
            }
            Self::Ladder { n_rungs, jt } => build_ladder(*n_rungs, jt / t),
            Self::Custom { n_sites, edges } => SpinNetwork::from_edges(
                *n_sites,
                edges.iter().map(|&(l, m, jt)| (l, m, jt / t)),
            ),
        }
    }
}

/// Power-law exponent in configs: a number, or "inf" for the
/// nearest-neighbor limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Value(f64),
    Name(String),
}

impl AlphaSpec {
    pub fn infinite() -> Self {
        Self::Name("inf".into())
    }

    fn exponent(&self) -> PowerLawExponent {
        match self {
            Self::Value(a) => PowerLawExponent::Finite(*a),
            Self::Name(_) => PowerLawExponent::Infinite,
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self {
            Self::Value(a) if *a >= 0.0 && a.is_finite() => Ok(()),
            Self::Value(a) => Err(format!("exponent must be finite and >= 0, got {a}")),
            Self::Name(s) if s == "inf" || s == "infinity" => Ok(()),
            Self::Name(s) => Err(format!("unknown exponent name `{s}` (use \"inf\")")),
        }
    }
}

/// Region assignment: "half" or an explicit per-site label list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PartitionSpec {
    Named(String),
    Explicit(Vec<Region>),
}

impl PartitionSpec {
    fn build(&self, n_sites: usize) -> Result<RegionPartition, String> {
        match self {
            Self::Named(s) if s == "half" => {
                half_partition(n_sites).map_err(|e| e.to_string())
            }
            Self::Named(s) => Err(format!("unknown partition name `{s}` (use \"half\")")),
            Self::Explicit(labels) => {
                if labels.len() != n_sites {
                    return Err(format!(
                        "expected {n_sites} labels, got {}",
                        labels.len()
                    ));
                }
                RegionPartition::new(labels.clone()).map_err(|e| e.to_string())
            }
        }
    }
}

fn default_g_t1() -> f64 {
    std::f64::consts::FRAC_PI_2
}

fn default_t1_fraction() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Pulse area g*T1; pi/2 unless explicitly overridden.
    #[serde(default = "default_g_t1")]
    pub g_t1: f64,
    /// T1 as a fraction of the period.
    #[serde(default = "default_t1_fraction")]
    pub t1_fraction: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    /// Permit g*T1 away from pi/2.
    #[serde(default)]
    pub allow_g_t1_override: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderConfig {
    pub wt: f64,
    #[serde(default = "default_bounds")]
    pub bounds: BoundsMode,
}

fn default_bounds() -> BoundsMode {
    BoundsMode::Positive
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialStateSpec {
    Named(String),
    Tilted { tilted: f64 },
}

impl Default for InitialStateSpec {
    fn default() -> Self {
        Self::Named("polarized".into())
    }
}

impl InitialStateSpec {
    fn prepare(&self, n_sites: usize) -> Result<StateVector, String> {
        match self {
            Self::Named(s) if s == "polarized" => {
                prepare_polarized(n_sites).map_err(|e| e.to_string())
            }
            Self::Named(s) => Err(format!("unknown initial state `{s}` (use \"polarized\")")),
            Self::Tilted { tilted } => {
                prepare_tilted(n_sites, *tilted).map_err(|e| e.to_string())
            }
        }
    }
}

fn default_stride() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub n_periods: u64,
    #[serde(default = "default_stride")]
    pub record_stride: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_realizations: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    LocalMz,
    RegionalMz,
    Entropy,
}

fn default_observables() -> Vec<ObservableKind> {
    vec![ObservableKind::LocalMz, ObservableKind::RegionalMz]
}

fn default_output() -> OutputConfig {
    OutputConfig { dir: "out".into(), store_realizations: false }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default)]
    pub store_realizations: bool,
}

/// Full declarative description of one ensemble experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkConfig,
    pub partition: PartitionSpec,
    pub protocol: ProtocolConfig,
    pub disorder: DisorderConfig,
    #[serde(default)]
    pub initial_state: InitialStateSpec,
    pub schedule: ScheduleConfig,
    pub ensemble: EnsembleConfig,
    #[serde(default = "default_observables")]
    pub observables: Vec<ObservableKind>,
    #[serde(default = "default_output")]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// Parse and validate a JSON document. Unknown keys are rejected;
    /// invariant violations name the offending field.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field: &str, reason: String| ConfigError::Invalid {
            field: field.into(),
            reason,
        };
        if !self.protocol.allow_g_t1_override
            && (self.protocol.g_t1 - std::f64::consts::FRAC_PI_2).abs() > 1e-12
        {
            return Err(invalid(
                "protocol.g_t1",
                format!(
                    "must equal pi/2 = {} (got {}); set allow_g_t1_override to relax",
                    std::f64::consts::FRAC_PI_2,
                    self.protocol.g_t1
                ),
            ));
        }
        if !self.protocol.g_t1.is_finite() {
            return Err(invalid("protocol.g_t1", "must be finite".into()));
        }
        if !(self.protocol.t1_fraction > 0.0 && self.protocol.t1_fraction < 1.0) {
            return Err(invalid(
                "protocol.t1_fraction",
                format!("must lie strictly between 0 and 1, got {}", self.protocol.t1_fraction),
            ));
        }
        for (name, eps) in [("eps_a", self.protocol.eps_a), ("eps_b", self.protocol.eps_b)] {
            if !(0.0..=1.0).contains(&eps) {
                return Err(invalid(
                    &format!("protocol.{name}"),
                    format!("rotation error must lie in [0, 1], got {eps}"),
                ));
            }
        }
        if self.disorder.wt < 0.0 || !self.disorder.wt.is_finite() {
            return Err(invalid(
                "disorder.wt",
                format!("must be finite and >= 0, got {}", self.disorder.wt),
            ));
        }
        if self.schedule.n_periods < 1 {
            return Err(invalid("schedule.n_periods", "must be >= 1".into()));
        }
        if self.schedule.record_stride < 1 {
            return Err(invalid("schedule.record_stride", "must be >= 1".into()));
        }
        if self.ensemble.n_realizations < 1 {
            return Err(invalid("ensemble.n_realizations", "must be >= 1".into()));
        }
        if let NetworkConfig::PowerLawChain { alpha, .. } = &self.network {
            alpha.validate().map_err(|reason| invalid("network.alpha", reason))?;
        }
        self.network
            .build(PERIOD)
            .map_err(|e| invalid("network", e.to_string()))?;
        self.partition
            .build(self.network.n_sites())
            .map_err(|reason| invalid("partition", reason))?;
        self.initial_state
            .prepare(self.network.n_sites())
            .map_err(|reason| invalid("initial_state", reason))?;
        Ok(())
    }

    /// Observable flags for the evolution kernel.
    pub fn observable_set(&self) -> ObservableSet {
        ObservableSet {
            regional_magnetization: self.observables.contains(&ObservableKind::RegionalMz),
            entropy: self.observables.contains(&ObservableKind::Entropy),
        }
    }

    /// Physical drive protocol at T = PERIOD.
    pub fn drive_protocol(&self) -> Result<DriveProtocol, EvolutionError> {
        let t1 = self.protocol.t1_fraction * PERIOD;
        let t2 = PERIOD - t1;
        let g = self.protocol.g_t1 / t1;
        DriveProtocol::new(g, t1, t2, self.protocol.eps_a, self.protocol.eps_b)
    }

    /// Build the physical network, partition, and initial state.
    pub fn realize(&self) -> Result<(SpinNetwork, RegionPartition, StateVector), EnsembleError> {
        let network = self.network.build(PERIOD)?;
        let partition = self
            .partition
            .build(network.n_sites())
            .map_err(|reason| ConfigError::Invalid { field: "partition".into(), reason })?;
        let initial = self
            .initial_state
            .prepare(network.n_sites())
            .map_err(|reason| ConfigError::Invalid { field: "initial_state".into(), reason })?;
        Ok((network, partition, initial))
    }

    /// Disorder field of realization `r`, drawn from the derived seed.
    pub fn disorder_for(&self, r: u64) -> Result<DisorderField, EnsembleError> {
        Ok(sample_disorder(
            self.network.n_sites(),
            self.disorder.wt / PERIOD,
            self.disorder.bounds,
            derive_seed(self.ensemble.master_seed, r),
        )?)
    }
}

/// One realization of the ensemble: disorder drawn from the derived
/// seed, evolved and recorded per the config. Output is independent of
/// execution order among realizations.
pub fn run_realization(
    config: &ExperimentConfig,
    r: u64,
) -> Result<StroboscopicTrace, EnsembleError> {
    if r >= config.ensemble.n_realizations {
        return Err(ConfigError::Invalid {
            field: "ensemble.n_realizations".into(),
            reason: format!("realization index {r} out of range"),
        }
        .into());
    }
    let (network, partition, mut state) = config.realize()?;
    let protocol = config.drive_protocol()?;
    let disorder = config.disorder_for(r)?;
    evolve_record(
        &mut state,
        &protocol,
        &network,
        &disorder,
        &partition,
        config.schedule.n_periods,
        config.schedule.record_stride,
        config.observable_set(),
    )
    .map_err(|source| EnsembleError::Realization { index: r, source })
}

/// Run manifest: config echo, derived seeds, timing, code version.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub derived_seeds: Vec<u64>,
    pub drive_period: f64,
    pub wall_time_seconds: f64,
    pub code_version: String,
    pub reference_entropies: Option<ReferenceEntropies>,
    /// M_A/M_B columns use the 2/N normalization; for equal halves this
    /// coincides with the per-region mean.
    pub regional_normalization: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceEntropies {
    pub thermal: f64,
    pub mbl: f64,
}

/// Ensemble outcome: pointwise means over realizations, optional
/// per-realization traces, and the manifest.
#[derive(Debug)]
pub struct EnsembleResult {
    pub mean: StroboscopicTrace,
    pub per_realization: Option<Vec<StroboscopicTrace>>,
    pub manifest: RunManifest,
}

/// Execute all realizations (in parallel when `jobs` allows), average
/// observables pointwise in recorded time. Partial failures abort with
/// the set of failed indices; nothing is averaged in that case.
pub fn run_ensemble(
    config: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<EnsembleResult, EnsembleError> {
    config.validate()?;
    let started = std::time::Instant::now();
    let n_real = config.ensemble.n_realizations;

    let derived_seeds: Vec<u64> =
        (0..n_real).map(|r| derive_seed(config.ensemble.master_seed, r)).collect();
    {
        let mut sorted = derived_seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        debug_assert_eq!(sorted.len(), derived_seeds.len(), "derived seed collision");
    }

    let run_all = || -> Vec<Result<StroboscopicTrace, EnsembleError>> {
        (0..n_real).into_par_iter().map(|r| run_realization(config, r)).collect()
    };
    let outcomes = match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(run_all),
        None => run_all(),
    };

    let failed: Vec<u64> = outcomes
        .iter()
        .enumerate()
        .filter_map(|(r, res)| res.is_err().then_some(r as u64))
        .collect();
    if !failed.is_empty() {
        return Err(EnsembleError::RealizationsFailed { indices: failed });
    }
    let traces: Vec<StroboscopicTrace> =
        outcomes.into_iter().map(|res| res.expect("no failures")).collect();

    // Deterministic merge: plain sums in ascending realization order.
    let mean = average_traces(&traces);

    let n_sites = config.network.n_sites();
    let manifest = RunManifest {
        config: config.clone(),
        derived_seeds,
        drive_period: PERIOD,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        reference_entropies: reference_entropies(n_sites)
            .ok()
            .map(|(thermal, mbl)| ReferenceEntropies { thermal, mbl }),
        regional_normalization: "2/N".into(),
    };

    Ok(EnsembleResult {
        mean,
        per_realization: config.output.store_realizations.then_some(traces),
        manifest,
    })
}

/// Pointwise arithmetic mean of equally shaped traces.
pub fn average_traces(traces: &[StroboscopicTrace]) -> StroboscopicTrace {
    let first = &traces[0];
    let n_records = first.record_times.len();
    let n_sites = first.n_sites;
    let scale = 1.0 / traces.len() as f64;

    let mut local = vec![vec![0.0; n_sites]; n_records];
    let mut regional =
        first.regional_mz.as_ref().map(|_| vec![(0.0, 0.0); n_records]);
    let mut entropy = first.entropy_b.as_ref().map(|_| vec![0.0; n_records]);
    for trace in traces {
        for (i, row) in trace.local_mz.iter().enumerate() {
            for (l, &m) in row.iter().enumerate() {
                local[i][l] += m;
            }
        }
        if let (Some(acc), Some(values)) = (regional.as_mut(), trace.regional_mz.as_ref()) {
            for (i, &(a, b)) in values.iter().enumerate() {
                acc[i].0 += a;
                acc[i].1 += b;
            }
        }
        if let (Some(acc), Some(values)) = (entropy.as_mut(), trace.entropy_b.as_ref()) {
            for (i, &s) in values.iter().enumerate() {
                acc[i] += s;
            }
        }
    }
    for row in &mut local {
        for m in row.iter_mut() {
            *m *= scale;
        }
    }
    if let Some(acc) = regional.as_mut() {
        for v in acc.iter_mut() {
            v.0 *= scale;
            v.1 *= scale;
        }
    }
    if let Some(acc) = entropy.as_mut() {
        for s in acc.iter_mut() {
            *s *= scale;
        }
    }

    StroboscopicTrace {
        n_sites,
        record_times: first.record_times.clone(),
        local_mz: local,
        regional_mz: regional,
        entropy_b: entropy,
    }
}

fn write_atomic(path: &Path, content: &str) -> Result<(), EnsembleError> {
    let io_err = |source| EnsembleError::Io { path: path.to_path_buf(), source };
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
    ));
    std::fs::write(&tmp, content)
        .map_err(|source| EnsembleError::Io { path: tmp.clone(), source })?;
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// Write `trace.csv`, `manifest.json`, and optionally
/// `realizations/r####.csv` under `dir`. All writes go through a temp
/// file plus rename. Returns the paths written.
pub fn emit_outputs(result: &EnsembleResult, dir: &Path) -> Result<Vec<PathBuf>, EnsembleError> {
    std::fs::create_dir_all(dir)
        .map_err(|source| EnsembleError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();

    let trace_path = dir.join("trace.csv");
    write_atomic(&trace_path, &result.mean.to_csv())?;
    written.push(trace_path);

    let manifest_path = dir.join("manifest.json");
    let manifest_json =
        serde_json::to_string_pretty(&result.manifest).expect("manifest serializes");
    write_atomic(&manifest_path, &manifest_json)?;
    written.push(manifest_path);

    if let Some(traces) = &result.per_realization {
        let sub = dir.join("realizations");
        std::fs::create_dir_all(&sub)
            .map_err(|source| EnsembleError::Io { path: sub.clone(), source })?;
        for (r, trace) in traces.iter().enumerate() {
            let path = sub.join(format!("r{r:04}.csv"));
            write_atomic(&path, &trace.to_csv())?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Run an experiment end to end and write its outputs into the config's
/// output directory (or `out_override`).
pub fn run_and_emit(
    config: &ExperimentConfig,
    jobs: Option<usize>,
    out_override: Option<&Path>,
) -> Result<(EnsembleResult, Vec<PathBuf>), EnsembleError> {
    let result = run_ensemble(config, jobs)?;
    let dir = out_override.unwrap_or(&config.output.dir).to_path_buf();
    let written = emit_outputs(&result, &dir)?;
    Ok((result, written))
}

pub mod presets {
    //! Parameter presets for the published experiments.

    use super::*;
    use std::f64::consts::PI;

    const DEFAULT_SEED: u64 = 2026;
    const WT_STRONG: f64 = 2.0 * PI;

    fn base(
        name: &str,
        j0t: f64,
        alpha: AlphaSpec,
        eps_a: f64,
        eps_b: f64,
        wt: f64,
        n_periods: u64,
    ) -> ExperimentConfig {
        ExperimentConfig {
            network: NetworkConfig::PowerLawChain { n_sites: 8, j0t, alpha },
            partition: PartitionSpec::Named("half".into()),
            protocol: ProtocolConfig {
                g_t1: std::f64::consts::FRAC_PI_2,
                t1_fraction: 0.5,
                eps_a,
                eps_b,
                allow_g_t1_override: false,
            },
            disorder: DisorderConfig { wt, bounds: BoundsMode::Positive },
            initial_state: InitialStateSpec::default(),
            schedule: ScheduleConfig { n_periods, record_stride: 1 },
            ensemble: EnsembleConfig { n_realizations: 100, master_seed: DEFAULT_SEED },
            observables: default_observables(),
            output: OutputConfig {
                dir: PathBuf::from("runs").join(name),
                store_realizations: false,
            },
        }
    }

    fn ladder(name: &str, labels: [Region; 8]) -> ExperimentConfig {
        let mut config = base(name, 0.2, AlphaSpec::Value(1.51), 0.03, 0.9, WT_STRONG, 1000);
        config.network = NetworkConfig::Ladder { n_rungs: 4, jt: 0.2 };
        config.partition = PartitionSpec::Explicit(labels.to_vec());
        config
    }

    fn fig4(name: &str, alpha: AlphaSpec) -> ExperimentConfig {
        let mut config = base(name, 0.2, alpha, 0.03, 0.9, WT_STRONG, 10_000);
        config.initial_state = InitialStateSpec::Tilted { tilted: 0.2 * PI };
        config.schedule.record_stride = 2;
        config.observables =
            vec![ObservableKind::LocalMz, ObservableKind::RegionalMz, ObservableKind::Entropy];
        config
    }

    /// Published preset names with one-line descriptions.
    pub fn catalog() -> Vec<(&'static str, &'static str)> {
        vec![
            ("fig1b-weak", "short-time chain, weak coupling J0T=0.072, eps 0.03/0.9, WT=2pi"),
            ("fig1b-strong", "short-time chain, strong coupling J0T=0.2, eps 0.03/0.9, WT=2pi"),
            ("fig1b-weak-long", "long-time variant of fig1b-weak (1e4 periods)"),
            ("fig1b-strong-long", "long-time variant of fig1b-strong (1e4 periods)"),
            ("fig2-e03-w0", "weak coupling, eps_A=0.03, no disorder"),
            ("fig2-e03-w2pi", "weak coupling, eps_A=0.03, WT=2pi"),
            ("fig2-e10-w0", "weak coupling, eps_A=0.1, no disorder (Rabi regime)"),
            ("fig2-e10-w2pi", "weak coupling, eps_A=0.1, WT=2pi"),
            ("fig4-a0", "tilted start, all-to-all coupling, entropy recorded every 2T"),
            ("fig4-a151", "tilted start, alpha=1.51, entropy recorded every 2T"),
            ("fig4-ainf", "tilted start, nearest-neighbor coupling, entropy recorded every 2T"),
            ("s2-long", "strong coupling, eps_B=1 limit, 1e4 periods"),
            ("s3-e03-w0", "weak coupling, eps_B=1, eps_A=0.03, no disorder"),
            ("s3-e03-w2pi", "weak coupling, eps_B=1, eps_A=0.03, WT=2pi"),
            ("s3-e10-w0", "weak coupling, eps_B=1, eps_A=0.1, no disorder"),
            ("s3-e10-w2pi", "weak coupling, eps_B=1, eps_A=0.1, WT=2pi"),
            ("s4-equal-small", "strong coupling, eps_A=eps_B=0.03"),
            ("s4-equal-large", "strong coupling, eps_A=eps_B=0.1"),
            ("s4-eb010", "strong coupling, eps_A=0.03, eps_B=0.1"),
            ("s4-eb040", "strong coupling, eps_A=0.03, eps_B=0.4"),
            ("s4-eb070", "strong coupling, eps_A=0.03, eps_B=0.7"),
            ("s4-eb090", "strong coupling, eps_A=0.03, eps_B=0.9"),
            ("s5-ladder-halves", "4-rung ladder, left/right bipartition"),
            ("s5-ladder-rails", "4-rung ladder, bottom/top rail bipartition"),
            ("s5-ladder-alt", "4-rung ladder, alternating rungs"),
            ("s5-ladder-checker", "4-rung ladder, checkerboard bipartition"),
        ]
    }

    /// Exact parameters of the named experiment.
    pub fn preset(name: &str) -> Result<ExperimentConfig, ConfigError> {
        use Region::{A, B};
        let a151 = || AlphaSpec::Value(1.51);
        let config = match name {
            "fig1b-weak" => base(name, 0.072, a151(), 0.03, 0.9, WT_STRONG, 200),
            "fig1b-strong" => base(name, 0.2, a151(), 0.03, 0.9, WT_STRONG, 200),
            "fig1b-weak-long" => base(name, 0.072, a151(), 0.03, 0.9, WT_STRONG, 10_000),
            "fig1b-strong-long" => base(name, 0.2, a151(), 0.03, 0.9, WT_STRONG, 10_000),
            "fig2-e03-w0" => base(name, 0.072, a151(), 0.03, 0.9, 0.0, 200),
            "fig2-e03-w2pi" => base(name, 0.072, a151(), 0.03, 0.9, WT_STRONG, 200),
            "fig2-e10-w0" => base(name, 0.072, a151(), 0.1, 0.9, 0.0, 200),
            "fig2-e10-w2pi" => base(name, 0.072, a151(), 0.1, 0.9, WT_STRONG, 200),
            "fig4-a0" => fig4(name, AlphaSpec::Value(0.0)),
            "fig4-a151" => fig4(name, a151()),
            "fig4-ainf" => fig4(name, AlphaSpec::infinite()),
            "s2-long" => base(name, 0.2, a151(), 0.03, 1.0, WT_STRONG, 10_000),
            "s3-e03-w0" => base(name, 0.072, a151(), 0.03, 1.0, 0.0, 200),
            "s3-e03-w2pi" => base(name, 0.072, a151(), 0.03, 1.0, WT_STRONG, 200),
            "s3-e10-w0" => base(name, 0.072, a151(), 0.1, 1.0, 0.0, 200),
            "s3-e10-w2pi" => base(name, 0.072, a151(), 0.1, 1.0, WT_STRONG, 200),
            "s4-equal-small" => base(name, 0.2, a151(), 0.03, 0.03, WT_STRONG, 10_000),
            "s4-equal-large" => base(name, 0.2, a151(), 0.1, 0.1, WT_STRONG, 10_000),
            "s4-eb010" => base(name, 0.2, a151(), 0.03, 0.1, WT_STRONG, 10_000),
            "s4-eb040" => base(name, 0.2, a151(), 0.03, 0.4, WT_STRONG, 10_000),
            "s4-eb070" => base(name, 0.2, a151(), 0.03, 0.7, WT_STRONG, 10_000),
            "s4-eb090" => base(name, 0.2, a151(), 0.03, 0.9, WT_STRONG, 10_000),
            // Ladder sites: 0..3 bottom rail, 4..7 top rail.
            "s5-ladder-halves" => ladder(name, [A, A, B, B, A, A, B, B]),
            "s5-ladder-rails" => ladder(name, [A, A, A, A, B, B, B, B]),
            "s5-ladder-alt" => ladder(name, [A, B, A, B, A, B, A, B]),
            "s5-ladder-checker" => ladder(name, [A, B, A, B, B, A, B, A]),
            _ => {
                return Err(ConfigError::UnknownPreset {
                    name: name.into(),
                    available: catalog().iter().map(|(n, _)| n.to_string()).collect(),
                })
            }
        };
        debug_assert!(config.validate().is_ok(), "preset {name} must validate");
        Ok(config)
    }
}
