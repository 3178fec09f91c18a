//! Run configuration: file values merged under flag overrides, validated
//! before any compute starts, and re-emitted fully resolved for replay.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::{default_beta_grid, EscalationPolicy, OptimizerKind, VqtConfig};
use crate::error::{Error, Result};
use crate::syk::{derive_seed, SykMode, SykParams, DEFAULT_CONNECTIVITY};
use crate::tfd::HbConvention;

pub const OUT_ROOT_ENV: &str = "SYK_VQT_OUT_ROOT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

/// Everything a `thermal` run needs; also the payload of the emitted
/// resolved config.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: String,
    pub n_majorana: usize,
    pub mode: SykMode,
    pub j_strength: f64,
    pub k_connectivity: f64,
    pub seed: u64,
    pub n_instances: usize,
    pub vqt: VqtConfig,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub workers: usize,
    /// Derived per-instance seeds, recorded for exact replay.
    #[serde(default)]
    pub instance_seeds: Vec<u64>,
    /// TFD-only knobs; ignored by `thermal`.
    #[serde(default)]
    pub tfd: TfdConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfdConfig {
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_steps: usize,
    /// Temperature scan; beta = 1/T pointwise.
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub convention: HbConvention,
}

impl Default for TfdConfig {
    fn default() -> TfdConfig {
        TfdConfig {
            mu_min: 0.2,
            mu_max: 1.0,
            mu_steps: 9,
            t_min: 0.05,
            t_max: 2.0,
            t_steps: 40,
            convention: HbConvention::Same,
        }
    }
}

impl TfdConfig {
    pub fn mu_grid(&self) -> Vec<f64> {
        grid(self.mu_min, self.mu_max, self.mu_steps)
    }

    pub fn beta_grid(&self) -> Vec<f64> {
        grid(self.t_min, self.t_max, self.t_steps).into_iter().map(|t| 1.0 / t).collect()
    }

    pub fn t_step_size(&self) -> f64 {
        if self.t_steps < 2 {
            0.0
        } else {
            (self.t_max - self.t_min) / (self.t_steps - 1) as f64
        }
    }
}

fn grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

/// Partial config as read from a file; every field optional so that flags
/// can override. Unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub n_majorana: Option<usize>,
    pub mode: Option<SykMode>,
    pub j_strength: Option<f64>,
    pub k_connectivity: Option<f64>,
    pub seed: Option<u64>,
    pub n_instances: Option<usize>,
    pub beta_grid: Option<Vec<f64>>,
    pub target_fidelity: Option<f64>,
    pub max_layers: Option<usize>,
    pub optimizer: Option<OptimizerKind>,
    pub loss_tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub init_seed: Option<u64>,
    pub escalation: Option<EscalationPolicy>,
    pub shots: Option<usize>,
    pub fidelity_check_every: Option<usize>,
    pub warm_start_across_beta: Option<bool>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub workers: Option<usize>,
    pub tfd: Option<TfdConfig>,
}

pub fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Read back a fully resolved config (as emitted next to run outputs).
pub fn load_resolved_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn syk_params(&self) -> SykParams {
        let mut p = match self.mode {
            SykMode::Dense => SykParams::dense(self.n_majorana, self.seed),
            SykMode::Sparse => SykParams::sparse(self.n_majorana, self.k_connectivity, self.seed),
        };
        p.j_strength = self.j_strength;
        p
    }

    pub fn validate(&self) -> Result<()> {
        self.syk_params().validate()?;
        self.vqt.validate()?;
        if self.n_instances == 0 {
            return Err(Error::InvalidParameter("instances must be >= 1".into()));
        }
        if self.subcommand == "tfd" {
            let t = &self.tfd;
            if !(t.mu_min > 0.0 && t.mu_max >= t.mu_min) {
                return Err(Error::InvalidParameter("mu range must be positive and ordered".into()));
            }
            if !(t.t_min > 0.0 && t.t_max >= t.t_min) {
                return Err(Error::InvalidParameter("temperature range must be positive and ordered".into()));
            }
        }
        Ok(())
    }

    /// Fill in the derived per-instance seeds.
    pub fn resolve_seeds(&mut self) {
        self.instance_seeds = (0..self.n_instances as u64).map(|i| derive_seed(self.seed, i)).collect();
    }

    /// Output directory under the optional environment root.
    pub fn resolved_out_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_ROOT_ENV) {
            Some(root) if self.out_dir.is_relative() => PathBuf::from(root).join(&self.out_dir),
            _ => self.out_dir.clone(),
        }
    }
}

/// Flag values (None = not given) merged over file values merged over
/// defaults.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n_majorana: Option<usize>,
    pub mode: Option<SykMode>,
    pub j_strength: Option<f64>,
    pub k_connectivity: Option<f64>,
    pub seed: Option<u64>,
    pub n_instances: Option<usize>,
    pub betas: Option<Vec<f64>>,
    pub target_fidelity: Option<f64>,
    pub max_layers: Option<usize>,
    pub optimizer: Option<OptimizerKind>,
    pub loss_tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub init_seed: Option<u64>,
    pub shots: Option<usize>,
    pub fidelity_check_every: Option<usize>,
    pub warm_start: Option<bool>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub workers: Option<usize>,
    pub mu_min: Option<f64>,
    pub mu_max: Option<f64>,
    pub mu_steps: Option<usize>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_steps: Option<usize>,
    pub convention: Option<HbConvention>,
}

pub fn resolve(subcommand: &str, file: FileConfig, flags: Overrides) -> Result<RunConfig> {
    let mode = flags.mode.or(file.mode).unwrap_or(SykMode::Dense);
    if mode == SykMode::Dense && (flags.k_connectivity.is_some() || file.k_connectivity.is_some()) {
        return Err(Error::InvalidParameter(
            "connectivity k applies to the sparse model only; pass --mode sparse".into(),
        ));
    }
    let mut vqt = VqtConfig::default();
    vqt.beta_grid = flags.betas.or(file.beta_grid).unwrap_or_else(default_beta_grid);
    if let Some(v) = flags.target_fidelity.or(file.target_fidelity) {
        vqt.target_fidelity = v;
    }
    if let Some(v) = flags.max_layers.or(file.max_layers) {
        vqt.max_layers = v;
    }
    if let Some(v) = flags.optimizer.or(file.optimizer) {
        vqt.optimizer = v;
    }
    if let Some(v) = flags.loss_tolerance.or(file.loss_tolerance) {
        vqt.loss_tolerance = v;
    }
    if let Some(v) = flags.max_iterations.or(file.max_iterations) {
        vqt.max_iterations = v;
    }
    if let Some(v) = flags.init_seed.or(file.init_seed) {
        vqt.init_seed = v;
    }
    if let Some(v) = file.escalation {
        vqt.escalation = v;
    }
    vqt.shots = flags.shots.or(file.shots);
    vqt.fidelity_check_every = flags.fidelity_check_every.or(file.fidelity_check_every);
    if let Some(v) = flags.warm_start.or(file.warm_start_across_beta) {
        vqt.warm_start_across_beta = v;
    }

    let mut tfd = file.tfd.unwrap_or_default();
    if let Some(v) = flags.mu_min {
        tfd.mu_min = v;
    }
    if let Some(v) = flags.mu_max {
        tfd.mu_max = v;
    }
    if let Some(v) = flags.mu_steps {
        tfd.mu_steps = v;
    }
    if let Some(v) = flags.t_min {
        tfd.t_min = v;
    }
    if let Some(v) = flags.t_max {
        tfd.t_max = v;
    }
    if let Some(v) = flags.t_steps {
        tfd.t_steps = v;
    }
    if let Some(v) = flags.convention {
        tfd.convention = v;
    }

    let mut config = RunConfig {
        subcommand: subcommand.to_string(),
        n_majorana: flags.n_majorana.or(file.n_majorana).unwrap_or(6),
        mode,
        j_strength: flags.j_strength.or(file.j_strength).unwrap_or(1.0),
        k_connectivity: flags.k_connectivity.or(file.k_connectivity).unwrap_or(DEFAULT_CONNECTIVITY),
        seed: flags.seed.or(file.seed).unwrap_or(0),
        n_instances: flags.n_instances.or(file.n_instances).unwrap_or(1),
        vqt,
        out_dir: flags.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from("out")),
        format: flags.format.or(file.format).unwrap_or(OutputFormat::Csv),
        workers: flags.workers.or(file.workers).unwrap_or_else(num_workers),
        instance_seeds: Vec::new(),
        tfd,
    };
    config.resolve_seeds();
    config.validate()?;
    Ok(config)
}

fn num_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
