//! End-to-end pipeline and the named experiments.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use log::info;

use super::config::{parse_config_onto, ExperimentConfig, ShapePreset};
use super::io::{write_grid_csv, write_grid_pgm, write_matrix_csv};
use super::metrics::{localization_error, RunMetrics};
use crate::error::{Error, Result};
use crate::forward::{active_scatter_matrix, BiesSystem};
use crate::geometry::{receiver_array, sampling_grid, source_array, Obstacle};
use crate::imaging::{
    correlation_error, cross_correlation, dcm_indicator_within, reference_correlation,
    CorrelationMatrix, ImageGrid,
};
use crate::passive::{apply_noise, calibration, synth_record_with, PassiveRecord};
use crate::rng::derive_seed;
use crate::CMatrix;

/// Seed labels; the source layout and the noise never share a stream.
const SOURCE_LABEL: u64 = 1;
const NOISE_LABEL: u64 = 2;

pub fn source_seed(master: u64) -> u64 {
    derive_seed(master, SOURCE_LABEL)
}

pub fn noise_seed(master: u64) -> u64 {
    derive_seed(master, NOISE_LABEL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Ex1Kite,
    Ex1Peanut,
    Ex2Close,
    Ex2Multiscale,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Ex1Kite, Preset::Ex1Peanut, Preset::Ex2Close, Preset::Ex2Multiscale];

    pub fn config(self) -> ExperimentConfig {
        let base = ExperimentConfig::default();
        let pi = std::f64::consts::PI;
        match self {
            Preset::Ex1Kite => ExperimentConfig { shape: ShapePreset::Kite, ..base },
            Preset::Ex1Peanut => ExperimentConfig { shape: ShapePreset::Peanut, ..base },
            Preset::Ex2Close => {
                ExperimentConfig { shape: ShapePreset::ClosePair, k: 4.0 * pi, delta: 0.2, ..base }
            }
            Preset::Ex2Multiscale => {
                ExperimentConfig { shape: ShapePreset::Multiscale, k: 8.0 * pi, delta: 0.2, ..base }
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Ex1Kite => "ex1-kite",
            Preset::Ex1Peanut => "ex1-peanut",
            Preset::Ex2Close => "ex2-close",
            Preset::Ex2Multiscale => "ex2-multiscale",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.to_string() == s.trim())
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown preset '{s}' (expected ex1-kite, ex1-peanut, ex2-close or ex2-multiscale)"
                ))
            })
    }
}

/// Everything produced by one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub obstacle: Obstacle,
    /// Possibly noisy passive record.
    pub record: PassiveRecord,
    pub correlation: CorrelationMatrix,
    pub reference: CorrelationMatrix,
    pub image: ImageGrid,
    pub reference_image: ImageGrid,
    pub metrics: RunMetrics,
}

struct Clock {
    start: Instant,
    laps: Vec<(String, std::time::Duration)>,
}

impl Clock {
    fn new() -> Self {
        Self { start: Instant::now(), laps: Vec::new() }
    }

    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        let d = now - self.start;
        info!("{name}: {:.3} s", d.as_secs_f64());
        self.laps.push((name.to_string(), d));
        self.start = now;
    }
}

fn build(cfg: &ExperimentConfig) -> Result<(Obstacle, BiesSystem)> {
    cfg.validate()?;
    let obstacle = cfg.shape.obstacle(cfg.bie_nodes)?;
    let system = BiesSystem::assemble(&obstacle, cfg.context()?, cfg.representation())?;
    Ok((obstacle, system))
}

fn synthesize_with(cfg: &ExperimentConfig, system: &BiesSystem) -> Result<PassiveRecord> {
    let receivers = receiver_array(cfg.big_j, cfg.r_b)?;
    let sources = source_array(cfg.big_l, cfg.r_sigma, cfg.xi, source_seed(cfg.seed))?;
    let clean = synth_record_with(system, &sources, &receivers)?;
    apply_noise(&clean, cfg.delta, noise_seed(cfg.seed))
}

/// The (possibly noisy) passive record described by `cfg`.
pub fn synthesize(cfg: &ExperimentConfig) -> Result<PassiveRecord> {
    let (_, system) = build(cfg)?;
    synthesize_with(cfg, &system)
}

/// Rebuild a record from its data matrix; the arrays come from `cfg`.
pub fn record_from_data(cfg: &ExperimentConfig, data: CMatrix) -> Result<PassiveRecord> {
    cfg.validate()?;
    let receivers = receiver_array(cfg.big_j, cfg.r_b)?;
    let sources = source_array(cfg.big_l, cfg.r_sigma, cfg.xi, source_seed(cfg.seed))?;
    PassiveRecord::from_parts(data, receivers, sources, cfg.context()?)
}

/// Synthesize, correlate and image according to `cfg`. Nothing is written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut clock = Clock::new();
    let (obstacle, system) = build(cfg)?;
    clock.lap("assemble");
    let record = synthesize_with(cfg, &system)?;
    clock.lap("synthesize");
    analyze(cfg, obstacle, &system, record, clock)
}

/// Correlate and image an existing record, e.g. one read back from disk.
pub fn image_record(cfg: &ExperimentConfig, record: PassiveRecord) -> Result<RunOutput> {
    let mut clock = Clock::new();
    let (obstacle, system) = build(cfg)?;
    clock.lap("assemble");
    if record.receivers().len() != cfg.big_j || record.sources().len() != cfg.big_l {
        return Err(Error::Usage(format!(
            "record has {} receivers and {} sources, config says {} and {}",
            record.receivers().len(),
            record.sources().len(),
            cfg.big_j,
            cfg.big_l
        )));
    }
    analyze(cfg, obstacle, &system, record, clock)
}

fn analyze(
    cfg: &ExperimentConfig,
    obstacle: Obstacle,
    system: &BiesSystem,
    record: PassiveRecord,
    mut clock: Clock,
) -> Result<RunOutput> {
    let ctx = cfg.context()?;
    let receivers = record.receivers().clone();
    let cal = calibration(&receivers, ctx);
    let correlation = cross_correlation(&record, &cal)?;
    let reference = reference_correlation(&active_scatter_matrix(system, &receivers)?, &receivers, ctx)?;
    let corr_err = correlation_error(&correlation, &reference)?;
    clock.lap("correlate");

    let grid = sampling_grid(cfg.grid_bounds, cfg.grid_nx, cfg.grid_ny)?;
    let image = dcm_indicator_within(&correlation, &grid, cfg.image_radius())?;
    clock.lap("image");
    let reference_image = dcm_indicator_within(&reference, &grid, cfg.image_radius())?;
    clock.lap("reference image");

    let metrics = RunMetrics {
        correlation_error: corr_err,
        localization_error: localization_error(&image, &obstacle, cfg.threshold)?,
        peak_value: image.max(),
        peak_position: image.argmax(),
        reference_localization_error: localization_error(&reference_image, &obstacle, cfg.threshold)?,
        timings: clock.laps,
    };
    if !metrics.all_finite() {
        return Err(Error::NumericalFailure("run produced non-finite metrics".into()));
    }
    Ok(RunOutput { config: cfg.clone(), obstacle, record, correlation, reference, image, reference_image, metrics })
}

/// File names written by [`write_outputs`].
pub const ARTIFACTS: &[&str] = &[
    "config.txt",
    "record_re.csv",
    "record_im.csv",
    "correlation_re.csv",
    "correlation_im.csv",
    "reference_re.csv",
    "reference_im.csv",
    "indicator.csv",
    "indicator.pgm",
    "indicator_reference.csv",
    "indicator_reference.pgm",
    "metrics.csv",
];

pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<()> {
    let f = |name: &str| dir.join(name);
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    std::fs::write(f("config.txt"), out.config.to_text()).map_err(|e| Error::io(f("config.txt"), e))?;
    write_matrix_csv(out.record.data(), &f("record_re.csv"), &f("record_im.csv"))?;
    write_matrix_csv(out.correlation.data(), &f("correlation_re.csv"), &f("correlation_im.csv"))?;
    write_matrix_csv(out.reference.data(), &f("reference_re.csv"), &f("reference_im.csv"))?;
    write_grid_csv(&out.image, &f("indicator.csv"))?;
    write_grid_pgm(&out.image, &f("indicator.pgm"))?;
    write_grid_csv(&out.reference_image, &f("indicator_reference.csv"))?;
    write_grid_pgm(&out.reference_image, &f("indicator_reference.pgm"))?;
    std::fs::write(f("metrics.csv"), out.metrics.to_csv()).map_err(|e| Error::io(f("metrics.csv"), e))
}

/// Preset configuration with `key = value` overrides applied.
pub fn preset_config(preset: Preset, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut cfg = preset.config();
    for (k, v) in overrides {
        cfg.set(k, v)?;
    }
    parse_config_onto(cfg, "")
}

/// Run a named experiment and write its artifacts to `out_dir/<preset>`.
pub fn run_preset(name: &str, overrides: &[(String, String)]) -> Result<RunOutput> {
    let preset: Preset = name.parse()?;
    let cfg = preset_config(preset, overrides)?;
    let out = run_experiment(&cfg)?;
    write_outputs(&out, &cfg.out_dir.join(preset.to_string()))?;
    Ok(out)
}
