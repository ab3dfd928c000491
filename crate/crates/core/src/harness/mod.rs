//! Configuration, named experiments, file formats and run metrics.

pub mod config;
pub mod io;
pub mod metrics;
pub mod presets;
pub mod sweep;

pub use config::{parse_config, parse_config_onto, Coupling, ExperimentConfig, ShapePreset};
pub use io::{
    read_grid_csv, read_grid_pgm, read_matrix_csv, write_grid_csv, write_grid_pgm, write_matrix_csv,
};
pub use metrics::{localization_error, RunMetrics};
pub use presets::{
    image_record, noise_seed, preset_config, record_from_data, run_experiment, run_preset,
    source_seed, synthesize, write_outputs, Preset, RunOutput, ARTIFACTS,
};
pub use sweep::{run_seed, sweep, SweepRow, SweepTable};
