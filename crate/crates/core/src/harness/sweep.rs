//! One-parameter studies.

use std::path::Path;

use super::config::{ExperimentConfig, KEYS};
use super::metrics::RunMetrics;
use super::presets::{run_experiment, write_outputs};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// FNV-1a, used to turn a parameter value into a seed label.
fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed of the run with `param = value` in a sweep with master seed `master`.
/// Sweeping `seed` itself uses the value directly.
pub fn run_seed(master: u64, param: &str, value: &str) -> Result<u64> {
    if normalize(param) == "seed" {
        return value
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("seed: cannot parse '{value}'")));
    }
    Ok(derive_seed(master, fnv1a(value.trim())))
}

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: String,
    pub seed: u64,
    pub metrics: RunMetrics,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub param: String,
    pub master_seed: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# sweep over {}; master seed {}; per-run seed = splitmix64(master ^ splitmix64(fnv1a(value)))\n",
            self.param, self.master_seed
        );
        s.push_str("value,seed,correlation_error,localization_error,peak_value,reference_localization_error\n");
        for r in &self.rows {
            let m = &r.metrics;
            s.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.value,
                r.seed,
                m.correlation_error,
                m.localization_error,
                m.peak_value,
                m.reference_localization_error
            ));
        }
        s
    }
}

/// Run `base` once per value of `param`. When `out_dir` is given each run
/// writes its artifacts to `<out_dir>/<param>=<value>/` and the table goes
/// to `<out_dir>/sweep.csv`.
pub fn sweep(base: &ExperimentConfig, param: &str, values: &[String], out_dir: Option<&Path>) -> Result<SweepTable> {
    let key = normalize(param);
    if !KEYS.contains(&key.as_str()) || key == "out_dir" {
        return Err(Error::Usage(format!("cannot sweep over unknown parameter '{param}'")));
    }
    if values.is_empty() {
        return Err(Error::Usage("sweep needs at least one value".into()));
    }
    let mut rows = Vec::with_capacity(values.len());
    for value in values {
        let mut cfg = base.clone();
        cfg.set(&key, value)?;
        cfg.seed = run_seed(base.seed, &key, value)?;
        cfg.validate()?;
        log::info!("sweep {key} = {value} (seed {})", cfg.seed);
        let out = run_experiment(&cfg)?;
        if let Some(dir) = out_dir {
            write_outputs(&out, &dir.join(format!("{key}={}", value.trim())))?;
        }
        rows.push(SweepRow { value: value.trim().to_string(), seed: cfg.seed, metrics: out.metrics });
    }
    let table = SweepTable { param: key, master_seed: base.seed, rows };
    if let Some(dir) = out_dir {
        let p = dir.join("sweep.csv");
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        std::fs::write(&p, table.to_csv()).map_err(|e| Error::io(p, e))?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_on_value_and_master() {
        let a = run_seed(1, "delta", "0.2").unwrap();
        assert_eq!(a, run_seed(1, "delta", " 0.2 ").unwrap());
        assert_ne!(a, run_seed(1, "delta", "0.4").unwrap());
        assert_ne!(a, run_seed(2, "delta", "0.2").unwrap());
        assert_eq!(run_seed(1, "seed", "17").unwrap(), 17);
    }

    #[test]
    fn rejects_unknown_parameter() {
        let cfg = ExperimentConfig::default();
        assert!(matches!(sweep(&cfg, "colour", &["1".into()], None), Err(Error::Usage(_))));
        assert!(matches!(sweep(&cfg, "delta", &[], None), Err(Error::Usage(_))));
    }

    #[test]
    fn small_sweep_table() {
        let cfg = ExperimentConfig {
            big_l: 24,
            big_j: 24,
            grid_nx: 8,
            grid_ny: 8,
            bie_nodes: 64,
            ..ExperimentConfig::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let t = sweep(&cfg, "delta", &["0".into(), "0.2".into()], Some(dir.path())).unwrap();
        assert_eq!(t.rows.len(), 2);
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert!(text.starts_with("# sweep over delta; master seed 1"));
        assert_eq!(text.lines().count(), 4);
        assert!(dir.path().join("delta=0.2").join("metrics.csv").exists());
    }
}
