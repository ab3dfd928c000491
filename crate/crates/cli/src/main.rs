//! `dcm`: synthesize passive records, image them, run the named experiments.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use dcm_core::forward::{active_scatter_matrix, disk_series_oracle, BiesSystem};
use dcm_core::geometry::{make_disk, receiver_array, source_array, Obstacle};
use dcm_core::harness::{
    image_record, parse_config_onto, read_matrix_csv, record_from_data, run_experiment, sweep,
    synthesize, write_matrix_csv, write_outputs, ExperimentConfig, Preset, RunOutput,
};
use dcm_core::imaging::{cross_correlation, hk_residual, reference_correlation, HkMode};
use dcm_core::passive::calibration;
use dcm_core::specfun::Point2;
use dcm_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "dcm", version, about = "Passive obstacle imaging by double cross-correlation")]
struct Cli {
    /// Log progress and stage timings to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the passive record for a configuration.
    Synth(Params),
    /// Correlate and image a record written by `synth`.
    Image {
        /// Directory holding config.txt and record_{re,im}.csv.
        #[arg(long)]
        from: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Check the solver and the correlation identities for a configuration.
    Verify(Params),
    /// Run a named experiment: ex1-kite, ex1-peanut, ex2-close, ex2-multiscale.
    Experiment {
        preset: String,
        #[command(flatten)]
        params: Params,
    },
    /// Run one experiment per value of a parameter.
    Sweep {
        /// Parameter to vary, e.g. big-l, k, delta.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Start from a named experiment instead of the defaults.
        #[arg(long)]
        preset: Option<String>,
        #[command(flatten)]
        params: Params,
    },
}

/// Configuration overrides. Values are parsed exactly like config-file values.
#[derive(Args, Debug, Default)]
struct Params {
    /// `key = value` file applied before the flags below.
    #[arg(allow_hyphen_values = true, long)]
    config: Option<PathBuf>,
    /// kite, peanut, pear, disk, close-pair or multiscale.
    #[arg(allow_hyphen_values = true, long)]
    shape: Option<String>,
    /// Wavenumber; accepts multiples of pi such as `4pi`.
    #[arg(allow_hyphen_values = true, long)]
    k: Option<String>,
    /// Number of sources.
    #[arg(allow_hyphen_values = true, long = "big-l")]
    big_l: Option<String>,
    /// Number of receivers.
    #[arg(allow_hyphen_values = true, long = "big-j")]
    big_j: Option<String>,
    #[arg(allow_hyphen_values = true, long)]
    xi: Option<String>,
    /// Relative noise level.
    #[arg(allow_hyphen_values = true, long)]
    delta: Option<String>,
    #[arg(allow_hyphen_values = true, long)]
    seed: Option<String>,
    /// Sampling points per grid side.
    #[arg(allow_hyphen_values = true, long = "grid-n")]
    grid_n: Option<String>,
    /// Receiver circle radius.
    #[arg(allow_hyphen_values = true, long = "r-b")]
    r_b: Option<String>,
    /// Source circle radius.
    #[arg(allow_hyphen_values = true, long = "r-sigma")]
    r_sigma: Option<String>,
    /// Quadrature nodes per boundary component.
    #[arg(allow_hyphen_values = true, long = "bie-nodes")]
    bie_nodes: Option<String>,
    /// Single-layer coupling: `k`, a number, or `none` for the bare double layer.
    #[arg(allow_hyphen_values = true, long)]
    eta: Option<String>,
    /// Output root.
    #[arg(allow_hyphen_values = true, long = "out-dir", env = "DCM_OUT_DIR")]
    out_dir: Option<String>,
}

impl Params {
    fn pairs(&self) -> Vec<(String, String)> {
        [
            ("shape", &self.shape),
            ("k", &self.k),
            ("big_l", &self.big_l),
            ("big_j", &self.big_j),
            ("xi", &self.xi),
            ("delta", &self.delta),
            ("seed", &self.seed),
            ("grid_n", &self.grid_n),
            ("r_b", &self.r_b),
            ("r_sigma", &self.r_sigma),
            ("bie_nodes", &self.bie_nodes),
            ("eta", &self.eta),
            ("out_dir", &self.out_dir),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }

    /// `base`, then the config file, then the flags.
    fn apply(&self, base: ExperimentConfig) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => parse_config_onto(base, &read_text(path)?)?,
            None => base,
        };
        for (k, v) in self.pairs() {
            cfg.set(&k, &v)?;
        }
        parse_config_onto(cfg, "")
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

fn print_metrics(out: &RunOutput, dir: &Path) {
    let m = &out.metrics;
    println!("wrote {}", dir.display());
    println!("correlation_error            {:.6e}", m.correlation_error);
    println!("localization_error           {:.6e}", m.localization_error);
    println!("reference_localization_error {:.6e}", m.reference_localization_error);
    println!("peak                         {:.6e} at ({:.4}, {:.4})", m.peak_value, m.peak_position.x, m.peak_position.y);
    for (stage, d) in &m.timings {
        info!("{stage}: {:.3} s", d.as_secs_f64());
    }
}

fn cmd_synth(params: &Params) -> Result<()> {
    let cfg = params.apply(ExperimentConfig::default())?;
    let rec = synthesize(&cfg)?;
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
    let path = dir.join("config.txt");
    std::fs::write(&path, cfg.to_text()).map_err(|e| Error::Io { path, source: e })?;
    write_matrix_csv(rec.data(), &dir.join("record_re.csv"), &dir.join("record_im.csv"))?;
    println!("wrote {}x{} record to {}", rec.data().nrows(), rec.data().ncols(), dir.display());
    Ok(())
}

fn cmd_image(from: &Path, params: &Params) -> Result<()> {
    let stored = parse_config_onto(ExperimentConfig::default(), &read_text(&from.join("config.txt"))?)?;
    // results go next to the record unless an output root is given
    let base = ExperimentConfig { out_dir: from.to_path_buf(), ..stored };
    let cfg = params.apply(base)?;
    let data = read_matrix_csv(&from.join("record_re.csv"), &from.join("record_im.csv"))?;
    let out = image_record(&cfg, record_from_data(&cfg, data)?)?;
    write_outputs(&out, &cfg.out_dir)?;
    print_metrics(&out, &cfg.out_dir);
    Ok(())
}

fn cmd_experiment(name: &str, params: &Params) -> Result<()> {
    let preset: Preset = name.parse()?;
    let cfg = params.apply(preset.config())?;
    let out = run_experiment(&cfg)?;
    let dir = cfg.out_dir.join(preset.to_string());
    write_outputs(&out, &dir)?;
    print_metrics(&out, &dir);
    Ok(())
}

fn cmd_sweep(param: &str, values: &[String], preset: Option<&str>, params: &Params) -> Result<()> {
    let base = match preset {
        Some(name) => name.parse::<Preset>()?.config(),
        None => ExperimentConfig::default(),
    };
    let cfg = params.apply(base)?;
    let dir = cfg.out_dir.join(format!("sweep-{}", param.replace('-', "_")));
    let table = sweep(&cfg, param, values, Some(&dir))?;
    print!("{}", table.to_csv());
    println!("wrote {}", dir.display());
    Ok(())
}

struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn verify_checks(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let ctx = cfg.context()?;
    let repr = cfg.representation();
    let far = Point2::new(cfg.r_sigma, 0.0);
    let receivers = receiver_array(cfg.big_j.min(64), cfg.r_b)?;
    let mut checks = Vec::new();

    let disk = Obstacle::single(make_disk(Point2::default(), 1.0, cfg.bie_nodes)?);
    let sys = BiesSystem::assemble(&disk, ctx, repr)?;
    let bie = sys.solve_point_source(far)?.eval_scattered(receivers.points())?;
    let series = disk_series_oracle(Point2::default(), 1.0, ctx, far, receivers.points(), 400)?;
    let scale = series.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let err = bie.iter().zip(&series).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    checks.push(Check { name: "disk series", ok: err < 1e-8, detail: format!("max rel error {err:.2e} (< 1e-8)") });

    let obstacle = cfg.shape.obstacle(cfg.bie_nodes)?;
    let sys = BiesSystem::assemble(&obstacle, ctx, repr)?;
    let res = sys.solve_point_source(far)?.boundary_residual(1024)?;
    checks.push(Check {
        name: "boundary condition",
        ok: res < 1e-8,
        detail: format!("{} boundary residual {res:.2e} (< 1e-8)", cfg.shape),
    });

    let active = active_scatter_matrix(&sys, &receivers)?;
    let n = receivers.len();
    let asym = (0..n)
        .flat_map(|j| (0..n).map(move |m| (j, m)))
        .map(|(j, m)| (active[(j, m)] - active[(m, j)]).norm())
        .fold(0.0, f64::max)
        / active.iter().map(|v| v.norm()).fold(0.0, f64::max);
    checks.push(Check { name: "reciprocity", ok: asym < 1e-8, detail: format!("active asymmetry {asym:.2e} (< 1e-8)") });

    let (x, y) = (receivers.points()[0], receivers.points()[n / 3]);
    let hk: Vec<f64> = [1.0, 3.0]
        .iter()
        .map(|s| {
            let src = source_array(4096, s * cfg.r_sigma, 0.0, 1)?;
            Ok(hk_residual(x, y, &src, ctx, HkMode::Incident)?.value)
        })
        .collect::<Result<_>>()?;
    checks.push(Check {
        name: "Helmholtz-Kirchhoff",
        ok: hk[1] < hk[0],
        detail: format!("residual {:.2e} at R, {:.2e} at 3R (decreasing)", hk[0], hk[1]),
    });

    let small = ExperimentConfig { big_l: cfg.big_l.min(64), big_j: n, ..cfg.clone() };
    let rec = synthesize(&small)?;
    let c = cross_correlation(&rec, &calibration(rec.receivers(), ctx))?;
    let ns = reference_correlation(&active, &receivers, ctx)?;
    let (ce, ne) = (c.skew_hermitian_error(), ns.skew_hermitian_error());
    checks.push(Check {
        name: "skew-Hermitian",
        ok: ce == 0.0 && ne < 1e-8,
        detail: format!("C error {ce:.1e} (exact), N^s error {ne:.2e} (< 1e-8)"),
    });
    Ok(checks)
}

fn cmd_verify(params: &Params) -> Result<()> {
    let cfg = params.apply(ExperimentConfig::default())?;
    let checks = verify_checks(&cfg)?;
    for c in &checks {
        println!("{} {}: {}", if c.ok { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.ok).count();
    if failed > 0 {
        return Err(Error::NumericalFailure(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Error::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    }
    match &cli.command {
        Command::Synth(p) => cmd_synth(p),
        Command::Image { from, params } => cmd_image(from, params),
        Command::Verify(p) => cmd_verify(p),
        Command::Experiment { preset, params } => cmd_experiment(preset, params),
        Command::Sweep { param, values, preset, params } => cmd_sweep(param, values, preset.as_deref(), params),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dcm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
