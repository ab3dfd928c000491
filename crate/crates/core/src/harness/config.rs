//! `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::forward::Representation;
use crate::geometry::{
    make_close_pair, make_disk, make_kite, make_multiscale, make_peanut, make_pear, Obstacle,
};
use crate::specfun::{Point2, WaveContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapePreset {
    Kite,
    Peanut,
    Pear,
    /// Unit disk at the origin.
    Disk,
    ClosePair,
    Multiscale,
}

impl ShapePreset {
    pub const ALL: [ShapePreset; 6] = [
        ShapePreset::Kite,
        ShapePreset::Peanut,
        ShapePreset::Pear,
        ShapePreset::Disk,
        ShapePreset::ClosePair,
        ShapePreset::Multiscale,
    ];

    /// Obstacle with `nodes` quadrature nodes per component.
    pub fn obstacle(self, nodes: usize) -> Result<Obstacle> {
        Ok(match self {
            ShapePreset::Kite => Obstacle::single(make_kite(nodes)?),
            ShapePreset::Peanut => Obstacle::single(make_peanut(nodes)?),
            ShapePreset::Pear => Obstacle::single(make_pear(nodes)?),
            ShapePreset::Disk => Obstacle::single(make_disk(Point2::default(), 1.0, nodes)?),
            ShapePreset::ClosePair => make_close_pair(nodes)?,
            ShapePreset::Multiscale => make_multiscale(nodes)?,
        })
    }
}

impl fmt::Display for ShapePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapePreset::Kite => "kite",
            ShapePreset::Peanut => "peanut",
            ShapePreset::Pear => "pear",
            ShapePreset::Disk => "disk",
            ShapePreset::ClosePair => "close-pair",
            ShapePreset::Multiscale => "multiscale",
        })
    }
}

impl FromStr for ShapePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        ShapePreset::ALL
            .into_iter()
            .find(|p| p.to_string() == norm)
            .ok_or_else(|| Error::Usage(format!("shape: unknown preset '{s}'")))
    }
}

/// Coupling of the single layer in the boundary representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// `η = k`
    Wavenumber,
    Fixed(f64),
    /// Bare double layer.
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub shape: ShapePreset,
    pub k: f64,
    /// Number of sources `L`.
    pub big_l: usize,
    /// Number of receivers `J`.
    pub big_j: usize,
    pub xi: f64,
    pub delta: f64,
    pub seed: u64,
    pub r_sigma: f64,
    pub r_b: f64,
    /// `[x_min, x_max, y_min, y_max]`
    pub grid_bounds: [f64; 4],
    pub grid_nx: usize,
    pub grid_ny: usize,
    /// Quadrature nodes `2n` per boundary component.
    pub bie_nodes: usize,
    pub eta: Coupling,
    pub out_dir: PathBuf,
    /// Level-set fraction for localization metrics.
    pub threshold: f64,
    /// Grid points within this distance of the receiver circle (or outside
    /// it) are not imaged.
    pub mask_margin: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            shape: ShapePreset::Kite,
            k: 2.0 * std::f64::consts::PI,
            big_l: 256,
            big_j: 256,
            xi: 0.4,
            delta: 0.0,
            seed: 1,
            r_sigma: 100.0,
            r_b: 5.0,
            grid_bounds: [-5.0, 5.0, -5.0, 5.0],
            grid_nx: 200,
            grid_ny: 200,
            bie_nodes: 512,
            eta: Coupling::Wavenumber,
            out_dir: PathBuf::from("out"),
            threshold: 0.8,
            mask_margin: 0.5,
        }
    }
}

/// Recognized keys, hyphens and underscores interchangeable.
pub const KEYS: &[&str] = &[
    "shape", "k", "big_l", "big_j", "xi", "delta", "seed", "r_sigma", "r_b", "grid_n", "grid_nx",
    "grid_ny", "x_min", "x_max", "y_min", "y_max", "bie_nodes", "eta", "out_dir", "threshold",
    "mask_margin",
];

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Usage(format!("{key}: cannot parse '{value}' as a number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Usage(format!("{key}: cannot parse '{value}' as a non-negative integer")))
}

/// A number, or a multiple of π written `4pi`, `4π`, `pi`.
fn parse_wavenumber(key: &str, value: &str) -> Result<f64> {
    let v = value.trim().to_ascii_lowercase();
    let stripped = v.strip_suffix("pi").or_else(|| v.strip_suffix('π'));
    match stripped {
        Some(factor) => {
            let f = factor.trim().trim_end_matches('*');
            let f = if f.is_empty() { 1.0 } else { parse_f64(key, f)? };
            Ok(f * std::f64::consts::PI)
        }
        None => parse_f64(key, &v),
    }
}

impl ExperimentConfig {
    /// Apply one `key = value` setting without validating the whole config.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let k = key.as_str();
        match k {
            "shape" => self.shape = value.parse()?,
            "k" => self.k = parse_wavenumber(k, value)?,
            "big_l" => self.big_l = parse_usize(k, value)?,
            "big_j" => self.big_j = parse_usize(k, value)?,
            "xi" => self.xi = parse_f64(k, value)?,
            "delta" => self.delta = parse_f64(k, value)?,
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Usage(format!("seed: cannot parse '{value}'")))?
            }
            "r_sigma" => self.r_sigma = parse_f64(k, value)?,
            "r_b" => self.r_b = parse_f64(k, value)?,
            "grid_n" => {
                let n = parse_usize(k, value)?;
                self.grid_nx = n;
                self.grid_ny = n;
            }
            "grid_nx" => self.grid_nx = parse_usize(k, value)?,
            "grid_ny" => self.grid_ny = parse_usize(k, value)?,
            "x_min" => self.grid_bounds[0] = parse_f64(k, value)?,
            "x_max" => self.grid_bounds[1] = parse_f64(k, value)?,
            "y_min" => self.grid_bounds[2] = parse_f64(k, value)?,
            "y_max" => self.grid_bounds[3] = parse_f64(k, value)?,
            "bie_nodes" => self.bie_nodes = parse_usize(k, value)?,
            "eta" => {
                self.eta = match value.trim().to_ascii_lowercase().as_str() {
                    "k" => Coupling::Wavenumber,
                    "none" | "0" | "double-layer" => Coupling::None,
                    _ => Coupling::Fixed(parse_wavenumber(k, value)?),
                }
            }
            "out_dir" => {
                let v = value.trim();
                if v.is_empty() {
                    return Err(Error::Usage("out_dir: empty path".into()));
                }
                self.out_dir = PathBuf::from(v);
            }
            "threshold" => self.threshold = parse_f64(k, value)?,
            "mask_margin" => self.mask_margin = parse_f64(k, value)?,
            _ => return Err(Error::Usage(format!("unknown configuration key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: String| Err(Error::Usage(format!("{key}: {why}")));
        if !(self.k.is_finite() && self.k > 0.0) {
            return bad("k", format!("must be positive, got {}", self.k));
        }
        if self.big_l < 2 {
            return bad("big_l", format!("need at least 2 sources, got {}", self.big_l));
        }
        if self.big_j < 2 {
            return bad("big_j", format!("need at least 2 receivers, got {}", self.big_j));
        }
        if !(self.xi.is_finite() && self.xi >= 0.0) {
            return bad("xi", format!("must be >= 0, got {}", self.xi));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return bad("delta", format!("must be >= 0, got {}", self.delta));
        }
        if !(self.r_b.is_finite() && self.r_b > 0.0) {
            return bad("r_b", format!("must be positive, got {}", self.r_b));
        }
        if !(self.r_sigma.is_finite() && self.r_sigma > self.r_b) {
            return bad("r_sigma", format!("must exceed r_b = {}, got {}", self.r_b, self.r_sigma));
        }
        let [x0, x1, y0, y1] = self.grid_bounds;
        if !(x0.is_finite() && x1.is_finite() && x0 < x1) {
            return bad("x_min", format!("need x_min < x_max, got [{x0}, {x1}]"));
        }
        if !(y0.is_finite() && y1.is_finite() && y0 < y1) {
            return bad("y_min", format!("need y_min < y_max, got [{y0}, {y1}]"));
        }
        if self.grid_nx < 2 || self.grid_ny < 2 {
            return bad("grid_n", format!("need at least 2x2 points, got {}x{}", self.grid_nx, self.grid_ny));
        }
        if self.bie_nodes < 32 || self.bie_nodes % 2 != 0 {
            return bad("bie_nodes", format!("must be even and >= 32, got {}", self.bie_nodes));
        }
        if let Coupling::Fixed(eta) = self.eta {
            if !(eta.is_finite() && eta != 0.0) {
                return bad("eta", format!("must be finite and nonzero, got {eta}"));
            }
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad("threshold", format!("must lie in (0, 1), got {}", self.threshold));
        }
        if !(self.mask_margin > 0.0 && self.mask_margin < self.r_b) {
            return bad("mask_margin", format!("must lie in (0, r_b), got {}", self.mask_margin));
        }
        Ok(())
    }

    pub fn context(&self) -> Result<WaveContext> {
        WaveContext::new(self.k)
    }

    pub fn representation(&self) -> Representation {
        match self.eta {
            Coupling::Wavenumber => Representation::CombinedField { eta: self.k },
            Coupling::Fixed(eta) => Representation::CombinedField { eta },
            Coupling::None => Representation::DoubleLayer,
        }
    }

    /// Radius inside which the indicator is evaluated.
    pub fn image_radius(&self) -> f64 {
        self.r_b - self.mask_margin
    }

    /// Canonical text form; `parse_config` reads it back to an equal config.
    pub fn to_text(&self) -> String {
        let eta = match self.eta {
            Coupling::Wavenumber => "k".to_string(),
            Coupling::Fixed(e) => format!("{e:?}"),
            Coupling::None => "none".to_string(),
        };
        let [x0, x1, y0, y1] = self.grid_bounds;
        format!(
            "shape = {}\nk = {:?}\nbig_l = {}\nbig_j = {}\nxi = {:?}\ndelta = {:?}\nseed = {}\n\
             r_sigma = {:?}\nr_b = {:?}\nx_min = {x0:?}\nx_max = {x1:?}\ny_min = {y0:?}\ny_max = {y1:?}\n\
             grid_nx = {}\ngrid_ny = {}\nbie_nodes = {}\neta = {eta}\nout_dir = {}\nthreshold = {:?}\n\
             mask_margin = {:?}\n",
            self.shape,
            self.k,
            self.big_l,
            self.big_j,
            self.xi,
            self.delta,
            self.seed,
            self.r_sigma,
            self.r_b,
            self.grid_nx,
            self.grid_ny,
            self.bie_nodes,
            self.out_dir.display(),
            self.threshold,
            self.mask_margin,
        )
    }
}

/// Split `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("line {}: expected 'key = value'", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Apply `text` on top of `base` and validate.
pub fn parse_config_onto(base: ExperimentConfig, text: &str) -> Result<ExperimentConfig> {
    let mut cfg = base;
    for (k, v) in parse_pairs(text)? {
        cfg.set(&k, &v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parse a configuration file body; unset keys keep the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_onto(ExperimentConfig::default(), text)
}
