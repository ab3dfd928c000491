//! Cross-correlation imaging.
//!
//! The passive record is first correlated over sources,
//!
//! ```text
//! C_jm = (2ik|Σ|/L) Σ_l conj(u(x_j,z_l)) u(x_m,z_l) − 2i Im φ(x_j,x_m),
//! ```
//!
//! which approximates `N^s_jm = 2i Im u^s(x_j,x_m)` by the Helmholtz–Kirchhoff
//! identity without knowing where the sources were. The conjugated matrix is
//! then back-propagated from the receivers and correlated with `φ(τ, x_m)`:
//!
//! ```text
//! I(τ) = −k² Im{ w² Σ_m Σ_j φ(τ,x_m) φ(τ,x_j) conj(C_jm) },   w = 2π r_B / J.
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::BiesSystem;
use crate::geometry::{ReceiverArray, SamplingGrid, SourceArray};
use crate::passive::{CalibrationMatrix, PassiveRecord};
use crate::specfun::{green_imag, green_raw, Point2, WaveContext};
use crate::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    /// Built from passive data.
    PassiveC,
    /// `2i Im u^s` from an active simulation.
    ReferenceNs,
}

#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    data: CMatrix,
    kind: CorrelationKind,
    receivers: ReceiverArray,
    ctx: WaveContext,
}

impl CorrelationMatrix {
    /// Wrap an arbitrary square matrix.
    pub fn from_parts(
        data: CMatrix,
        kind: CorrelationKind,
        receivers: ReceiverArray,
        ctx: WaveContext,
    ) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() != receivers.len() {
            return Err(Error::Usage(format!(
                "correlation matrix is {}x{} for {} receivers",
                data.nrows(),
                data.ncols(),
                receivers.len()
            )));
        }
        Ok(Self { data, kind, receivers, ctx })
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn kind(&self) -> CorrelationKind {
        self.kind
    }

    pub fn receivers(&self) -> &ReceiverArray {
        &self.receivers
    }

    pub fn context(&self) -> WaveContext {
        self.ctx
    }

    pub fn transpose(&self) -> Self {
        Self { data: self.data.transpose(), ..self.clone() }
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint(), ..self.clone() }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { data: &self.data * s, ..self.clone() }
    }

    /// `max |C_mj + conj(C_jm)| / max |C|`.
    pub fn skew_hermitian_error(&self) -> f64 {
        let n = self.data.nrows();
        let mut worst = 0.0f64;
        for j in 0..n {
            for m in 0..n {
                worst = worst.max((self.data[(m, j)] + self.data[(j, m)].conj()).norm());
            }
        }
        worst / max_abs(&self.data).max(f64::MIN_POSITIVE)
    }

    /// `max |Re| / max |Im|`.
    pub fn real_part_ratio(&self) -> f64 {
        let re = self.data.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
        let im = self.data.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        re / im.max(f64::MIN_POSITIVE)
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Correlate a passive record over its sources. Only the upper triangle is
/// computed; the lower one is mirrored so the result is skew-Hermitian
/// bit for bit.
pub fn cross_correlation(rec: &PassiveRecord, cal: &CalibrationMatrix) -> Result<CorrelationMatrix> {
    let j_count = rec.receivers().len();
    if cal.data().nrows() != j_count || cal.receivers() != rec.receivers() {
        return Err(Error::Usage("record and calibration use different receivers".into()));
    }
    if cal.context().k() != rec.context().k() {
        return Err(Error::Usage("record and calibration use different wavenumbers".into()));
    }
    let k = rec.context().k();
    let coef = 2.0 * k * rec.sources().measure() / rec.sources().len() as f64;
    let u = rec.data();
    let rows: Vec<Vec<Complex64>> = (0..j_count)
        .into_par_iter()
        .map(|j| {
            let mut row = Vec::with_capacity(j_count - j);
            let power: f64 = u.row(j).iter().map(|v| v.norm_sqr()).sum();
            row.push(Complex64::new(0.0, coef * power - 2.0 * cal.data()[(j, j)]));
            for m in j + 1..j_count {
                let mut s = Complex64::new(0.0, 0.0);
                for (a, b) in u.row(j).iter().zip(u.row(m).iter()) {
                    s += a.conj() * b;
                }
                row.push(Complex64::new(0.0, coef) * s - Complex64::new(0.0, 2.0 * cal.data()[(j, m)]));
            }
            row
        })
        .collect();
    let mut data = CMatrix::zeros(j_count, j_count);
    for (j, row) in rows.into_iter().enumerate() {
        for (o, v) in row.into_iter().enumerate() {
            data[(j, j + o)] = v;
            data[(j + o, j)] = -v.conj();
        }
    }
    CorrelationMatrix::from_parts(data, CorrelationKind::PassiveC, rec.receivers().clone(), rec.context())
}

/// `N^s = u^s − conj(u^s)` from the active scattered matrix `u^s(x_j, x_m)`.
pub fn reference_correlation(
    active: &CMatrix,
    receivers: &ReceiverArray,
    ctx: WaveContext,
) -> Result<CorrelationMatrix> {
    let data = active.map(|v| Complex64::new(0.0, 2.0 * v.im));
    CorrelationMatrix::from_parts(data, CorrelationKind::ReferenceNs, receivers.clone(), ctx)
}

/// `‖C − N^s‖_max / ‖N^s‖_max`.
pub fn correlation_error(c: &CorrelationMatrix, ns: &CorrelationMatrix) -> Result<f64> {
    if c.data.shape() != ns.data.shape() {
        return Err(Error::Usage("correlation matrices differ in size".into()));
    }
    let den = max_abs(&ns.data);
    if den == 0.0 {
        return Err(Error::Domain("reference correlation is identically zero".into()));
    }
    Ok(max_abs(&(&c.data - &ns.data)) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageKind {
    Dcm,
    DcmFromNs,
    Rtm,
}

/// Real indicator values on a sampling grid, row-major with row 0 at `y_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    grid: SamplingGrid,
    values: Vec<f64>,
    kind: ImageKind,
}

impl ImageGrid {
    pub fn new(grid: SamplingGrid, values: Vec<f64>, kind: ImageKind) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure(format!("non-finite indicator value {v}")));
        }
        Ok(Self { grid, values, kind })
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ImageKind {
        self.kind
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Grid point of the largest value.
    pub fn argmax(&self) -> Point2 {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        self.grid.point(i)
    }

    /// Value at the grid node nearest `p`.
    pub fn nearest_value(&self, p: Point2) -> f64 {
        let g = &self.grid;
        let col = ((p.x - g.x_min) / (g.x_max - g.x_min) * (g.nx - 1) as f64).round();
        let row = ((g.y_max - p.y) / (g.y_max - g.y_min) * (g.ny - 1) as f64).round();
        let col = col.clamp(0.0, (g.nx - 1) as f64) as usize;
        let row = row.clamp(0.0, (g.ny - 1) as f64) as usize;
        self.values[row * g.nx + col]
    }

    /// Points with `I ≥ α max I`.
    pub fn level_set(&self, alpha: f64) -> Vec<Point2> {
        let cut = alpha * self.max();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= cut)
            .map(|(i, _)| self.grid.point(i))
            .collect()
    }
}

/// `φ(τ, x_j)` for all `j`, split into real and imaginary parts.
fn green_row(k: f64, tau: Point2, xs: &[Point2], re: &mut Vec<f64>, im: &mut Vec<f64>) {
    re.clear();
    im.clear();
    for x in xs {
        let g = green_raw(k, tau.dist(*x));
        re.push(g.re);
        im.push(g.im);
    }
}

/// `Σ_m (a_m + i b_m)(c_m + i d_m)` with four fixed partial sums.
#[inline]
fn cdot(ar: &[f64], ai: &[f64], br: &[f64], bi: &[f64]) -> (f64, f64) {
    let n = ar.len();
    let (mut sr, mut si) = ([0.0f64; 4], [0.0f64; 4]);
    let chunks = n / 4;
    for c in 0..chunks {
        for l in 0..4 {
            let i = 4 * c + l;
            sr[l] += ar[i] * br[i] - ai[i] * bi[i];
            si[l] += ar[i] * bi[i] + ai[i] * br[i];
        }
    }
    for i in 4 * chunks..n {
        sr[0] += ar[i] * br[i] - ai[i] * bi[i];
        si[0] += ar[i] * bi[i] + ai[i] * br[i];
    }
    ((sr[0] + sr[1]) + (sr[2] + sr[3]), (si[0] + si[1]) + (si[2] + si[3]))
}

/// Symmetric part of `conj(C)`, stored as upper-triangular rows:
/// `S_jj = conj(C_jj)`, `S_jm = conj(C_jm) + conj(C_mj)` for `m > j`.
struct PairForm {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl PairForm {
    fn new(c: &CMatrix) -> Self {
        let n = c.nrows();
        let (mut re, mut im) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for j in 0..n {
            let mut r = Vec::with_capacity(n - j);
            let mut i = Vec::with_capacity(n - j);
            for m in j..n {
                let s = if m == j { c[(j, j)].conj() } else { c[(j, m)].conj() + c[(m, j)].conj() };
                r.push(s.re);
                i.push(s.im);
            }
            re.push(r);
            im.push(i);
        }
        Self { re, im }
    }

    /// `gᵀ conj(C) g`.
    fn quadratic(&self, gr: &[f64], gi: &[f64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..gr.len() {
            let (hr, hi) = cdot(&self.re[j], &self.im[j], &gr[j..], &gi[j..]);
            total += Complex64::new(gr[j], gi[j]) * Complex64::new(hr, hi);
        }
        total
    }
}

fn check_inside(points: &[Point2], r_b: f64) -> Result<()> {
    for p in points {
        if !(p.norm() < r_b) {
            return Err(Error::Usage(format!(
                "sampling point {p} is not strictly inside the receiver circle of radius {r_b}"
            )));
        }
    }
    Ok(())
}

/// DCM indicator at arbitrary points strictly inside the receiver circle.
pub fn dcm_values(c: &CorrelationMatrix, points: &[Point2]) -> Result<Vec<f64>> {
    let rec = &c.receivers;
    check_inside(points, rec.radius())?;
    let k = c.ctx.k();
    let w = rec.weight();
    let form = PairForm::new(&c.data);
    Ok(points
        .par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(gr, gi), &tau| {
                green_row(k, tau, rec.points(), gr, gi);
                -k * k * (w * w * form.quadratic(gr, gi)).im
            },
        )
        .collect())
}

fn image_kind(c: &CorrelationMatrix) -> ImageKind {
    match c.kind {
        CorrelationKind::PassiveC => ImageKind::Dcm,
        CorrelationKind::ReferenceNs => ImageKind::DcmFromNs,
    }
}

/// DCM indicator over a grid lying strictly inside the receiver circle.
pub fn dcm_indicator(c: &CorrelationMatrix, grid: &SamplingGrid) -> Result<ImageGrid> {
    let values = dcm_values(c, &grid.points())?;
    ImageGrid::new(grid.clone(), values, image_kind(c))
}

/// DCM indicator over a grid that may extend past the receivers: points
/// with `|τ| ≥ radius` are set to zero. Requires `radius < r_B`.
pub fn dcm_indicator_within(c: &CorrelationMatrix, grid: &SamplingGrid, radius: f64) -> Result<ImageGrid> {
    if !(radius > 0.0 && radius < c.receivers.radius()) {
        return Err(Error::Usage(format!(
            "mask radius {radius} must lie in (0, {})",
            c.receivers.radius()
        )));
    }
    let values = masked(grid, radius, |pts| dcm_values(c, pts))?;
    ImageGrid::new(grid.clone(), values, image_kind(c))
}

fn masked(
    grid: &SamplingGrid,
    radius: f64,
    f: impl FnOnce(&[Point2]) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let all = grid.points();
    let inside: Vec<usize> = (0..all.len()).filter(|&i| all[i].norm() < radius).collect();
    let pts: Vec<Point2> = inside.iter().map(|&i| all[i]).collect();
    let vals = f(&pts)?;
    let mut out = vec![0.0; all.len()];
    for (i, v) in inside.into_iter().zip(vals) {
        out[i] = v;
    }
    Ok(out)
}

/// Back-propagated fields `v_b(x_p, x_m) = −w Σ_j conj(C_jm) φ(x_p, x_j)`,
/// one row per point and one column per receiver `m`.
pub fn backpropagate(c: &CorrelationMatrix, points: &[Point2]) -> Result<CMatrix> {
    let rec = c.receivers.points();
    for p in points {
        if rec.contains(p) {
            return Err(Error::Singularity(format!("back-propagation point {p} is a receiver")));
        }
    }
    let k = c.ctx.k();
    let w = c.receivers.weight();
    let phi = CMatrix::from_fn(points.len(), rec.len(), |p, j| green_raw(k, points[p].dist(rec[j])));
    Ok(phi * c.data.map(|v| v.conj()) * Complex64::new(-w, 0.0))
}

/// Indicator assembled from back-propagated fields,
/// `I(τ) = k² Im{ w Σ_m φ(τ,x_m) v_b(τ,x_m) }`.
pub fn dcm_values_two_phase(c: &CorrelationMatrix, points: &[Point2]) -> Result<Vec<f64>> {
    check_inside(points, c.receivers.radius())?;
    let vb = backpropagate(c, points)?;
    let k = c.ctx.k();
    let w = c.receivers.weight();
    Ok(points
        .iter()
        .enumerate()
        .map(|(p, &tau)| {
            let s: Complex64 = c
                .receivers
                .points()
                .iter()
                .enumerate()
                .map(|(m, x)| green_raw(k, tau.dist(*x)) * vb[(p, m)])
                .sum();
            k * k * (s * w).im
        })
        .collect())
}

fn rtm_values(
    scattered: &CMatrix,
    sources: &[Point2],
    receivers: &ReceiverArray,
    source_measure: f64,
    ctx: WaveContext,
    points: &[Point2],
) -> Result<Vec<f64>> {
    let k = ctx.k();
    for p in points {
        if receivers.points().contains(p) || sources.contains(p) {
            return Err(Error::Singularity(format!("sampling point {p} coincides with a transducer")));
        }
    }
    let scale = 2.0 * PI * receivers.radius() * source_measure
        / (receivers.len() as f64 * sources.len() as f64);
    // conj(u^s) transposed so each source is one contiguous row
    let l_count = sources.len();
    let (ur, ui): (Vec<Vec<f64>>, Vec<Vec<f64>>) = (0..l_count)
        .map(|l| {
            let col = scattered.column(l);
            (col.iter().map(|v| v.re).collect(), col.iter().map(|v| -v.im).collect())
        })
        .unzip();
    Ok(points
        .par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(gr, gi), &tau| {
                green_row(k, tau, receivers.points(), gr, gi);
                let mut total = Complex64::new(0.0, 0.0);
                for (l, z) in sources.iter().enumerate() {
                    let (hr, hi) = cdot(&ur[l], &ui[l], gr, gi);
                    total += green_raw(k, tau.dist(*z)) * Complex64::new(hr, hi);
                }
                -k * k * (total * scale).im
            },
        )
        .collect())
}

/// Reverse-time-migration baseline
/// `I_RTM(τ) = −k² Im{ (2π r_B |Σ|)/(J L) Σ_l Σ_j φ(τ,z_l) φ(τ,x_j) conj(u^s(x_j,z_l)) }`
/// using the caller's assumed source positions.
pub fn rtm_indicator(
    scattered: &CMatrix,
    sources: &SourceArray,
    receivers: &ReceiverArray,
    ctx: WaveContext,
    grid: &SamplingGrid,
) -> Result<ImageGrid> {
    check_rtm_dims(scattered, sources, receivers)?;
    let values = rtm_values(scattered, sources.points(), receivers, sources.measure(), ctx, &grid.points())?;
    ImageGrid::new(grid.clone(), values, ImageKind::Rtm)
}

/// [`rtm_indicator`] with points at `|τ| ≥ radius` set to zero.
pub fn rtm_indicator_within(
    scattered: &CMatrix,
    sources: &SourceArray,
    receivers: &ReceiverArray,
    ctx: WaveContext,
    grid: &SamplingGrid,
    radius: f64,
) -> Result<ImageGrid> {
    check_rtm_dims(scattered, sources, receivers)?;
    let values = masked(grid, radius, |pts| {
        rtm_values(scattered, sources.points(), receivers, sources.measure(), ctx, pts)
    })?;
    ImageGrid::new(grid.clone(), values, ImageKind::Rtm)
}

fn check_rtm_dims(scattered: &CMatrix, sources: &SourceArray, receivers: &ReceiverArray) -> Result<()> {
    if scattered.nrows() != receivers.len() || scattered.ncols() != sources.len() {
        return Err(Error::Usage(format!(
            "scattered data is {}x{}, arrays are {}x{}",
            scattered.nrows(),
            scattered.ncols(),
            receivers.len(),
            sources.len()
        )));
    }
    Ok(())
}

/// Field used in the Helmholtz–Kirchhoff check.
#[derive(Debug, Clone, Copy)]
pub enum HkMode<'a> {
    Incident,
    Total(&'a BiesSystem),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HkResidual {
    pub value: f64,
    /// Set when `f(x,y) − conj(f(x,y))` vanished and `value` is absolute.
    pub absolute: bool,
}

/// Residual of `f(x,y) − conj(f(x,y)) = 2ik ∫_Σ conj(f(x,z)) f(y,z) ds(z)`
/// with the integral replaced by the source-array quadrature.
pub fn hk_residual(
    x: Point2,
    y: Point2,
    sources: &SourceArray,
    ctx: WaveContext,
    mode: HkMode<'_>,
) -> Result<HkResidual> {
    let k = ctx.k();
    let z = sources.points();
    let (fx, fy, im_xy): (Vec<Complex64>, Vec<Complex64>, f64) = match mode {
        HkMode::Incident => (
            z.iter().map(|zl| green_raw(k, x.dist(*zl))).collect(),
            z.iter().map(|zl| green_raw(k, y.dist(*zl))).collect(),
            green_imag(ctx, x, y),
        ),
        HkMode::Total(system) => {
            let us = system.scattered_field(&[x, y], z)?;
            let fx = z.iter().enumerate().map(|(l, zl)| green_raw(k, x.dist(*zl)) + us[(0, l)]).collect();
            let fy = z.iter().enumerate().map(|(l, zl)| green_raw(k, y.dist(*zl)) + us[(1, l)]).collect();
            let uxy = system.scattered_field(&[x], &[y])?[(0, 0)];
            (fx, fy, green_imag(ctx, x, y) + uxy.im)
        }
    };
    let s: Complex64 = fx.iter().zip(&fy).map(|(a, b)| a.conj() * b).sum();
    let lhs = Complex64::new(0.0, 2.0 * k * sources.weight()) * s;
    let rhs = Complex64::new(0.0, 2.0 * im_xy);
    let diff = (lhs - rhs).norm();
    if rhs.norm() <= 1e-14 * lhs.norm().max(1.0) {
        return Ok(HkResidual { value: diff, absolute: true });
    }
    Ok(HkResidual { value: diff / rhs.norm(), absolute: false })
}
