//! Exterior sound-soft scattering of a point source.
//!
//! The scattered field is sought as a combined layer potential
//!
//! ```text
//! u^s(x) = ∫_∂D ( ∂φ(x,y)/∂ν(y) − iη φ(x,y) ) ϕ(y) ds(y)
//! ```
//!
//! whose exterior trace gives the second-kind equation `ϕ + Kϕ − iηSϕ = −2u^i`
//! (`K`, `S` carrying the usual factor two). The equation is parametrized on
//! every boundary component and discretized with the periodic trapezoid rule;
//! the logarithmic singularities of the self-interaction kernels are split
//! off and integrated with the trigonometric product weights
//!
//! ```text
//! R_j(t) = −(2π/n) Σ_{m=1}^{n−1} cos(m(t − t_j))/m − (π/n²) cos(n(t − t_j)),
//! ```
//!
//! which gives exponential convergence on analytic curves. One dense LU
//! factorization serves every source position.
//!
//! [`disk_series_oracle`] is the independent separation-of-variables solution
//! for a circular obstacle.

use std::f64::consts::PI;

use nalgebra::{Dyn, LU};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Obstacle, ReceiverArray};
use crate::specfun::{self, green_raw, Point2, WaveContext};
use crate::CMatrix;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Points closer to the boundary than this many node spacings are rejected.
pub const NEAR_BOUNDARY_SPACINGS: f64 = 5.0;

/// Layer-potential ansatz for the scattered field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Representation {
    /// Double layer minus `iη` times single layer; uniquely solvable for all `k`
    /// when `η ≠ 0`.
    CombinedField { eta: f64 },
    /// Bare double layer. Fails at interior Neumann eigenvalues.
    DoubleLayer,
}

impl Representation {
    /// Combined field with the customary coupling `η = k`.
    pub fn default_for(ctx: WaveContext) -> Self {
        Representation::CombinedField { eta: ctx.k() }
    }

    pub fn eta(&self) -> f64 {
        match *self {
            Representation::CombinedField { eta } => eta,
            Representation::DoubleLayer => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    position: Point2,
    /// `(x₂', −x₁')`, outward normal times Jacobian.
    normal_scaled: Point2,
    jacobian: f64,
    /// `x₁'x₂'' − x₂'x₁''`
    curl: f64,
}

/// Assembled and factorized Nyström system for one obstacle and wavenumber.
pub struct BiesSystem {
    obstacle: Obstacle,
    ctx: WaveContext,
    repr: Representation,
    nodes: Vec<Node>,
    /// Start of each component in the flattened node list, plus the end.
    offsets: Vec<usize>,
    matrix: CMatrix,
    lu: Option<LU<Complex64, Dyn, Dyn>>,
}

impl std::fmt::Debug for BiesSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BiesSystem")
            .field("k", &self.ctx.k())
            .field("repr", &self.repr)
            .field("unknowns", &self.nodes.len())
            .finish()
    }
}

/// Kress weights `R_d` for node offsets `t_i − t_j = π d / n`, `d = 0..2n`.
fn kress_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..2 * n)
        .map(|d| {
            let theta = PI * d as f64 / nf;
            let mut s = 0.0;
            for m in 1..n {
                s += (m as f64 * theta).cos() / m as f64;
            }
            let last = if d % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * PI / nf * s - PI / (nf * nf) * last
        })
        .collect()
}

/// Kress weight and trigonometric interpolation weight at arbitrary offsets
/// `θ_j = t − t_j`, for one probe parameter.
fn probe_weights(n: usize, thetas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let len = thetas.len();
    let two_cos: Vec<f64> = thetas.iter().map(|t| 2.0 * t.cos()).collect();
    let mut prev = vec![1.0; len]; // cos(0·θ)
    let mut cur: Vec<f64> = thetas.iter().map(|t| t.cos()).collect();
    let mut log_sum = vec![0.0; len];
    let mut interp_sum = vec![0.0; len];
    for m in 1..n {
        let inv = 1.0 / m as f64;
        for j in 0..len {
            log_sum[j] += cur[j] * inv;
            interp_sum[j] += cur[j];
            let next = two_cos[j] * cur[j] - prev[j];
            prev[j] = cur[j];
            cur[j] = next;
        }
    }
    // cur now holds cos(nθ); use the direct value to avoid recurrence drift
    let r = (0..len)
        .map(|j| -2.0 * PI / nf * log_sum[j] - PI / (nf * nf) * (nf * thetas[j]).cos())
        .collect();
    let d = (0..len)
        .map(|j| (1.0 + 2.0 * interp_sum[j] + (nf * thetas[j]).cos()) / (2.0 * nf))
        .collect();
    (r, d)
}

impl BiesSystem {
    /// Assemble and factorize the Nyström system. Every component must carry
    /// at least 32 nodes.
    pub fn assemble(obstacle: &Obstacle, ctx: WaveContext, repr: Representation) -> Result<Self> {
        if let Representation::CombinedField { eta } = repr {
            if !(eta.is_finite() && eta != 0.0) {
                return Err(Error::Usage(format!("coupling parameter must be finite and nonzero, got {eta}")));
            }
        }
        let mut offsets = vec![0];
        let mut nodes = Vec::with_capacity(obstacle.total_nodes());
        for c in obstacle.components() {
            if c.node_count() < 32 {
                return Err(Error::Usage(format!(
                    "need at least 32 nodes per component, got {}",
                    c.node_count()
                )));
            }
            nodes.extend(c.node_points().into_iter().map(|p| Node {
                position: p.position,
                normal_scaled: p.normal_scaled(),
                jacobian: p.jacobian(),
                curl: p.d1.cross(p.d2),
            }));
            offsets.push(nodes.len());
        }
        let total = nodes.len();
        let mut sys = Self {
            obstacle: obstacle.clone(),
            ctx,
            repr,
            nodes,
            offsets,
            matrix: CMatrix::zeros(total, total),
            lu: None,
        };
        if total == 0 {
            return Ok(sys);
        }

        let weights: Vec<Vec<f64>> = obstacle
            .components()
            .iter()
            .map(|c| kress_weights(c.half_nodes()))
            .collect();
        let rows: Vec<Vec<Complex64>> = (0..total)
            .into_par_iter()
            .map(|i| sys.assemble_row(i, &weights))
            .collect();
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                sys.matrix[(i, j)] = v;
            }
        }

        let lu = sys.matrix.clone().lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..total).map(|i| u[(i, i)].norm()).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(max.is_finite() && min > 1e-13 * max) {
            return Err(Error::NumericalFailure(format!(
                "boundary system is numerically singular (pivot ratio {:e}); resonance or degenerate geometry",
                min / max
            )));
        }
        sys.lu = Some(lu);
        Ok(sys)
    }

    fn component_of(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o <= i) - 1
    }

    fn half_nodes(&self, comp: usize) -> usize {
        (self.offsets[comp + 1] - self.offsets[comp]) / 2
    }

    /// Full kernel `L − iηM` (factor two included) between an arbitrary point
    /// and a boundary node, without the quadrature weight.
    #[inline]
    fn kernel(&self, x: Point2, y: &Node) -> Complex64 {
        let k = self.ctx.k();
        let d = x - y.position;
        let r = d.norm();
        let dl = specfun::double_layer_raw(k, d, r, y.normal_scaled);
        let sl = green_raw(k, r) * y.jacobian;
        (dl - Complex64::new(0.0, self.repr.eta()) * sl) * 2.0
    }

    /// Logarithmic part `L₁ − iηM₁` of the self kernel for `x ≠ y`.
    #[inline]
    fn log_kernel(&self, x: Point2, y: &Node) -> Complex64 {
        let k = self.ctx.k();
        let d = x - y.position;
        let r = d.norm();
        let l1 = -k / (2.0 * PI) * d.dot(y.normal_scaled) * libm::j1(k * r) / r;
        let m1 = -y.jacobian * libm::j0(k * r) / (2.0 * PI);
        Complex64::new(l1, -self.repr.eta() * m1)
    }

    fn assemble_row(&self, i: usize, weights: &[Vec<f64>]) -> Vec<Complex64> {
        let total = self.nodes.len();
        let mut row = vec![Complex64::new(0.0, 0.0); total];
        let ci = self.component_of(i);
        let xi = &self.nodes[i];
        let eta = self.repr.eta();
        let k = self.ctx.k();
        for (cj, w) in weights.iter().enumerate() {
            let (start, end) = (self.offsets[cj], self.offsets[cj + 1]);
            let n = self.half_nodes(cj);
            let h = PI / n as f64;
            if cj != ci {
                for j in start..end {
                    row[j] = self.kernel(xi.position, &self.nodes[j]) * h;
                }
                continue;
            }
            let li = i - start;
            for j in start..end {
                let lj = j - start;
                let d = (li + 2 * n - lj) % (2 * n);
                let yj = &self.nodes[j];
                let (a1, a2) = if lj == li {
                    let l_diag = -xi.curl / (2.0 * PI * xi.jacobian * xi.jacobian);
                    let m2 = Complex64::new(
                        -EULER_GAMMA / PI - (k * xi.jacobian / 2.0).ln() / PI,
                        0.5,
                    ) * xi.jacobian;
                    let a1 = Complex64::new(0.0, eta * xi.jacobian / (2.0 * PI));
                    (a1, l_diag - Complex64::new(0.0, eta) * m2)
                } else {
                    let a1 = self.log_kernel(xi.position, yj);
                    let dt = PI * (li as f64 - lj as f64) / n as f64;
                    let s = (0.5 * dt).sin();
                    let log = (4.0 * s * s).ln();
                    (a1, self.kernel(xi.position, yj) - a1 * log)
                };
                row[j] = a1 * w[d] + a2 * h;
            }
            row[i] += Complex64::new(1.0, 0.0);
        }
        row
    }

    pub fn obstacle(&self) -> &Obstacle {
        &self.obstacle
    }

    pub fn context(&self) -> WaveContext {
        self.ctx
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn unknowns(&self) -> usize {
        self.nodes.len()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `‖A‖₁ ‖A⁻¹‖₁`, computed exactly from the factorization (O(N³)).
    pub fn condition_estimate(&self) -> f64 {
        let Some(lu) = &self.lu else { return 1.0 };
        let n = self.unknowns();
        let inv = lu
            .solve(&CMatrix::identity(n, n))
            .expect("factorization was checked at assembly");
        one_norm(&self.matrix) * one_norm(&inv)
    }

    fn check_sources(&self, sources: &[Point2]) -> Result<()> {
        for &z in sources {
            if !z.is_finite() {
                return Err(Error::Domain(format!("non-finite source position {z}")));
            }
            if self.obstacle.contains(z) {
                return Err(Error::Domain(format!("source {z} lies inside the obstacle")));
            }
            if self.nodes.iter().any(|n| n.position == z) {
                return Err(Error::Domain(format!("source {z} lies on the boundary")));
            }
        }
        Ok(())
    }

    /// Densities for several point sources at once, one column per source.
    pub fn solve_densities(&self, sources: &[Point2]) -> Result<CMatrix> {
        self.check_sources(sources)?;
        let total = self.unknowns();
        let Some(lu) = &self.lu else {
            return Ok(CMatrix::zeros(0, sources.len()));
        };
        let k = self.ctx.k();
        let mut rhs = CMatrix::zeros(total, sources.len());
        for (s, z) in sources.iter().enumerate() {
            for (i, node) in self.nodes.iter().enumerate() {
                rhs[(i, s)] = -2.0 * green_raw(k, node.position.dist(*z));
            }
        }
        lu.solve(&rhs)
            .ok_or_else(|| Error::NumericalFailure("LU solve failed".into()))
    }

    /// Solve for the incident field `φ(·, z)`.
    pub fn solve_point_source(&self, z: Point2) -> Result<ScatterSolution<'_>> {
        let dens = self.solve_densities(&[z])?;
        Ok(ScatterSolution {
            system: self,
            density: dens.column(0).iter().copied().collect(),
            source: z,
        })
    }

    fn check_eval_points(&self, points: &[Point2]) -> Result<()> {
        if self.nodes.is_empty() {
            return Ok(());
        }
        let min_dist = NEAR_BOUNDARY_SPACINGS * self.obstacle.node_spacing();
        for &p in points {
            if !p.is_finite() {
                return Err(Error::Domain(format!("non-finite evaluation point {p}")));
            }
            if self.obstacle.contains(p) {
                return Err(Error::Domain(format!("evaluation point {p} lies inside the obstacle")));
            }
            let d = self.obstacle.distance_to_nodes(p);
            if d < min_dist {
                return Err(Error::Accuracy(format!(
                    "evaluation point {p} is {d:.3e} from the boundary, below {min_dist:.3e}"
                )));
            }
        }
        Ok(())
    }

    /// Matrix `E` with `u^s(points) = E · density`.
    pub fn evaluation_matrix(&self, points: &[Point2]) -> Result<CMatrix> {
        self.check_eval_points(points)?;
        let total = self.unknowns();
        let rows: Vec<Vec<Complex64>> = points
            .par_iter()
            .map(|&p| {
                let mut row = Vec::with_capacity(total);
                for c in 0..self.offsets.len() - 1 {
                    let h = PI / self.half_nodes(c) as f64;
                    for node in &self.nodes[self.offsets[c]..self.offsets[c + 1]] {
                        row.push(self.kernel(p, node) * (0.5 * h));
                    }
                }
                row
            })
            .collect();
        Ok(CMatrix::from_fn(points.len(), total, |i, j| rows[i][j]))
    }

    /// Scattered field `u^s(points[i], sources[s])`, one factorization and one
    /// evaluation matrix for the whole batch.
    pub fn scattered_field(&self, points: &[Point2], sources: &[Point2]) -> Result<CMatrix> {
        let dens = self.solve_densities(sources)?;
        let eval = self.evaluation_matrix(points)?;
        if self.nodes.is_empty() {
            return Ok(CMatrix::zeros(points.len(), sources.len()));
        }
        Ok(eval * dens)
    }

    /// Exterior trace of the scattered field at boundary parameters `params`
    /// on component `comp`, using the trigonometric interpolant of the
    /// density between nodes.
    pub fn boundary_trace(&self, density: &[Complex64], comp: usize, params: &[f64]) -> Result<Vec<Complex64>> {
        if density.len() != self.unknowns() {
            return Err(Error::Usage("density length does not match the system".into()));
        }
        let curve = self
            .obstacle
            .components()
            .get(comp)
            .ok_or_else(|| Error::Usage(format!("no boundary component {comp}")))?;
        let (start, end) = (self.offsets[comp], self.offsets[comp + 1]);
        let n = self.half_nodes(comp);
        let h = PI / n as f64;
        let eta = self.repr.eta();
        let out = params
            .par_iter()
            .map(|&t| {
                let x = curve.eval(t);
                let node_t: Vec<f64> = (0..2 * n).map(|j| PI * j as f64 / n as f64).collect();
                let thetas: Vec<f64> = node_t.iter().map(|tj| t - tj).collect();
                let (r, d) = probe_weights(n, &thetas);
                let mut acc = Complex64::new(0.0, 0.0);
                for (lj, j) in (start..end).enumerate() {
                    let yj = &self.nodes[j];
                    let psi = density[j];
                    acc += psi * d[lj];
                    let s = (0.5 * thetas[lj]).sin();
                    let log = (4.0 * s * s).ln();
                    let (a1, a2) = if log.is_finite() {
                        let a1 = self.log_kernel(x.position, yj);
                        (a1, self.kernel(x.position, yj) - a1 * log)
                    } else {
                        // probe coincides with a node
                        let jac = x.jacobian();
                        let l_diag = -x.d1.cross(x.d2) / (2.0 * PI * jac * jac);
                        let m2 = Complex64::new(
                            -EULER_GAMMA / PI - (self.ctx.k() * jac / 2.0).ln() / PI,
                            0.5,
                        ) * jac;
                        (Complex64::new(0.0, eta * jac / (2.0 * PI)), l_diag - Complex64::new(0.0, eta) * m2)
                    };
                    acc += (a1 * r[lj] + a2 * h) * psi;
                }
                for c in 0..self.offsets.len() - 1 {
                    if c == comp {
                        continue;
                    }
                    let hc = PI / self.half_nodes(c) as f64;
                    for j in self.offsets[c]..self.offsets[c + 1] {
                        acc += self.kernel(x.position, &self.nodes[j]) * hc * density[j];
                    }
                }
                acc * 0.5
            })
            .collect();
        Ok(out)
    }
}

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solved boundary density for one incident point source.
#[derive(Debug, Clone)]
pub struct ScatterSolution<'a> {
    system: &'a BiesSystem,
    density: Vec<Complex64>,
    source: Point2,
}

impl<'a> ScatterSolution<'a> {
    pub fn density(&self) -> &[Complex64] {
        &self.density
    }

    pub fn source(&self) -> Point2 {
        self.source
    }

    pub fn system(&self) -> &'a BiesSystem {
        self.system
    }

    /// Copy with the density multiplied by `s`.
    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            system: self.system,
            density: self.density.iter().map(|d| d * s).collect(),
            source: self.source,
        }
    }

    pub fn eval_scattered(&self, points: &[Point2]) -> Result<Vec<Complex64>> {
        let e = self.system.evaluation_matrix(points)?;
        Ok((0..points.len())
            .map(|i| {
                e.row(i)
                    .iter()
                    .zip(&self.density)
                    .map(|(a, b)| a * b)
                    .sum::<Complex64>()
            })
            .collect())
    }

    pub fn eval_total(&self, points: &[Point2]) -> Result<Vec<Complex64>> {
        if let Some(p) = points.iter().find(|p| **p == self.source) {
            return Err(Error::Singularity(format!("total field evaluated at the source {p}")));
        }
        let k = self.system.ctx.k();
        let us = self.eval_scattered(points)?;
        Ok(points
            .iter()
            .zip(us)
            .map(|(p, u)| u + green_raw(k, p.dist(self.source)))
            .collect())
    }

    /// Exterior trace of `u^s` at parameters `params` of component `comp`.
    pub fn boundary_trace(&self, comp: usize, params: &[f64]) -> Result<Vec<Complex64>> {
        self.system.boundary_trace(&self.density, comp, params)
    }

    /// `max |u^s + u^i| / max |u^i|` over `probes_per_component` equispaced
    /// off-node parameters on every component.
    pub fn boundary_residual(&self, probes_per_component: usize) -> Result<f64> {
        let k = self.system.ctx.k();
        let (mut worst, mut scale) = (0.0f64, 0.0f64);
        for (c, curve) in self.system.obstacle.components().iter().enumerate() {
            let params: Vec<f64> = (0..probes_per_component)
                .map(|p| 2.0 * PI * (p as f64 + 0.5) / probes_per_component as f64)
                .collect();
            let trace = self.boundary_trace(c, &params)?;
            for (t, us) in params.iter().zip(trace) {
                let ui = green_raw(k, curve.position(*t).dist(self.source));
                worst = worst.max((us + ui).norm());
                scale = scale.max(ui.norm());
            }
        }
        Ok(worst / scale)
    }
}

/// Active scattered-field matrix `u^s(x_j, x_m)` with receivers doubling as
/// sources. The diagonal holds the self-receiver scattered value.
pub fn active_scatter_matrix(system: &BiesSystem, receivers: &ReceiverArray) -> Result<CMatrix> {
    system.scattered_field(receivers.points(), receivers.points())
}

/// `J_0(x) .. J_{n_max}(x)` for `x ≥ 0`.
pub fn bessel_j_sequence(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if (n_max as f64) < x {
        out[0] = libm::j0(x);
        if n_max >= 1 {
            out[1] = libm::j1(x);
        }
        for n in 1..n_max {
            out[n + 1] = 2.0 * n as f64 / x * out[n] - out[n - 1];
        }
        return out;
    }
    // Miller's backward recurrence normalized by J0 + 2ΣJ_2k = 1
    let top = n_max.max(x as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let (mut jp1, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for n in (0..=start).rev() {
        if n <= n_max {
            out[n] = j;
        }
        if n % 2 == 0 {
            norm += if n == 0 { j } else { 2.0 * j };
        }
        if n == 0 {
            break;
        }
        let jm1 = 2.0 * n as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// `Y_0(x) .. Y_{n_max}(x)` for `x > 0` by upward recurrence.
pub fn bessel_y_sequence(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    out[0] = libm::y0(x);
    if n_max >= 1 {
        out[1] = libm::y1(x);
    }
    for n in 1..n_max {
        out[n + 1] = 2.0 * n as f64 / x * out[n] - out[n - 1];
    }
    out
}

fn hankel_sequence(n_max: usize, x: f64) -> Vec<Complex64> {
    bessel_j_sequence(n_max, x)
        .into_iter()
        .zip(bessel_y_sequence(n_max, x))
        .map(|(j, y)| Complex64::new(j, y))
        .collect()
}

/// Series solution for a sound-soft disk of radius `radius` at `center`
/// illuminated by `φ(·, z)`:
///
/// ```text
/// u^s(x) = −(i/4) Σ_n J_n(ka)/H_n(ka) · H_n(k r_x) H_n(k r_z) e^{in(θ_x − θ_z)}
/// ```
///
/// Summation stops once a term falls below `1e−14` of the partial sum;
/// failing that by order `n_max` is an accuracy error.
pub fn disk_series_oracle(
    center: Point2,
    radius: f64,
    ctx: WaveContext,
    z: Point2,
    points: &[Point2],
    n_max: usize,
) -> Result<Vec<Complex64>> {
    if n_max < 10 {
        return Err(Error::Usage(format!("n_max must be >= 10, got {n_max}")));
    }
    let k = ctx.k();
    let rz = z.dist(center);
    if !(rz > radius) {
        return Err(Error::Domain(format!("source {z} is not outside the disk")));
    }
    let ka = k * radius;
    let ja = bessel_j_sequence(n_max, ka);
    let ha = hankel_sequence(n_max, ka);
    let hz = hankel_sequence(n_max, k * rz);
    let theta_z = (z - center).angle();
    points
        .iter()
        .map(|&p| {
            let rx = p.dist(center);
            if !(rx > radius) {
                return Err(Error::Domain(format!("evaluation point {p} is not outside the disk")));
            }
            let hx = hankel_sequence(n_max, k * rx);
            let dtheta = (p - center).angle() - theta_z;
            let mut sum = Complex64::new(0.0, 0.0);
            let mut converged = false;
            for n in 0..=n_max {
                let ratio = ja[n] / ha[n];
                let coeff = if ratio.norm() == 0.0 || !ratio.is_finite() {
                    Complex64::new(0.0, 0.0)
                } else {
                    ratio * hx[n] * hz[n]
                };
                let term = if n == 0 {
                    coeff
                } else {
                    coeff * (2.0 * (n as f64 * dtheta).cos())
                };
                sum += term;
                if n as f64 > ka && coeff.norm() * 2.0 < 1e-14 * sum.norm() {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Accuracy(format!(
                    "disk series did not converge within n_max = {n_max} (ka = {ka})"
                )));
            }
            Ok(Complex64::new(0.0, -0.25) * sum)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_disk, make_kite, receiver_array};

    fn rel_max(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let den = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
        num / den
    }

    fn unit_disk(nodes: usize) -> Obstacle {
        Obstacle::single(make_disk(Point2::default(), 1.0, nodes).unwrap())
    }

    #[test]
    fn kress_weights_integrate_log_exactly_on_constants() {
        // ∫₀^{2π} ln(4 sin²(τ/2)) dτ = 0
        let w = kress_weights(32);
        assert!(w.iter().sum::<f64>().abs() < 1e-13);
        // ∫ ln(4 sin²((t−τ)/2)) cos τ dτ = −2π cos t
        let n = 32;
        let s: f64 = (0..2 * n).map(|j| w[j] * (PI * j as f64 / n as f64).cos()).sum();
        assert!((s + 2.0 * PI).abs() < 1e-12, "{s}");
    }

    #[test]
    fn probe_weights_agree_with_node_weights() {
        let n = 16;
        let thetas: Vec<f64> = (0..2 * n).map(|d| PI * d as f64 / n as f64).collect();
        let (r, d) = probe_weights(n, &thetas);
        let w = kress_weights(n);
        for i in 0..2 * n {
            assert!((r[i] - w[i]).abs() < 1e-13);
            let expect = if i == 0 { 1.0 } else { 0.0 };
            assert!((d[i] - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn bessel_sequences_match_libm() {
        for &x in &[0.3, 2.0, 6.283, 12.57, 40.0, 628.3] {
            let j = bessel_j_sequence(60, x);
            let y = bessel_y_sequence(60, x);
            for n in 0..=60 {
                let jr = libm::jn(n as i32, x);
                assert!((j[n] - jr).abs() <= 1e-13 * jr.abs().max(1e-3 * j[0].abs().max(j[1].abs())).max(1e-300),
                    "J_{n}({x}) = {} vs {jr}", j[n]);
                let yr = libm::yn(n as i32, x);
                if yr.is_finite() {
                    assert!((y[n] - yr).abs() <= 1e-12 * yr.abs().max(1e-3), "Y_{n}({x})");
                }
            }
        }
    }

    #[test]
    fn oracle_satisfies_dirichlet_condition() {
        let ctx = WaveContext::new(2.0 * PI).unwrap();
        let z = Point2::new(3.0, 1.0);
        let a = 1.0 + 1e-12;
        let pts: Vec<Point2> = (0..16).map(|i| Point2::polar(a, 0.4 * i as f64)).collect();
        let us = disk_series_oracle(Point2::default(), 1.0, ctx, z, &pts, 80).unwrap();
        for (p, u) in pts.iter().zip(us) {
            let ui = green_raw(ctx.k(), p.dist(z));
            assert!((u + ui).norm() < 1e-10 * ui.norm().max(0.05), "{}", (u + ui).norm());
        }
    }

    #[test]
    fn oracle_is_symmetric_and_truncation_independent() {
        let ctx = WaveContext::new(2.0 * PI).unwrap();
        let a = Point2::new(3.0, 1.0);
        let b = Point2::new(-2.0, 4.0);
        let ab = disk_series_oracle(Point2::default(), 1.0, ctx, a, &[b], 80).unwrap()[0];
        let ba = disk_series_oracle(Point2::default(), 1.0, ctx, b, &[a], 80).unwrap()[0];
        assert!((ab - ba).norm() < 1e-13 * ab.norm());
        let c60 = disk_series_oracle(Point2::default(), 1.0, ctx, a, &[b], 60).unwrap()[0];
        assert!((ab - c60).norm() < 1e-13 * ab.norm());
        assert!(matches!(
            disk_series_oracle(Point2::default(), 1.0, ctx, a, &[b], 10),
            Err(Error::Accuracy(_))
        ));
    }

    #[test]
    fn bie_matches_disk_oracle() {
        for k in [2.0 * PI, 4.0 * PI] {
            let ctx = WaveContext::new(k).unwrap();
            let sys = BiesSystem::assemble(&unit_disk(512), ctx, Representation::default_for(ctx)).unwrap();
            let z = Point2::new(100.0, 0.0);
            let rec = receiver_array(64, 5.0).unwrap();
            let sol = sys.solve_point_source(z).unwrap();
            let bie = sol.eval_scattered(rec.points()).unwrap();
            let oracle = disk_series_oracle(Point2::default(), 1.0, ctx, z, rec.points(), 200).unwrap();
            let err = rel_max(&bie, &oracle);
            assert!(err < 1e-8, "k={k}: {err:e}");
            let tot = sol.eval_total(rec.points()).unwrap();
            for ((t, s), p) in tot.iter().zip(&bie).zip(rec.points()) {
                assert!((*t - *s - green_raw(k, p.dist(z))).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn condition_is_finite_on_unit_disk() {
        let ctx = WaveContext::new(2.0 * PI).unwrap();
        let sys = BiesSystem::assemble(&unit_disk(256), ctx, Representation::default_for(ctx)).unwrap();
        let c = sys.condition_estimate();
        assert!(c.is_finite() && c >= 1.0 && c < 1e4, "cond {c}");
    }

    #[test]
    fn assembly_is_deterministic() {
        let ctx = WaveContext::new(2.0 * PI).unwrap();
        let ob = Obstacle::single(make_kite(64).unwrap());
        let a = BiesSystem::assemble(&ob, ctx, Representation::default_for(ctx)).unwrap();
        let b = BiesSystem::assemble(&ob, ctx, Representation::default_for(ctx)).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn density_self_convergence_on_kite() {
        let ctx = WaveContext::new(2.0 * PI).unwrap();
        let z = Point2::new(100.0, 0.0);
        let coarse = Obstacle::single(make_kite(256).unwrap());
        let fine = Obstacle::single(make_kite(512).unwrap());
        let repr = Representation::default_for(ctx);
        let dc = BiesSystem::assemble(&coarse, ctx, repr).unwrap().solve_densities(&[z]).unwrap();
        let df = BiesSystem::assemble(&fine, ctx, repr).unwrap().solve_densities(&[z]).unwrap();
        let common: Vec<Complex64> = (0..256).map(|i| df[(2 * i, 0)]).collect();
        let coarse_v: Vec<Complex64> = dc.column(0).iter().copied().collect();
        let err = rel_max(&coarse_v, &common);
        assert!(err < 1e-9, "{err:e}");
    }

    #[test]
    fn kite_boundary_condition_and_reciprocity() {
        let ctx = WaveContext::new(4.0 * PI).unwrap();
        let ob = Obstacle::single(make_kite(512).unwrap());
        let sys = BiesSystem::assemble(&ob, ctx, Representation::default_for(ctx)).unwrap();
        let sol = sys.solve_point_source(Point2::new(100.0, 0.0)).unwrap();
        let res = sol.boundary_residual(1024).unwrap();
        assert!(res < 1e-8, "boundary residual {res:e}");

        let a = Point2::new(-3.0, 1.0);
        let b = Point2::new(4.0, -2.5);
        let ab = sys.solve_point_source(b).unwrap().eval_scattered(&[a]).unwrap()[0];
        let ba = sys.solve_point_source(a).unwrap().eval_scattered(&[b]).unwrap()[0];
        assert!((ab - ba).norm() < 1e-8 * ab.norm().max(ba.norm()));
    }

    #[test]
    fn combined_field_survives_double_layer_resonance() {
        // k = j_{1,1} is an interior Neumann eigenvalue of the unit disk
        let ctx = WaveContext::new(1.841_183_781_340_659).unwrap();
        let ob = unit_disk(128);
        let z = Point2::new(10.0, 0.0);
        let pts = [Point2::new(0.0, 3.0)];
        let cf = BiesSystem::assemble(&ob, ctx, Representation::default_for(ctx)).unwrap();
        let u = cf.solve_point_source(z).unwrap().eval_scattered(&pts).unwrap();
        let o = disk_series_oracle(Point2::default(), 1.0, ctx, z, &pts, 60).unwrap();
        assert!(rel_max(&u, &o) < 1e-10);
        assert!(matches!(
            BiesSystem::assemble(&ob, ctx, Representation::DoubleLayer),
            Err(Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn input_validation() {
        let ctx = WaveContext::new(2.0 * PI).unwrap();
        let ob = unit_disk(64);
        assert!(matches!(
            BiesSystem::assemble(&ob, ctx, Representation::CombinedField { eta: 0.0 }),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            BiesSystem::assemble(&unit_disk(16), ctx, Representation::default_for(ctx)),
            Err(Error::Usage(_))
        ));
        let sys = BiesSystem::assemble(&ob, ctx, Representation::default_for(ctx)).unwrap();
        assert!(matches!(sys.solve_point_source(Point2::new(0.1, 0.2)), Err(Error::Domain(_))));
        let sol = sys.solve_point_source(Point2::new(5.0, 0.0)).unwrap();
        assert!(matches!(sol.eval_scattered(&[Point2::new(1.01, 0.0)]), Err(Error::Accuracy(_))));
        assert!(matches!(sol.eval_total(&[Point2::new(5.0, 0.0)]), Err(Error::Singularity(_))));
    }

    #[test]
    fn empty_obstacle_scatters_nothing() {
        let ctx = WaveContext::new(2.0 * PI).unwrap();
        let sys = BiesSystem::assemble(&Obstacle::empty(), ctx, Representation::default_for(ctx)).unwrap();
        let rec = receiver_array(8, 5.0).unwrap();
        let m = active_scatter_matrix(&sys, &rec).unwrap();
        assert_eq!(m, CMatrix::zeros(8, 8));
    }

    #[test]
    fn field_is_linear_in_density() {
        let ctx = WaveContext::new(2.0 * PI).unwrap();
        let sys = BiesSystem::assemble(&unit_disk(64), ctx, Representation::default_for(ctx)).unwrap();
        let sol = sys.solve_point_source(Point2::new(4.0, 0.0)).unwrap();
        let s = Complex64::new(0.3, -1.7);
        let p = [Point2::new(0.0, 3.0), Point2::new(-2.0, -2.0)];
        let a = sol.eval_scattered(&p).unwrap();
        let b = sol.scaled(s).eval_scattered(&p).unwrap();
        for (x, y) in a.iter().zip(b) {
            assert!((x * s - y).norm() < 1e-15 * y.norm().max(1e-300) * 10.0);
        }
    }

    #[test]
    fn scattered_field_radiates() {
        let ctx = WaveContext::new(2.0 * PI).unwrap();
        let ob = Obstacle::single(make_kite(128).unwrap());
        let sys = BiesSystem::assemble(&ob, ctx, Representation::default_for(ctx)).unwrap();
        let sol = sys.solve_point_source(Point2::new(-5.0, 0.0)).unwrap();
        let dir = Point2::polar(1.0, 0.9);
        let mut last = f64::INFINITY;
        for r in [1e2, 1e3, 1e4] {
            let h = 1e-3;
            let u = sol.eval_scattered(&[dir * (r - h), dir * r, dir * (r + h)]).unwrap();
            let du = (u[2] - u[0]) / (2.0 * h);
            let res = (du - Complex64::new(0.0, ctx.k()) * u[1]).norm() * r.sqrt();
            assert!(res < last, "r={r}: {res:e}");
            last = res;
        }
    }
}
