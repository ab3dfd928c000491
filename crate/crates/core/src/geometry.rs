//! Obstacle boundaries, measurement arrays and sampling grids.
//!
//! All boundary curves are closed, counterclockwise, `2π`-periodic
//! parametrizations with closed-form first and second derivatives. A curve
//! carries its Nyström node count `2n`; nodes sit at `t_i = π i / n`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng;
use crate::specfun::Point2;

/// Radius profile `r(θ)` of a star-shaped curve `c + r(θ)(cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    Circle { radius: f64 },
    /// `r = sqrt(cos²θ + 0.25 sin²θ)`
    Peanut,
    /// `r = 2 + 0.3 cos 3θ`
    Pear,
}

impl RadialProfile {
    /// `(r, r', r'')` at `θ`.
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            RadialProfile::Circle { radius } => (radius, 0.0, 0.0),
            RadialProfile::Peanut => {
                // r² = s = 0.625 + 0.375 cos 2θ
                let (s2, c2) = (2.0 * t).sin_cos();
                let s = 0.625 + 0.375 * c2;
                let ds = -0.75 * s2;
                let dds = -1.5 * c2;
                let r = s.sqrt();
                (r, ds / (2.0 * r), dds / (2.0 * r) - ds * ds / (4.0 * r * r * r))
            }
            RadialProfile::Pear => {
                let (s3, c3) = (3.0 * t).sin_cos();
                (2.0 + 0.3 * c3, -0.9 * s3, -2.7 * c3)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveShape {
    /// `c + (0.5(cos θ + 0.65 cos 2θ − 0.65), 0.75 sin θ)`
    Kite { center: Point2 },
    Star { center: Point2, profile: RadialProfile },
}

/// A smooth closed obstacle boundary with its Nyström discretization size.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    shape: CurveShape,
    nodes: usize,
}

/// Position, first and second derivative at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub position: Point2,
    pub d1: Point2,
    pub d2: Point2,
}

impl CurvePoint {
    /// `|x'(t)|`
    #[inline]
    pub fn jacobian(&self) -> f64 {
        self.d1.norm()
    }

    /// Outward unit normal for a counterclockwise curve.
    #[inline]
    pub fn normal(&self) -> Point2 {
        self.normal_scaled() * (1.0 / self.jacobian())
    }

    /// Outward normal scaled by the Jacobian: `(x₂', −x₁')`.
    #[inline]
    pub fn normal_scaled(&self) -> Point2 {
        Point2::new(self.d1.y, -self.d1.x)
    }

    #[inline]
    pub fn tangent(&self) -> Point2 {
        self.d1 * (1.0 / self.jacobian())
    }
}

impl BoundaryCurve {
    /// `nodes` is the total node count `2n`; it must be even and at least 16.
    pub fn new(shape: CurveShape, nodes: usize) -> Result<Self> {
        if nodes < 16 || nodes % 2 != 0 {
            return Err(Error::Usage(format!(
                "boundary node count must be even and >= 16, got {nodes}"
            )));
        }
        Ok(Self { shape, nodes })
    }

    pub fn shape(&self) -> CurveShape {
        self.shape
    }

    /// Total node count `2n`.
    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// `n`, half the node count.
    pub fn half_nodes(&self) -> usize {
        self.nodes / 2
    }

    /// Same curve, different discretization.
    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        Self::new(self.shape, nodes)
    }

    pub fn node_param(&self, i: usize) -> f64 {
        PI * i as f64 / self.half_nodes() as f64
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        match self.shape {
            CurveShape::Kite { center } => {
                let (s, c) = t.sin_cos();
                let (s2, c2) = (2.0 * t).sin_cos();
                CurvePoint {
                    position: center + Point2::new(0.5 * (c + 0.65 * c2 - 0.65), 0.75 * s),
                    d1: Point2::new(-0.5 * s - 0.65 * s2, 0.75 * c),
                    d2: Point2::new(-0.5 * c - 1.3 * c2, -0.75 * s),
                }
            }
            CurveShape::Star { center, profile } => {
                let (r, dr, ddr) = profile.eval(t);
                let (s, c) = t.sin_cos();
                let e = Point2::new(c, s);
                let ep = Point2::new(-s, c);
                CurvePoint {
                    position: center + e * r,
                    d1: e * dr + ep * r,
                    d2: e * (ddr - r) + ep * (2.0 * dr),
                }
            }
        }
    }

    pub fn position(&self, t: f64) -> Point2 {
        self.eval(t).position
    }

    pub fn tangent(&self, t: f64) -> Point2 {
        self.eval(t).tangent()
    }

    pub fn normal(&self, t: f64) -> Point2 {
        self.eval(t).normal()
    }

    pub fn jacobian(&self, t: f64) -> f64 {
        self.eval(t).jacobian()
    }

    /// Curve data at all nodes.
    pub fn node_points(&self) -> Vec<CurvePoint> {
        (0..self.nodes).map(|i| self.eval(self.node_param(i))).collect()
    }

    pub fn nodes(&self) -> Vec<Point2> {
        (0..self.nodes).map(|i| self.position(self.node_param(i))).collect()
    }

    /// Mean of the node positions.
    pub fn centroid(&self) -> Point2 {
        let sum = self.nodes().into_iter().fold(Point2::default(), |a, p| a + p);
        sum * (1.0 / self.nodes as f64)
    }

    /// Perimeter by the periodic trapezoid rule on the nodes.
    pub fn arc_length(&self) -> f64 {
        let h = PI / self.half_nodes() as f64;
        (0..self.nodes).map(|i| self.jacobian(self.node_param(i))).sum::<f64>() * h
    }

    /// Largest arc length between neighbouring nodes (first order in `h`).
    pub fn node_spacing(&self) -> f64 {
        let h = PI / self.half_nodes() as f64;
        (0..self.nodes)
            .map(|i| self.jacobian(self.node_param(i)))
            .fold(0.0, f64::max)
            * h
    }

    /// Winding number of `p` with respect to the node polygon.
    pub fn winding_number(&self, p: Point2) -> i32 {
        let nodes = self.nodes();
        let mut total = 0.0;
        for i in 0..nodes.len() {
            let a = nodes[i] - p;
            let b = nodes[(i + 1) % nodes.len()] - p;
            total += a.cross(b).atan2(a.dot(b));
        }
        (total / (2.0 * PI)).round() as i32
    }

    /// Total turning of the tangent along the curve, in turns.
    pub fn tangent_winding(&self) -> f64 {
        let pts = self.node_points();
        let mut total = 0.0;
        for i in 0..pts.len() {
            let a = pts[i].d1;
            let b = pts[(i + 1) % pts.len()].d1;
            total += a.cross(b).atan2(a.dot(b));
        }
        total / (2.0 * PI)
    }
}

pub fn make_kite(nodes: usize) -> Result<BoundaryCurve> {
    BoundaryCurve::new(CurveShape::Kite { center: Point2::new(2.0, 2.0) }, nodes)
}

pub fn make_peanut(nodes: usize) -> Result<BoundaryCurve> {
    BoundaryCurve::new(
        CurveShape::Star { center: Point2::new(-2.0, -2.0), profile: RadialProfile::Peanut },
        nodes,
    )
}

pub fn make_pear(nodes: usize) -> Result<BoundaryCurve> {
    BoundaryCurve::new(
        CurveShape::Star { center: Point2::default(), profile: RadialProfile::Pear },
        nodes,
    )
}

pub fn make_disk(center: Point2, radius: f64, nodes: usize) -> Result<BoundaryCurve> {
    if !(radius.is_finite() && radius > 0.0 && center.is_finite()) {
        return Err(Error::Usage(format!("invalid disk: center {center}, radius {radius}")));
    }
    BoundaryCurve::new(
        CurveShape::Star { center, profile: RadialProfile::Circle { radius } },
        nodes,
    )
}

/// Kite centred at `(2, 0)` next to a disk of radius 1.5 at `(−0.7, 0)`.
pub fn make_close_pair(nodes: usize) -> Result<Obstacle> {
    Obstacle::new(vec![
        BoundaryCurve::new(CurveShape::Kite { center: Point2::new(2.0, 0.0) }, nodes)?,
        make_disk(Point2::new(-0.7, 0.0), 1.5, nodes)?,
    ])
}

/// Pear at the origin plus a disk of radius 0.2 at `(2, 3)`.
pub fn make_multiscale(nodes: usize) -> Result<Obstacle> {
    Obstacle::new(vec![make_pear(nodes)?, make_disk(Point2::new(2.0, 3.0), 0.2, nodes)?])
}

/// Union of pairwise disjoint boundary components. May be empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Obstacle {
    components: Vec<BoundaryCurve>,
}

impl Obstacle {
    pub fn new(components: Vec<BoundaryCurve>) -> Result<Self> {
        for (a, ca) in components.iter().enumerate() {
            for cb in components.iter().skip(a + 1) {
                let gap = min_node_distance(ca, cb);
                if !(gap > 0.0) {
                    return Err(Error::Usage("obstacle components intersect".into()));
                }
                if ca.winding_number(cb.position(0.0)) != 0
                    || cb.winding_number(ca.position(0.0)) != 0
                {
                    return Err(Error::Usage("obstacle components are nested".into()));
                }
            }
        }
        Ok(Self { components })
    }

    pub fn single(curve: BoundaryCurve) -> Self {
        Self { components: vec![curve] }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn components(&self) -> &[BoundaryCurve] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn total_nodes(&self) -> usize {
        self.components.iter().map(BoundaryCurve::node_count).sum()
    }

    /// Rediscretize every component with `nodes` nodes.
    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| c.with_nodes(nodes))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    /// True when `p` lies inside (or on the node polygon of) any component.
    pub fn contains(&self, p: Point2) -> bool {
        self.components.iter().any(|c| c.winding_number(p) != 0)
    }

    /// Distance from `p` to the nearest boundary node.
    pub fn distance_to_nodes(&self, p: Point2) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.nodes())
            .map(|q| q.dist(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest node spacing over all components.
    pub fn node_spacing(&self) -> f64 {
        self.components.iter().map(BoundaryCurve::node_spacing).fold(0.0, f64::max)
    }

    /// Smallest node-to-node distance between components `a` and `b`, and
    /// the midpoint of that closest pair.
    pub fn gap(&self, a: usize, b: usize) -> Option<(f64, Point2)> {
        let (ca, cb) = (self.components.get(a)?, self.components.get(b)?);
        let nb = cb.nodes();
        let mut best = (f64::INFINITY, Point2::default());
        for p in ca.nodes() {
            for &q in &nb {
                let d = p.dist(q);
                if d < best.0 {
                    best = (d, (p + q) * 0.5);
                }
            }
        }
        Some(best)
    }
}

fn min_node_distance(a: &BoundaryCurve, b: &BoundaryCurve) -> f64 {
    let nb = b.nodes();
    a.nodes()
        .into_iter()
        .flat_map(|p| nb.iter().map(move |q| p.dist(*q)))
        .fold(f64::INFINITY, f64::min)
}

/// Receivers `x_j = r_B (cos γ_j, sin γ_j)`, `γ_j = 2π(j−1)/J`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverArray {
    radius: f64,
    angles: Vec<f64>,
    points: Vec<Point2>,
}

impl ReceiverArray {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// Trapezoid weight `2π r_B / J` of the receiver circle.
    pub fn weight(&self) -> f64 {
        2.0 * PI * self.radius / self.len() as f64
    }
}

pub fn receiver_array(count: usize, radius: f64) -> Result<ReceiverArray> {
    if count < 2 {
        return Err(Error::Usage(format!("need at least 2 receivers, got {count}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Usage(format!("receiver radius must be positive, got {radius}")));
    }
    let angles: Vec<f64> = (0..count).map(|j| 2.0 * PI * j as f64 / count as f64).collect();
    let points = angles.iter().map(|&g| Point2::polar(radius, g)).collect();
    Ok(ReceiverArray { radius, angles, points })
}

/// Point sources `z_l = R_Σ (cos θ_l, sin θ_l)` with
/// `θ_l = 2π(l − 1 + ξ_l)/L`, `ξ_l ~ U[0, ξ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceArray {
    radius: f64,
    xi: f64,
    seed: u64,
    angles: Vec<f64>,
    points: Vec<Point2>,
}

impl SourceArray {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// `|Σ| = 2π R_Σ`, the length of the source circle.
    pub fn measure(&self) -> f64 {
        2.0 * PI * self.radius
    }

    /// Quadrature weight `|Σ| / L`.
    pub fn weight(&self) -> f64 {
        self.measure() / self.len() as f64
    }

    /// The unperturbed layout with the same count and radius.
    pub fn equispaced(&self) -> SourceArray {
        source_array(self.len(), self.radius, 0.0, self.seed)
            .expect("parameters were validated when self was built")
    }
}

pub fn source_array(count: usize, radius: f64, xi: f64, seed: u64) -> Result<SourceArray> {
    if count < 2 {
        return Err(Error::Usage(format!("need at least 2 sources, got {count}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Usage(format!("source radius must be positive, got {radius}")));
    }
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(Error::Usage(format!("perturbation bound must be >= 0, got {xi}")));
    }
    let mut stream = rng::stream(seed, 0);
    let step = 2.0 * PI / count as f64;
    let angles: Vec<f64> = (0..count)
        .map(|l| {
            let u = rng::unit_f64(&mut stream);
            step * (l as f64 + xi * u)
        })
        .collect();
    let points = angles.iter().map(|&t| Point2::polar(radius, t)).collect();
    Ok(SourceArray { radius, xi, seed, angles, points })
}

/// Rectangular `n_x × n_y` grid, row-major with the first row at `y_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl SamplingGrid {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(dx, dy)`
    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.x_max - self.x_min) / (self.nx - 1) as f64,
            (self.y_max - self.y_min) / (self.ny - 1) as f64,
        )
    }

    /// Point in row `row` (0 = top) and column `col`.
    pub fn point_at(&self, row: usize, col: usize) -> Point2 {
        let s = col as f64 / (self.nx - 1) as f64;
        let r = row as f64 / (self.ny - 1) as f64;
        Point2::new(
            self.x_min * (1.0 - s) + self.x_max * s,
            self.y_max * (1.0 - r) + self.y_min * r,
        )
    }

    pub fn point(&self, index: usize) -> Point2 {
        self.point_at(index / self.nx, index % self.nx)
    }

    pub fn points(&self) -> Vec<Point2> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

pub fn sampling_grid(bounds: [f64; 4], nx: usize, ny: usize) -> Result<SamplingGrid> {
    let [x_min, x_max, y_min, y_max] = bounds;
    if nx < 2 || ny < 2 {
        return Err(Error::Usage(format!("grid needs at least 2x2 points, got {nx}x{ny}")));
    }
    if !(bounds.iter().all(|b| b.is_finite()) && x_min < x_max && y_min < y_max) {
        return Err(Error::Usage(format!("invalid grid bounds {bounds:?}")));
    }
    Ok(SamplingGrid { x_min, x_max, y_min, y_max, nx, ny })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn builtin_curves(nodes: usize) -> Vec<BoundaryCurve> {
        let mut v = vec![
            make_kite(nodes).unwrap(),
            make_peanut(nodes).unwrap(),
            make_pear(nodes).unwrap(),
            make_disk(Point2::new(2.0, 3.0), 0.2, nodes).unwrap(),
        ];
        v.extend(make_close_pair(nodes).unwrap().components().iter().cloned());
        v
    }

    fn close(a: Point2, b: Point2, tol: f64) -> bool {
        a.dist(b) <= tol
    }

    #[test]
    fn parametrization_spot_values() {
        let kite = make_kite(64).unwrap();
        assert!(close(kite.position(0.0), Point2::new(2.5, 2.0), 1e-15));
        assert!(close(kite.position(PI / 2.0), Point2::new(1.35, 2.75), 1e-15));
        let peanut = make_peanut(64).unwrap();
        assert!(close(peanut.position(0.0), Point2::new(-1.0, -2.0), 1e-15));
        assert!(close(peanut.position(PI / 2.0), Point2::new(-2.0, -1.5), 1e-15));
        let pear = make_pear(64).unwrap();
        assert!(close(pear.position(0.0), Point2::new(2.3, 0.0), 1e-15));
        let disk = make_disk(Point2::new(2.0, 3.0), 0.2, 64).unwrap();
        assert!(close(disk.position(PI), Point2::new(1.8, 3.0), 1e-15));
    }

    #[test]
    fn peanut_is_mirror_symmetric() {
        let p = make_peanut(64).unwrap();
        for i in 0..50 {
            let t = 0.13 * i as f64;
            let (a, b) = (p.position(t), p.position(-t));
            assert_abs_diff_eq!(a.x, b.x, epsilon = 1e-14);
            assert_abs_diff_eq!(a.y + 2.0, -(b.y + 2.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn curves_are_closed_ccw_with_outward_unit_normals() {
        for c in builtin_curves(128) {
            assert!(close(c.position(0.0), c.position(2.0 * PI), 1e-14));
            assert_abs_diff_eq!(c.tangent_winding(), 1.0, epsilon = 1e-9);
            let centroid = c.centroid();
            for p in c.node_points() {
                assert!(p.jacobian() > 0.0);
                assert_abs_diff_eq!(p.normal().norm(), 1.0, epsilon = 1e-12);
                assert!(p.normal().dot(p.position - centroid) > 0.0);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for c in builtin_curves(64) {
            for i in 0..13 {
                let t = 0.5 * i as f64;
                let p = c.eval(t);
                let d1 = (c.position(t + h) - c.position(t - h)) * (0.5 / h);
                let d2 = (c.eval(t + h).d1 - c.eval(t - h).d1) * (0.5 / h);
                assert!(close(p.d1, d1, 1e-8), "{:?} t={t}", c.shape());
                assert!(close(p.d2, d2, 1e-8), "{:?} t={t}", c.shape());
            }
        }
    }

    #[test]
    fn arc_length_converges() {
        for c in builtin_curves(256) {
            let a = c.arc_length();
            let b = c.with_nodes(512).unwrap().arc_length();
            assert!((a - b).abs() < 1e-10, "{:?}: {a} vs {b}", c.shape());
        }
        let disk = make_disk(Point2::default(), 1.0, 32).unwrap();
        assert_abs_diff_eq!(disk.arc_length(), 2.0 * PI, epsilon = 1e-13);
    }

    #[test]
    fn node_count_validation() {
        assert!(make_kite(15).is_err());
        assert!(make_kite(17).is_err());
        assert!(make_kite(16).is_ok());
    }

    #[test]
    fn close_pair_gap_is_about_half() {
        let pair = make_close_pair(512).unwrap();
        let (gap, mid) = pair.gap(0, 1).unwrap();
        assert!(gap > 0.45 && gap < 0.65, "gap {gap}");
        assert!(!pair.contains(mid));
    }

    #[test]
    fn obstacle_rejects_overlaps_and_nesting() {
        let a = make_disk(Point2::default(), 1.0, 32).unwrap();
        let b = make_disk(Point2::new(0.5, 0.0), 1.0, 32).unwrap();
        let inner = make_disk(Point2::default(), 0.3, 32).unwrap();
        assert!(Obstacle::new(vec![a.clone(), b]).is_err());
        assert!(Obstacle::new(vec![a.clone(), inner]).is_err());
        let ms = make_multiscale(64).unwrap();
        assert_eq!(ms.components().len(), 2);
        assert!(ms.contains(Point2::new(2.0, 3.0)));
        assert!(ms.contains(Point2::default()));
        assert!(!ms.contains(Point2::new(4.0, 0.0)));
    }

    #[test]
    fn receivers() {
        let r = receiver_array(4, 5.0).unwrap();
        let expect = [(5.0, 0.0), (0.0, 5.0), (-5.0, 0.0), (0.0, -5.0)];
        for (p, (x, y)) in r.points().iter().zip(expect) {
            assert!(close(*p, Point2::new(x, y), 1e-14));
        }
        let r = receiver_array(256, 5.0).unwrap();
        for (j, (p, g)) in r.points().iter().zip(r.angles()).enumerate() {
            assert_eq!(*g, 2.0 * PI * j as f64 / 256.0);
            assert_abs_diff_eq!(p.norm(), 5.0, epsilon = 1e-12);
        }
        assert!(receiver_array(1, 5.0).is_err());
        assert!(receiver_array(8, 0.0).is_err());
    }

    #[test]
    fn sources_zero_perturbation_is_equispaced() {
        let s = source_array(64, 100.0, 0.0, 3).unwrap();
        for (l, t) in s.angles().iter().enumerate() {
            assert_eq!(*t, 2.0 * PI / 64.0 * l as f64);
        }
        assert_abs_diff_eq!(s.weight(), 2.0 * PI * 100.0 / 64.0, epsilon = 1e-12);
        assert!(source_array(8, 100.0, -0.1, 0).is_err());
    }

    #[test]
    fn sources_reproducible() {
        let a = source_array(256, 100.0, 0.4, 11).unwrap();
        let b = source_array(256, 100.0, 0.4, 11).unwrap();
        let c = source_array(256, 100.0, 0.4, 12).unwrap();
        assert_eq!(a.angles(), b.angles());
        assert_ne!(a.angles(), c.angles());
        for p in a.points() {
            assert_abs_diff_eq!(p.norm(), 100.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn grid_layout() {
        let g = sampling_grid([-5.0, 5.0, -5.0, 5.0], 2, 2).unwrap();
        let pts = g.points();
        assert_eq!(
            pts,
            vec![
                Point2::new(-5.0, 5.0),
                Point2::new(5.0, 5.0),
                Point2::new(-5.0, -5.0),
                Point2::new(5.0, -5.0)
            ]
        );
        let g = sampling_grid([-5.0, 5.0, -5.0, 5.0], 200, 200).unwrap();
        assert_abs_diff_eq!(g.spacing().0, 10.0 / 199.0, epsilon = 1e-15);
        assert_eq!(g.point_at(199, 199), Point2::new(5.0, -5.0));
        assert!(sampling_grid([0.0, 0.0, 0.0, 1.0], 3, 3).is_err());
        assert!(sampling_grid([0.0, 1.0, 0.0, 1.0], 1, 3).is_err());
    }

    proptest! {
        #[test]
        fn source_angles_stay_in_their_cells(seed in any::<u64>(), xi in 0.0f64..3.0, count in 2usize..300) {
            let s = source_array(count, 100.0, xi, seed).unwrap();
            let step = 2.0 * PI / count as f64;
            for (l, t) in s.angles().iter().enumerate() {
                prop_assert!(*t >= step * l as f64 - 1e-12);
                prop_assert!(*t <= step * (l as f64 + xi) + 1e-12);
            }
            if xi < 1.0 {
                prop_assert!(s.angles().windows(2).all(|w| w[0] < w[1]));
            }
        }

        #[test]
        fn disk_normals_are_radial(cx in -3.0f64..3.0, cy in -3.0f64..3.0, r in 0.1f64..2.0, t in 0.0f64..6.3) {
            let c = Point2::new(cx, cy);
            let d = make_disk(c, r, 32).unwrap();
            let p = d.eval(t);
            let radial = (p.position - c) * (1.0 / r);
            prop_assert!(p.normal().dist(radial) < 1e-12);
            prop_assert!((p.jacobian() - r).abs() < 1e-12);
        }
    }
}
