//! Cylinder functions of orders zero and one and the outgoing Green kernel of
//! the 2D Helmholtz operator, `φ(x, z) = (i/4) H₀⁽¹⁾(k|x − z|)`.
//!
//! The checked entry points validate their arguments and return
//! [`Error::Domain`] / [`Error::Singularity`]. Hot loops inside the crate use
//! the unchecked `h0`/`h1`/`green_raw` helpers after validating once.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Wavenumber `k > 0`, radians per unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveContext {
    k: f64,
}

impl WaveContext {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be finite and positive, got {k}")));
        }
        Ok(Self { k })
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `2π / k`.
    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k
    }
}

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at polar angle `theta`.
    #[inline]
    pub fn polar(radius: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(radius * c, radius * s)
    }

    #[inline]
    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    #[inline]
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

fn check_nonneg(name: &str, t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name}: argument must be finite and >= 0, got {t}")))
    }
}

fn check_pos(name: &str, t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name}: argument must be finite and > 0, got {t}")))
    }
}

pub fn bessel_j0(t: f64) -> Result<f64> {
    check_nonneg("bessel_j0", t)?;
    Ok(libm::j0(t))
}

pub fn bessel_j1(t: f64) -> Result<f64> {
    check_nonneg("bessel_j1", t)?;
    Ok(libm::j1(t))
}

pub fn bessel_y0(t: f64) -> Result<f64> {
    check_pos("bessel_y0", t)?;
    Ok(libm::y0(t))
}

pub fn bessel_y1(t: f64) -> Result<f64> {
    check_pos("bessel_y1", t)?;
    Ok(libm::y1(t))
}

/// `H₀⁽¹⁾(t) = J₀(t) + i Y₀(t)`.
pub fn hankel1_0(t: f64) -> Result<Complex64> {
    check_pos("hankel1_0", t)?;
    Ok(h0(t))
}

/// `H₁⁽¹⁾(t) = J₁(t) + i Y₁(t)`.
pub fn hankel1_1(t: f64) -> Result<Complex64> {
    check_pos("hankel1_1", t)?;
    Ok(h1(t))
}

#[inline]
pub(crate) fn h0(t: f64) -> Complex64 {
    Complex64::new(libm::j0(t), libm::y0(t))
}

#[inline]
pub(crate) fn h1(t: f64) -> Complex64 {
    Complex64::new(libm::j1(t), libm::y1(t))
}

/// `(i/4) H₀⁽¹⁾(k r)` for `r > 0`, no checks.
#[inline]
pub(crate) fn green_raw(k: f64, r: f64) -> Complex64 {
    let h = h0(k * r);
    // (i/4)(J + iY) = -Y/4 + i J/4
    Complex64::new(-0.25 * h.im, 0.25 * h.re)
}

/// Outgoing fundamental solution `φ(x, z) = (i/4) H₀⁽¹⁾(k|x − z|)`.
pub fn green(ctx: WaveContext, x: Point2, z: Point2) -> Result<Complex64> {
    let r = x.dist(z);
    if !r.is_finite() {
        return Err(Error::Domain(format!("non-finite point in green: {x}, {z}")));
    }
    if r == 0.0 {
        return Err(Error::Singularity(format!("green evaluated at coincident points {x}")));
    }
    Ok(green_raw(ctx.k, r))
}

/// `Im φ(x, z) = J₀(k|x − z|)/4`, which stays finite on the diagonal.
pub fn green_imag(ctx: WaveContext, x: Point2, z: Point2) -> f64 {
    0.25 * libm::j0(ctx.k * x.dist(z))
}

/// `∂φ(x, y)/∂ν(y) = (ik/4) H₁⁽¹⁾(k|x − y|) (x − y)·ν(y) / |x − y|`.
pub fn green_normal_derivative(
    ctx: WaveContext,
    x: Point2,
    y: Point2,
    n_y: Point2,
) -> Result<Complex64> {
    if (n_y.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("normal {n_y} is not a unit vector")));
    }
    let d = x - y;
    let r = d.norm();
    if !r.is_finite() {
        return Err(Error::Domain(format!("non-finite point in kernel: {x}, {y}")));
    }
    if r == 0.0 {
        return Err(Error::Singularity(format!("double-layer kernel at coincident points {x}")));
    }
    Ok(double_layer_raw(ctx.k, d, r, n_y))
}

/// `(ik/4) H₁⁽¹⁾(k r) (d·n)/r` with `d = x − y`, `r = |d|`; `n` need not be unit.
#[inline]
pub(crate) fn double_layer_raw(k: f64, d: Point2, r: f64, n: Point2) -> Complex64 {
    let h = h1(k * r);
    let s = 0.25 * k * d.dot(n) / r;
    // i s (J + iY) = -sY + i sJ
    Complex64::new(-s * h.im, s * h.re)
}
