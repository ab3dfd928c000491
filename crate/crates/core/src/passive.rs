//! Passive measurements: total fields recorded at the receivers for point
//! sources at unknown random positions, optional multiplicative noise, and
//! the receiver-pair calibration term `Im φ(x_j, x_m)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::{BiesSystem, Representation};
use crate::geometry::{Obstacle, ReceiverArray, SourceArray};
use crate::rng;
use crate::specfun::{green_raw, WaveContext};
use crate::CMatrix;

/// `u(x_j, z_l)` for all receivers `j` (rows) and sources `l` (columns).
#[derive(Debug, Clone)]
pub struct PassiveRecord {
    data: CMatrix,
    receivers: ReceiverArray,
    sources: SourceArray,
    ctx: WaveContext,
    delta: f64,
    noise_seed: Option<u64>,
}

impl PassiveRecord {
    /// Wrap an existing `J × L` matrix of total fields.
    pub fn from_parts(
        data: CMatrix,
        receivers: ReceiverArray,
        sources: SourceArray,
        ctx: WaveContext,
    ) -> Result<Self> {
        if data.nrows() != receivers.len() || data.ncols() != sources.len() {
            return Err(Error::Usage(format!(
                "record is {}x{}, arrays are {}x{}",
                data.nrows(),
                data.ncols(),
                receivers.len(),
                sources.len()
            )));
        }
        Ok(Self { data, receivers, sources, ctx, delta: 0.0, noise_seed: None })
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn receivers(&self) -> &ReceiverArray {
        &self.receivers
    }

    pub fn sources(&self) -> &SourceArray {
        &self.sources
    }

    pub fn context(&self) -> WaveContext {
        self.ctx
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn noise_seed(&self) -> Option<u64> {
        self.noise_seed
    }

    /// Multiply every entry by `s`.
    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.data *= s;
        out
    }

    /// Record minus the incident field at the true source positions. Only an
    /// oracle knows these positions; used for baselines.
    pub fn scattered_part(&self) -> CMatrix {
        let k = self.ctx.k();
        let rec = self.receivers.points();
        let src = self.sources.points();
        CMatrix::from_fn(rec.len(), src.len(), |j, l| {
            self.data[(j, l)] - green_raw(k, rec[j].dist(src[l]))
        })
    }
}

/// Synthesize the clean record with a combined-field solver at coupling `k`.
pub fn synth_record(
    obstacle: &Obstacle,
    ctx: WaveContext,
    sources: &SourceArray,
    receivers: &ReceiverArray,
) -> Result<PassiveRecord> {
    let system = BiesSystem::assemble(obstacle, ctx, Representation::default_for(ctx))?;
    synth_record_with(&system, sources, receivers)
}

/// Synthesize the clean record with an already factorized system.
pub fn synth_record_with(
    system: &BiesSystem,
    sources: &SourceArray,
    receivers: &ReceiverArray,
) -> Result<PassiveRecord> {
    let ctx = system.context();
    let k = ctx.k();
    let mut data = system.scattered_field(receivers.points(), sources.points())?;
    for (l, z) in sources.points().iter().enumerate() {
        for (j, x) in receivers.points().iter().enumerate() {
            if x == z {
                return Err(Error::Singularity(format!("receiver {x} coincides with a source")));
            }
            data[(j, l)] += green_raw(k, x.dist(*z));
        }
    }
    PassiveRecord::from_parts(data, receivers.clone(), sources.clone(), ctx)
}

/// `u^δ = u (1 + δΔ)` with `Δ` real standard normal, independent per entry.
/// Column `l` draws from stream `l` of `seed`, so the result does not depend
/// on the number of worker threads.
pub fn apply_noise(rec: &PassiveRecord, delta: f64, seed: u64) -> Result<PassiveRecord> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("noise level must be >= 0, got {delta}")));
    }
    let mut out = rec.clone();
    out.delta = delta;
    out.noise_seed = Some(seed);
    if delta == 0.0 {
        return Ok(out);
    }
    let rows = rec.data.nrows();
    let columns: Vec<Vec<Complex64>> = (0..rec.data.ncols())
        .into_par_iter()
        .map(|l| {
            let mut r = rng::stream(seed, l as u64);
            (0..rows)
                .map(|j| {
                    let d: f64 = StandardNormal.sample(&mut r);
                    rec.data[(j, l)] * (1.0 + delta * d)
                })
                .collect()
        })
        .collect();
    for (l, col) in columns.into_iter().enumerate() {
        for (j, v) in col.into_iter().enumerate() {
            out.data[(j, l)] = v;
        }
    }
    Ok(out)
}

/// `Im φ(x_j, x_m) = J₀(k|x_j − x_m|)/4` over receiver pairs.
#[derive(Debug, Clone)]
pub struct CalibrationMatrix {
    data: DMatrix<f64>,
    receivers: ReceiverArray,
    ctx: WaveContext,
}

impl CalibrationMatrix {
    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn receivers(&self) -> &ReceiverArray {
        &self.receivers
    }

    pub fn context(&self) -> WaveContext {
        self.ctx
    }
}

pub fn calibration(receivers: &ReceiverArray, ctx: WaveContext) -> CalibrationMatrix {
    let p = receivers.points();
    let n = p.len();
    let mut data = DMatrix::zeros(n, n);
    for j in 0..n {
        data[(j, j)] = 0.25;
        for m in j + 1..n {
            let v = 0.25 * libm::j0(ctx.k() * p[j].dist(p[m]));
            data[(j, m)] = v;
            data[(m, j)] = v;
        }
    }
    CalibrationMatrix { data, receivers: receivers.clone(), ctx }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_kite, receiver_array, source_array};
    use std::f64::consts::PI;

    fn ctx() -> WaveContext {
        WaveContext::new(2.0 * PI).unwrap()
    }

    #[test]
    fn empty_obstacle_gives_green_matrix() {
        let rec = receiver_array(16, 5.0).unwrap();
        let src = source_array(12, 100.0, 0.4, 3).unwrap();
        let r = synth_record(&Obstacle::empty(), ctx(), &src, &rec).unwrap();
        for j in 0..16 {
            for l in 0..12 {
                let g = green_raw(ctx().k(), rec.points()[j].dist(src.points()[l]));
                assert_eq!(r.data()[(j, l)], g);
            }
        }
        assert_eq!(r.scattered_part(), CMatrix::zeros(16, 12));
    }

    #[test]
    fn record_reciprocity_under_role_swap() {
        // swap one receiver and one source: u(x_0, z_0) must agree
        let ob = Obstacle::single(make_kite(256).unwrap());
        let rec = receiver_array(8, 5.0).unwrap();
        let src = source_array(8, 100.0, 0.4, 5).unwrap();
        let a = synth_record(&ob, ctx(), &src, &rec).unwrap();
        let sys = BiesSystem::assemble(&ob, ctx(), Representation::default_for(ctx())).unwrap();
        let swapped = sys
            .scattered_field(&[src.points()[0]], &[rec.points()[0]])
            .unwrap()[(0, 0)]
            + green_raw(ctx().k(), rec.points()[0].dist(src.points()[0]));
        let v = a.data()[(0, 0)];
        assert!((v - swapped).norm() < 1e-8 * v.norm());
    }

    #[test]
    fn zero_noise_is_identity_and_noise_is_deterministic() {
        let rec = receiver_array(8, 5.0).unwrap();
        let src = source_array(8, 100.0, 0.4, 5).unwrap();
        let r = synth_record(&Obstacle::empty(), ctx(), &src, &rec).unwrap();
        assert_eq!(apply_noise(&r, 0.0, 9).unwrap().data(), r.data());
        let a = apply_noise(&r, 0.2, 9).unwrap();
        let b = apply_noise(&r, 0.2, 9).unwrap();
        let c = apply_noise(&r, 0.2, 10).unwrap();
        assert_eq!(a.data(), b.data());
        assert_ne!(a.data(), c.data());
        assert!(matches!(apply_noise(&r, -0.1, 9), Err(Error::Domain(_))));
    }

    #[test]
    fn noise_statistics() {
        let n = 256;
        let data = CMatrix::from_element(n, n, Complex64::new(0.3, -0.2));
        let rec = receiver_array(n, 5.0).unwrap();
        let src = source_array(n, 100.0, 0.0, 1).unwrap();
        let r = PassiveRecord::from_parts(data, rec, src, ctx()).unwrap();
        let noisy = apply_noise(&r, 0.2, 42).unwrap();
        let ratios: Vec<f64> = noisy
            .data()
            .iter()
            .zip(r.data().iter())
            .map(|(a, b)| {
                let q = a / b - 1.0;
                assert!(q.im.abs() < 1e-12, "noise must be real");
                q.re
            })
            .collect();
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let var = ratios.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (ratios.len() - 1) as f64;
        assert!((var.sqrt() - 0.2).abs() < 0.05 * 0.2, "std {}", var.sqrt());
    }

    #[test]
    fn zero_entries_stay_zero() {
        let mut data = CMatrix::from_element(4, 4, Complex64::new(1.0, 1.0));
        data[(1, 2)] = Complex64::new(0.0, 0.0);
        let r = PassiveRecord::from_parts(
            data,
            receiver_array(4, 5.0).unwrap(),
            source_array(4, 100.0, 0.0, 1).unwrap(),
            ctx(),
        )
        .unwrap();
        let n = apply_noise(&r, 0.4, 3).unwrap();
        assert_eq!(n.data()[(1, 2)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn calibration_values() {
        let rec = receiver_array(32, 5.0).unwrap();
        let c = calibration(&rec, ctx());
        for j in 0..32 {
            assert_eq!(c.data()[(j, j)], 0.25);
            for m in 0..32 {
                assert_eq!(c.data()[(j, m)], c.data()[(m, j)]);
            }
        }
        // receivers placed so that k|x_0 − x_1| = 1
        let k1 = WaveContext::new(1.0).unwrap();
        let pts = receiver_array(2, 0.5).unwrap();
        assert!((pts.points()[0].dist(pts.points()[1]) - 1.0).abs() < 1e-15);
        let c = calibration(&pts, k1);
        assert!((c.data()[(0, 1)] - 0.191_299_421_64).abs() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_is_usage_error() {
        let r = PassiveRecord::from_parts(
            CMatrix::zeros(3, 4),
            receiver_array(4, 5.0).unwrap(),
            source_array(4, 100.0, 0.0, 1).unwrap(),
            ctx(),
        );
        assert!(matches!(r, Err(Error::Usage(_))));
    }
}
