//! Scalar summaries of a run.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::geometry::Obstacle;
use crate::imaging::ImageGrid;
use crate::specfun::Point2;

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// `‖C − N^s‖_max / ‖N^s‖_max`
    pub correlation_error: f64,
    /// Largest distance from the threshold level set of the DCM image to the
    /// boundary.
    pub localization_error: f64,
    pub peak_value: f64,
    pub peak_position: Point2,
    /// Same as `localization_error` for the image built from `N^s`.
    pub reference_localization_error: f64,
    /// Wall-clock time per stage. Not written to the metrics file, which
    /// must stay byte-identical between runs.
    pub timings: Vec<(String, Duration)>,
}

impl RunMetrics {
    /// `name,value` lines with a header.
    pub fn to_csv(&self) -> String {
        let rows = [
            ("correlation_error", self.correlation_error),
            ("localization_error", self.localization_error),
            ("peak_value", self.peak_value),
            ("peak_x", self.peak_position.x),
            ("peak_y", self.peak_position.y),
            ("reference_localization_error", self.reference_localization_error),
        ];
        let mut s = String::from("metric,value\n");
        for (k, v) in rows {
            s.push_str(&format!("{k},{v:.16e}\n"));
        }
        s
    }

    pub fn all_finite(&self) -> bool {
        [
            self.correlation_error,
            self.localization_error,
            self.peak_value,
            self.reference_localization_error,
        ]
        .iter()
        .all(|v| v.is_finite())
            && self.peak_position.is_finite()
    }

    pub fn total_time(&self) -> Duration {
        self.timings.iter().map(|(_, d)| *d).sum()
    }
}

/// Largest distance from `{τ : I(τ) ≥ α max I}` to the boundary nodes.
pub fn localization_error(image: &ImageGrid, obstacle: &Obstacle, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Usage(format!("threshold must lie in (0, 1), got {alpha}")));
    }
    if image.max() == image.min() {
        return Err(Error::Domain("indicator is constant; no level set".into()));
    }
    if obstacle.is_empty() {
        return Err(Error::Domain("no boundary to measure against".into()));
    }
    Ok(image
        .level_set(alpha)
        .into_iter()
        .map(|p| obstacle.distance_to_nodes(p))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_disk, sampling_grid};
    use crate::imaging::ImageKind;

    fn ring_image() -> (ImageGrid, Obstacle, f64) {
        let ob = Obstacle::single(make_disk(Point2::default(), 1.0, 256).unwrap());
        let g = sampling_grid([-2.0, 2.0, -2.0, 2.0], 41, 41).unwrap();
        let h = g.spacing().0;
        // 1 on grid nodes nearest the circle, a smooth decay elsewhere
        let vals: Vec<f64> = g
            .points()
            .iter()
            .map(|p| {
                let d = (p.norm() - 1.0).abs();
                if d <= 0.5 * h { 1.0 } else { 0.5 * (-d).exp() }
            })
            .collect();
        (ImageGrid::new(g, vals, ImageKind::Dcm).unwrap(), ob, h)
    }

    #[test]
    fn constructed_case_within_one_spacing() {
        let (img, ob, h) = ring_image();
        let e = localization_error(&img, &ob, 0.9).unwrap();
        assert!(e <= h, "{e} > {h}");
    }

    #[test]
    fn lower_threshold_never_decreases_error() {
        let (img, ob, _) = ring_image();
        let mut last = 0.0;
        for a in [0.95, 0.9, 0.6, 0.45, 0.3, 0.1] {
            let e = localization_error(&img, &ob, a).unwrap();
            assert!(e >= last);
            last = e;
        }
    }

    #[test]
    fn constant_grid_is_domain_error() {
        let (img, ob, _) = ring_image();
        let flat = ImageGrid::new(img.grid().clone(), vec![2.0; img.values().len()], ImageKind::Dcm).unwrap();
        assert!(matches!(localization_error(&flat, &ob, 0.8), Err(Error::Domain(_))));
        assert!(matches!(localization_error(&img, &ob, 1.0), Err(Error::Usage(_))));
    }

    #[test]
    fn metrics_csv_has_no_timings() {
        let m = RunMetrics {
            correlation_error: 0.1,
            localization_error: 0.2,
            peak_value: 3.0,
            peak_position: Point2::new(1.0, -1.0),
            reference_localization_error: 0.3,
            timings: vec![("x".into(), Duration::from_millis(5))],
        };
        let s = m.to_csv();
        assert!(s.starts_with("metric,value\n"));
        assert!(!s.contains("time"));
        assert!(m.all_finite());
        assert_eq!(m.total_time(), Duration::from_millis(5));
    }
}
