//! Numerical pinning certificates and the three-ball pinning criterion.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::chart::{dist2, LineChart, Vec4};
use crate::error::Result;
use crate::geometry::{order_along, Ball, Configuration, Line, OrderedOrder, Point3};
use crate::sampling::stream_rng;
use crate::tol;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinningCertificate {
    pub pinned: bool,
    pub scan_radius: f64,
    /// Largest, over scanned perturbations, of the smallest per-ball slack
    /// `radius - distance`. Negative means every perturbation misses a ball.
    pub min_constraint_slack: f64,
    pub order: OrderedOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { samples: tol::PIN_SCAN_SAMPLES, seed: 0 }
    }
}

const SCAN_CHUNK: usize = 512;

/// Perturbation scan of `l` on the 3-sphere of radius `scan_radius` in line
/// coordinates centered on `l`.
pub fn is_pinned(cfg: &Configuration, l: &Line, scan_radius: f64) -> Result<PinningCertificate> {
    is_pinned_with(cfg, l, scan_radius, &ScanOptions::default())
}

pub fn is_pinned_with(
    cfg: &Configuration,
    l: &Line,
    scan_radius: f64,
    opts: &ScanOptions,
) -> Result<PinningCertificate> {
    let order = validate_transversal(cfg, l)?;
    let centers = cfg.centers();
    let feet: Vec<Point3> = centers.iter().map(|c| l.foot(c)).collect();
    let chart = LineChart::centered(l, &feet);
    let local: Vec<Point3> = centers.iter().map(|c| chart.to_chart(c)).collect();
    let radii: Vec<f64> = cfg.balls().iter().map(|b| b.radius).collect();

    let slack_at =
        |u: &[f64; 4]| local.iter().zip(&radii).map(|(c, r)| r - dist2(u, c).sqrt()).fold(f64::INFINITY, f64::min);
    let chunks = opts.samples.div_ceil(SCAN_CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(opts.seed, k as u64);
            let mut best = f64::NEG_INFINITY;
            for _ in k * SCAN_CHUNK..((k + 1) * SCAN_CHUNK).min(opts.samples) {
                let g = Vec4::from_fn(|_, _| StandardNormal.sample(&mut rng));
                let step = g * (scan_radius / g.norm());
                best = best.max(slack_at(&[step[0], step[1], step[2], step[3]]));
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(PinningCertificate { pinned: best < -tol::GEOM, scan_radius, min_constraint_slack: best, order })
}

/// Scans at every radius in [`tol::PIN_SCAN_RADII`]; pinned only if all
/// shells are blocked. The reported slack is the worst shell's.
pub fn is_pinned_nested(cfg: &Configuration, l: &Line, seed: u64) -> Result<PinningCertificate> {
    let opts = ScanOptions { seed, ..ScanOptions::default() };
    let mut out: Option<PinningCertificate> = None;
    for &rho in &tol::PIN_SCAN_RADII {
        let c = is_pinned_with(cfg, l, rho, &opts)?;
        let worse = out.as_ref().map_or(true, |o| c.min_constraint_slack > o.min_constraint_slack);
        let pinned = out.as_ref().map_or(true, |o| o.pinned) && c.pinned;
        if worse {
            out = Some(PinningCertificate { pinned, ..c });
        } else if let Some(o) = out.as_mut() {
            o.pinned = pinned;
        }
    }
    Ok(out.expect("at least one radius"))
}

fn validate_transversal(cfg: &Configuration, l: &Line) -> Result<OrderedOrder> {
    for (label, ball) in cfg.labels().iter().zip(cfg.balls()) {
        if !ball.meets(l) {
            return Err(crate::Error::NotATransversal(label.clone()));
        }
    }
    order_along(cfg, &l.direction())
}

pub(crate) fn is_tangent(b: &Ball, l: &Line) -> bool {
    (l.distance_to(&b.center) - b.radius).abs() <= tol::GEOM
}

/// Three congruent balls pin `l` exactly when all are tangent to it, their
/// centers lie in one plane with `l`, and in that plane `l` has the middle
/// center on the other side from the outer two.
pub fn triple_pinning_predicate(x: &Ball, y: &Ball, z: &Ball, l: &Line) -> bool {
    let balls = [x, y, z];
    if !balls.iter().all(|b| is_tangent(b, l)) {
        return false;
    }
    let mut sorted: Vec<(f64, nalgebra::Vector3<f64>)> =
        balls.iter().map(|b| (l.param_of(&b.center), b.center - l.foot(&b.center))).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if sorted.windows(2).any(|w| w[1].0 - w[0].0 < tol::GEOM) {
        return false;
    }
    let w: Vec<_> = sorted.iter().map(|(_, off)| off / off.norm()).collect();
    let coplanar = w[0].cross(&w[1]).norm() <= tol::GEOM
        && w[0].cross(&w[2]).norm() <= tol::GEOM
        && w[1].cross(&w[2]).norm() <= tol::GEOM;
    coplanar && w[1].dot(&w[0]) < 0.0 && w[1].dot(&w[2]) < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn unit(p: [f64; 3]) -> Ball {
        Ball::unit(Vec3::new(p[0], p[1], p[2]))
    }

    #[test]
    fn triple_predicate_cases() {
        let x = Line::x_axis();
        assert!(triple_pinning_predicate(&unit([0.0, 1.0, 0.0]), &unit([2.0, -1.0, 0.0]), &unit([4.0, 1.0, 0.0]), &x));
        assert!(!triple_pinning_predicate(&unit([0.0, 1.0, 0.0]), &unit([2.0, 1.0, 0.0]), &unit([4.0, 1.0, 0.0]), &x));
        assert!(!triple_pinning_predicate(&unit([0.0, 1.0, 0.1]), &unit([2.0, -1.0, 0.0]), &unit([4.0, 1.0, 0.0]), &x));
        // Argument order is irrelevant.
        assert!(triple_pinning_predicate(&unit([4.0, 1.0, 0.0]), &unit([0.0, 1.0, 0.0]), &unit([2.0, -1.0, 0.0]), &x));
    }

    #[test]
    fn tri_tangent_triple_is_pinned() {
        let cfg = Configuration::unit(&[Vec3::new(0.0, 1.0, 0.0), Vec3::new(2.0, -1.0, 0.0), Vec3::new(4.0, 1.0, 0.0)])
            .unwrap();
        let c = is_pinned(&cfg, &Line::x_axis(), 1e-3).unwrap();
        assert!(c.pinned, "{c:?}");
        assert_eq!(c.order.to_string(), "ABC");
        assert!(is_pinned_nested(&cfg, &Line::x_axis(), 3).unwrap().pinned);
    }

    #[test]
    fn free_lines_are_not_pinned() {
        let collinear =
            Configuration::unit(&[Vec3::zeros(), Vec3::x() * 2.0, Vec3::x() * 4.0, Vec3::x() * 6.0]).unwrap();
        let c = is_pinned(&collinear, &Line::x_axis(), 1e-3).unwrap();
        assert!(!c.pinned && c.min_constraint_slack > 0.0);
        let pair = Configuration::unit(&[Vec3::new(0.0, 1.0, 0.0), Vec3::new(3.0, -1.0, 0.0)]).unwrap();
        assert!(!is_pinned_nested(&pair, &Line::x_axis(), 0).unwrap().pinned);
        let missed = is_pinned(&pair, &Line::y_axis(), 1e-3);
        assert!(missed.is_err());
    }
}
