//! Four unit balls tangent to the x-axis with centers on the quadric
//! `xy = hz`, parameterized by `h` and one number `t` per ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Line, Point3, Vec3};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperboloidalParams {
    pub h: f64,
    pub t: [f64; 4],
}

impl HyperboloidalParams {
    pub fn new(h: f64, t: [f64; 4]) -> Result<Self> {
        let p = HyperboloidalParams { h, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.h.is_finite() || self.t.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if self.h == 0.0 {
            return Err(Error::DegenerateParameter("h = 0".into()));
        }
        for (i, &t) in self.t.iter().enumerate() {
            if (1.0 - t * t).abs() < tol::POLE {
                return Err(Error::DegenerateParameter(format!("t[{i}] = {t} is at a pole")));
            }
            for &s in &self.t[..i] {
                if s == t {
                    return Err(Error::DegenerateParameter(format!("repeated t = {t}")));
                }
            }
        }
        Ok(())
    }
}

/// Center for parameter `t`: `(2ht/(1-t^2), (1-t^2)/(1+t^2), 2t/(1+t^2))`.
pub fn center(h: f64, t: f64) -> Point3 {
    let (a, b) = (1.0 - t * t, 1.0 + t * t);
    Vec3::new(2.0 * h * t / a, a / b, 2.0 * t / b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperboloidalInstance {
    pub params: HyperboloidalParams,
    pub centers: [Point3; 4],
    pub line: Line,
    /// Every center is at distance 1 from the x-axis (within 1e-12).
    pub tangent: bool,
    /// Pairwise center distances are at least 2 (within the geometric
    /// tolerance).
    pub non_overlapping: bool,
}

impl HyperboloidalInstance {
    /// The unit-ball configuration labeled A–D; fails with `Overlap` when
    /// the centers are too close.
    pub fn configuration(&self) -> Result<Configuration> {
        Configuration::unit(&self.centers)
    }

    pub fn min_pair_distance(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                m = m.min((self.centers[i] - self.centers[j]).norm());
            }
        }
        m
    }
}

pub fn make_hyperboloidal(p: &HyperboloidalParams) -> Result<HyperboloidalInstance> {
    p.validate()?;
    let centers = p.t.map(|t| center(p.h, t));
    let tangent = centers.iter().all(|c| ((c.y * c.y + c.z * c.z).sqrt() - 1.0).abs() <= 1e-12);
    let mut inst = HyperboloidalInstance { params: *p, centers, line: Line::x_axis(), tangent, non_overlapping: true };
    inst.non_overlapping = inst.min_pair_distance() >= 2.0 - tol::GEOM;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pinning::screens::{classify_minimal_pinning, PinningClass};

    #[test]
    fn basic_cases() {
        for h in [-2.0, 0.5, 3.0] {
            assert_eq!(center(h, 0.0), Vec3::new(0.0, 1.0, 0.0));
        }
        assert!(matches!(HyperboloidalParams::new(1.0, [1.0, 0.0, 2.0, 3.0]), Err(Error::DegenerateParameter(_))));
        assert!(matches!(HyperboloidalParams::new(0.0, [0.1, 0.0, 2.0, 3.0]), Err(Error::DegenerateParameter(_))));
    }

    #[test]
    fn centers_are_on_the_quadric_and_tangent() {
        let p = HyperboloidalParams::new(1.3, [-3.0, -0.5, 0.5, 3.0]).unwrap();
        let inst = make_hyperboloidal(&p).unwrap();
        assert!(inst.tangent);
        for c in &inst.centers {
            assert!((c.x * c.y - p.h * c.z).abs() < 1e-12);
            assert!((c.y * c.y + c.z * c.z - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parameter_symmetries_give_congruent_sets() {
        // t -> -1/t reflects y; the pairwise distances are unchanged.
        let t = [-2.5, -0.4, 0.3, 4.0];
        let a = make_hyperboloidal(&HyperboloidalParams::new(0.7, t).unwrap()).unwrap();
        let b = make_hyperboloidal(&HyperboloidalParams::new(0.7, t.map(|x| -1.0 / x)).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let da = (a.centers[i] - a.centers[j]).norm();
                let db = (b.centers[i] - b.centers[j]).norm();
                assert!((da - db).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn alternating_instance_classifies() {
        let p = HyperboloidalParams::new(1.0, [-0.8, 1.5, 0.3, -1.5]).unwrap();
        let inst = make_hyperboloidal(&p).unwrap();
        if let Ok(cfg) = inst.configuration() {
            let c = classify_minimal_pinning(&cfg, &inst.line).unwrap();
            assert_eq!(c.class, PinningClass::Hyperboloidal);
            assert_eq!(c.rank, 3);
            assert_eq!(c.alternation, Some(true));
            assert_eq!(c.first_order_blocked, true);
        } else {
            panic!("overlap {}", inst.min_pair_distance());
        }
    }
}
