//! Angle between a transversal and the chord joining its extreme centers.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{stabbing_order, Ball, Configuration, Line};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleCheck {
    pub holds: bool,
    pub angle: f64,
}

pub(crate) fn labeled(balls: &[Ball], labels: &[&str]) -> Result<Configuration> {
    Configuration::new(labels.iter().map(|s| s.to_string()).zip(balls.iter().copied()).collect())
}

/// Angle between the direction of `l` and `c - a`, where `l` meets `a`, `b`,
/// `c` in that order.
pub fn check_angle_lemma(a: &Ball, b: &Ball, c: &Ball, l: &Line) -> Result<AngleCheck> {
    let cfg = labeled(&[*a, *b, *c], &["A", "B", "C"])?;
    if stabbing_order(&cfg, l)?.to_string() != "ABC" {
        return Err(Error::WrongOrder);
    }
    let ac = c.center - a.center;
    let cos = (l.direction().dot(&ac) / ac.norm()).clamp(-1.0, 1.0);
    let angle = cos.acos();
    Ok(AngleCheck { holds: angle < FRAC_PI_4 + tol::GEOM, angle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::lemmas::random::random_transversal_instance;
    use crate::sampling::stream_rng;

    fn unit(x: f64, y: f64, z: f64) -> Ball {
        Ball::unit(Vec3::new(x, y, z))
    }

    #[test]
    fn collinear_angle_is_zero() {
        let r = check_angle_lemma(&unit(0., 0., 0.), &unit(2., 0., 0.), &unit(4., 0., 0.), &Line::x_axis()).unwrap();
        assert!(r.angle.abs() < 1e-12 && r.holds);
    }

    #[test]
    fn swapped_roles_are_rejected() {
        let r = check_angle_lemma(&unit(2., 0., 0.), &unit(0., 0., 0.), &unit(4., 0., 0.), &Line::x_axis());
        assert_eq!(r, Err(Error::WrongOrder));
    }

    #[test]
    fn random_triples_satisfy_bound() {
        let mut rng = stream_rng(5, 0);
        for _ in 0..5000 {
            let (cfg, l) = random_transversal_instance(3, 3.0, &mut rng);
            let b = cfg.balls();
            assert!(check_angle_lemma(&b[0], &b[1], &b[2], &l).unwrap().holds);
        }
    }
}
