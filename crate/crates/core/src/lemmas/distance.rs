//! The four-ball distance inequality along a transversal, its three-ball
//! contrast and the decomposition identities behind it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{stabbing_order, Configuration, Line, OrderedOrder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceCheck {
    pub holds: bool,
    pub margin: f64,
}

/// Validates that `l` stabs `cfg` in label order (either orientation).
fn check_label_order(cfg: &Configuration, l: &Line) -> Result<()> {
    let order = stabbing_order(cfg, l)?;
    let natural = OrderedOrder::new(cfg.labels().to_vec())?;
    if order == natural || order == natural.reversed() {
        Ok(())
    } else {
        Err(Error::WrongOrder)
    }
}

fn dist(cfg: &Configuration, i: usize, j: usize) -> f64 {
    (cfg.ball(i).center - cfg.ball(j).center).norm()
}

/// `margin = |ad| - max(|ab|, |bc|, |cd|)` for the four balls of `cfg`,
/// taken in label order, stabbed by `l` in that order.
pub fn check_distance_lemma(cfg: &Configuration, l: &Line) -> Result<DistanceCheck> {
    if cfg.len() != 4 {
        return Err(Error::InputInvalid(format!("expected 4 balls, got {}", cfg.len())));
    }
    check_label_order(cfg, l)?;
    let consecutive = dist(cfg, 0, 1).max(dist(cfg, 1, 2)).max(dist(cfg, 2, 3));
    let margin = dist(cfg, 0, 3) - consecutive;
    Ok(DistanceCheck { holds: margin > 0.0, margin })
}

/// Three-ball analogue: `margin = |ac| - |ab|`. Negative margins exist, so
/// the four-ball statement does not shorten to three balls.
pub fn check_three_ball_contrast(cfg: &Configuration, l: &Line) -> Result<DistanceCheck> {
    if cfg.len() != 3 {
        return Err(Error::InputInvalid(format!("expected 3 balls, got {}", cfg.len())));
    }
    check_label_order(cfg, l)?;
    let margin = dist(cfg, 0, 2) - dist(cfg, 0, 1);
    Ok(DistanceCheck { holds: margin > 0.0, margin })
}

/// Splitting of squared center distances into the part along `l` (feet gaps
/// `d1, d2, d3`) and the part in the normal plane (starred distances).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceIdentities {
    pub gaps: [f64; 3],
    pub delta: f64,
    /// `|ad|^2 - |ab|^2`, `|ad|^2 - |bc|^2`, `|ad|^2 - |cd|^2`.
    pub lhs: [f64; 3],
    /// The same three quantities rebuilt from gaps and normal-plane distances.
    pub rhs: [f64; 3],
    /// Largest `|lhs - rhs|`.
    pub residual: f64,
}

pub fn distance_identities(cfg: &Configuration, l: &Line) -> Result<DistanceIdentities> {
    if cfg.len() != 4 {
        return Err(Error::InputInvalid(format!("expected 4 balls, got {}", cfg.len())));
    }
    check_label_order(cfg, l)?;
    let c = cfg.centers();
    let s: Vec<f64> = c.iter().map(|p| l.param_of(p)).collect();
    let sign = if s[3] >= s[0] { 1.0 } else { -1.0 };
    let gaps = [sign * (s[1] - s[0]), sign * (s[2] - s[1]), sign * (s[3] - s[2])];
    let [d1, d2, d3] = gaps;
    let delta = 2.0 * (d1 * d2 + d1 * d3 + d2 * d3);
    let star: Vec<_> = c.iter().map(|p| p - l.foot(p)).collect();
    let st = |i: usize, j: usize| (star[i] - star[j]).norm_squared();
    let sq = |i: usize, j: usize| (c[i] - c[j]).norm_squared();
    let lhs = [sq(0, 3) - sq(0, 1), sq(0, 3) - sq(1, 2), sq(0, 3) - sq(2, 3)];
    let rhs = [
        delta + d2 * d2 + d3 * d3 + st(0, 3) - st(0, 1),
        delta + d1 * d1 + d3 * d3 + st(0, 3) - st(1, 2),
        delta + d1 * d1 + d2 * d2 + st(0, 3) - st(2, 3),
    ];
    let residual = (0..3).map(|k| (lhs[k] - rhs[k]).abs()).fold(0.0, f64::max);
    Ok(DistanceIdentities { gaps, delta, lhs, rhs, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::lemmas::random::random_transversal_instance;
    use crate::sampling::stream_rng;

    fn collinear(n: usize) -> Configuration {
        let c: Vec<Vec3> = (0..n).map(|i| Vec3::new(2.0 * i as f64, 0.0, 0.0)).collect();
        Configuration::unit(&c).unwrap()
    }

    #[test]
    fn collinear_margin_is_four() {
        let r = check_distance_lemma(&collinear(4), &Line::x_axis()).unwrap();
        assert!((r.margin - 4.0).abs() < 1e-12);
        assert!(r.holds);
        let rev = check_distance_lemma(&collinear(4), &Line::x_axis().reversed()).unwrap();
        assert_eq!(r, rev);
    }

    #[test]
    fn rejects_wrong_input() {
        assert!(matches!(check_distance_lemma(&collinear(3), &Line::x_axis()), Err(Error::InputInvalid(_))));
        assert!(matches!(check_distance_lemma(&collinear(4), &Line::y_axis()), Err(Error::NotATransversal(_))));
        let swapped = Configuration::unit(&[
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(4.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(6.0, 0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(check_distance_lemma(&swapped, &Line::x_axis()), Err(Error::WrongOrder));
    }

    #[test]
    fn three_balls_can_violate() {
        let cfg =
            Configuration::unit(&[Vec3::new(0.0, -0.95, 0.0), Vec3::new(1.4, 0.95, 0.0), Vec3::new(2.2, -0.95, 0.0)])
                .unwrap();
        let r = check_three_ball_contrast(&cfg, &Line::x_axis()).unwrap();
        assert!(!r.holds);
        assert!(r.margin < -0.1);
    }

    #[test]
    fn identities_and_margin_on_random_instances() {
        let mut rng = stream_rng(11, 0);
        for _ in 0..2000 {
            let (cfg, l) = random_transversal_instance(4, 3.0, &mut rng);
            let id = distance_identities(&cfg, &l).unwrap();
            assert!(id.residual < 1e-9, "{id:?}");
            assert!(id.gaps.iter().all(|g| *g > 0.0));
            assert!(check_distance_lemma(&cfg, &l).unwrap().holds);
        }
    }
}
