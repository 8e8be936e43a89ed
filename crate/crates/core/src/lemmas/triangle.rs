//! Angle constraints on a ball triple stabbed in the orders XYZ and XZY.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{canonicalize, stabbing_order, Ball, Line, OrderedOrder, Point3};
use crate::lemmas::angle::labeled;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleReport {
    /// Interior angles at `x`, `y` and `z`.
    pub angles: [f64; 3],
    pub acute: [bool; 3],
    pub yz: f64,
    /// `2√2 - |yz|`, reported when both orders are witnessed.
    pub yz_margin: Option<f64>,
    /// Whether every claim implied by the supplied witnesses holds.
    pub claims_hold: bool,
}

fn angle_at(p: &Point3, q: &Point3, r: &Point3) -> f64 {
    let (u, v) = (q - p, r - p);
    (u.dot(&v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos()
}

/// Checks the angle claims for whichever of the orders XYZ, XZY is
/// witnessed. XYZ forces acute angles at `x` and `z`; XZY at `x` and `y`;
/// both together force `|yz| < 2√2`.
pub fn check_triangle_lemmas(
    x: &Ball,
    y: &Ball,
    z: &Ball,
    xyz: Option<&Line>,
    xzy: Option<&Line>,
) -> Result<TriangleReport> {
    if xyz.is_none() && xzy.is_none() {
        return Err(Error::InputInvalid("no witness line given".into()));
    }
    let cfg = labeled(&[*x, *y, *z], &["X", "Y", "Z"])?;
    for (line, name) in [(xyz, "XYZ"), (xzy, "XZY")] {
        if let Some(l) = line {
            let gp = canonicalize(&stabbing_order(&cfg, l)?);
            if !gp.contains(&OrderedOrder::parse(name)?) {
                return Err(Error::WrongOrder);
            }
        }
    }
    let (a, b, c) = (x.center, y.center, z.center);
    let angles = [angle_at(&a, &b, &c), angle_at(&b, &c, &a), angle_at(&c, &a, &b)];
    let acute = angles.map(|t| t < FRAC_PI_2);
    let yz = (b - c).norm();
    let both = xyz.is_some() && xzy.is_some();
    let yz_margin = both.then(|| 2.0 * SQRT_2 - yz);
    let mut claims_hold = acute[0];
    if xyz.is_some() {
        claims_hold &= acute[2];
    }
    if xzy.is_some() {
        claims_hold &= acute[1];
    }
    if let Some(m) = yz_margin {
        claims_hold &= m > 0.0;
    }
    Ok(TriangleReport { angles, acute, yz, yz_margin, claims_hold })
}
