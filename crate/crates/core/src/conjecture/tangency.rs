//! The direct formulation: four balls in a normalized frame and two explicit
//! lines that should realize ABCD and ACDB.

use serde::{Deserialize, Serialize};

use crate::geometry::{Configuration, Line, Point3, Vec3};
use crate::sampling::perp_basis;

/// Centers `a = 0`, `b = (xb, 0, 0)`, `c = (xc, yc, 0)`,
/// `d = (xd, yd, zd)`. Each line is `[θ, φ, p, q]`: direction from polar
/// angle `θ` and azimuth `φ`, anchor `p e1 + q e2` in the plane through the
/// origin normal to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencySearchState {
    pub xb: f64,
    pub xc: f64,
    pub yc: f64,
    pub xd: f64,
    pub yd: f64,
    pub zd: f64,
    pub line1: [f64; 4],
    pub line2: [f64; 4],
}

pub const DIM: usize = 14;

fn direction(theta: f64, phi: f64) -> Vec3 {
    Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

fn line_of(p: &[f64; 4]) -> (Vec3, Point3) {
    let v = direction(p[0], p[1]);
    let (e1, e2) = perp_basis(&v);
    (v, e1 * p[2] + e2 * p[3])
}

/// Inverse of [`line_of`] for a line given by anchor and direction.
fn params_of(l: &Line) -> [f64; 4] {
    let v = l.direction();
    let theta = v.z.clamp(-1.0, 1.0).acos();
    let phi = v.y.atan2(v.x);
    let v2 = direction(theta, phi);
    let (e1, e2) = perp_basis(&v2);
    let a = l.anchor();
    [theta, phi, a.dot(&e1), a.dot(&e2)]
}

impl TangencySearchState {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.xb, self.xc, self.yc, self.xd, self.yd, self.zd];
        v.extend(self.line1);
        v.extend(self.line2);
        v
    }

    pub fn from_slice(x: &[f64]) -> Self {
        TangencySearchState {
            xb: x[0],
            xc: x[1],
            yc: x[2],
            xd: x[3],
            yd: x[4],
            zd: x[5],
            line1: [x[6], x[7], x[8], x[9]],
            line2: [x[10], x[11], x[12], x[13]],
        }
    }

    pub fn centers(&self) -> [Point3; 4] {
        [
            Point3::zeros(),
            Point3::new(self.xb, 0.0, 0.0),
            Point3::new(self.xc, self.yc, 0.0),
            Point3::new(self.xd, self.yd, self.zd),
        ]
    }

    pub fn lines(&self) -> Option<(Line, Line)> {
        let mk = |p: &[f64; 4]| {
            let (v, a) = line_of(p);
            Line::new(a, v).ok()
        };
        Some((mk(&self.line1)?, mk(&self.line2)?))
    }

    pub fn configuration(&self) -> crate::error::Result<Configuration> {
        Configuration::unit(&self.centers())
    }

    /// Normalizes `centers` (labels A–D) and the two lines into the frame
    /// with `a` at the origin, `b` on the positive x-axis and `c` in the
    /// upper xy-plane. Returns `None` for collinear `a, b, c`.
    pub fn from_geometry(centers: &[Point3; 4], l1: &Line, l2: &Line) -> Option<Self> {
        let e1 = (centers[1] - centers[0]).try_normalize(1e-12)?;
        let w = centers[2] - centers[0];
        let e2 = (w - e1 * w.dot(&e1)).try_normalize(1e-12)?;
        let e3 = e1.cross(&e2);
        let to = |p: &Point3| {
            let r = p - centers[0];
            Point3::new(r.dot(&e1), r.dot(&e2), r.dot(&e3))
        };
        let map = |l: &Line| {
            let a = to(&l.anchor());
            let d = l.direction();
            Line::new(a, Vec3::new(d.dot(&e1), d.dot(&e2), d.dot(&e3))).ok()
        };
        let (b, c, d) = (to(&centers[1]), to(&centers[2]), to(&centers[3]));
        Some(TangencySearchState {
            xb: b.x,
            xc: c.x,
            yc: c.y,
            xd: d.x,
            yd: d.y,
            zd: d.z,
            line1: params_of(&map(l1)?),
            line2: params_of(&map(l2)?),
        })
    }
}

const ORDER1: [usize; 4] = [0, 1, 2, 3];
const ORDER2: [usize; 4] = [0, 2, 3, 1];

/// Largest residual among non-overlap `4 − |uv|²`, transversality
/// `dist² − 1` and order `−v·(next − cur)`. Zero exactly at a pair of
/// transversals with orders ABCD and ACDB of four non-overlapping unit balls
/// (ties and tangencies included).
pub fn merit_tangency(s: &TangencySearchState) -> f64 {
    let c = s.centers();
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            worst = worst.max(4.0 - (c[i] - c[j]).norm_squared());
        }
    }
    for (p, order) in [(&s.line1, ORDER1), (&s.line2, ORDER2)] {
        let (v, a) = line_of(p);
        for x in &c {
            let r = x - a;
            let dist2 = (r - v * r.dot(&v)).norm_squared();
            worst = worst.max(dist2 - 1.0);
        }
        for w in order.windows(2) {
            worst = worst.max(-v.dot(&(c[w[1]] - c[w[0]])));
        }
    }
    if worst.is_nan() {
        f64::INFINITY
    } else {
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::stabbing_order;

    fn collinear() -> TangencySearchState {
        let x_axis = [std::f64::consts::FRAC_PI_2, 0.0, 0.0, 0.0];
        TangencySearchState { xb: 2.0, xc: 4.0, yc: 0.0, xd: 6.0, yd: 0.0, zd: 0.0, line1: x_axis, line2: x_axis }
    }

    #[test]
    fn collinear_fails_second_order() {
        let s = collinear();
        let m = merit_tangency(&s);
        assert!(m > 0.0);
        let first_only = TangencySearchState { line2: s.line1, ..s };
        assert_eq!(merit_tangency(&first_only), m);
    }

    #[test]
    fn overlap_term() {
        let s = TangencySearchState { xb: 1.0, ..collinear() };
        assert!(merit_tangency(&s) >= 3.0);
    }

    #[test]
    fn lines_decode() {
        let (l1, _) = collinear().lines().unwrap();
        assert!((l1.direction() - Vec3::x()).norm() < 1e-12);
        let cfg = collinear().configuration().unwrap();
        assert_eq!(stabbing_order(&cfg, &l1).unwrap().to_string(), "ABCD");
    }

    #[test]
    fn frame_round_trip() {
        let centers = [
            Point3::new(1.0, 2.0, 3.0),
            Point3::new(3.0, 2.5, 3.0),
            Point3::new(2.0, 5.0, 2.0),
            Point3::new(0.0, 4.0, 6.0),
        ];
        let l1 = Line::new(Point3::new(1.0, 2.0, 2.0), Vec3::new(1.0, 0.2, 0.1)).unwrap();
        let l2 = Line::new(Point3::new(0.0, 1.0, 2.0), Vec3::new(-0.3, 1.0, 0.5)).unwrap();
        let s = TangencySearchState::from_geometry(&centers, &l1, &l2).unwrap();
        let c = s.centers();
        for i in 0..4 {
            for j in 0..4 {
                let (a, b) = ((c[i] - c[j]).norm(), (centers[i] - centers[j]).norm());
                assert!((a - b).abs() < 1e-12);
            }
        }
        let (m1, m2) = s.lines().unwrap();
        for k in 0..4 {
            assert!((m1.distance_to(&c[k]) - l1.distance_to(&centers[k])).abs() < 1e-12);
            assert!((m2.distance_to(&c[k]) - l2.distance_to(&centers[k])).abs() < 1e-12);
        }
    }
}
