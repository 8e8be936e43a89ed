//! The four-parameter chart of lines used near a candidate pinned line.
//!
//! A line not parallel to the planes `z = const` is encoded by its crossings
//! `(u1, u2, 0)` and `(u3, u4, 1)` with the planes `z = 0` and `z = 1`.

use nalgebra::{Rotation3, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Line, Point3, Vec3};
use crate::sampling::pole_rotation;

pub type Vec4 = Vector4<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineCoords4 {
    pub u: [f64; 4],
}

impl LineCoords4 {
    pub fn new(u: [f64; 4]) -> Self {
        LineCoords4 { u }
    }

    pub fn vector(&self) -> Vec4 {
        Vec4::from(self.u)
    }

    /// Coordinates of a line given in the chart frame.
    pub fn from_line(l: &Line) -> Result<Self> {
        let d = l.direction();
        if d.z.abs() < 1e-9 {
            return Err(Error::DegenerateChart);
        }
        let a = l.anchor();
        let p0 = a - d * (a.z / d.z);
        let p1 = p0 + d / d.z;
        Ok(LineCoords4 { u: [p0.x, p0.y, p1.x, p1.y] })
    }

    pub fn to_line(&self) -> Line {
        let [u1, u2, u3, u4] = self.u;
        Line::new(Vec3::new(u1, u2, 0.0), Vec3::new(u3 - u1, u4 - u2, 1.0)).expect("z component is 1")
    }

    /// Point of the line at height `z`.
    pub fn at_height(&self, z: f64) -> Point3 {
        let [u1, u2, u3, u4] = self.u;
        Vec3::new((1.0 - z) * u1 + z * u3, (1.0 - z) * u2 + z * u4, z)
    }
}

/// Squared distance from `c` to the line with coordinates `u`.
pub fn dist2(u: &[f64; 4], c: &Point3) -> f64 {
    let e = Vec3::new(c.x - u[0], c.y - u[1], c.z);
    let d = Vec3::new(u[2] - u[0], u[3] - u[1], 1.0);
    let a = e.dot(&d);
    (e.norm_squared() - a * a / d.norm_squared()).max(0.0)
}

/// Gradient of [`dist2`] with respect to `u`.
pub fn dist2_gradient(u: &[f64; 4], c: &Point3) -> Vec4 {
    let e = Vec3::new(c.x - u[0], c.y - u[1], c.z);
    let d = Vec3::new(u[2] - u[0], u[3] - u[1], 1.0);
    let a = e.dot(&d);
    let b = d.norm_squared();
    // (de/du_k, dD/du_k) for k = 1..4
    let partials = [
        (Vec3::new(-1.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)),
        (Vec3::new(0.0, -1.0, 0.0), Vec3::new(0.0, -1.0, 0.0)),
        (Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)),
        (Vec3::zeros(), Vec3::new(0.0, 1.0, 0.0)),
    ];
    let mut g = Vec4::zeros();
    for (k, (de, dd)) in partials.iter().enumerate() {
        let da = de.dot(&d) + e.dot(dd);
        let db = 2.0 * d.dot(dd);
        g[k] = 2.0 * e.dot(de) - 2.0 * a * da / b + a * a * db / (b * b);
    }
    g
}

/// A rigid frame in which a chosen line is the z-axis.
#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    rot: Rotation3<f64>,
    origin: Point3,
}

impl LineChart {
    /// Frame with `l` as its z-axis (oriented along `l`) and origin at the
    /// foot of `origin_hint` on `l`.
    pub fn aligned(l: &Line, origin_hint: &Point3) -> Self {
        let rot = pole_rotation(&l.direction()).inverse();
        LineChart { rot, origin: l.foot(origin_hint) }
    }

    /// Frame for `l` centered at the mean of the feet of `points`.
    pub fn centered(l: &Line, points: &[Point3]) -> Self {
        let mean = if points.is_empty() { l.anchor() } else { points.iter().sum::<Vec3>() / points.len() as f64 };
        LineChart::aligned(l, &mean)
    }

    pub fn to_chart(&self, p: &Point3) -> Point3 {
        self.rot * (p - self.origin)
    }

    pub fn vector_to_chart(&self, v: &Vec3) -> Vec3 {
        self.rot * v
    }

    pub fn from_chart(&self, p: &Point3) -> Point3 {
        self.rot.inverse() * p + self.origin
    }

    pub fn coords(&self, l: &Line) -> Result<LineCoords4> {
        let p = self.to_chart(&l.anchor());
        let d = self.vector_to_chart(&l.direction());
        LineCoords4::from_line(&Line::new(p, d)?)
    }

    pub fn line(&self, u: &LineCoords4) -> Line {
        let l = u.to_line();
        let p = self.from_chart(&l.anchor());
        let d = self.rot.inverse() * l.direction();
        Line::new(p, d).expect("rigid image of a line")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist_point_line;
    use crate::sampling::{stream_rng, unit_vector};
    use rand::Rng;

    #[test]
    fn round_trip_and_degenerate() {
        let l = Line::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.3, -0.2, 1.0)).unwrap();
        let u = LineCoords4::from_line(&l).unwrap();
        assert!(u.to_line().separation(&l) < 1e-12);
        assert_eq!(LineCoords4::from_line(&Line::x_axis()), Err(Error::DegenerateChart));
    }

    #[test]
    fn distance_matches_geometry_and_gradient_matches_fd() {
        let mut rng = stream_rng(4, 0);
        for _ in 0..200 {
            let u: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let c = unit_vector(&mut rng) * rng.gen_range(0.0..5.0);
            let direct = dist_point_line(&c, &LineCoords4::new(u).to_line());
            assert!((dist2(&u, &c) - direct * direct).abs() < 1e-10);
            let g = dist2_gradient(&u, &c);
            for k in 0..4 {
                let h = 1e-6;
                let (mut up, mut dn) = (u, u);
                up[k] += h;
                dn[k] -= h;
                let fd = (dist2(&up, &c) - dist2(&dn, &c)) / (2.0 * h);
                assert!((fd - g[k]).abs() < 1e-6 * (1.0 + g[k].abs()), "k={k} fd={fd} g={}", g[k]);
            }
        }
    }

    #[test]
    fn aligned_chart_maps_line_to_axis() {
        let l = Line::new(Vec3::new(0.0, 1.0, 0.0), Vec3::new(1.0, 1.0, 0.5)).unwrap();
        let chart = LineChart::aligned(&l, &Vec3::new(5.0, 0.0, 0.0));
        let u = chart.coords(&l).unwrap();
        assert!(u.u.iter().all(|x| x.abs() < 1e-12));
        let back = chart.line(&u);
        assert!(back.separation(&l) < 1e-12);
        let p = Vec3::new(0.3, -2.0, 4.0);
        assert!((chart.from_chart(&chart.to_chart(&p)) - p).norm() < 1e-12);
    }
}
