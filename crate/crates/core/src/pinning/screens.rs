//! Ridges, screens and the rank analysis of four-ball pinnings.
//!
//! In a chart where the tangent line `l` is the z-axis, a ball tangent at
//! height `z` with unit offset `w` (from the tangency point to the center)
//! has ridge `{(s * m, z)}`, `m = e_z x w`. A line `u` meets that ridge iff
//! its point at height `z` lies on `m`, which is the linear condition
//! `N . u = 0` with `N ∝ ((1 - z) w, z w)`. The screen side is `N . u >= 0`.
//! Normals here point into the halfspace of lines meeting the screen.

use nalgebra::{DMatrix, Matrix4};
use serde::Serialize;

use super::chart::{LineChart, Vec4};
use super::detect::{is_tangent, triple_pinning_predicate};
use crate::error::{Error, Result};
use crate::geometry::{Ball, Configuration, Line, Point3, Vec3};
use crate::tol;

/// The line tangent to `x` and perpendicular to `l` at their contact point.
pub fn ridge(x: &Ball, l: &Line) -> Result<Line> {
    if !is_tangent(x, l) {
        return Err(Error::NotTangent(format!("center {:?}", x.center.as_slice())));
    }
    let p = l.foot(&x.center);
    Line::new(p, l.direction().cross(&(x.center - p)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Screen {
    pub owner: String,
    pub ridge: Line,
    pub halfspace_normal_4d: [f64; 4],
    /// Chart height of the tangency point.
    pub height: f64,
    /// Unit offset from the tangency point to the center, in chart axes.
    pub offset: Vec3,
}

impl Screen {
    pub fn normal(&self) -> Vec4 {
        Vec4::from(self.halfspace_normal_4d)
    }
}

fn screen_in(chart: &LineChart, owner: &str, x: &Ball, l: &Line) -> Result<Screen> {
    if !is_tangent(x, l) {
        return Err(Error::NotTangent(owner.to_string()));
    }
    let ridge = ridge(x, l)?;
    let c = chart.to_chart(&x.center);
    let z = c.z;
    let w = Vec3::new(c.x, c.y, 0.0).normalize();
    let n = Vec4::new((1.0 - z) * w.x, (1.0 - z) * w.y, z * w.x, z * w.y).normalize();
    Ok(Screen { owner: owner.to_string(), ridge, halfspace_normal_4d: [n[0], n[1], n[2], n[3]], height: z, offset: w })
}

/// Canonical chart for `l`: `l` is the z-axis with origin at its anchor.
pub fn chart_for(l: &Line) -> LineChart {
    LineChart::aligned(l, &l.anchor())
}

/// The screen of `x` in the canonical chart of `l`.
pub fn screen_normal(x: &Ball, l: &Line) -> Result<Screen> {
    screen_in(&chart_for(l), "X", x, l)
}

/// Screens of every ball of `cfg` in one shared chart centered between the
/// tangency points.
pub fn screens(cfg: &Configuration, l: &Line) -> Result<(LineChart, Vec<Screen>)> {
    let feet: Vec<Point3> = cfg.centers().iter().map(|c| l.foot(c)).collect();
    let chart = LineChart::centered(l, &feet);
    let s = cfg
        .labels()
        .iter()
        .zip(cfg.balls())
        .map(|(label, b)| screen_in(&chart, label, b, l))
        .collect::<Result<Vec<_>>>()?;
    Ok((chart, s))
}

/// Singular values (descending) and numerical rank at relative threshold
/// [`tol::RANK_REL`].
pub fn rank_of(rows: &[Vec4]) -> (usize, Vec<f64>) {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().copied().collect()).collect();
    rank_of_matrix(&rows)
}

/// Numerical rank of a dense row-major matrix at relative threshold
/// [`tol::RANK_REL`], with singular values in decreasing order.
pub fn rank_of_matrix(rows: &[Vec<f64>]) -> (usize, Vec<f64>) {
    let Some(first) = rows.first() else {
        return (0, vec![]);
    };
    let m = DMatrix::from_fn(rows.len(), first.len(), |i, j| rows[i][j]);
    let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > tol::RANK_REL * top).count();
    (rank, sv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PinningClass {
    Hyperboloidal,
    CoplanarRidges,
    ConcurrentRidges,
    NotMinimal,
    NotPinning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub class: PinningClass,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub screens: Vec<Screen>,
    /// Sides of the quadric normal at the tangency points, sorted by height.
    /// Present for rank-3 normal matrices.
    pub side_signs: Option<Vec<i8>>,
    pub alternation: Option<bool>,
    /// A positive combination of the normals vanishes, so no first-order
    /// motion of `l` keeps meeting every screen.
    pub first_order_blocked: bool,
    /// Largest angle (radians) between a quadric slice direction and the
    /// corresponding ridge, a consistency check on the quadric.
    pub quadric_ridge_defect: Option<f64>,
}

fn left_null(rows: &[Vec4]) -> Vec<f64> {
    let m = DMatrix::from_fn(4, rows.len(), |i, j| rows[j][i]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let (k, _) = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    vt.row(k).iter().copied().collect()
}

fn kernel(rows: &[Vec4]) -> Vec4 {
    let m = Matrix4::from_fn(|i, j| rows[i][j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let (k, _) = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("four values");
    Vec4::from_fn(|j, _| vt[(k, j)])
}

/// Classifies the pinning of `l` by four tangent balls.
///
/// Order of tests: independent normals cannot pin; equal ridges; a pinning
/// sub-triple; a dependent triple (coplanar or concurrent ridges); otherwise
/// the four ridges lie in one ruling of the quadric spanned by the kernel
/// of the normal matrix.
pub fn classify_minimal_pinning(cfg: &Configuration, l: &Line) -> Result<Classification> {
    if cfg.len() != 4 {
        return Err(Error::InputInvalid(format!("expected 4 balls, got {}", cfg.len())));
    }
    let (_, screens) = screens(cfg, l)?;
    let normals: Vec<Vec4> = screens.iter().map(Screen::normal).collect();
    let (rank, singular_values) = rank_of(&normals);
    let lambda = left_null(&normals);
    let first_order_blocked =
        rank < 4 && (lambda.iter().all(|&x| x > tol::RANK_REL) || lambda.iter().all(|&x| x < -tol::RANK_REL));

    let mut out = Classification {
        class: PinningClass::Hyperboloidal,
        rank,
        singular_values,
        screens,
        side_signs: None,
        alternation: None,
        first_order_blocked,
        quadric_ridge_defect: None,
    };
    if rank == 4 {
        out.class = PinningClass::NotPinning;
        return Ok(out);
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if rank_of(&[normals[i], normals[j]]).0 < 2 {
                out.class = PinningClass::ConcurrentRidges;
                return Ok(out);
            }
        }
    }
    let triples = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    for t in &triples {
        let b = |k: usize| cfg.ball(t[k]);
        if triple_pinning_predicate(b(0), b(1), b(2), l) {
            out.class = PinningClass::NotMinimal;
            return Ok(out);
        }
    }
    for t in &triples {
        let rows: Vec<Vec4> = t.iter().map(|&k| normals[k]).collect();
        if rank_of(&rows).0 < 3 {
            let s = |k: usize| &out.screens[t[k]];
            let same_height = (s(0).height - s(1).height).abs() < 1e-6 && (s(0).height - s(2).height).abs() < 1e-6;
            out.class = if same_height { PinningClass::ConcurrentRidges } else { PinningClass::CoplanarRidges };
            return Ok(out);
        }
    }
    if rank == 3 {
        let k = kernel(&normals);
        let mut by_height: Vec<&Screen> = out.screens.iter().collect();
        by_height.sort_by(|a, b| a.height.total_cmp(&b.height));
        let mut signs = Vec::with_capacity(4);
        let mut defect: f64 = 0.0;
        for s in &by_height {
            let z = s.height;
            let a = (1.0 - z) * k[0] + z * k[2];
            let b = (1.0 - z) * k[1] + z * k[3];
            let n = Vec3::new(b, -a, 0.0);
            let dot = n.dot(&s.offset);
            signs.push(if dot > 0.0 { 1i8 } else { -1 });
            defect = defect.max(n.normalize().cross(&s.offset).norm().asin());
        }
        let alternation = signs.windows(2).all(|w| w[0] != w[1]);
        out.side_signs = Some(signs);
        out.alternation = Some(alternation);
        out.quadric_ridge_defect = Some(defect);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(p: [f64; 3]) -> Ball {
        Ball::unit(Vec3::new(p[0], p[1], p[2]))
    }

    #[test]
    fn ridge_examples() {
        let x = Line::x_axis();
        let r = ridge(&unit([0.0, 1.0, 0.0]), &x).unwrap();
        assert!(r.anchor().norm() < 1e-12);
        assert!((r.direction().cross(&Vec3::z())).norm() < 1e-12);
        let r = ridge(&unit([3.0, 0.0, 1.0]), &x).unwrap();
        assert!((r.anchor() - Vec3::new(3.0, 0.0, 0.0)).norm() < 1e-12);
        assert!((r.direction().cross(&Vec3::y())).norm() < 1e-12);
        assert!(matches!(ridge(&unit([0.0, 0.5, 0.0]), &x), Err(Error::NotTangent(_))));
    }

    #[test]
    fn normal_vanishes_on_lines_through_the_ridge() {
        let l = Line::new(Vec3::new(0.3, 0.0, 0.0), Vec3::new(1.0, 0.2, -0.1)).unwrap();
        let foot = l.point_at(1.7);
        let off = l.direction().cross(&Vec3::new(0.1, 1.0, 0.4)).normalize();
        let ball = Ball::unit(foot + off);
        let s = screen_normal(&ball, &l).unwrap();
        let chart = chart_for(&l);
        let n = s.normal();
        assert!((n.norm() - 1.0).abs() < 1e-12);
        for (a, b) in [(-1.0, 2.0), (0.5, -3.0), (4.0, 0.25)] {
            let p = s.ridge.point_at(a);
            let q = Line::new(p, Vec3::new(0.3, b, 1.0).normalize() + l.direction() * 2.0).unwrap();
            let u = chart.coords(&q).unwrap();
            assert!(n.dot(&u.vector()).abs() < 1e-9, "{}", n.dot(&u.vector()));
        }
        // Lines through the center side of the ridge are on the positive side.
        let inside = Line::new(foot + off * 0.1, l.direction()).unwrap();
        assert!(n.dot(&chart.coords(&inside).unwrap().vector()) > 0.0);
    }

    #[test]
    fn touching_pair_has_parallel_normals() {
        let x = Line::x_axis();
        let a = screen_normal(&unit([0.0, 1.0, 0.0]), &x).unwrap();
        let b = screen_normal(&unit([0.0, -1.0, 0.0]), &x).unwrap();
        assert!(a.ridge.separation(&b.ridge) < 1e-12);
        assert_eq!(rank_of(&[a.normal(), b.normal()]).0, 1);
    }

    #[test]
    fn tri_tangent_normals_are_dependent() {
        let x = Line::x_axis();
        let n: Vec<Vec4> = [[0.0, 1.0, 0.0], [2.0, -1.0, 0.0], [4.0, 1.0, 0.0]]
            .iter()
            .map(|p| screen_normal(&unit(*p), &x).unwrap().normal())
            .collect();
        assert_eq!(rank_of(&n).0, 2);
    }

    #[test]
    fn coplanar_and_not_minimal_cases() {
        let x = Line::x_axis();
        // All offsets along +y or -y, no pinning triple: ridges all lie in
        // the xz-plane with the line.
        let cop = Configuration::unit(&[
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(2.0, 1.0, 0.0),
            Vec3::new(4.0, -1.0, 0.0),
            Vec3::new(6.0, -1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(classify_minimal_pinning(&cop, &x).unwrap().class, PinningClass::CoplanarRidges);
        let nm = Configuration::unit(&[
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(2.0, -1.0, 0.0),
            Vec3::new(4.0, 1.0, 0.0),
            Vec3::new(7.0, 0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(classify_minimal_pinning(&nm, &x).unwrap().class, PinningClass::NotMinimal);
        assert!(classify_minimal_pinning(&nm.subset(&[0, 1, 2]), &x).is_err());
    }
}
