//! Shrinking balls until a transversal of a given order is pinned.

use serde::Serialize;

use super::polish::polish_minimax;
use crate::error::{Error, Result};
use crate::geometry::{stabbing_order, Ball, Configuration, Line, OrderedOrder, Point3, Vec3};
use crate::tol;
use crate::transversal::{ascend, find_transversal, search_direction, OrderProblem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkOptions {
    /// Evaluation budget of each fallback transversal search.
    pub budget: usize,
    pub seed: u64,
}

impl Default for ShrinkOptions {
    fn default() -> Self {
        ShrinkOptions { budget: 4000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrinkResult {
    /// Scale factor of the radii, in `[0, 1]`.
    pub t_star: f64,
    pub line: Line,
    pub order: OrderedOrder,
    pub bisection_steps: usize,
    /// The final line came from the minimax Newton refinement.
    pub polished: bool,
}

/// Feasibility at a trial radius, warm-started from the last good direction.
fn probe(problem: &OrderProblem, start: &Vec3, width: f64, opts: &ShrinkOptions) -> Option<Vec3> {
    if problem.feasible(start) {
        return Some(*start);
    }
    let (v, _, _) = ascend(problem, start, width.clamp(1e-9, 0.05), 600);
    if problem.feasible(&v) {
        return Some(v);
    }
    let found = search_direction(problem, opts.budget, opts.seed);
    found.feasible.then_some(found.direction)
}

fn collinear_line(centers: &[Point3], order: &[usize]) -> Option<Line> {
    let first = centers[order[0]];
    let last = centers[*order.last()?];
    let l = Line::through(first, last).ok()?;
    centers.iter().all(|c| l.distance_to(c) < tol::GEOM).then_some(l)
}

pub fn shrink_to_pin(cfg: &Configuration, order: &OrderedOrder) -> Result<ShrinkResult> {
    shrink_to_pin_with(cfg, order, &ShrinkOptions::default())
}

/// Bisection on the common radius scale `t`: the smallest `t` (to width
/// [`tol::BISECTION_WIDTH`]) at which the order still has a transversal,
/// followed by a local refinement of the line at that radius.
pub fn shrink_to_pin_with(cfg: &Configuration, order: &OrderedOrder, opts: &ShrinkOptions) -> Result<ShrinkResult> {
    let r = cfg.common_radius()?;
    let base = OrderProblem::new(cfg, order)?;
    let initial =
        find_transversal(cfg, order, opts.budget, opts.seed)?.into_witness().ok_or(Error::NoInitialTransversal)?;
    if cfg.len() < 2 {
        return Ok(ShrinkResult {
            t_star: 0.0,
            line: initial.line,
            order: order.clone(),
            bisection_steps: 0,
            polished: false,
        });
    }
    if let Some(line) = collinear_line(&base.centers, &base.order) {
        return Ok(ShrinkResult { t_star: 0.0, line, order: order.clone(), bisection_steps: 0, polished: false });
    }
    let at = |t: f64| OrderProblem { centers: base.centers.clone(), radius: t * r, order: base.order.clone() };

    let (mut lo, mut hi) = (0.0, 1.0);
    let mut dir = initial.line.direction();
    let mut steps = 0;
    while hi - lo > tol::BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        match probe(&at(mid), &dir, hi - lo, opts) {
            Some(v) => {
                hi = mid;
                dir = v;
            }
            None => lo = mid,
        }
        steps += 1;
    }
    let mut line = at(hi).line_for(&dir);
    let mut t_star = hi;
    let mut polished = false;
    if let Some(p) = polish_minimax(&base.centers, &line) {
        let t = p.radius / r;
        let oriented = if p.line.direction().dot(&dir) < 0.0 { p.line.reversed() } else { p.line };
        let realized = cfg.with_radius(t.max(tol::GEOM) * r).ok().and_then(|c| stabbing_order(&c, &oriented).ok());
        if t <= hi + 1e-9 && realized.as_ref() == Some(order) {
            t_star = t.min(1.0);
            line = oriented;
            polished = true;
        }
    }
    Ok(ShrinkResult { t_star, line, order: order.clone(), bisection_steps: steps, polished })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStageResult {
    /// Rescaled to unit radius.
    pub configuration: Configuration,
    pub line1: Line,
    pub line2: Line,
    /// Which input order was pinned by the uniform first stage.
    pub first_pinned: OrderedOrder,
    pub stage1_scale: f64,
    pub stage2_ratio: f64,
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

fn homothety(centers: &[Point3], anchors: &[Point3], ratio: f64) -> Vec<Point3> {
    centers.iter().zip(anchors).map(|(c, x0)| x0 + (c - x0) * ratio).collect()
}

/// Secant refinement of the stage-two ratio on the gap between the minimax
/// radius and the ball radius, falling back to the bisection endpoint.
fn refine_ratio(
    at: &dyn Fn(f64) -> OrderProblem,
    cfg: &Configuration,
    order: &OrderedOrder,
    dir: &Vec3,
    lo: f64,
    hi: f64,
) -> (f64, Line) {
    let fallback = (hi, at(hi).line_for(dir));
    let gap = |lam: f64| {
        let pb = at(lam);
        polish_minimax(&pb.centers, &pb.line_for(dir)).map(|p| (p.radius - pb.radius, p.line))
    };
    let Some((mut g1, mut l1)) = gap(hi) else { return fallback };
    let (mut x0, mut x1) = (hi - 1e-6, hi);
    let Some((mut g0, _)) = gap(x0) else { return fallback };
    for _ in 0..12 {
        if g1.abs() <= 1e-13 || g1 == g0 {
            break;
        }
        let x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        let Some((g2, l2)) = gap(x2) else { return fallback };
        (x0, g0) = (x1, g1);
        (x1, g1, l1) = (x2, g2, l2);
    }
    if g1.abs() > 1e-12 || x1 < lo - 1e-6 || x1 > 1.0 + 1e-9 {
        return fallback;
    }
    let x1 = x1.min(1.0);
    let line = if l1.direction().dot(dir) < 0.0 { l1.reversed() } else { l1 };
    let pb = at(x1);
    let balls = pb.centers.iter().map(|c| Ball { center: *c, radius: pb.radius }).collect();
    match stabbing_order(&cfg.with_balls_unchecked(balls), &line) {
        Ok(o) if &o == order => (x1, line),
        _ => fallback,
    }
}

pub fn two_stage_shrink(cfg: &Configuration, order1: &OrderedOrder, order2: &OrderedOrder) -> Result<TwoStageResult> {
    two_stage_shrink_with(cfg, order1, order2, &ShrinkOptions::default())
}

/// Stage one shrinks all balls about their centers until one of the two
/// orders is pinned (line `σ1`). Stage two shrinks each ball about a point
/// `x0` of `σ1` inside it, which keeps `σ1` a pinned transversal, until the
/// other order is pinned as well.
pub fn two_stage_shrink_with(
    cfg: &Configuration,
    order1: &OrderedOrder,
    order2: &OrderedOrder,
    opts: &ShrinkOptions,
) -> Result<TwoStageResult> {
    let r = cfg.common_radius()?;
    for o in [order1, order2] {
        if find_transversal(cfg, o, opts.budget, opts.seed)?.witness().is_none() {
            return Err(Error::Infeasible(format!("no transversal with order {o}")));
        }
    }
    let s1 = shrink_to_pin_with(cfg, order1, opts)?;
    let s2 = shrink_to_pin_with(cfg, order2, opts)?;
    let swap = s2.t_star > s1.t_star;
    let (first, second) = if swap { (&s2, order1) } else { (&s1, order2) };
    let t1 = first.t_star;
    if t1 <= 0.0 {
        return Err(Error::Infeasible("centers are collinear".into()));
    }
    let sigma1 = first.line;
    let centers = cfg.centers();
    let anchors: Vec<Point3> = centers.iter().map(|c| sigma1.foot(c)).collect();
    let second_idx = second.indices_in(cfg)?;
    let at = |lam: f64| OrderProblem {
        centers: homothety(&centers, &anchors, lam),
        radius: lam * t1 * r,
        order: second_idx.clone(),
    };

    let mut dir = if swap { s1.line.direction() } else { s2.line.direction() };
    let (mut lo, mut hi) = (0.0, 1.0);
    if probe(&at(1.0), &dir, 1.0, opts).is_none() {
        return Err(Error::Infeasible(format!("order {second} lost in stage one")));
    }
    while hi - lo > tol::BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        match probe(&at(mid), &dir, hi - lo, opts) {
            Some(v) => {
                hi = mid;
                dir = v;
            }
            None => lo = mid,
        }
    }
    let (lam, line2) = refine_ratio(&at, cfg, second, &dir, lo, hi);
    let fin = at(lam);
    let radius = fin.radius;
    let k = 1.0 / radius;
    let balls: Vec<Ball> = fin.centers.iter().map(|c| Ball::unit(c * k)).collect();
    let scaled = cfg.with_balls_unchecked(balls);
    let (line1, line2) = if swap { (line2.scaled(k), sigma1.scaled(k)) } else { (sigma1.scaled(k), line2.scaled(k)) };
    Ok(TwoStageResult {
        configuration: scaled,
        line1,
        line2,
        first_pinned: first.order.clone(),
        stage1_scale: t1,
        stage2_ratio: lam,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pinning::detect::{is_pinned, is_pinned_nested};

    fn ord(s: &str) -> OrderedOrder {
        OrderedOrder::parse(s).unwrap()
    }

    #[test]
    fn zigzag_shrinks_to_its_offset() {
        let cfg = Configuration::unit(&[Vec3::new(0.0, 0.5, 0.0), Vec3::new(2.0, -0.5, 0.0), Vec3::new(4.0, 0.5, 0.0)])
            .unwrap();
        let s = shrink_to_pin(&cfg, &ord("ABC")).unwrap();
        assert!((s.t_star - 0.5).abs() < 1e-9, "{s:?}");
        assert!(s.line.separation(&Line::x_axis()) < 1e-8);
        let shrunk = cfg.with_radius(s.t_star).unwrap();
        assert!(is_pinned(&shrunk, &s.line, 1e-3).unwrap().pinned);
    }

    #[test]
    fn collinear_and_already_pinned() {
        let cfg = Configuration::unit(&[Vec3::zeros(), Vec3::x() * 2.0, Vec3::x() * 5.0]).unwrap();
        let s = shrink_to_pin(&cfg, &ord("ABC")).unwrap();
        assert_eq!(s.t_star, 0.0);
        assert!(s.line.separation(&Line::x_axis()) < 1e-12);
        let tight =
            Configuration::unit(&[Vec3::new(0.0, 1.0, 0.0), Vec3::new(2.0, -1.0, 0.0), Vec3::new(4.0, 1.0, 0.0)])
                .unwrap();
        let s = shrink_to_pin(&tight, &ord("ABC")).unwrap();
        assert!((s.t_star - 1.0).abs() < 1e-9);
        let missing = shrink_to_pin(&cfg, &ord("BAC"));
        assert_eq!(missing, Err(Error::NoInitialTransversal));
    }

    #[test]
    fn two_orders_are_both_pinned() {
        // Isosceles acute triangle admitting ABC and ACB.
        let cfg =
            Configuration::unit(&[Vec3::new(0.0, 0.0, 0.0), Vec3::new(3.0, 1.02, 0.0), Vec3::new(3.0, -1.02, 0.0)])
                .unwrap();
        let res = two_stage_shrink(&cfg, &ord("ABC"), &ord("ACB")).unwrap();
        let c = &res.configuration;
        assert_eq!(stabbing_order(c, &res.line1).unwrap(), ord("ABC"));
        assert_eq!(stabbing_order(c, &res.line2).unwrap(), ord("ACB"));
        assert!(is_pinned_nested(c, &res.line1, 1).unwrap().pinned);
        assert!(is_pinned_nested(c, &res.line2, 1).unwrap().pinned);
        let line = Configuration::unit(&[Vec3::zeros(), Vec3::x() * 2.0, Vec3::x() * 4.0]).unwrap();
        assert!(matches!(two_stage_shrink(&line, &ord("ABC"), &ord("ACB")), Err(Error::Infeasible(_))));
    }
}
