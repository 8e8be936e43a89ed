//! Transversal existence, witness lines and geometric-permutation
//! enumeration for congruent balls.
//!
//! For balls of common radius `r`, a line with direction `v` meets all of
//! them exactly when the centers, projected along `v`, fit in a disk of
//! radius `r`. Everything here works on the resulting depth function of the
//! direction sphere.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    canonicalize, sorted_indices, stabbing_order, Configuration, GeometricPermutation, Line, OrderedOrder, Point3, Vec3,
};
use crate::optim::nelder_mead;
use crate::sampling::{perp_basis, stream_rng, FibonacciSphere};
use crate::sec::{smallest_enclosing_circle, Vec2};
use crate::tol;

/// A unit direction vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction(Vec3);

impl Direction {
    pub fn new(v: Vec3) -> Result<Self> {
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = v.norm();
        if n < 1e-300 {
            return Err(Error::ZeroDirection);
        }
        Ok(Direction(v / n))
    }

    pub fn vector(&self) -> Vec3 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepthResult {
    pub depth: f64,
    pub witness_axis_point: Point3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalWitness {
    pub line: Line,
    pub order: OrderedOrder,
    pub depth: f64,
}

/// Outcome of a budgeted witness search. `NotFound` only means the budget
/// ran out; `best_score` is the largest value of `min(depth, order margin)`
/// seen, a violation margin when negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TransversalSearch {
    Found(TransversalWitness),
    NotFound { best_score: f64, evaluations: usize },
}

impl TransversalSearch {
    pub fn witness(&self) -> Option<&TransversalWitness> {
        match self {
            TransversalSearch::Found(w) => Some(w),
            TransversalSearch::NotFound { .. } => None,
        }
    }

    pub fn into_witness(self) -> Option<TransversalWitness> {
        match self {
            TransversalSearch::Found(w) => Some(w),
            TransversalSearch::NotFound { .. } => None,
        }
    }
}

fn project(centers: &[Point3], v: &Vec3) -> (Vec<Vec2>, Vec3, Vec3) {
    let (e1, e2) = perp_basis(v);
    let pts = centers.iter().map(|c| Vec2::new(c.dot(&e1), c.dot(&e2))).collect();
    (pts, e1, e2)
}

/// Projections of the centers onto the plane perpendicular to `v`, in the
/// basis returned by [`perp_basis`].
pub fn project_centers(cfg: &Configuration, v: &Direction) -> Vec<Vec2> {
    project(&cfg.centers(), &v.vector()).0
}

/// `r` minus the enclosing radius of the projected centers, with the lifted
/// circle center.
pub(crate) fn depth_of(centers: &[Point3], radius: f64, v: &Vec3) -> (f64, Point3) {
    let (pts, e1, e2) = project(centers, v);
    match smallest_enclosing_circle(&pts) {
        Some(c) => (radius - c.radius, e1 * c.center.x + e2 * c.center.y),
        None => (radius, Vec3::zeros()),
    }
}

pub fn depth(cfg: &Configuration, v: &Direction) -> Result<DepthResult> {
    let r = cfg.common_radius()?;
    let (depth, witness_axis_point) = depth_of(&cfg.centers(), r, &v.vector());
    Ok(DepthResult { depth, witness_axis_point })
}

/// Direction-space objective for one prescribed order: `min(depth, margin)`
/// where the margin is the smallest gap between consecutive projections onto
/// the direction. Positive exactly on directions whose transversals realize
/// the order with room to spare.
pub(crate) struct OrderProblem {
    pub centers: Vec<Point3>,
    pub radius: f64,
    pub order: Vec<usize>,
}

impl OrderProblem {
    pub fn new(cfg: &Configuration, order: &OrderedOrder) -> Result<Self> {
        let radius = cfg.common_radius()?;
        let order = order.indices_in(cfg)?;
        Ok(OrderProblem { centers: cfg.centers(), radius, order })
    }

    pub fn margin(&self, v: &Vec3) -> f64 {
        self.order.windows(2).map(|w| v.dot(&(self.centers[w[1]] - self.centers[w[0]]))).fold(f64::INFINITY, f64::min)
    }

    pub fn score(&self, v: &Vec3) -> f64 {
        let m = self.margin(v);
        if m == f64::INFINITY {
            return depth_of(&self.centers, self.radius, v).0;
        }
        depth_of(&self.centers, self.radius, v).0.min(m)
    }

    /// The line with direction `v` through the center of the projected
    /// enclosing circle.
    pub fn line_for(&self, v: &Vec3) -> Line {
        let (_, p) = depth_of(&self.centers, self.radius, v);
        Line::new(p, *v).expect("unit direction")
    }

    pub fn feasible(&self, v: &Vec3) -> bool {
        self.margin(v) >= tol::GEOM && depth_of(&self.centers, self.radius, v).0 >= -tol::GEOM
    }
}

/// Directions near `base`, charted on its tangent plane.
pub(crate) struct TangentChart {
    base: Vec3,
    e1: Vec3,
    e2: Vec3,
}

impl TangentChart {
    pub fn new(base: &Vec3) -> Self {
        let base = base.normalize();
        let (e1, e2) = perp_basis(&base);
        TangentChart { base, e1, e2 }
    }

    pub fn at(&self, x: &[f64]) -> Vec3 {
        (self.base + self.e1 * x[0] + self.e2 * x[1]).normalize()
    }
}

/// Local ascent of the order objective from `start`; returns the best
/// direction and its score.
pub(crate) fn ascend(problem: &OrderProblem, start: &Vec3, step: f64, evals: usize) -> (Vec3, f64, usize) {
    let chart = TangentChart::new(start);
    let m = nelder_mead(|x| -problem.score(&chart.at(x)), &[0.0, 0.0], step, evals, 1e-13, 1e-15);
    (chart.at(&m.x), -m.f, m.evals)
}

pub(crate) fn witness_for(
    cfg: &Configuration,
    problem: &OrderProblem,
    target: &OrderedOrder,
    v: &Vec3,
) -> Option<TransversalWitness> {
    if !problem.feasible(v) {
        return None;
    }
    let (d, p) = depth_of(&problem.centers, problem.radius, v);
    let line = Line::new(p, *v).ok()?;
    match stabbing_order(cfg, &line) {
        Ok(o) if &o == target => Some(TransversalWitness { line, order: o, depth: d }),
        _ => None,
    }
}

/// Local certification of `target` from a hint direction.
pub fn certify(
    cfg: &Configuration,
    target: &OrderedOrder,
    hint: &Vec3,
    evals: usize,
) -> Result<Option<TransversalWitness>> {
    let problem = OrderProblem::new(cfg, target)?;
    let hint = Direction::new(*hint)?.vector();
    Ok(certify_with(cfg, &problem, target, &hint, 0.02, evals))
}

fn certify_with(
    cfg: &Configuration,
    problem: &OrderProblem,
    target: &OrderedOrder,
    hint: &Vec3,
    step: f64,
    evals: usize,
) -> Option<TransversalWitness> {
    let (v, _, _) = ascend(problem, hint, step, evals);
    witness_for(cfg, problem, target, &v).or_else(|| witness_for(cfg, problem, target, hint))
}

pub(crate) struct DirectionSearch {
    pub direction: Vec3,
    pub score: f64,
    pub evaluations: usize,
    pub feasible: bool,
}

/// Multistart search in direction space: half the budget (in objective
/// evaluations) sweeps a seeded Fibonacci lattice, the rest runs local
/// ascents from the best lattice directions. Stops at the first feasible
/// direction.
pub(crate) fn search_direction(problem: &OrderProblem, budget: usize, seed: u64) -> DirectionSearch {
    let budget = budget.max(1);
    let sweep = (budget / 2).max(1);
    let lattice = FibonacciSphere::seeded(sweep, seed);
    let scores: Vec<f64> = (0..sweep).into_par_iter().map(|i| problem.score(&lattice.point(i))).collect();
    let mut ranked: Vec<usize> = (0..sweep).collect();
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut best = DirectionSearch {
        direction: lattice.point(ranked[0]),
        score: scores[ranked[0]],
        evaluations: sweep,
        feasible: problem.feasible(&lattice.point(ranked[0])),
    };

    let remaining = budget.saturating_sub(sweep);
    let starts = ranked.len().min(8).min(remaining / 20).max(usize::from(remaining > 0));
    let step = (4.0 * std::f64::consts::PI / sweep as f64).sqrt().clamp(1e-3, 0.5);
    for (k, &i) in ranked.iter().take(starts).enumerate() {
        let per_start = (remaining - (best.evaluations - sweep)) / (starts - k);
        let (v, s, used) = ascend(problem, &lattice.point(i), step, per_start.max(3));
        best.evaluations += used;
        if s > best.score {
            best.score = s;
            best.direction = v;
        }
        if problem.feasible(&v) {
            best.direction = v;
            best.score = s;
            best.feasible = true;
            return best;
        }
    }
    best
}

/// Budgeted multistart search for a transversal realizing `target`.
pub fn find_transversal(
    cfg: &Configuration,
    target: &OrderedOrder,
    budget: usize,
    seed: u64,
) -> Result<TransversalSearch> {
    let problem = OrderProblem::new(cfg, target)?;
    let found = search_direction(&problem, budget, seed);
    if found.feasible {
        if let Some(w) = witness_for(cfg, &problem, target, &found.direction) {
            return Ok(TransversalSearch::Found(w));
        }
    }
    Ok(TransversalSearch::NotFound { best_score: found.score, evaluations: found.evaluations })
}

/// Geometric permutations found by a direction sweep, each certified by a
/// witness line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Enumeration {
    pub gps: Vec<GeometricPermutation>,
    pub certificates: Vec<TransversalWitness>,
    pub directions_sampled: usize,
    pub uncertified: Vec<GeometricPermutation>,
}

struct Hit {
    depth: f64,
    index: usize,
    direction: Vec3,
}

const CHUNK: usize = 1024;

/// Sweeps a Fibonacci lattice of `resolution` points (full-sphere density)
/// and certifies every order seen at a direction of positive depth.
///
/// Only the cap of directions within `asin(2r / D)` of the farthest center
/// pair's axis can carry transversals, and `v`, `-v` give the same
/// permutation, so only that cap on one hemisphere is visited.
pub fn enumerate_geometric_permutations(cfg: &Configuration, resolution: usize, seed: u64) -> Result<Enumeration> {
    let r = cfg.common_radius()?;
    let centers = cfg.centers();
    let n = centers.len();
    if n == 0 {
        return Ok(Enumeration { gps: vec![], certificates: vec![], directions_sampled: 0, uncertified: vec![] });
    }

    let mut far = (0.0, Vec3::z());
    let mut deltas = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = centers[j] - centers[i];
            if d.norm() > far.0 {
                far = (d.norm(), d / d.norm());
            }
            deltas.push(d);
        }
    }
    let alpha = if far.0 <= 2.0 * r { std::f64::consts::FRAC_PI_2 } else { (2.0 * r / far.0).asin() + 1e-9 };
    let lattice = FibonacciSphere::with_pole(resolution.max(1), &far.1, seed);
    let count = lattice.cap_len(alpha);
    let spacing = (4.0 * std::f64::consts::PI / lattice.len() as f64).sqrt();

    // Label ranks make index sequences compare like label sequences.
    let mut by_label: Vec<usize> = (0..n).collect();
    by_label.sort_by(|&a, &b| cfg.label(a).cmp(cfg.label(b)));
    let mut rank = vec![0usize; n];
    for (k, &i) in by_label.iter().enumerate() {
        rank[i] = k;
    }
    let r2 = 4.0 * r * r * (1.0 + 1e-12);

    let chunks = count.div_ceil(CHUNK);
    let hits: BTreeMap<Vec<usize>, Hit> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let mut local: BTreeMap<Vec<usize>, Hit> = BTreeMap::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                let p = lattice.point(i);
                let (e1, e2) = perp_basis(&p);
                let jitter = spacing * 0.25;
                let v = (p + e1 * rng.gen_range(-jitter..jitter) + e2 * rng.gen_range(-jitter..jitter)).normalize();
                if deltas.iter().any(|d| d.norm_squared() - d.dot(&v).powi(2) > r2) {
                    continue;
                }
                let (dep, _) = depth_of(&centers, r, &v);
                if dep <= 0.0 {
                    continue;
                }
                let Ok(mut idx) = sorted_indices(&centers, &v) else { continue };
                let mut dir = v;
                let rev: Vec<usize> = idx.iter().rev().copied().collect();
                if rev.iter().map(|&k| rank[k]).lt(idx.iter().map(|&k| rank[k])) {
                    idx = rev;
                    dir = -v;
                }
                let better = |h: &Hit| dep > h.depth || (dep == h.depth && i < h.index);
                match local.get(&idx) {
                    Some(h) if !better(h) => {}
                    _ => {
                        local.insert(idx, Hit { depth: dep, index: i, direction: dir });
                    }
                }
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, h) in b {
                let keep =
                    a.get(&k).map_or(true, |old| h.depth > old.depth || (h.depth == old.depth && h.index < old.index));
                if keep {
                    a.insert(k, h);
                }
            }
            a
        });

    let candidates: Vec<(OrderedOrder, Vec3)> =
        hits.iter().map(|(idx, h)| (OrderedOrder::from_indices(cfg, idx), h.direction)).collect();
    let certified: Vec<(OrderedOrder, Option<TransversalWitness>)> = candidates
        .into_par_iter()
        .map(|(order, dir)| {
            let problem = OrderProblem::new(cfg, &order).expect("order drawn from cfg");
            let w = certify_with(cfg, &problem, &order, &dir, spacing.clamp(1e-4, 0.05), 200);
            (order, w)
        })
        .collect();

    let mut gps = Vec::new();
    let mut certificates = Vec::new();
    let mut uncertified = Vec::new();
    for (order, w) in certified {
        match w {
            Some(w) => {
                gps.push(canonicalize(&order));
                certificates.push(w);
            }
            None => uncertified.push(canonicalize(&order)),
        }
    }
    Ok(Enumeration { gps, certificates, directions_sampled: count, uncertified })
}
