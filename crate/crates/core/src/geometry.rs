//! Points, balls, lines, configurations and the orders lines induce on them.

use std::collections::HashSet;
use std::fmt;

use nalgebra::{Isometry3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

pub type Vec3 = Vector3<f64>;
/// Points share the vector type; coordinates are in ball-radius units.
pub type Point3 = Vector3<f64>;

fn finite(p: &Vec3) -> bool {
    p.iter().all(|c| c.is_finite())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point3,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point3, radius: f64) -> Result<Self> {
        if !finite(&center) || !radius.is_finite() {
            return Err(Error::NonFinite);
        }
        if radius <= 0.0 {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(Ball { center, radius })
    }

    pub fn unit(center: Point3) -> Self {
        Ball { center, radius: 1.0 }
    }

    pub fn meets(&self, line: &Line) -> bool {
        line.distance_to(&self.center) <= self.radius + tol::GEOM
    }
}

/// A line stored as the foot of the perpendicular from the origin plus a unit
/// direction. The direction carries the orientation; [`Line::unoriented`]
/// yields the canonical representative of the underlying point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    anchor: Point3,
    direction: Vec3,
}

impl Line {
    pub fn new(point: Point3, direction: Vec3) -> Result<Self> {
        if !finite(&point) || !finite(&direction) {
            return Err(Error::NonFinite);
        }
        let norm = direction.norm();
        if norm < 1e-300 {
            return Err(Error::ZeroDirection);
        }
        let direction = direction / norm;
        let anchor = point - direction * point.dot(&direction);
        Ok(Line { anchor, direction })
    }

    pub fn through(a: Point3, b: Point3) -> Result<Self> {
        Line::new(a, b - a)
    }

    pub fn x_axis() -> Self {
        Line { anchor: Vec3::zeros(), direction: Vec3::x() }
    }

    pub fn y_axis() -> Self {
        Line { anchor: Vec3::zeros(), direction: Vec3::y() }
    }

    pub fn z_axis() -> Self {
        Line { anchor: Vec3::zeros(), direction: Vec3::z() }
    }

    pub fn anchor(&self) -> Point3 {
        self.anchor
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn reversed(&self) -> Self {
        Line { anchor: self.anchor, direction: -self.direction }
    }

    /// Canonical unoriented form: the direction is lexicographically
    /// nonnegative.
    pub fn unoriented(&self) -> Self {
        let d = self.direction;
        let flip = d.iter().find(|c| c.abs() > tol::UNIT).map_or(false, |c| *c < 0.0);
        if flip {
            self.reversed()
        } else {
            *self
        }
    }

    pub fn point_at(&self, s: f64) -> Point3 {
        self.anchor + self.direction * s
    }

    /// Signed parameter of the orthogonal projection of `p` onto the line.
    pub fn param_of(&self, p: &Point3) -> f64 {
        (p - self.anchor).dot(&self.direction)
    }

    pub fn foot(&self, p: &Point3) -> Point3 {
        self.point_at(self.param_of(p))
    }

    pub fn distance_to(&self, p: &Point3) -> f64 {
        dist_point_line(p, self)
    }

    pub fn transformed(&self, iso: &Isometry3<f64>) -> Self {
        let p = iso.transform_point(&self.anchor.into()).coords;
        let d = iso.transform_vector(&self.direction);
        Line::new(p, d).expect("isometry preserves validity")
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Line { anchor: self.anchor * factor, direction: self.direction }
    }

    /// Distance between two lines as points of line space: the larger of the
    /// anchor offset and the angle between the (unoriented) directions.
    pub fn separation(&self, other: &Line) -> f64 {
        let cos = self.direction.dot(&other.direction).abs().min(1.0);
        let angle = cos.acos();
        (self.anchor - other.anchor).norm().max(angle)
    }
}

/// Distance from `p` to `l`.
pub fn dist_point_line(p: &Point3, l: &Line) -> f64 {
    let rel = p - l.anchor;
    (rel - l.direction * rel.dot(&l.direction)).norm()
}

/// A labeled, ordered family of pairwise non-overlapping balls in R^3.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    labels: Vec<String>,
    balls: Vec<Ball>,
}

#[derive(Serialize, Deserialize)]
struct BallEntry {
    label: String,
    center: [f64; 3],
    radius: f64,
}

#[derive(Serialize, Deserialize)]
struct ConfigurationFile {
    balls: Vec<BallEntry>,
}

impl Configuration {
    pub fn new(entries: Vec<(String, Ball)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (label, ball) in &entries {
            if label.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
            Ball::new(ball.center, ball.radius)?;
        }
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                let (a, b) = (&entries[i].1, &entries[j].1);
                if (a.center - b.center).norm() < a.radius + b.radius - tol::GEOM {
                    return Err(Error::Overlap(entries[i].0.clone(), entries[j].0.clone()));
                }
            }
        }
        let (labels, balls) = entries.into_iter().unzip();
        Ok(Configuration { labels, balls })
    }

    /// Balls of a common radius labeled `A`, `B`, `C`, ... in the given order.
    pub fn from_centers(centers: &[Point3], radius: f64) -> Result<Self> {
        let entries = centers
            .iter()
            .enumerate()
            .map(|(i, c)| Ok((default_label(i), Ball::new(*c, radius)?)))
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(entries)
    }

    pub fn unit(centers: &[Point3]) -> Result<Self> {
        Configuration::from_centers(centers, 1.0)
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn ball(&self, i: usize) -> &Ball {
        &self.balls[i]
    }

    pub fn centers(&self) -> Vec<Point3> {
        self.balls.iter().map(|b| b.center).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The common radius, or `MixedRadii` when radii differ by more than the
    /// geometric tolerance.
    pub fn common_radius(&self) -> Result<f64> {
        let r0 = self.balls.first().map_or(1.0, |b| b.radius);
        if self.balls.iter().any(|b| (b.radius - r0).abs() > tol::GEOM) {
            return Err(Error::MixedRadii);
        }
        Ok(r0)
    }

    /// Same centers, every radius replaced by `radius`. Shrinking never
    /// creates overlaps, so only growth is re-validated.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        let grows = self.balls.iter().any(|b| radius > b.radius);
        let entries: Vec<_> =
            self.labels.iter().cloned().zip(self.balls.iter().map(|b| Ball { center: b.center, radius })).collect();
        if radius <= 0.0 || !radius.is_finite() {
            return Err(Error::InvalidRadius(radius));
        }
        if grows {
            Configuration::new(entries)
        } else {
            let (labels, balls) = entries.into_iter().unzip();
            Ok(Configuration { labels, balls })
        }
    }

    /// Replace the balls, keeping labels. Used by shrinking procedures whose
    /// output is nested in a validated configuration.
    pub(crate) fn with_balls_unchecked(&self, balls: Vec<Ball>) -> Self {
        debug_assert_eq!(balls.len(), self.balls.len());
        Configuration { labels: self.labels.clone(), balls }
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Configuration {
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            balls: indices.iter().map(|&i| self.balls[i]).collect(),
        }
    }

    pub fn transformed(&self, iso: &Isometry3<f64>) -> Self {
        let balls = self
            .balls
            .iter()
            .map(|b| Ball { center: iso.transform_point(&b.center.into()).coords, radius: b.radius })
            .collect();
        Configuration { labels: self.labels.clone(), balls }
    }

    /// Uniform scaling about the origin.
    pub fn scaled(&self, factor: f64) -> Self {
        let balls = self.balls.iter().map(|b| Ball { center: b.center * factor, radius: b.radius * factor }).collect();
        Configuration { labels: self.labels.clone(), balls }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigurationFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let entries = file
            .balls
            .into_iter()
            .map(|e| {
                let c = Vec3::new(e.center[0], e.center[1], e.center[2]);
                Ok((e.label, Ball::new(c, e.radius)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(entries)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let file = ConfigurationFile {
            balls: self
                .labels
                .iter()
                .zip(&self.balls)
                .map(|(l, b)| BallEntry {
                    label: l.clone(),
                    center: [b.center.x, b.center.y, b.center.z],
                    radius: b.radius,
                })
                .collect(),
        };
        serde_json::to_value(file).expect("configuration serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("configuration serializes")
    }
}

/// `A`..`Z`, then `A1`, `B1`, ...
pub fn default_label(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

/// A sequence of distinct labels, read as the order in which an oriented
/// line meets the balls.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrderedOrder(Vec<String>);

impl OrderedOrder {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for l in &labels {
            if l.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if !seen.insert(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(OrderedOrder(labels))
    }

    /// Parses `ABCD` (one character per label) or `A1,B2,C3`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let labels: Vec<String> = if text.contains(',') {
            text.split(',').map(|s| s.trim().to_string()).collect()
        } else {
            text.chars().map(|c| c.to_string()).collect()
        };
        OrderedOrder::new(labels)
    }

    pub fn from_indices(cfg: &Configuration, indices: &[usize]) -> Self {
        OrderedOrder(indices.iter().map(|&i| cfg.label(i).to_string()).collect())
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        OrderedOrder(v)
    }

    /// Positions of the labels in `cfg`, or `NotAPermutation`.
    pub fn indices_in(&self, cfg: &Configuration) -> Result<Vec<usize>> {
        if self.0.len() != cfg.len() {
            return Err(Error::NotAPermutation);
        }
        self.0.iter().map(|l| cfg.index_of(l).ok_or(Error::NotAPermutation)).collect()
    }

    /// The order restricted to the labels in `keep`, preserving sequence.
    pub fn restricted(&self, keep: &[&str]) -> Self {
        OrderedOrder(self.0.iter().filter(|l| keep.contains(&l.as_str())).cloned().collect())
    }
}

impl fmt::Display for OrderedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|l| l.chars().count() == 1) {
            write!(f, "{}", self.0.concat())
        } else {
            write!(f, "{}", self.0.join(","))
        }
    }
}

/// An order identified with its reverse, stored as the lexicographically
/// smaller representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeometricPermutation {
    canonical: OrderedOrder,
}

impl GeometricPermutation {
    pub fn canonical(&self) -> &OrderedOrder {
        &self.canonical
    }

    pub fn contains(&self, order: &OrderedOrder) -> bool {
        &self.canonical == order || self.canonical.reversed() == *order
    }
}

impl fmt::Display for GeometricPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.canonical.fmt(f)
    }
}

pub fn canonicalize(order: &OrderedOrder) -> GeometricPermutation {
    let rev = order.reversed();
    let canonical = if rev < *order { rev } else { order.clone() };
    GeometricPermutation { canonical }
}

fn unit_direction(v: &Vec3) -> Result<Vec3> {
    if !finite(v) {
        return Err(Error::NonFinite);
    }
    let n = v.norm();
    if n < 1e-300 {
        return Err(Error::ZeroDirection);
    }
    Ok(v / n)
}

/// Indices sorted by increasing `v · center`; on a tie returns the offending
/// pair of indices.
pub(crate) fn sorted_indices(centers: &[Point3], v: &Vec3) -> std::result::Result<Vec<usize>, (usize, usize)> {
    let proj: Vec<f64> = centers.iter().map(|c| c.dot(v)).collect();
    let mut idx: Vec<usize> = (0..centers.len()).collect();
    idx.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]));
    for w in idx.windows(2) {
        if proj[w[1]] - proj[w[0]] < tol::GEOM {
            return Err((w[0], w[1]));
        }
    }
    Ok(idx)
}

/// The order in which any transversal with direction `v` meets `cfg`.
pub fn order_along(cfg: &Configuration, v: &Vec3) -> Result<OrderedOrder> {
    let v = unit_direction(v)?;
    sorted_indices(&cfg.centers(), &v)
        .map(|idx| OrderedOrder::from_indices(cfg, &idx))
        .map_err(|(a, b)| Error::Tie(cfg.label(a).to_string(), cfg.label(b).to_string()))
}

/// Reads off the order that the oriented transversal `l` realizes on `cfg`.
pub fn stabbing_order(cfg: &Configuration, l: &Line) -> Result<OrderedOrder> {
    for (label, ball) in cfg.labels().iter().zip(cfg.balls()) {
        if !ball.meets(l) {
            return Err(Error::NotATransversal(label.clone()));
        }
    }
    let order = order_along(cfg, &l.direction())?;
    let idx = order.indices_in(cfg)?;
    // Consecutive chords may touch but must not interpenetrate.
    for w in idx.windows(2) {
        let (a, b) = (cfg.ball(w[0]), cfg.ball(w[1]));
        let half = |ball: &Ball| {
            let d = l.distance_to(&ball.center);
            (ball.radius * ball.radius - d * d).max(0.0).sqrt()
        };
        let gap = (l.param_of(&b.center) - half(b)) - (l.param_of(&a.center) + half(a));
        if gap < -tol::GEOM {
            return Err(Error::Tie(cfg.label(w[0]).to_string(), cfg.label(w[1]).to_string()));
        }
    }
    Ok(order)
}
