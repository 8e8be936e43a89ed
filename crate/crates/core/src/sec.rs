//! Smallest enclosing circle of planar points (move-to-front recursion,
//! written iteratively).

use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

impl Circle {
    fn contains(&self, p: &Vec2) -> bool {
        (p - self.center).norm() <= self.radius * (1.0 + 1e-12) + 1e-14
    }

    fn from_two(a: &Vec2, b: &Vec2) -> Circle {
        let center = (a + b) / 2.0;
        Circle { center, radius: (a - center).norm().max((b - center).norm()) }
    }

    fn from_three(a: &Vec2, b: &Vec2, c: &Vec2) -> Circle {
        let (ab, ac) = (b - a, c - a);
        let d = 2.0 * (ab.x * ac.y - ab.y * ac.x);
        let scale = ab.norm_squared().max(ac.norm_squared());
        if d.abs() <= 1e-14 * scale {
            // Nearly collinear: the widest pair spans the circle.
            let cands = [Circle::from_two(a, b), Circle::from_two(a, c), Circle::from_two(b, c)];
            return cands.into_iter().max_by(|x, y| x.radius.total_cmp(&y.radius)).expect("three candidates");
        }
        let (b2, c2) = (ab.norm_squared(), ac.norm_squared());
        let off = Vec2::new(ac.y * b2 - ab.y * c2, ab.x * c2 - ac.x * b2) / d;
        let center = a + off;
        let radius = [a, b, c].iter().map(|p| (*p - center).norm()).fold(0.0, f64::max);
        Circle { center, radius }
    }
}

/// The unique minimal circle containing `pts`. Returns `None` for no points.
///
/// The expected-linear bound needs a random insertion order; callers with
/// adversarial input may shuffle first. Small inputs are handled in any order.
pub fn smallest_enclosing_circle(pts: &[Vec2]) -> Option<Circle> {
    let first = *pts.first()?;
    let mut c = Circle { center: first, radius: 0.0 };
    for i in 1..pts.len() {
        if c.contains(&pts[i]) {
            continue;
        }
        c = Circle { center: pts[i], radius: 0.0 };
        for j in 0..i {
            if c.contains(&pts[j]) {
                continue;
            }
            c = Circle::from_two(&pts[i], &pts[j]);
            for k in 0..j {
                if !c.contains(&pts[k]) {
                    c = Circle::from_three(&pts[i], &pts[j], &pts[k]);
                }
            }
        }
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_cases() {
        let one = smallest_enclosing_circle(&[Vec2::new(3.0, -1.0)]).unwrap();
        assert_eq!(one.radius, 0.0);
        let two = smallest_enclosing_circle(&[Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)]).unwrap();
        assert!((two.center - Vec2::new(1.0, 0.0)).norm() < 1e-15 && (two.radius - 1.0).abs() < 1e-15);
        let h = 3f64.sqrt();
        let tri = [Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0), Vec2::new(1.0, h)];
        let c = smallest_enclosing_circle(&tri).unwrap();
        assert!((c.radius - 2.0 / h).abs() < 1e-12);
        assert!(smallest_enclosing_circle(&[]).is_none());
    }

    #[test]
    fn obtuse_triangle_uses_longest_side() {
        let pts = [Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 0.2)];
        let c = smallest_enclosing_circle(&pts).unwrap();
        assert!((c.radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_and_collinear_points() {
        let pts = vec![Vec2::new(1.0, 1.0); 5];
        assert!(smallest_enclosing_circle(&pts).unwrap().radius < 1e-15);
        let line: Vec<_> = (0..6).map(|i| Vec2::new(i as f64, 2.0 * i as f64)).collect();
        let c = smallest_enclosing_circle(&line).unwrap();
        assert!((c.radius - 125f64.sqrt() / 2.0).abs() < 1e-12);
    }

    // Brute force over all pairs and triples: the minimal enclosing circle
    // is determined by at most three input points.
    fn brute(pts: &[Vec2]) -> f64 {
        let mut best = f64::INFINITY;
        let n = pts.len();
        let mut consider = |c: Circle| {
            if pts.iter().all(|p| (p - c.center).norm() <= c.radius + 1e-9) {
                best = best.min(c.radius);
            }
        };
        if n == 1 {
            return 0.0;
        }
        for i in 0..n {
            for j in i + 1..n {
                consider(Circle::from_two(&pts[i], &pts[j]));
                for k in j + 1..n {
                    consider(Circle::from_three(&pts[i], &pts[j], &pts[k]));
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn matches_brute_force(raw in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..9)) {
            let pts: Vec<Vec2> = raw.iter().map(|(x, y)| Vec2::new(*x, *y)).collect();
            let c = smallest_enclosing_circle(&pts).unwrap();
            for p in &pts {
                prop_assert!((p - c.center).norm() <= c.radius + 1e-9);
            }
            prop_assert!((c.radius - brute(&pts)).abs() < 1e-8);
            let mut rev = pts.clone();
            rev.reverse();
            let c2 = smallest_enclosing_circle(&rev).unwrap();
            prop_assert!((c.radius - c2.radius).abs() < 1e-9);
        }
    }
}
