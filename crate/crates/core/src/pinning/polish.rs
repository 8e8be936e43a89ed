//! Newton refinement of the line minimizing the largest center distance.
//!
//! With `q_i(u)` the squared distance of center `i` to the line `u`, the
//! minimax line satisfies, on its active set `A`,
//! `sum λ_i ∇q_i = 0`, `q_i = s`, `sum λ_i = 1`, `λ ≥ 0`.
//! The square system is solved by Newton's method; the Lagrangian Hessian is
//! a central difference of the analytic gradients. The active set is
//! corrected by dropping negative multipliers and adding violated centers.

use nalgebra::{DMatrix, DVector};

use super::chart::{dist2, dist2_gradient, LineChart, LineCoords4, Vec4};
use crate::geometry::{Line, Point3};

#[derive(Debug, Clone, PartialEq)]
pub struct Polished {
    pub line: Line,
    /// Largest center distance to `line`.
    pub radius: f64,
    pub active: Vec<usize>,
    pub multipliers: Vec<f64>,
}

fn solve_active(pts: &[Point3], active: &[usize], u0: [f64; 4]) -> Option<([f64; 4], Vec<f64>, f64)> {
    let m = active.len();
    let dim = 5 + m;
    let mut u = u0;
    let mut lam = vec![1.0 / m as f64; m];
    let mut s = active.iter().map(|&i| dist2(&u, &pts[i])).fold(0.0, f64::max);
    let lag_grad = |u: &[f64; 4], lam: &[f64]| -> Vec4 {
        active.iter().zip(lam).map(|(&i, l)| dist2_gradient(u, &pts[i]) * *l).sum()
    };
    let scale = s.max(1e-300);
    for _ in 0..60 {
        let g = lag_grad(&u, &lam);
        let mut f = DVector::zeros(dim);
        for k in 0..4 {
            f[k] = g[k];
        }
        for (r, &i) in active.iter().enumerate() {
            f[4 + r] = dist2(&u, &pts[i]) - s;
        }
        f[4 + m] = lam.iter().sum::<f64>() - 1.0;
        if f.norm() <= 1e-15 * (1.0 + scale) {
            return Some((u, lam, s));
        }
        let mut jac = DMatrix::zeros(dim, dim);
        let h = 1e-6;
        for k in 0..4 {
            let (mut up, mut dn) = (u, u);
            up[k] += h;
            dn[k] -= h;
            let col = (lag_grad(&up, &lam) - lag_grad(&dn, &lam)) / (2.0 * h);
            for r in 0..4 {
                jac[(r, k)] = col[r];
            }
        }
        for (c, &i) in active.iter().enumerate() {
            let gi = dist2_gradient(&u, &pts[i]);
            for r in 0..4 {
                jac[(r, 4 + c)] = gi[r];
                jac[(4 + c, r)] = gi[r];
            }
            jac[(4 + c, 4 + m)] = -1.0;
            jac[(4 + m, 4 + c)] = 1.0;
        }
        let step = jac.lu().solve(&(-f))?;
        if !step.iter().all(|x| x.is_finite()) {
            return None;
        }
        for k in 0..4 {
            u[k] += step[k];
        }
        for c in 0..m {
            lam[c] += step[4 + c];
        }
        s += step[4 + m];
    }
    let residual: f64 = active.iter().map(|&i| (dist2(&u, &pts[i]) - s).abs()).fold(0.0, f64::max);
    (residual <= 1e-12 * (1.0 + scale) && lag_grad(&u, &lam).norm() <= 1e-10).then_some((u, lam, s))
}

/// Refines `start` toward the line minimizing `max_i |center_i, line|`.
/// Returns `None` when the system is singular (for example when the
/// minimizer is not isolated) or the active-set loop does not settle.
pub fn polish_minimax(centers: &[Point3], start: &Line) -> Option<Polished> {
    if centers.is_empty() {
        return None;
    }
    let feet: Vec<Point3> = centers.iter().map(|c| start.foot(c)).collect();
    let chart = LineChart::centered(start, &feet);
    let pts: Vec<Point3> = centers.iter().map(|c| chart.to_chart(c)).collect();
    let u0 = chart.coords(start).ok()?.u;

    let q0: Vec<f64> = pts.iter().map(|p| dist2(&u0, p)).collect();
    let top = q0.iter().copied().fold(0.0, f64::max);
    if top.sqrt() < 1e-9 {
        return None;
    }
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| q0[b].total_cmp(&q0[a]).then(a.cmp(&b)));
    let mut active: Vec<usize> = order.iter().copied().filter(|&i| q0[i].sqrt() >= top.sqrt() - 1e-4).take(5).collect();

    for _ in 0..12 {
        let (u, lam, s) = solve_active(&pts, &active, u0)?;
        if let Some((pos, _)) = lam.iter().enumerate().filter(|(_, l)| **l < -1e-12).min_by(|a, b| a.1.total_cmp(b.1)) {
            if active.len() == 1 {
                return None;
            }
            active.remove(pos);
            continue;
        }
        let violator = (0..pts.len())
            .filter(|i| !active.contains(i))
            .map(|i| (i, dist2(&u, &pts[i])))
            .filter(|(_, q)| *q > s * (1.0 + 1e-12))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((i, _)) = violator {
            if active.len() >= 5 {
                return None;
            }
            active.push(i);
            continue;
        }
        let line = chart.line(&LineCoords4::new(u));
        let radius = centers.iter().map(|c| line.distance_to(c)).fold(0.0, f64::max);
        return Some(Polished { line, radius, active, multipliers: lam });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    #[test]
    fn recovers_the_axis_for_a_zigzag_triple() {
        let y0 = 0.37;
        let c = [Vec3::new(0.0, y0, 0.0), Vec3::new(2.0, -y0, 0.0), Vec3::new(4.0, y0, 0.0)];
        let start = Line::new(Vec3::new(0.0, 0.01, -0.02), Vec3::new(1.0, 0.003, 0.002)).unwrap();
        let p = polish_minimax(&c, &start).unwrap();
        assert!((p.radius - y0).abs() < 1e-12, "{}", p.radius);
        assert!(p.line.separation(&Line::x_axis()) < 1e-10);
        assert!(p.multipliers.iter().all(|l| *l > 0.0));
    }

    #[test]
    fn collinear_centers_are_skipped() {
        let c = [Vec3::zeros(), Vec3::x() * 2.0, Vec3::x() * 4.0];
        assert!(polish_minimax(&c, &Line::x_axis()).is_none());
    }
}
