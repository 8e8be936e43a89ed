//! Closed-form special functions and grid scans of their claimed
//! inequalities.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling::stream_rng;

/// `√(2 + 2 cos φ)`, the length of the sum of two unit vectors at angle `φ`.
pub fn g(phi: f64) -> f64 {
    (2.0 + 2.0 * phi.cos()).max(0.0).sqrt()
}

/// `sin x (sin x + cos x)`.
pub fn f(x: f64) -> f64 {
    x.sin() * (x.sin() + x.cos())
}

/// `sin²x + (cot x + sin x - 1)²`.
pub fn abc1(x: f64) -> f64 {
    let (s, cot) = (x.sin(), x.cos() / x.sin());
    s * s + (cot + s - 1.0).powi(2)
}

/// `1 + (cot x + sin x + cos x - 1)(cot x - 1)(1 - sin x)`, equal to
/// [`abc1`].
pub fn abc1_factored(x: f64) -> f64 {
    let (s, c) = (x.sin(), x.cos());
    let cot = c / s;
    1.0 + (cot + s + c - 1.0) * (cot - 1.0) * (1.0 - s)
}

/// Law-of-sines length `2 / (sin γ (sin γ + cos γ))`, defined on
/// `(π/4, π/2)`.
pub fn ap_length(gamma: f64) -> Result<f64> {
    if !(gamma > FRAC_PI_4 && gamma < FRAC_PI_2) {
        return Err(Error::Domain(format!("gamma = {gamma} outside (pi/4, pi/2)")));
    }
    Ok(2.0 / f(gamma))
}

/// `√(1 - z²)` on `[-1, 1]`.
pub fn r(z: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!("z = {z} outside [-1, 1]")));
    }
    Ok((1.0 - z * z).sqrt())
}

fn r_d1(z: f64) -> f64 {
    -z / (1.0 - z * z).sqrt()
}

fn r_d2(z: f64) -> f64 {
    -(1.0 - z * z).powf(-1.5)
}

/// Two unit balls, one centered at the origin and one at `(d, 0, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallPair {
    pub d: f64,
    pub b: f64,
}

impl BallPair {
    pub fn new(d: f64, b: f64) -> Result<Self> {
        if !(d.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite);
        }
        if d <= 0.0 || !(0.0..=2.0).contains(&b) {
            return Err(Error::Domain(format!("need d > 0 and 0 <= b <= 2, got d = {d}, b = {b}")));
        }
        if d * d + b * b < 4.0 - 1e-12 {
            return Err(Error::Domain("balls overlap".into()));
        }
        Ok(BallPair { d, b })
    }

    fn check(&self, z: f64) -> Result<()> {
        if z < self.b - 1.0 || z > 1.0 {
            return Err(Error::Domain(format!("z = {z} outside [{}, 1]", self.b - 1.0)));
        }
        Ok(())
    }

    /// `(R(z) + R(z - b)) / d`.
    pub fn f(&self, z: f64) -> Result<f64> {
        self.check(z)?;
        Ok((r(z)? + r(z - self.b)?) / self.d)
    }

    /// `arcsin f(z)`.
    pub fn big_g(&self, z: f64) -> Result<f64> {
        let fz = self.f(z)?;
        if fz > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("f({z}) = {fz} exceeds 1")));
        }
        Ok(fz.min(1.0).asin())
    }

    pub fn big_g_d1(&self, z: f64) -> Result<f64> {
        let fz = self.f(z)?;
        let f1 = (r_d1(z) + r_d1(z - self.b)) / self.d;
        Ok(f1 / (1.0 - fz * fz).sqrt())
    }

    pub fn big_g_d2(&self, z: f64) -> Result<f64> {
        let fz = self.f(z)?;
        let f1 = (r_d1(z) + r_d1(z - self.b)) / self.d;
        let f2 = (r_d2(z) + r_d2(z - self.b)) / self.d;
        let q = 1.0 - fz * fz;
        Ok((f2 * q + fz * f1 * f1) / q.powf(1.5))
    }

    /// Central second difference at step `h`, Richardson-extrapolated with
    /// step `h/2`.
    pub fn big_g_d2_fd(&self, z: f64, h: f64) -> Result<f64> {
        let second =
            |h: f64| -> Result<f64> { Ok((self.big_g(z + h)? - 2.0 * self.big_g(z)? + self.big_g(z - h)?) / (h * h)) };
        Ok((4.0 * second(h / 2.0)? - second(h)?) / 3.0)
    }

    /// The interval on which `G''` is scanned, clipped away from the
    /// singular endpoints.
    pub fn scan_interval(&self) -> (f64, f64) {
        (self.b / 2.0 + 1e-3, 1.0 - 1e-3)
    }

    pub fn table(&self, points: usize) -> Result<AngleFunctionTable> {
        let (lo, hi) = self.scan_interval();
        let mut t = AngleFunctionTable { pair: *self, ..Default::default() };
        for k in 0..points {
            let z = if points == 1 { lo } else { lo + (hi - lo) * k as f64 / (points - 1) as f64 };
            t.z.push(z);
            t.g.push(self.big_g(z)?);
            t.dg.push(self.big_g_d1(z)?);
            t.d2g.push(self.big_g_d2(z)?);
            t.d2g_fd.push(self.big_g_d2_fd(z, FD_STEP)?);
        }
        Ok(t)
    }
}

impl Default for BallPair {
    fn default() -> Self {
        BallPair { d: 2.0, b: 0.0 }
    }
}

const FD_STEP: f64 = 1e-4;

/// Samples of `G`, `G'` and `G''` (closed form and finite difference) on a
/// grid inside the domain.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AngleFunctionTable {
    pub pair: BallPair,
    pub z: Vec<f64>,
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
    pub d2g: Vec<f64>,
    pub d2g_fd: Vec<f64>,
}

/// A grid scan: how many points miss the required margin and the smallest
/// margin seen (positive margins satisfy the inequality).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scan {
    pub points: usize,
    pub violations: usize,
    pub worst_margin: f64,
    /// First grid argument attaining `worst_margin`.
    pub worst_at: f64,
}

impl Scan {
    fn new() -> Self {
        Scan { points: 0, violations: 0, worst_margin: f64::INFINITY, worst_at: f64::NAN }
    }

    fn push(&mut self, at: f64, margin: f64, threshold: f64) {
        self.points += 1;
        if !(margin > threshold) {
            self.violations += 1;
        }
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_at = at;
        }
    }

    fn merge(mut self, o: Scan) -> Scan {
        self.points += o.points;
        self.violations += o.violations;
        if o.worst_margin < self.worst_margin {
            self.worst_margin = o.worst_margin;
            self.worst_at = o.worst_at;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GScan {
    /// Margins `g(x)+g(y)+g(z) - g(x+y+z)`, violated below `-1e-9`.
    pub scan: Scan,
    /// Cells with `|margin| <= 1e-6`.
    pub equality_cells: usize,
    /// Equality cells where fewer than two arguments are `≡ π`.
    pub unexplained_equalities: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialFunctionOptions {
    pub g_grid: usize,
    pub interior_points: usize,
    pub pairs: usize,
    pub pair_points: usize,
    pub seed: u64,
}

impl Default for SpecialFunctionOptions {
    fn default() -> Self {
        SpecialFunctionOptions { g_grid: 200, interior_points: 10_000, pairs: 100, pair_points: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialFunctionReport {
    pub options: SpecialFunctionOptions,
    pub g_superadditivity: GScan,
    /// `f(x) - 1` on the open interval, threshold `1e-9`.
    pub f_above_one: Scan,
    /// `1 - abc1(x)`, threshold `1e-9`.
    pub abc1_below_one: Scan,
    /// `2 - |ap|`, threshold 0.
    pub ap_below_two: Scan,
    /// Largest `|abc1 - abc1_factored|`.
    pub abc1_factorization_residual: f64,
    /// `-G''` by finite differences over random pairs, threshold `1e-8`.
    pub g_concavity: Scan,
    /// Largest gap between finite-difference and closed-form `G''`,
    /// relative to `max(1, |G''|)`.
    pub g_d2_agreement: f64,
    pub pairs: Vec<BallPair>,
}

fn near_pi(x: f64) -> bool {
    let m = x.rem_euclid(TAU);
    (m - PI).abs() <= 1e-6
}

pub fn scan_g(n: usize) -> GScan {
    let step = TAU / n as f64;
    let gs: Vec<f64> = (0..n).map(|k| g(k as f64 * step)).collect();
    let parts: Vec<(Scan, usize, usize)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut scan = Scan::new();
            let (mut eq, mut bad) = (0, 0);
            for j in 0..n {
                for k in 0..n {
                    let (x, y, z) = (i as f64 * step, j as f64 * step, k as f64 * step);
                    let margin = gs[i] + gs[j] + gs[k] - g(x + y + z);
                    scan.push(x, margin, -1e-9);
                    if margin.abs() <= 1e-6 {
                        eq += 1;
                        let pis = [x, y, z].iter().filter(|a| near_pi(**a)).count();
                        if pis < 2 {
                            bad += 1;
                        }
                    }
                }
            }
            // violations were counted against `> -1e-9`; equality sits on it
            (scan, eq, bad)
        })
        .collect();
    let (scan, equality_cells, unexplained_equalities) =
        parts.into_iter().fold((Scan::new(), 0, 0), |(s, e, b), (s2, e2, b2)| (s.merge(s2), e + e2, b + b2));
    GScan { scan, equality_cells, unexplained_equalities }
}

/// Points strictly inside `(π/4, π/2)`.
fn interior_grid(n: usize) -> impl Iterator<Item = f64> {
    let h = FRAC_PI_4 / (n + 1) as f64;
    (1..=n).map(move |k| FRAC_PI_4 + k as f64 * h)
}

pub fn random_pair<R: Rng>(rng: &mut R) -> BallPair {
    let b: f64 = rng.gen_range(0.0..1.99);
    let dmin = (4.0 - b * b).sqrt();
    BallPair::new(rng.gen_range(dmin..dmin + 4.0), b).expect("sampled in domain")
}

pub fn special_functions(opts: &SpecialFunctionOptions) -> Result<SpecialFunctionReport> {
    let g_superadditivity = scan_g(opts.g_grid);
    let (mut f_above_one, mut abc1_below_one, mut ap_below_two) = (Scan::new(), Scan::new(), Scan::new());
    let mut abc1_factorization_residual: f64 = 0.0;
    for x in interior_grid(opts.interior_points) {
        f_above_one.push(x, f(x) - 1.0, 1e-9);
        abc1_below_one.push(x, 1.0 - abc1(x), 1e-9);
        ap_below_two.push(x, 2.0 - ap_length(x)?, 0.0);
        abc1_factorization_residual = abc1_factorization_residual.max((abc1(x) - abc1_factored(x)).abs());
    }
    let mut rng = stream_rng(opts.seed, 0);
    let pairs: Vec<BallPair> = (0..opts.pairs).map(|_| random_pair(&mut rng)).collect();
    let mut g_concavity = Scan::new();
    let mut g_d2_agreement: f64 = 0.0;
    for pair in &pairs {
        let t = pair.table(opts.pair_points)?;
        for k in 0..t.z.len() {
            g_concavity.push(t.z[k], -t.d2g_fd[k], 1e-8);
            g_d2_agreement = g_d2_agreement.max((t.d2g_fd[k] - t.d2g[k]).abs() / t.d2g[k].abs().max(1.0));
        }
    }
    Ok(SpecialFunctionReport {
        options: *opts,
        g_superadditivity,
        f_above_one,
        abc1_below_one,
        ap_below_two,
        abc1_factorization_residual,
        g_concavity,
        g_d2_agreement,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!((g(0.0) - 2.0).abs() < 1e-15);
        assert!(g(PI).abs() < 1e-7);
        assert!((f(FRAC_PI_4) - 1.0).abs() < 1e-15);
        assert!((f(FRAC_PI_2) - 1.0).abs() < 1e-15);
        let pair = BallPair::new(4.0, 0.0).unwrap();
        assert!((pair.big_g(0.0).unwrap() - PI / 6.0).abs() < 1e-15);
        assert_eq!(r(0.6).unwrap(), 0.8);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(r(1.5), Err(Error::Domain(_))));
        assert!(matches!(ap_length(0.5), Err(Error::Domain(_))));
        assert!(matches!(BallPair::new(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(BallPair::new(3.0, 2.5), Err(Error::Domain(_))));
        let pair = BallPair::new(3.0, 1.0).unwrap();
        assert!(matches!(pair.f(-0.5), Err(Error::Domain(_))));
        assert!(pair.f(0.0).is_ok());
    }

    #[test]
    fn factorization_matches() {
        for x in interior_grid(1000) {
            assert!((abc1(x) - abc1_factored(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let pair = BallPair::new(2.5, 0.7).unwrap();
        for &z in &[0.4, 0.6, 0.9] {
            let h = 1e-6;
            let d1 = (pair.big_g(z + h).unwrap() - pair.big_g(z - h).unwrap()) / (2.0 * h);
            assert!((d1 - pair.big_g_d1(z).unwrap()).abs() < 1e-6);
            let d2 = pair.big_g_d2(z).unwrap();
            assert!((pair.big_g_d2_fd(z, 1e-4).unwrap() - d2).abs() < 1e-5 * d2.abs().max(1.0));
            assert!(d2 < 0.0);
        }
    }

    #[test]
    fn table_stays_inside_domain() {
        let pair = BallPair::new(2.2, 1.0).unwrap();
        let t = pair.table(50).unwrap();
        assert!(t.z.iter().all(|z| *z > pair.b - 1.0 && *z < 1.0));
        assert!(t.d2g_fd.iter().all(|v| *v < -1e-8));
    }

    #[test]
    fn small_g_grid_has_no_violation() {
        let s = scan_g(40);
        assert_eq!(s.scan.violations, 0);
        assert_eq!(s.unexplained_equalities, 0);
        assert!(s.equality_cells > 0);
    }
}
