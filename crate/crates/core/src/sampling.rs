//! Seeded randomness and direction sampling.
//!
//! Every random stream is a ChaCha generator keyed by `(seed, stream)`, so work
//! split by index reproduces bit-identically regardless of scheduling.

use nalgebra::{Rotation3, UnitQuaternion, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::Vec3;

pub type StreamRng = ChaCha8Rng;

/// Generator for work item `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn unit_vector<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n2 = v.norm_squared();
        if n2 > 1e-6 && n2 <= 1.0 {
            return v / n2.sqrt();
        }
    }
}

pub fn rotation<R: Rng>(rng: &mut R) -> Rotation3<f64> {
    // Uniform on SO(3) via a uniformly random unit quaternion.
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = nalgebra::Quaternion::new(
        a * (tau * u2).sin(),
        a * (tau * u2).cos(),
        b * (tau * u3).sin(),
        b * (tau * u3).cos(),
    );
    UnitQuaternion::from_quaternion(q).to_rotation_matrix()
}

/// Deterministic orthonormal basis `(e1, e2)` of the plane perpendicular to
/// the unit vector `v`.
pub fn perp_basis(v: &Vec3) -> (Vec3, Vec3) {
    let helper = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
        Vec3::x()
    } else if v.y.abs() <= v.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = v.cross(&helper).normalize();
    let e2 = v.cross(&e1);
    (e1, e2)
}

/// Rotation taking the z-axis onto the unit vector `axis`.
pub fn pole_rotation(axis: &Vec3) -> Rotation3<f64> {
    Rotation3::rotation_between(&Vector3::z(), axis).unwrap_or_else(|| {
        // antiparallel
        Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI)
    })
}

/// A Fibonacci lattice of `n` points on the unit sphere, indexed from the
/// north pole downward. Point `i` has height `1 - (2i + 1) / n`.
#[derive(Debug, Clone)]
pub struct FibonacciSphere {
    n: usize,
    frame: Rotation3<f64>,
    phase: f64,
}

impl FibonacciSphere {
    /// Lattice in the standard frame.
    pub fn new(n: usize) -> Self {
        FibonacciSphere { n: n.max(1), frame: Rotation3::identity(), phase: 0.0 }
    }

    /// Lattice with a seeded random frame and azimuthal phase.
    pub fn seeded(n: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, u64::MAX);
        let frame = rotation(&mut rng);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        FibonacciSphere { n: n.max(1), frame, phase }
    }

    /// Lattice whose pole is `axis`, with a seeded phase.
    pub fn with_pole(n: usize, axis: &Vec3, seed: u64) -> Self {
        let mut rng = stream_rng(seed, u64::MAX - 1);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        FibonacciSphere { n: n.max(1), frame: pole_rotation(&axis.normalize()), phase }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> Vec3 {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let z = 1.0 - (2.0 * i as f64 + 1.0) / self.n as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * i as f64 + self.phase;
        self.frame * Vec3::new(r * phi.cos(), r * phi.sin(), z)
    }

    /// Number of leading indices whose points lie within angle `alpha` of
    /// the pole.
    pub fn cap_len(&self, alpha: f64) -> usize {
        if alpha >= std::f64::consts::PI {
            return self.n;
        }
        let k = (self.n as f64 * (1.0 - alpha.cos()) / 2.0).ceil() as usize;
        k.min(self.n)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| 0).scan(stream_rng(7, 3), |r, _| Some(r.next_u64())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(stream_rng(7, 3), |r, _| Some(r.next_u64())).collect();
        let c: Vec<u64> = (0..4).map(|_| 0).scan(stream_rng(7, 4), |r, _| Some(r.next_u64())).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn perp_basis_is_orthonormal() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..100 {
            let v = unit_vector(&mut rng);
            let (e1, e2) = perp_basis(&v);
            for (a, b) in [(e1, v), (e2, v), (e1, e2)] {
                assert!(a.dot(&b).abs() < 1e-12);
            }
            assert!((e1.norm() - 1.0).abs() < 1e-12 && (e2.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fibonacci_points_are_unit_and_cap_is_ordered() {
        let axis = Vec3::new(1.0, 2.0, 2.0) / 3.0;
        let s = FibonacciSphere::with_pole(5000, &axis, 9);
        let alpha = 0.4;
        let k = s.cap_len(alpha);
        for i in 0..s.len() {
            let p = s.point(i);
            assert!((p.norm() - 1.0).abs() < 1e-12);
            let ang = p.dot(&axis).clamp(-1.0, 1.0).acos();
            if ang < alpha - 1e-3 {
                assert!(i < k, "index {i} within cap but beyond {k}");
            }
        }
    }

    #[test]
    fn lattice_covers_the_sphere_evenly() {
        let s = FibonacciSphere::seeded(20000, 3);
        let mean: Vec3 = s.iter().sum::<Vec3>() / s.len() as f64;
        assert!(mean.norm() < 1e-3);
    }
}
