//! Random configurations for property checks.

use nalgebra::{Isometry3, Translation3, UnitQuaternion};
use rand::Rng;

use crate::geometry::{Configuration, Line, Point3, Vec3};
use crate::sampling::rotation;

/// `n` non-overlapping unit balls with centers uniform in a cube of side
/// `side`, by rejection.
pub fn random_box_configuration<R: Rng>(n: usize, side: f64, rng: &mut R) -> Configuration {
    let h = side / 2.0;
    let mut centers: Vec<Point3> = Vec::with_capacity(n);
    while centers.len() < n {
        let c = Point3::new(rng.gen_range(-h..h), rng.gen_range(-h..h), rng.gen_range(-h..h));
        if centers.iter().all(|p| (p - c).norm() >= 2.0) {
            centers.push(c);
        } else if rng.gen_bool(0.01) {
            centers.clear();
        }
    }
    Configuration::unit(&centers).expect("rejection keeps balls disjoint")
}

/// `n` non-overlapping unit balls met by a known line in label order.
///
/// Centers are placed around the x-axis with increasing feet and offsets
/// uniform in the unit disk (a crowded foot is nudged forward), then the whole picture is moved by a random
/// rigid motion. Returns the configuration and the moved line.
pub fn random_transversal_instance<R: Rng>(n: usize, max_gap: f64, rng: &mut R) -> (Configuration, Line) {
    let mut centers: Vec<Point3> = Vec::with_capacity(n);
    let mut s = 0.0;
    while centers.len() < n {
        let mut tries = 0;
        loop {
            let (rho, phi) = (rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            let p = Point3::new(s, rho * phi.cos(), rho * phi.sin());
            if centers.iter().all(|q| (q - p).norm() >= 2.0) {
                centers.push(p);
                break;
            }
            tries += 1;
            if tries % 50 == 0 {
                s += 0.1;
            }
        }
        s += rng.gen_range(1e-3..max_gap);
    }
    let rot = rotation(rng);
    let shift = Vec3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    let iso = Isometry3::from_parts(Translation3::from(shift), UnitQuaternion::from_rotation_matrix(&rot));
    let cfg = Configuration::unit(&centers).expect("disjoint by construction").transformed(&iso);
    (cfg, Line::x_axis().transformed(&iso))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::stabbing_order;
    use crate::sampling::stream_rng;

    #[test]
    fn box_configurations_are_disjoint_and_inside() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..50 {
            let cfg = random_box_configuration(6, 12.0, &mut rng);
            assert_eq!(cfg.len(), 6);
            assert!(cfg.centers().iter().all(|c| c.amax() <= 6.0));
        }
    }

    #[test]
    fn transversal_instances_have_label_order() {
        let mut rng = stream_rng(4, 0);
        for _ in 0..200 {
            let (cfg, l) = random_transversal_instance(4, 3.0, &mut rng);
            let order = stabbing_order(&cfg, &l).unwrap();
            assert_eq!(order.to_string(), "ABCD");
        }
    }
}
