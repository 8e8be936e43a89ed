//! Moving candidates between the tangency and the hyperboloidal
//! formulations, and re-validating them with the transversal solver.

use nalgebra::{Matrix3, Matrix4x2, Vector4};
use serde::Serialize;

use crate::conjecture::pinning_system::PinningSearchState;
use crate::conjecture::tangency::TangencySearchState;
use crate::error::{Error, Result};
use crate::geometry::{Configuration, Line, OrderedOrder, Point3, Vec3};
use crate::optim::golden_section;
use crate::pinning::hyperboloidal::{make_hyperboloidal, HyperboloidalParams};
use crate::pinning::screens::{classify_minimal_pinning, PinningClass};
use crate::pinning::shrink::two_stage_shrink;
use crate::sampling::perp_basis;
use crate::transversal::certify;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangencyValidation {
    pub non_overlapping: bool,
    pub abcd: bool,
    pub acdb: bool,
}

impl TangencyValidation {
    pub fn passed(&self) -> bool {
        self.non_overlapping && self.abcd && self.acdb
    }
}

/// Certifies the two orders of a tangency state near its stored lines.
pub fn revalidate_tangency(s: &TangencySearchState) -> Result<TangencyValidation> {
    let cfg = match s.configuration() {
        Ok(c) => c,
        Err(Error::Overlap(..)) => return Ok(TangencyValidation { non_overlapping: false, abcd: false, acdb: false }),
        Err(e) => return Err(e),
    };
    let (l1, l2) = s.lines().ok_or(Error::ZeroDirection)?;
    let check = |name: &str, l: &Line| -> Result<bool> {
        Ok(certify(&cfg, &OrderedOrder::parse(name)?, &l.direction(), 2000)?.is_some())
    };
    Ok(TangencyValidation { non_overlapping: true, abcd: check("ABCD", &l1)?, acdb: check("ACDB", &l2)? })
}

/// Center coordinates in a frame where `l` is the x-axis.
fn line_frame(cfg: &Configuration, l: &Line) -> Vec<Point3> {
    let d = l.direction();
    let (e2, e3) = perp_basis(&d);
    cfg.centers()
        .iter()
        .map(|c| {
            let r = c - l.anchor();
            Point3::new(r.dot(&d), r.dot(&e2), r.dot(&e3))
        })
        .collect()
}

/// For a rotation `psi` about the line, the least-squares `(x0, h)` of
/// `(x - x0) cos(α - ψ) = h sin(α - ψ)` and its residual norm.
fn fit(pts: &[Point3], psi: f64) -> (f64, f64, f64) {
    let mut a = Matrix4x2::zeros();
    let mut b = Vector4::zeros();
    for (k, p) in pts.iter().enumerate() {
        let alpha = p.z.atan2(p.y) - psi;
        let (s, c) = alpha.sin_cos();
        a[(k, 0)] = c;
        a[(k, 1)] = s;
        b[k] = p.x * c;
    }
    let Some(sol) = a.svd(true, true).solve(&b, 1e-14).ok() else {
        return (0.0, 0.0, f64::INFINITY);
    };
    ((a * sol - b).norm(), sol[0], sol[1])
}

/// Recovers `(h, t)` for a configuration of four unit balls tangent to `l`
/// whose centers lie on a quadric `xy = hz` around `l`. Also returns the
/// fit residual.
pub fn recover_hyperboloidal(cfg: &Configuration, l: &Line) -> Result<(HyperboloidalParams, f64)> {
    if cfg.len() != 4 {
        return Err(Error::InputInvalid("expected four balls".into()));
    }
    let pts = line_frame(cfg, l);
    if pts.iter().any(|p| ((p.y * p.y + p.z * p.z).sqrt() - 1.0).abs() > 1e-6) {
        return Err(Error::InputInvalid("balls are not unit balls tangent to the line".into()));
    }
    let n = 3600;
    let step = std::f64::consts::TAU / n as f64;
    let best =
        (0..n).map(|k| k as f64 * step).min_by(|a, b| fit(&pts, *a).0.total_cmp(&fit(&pts, *b).0)).expect("grid");
    let (psi, _) = golden_section(|p| fit(&pts, p).0, best - step, best + step, 1e-13);
    let (res, x0, h) = fit(&pts, psi);
    if h.abs() < 1e-12 {
        return Err(Error::DegenerateParameter("fitted h = 0".into()));
    }
    let mut t = [0.0; 4];
    for (k, p) in pts.iter().enumerate() {
        t[k] = ((p.z.atan2(p.y) - psi) / 2.0).tan();
    }
    let params = HyperboloidalParams::new(h, t)?;
    let inst = make_hyperboloidal(&params)?;
    let fitted = (0..4).map(|k| (inst.centers[k].x - (pts[k].x - x0)).abs()).fold(res, f64::max);
    Ok((params, fitted))
}

/// Two-stage shrinks a tangency candidate to a doubly pinned configuration
/// and, when both pinnings are hyperboloidal, reads off a pinning state.
pub fn tangency_to_pinning(s: &TangencySearchState) -> Result<Option<PinningSearchState>> {
    let cfg = s.configuration()?;
    let two = two_stage_shrink(&cfg, &OrderedOrder::parse("ABCD")?, &OrderedOrder::parse("ACDB")?)?;
    for l in [&two.line1, &two.line2] {
        if classify_minimal_pinning(&two.configuration, l)?.class != PinningClass::Hyperboloidal {
            return Ok(None);
        }
    }
    let (p1, _) = recover_hyperboloidal(&two.configuration, &two.line1)?;
    let (p2, _) = recover_hyperboloidal(&two.configuration, &two.line2)?;
    Ok(Some(PinningSearchState { h: p1.h, t: p1.t, hp: p2.h, tp: p2.t, u: 1.0 / (p1.h * p2.h) }))
}

/// Orthogonal map (possibly a reflection) carrying `from` onto `to` in the
/// least-squares sense.
fn procrustes(from: &[Point3; 4], to: &[Point3; 4]) -> (Matrix3<f64>, Vec3) {
    let cf = from.iter().sum::<Vec3>() / 4.0;
    let ct = to.iter().sum::<Vec3>() / 4.0;
    let mut m = Matrix3::zeros();
    for k in 0..4 {
        m += (to[k] - ct) * (from[k] - cf).transpose();
    }
    let svd = m.svd(true, true);
    let r = svd.u.expect("requested") * svd.v_t.expect("requested");
    (r, ct - r * cf)
}

/// Maps the second configuration onto the first and expresses both tangent
/// lines in the normalized tangency frame.
pub fn pinning_to_tangency(s: &PinningSearchState) -> Result<TangencySearchState> {
    s.validate()?;
    let i1 = make_hyperboloidal(&s.first())?;
    let i2 = make_hyperboloidal(&s.second())?;
    let (r, shift) = procrustes(&i2.centers, &i1.centers);
    let l2 = Line::new(r * i2.line.anchor() + shift, r * i2.line.direction())?;
    TangencySearchState::from_geometry(&i1.centers, &i1.line, &l2)
        .ok_or_else(|| Error::DegenerateParameter("centers a, b, c are collinear".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjecture::tangency::merit_tangency;
    use crate::sampling::{rotation, stream_rng};
    use nalgebra::{Isometry3, Translation3, UnitQuaternion};

    const ALTERNATING: [f64; 4] = [-0.8, 1.5, 0.3, -1.5];

    #[test]
    fn recovers_parameters_after_rigid_motion() {
        let p = HyperboloidalParams::new(1.0, ALTERNATING).unwrap();
        let inst = make_hyperboloidal(&p).unwrap();
        let mut rng = stream_rng(8, 0);
        let iso = Isometry3::from_parts(
            Translation3::new(0.3, -1.0, 2.0),
            UnitQuaternion::from_rotation_matrix(&rotation(&mut rng)),
        );
        let cfg = inst.configuration().unwrap().transformed(&iso);
        let l = inst.line.transformed(&iso);
        let (q, res) = recover_hyperboloidal(&cfg, &l).unwrap();
        assert!(res < 1e-8, "{res}");
        let back = make_hyperboloidal(&q).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let a = (back.centers[i] - back.centers[j]).norm();
                let b = (inst.centers[i] - inst.centers[j]).norm();
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn mirrored_pinning_state_maps_to_single_order_tangency() {
        let s = PinningSearchState { h: 1.0, t: ALTERNATING, hp: 1.0, tp: ALTERNATING, u: 1.0 };
        let ts = pinning_to_tangency(&s).unwrap();
        let (l1, l2) = ts.lines().unwrap();
        assert!(l1.separation(&l2) < 1e-9);
        let c = ts.centers();
        assert!(c.iter().all(|x| (l1.distance_to(x) - 1.0).abs() < 1e-9));
        assert!(merit_tangency(&ts) > 0.0);
        let v = revalidate_tangency(&ts).unwrap();
        assert!(v.non_overlapping && !v.passed());
    }

    #[test]
    fn synthetic_single_order_pinning_has_no_second_order() {
        let inst = make_hyperboloidal(&HyperboloidalParams::new(1.0, ALTERNATING).unwrap()).unwrap();
        let s = TangencySearchState::from_geometry(&inst.centers, &inst.line, &inst.line).unwrap();
        assert!(matches!(tangency_to_pinning(&s), Err(Error::Infeasible(_))));
    }
}
