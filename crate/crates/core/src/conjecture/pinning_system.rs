//! Two hyperboloidal configurations with matching pairwise distances, as a
//! polynomial system and as a merit function.

use serde::{Deserialize, Serialize};

use crate::conjecture::poly::{Constraint, Polynomial, PolynomialSystem, Relation};
use crate::error::{Error, Result};
use crate::geometry::{canonicalize, stabbing_order, Configuration, OrderedOrder};
use crate::pinning::hyperboloidal::{center, make_hyperboloidal, HyperboloidalParams};
use crate::tol;

/// Declared variable order of the emitted system.
pub const VARIABLES: [&str; 11] = ["u", "h", "ta", "tb", "tc", "td", "hp", "tap", "tbp", "tcp", "tdp"];

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinningSearchState {
    pub h: f64,
    pub t: [f64; 4],
    pub hp: f64,
    pub tp: [f64; 4],
    pub u: f64,
}

impl PinningSearchState {
    /// Values in [`VARIABLES`] order.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.u, self.h];
        v.extend(self.t);
        v.push(self.hp);
        v.extend(self.tp);
        v
    }

    pub fn from_slice(x: &[f64]) -> Self {
        PinningSearchState { u: x[0], h: x[1], t: [x[2], x[3], x[4], x[5]], hp: x[6], tp: [x[7], x[8], x[9], x[10]] }
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.to_vec();
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        for &t in self.t.iter().chain(&self.tp) {
            if (1.0 - t * t).abs() < tol::POLE {
                return Err(Error::DegenerateParameter(format!("t = {t} is at a pole")));
            }
        }
        Ok(())
    }

    pub fn first(&self) -> HyperboloidalParams {
        HyperboloidalParams { h: self.h, t: self.t }
    }

    pub fn second(&self) -> HyperboloidalParams {
        HyperboloidalParams { h: self.hp, t: self.tp }
    }
}

struct Vars {
    n: usize,
}

impl Vars {
    fn v(&self, name: &str) -> Polynomial {
        Polynomial::var(self.n, VARIABLES.iter().position(|v| *v == name).expect("declared variable"))
    }

    fn c(&self, k: i64) -> Polynomial {
        Polynomial::int(self.n, k)
    }
}

/// `(Q, E)` with `|uv|² = 4Q/E` for centers at parameters `s`, `t` of the
/// same `h`:
/// `Q = h²(s−t)²(1+st)²(1+s²)(1+t²) + (s−t)²(1−s²)²(1−t²)²`,
/// `E = (1−s²)²(1−t²)²(1+s²)(1+t²)`.
fn pair_parts(vs: &Vars, h: &str, s: &str, t: &str) -> (Polynomial, Polynomial) {
    let (h, s, t) = (vs.v(h), vs.v(s), vs.v(t));
    let one = vs.c(1);
    let diff2 = (&s - &t).pow(2);
    let plus = &(&one + &s.pow(2)) * &(&one + &t.pow(2));
    let minus2 = (&(&one - &s.pow(2)) * &(&one - &t.pow(2))).pow(2);
    let q = &(&(&h.pow(2) * &diff2) * &(&one + &(&s * &t)).pow(2)) * &plus + &diff2 * &minus2;
    let e = &minus2 * &plus;
    (q, e)
}

const T: [&str; 4] = ["ta", "tb", "tc", "td"];
const TP: [&str; 4] = ["tap", "tbp", "tcp", "tdp"];

/// Six cleared distance matches `Q E' − Q' E = 0`, the saturation
/// `u h h' − 1 = 0`, orderings `ta < tb < tc < td` and
/// `tap < tcp < tdp < tbp`, and non-overlap `Q − E ≥ 0` on the first
/// configuration.
pub fn build_pinning_system() -> PolynomialSystem {
    let vs = Vars { n: VARIABLES.len() };
    let mut equalities = Vec::new();
    let mut non_overlap = Vec::new();
    for (i, j) in PAIRS {
        let (q, e) = pair_parts(&vs, "h", T[i], T[j]);
        let (qp, ep) = pair_parts(&vs, "hp", TP[i], TP[j]);
        equalities.push(&q * &ep - &qp * &e);
        non_overlap.push(Constraint { poly: &q - &e, relation: Relation::Ge });
    }
    equalities.push(&(&vs.v("u") * &vs.v("h")) * &vs.v("hp") - vs.c(1));
    let mut inequalities = Vec::new();
    for (order, names) in [([0, 1, 2, 3], &T), ([0, 2, 3, 1], &TP)] {
        for w in order.windows(2) {
            inequalities.push(Constraint { poly: vs.v(names[w[1]]) - vs.v(names[w[0]]), relation: Relation::Gt });
        }
    }
    inequalities.extend(non_overlap);
    PolynomialSystem { variables: VARIABLES.iter().map(|s| s.to_string()).collect(), equalities, inequalities }
}

fn e_factor(s: f64, t: f64) -> f64 {
    let (a, b) = ((1.0 - s * s) * (1.0 - t * t), (1.0 + s * s) * (1.0 + t * t));
    a * a * b
}

/// Positive factors turning each system polynomial into its geometric
/// residual, in [`PolynomialSystem::constraints`] order.
pub fn rescale_factors(s: &PinningSearchState) -> Vec<f64> {
    let mut f = Vec::with_capacity(19);
    for (i, j) in PAIRS {
        f.push(4.0 / (e_factor(s.t[i], s.t[j]) * e_factor(s.tp[i], s.tp[j])));
    }
    f.push(1.0);
    f.extend([1.0; 6]);
    for (i, j) in PAIRS {
        f.push(4.0 / e_factor(s.t[i], s.t[j]));
    }
    f
}

fn d2(h: f64, t: &[f64; 4], i: usize, j: usize) -> f64 {
    (center(h, t[i]) - center(h, t[j])).norm_squared()
}

/// Residuals computed from the centers: `|uv|² − |u'v'|²` per pair,
/// `u h h' − 1`, the six ordering differences and `|uv|² − 4` per pair.
pub fn geometric_residuals(s: &PinningSearchState) -> Result<Vec<f64>> {
    s.validate()?;
    let mut r = Vec::with_capacity(19);
    for (i, j) in PAIRS {
        r.push(d2(s.h, &s.t, i, j) - d2(s.hp, &s.tp, i, j));
    }
    r.push(s.u * s.h * s.hp - 1.0);
    for (order, t) in [([0, 1, 2, 3], &s.t), ([0, 2, 3, 1], &s.tp)] {
        for w in order.windows(2) {
            r.push(t[w[1]] - t[w[0]]);
        }
    }
    for (i, j) in PAIRS {
        r.push(d2(s.h, &s.t, i, j) - 4.0);
    }
    Ok(r)
}

/// System polynomials evaluated exactly at `s` and multiplied by
/// [`rescale_factors`].
pub fn symbolic_residuals(sys: &PolynomialSystem, s: &PinningSearchState) -> Result<Vec<f64>> {
    s.validate()?;
    let x = s.to_vec();
    sys.constraints().zip(rescale_factors(s)).map(|(c, k)| Ok(c.poly.eval_exact(&x)? * k)).collect()
}

/// Largest violation: `|·|` of equalities, negative parts of inequalities.
pub fn merit_pinning(s: &PinningSearchState) -> Result<f64> {
    let r = geometric_residuals(s)?;
    let eq = r[..7].iter().map(|v| v.abs());
    let ineq = r[7..].iter().map(|v| (-v).max(0.0));
    Ok(eq.chain(ineq).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidation {
    pub max_distance_gap: f64,
    pub isometric: bool,
    pub non_overlapping: bool,
    pub order1: Option<String>,
    pub order2: Option<String>,
    pub passed: bool,
}

fn gp_along(cfg: &Configuration, l: &crate::geometry::Line) -> Option<String> {
    stabbing_order(cfg, l).ok().map(|o| canonicalize(&o).to_string())
}

/// Builds both configurations and checks that their center tetrahedra are
/// congruent and that the tangent lines realize ABCD and ACDB.
pub fn cross_validate(s: &PinningSearchState) -> Result<CrossValidation> {
    s.validate()?;
    let i1 = make_hyperboloidal(&s.first())?;
    let i2 = make_hyperboloidal(&s.second())?;
    let max_distance_gap = PAIRS
        .iter()
        .map(|&(i, j)| ((i1.centers[i] - i1.centers[j]).norm() - (i2.centers[i] - i2.centers[j]).norm()).abs())
        .fold(0.0, f64::max);
    let isometric = max_distance_gap <= 1e-6;
    let non_overlapping = i1.non_overlapping;
    let (order1, order2) = match (i1.configuration(), Configuration::unit(&i2.centers)) {
        (Ok(c1), Ok(c2)) => (gp_along(&c1, &i1.line), gp_along(&c2, &i2.line)),
        _ => (None, None),
    };
    let want = |o: &Option<String>, w: &str| {
        o.as_deref() == Some(canonicalize(&OrderedOrder::parse(w).expect("literal order")).to_string().as_str())
    };
    let passed = isometric && non_overlapping && want(&order1, "ABCD") && want(&order2, "ACDB");
    Ok(CrossValidation { max_distance_gap, isometric, non_overlapping, order1, order2, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjecture::poly::{emit_system, Format};

    fn state() -> PinningSearchState {
        PinningSearchState { h: 1.3, t: [-2.0, -0.4, 0.3, 2.5], hp: -0.8, tp: [0.5, 3.0, -1.7, -0.2], u: 0.7 }
    }

    fn mirrored() -> PinningSearchState {
        let s = state();
        PinningSearchState { hp: s.h, tp: s.t, u: 1.0 / (s.h * s.h), ..s }
    }

    #[test]
    fn counts() {
        let sys = build_pinning_system();
        assert_eq!(sys.variables.len(), 11);
        assert_eq!(sys.equalities.len(), 7);
        assert_eq!(sys.inequalities.len(), 12);
        assert_eq!(sys.inequalities.iter().filter(|c| c.poly.degree() == 1).count(), 6);
    }

    #[test]
    fn saturation_text() {
        let sys = build_pinning_system();
        let plain = emit_system(&sys, Format::Plain);
        assert!(plain.contains("\nu*h*hp - 1 = 0\n"));
        let smt = emit_system(&sys, Format::Smtlib);
        assert!(smt.contains("; u*h*hp - 1 = 0\n(assert (= (+ (* u h hp) (- 1)) 0))"));
    }

    #[test]
    fn distance_summands_have_degree_four() {
        let vs = Vars { n: 11 };
        let (h, s, t) = (vs.v("h"), vs.v("ta"), vs.v("tb"));
        let one = vs.c(1);
        let num = &(&h.pow(2) * &(&s - &t).pow(2)) * &(&one + &(&s * &t)).pow(2);
        let den = (&(&one - &s.pow(2)) * &(&one - &t.pow(2))).pow(2);
        assert_eq!(num.degree_in(&[2]), 4);
        assert_eq!(den.degree_in(&[2]), 4);
        assert_eq!(num.degree_in(&[3]), 4);
    }

    #[test]
    fn mirrored_state() {
        let sys = build_pinning_system();
        let s = mirrored();
        let r = symbolic_residuals(&sys, &s).unwrap();
        assert!(r[..7].iter().all(|v| v.abs() < 1e-12));
        let m = merit_pinning(&s).unwrap();
        let tp = s.tp;
        let hinge = [tp[2] - tp[0], tp[3] - tp[2], tp[1] - tp[3]].iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
        assert!(m > 0.0);
        assert!((m - hinge).abs() < 1e-12);
    }

    #[test]
    fn symbolic_matches_geometric() {
        let sys = build_pinning_system();
        for s in [state(), mirrored()] {
            let a = symbolic_residuals(&sys, &s).unwrap();
            let b = geometric_residuals(&s).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn merit_is_max_of_parts() {
        // ta, tb close: the first pair overlaps; the rest of the state is a
        // mirror, so distances match and only ACDB ordering competes.
        let t = [-0.3, -0.25, 0.6, 1.8];
        let s = PinningSearchState { h: 1.0, t, hp: 1.0, tp: t, u: 1.0 };
        let r = geometric_residuals(&s).unwrap();
        let overlap = r[13..].iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
        let order = r[7..13].iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
        assert!(overlap > order);
        assert_eq!(merit_pinning(&s).unwrap(), overlap);
    }

    #[test]
    fn degenerate_state() {
        let s = PinningSearchState { t: [1.0, 2.0, 3.0, 4.0], ..state() };
        assert!(matches!(merit_pinning(&s), Err(Error::DegenerateParameter(_))));
    }

    #[test]
    fn cross_validation_of_mirror_fails_on_order() {
        let cv = cross_validate(&mirrored()).unwrap();
        assert!(cv.isometric);
        assert_eq!(cv.order1, cv.order2);
        assert!(!cv.passed);
    }
}
