//! Numerical tolerances shared by every module.
//!
//! Lengths are in ball-radius units. Keep new thresholds here rather than
//! inline so that predicates stay consistent across modules.

/// Geometric predicates: tangency, non-overlap, order ties, transversality.
pub const GEOM: f64 = 1e-9;

/// Convergence target for local optimizers.
pub const OPT: f64 = 1e-10;

/// Unit-length check for direction vectors.
pub const UNIT: f64 = 1e-12;

/// Interval width at which shrink bisection stops.
pub const BISECTION_WIDTH: f64 = 1e-10;

/// Relative singular-value threshold for rank decisions.
pub const RANK_REL: f64 = 1e-8;

/// Nested perturbation radii used to certify pinning.
pub const PIN_SCAN_RADII: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Perturbation samples per scan shell.
pub const PIN_SCAN_SAMPLES: usize = 10_000;

/// Minimal distance of a hyperboloidal parameter from the poles `t = ±1`.
pub const POLE: f64 = 1e-9;
