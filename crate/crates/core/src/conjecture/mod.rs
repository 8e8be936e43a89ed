//! Counter-example search for the two open ABCD/ACDB conjectures and the
//! polynomial system of the hyperboloidal formulation.

pub mod convert;
pub mod pinning_system;
pub mod poly;
pub mod search;
pub mod tangency;

pub use pinning_system::{build_pinning_system, cross_validate, merit_pinning, PinningSearchState};
pub use poly::{emit_system, parse_system, Format, Polynomial, PolynomialSystem};
pub use search::{search_pinning, search_tangency, SearchOptions, SearchReport};
pub use tangency::{merit_tangency, TangencySearchState};
