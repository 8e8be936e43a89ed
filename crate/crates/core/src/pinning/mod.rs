//! Shrinking to pinned transversals, pinning certificates, and the screen
//! and ridge analysis of pinnings by four balls.

pub mod chart;
pub mod detect;
pub mod hyperboloidal;
pub mod polish;
pub mod screens;
pub mod shrink;

pub use chart::{LineChart, LineCoords4};
pub use detect::{
    is_pinned, is_pinned_nested, is_pinned_with, triple_pinning_predicate, PinningCertificate, ScanOptions,
};
pub use hyperboloidal::{make_hyperboloidal, HyperboloidalInstance, HyperboloidalParams};
pub use screens::{classify_minimal_pinning, ridge, screen_normal, screens, Classification, PinningClass, Screen};
