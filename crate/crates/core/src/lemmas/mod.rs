//! Executable checks of the quantitative lemmas: distance and angle bounds,
//! the incompatibility graph, packing refuters, special functions and the
//! planar interior-transversal construction.

pub mod angle;
pub mod distance;
pub mod functions;
pub mod graph;
pub mod packing;
pub mod planar;
pub mod random;
pub mod triangle;

pub use angle::{check_angle_lemma, AngleCheck};
pub use distance::{
    check_distance_lemma, check_three_ball_contrast, distance_identities, DistanceCheck, DistanceIdentities,
};
pub use functions::{special_functions, AngleFunctionTable, BallPair, SpecialFunctionReport};
pub use graph::{build_incompatibility_graph, IncompatibilityGraph};
pub use packing::{pack_cylinder, pack_two_cylinders, PackingReport};
pub use planar::{interior_transversal_2d, Disk2, Line2};
pub use random::{random_box_configuration, random_transversal_instance};
pub use triangle::{check_triangle_lemmas, TriangleReport};
