//! Metric graphs, circles in them and piecewise-affine self-maps.

mod circle;
mod local;
mod map;
mod metric;
mod ops;

pub use circle::{enumerate_circles, Circle, Traversal};
pub use local::{classify_sample_point, LocalKind, PointLocalClass};
pub use map::{path_or_point, path_point, subpath, GraphMap, MapBuilder, Piece};
pub use metric::{Edge, EdgeSpec, Germ, GraphPoint, GraphSpec, MetricGraph, Segment, PARAM_EPS, POINT_TOL};
pub use ops::{arc_monotonicity_check, build_retraction, rotation_number, Monotonicity, RotationNumber};
