//! Lenz systems, point representations and exact point sets.

mod point;
mod pointset;
mod system;

pub use point::{CirclePoint, Point, SpherePoint, MAX_DIR_ENTRY};
pub(crate) use pointset::sphere_chord;
pub use pointset::PointSet;
pub(crate) use system::part_axes;
pub use system::LenzSystem;
