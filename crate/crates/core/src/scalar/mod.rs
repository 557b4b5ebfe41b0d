//! Exact scalar fields and angle tables.

mod angles;
mod cyclo;
mod dist;
mod ext;

pub use angles::{chord_sq, cis_twentieth, cos_separation, cos_turns, reduce_turns, Phase};
pub use cyclo::Cyclo20;
pub use dist::{squarefree_split, ExactDist};
pub use ext::ExtScalar;

pub(crate) use ext::{fmt_rational, parse_rational, rat};
