//! Exact counting and construction of favourite-distance digraphs and Lenz
//! configurations in dimension four and up.

pub mod closed_forms;
pub mod constructions;
pub mod digraph;
pub mod embed;
pub mod error;
pub mod geometry;
pub mod io;
pub mod metric;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
