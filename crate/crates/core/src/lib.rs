//! Factor codes with an unambiguous symbol.
//!
//! A code `φ` on a shift of finite type `X` writes `1` exactly where a fixed
//! word `D` occurs and `0` elsewhere. Its image is an S-gap shift. This crate
//! computes the gap set, decides whether `φ` restricts to a one-to-one or
//! finite-to-one map from a sub-SFT onto the image, builds that sub-SFT, and
//! checks the capacity-side necessary conditions. Every construction can be
//! cross-checked with the brute-force routines in [`oracle`].

pub mod capacity;
pub mod conjugacy;
mod error;
pub mod factor;
pub mod gapset;
pub mod gapshift;
pub mod graph;
pub mod oracle;
pub mod returns;
pub mod sft;
pub mod spoke;
pub mod text;

pub use error::{Error, Result};
pub use factor::{MarkedGraph, UnambiguousCode};
pub use gapset::EventuallyPeriodicSet;
pub use gapshift::GapShift;
pub use graph::{LabeledGraph, Symbol, VertexId};
pub use sft::{ForbiddenSft, Word};
pub use spoke::{SpokeGraph, TwoCycleGraph};
