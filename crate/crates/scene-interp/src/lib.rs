//! Scene interpretation for classified bounding boxes.
//!
//! Given detections (boxes with classifications), a domain model
//! (classification hierarchy plus classification-to-interpretation
//! facts) and a rule pack, the library:
//!
//! 1. expands detections into basic scenes ([`scene`]),
//! 2. grows a scene graph by applying composition rules to a fixpoint
//!    ([`engine`]), using qualitative spatial relations ([`geometry`]),
//! 3. enumerates every complete reading of the picture as an exact
//!    cover of the detected regions ([`cover`], [`pipeline`]),
//! 4. ranks readings by how much structure they explain, marks the ones
//!    that are not just expansions of another, and renders them as text,
//!    a structured report, or an SVG overlay ([`report`], [`render`]).
//!
//! The `examples/` directory walks through each capability; the
//! `scene-interp` binary exposes the same pipeline as `interpret`,
//! `check`, and `render` subcommands.

pub mod cli;
pub mod cover;
pub mod domain;
mod facts;
pub use facts::FactError;
pub mod engine;
pub mod geometry;
pub mod pipeline;
pub mod render;
pub mod report;
pub mod rules;
pub mod scene;
