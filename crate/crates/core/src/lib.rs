//! Crossing-restricted insertion of new edges into connected simple drawings.
//!
//! A drawing is given combinatorially, as the plane combinatorial map of its
//! planarization. The crate decides whether a set of new edges can be drawn
//! into it within per-edge or total crossing budgets, under four problem
//! variants, and constructs a witness extension when one exists.
//!
//! The multi-edge engine works on a labeled combinatorialization of the
//! drawing (the patchwork graph) after carving out regions no new edge can
//! reach; the single-edge engine reduces to a colorful short-path search with
//! representative families. Both are cross-checked by independent brute-force
//! oracles. The `book/` directory of the repository walks through the
//! concepts chapter by chapter.

pub mod colorset;
pub mod corpus;
pub mod crossable;
pub mod drawing;
pub mod dual;
pub mod export;
pub mod geom;
pub mod ingest;
pub mod instance;
pub mod map;
pub mod patchwork;
pub mod report;
pub mod single_edge;
pub mod solver;
pub mod stitches;

#[doc(hidden)]
pub mod testgraphs;

pub use drawing::{Drawing, DrawingReport, RawDrawing};
pub use instance::{InsertionInstance, Variant};
pub use map::{CombinatorialMap, Dart, EdgeId, FaceId, SegId, VertexId, VertexRole};
pub use solver::{solve, Verdict};
