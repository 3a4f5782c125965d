//! Uniform random generation of labelled simple planar graphs.
//!
//! The pipeline assembles Boltzmann samplers along the connectivity
//! decomposition of planar graphs: bicolored binary trees are closed into
//! irreducible dissections of the hexagon, which yield rooted 3-connected
//! maps; Trakhtenbrot's network decomposition lifts those to edge-rooted
//! 2-connected graphs; the block decomposition lifts further to connected
//! and general planar graphs. A numeric oracle evaluates every generating
//! function the samplers consult and tunes the Boltzmann parameters to a
//! target size `n` (and optionally a target edge/vertex ratio `mu`).

pub mod boltzmann;
pub mod census;
pub mod graphs;
pub mod halfedge;
pub mod jet;
pub mod maps3;
pub mod networks;
pub mod oracle;
pub mod real;
pub mod rng;
pub mod trees;

pub use boltzmann::{GenCx, GenError, SizeCounters};
pub use real::{Dd, Real};
pub use rng::RandomSource;
