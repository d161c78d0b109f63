//! Planar emulators for region contact graphs and string graphs.
//!
//! The pipeline turns a string scene (or a region instance on a plane graph)
//! into a partition of the base graph into low-diameter clusters, contracts
//! the clusters, and hangs one pendant node per region off the result.

pub mod arrangement;
pub mod clustering;
pub mod docs;
pub mod emulator;
pub mod generate;
pub mod geom;
pub mod pipeline;
pub mod plane_graph;
pub mod regions;
pub mod rng;
pub mod search;
pub mod verify;
