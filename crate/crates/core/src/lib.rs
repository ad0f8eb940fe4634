//! Facility-location intersection graphs.
//!
//! A digraph `D` defines the graph `I(D)` whose nodes are the arcs of `D`;
//! two arcs are adjacent when they share a tail, or when the head of one is
//! the tail of the other. This crate builds such graphs, recognizes the
//! triangle-free ones in linear time, searches preimages of small graphs,
//! compiles the 3-SAT hardness gadgets, and solves the related facility
//! location and stable set problems exactly on small instances.

#![allow(clippy::needless_range_loop)]

pub mod cnf;
pub mod coloring;
pub mod error;
pub mod gadgets;
pub mod graph;
pub mod intersect;
pub mod optimize;
pub mod preimage;
pub mod recognize;
pub mod reductions;
pub mod sat;
pub mod small;

pub use error::{FlgError, Result};
pub use graph::{Arc, Digraph, UGraph, Weight};
pub use intersect::ArcCertificate;
