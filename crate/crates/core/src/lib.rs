//! Noisy uniform ball graphs in hyperbolic space.
//!
//! Geometry ([`hypgeo`]), tilings ([`tiling`]), graph construction and
//! partitions ([`nubg`]), balanced clique-weighted separators
//! ([`separator`]), tree decompositions ([`decomp`]), exact solvers
//! ([`solvers`]), lower-bound constructions ([`hardness`]), file formats
//! ([`io`]) and the experiment harness ([`experiment`]).

pub mod decomp;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod hardness;
pub mod hypgeo;
pub mod io;
pub mod nubg;
pub mod separator;
pub mod solvers;
pub mod tiling;

pub use error::{Error, Result};
