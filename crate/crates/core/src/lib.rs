//! Spectral criticality constants and Monte Carlo engines for random
//! environments on coloured b-ary trees.
//!
//! Every vertex of a b-ary tree carries one of `b` colours and its children
//! carry each colour exactly once. The edge from a parent of colour `i` to a
//! child of colour `j` is labelled with an independent copy of a positive
//! random variable `ξ_ij`, and the path product `ζ[v]` multiplies the labels
//! along the root-to-`v` path. Whether `Y = Σ ζ[v]` and the exceedance count
//! `Z(x) = #{v : ζ[v] > x}` are finite is governed by the Perron root `ρ(s)`
//! of the moment matrix `m(s) = (E ξ_ij^s)`:
//!
//! * `λ₁ = inf_{s∈[0,1]} ρ(s)` decides `Y` ([`classifier`]),
//! * `λ = inf_{s≥0} ρ(s)` decides `Z(x)`.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and thread-level parallelism live in the `colortree` crate.
//!
//! Colours and child positions are 0-based throughout this crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod brw;
pub mod classifier;
pub mod dist;
pub mod env;
mod error;
pub mod linalg;
mod math;
pub mod optimize;
pub mod perron;
pub mod quad;
pub mod rde;
pub mod rng;
pub mod rwre;
pub mod spectral;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
