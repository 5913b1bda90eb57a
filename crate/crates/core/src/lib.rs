//! Mesh adaptive direct search for blackbox problems over mixed categorical,
//! integer and continuous variables.
//!
//! The main entry point is [`solver::solve`]. Problems are described by a
//! [`domain::Domain`] and a [`blackbox::Blackbox`]; [`bench`] runs
//! multi-seed campaigns and builds data profiles.

pub mod barrier;
pub mod bench;
pub mod blackbox;
pub mod catdistance;
pub mod domain;
pub mod error;
pub mod mesh;
pub mod poll;
pub mod rng;
pub mod search;
pub mod solver;
pub mod trace;

pub use error::{Error, Result};
