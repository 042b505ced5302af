//! Balanced Steinhaus triangles over `Z/m`.
//!
//! A Steinhaus triangle is generated from its first row by Pascal's rule;
//! it is balanced when every residue occurs equally often. This crate builds
//! and checks such triangles, tiles the mod-4 family `S1` from its building
//! blocks, counts strongly balanced lifts from `Z/m` to `Z/2m`, and runs
//! exhaustive censuses of balanced first rows.

pub mod blocks;
pub mod census;
pub mod cli;
pub mod golden;
pub mod lift;
pub mod reproduce;
pub mod residue;
pub mod triangle;

pub use residue::{
    catalog_sequence, parse_sequence, project, EventuallyPeriodicSequence, ModSequence, Modulus,
    Sequence,
};
pub use triangle::{
    admissible_length, build_triangle, extend_band, is_balanced, is_strongly_balanced,
    EasternState, MultiplicityVector, SteinhausTriangle,
};
