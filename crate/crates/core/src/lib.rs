//! Principal configurations of surfaces immersed in Minkowski 3-space ℝ^{2,1}.
//!
//! The crate is `no_std` (it needs `alloc`). It covers the metric algebra of
//! ℝ^{2,1}, forward Taylor jets for chart derivatives, fundamental forms,
//! the binary differential equation of curvature lines (directions, leaves,
//! tropic and lightlike principal locus), umbilic location and Darbouxian
//! classification, the confocal quadric systems, canonical forms of
//! ellipsoids under SO(2,1), inversions and focal sheets.
//!
//! Angles are in radians throughout.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bde;
pub mod chart;
pub mod error;
pub mod focal;
pub mod jet;
mod math;
pub mod minkowski;
pub mod quadrics;
pub mod sampling;
pub mod surface;
pub mod transforms;
pub mod umbilic;

pub use chart::{eval_jet, finite_difference_jet, ChartKind, ChartSpec, Domain, SurfaceJet2};
pub use error::{Error, Result};
pub use minkowski::{CausalCharacter, Isometry21, Mat3, Vec3M};
