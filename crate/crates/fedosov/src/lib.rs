//! Exact symbolic engine for graded geometry over flat-frame base manifolds.
//!
//! The crate builds the supermanifold whose functions are the differential
//! forms of a parallelizable base with constant structure data (tori being
//! the main family), equips it with an odd symplectic two-superform coming
//! from a bundle isomorphism `H: TM -> T*M`, constructs graded connections
//! from component tensor packs, and computes their graded torsion, curvature,
//! Ricci supermatrix and odd symplectic scalar supercurvature — all over
//! exact rational arithmetic, so every identity is checked with tolerance
//! zero.
//!
//! Entry points:
//! - [`poly`] / [`form`]: exact coefficient arithmetic and the exterior
//!   algebra of constant-coefficient forms,
//! - [`gla`]: supermatrices, supertraces and exact rational kernels,
//! - [`base`]: flat-frame bases, Christoffel data, the torus family,
//! - [`sfields`]: supervector fields, graded brackets and the odd form,
//! - [`sconn`]: graded connections, torsion/Fedosov checks and samplers,
//! - [`curv`]: curvature pipelines, Ricci tables and the scalar invariant,
//! - [`config`]: JSON job configuration shared with the `fedosov` binary.
//!
//! The `examples/` directory has one runnable program per major capability;
//! `cargo run --bin fedosov -- --help` lists the batch commands.

pub mod base;
pub mod config;
pub mod curv;
pub mod error;
pub mod form;
pub mod gla;
pub mod poly;
pub mod sconn;
pub mod sfields;

pub use base::Base;
pub use error::Error;
pub use form::{Form, VForm};
pub use gla::SuperMatrix;
pub use poly::{ParamSet, Poly, Rat};
pub use sconn::{GConn, TensorPack};
pub use sfields::{SVec, SuperTwoForm};

/// Convenience alias used by fallible operations across the crate.
pub type Result<T> = std::result::Result<T, Error>;
