//! Critical determinants and critical loci of planar convex symmetric
//! domains and of the cylinders built over them, together with Dirichlet
//! constants of planar pairs computed both from best approximations and from
//! the diagonal flow on the space of lattices.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod critical2d;
pub mod cylinder;
pub mod dirichlet;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod norm2;
mod parse;

pub use error::{Error, Result};
pub use lattice::{EnumOptions, Lattice, Lattice2, Lattice3, LatticePoint};
pub use norm2::{ConvexDomain2, CylinderGauge, Gauge};
