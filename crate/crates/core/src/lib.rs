//! Elliptic ovoids of Q(4,q) inside Q^-(5,q) over GF(2^n), the canonical
//! 2-fold covering of the ovoid geometry by the affine quadrangle, and
//! exhaustive clique censuses of the tangency graph.

pub mod bitset;
pub mod cli;
pub mod cliquecensus;
pub mod covering;
pub mod error;
pub mod figures;
pub mod gf2n;
pub mod ovoid;
pub mod projgeom;
pub mod quadric;
pub mod report;
pub mod subf2;

pub use error::{Error, Result};
pub use gf2n::{FieldCtx, FieldElement};
pub use projgeom::{ProjectivePoint, Subspace, Vec6};
pub use quadric::QuadricModel;
