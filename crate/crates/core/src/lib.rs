//! Partial difference sets of (negative) Latin square type in the abelian
//! 2-groups `Z4^{2k} × Z2^{4ℓ-4k}`.
//!
//! The sets are obtained by lifting the zero sets of quadratic forms over
//! GF(4) through the Galois ring GR(4,2) with the Teichmüller map, and are
//! checked by two independent exact verifiers: difference-multiset counting
//! and a full character spectrum from a mixed-radix transform.

pub mod algebra;
pub mod coverage;
pub mod error;
pub mod forms;
pub mod graph;
pub mod lift;
pub mod params;
pub mod verify;

pub use error::{Error, Result};
pub use params::PdsParams;
