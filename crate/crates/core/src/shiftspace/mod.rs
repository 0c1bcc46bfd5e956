//! Subshifts of finite type, their clopen subsets, points and periodic orbits.
//!
//! The shift acts by `(Tx)_i = x_{i+1}`, so `T^n [w]_a = [w]_{a-n}`.

mod clopen;
pub(crate) mod dd;
mod orbits;
mod point;
mod sft;
mod subsft;

pub use clopen::{ClopenSet, Diagram};
pub use orbits::{periodic_orbits, PeriodicOrbit};
pub use point::EventuallyPeriodicPoint;
pub use sft::{Provenance, Sft, Sym};
pub(crate) use subsft::{invariant_language, InvariantLanguage};
pub use subsft::{maximal_invariant, maximal_invariant_with_limit, SubSft, DEFAULT_BLOCK_LIMIT};
