//! Castle partitions of subshifts of finite type and perturbations of linear
//! cocycles that destroy quasiconformal orbits.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod castles;
pub mod cocycle;
pub mod error;
pub mod io;
pub mod matperturb;
pub mod shiftspace;

pub use error::{Error, Result};
