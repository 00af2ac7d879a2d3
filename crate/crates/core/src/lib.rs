//! Exact mod-2 computations: Steenrod algebra, windowed modules over it,
//! Singer constructions, minimal resolutions and stable EHP bookkeeping.

pub mod f2linalg;
pub mod steenrod;
pub mod error;
pub mod gradmod;
pub mod classical;
pub mod singer;
pub mod extcalc;
pub mod ehp;
pub mod verify;

pub use error::{Error, Result};
