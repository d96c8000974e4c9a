//! Exact computations with Gabriel topologies over a closed family of small
//! rings: ideal arithmetic, modules and Ext, rings of quotients, completions,
//! contramodules and the comparison Δ ≅ Λ.

pub mod contra;
pub mod delta;
pub mod error;
pub mod homalg;
pub mod quotients;
pub mod ring;
pub mod sflat;
pub mod topology;
pub mod zlinalg;

pub use error::{Error, Result};
