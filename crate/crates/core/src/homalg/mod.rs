//! Modules, Hom, tensor products, Ext, towers and character duality.

pub mod dual;
pub mod enumerate;
pub mod fp;
pub mod functors;
pub mod group;
pub mod module;
pub mod oracle;
pub mod tower;

pub use group::{GroupType, Subquotient};
pub use module::{Matrix, Module, ModuleMap, Side};
