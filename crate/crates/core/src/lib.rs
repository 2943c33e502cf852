//! Homological filling volumes and filling functions on finite balls of group complexes.

pub mod chains;
pub mod complex;
pub mod embedding;
pub mod exact;
pub mod filling;
pub mod presentation;
