//! Master equations for open quantum systems whose subsystems are ultrastrongly coupled.
//!
//! The crate builds the standard bare-basis Lindblad dissipator, the secular dressed
//! dissipator and the generalized dressed master equation (with optional frequency
//! filter and zero-frequency dephasing), and propagates density matrices under them.

pub mod analysis;
pub mod config;
pub mod baths;
pub mod dissipators;
pub mod dressed;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod models;
pub mod runner;
pub mod scenario;
pub mod superop;

pub use error::{Error, Result};
