//! Ascending auctions, demand structure and equilibrium oracles for
//! indivisible-item markets with integer valuations.

pub mod auctions;
pub mod demand;
pub mod demos;
pub mod error;
pub mod generate;
pub mod json;
pub mod ggs2;
pub mod model;
pub mod oracle;
pub mod structure;

pub use error::{Error, Result};
