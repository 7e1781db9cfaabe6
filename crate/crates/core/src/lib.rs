//! Outage probability of two-user NOMA and OMA links served by terrestrial
//! or UAV base stations.
//!
//! Closed forms and series live in [`outage`], their special functions in
//! [`specfun`], and [`mc`] estimates the same quantities by simulation.
//! [`scenario`] maps physical parameters onto normalized links, [`placement`]
//! averages over random user positions and [`sweep`] drives parameter sweeps
//! from JSON configuration.

pub mod channel;
pub mod error;
pub mod fading;
pub mod mc;
pub mod outage;
pub mod placement;
pub mod quad;
pub mod scenario;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
