//! Average secure block error rate of the central user in a two-user
//! downlink where each receiver has a fluid antenna behind its own RIS,
//! under transceiver hardware impairments.
//!
//! The crate offers two independent routes to the same quantity:
//!
//! * [`analytic`]: piecewise-linear BLER surrogates integrated against
//!   CLT-based gain distributions with fixed-order Gauss-Chebyshev rules;
//! * [`montecarlo`]: direct simulation of the correlated port gains with the
//!   exact normal-approximation BLER expressions.

pub mod analytic;
pub mod bler;
pub mod channel;
mod error;
pub mod montecarlo;
pub mod numerics;
pub mod params;

pub use error::{Error, Result};
pub use params::{SinrMap, SystemParams, User};
