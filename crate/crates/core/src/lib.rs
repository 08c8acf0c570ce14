//! Equilibrium analysis of the one-shot selfish random-access game on a
//! collision channel.
//!
//! Each of `n` transmitters either transmits (action 1) or backs off
//! (action 0). A lone transmitter earns 1, every transmitter involved in a
//! collision pays its cost `c_i`, and backing off earns 0. The crate
//! computes the game's Nash equilibria, the exact law of the total number
//! of packet arrivals `S_n` at an equilibrium, its Poisson and
//! Poisson-plus-Bernoulli limits, and seeded Monte Carlo estimates of the
//! same quantities.
//!
//! Module map:
//!
//! - [`game`]: cost profiles, action and strategy profiles, utilities.
//! - [`equilibrium`]: pure, support-conditioned mixed, and fully-mixed equilibria.
//! - [`distribution`]: truncated pmfs, Poisson-binomial, Poisson, mixtures, `d_V`.
//! - [`asymptotics`]: limit laws and finite-grid convergence diagnostics.
//! - [`montecarlo`]: reproducible simulation of one-shot play.

pub mod asymptotics;
pub mod distribution;
pub mod equilibrium;
mod error;
pub mod game;
pub mod montecarlo;
pub mod tolerance;

pub use error::{Error, Result};
