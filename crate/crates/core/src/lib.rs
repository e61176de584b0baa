//! Layered lattice coding for the three-user Gaussian interference channel:
//! Construction-A lattices and codebooks, the channel model, closed-form
//! achievable rates, and a Monte Carlo simulator.

pub mod channel;
pub mod error;
pub mod lattice;
pub mod rates;
pub mod rng;
pub mod sim;

pub use channel::{ChannelMatrix3, Noise, Witness};
pub use error::{Error, Result};
pub use lattice::{Codebook, Lattice, LinearCode};
pub use rates::{LayeredAllocation, RateReport, Scheme};
