//! Angle-of-arrival estimation for a single-antenna transmitter observed by a
//! uniform linear array over Rician flat fading, in the presence of a
//! multi-antenna jammer.
//!
//! * [`array`]: steering vectors, derivatives and projectors for a ULA.
//! * [`channel`]: Rician channel draws and their second-order statistics.
//! * [`jammer`]: water-filling and the signal-unaware / signal-aware jammers.
//! * [`estimation`]: interference covariance, CRB and the ML estimator.
//! * [`sim`]: seeded Monte Carlo scenarios.
//! * [`io`]: TOML scenario files and CSV tables.

pub mod array;
pub mod channel;
pub mod error;
pub mod estimation;
pub mod io;
pub mod jammer;
pub mod linalg;
pub mod par;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
