//! Rotated, cyclic-Q-delayed QAM signal-space diversity toolkit.
//!
//! * [`constellation`]: rotated square QAM, Gray labeling, the projection
//!   lattice of the `arctan(1/sqrt(M))` angle and the cyclic Q delay.
//! * [`channel`]: per-cell Rayleigh fading with erasures and AWGN.
//! * [`demap`]: exact, max-log, sphere and MMSE soft demappers.
//! * [`complexity`]: operation counters and the analytic cost model.
//! * [`fec`]: alist parity-check matrices, encoding and min-sum decoding.
//! * [`sim`]: the Monte-Carlo harness behind the `ssd-lab` CLI.

pub mod channel;
pub mod complexity;
pub mod constellation;
pub mod demap;
pub mod error;
pub mod fec;
pub mod sim;

pub use error::{Error, Result};
