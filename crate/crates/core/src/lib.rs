//! Damped (dissipative) Grover search.
//!
//! - [`blochmap`]: the reduced 3-vector dynamics and their Kraus cross-check.
//! - [`spectral`]: eigenvalues of the damped map and the critical damping.
//! - [`cost`]: expected oracle calls for fixed and scheduled damping.
//! - [`fullsim`]: dense state-vector simulation with a measured ancilla.
//! - [`lindblad`]: the continuous-time limit.
//! - [`cli`]: the `damped-search` command line and its CSV format.

pub mod blochmap;
mod charpoly;
pub mod cli;
pub mod cost;
mod error;
pub mod fullsim;
pub mod lindblad;
pub mod spectral;

pub use blochmap::{kraus_step, trajectory, BlochState, DampedMap, SearchSpace};
pub use charpoly::CharPoly;
pub use cost::{CostResult, DampingSchedule};
pub use error::{Error, Result};
pub use fullsim::FullState;
pub use spectral::EigenTriple;
