//! Discrete-time quantum walks on the line whose coin is a Wigner rotation matrix of spin `j`.
//!
//! The crate simulates the walk exactly, builds the eigenbases of the reduced coin, evaluates
//! the weak-limit density and the trapping profile in closed form, and cross-checks the two.

pub mod bases;
pub mod cli;
pub mod coin;
pub mod error;
pub mod evolution;
pub mod halfint;
pub mod limitlaw;
pub mod numfmt;
pub mod states;
pub mod trapping;
pub mod verify;

pub use bases::{lambda_basis, suitable_basis, BasisKind, BasisSet};
pub use coin::{wigner_coin, wigner_coin_euler, CoinOperator, CoinParams};
pub use error::{Result, WalkError};
pub use evolution::{evolve, position_distribution, BasisTag, CoinStateVector, ProbabilityProfile, WalkState};
pub use halfint::HalfInt;
pub use limitlaw::{limit_density, LimitDensityModel};
pub use states::named_state;
pub use trapping::{trapping_probability, TrappingModel};
pub use verify::VerificationReport;
