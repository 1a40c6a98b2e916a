//! Local coherence versus dense-coding capacity and teleportation fidelity.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices, a Jacobi Hermitian eigensolver and
//!   the partial operations on bipartite operators.
//! - [`states`]: validated density matrices, named states, entropies.
//! - [`channels`]: Kraus channels, the shift/clock operator families and the
//!   depolarizing channel.
//! - [`measures`]: relative entropy of coherence, concurrence, negativity,
//!   entanglement of formation.
//! - [`protocols`]: dense-coding capacity (noiseless and through unital
//!   noise) and the three-qubit teleportation circuit.
//! - [`verify`]: inequality margins, seeded random states, parameter sweeps.
//! - [`cli`]: the command-line front end.

pub mod channels;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod protocols;
pub mod states;
pub mod verify;

pub use channels::{ChannelPair, KrausChannel};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Spectrum, Subsystem, C64};
pub use states::{DensityMatrix, PureState};
