//! Constructive certification of genuine multipartite entanglement (GME) and
//! multipartite full nonlocality for qubit stabilizer subspaces.
//!
//! The pipeline is: parse generators ([`pauli`]), validate the group and
//! decide GME from per-party commutation matrices ([`stabilizer`]), search a
//! two-site anticommutation witness for every pair of parties and turn it
//! into a local measurement protocol ([`witness`]), then execute each
//! protocol on every outcome branch with a tableau engine and a dense oracle
//! ([`sim`]). [`nonlocality`] bounds the genuine nonlocality content from
//! pairwise chained Bell tests and [`qudit_graph`] covers qudit graph states.

pub mod cli;
pub mod error;
pub mod gf2;
pub mod io;
pub mod nonlocality;
pub mod pauli;
pub mod qudit_graph;
pub mod sim;
pub mod stabilizer;
pub mod witness;

#[cfg(test)]
pub(crate) mod testkit;

pub use error::{Error, Result};
pub use pauli::{Letter, PauliOperator, SiteLabel, SitePauli};
pub use stabilizer::{CommutationMatrixSet, StabilizerGroup};
