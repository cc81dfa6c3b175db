//! Quantum correlations of bipartite states under local channels.
//!
//! - [`state`]: density matrices, bipartite structure, partial traces, random states.
//! - [`entropy`]: von Neumann entropy, relative entropy, mutual information (bits).
//! - [`channel`]: Kraus channels, Choi/superoperator forms, local pairs, a zoo of
//!   named channels and a commutativity probe.
//! - [`recovery`]: Petz recovery map and the relative-entropy sufficiency check.
//! - [`discord`]: classical correlation by measurement optimization, discord,
//!   classical-quantum states.
//! - [`harness`]: before/after invariance experiments and the randomized suite.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod channel;
pub mod discord;
pub mod entropy;
mod error;
pub mod harness;
pub mod linalg;
pub mod optimize;
pub mod recovery;
pub mod state;

pub use channel::{apply_local, KrausChannel, LocalChannelPair};
pub use discord::{classical_correlation, quantum_discord, MeasurementSetting, OptimizerConfig};
pub use entropy::{mutual_information, relative_entropy, von_neumann_entropy, EntropyValue};
pub use error::{Error, Result, Violations};
pub use linalg::{CMatrix, CVector};
pub use recovery::{check_sufficiency, petz_map};
pub use state::{BipartiteState, DensityMatrix, PureState, Subsystem};
