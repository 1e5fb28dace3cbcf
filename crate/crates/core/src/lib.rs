//! Coherence of purification and related quantumness measures for
//! finite-dimensional quantum states.
//!
//! The crate is organised bottom-up:
//!
//! * [`state`], [`entropy`], [`channel`], [`random`], [`io`]: state and
//!   operator algebra, entropies and distances, Kraus channels, seeded sampling
//!   and the JSON state-file format.
//! * [`optim`]: multi-start simplex minimisation over the unitary group.
//! * [`coherence`]: relative entropy of coherence, coherence of formation and
//!   the incoherent channel families.
//! * [`purification`]: purifications, the coherence of purification in its
//!   fixed-basis and adapted readings, and residual quantumness.
//! * [`entanglement`]: entanglement entropy, concurrence, entanglement of
//!   purification and the coherence/entanglement-of-purification link.
//! * [`aosd`]: assisted optimal state discrimination.
//! * [`verify`]: the randomized inequality-checking harness.
//!
//! All logarithms are base 2.

pub mod aosd;
pub mod channel;
pub mod coherence;
pub mod entanglement;
pub mod entropy;
pub mod error;
pub mod io;
pub mod linalg;
pub mod optim;
pub mod purification;
pub mod random;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use state::{DensityOperator, PureState};
