//! Rate regions, outer bounds, asymptotic gaps and relay schedules for
//! half-duplex bi-directional relaying over `m` relays in Gaussian noise.
//!
//! Two terminals `a` and `b` exchange messages through relays `1..=m`. Three
//! temporal protocols are covered, each in decode-and-forward (DF) and
//! amplify-and-forward (AF) form:
//!
//! * MABC: both terminals transmit at once, then the relays broadcast (2 phases).
//! * TDBC: `a`, then `b`, then the relays (3 phases).
//! * MHMR: a pipelined chain through the relays (`m + 2` phases, or fewer
//!   when relays are grouped into hops).
//!
//! DF regions are unions over decoding configurations of polytopes in
//! `(R_a, R_b, Δ)`, where `Δ` is the vector of phase durations; they are
//! traced by solving weighted linear programs (see [`optimizer`]).

pub mod af;
pub mod asymptotics;
pub mod channel;
pub mod df;
pub mod error;
pub mod experiment;
pub mod optimizer;
pub mod outer;
pub mod protocol;
pub mod schedule;

pub use channel::{capacity, GainMatrix, Geometry, NodeId};
pub use error::{Error, Result};
pub use optimizer::{PhaseSchedule, RateConstraintSet, RatePair, RegionBoundary};
pub use protocol::{EvalOptions, Protocol};
