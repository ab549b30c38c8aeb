//! Deterministic simulation and analysis of clock-synchronization conventions.
//!
//! The crate keeps two views of every timestamped occurrence: the simulator's
//! coordinate time, and what each imperfect local clock displayed. Everything
//! that depends on a single clock (round-trip time, delay variation) is an
//! observable; everything that subtracts readings of two distant clocks
//! (one-way delay, cross-node ordering of spacelike events) depends on the
//! synchronization convention in force.
//!
//! Modules:
//!
//! * [`spacetime`]: 1+1-dimensional Lorentz boosts and interval classes.
//! * [`conventions`]: Reichenbach ε, anisotropy κ, modified Lorentz factor,
//!   weak-field clock-rate corrections.
//! * [`clocknet`]: the discrete-event network simulator.
//! * [`scenario`]: the scenario file format.
//! * [`syncproto`]: four-timestamp offset/delay estimation.
//! * [`causal`]: Lamport and vector clocks, happens-before, ordering audit.
//! * [`civiltime`]: TAI/UTC/UT1, leap seconds, leap smear, DST.
//! * [`metrics`]: one-way delay, delay variation, RTT, receive-before-send
//!   detection.
//! * [`chsh`]: the CHSH expression, local bound and singlet optimum.

pub mod causal;
pub mod chsh;
pub mod civiltime;
pub mod clocknet;
pub mod conventions;
mod error;
pub mod exact;
pub mod metrics;
pub mod scenario;
pub mod spacetime;
pub mod syncproto;

pub use error::{Error, ErrorKind, Result};
