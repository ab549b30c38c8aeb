//! Logical clocks, happens-before, and the ordering audit.
//!
//! Happens-before is built from program order and message delivery only; it
//! never looks at clock readings. The audit then asks how the timestamp order
//! of each cross-node pair behaves as the synchronization convention or the
//! observer's frame changes: causally connectable pairs must never move,
//! spacelike pairs may.

mod audit;
mod graph;
mod logical;

pub use audit::{fito_audit, AuditPair, FitoAuditReport};
pub use graph::{happens_before, HappensBeforeGraph};
pub use logical::{
    assign_lamport, assign_vector, lamport_converse_counterexample, lamport_step, vector_step,
    CausalOrder, LamportClock, VectorClock,
};
