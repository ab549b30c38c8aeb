use std::collections::BTreeMap;

use serde::Serialize;

use super::graph::HappensBeforeGraph;
use crate::clocknet::{EventKind, Trace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize)]
pub struct LamportClock(pub u64);

/// Local event: `c + 1`; receive: `max(c, incoming) + 1`.
pub fn lamport_step(own: LamportClock, incoming: Option<LamportClock>) -> LamportClock {
    let base = incoming.map_or(own.0, |m| own.0.max(m.0));
    LamportClock(base + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CausalOrder {
    Before,
    After,
    Equal,
    Concurrent,
}

/// Node id → count. Absent components read as zero.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct VectorClock {
    pub components: BTreeMap<String, u64>,
}

impl VectorClock {
    pub fn new<I, S>(nodes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        VectorClock {
            components: nodes.into_iter().map(|n| (n.into(), 0)).collect(),
        }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        VectorClock {
            components: pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn get(&self, node: &str) -> u64 {
        self.components.get(node).copied().unwrap_or(0)
    }

    pub fn compare(&self, other: &VectorClock) -> CausalOrder {
        let mut le = true;
        let mut ge = true;
        for key in self.components.keys().chain(other.components.keys()) {
            let (a, b) = (self.get(key), other.get(key));
            le &= a <= b;
            ge &= a >= b;
        }
        match (le, ge) {
            (true, true) => CausalOrder::Equal,
            (true, false) => CausalOrder::Before,
            (false, true) => CausalOrder::After,
            (false, false) => CausalOrder::Concurrent,
        }
    }
}

/// Componentwise max with `incoming`, then increment the owner's entry.
pub fn vector_step(
    own: &VectorClock,
    self_id: &str,
    incoming: Option<&VectorClock>,
) -> Result<VectorClock> {
    if !own.components.contains_key(self_id) {
        return Err(Error::validation(format!(
            "vector clock has no component {self_id:?}"
        )));
    }
    let mut next = own.clone();
    if let Some(m) = incoming {
        for (k, v) in &m.components {
            let e = next.components.entry(k.clone()).or_insert(0);
            *e = (*e).max(*v);
        }
    }
    *next.components.get_mut(self_id).expect("checked above") += 1;
    Ok(next)
}

fn process_order(trace: &Trace) -> Result<(HappensBeforeGraph, Vec<usize>)> {
    let graph = super::happens_before(trace)?;
    let order = graph.topological_order().to_vec();
    Ok((graph, order))
}

fn send_index(trace: &Trace) -> BTreeMap<u64, usize> {
    trace
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == EventKind::Send)
        .filter_map(|(i, e)| e.msg_id.map(|m| (m, i)))
        .collect()
}

/// Lamport timestamps for every trace event; messages carry the sender's
/// post-increment value.
pub fn assign_lamport(trace: &Trace) -> Result<Vec<LamportClock>> {
    let (_, order) = process_order(trace)?;
    let sends = send_index(trace);
    let mut per_node: BTreeMap<&str, LamportClock> = BTreeMap::new();
    let mut out = vec![LamportClock::default(); trace.events.len()];
    for i in order {
        let e = &trace.events[i];
        let own = per_node.get(e.node.as_str()).copied().unwrap_or_default();
        let incoming = match (e.kind, e.msg_id) {
            (EventKind::Receive, Some(m)) => Some(out[sends[&m]]),
            _ => None,
        };
        let next = lamport_step(own, incoming);
        per_node.insert(e.node.as_str(), next);
        out[i] = next;
    }
    Ok(out)
}

/// Vector timestamps for every trace event, over the nodes appearing in it.
pub fn assign_vector(trace: &Trace) -> Result<Vec<VectorClock>> {
    let (_, order) = process_order(trace)?;
    let sends = send_index(trace);
    let zero = VectorClock::new(trace.events.iter().map(|e| e.node.clone()));
    let mut per_node: BTreeMap<&str, VectorClock> = BTreeMap::new();
    let mut out = vec![VectorClock::default(); trace.events.len()];
    for i in order {
        let e = &trace.events[i];
        let own = per_node.get(e.node.as_str()).unwrap_or(&zero).clone();
        let incoming = match (e.kind, e.msg_id) {
            (EventKind::Receive, Some(m)) => Some(out[sends[&m]].clone()),
            _ => None,
        };
        let next = vector_step(&own, &e.node, incoming.as_ref())?;
        per_node.insert(e.node.as_str(), next.clone());
        out[i] = next;
    }
    Ok(out)
}

/// A concurrent pair `(a, b)` with `L(a) < L(b)`: Lamport order without
/// causal order. `None` when every concurrent pair carries equal counters
/// or there is no concurrency at all.
pub fn lamport_converse_counterexample(trace: &Trace) -> Result<Option<(usize, usize)>> {
    let graph = super::happens_before(trace)?;
    let lamport = assign_lamport(trace)?;
    let n = trace.events.len();
    for a in 0..n {
        for b in 0..n {
            if a != b && graph.concurrent(a, b) && lamport[a] < lamport[b] {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}
