use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::clocknet::{EventKind, Trace};
use crate::{Error, Result};

/// Program-order and message edges over trace indices, with the exact
/// transitive closure stored as one bitset row per event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HappensBeforeGraph {
    len: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    topo: Vec<usize>,
    #[serde(skip)]
    reach: Vec<Vec<u64>>,
}

impl HappensBeforeGraph {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// `a → b` (irreflexive).
    pub fn happens_before(&self, a: usize, b: usize) -> bool {
        self.reach[a][b / 64] >> (b % 64) & 1 == 1
    }

    pub fn concurrent(&self, a: usize, b: usize) -> bool {
        a != b && !self.happens_before(a, b) && !self.happens_before(b, a)
    }

    /// All ordered pairs in the closure.
    pub fn closure_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len {
            for b in 0..self.len {
                if self.happens_before(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Builds happens-before from a trace with matched sends and receives.
pub fn happens_before(trace: &Trace) -> Result<HappensBeforeGraph> {
    let n = trace.events.len();
    let mut edges = Vec::new();
    let mut last_on_node: BTreeMap<&str, usize> = BTreeMap::new();
    let mut sends = BTreeMap::new();
    for (i, e) in trace.events.iter().enumerate() {
        if let Some(prev) = last_on_node.insert(e.node.as_str(), i) {
            edges.push((prev, i));
        }
        if e.kind == EventKind::Send {
            if let Some(m) = e.msg_id {
                if sends.insert(m, i).is_some() {
                    return Err(Error::validation(format!("message {m} sent twice")));
                }
            }
        }
    }
    for (i, e) in trace.events.iter().enumerate() {
        if e.kind == EventKind::Receive {
            let m = e
                .msg_id
                .ok_or_else(|| Error::validation("receive event without a message id"))?;
            let s = sends
                .get(&m)
                .ok_or_else(|| Error::validation(format!("unmatched receive of message {m}")))?;
            edges.push((*s, i));
        }
    }

    let mut succ = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for &(a, b) in &edges {
        succ[a].push(b);
        indegree[b] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut topo = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        topo.push(v);
        for &w in &succ[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if topo.len() != n {
        return Err(Error::validation("happens-before relation has a cycle"));
    }

    let words = n.div_ceil(64);
    let mut reach = vec![vec![0u64; words]; n];
    for &v in topo.iter().rev() {
        let mut row = vec![0u64; words];
        for &w in &succ[v] {
            row[w / 64] |= 1 << (w % 64);
            for (r, x) in row.iter_mut().zip(&reach[w]) {
                *r |= x;
            }
        }
        reach[v] = row;
    }

    Ok(HappensBeforeGraph {
        len: n,
        edges,
        topo,
        reach,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clocknet::TraceEvent;

    fn ev(kind: EventKind, node: &str, msg: Option<u64>, t: i64) -> TraceEvent {
        TraceEvent {
            kind,
            node: node.into(),
            msg_id: msg,
            true_time_ns: t,
            displayed_ns: t,
        }
    }

    #[test]
    fn single_node_chain() {
        let trace = Trace {
            events: (0..3)
                .map(|t| ev(EventKind::LocalTick, "A", None, t))
                .collect(),
            messages: vec![],
        };
        let g = happens_before(&trace).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.closure_pairs(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn message_orders_downstream() {
        let trace = Trace {
            events: vec![
                ev(EventKind::Send, "A", Some(0), 0),
                ev(EventKind::LocalTick, "B", None, 1),
                ev(EventKind::Receive, "B", Some(0), 5),
                ev(EventKind::LocalTick, "B", None, 6),
            ],
            messages: vec![],
        };
        let g = happens_before(&trace).unwrap();
        assert!(g.happens_before(0, 2));
        assert!(g.happens_before(0, 3));
        assert!(g.concurrent(0, 1));
        assert!(!g.happens_before(2, 0));
    }

    #[test]
    fn unmatched_receive() {
        let trace = Trace {
            events: vec![ev(EventKind::Receive, "B", Some(9), 5)],
            messages: vec![],
        };
        assert!(matches!(happens_before(&trace), Err(Error::Validation(_))));
    }

    #[test]
    fn cycle_is_rejected() {
        // receive recorded before its send on the same node gives a cycle
        let trace = Trace {
            events: vec![
                ev(EventKind::Receive, "A", Some(0), 0),
                ev(EventKind::Send, "A", Some(0), 1),
            ],
            messages: vec![],
        };
        assert!(happens_before(&trace).is_err());
    }
}
