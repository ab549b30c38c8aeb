use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{
    clock_stream, jitter_stream, read_clock, EventKind, MessageRecord, MessageRole, MsgId,
    NoiseStream, Scenario, Trace, TraceEvent, Traffic,
};
use crate::{Error, Result};

/// Heap key: true time, then (node id, msg id, kind), then insertion order.
#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Pending {
    time: i64,
    node: String,
    msg_id: Option<MsgId>,
    kind: EventKind,
    seq: u64,
}

struct Planned {
    record: MessageRecord,
    /// True time the reply to a sync request leaves the slave, relative to arrival.
    residence_ns: Option<i64>,
}

/// Runs the scenario to completion and returns the trace ordered by
/// `(true_time_ns, node, msg_id, kind)`.
pub fn run(scenario: &Scenario) -> Result<Trace> {
    scenario.validate()?;

    let mut clocks: Vec<NoiseStream> = (0..scenario.nodes.len())
        .map(|i| NoiseStream::new(scenario.seed, clock_stream(i)))
        .collect();
    let mut jitter: Vec<[NoiseStream; 2]> = (0..scenario.links.len())
        .map(|i| {
            [
                NoiseStream::new(scenario.seed, jitter_stream(i, false)),
                NoiseStream::new(scenario.seed, jitter_stream(i, true)),
            ]
        })
        .collect();

    let mut plans: Vec<Planned> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |heap: &mut BinaryHeap<Reverse<Pending>>, time, node: &str, msg_id, kind| {
        heap.push(Reverse(Pending {
            time,
            node: node.to_string(),
            msg_id,
            kind,
            seq,
        }));
        seq += 1;
    };

    let plan = |plans: &mut Vec<Planned>, from: &str, to: &str, role, residence_ns| -> MsgId {
        let (link, l) = scenario.link_between(from, to).expect("validated link");
        let id = plans.len() as MsgId;
        plans.push(Planned {
            record: MessageRecord {
                id,
                from: from.to_string(),
                to: to.to_string(),
                role,
                link,
                base_delay_ns: l.delay_from(from, to).expect("validated link"),
                jitter_ns: 0,
            },
            residence_ns,
        });
        id
    };

    for (xi, t) in scenario.traffic.iter().enumerate() {
        match t {
            Traffic::Message { from, to, at_ns } => {
                let id = plan(&mut plans, from, to, MessageRole::Data, None);
                push(&mut heap, *at_ns, from, Some(id), EventKind::Send);
            }
            Traffic::Exchange(x) => {
                for rep in 0..x.repetitions {
                    let req = plan(
                        &mut plans,
                        &x.master,
                        &x.slave,
                        MessageRole::SyncRequest {
                            exchange: xi,
                            repetition: rep,
                        },
                        Some(x.residence_ns),
                    );
                    plan(
                        &mut plans,
                        &x.slave,
                        &x.master,
                        MessageRole::SyncReply {
                            exchange: xi,
                            repetition: rep,
                        },
                        None,
                    );
                    let at = (rep as i64)
                        .checked_mul(x.interval_ns)
                        .and_then(|d| d.checked_add(x.start_ns))
                        .ok_or_else(|| Error::Overflow("exchange schedule".into()))?;
                    push(&mut heap, at, &x.master, Some(req), EventKind::Send);
                }
            }
            Traffic::Tick { node, at_ns } => {
                push(&mut heap, *at_ns, node, None, EventKind::LocalTick);
            }
        }
    }

    let mut events = Vec::new();
    while let Some(Reverse(p)) = heap.pop() {
        let ni = scenario.node_index(&p.node).expect("validated node");
        let displayed = read_clock(&scenario.nodes[ni].clock, p.time, &mut clocks[ni])?;
        events.push(TraceEvent {
            kind: p.kind,
            node: p.node.clone(),
            msg_id: p.msg_id,
            true_time_ns: p.time,
            displayed_ns: displayed,
        });
        match (p.kind, p.msg_id) {
            (EventKind::Send, Some(id)) => {
                let planned = &mut plans[id as usize];
                let rec = &mut planned.record;
                let link = &scenario.links[rec.link];
                let reverse = link.a != rec.from;
                let j = jitter[rec.link][reverse as usize]
                    .gaussian_ns(link.jitter_stddev_ns)
                    .max(0);
                rec.jitter_ns = j;
                let arrival = p
                    .time
                    .checked_add(rec.base_delay_ns)
                    .and_then(|t| t.checked_add(j))
                    .ok_or_else(|| Error::Overflow(format!("arrival time of message {id}")))?;
                let to = rec.to.clone();
                push(&mut heap, arrival, &to, Some(id), EventKind::Receive);
            }
            (EventKind::Receive, Some(id)) => {
                if let Some(residence) = plans[id as usize].residence_ns {
                    // replies are planned directly after their request
                    let reply = id + 1;
                    let at = p
                        .time
                        .checked_add(residence)
                        .ok_or_else(|| Error::Overflow(format!("reply time of message {reply}")))?;
                    let from = plans[reply as usize].record.from.clone();
                    push(&mut heap, at, &from, Some(reply), EventKind::Send);
                }
            }
            _ => {}
        }
    }

    Ok(Trace {
        events,
        messages: plans.into_iter().map(|p| p.record).collect(),
    })
}
