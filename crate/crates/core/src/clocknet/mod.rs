//! Deterministic discrete-event simulation of a network of imperfect clocks.
//!
//! Simulator time ("true time") is integer nanoseconds of coordinate time.
//! Each node owns an affine [`ClockModel`]; every recorded [`TraceEvent`]
//! carries both the true time and what the local clock displayed.

mod noise;
mod sim;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conventions::Epsilon;
use crate::exact::{div_round_even, PPB};
use crate::{Error, Result};

pub use noise::{clock_stream, jitter_stream, standard_normal_at, NoiseStream};
pub use sim::run;

pub type NodeId = String;
pub type MsgId = u64;

/// Affine local clock: `displayed = t + offset + rate·t/10⁹ + noise`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClockModel {
    pub offset_ns: i64,
    pub rate_ppb: i64,
    pub noise_stddev_ns: u64,
}

impl ClockModel {
    pub fn perfect() -> Self {
        ClockModel::default()
    }

    pub fn with_offset(offset_ns: i64) -> Self {
        ClockModel {
            offset_ns,
            ..ClockModel::default()
        }
    }

    /// The deterministic part of a reading.
    pub fn ideal_reading(&self, true_time_ns: i64) -> Result<i64> {
        if true_time_ns < 0 {
            return Err(Error::validation(format!(
                "clock read at negative true time {true_time_ns}"
            )));
        }
        let drift = div_round_even(self.rate_ppb as i128 * true_time_ns as i128, PPB as i128);
        let total = true_time_ns as i128 + self.offset_ns as i128 + drift;
        i64::try_from(total).map_err(|_| {
            Error::Overflow(format!(
                "clock reading at t = {true_time_ns} exceeds i64 range"
            ))
        })
    }
}

/// Reads `clock` at `true_time_ns`, drawing noise from `rng`.
pub fn read_clock(clock: &ClockModel, true_time_ns: i64, rng: &mut NoiseStream) -> Result<i64> {
    let ideal = clock.ideal_reading(true_time_ns)?;
    let noise = rng.gaussian_ns(clock.noise_stddev_ns);
    ideal
        .checked_add(noise)
        .ok_or_else(|| Error::Overflow(format!("noisy clock reading at t = {true_time_ns}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    /// Position along the line in light-nanoseconds, if the scenario is positioned.
    pub position_ns: Option<i64>,
    pub clock: ClockModel,
}

impl Node {
    pub fn new(id: impl Into<NodeId>, clock: ClockModel) -> Self {
        Node {
            id: id.into(),
            position_ns: None,
            clock,
        }
    }

    pub fn at(mut self, position_ns: i64) -> Self {
        self.position_ns = Some(position_ns);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    pub delay_ab_ns: i64,
    pub delay_ba_ns: i64,
    pub jitter_stddev_ns: u64,
}

impl Link {
    pub fn new(
        a: impl Into<NodeId>,
        b: impl Into<NodeId>,
        delay_ab_ns: i64,
        delay_ba_ns: i64,
    ) -> Self {
        Link {
            a: a.into(),
            b: b.into(),
            delay_ab_ns,
            delay_ba_ns,
            jitter_stddev_ns: 0,
        }
    }

    pub fn connects(&self, x: &str, y: &str) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }

    /// Base delay for a message `from → to`; `None` if the link does not join them.
    pub fn delay_from(&self, from: &str, to: &str) -> Option<i64> {
        if self.a == from && self.b == to {
            Some(self.delay_ab_ns)
        } else if self.b == from && self.a == to {
            Some(self.delay_ba_ns)
        } else {
            None
        }
    }
}

/// A repeated four-timestamp exchange initiated by `master`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeSpec {
    pub master: NodeId,
    pub slave: NodeId,
    pub start_ns: i64,
    pub repetitions: u32,
    pub interval_ns: i64,
    /// True time the slave holds the request before replying.
    pub residence_ns: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Traffic {
    Message {
        from: NodeId,
        to: NodeId,
        at_ns: i64,
    },
    Exchange(ExchangeSpec),
    Tick {
        node: NodeId,
        at_ns: i64,
    },
}

/// Everything needed to reproduce a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    pub traffic: Vec<Traffic>,
    pub conventions: Vec<Epsilon>,
    /// Frame velocities for ordering audits.
    pub boosts: Vec<f64>,
    pub seed: u64,
}

impl Scenario {
    pub fn new(name: impl Into<String>, seed: u64) -> Self {
        Scenario {
            name: name.into(),
            nodes: Vec::new(),
            links: Vec::new(),
            traffic: Vec::new(),
            conventions: Vec::new(),
            boosts: Vec::new(),
            seed,
        }
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn link_between(&self, x: &str, y: &str) -> Option<(usize, &Link)> {
        self.links
            .iter()
            .enumerate()
            .find(|(_, l)| l.connects(x, y))
    }

    /// Checks every structural invariant; runs before any simulation step.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for n in &self.nodes {
            if n.id.is_empty() {
                return Err(Error::validation("empty node id"));
            }
            if !seen.insert(n.id.as_str()) {
                return Err(Error::validation(format!("duplicate node id {:?}", n.id)));
            }
        }
        for (i, l) in self.links.iter().enumerate() {
            let (na, nb) = match (self.node(&l.a), self.node(&l.b)) {
                (Some(na), Some(nb)) => (na, nb),
                _ => {
                    return Err(Error::validation(format!(
                        "link {}–{} references an unknown node",
                        l.a, l.b
                    )))
                }
            };
            if l.a == l.b {
                return Err(Error::validation(format!(
                    "link {}–{} is a self-loop",
                    l.a, l.b
                )));
            }
            if l.delay_ab_ns < 1 || l.delay_ba_ns < 1 {
                return Err(Error::validation(format!(
                    "link {}–{} has a delay below 1 ns",
                    l.a, l.b
                )));
            }
            if self.links[..i].iter().any(|o| o.connects(&l.a, &l.b)) {
                return Err(Error::validation(format!("duplicate link {}–{}", l.a, l.b)));
            }
            if let (Some(pa), Some(pb)) = (na.position_ns, nb.position_ns) {
                let light = (pa as i128 - pb as i128).abs();
                if (l.delay_ab_ns as i128) < light || (l.delay_ba_ns as i128) < light {
                    return Err(Error::validation(format!(
                        "link {}–{} is faster than light: delays ({}, {}) < light time {light}",
                        l.a, l.b, l.delay_ab_ns, l.delay_ba_ns
                    )));
                }
            }
        }
        for t in &self.traffic {
            match t {
                Traffic::Message { from, to, at_ns } => {
                    self.require_link(from, to)?;
                    require_time(*at_ns)?;
                }
                Traffic::Exchange(x) => {
                    self.require_link(&x.master, &x.slave)?;
                    require_time(x.start_ns)?;
                    if x.repetitions < 1 {
                        return Err(Error::validation("exchange needs at least one repetition"));
                    }
                    if x.repetitions > 1 && x.interval_ns < 1 {
                        return Err(Error::validation("repeated exchange needs interval_ns ≥ 1"));
                    }
                    if x.residence_ns < 0 {
                        return Err(Error::validation("negative residence time"));
                    }
                }
                Traffic::Tick { node, at_ns } => {
                    if self.node(node).is_none() {
                        return Err(Error::validation(format!("tick on unknown node {node:?}")));
                    }
                    require_time(*at_ns)?;
                }
            }
        }
        for v in &self.boosts {
            crate::spacetime::Boost::new(*v)?;
        }
        Ok(())
    }

    fn require_link(&self, from: &str, to: &str) -> Result<()> {
        for id in [from, to] {
            if self.node(id).is_none() {
                return Err(Error::validation(format!(
                    "traffic references unknown node {id:?}"
                )));
            }
        }
        if self.link_between(from, to).is_none() {
            return Err(Error::validation(format!(
                "no link between {from} and {to}"
            )));
        }
        Ok(())
    }

    /// True when every node carries a position.
    pub fn is_positioned(&self) -> bool {
        self.nodes.iter().all(|n| n.position_ns.is_some())
    }
}

fn require_time(at_ns: i64) -> Result<()> {
    if at_ns < 0 {
        Err(Error::validation(format!(
            "traffic scheduled at negative time {at_ns}"
        )))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Send,
    Receive,
    LocalTick,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Send => "Send",
            EventKind::Receive => "Receive",
            EventKind::LocalTick => "LocalTick",
        })
    }
}

/// One recorded occurrence. Field order matches the CSV header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub node: NodeId,
    pub msg_id: Option<MsgId>,
    pub true_time_ns: i64,
    pub displayed_ns: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageRole {
    Data,
    SyncRequest { exchange: usize, repetition: u32 },
    SyncReply { exchange: usize, repetition: u32 },
}

/// Ground truth about one message, kept beside the trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub id: MsgId,
    pub from: NodeId,
    pub to: NodeId,
    pub role: MessageRole,
    pub link: usize,
    pub base_delay_ns: i64,
    pub jitter_ns: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
    pub messages: Vec<MessageRecord>,
}

pub const TRACE_CSV_HEADER: &str = "kind,node,msg_id,true_time_ns,displayed_ns";

impl Trace {
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for e in &self.events {
            let id = e.msg_id.map(|m| m.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.kind, e.node, id, e.true_time_ns, e.displayed_ns
            ));
        }
        out
    }

    /// Parses the CSV form produced by [`Trace::to_csv`]. Message records are
    /// not part of the CSV and come back empty.
    pub fn from_csv(text: &str) -> Result<Trace> {
        let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
        if header != TRACE_CSV_HEADER {
            return Err(Error::validation(format!(
                "unexpected trace header {header:?}"
            )));
        }
        let events = rdr
            .deserialize::<TraceEvent>()
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Trace {
            events,
            messages: Vec::new(),
        })
    }

    /// JSON array of events, same fields as the CSV.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.events).expect("trace events serialize")
    }

    pub fn message(&self, id: MsgId) -> Option<&MessageRecord> {
        self.messages.iter().find(|m| m.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(offset: i64, rate: i64, t: i64) -> i64 {
        let clock = ClockModel {
            offset_ns: offset,
            rate_ppb: rate,
            noise_stddev_ns: 0,
        };
        read_clock(&clock, t, &mut NoiseStream::new(0, 0)).unwrap()
    }

    #[test]
    fn clock_readings() {
        assert_eq!(read(0, 0, 1_000_000_000), 1_000_000_000);
        assert_eq!(read(500, 0, 1_000_000_000), 1_000_000_500);
        assert_eq!(read(0, 1_000, 1_000_000_000), 1_000_001_000);
        assert_eq!(read(0, -1_000, 1_000_000_000), 999_999_000);
        // 1 ppb over 1.5 ns rounds half to even
        assert_eq!(read(0, 500_000_000, 1), 1);
        assert_eq!(read(0, 500_000_000, 3), 5);
    }

    #[test]
    fn clock_errors() {
        let c = ClockModel::with_offset(i64::MAX);
        assert!(matches!(
            read_clock(&c, 10, &mut NoiseStream::new(0, 0)),
            Err(Error::Overflow(_))
        ));
        assert!(matches!(
            ClockModel::perfect().ideal_reading(-1),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn noisy_reads_are_seeded() {
        let c = ClockModel {
            noise_stddev_ns: 100,
            ..ClockModel::default()
        };
        let a: Vec<i64> = {
            let mut s = NoiseStream::new(42, 0);
            (0..10)
                .map(|_| read_clock(&c, 1_000, &mut s).unwrap())
                .collect()
        };
        let b: Vec<i64> = {
            let mut s = NoiseStream::new(42, 0);
            (0..10)
                .map(|_| read_clock(&c, 1_000, &mut s).unwrap())
                .collect()
        };
        assert_eq!(a, b);
        assert!(a.iter().any(|&r| r != 1_000));
    }

    #[test]
    fn validation_catches_bad_topology() {
        let mut s = Scenario::new("bad", 1);
        s.nodes.push(Node::new("A", ClockModel::perfect()));
        s.links.push(Link::new("A", "Z", 10, 10));
        assert!(matches!(s.validate(), Err(Error::Validation(_))));

        let mut s = Scenario::new("dup", 1);
        s.nodes.push(Node::new("A", ClockModel::perfect()));
        s.nodes.push(Node::new("A", ClockModel::perfect()));
        assert!(s.validate().is_err());

        let mut s = Scenario::new("zero-delay", 1);
        s.nodes.push(Node::new("A", ClockModel::perfect()));
        s.nodes.push(Node::new("B", ClockModel::perfect()));
        s.links.push(Link::new("A", "B", 0, 10));
        assert!(s.validate().is_err());

        let mut s = Scenario::new("ftl", 1);
        s.nodes.push(Node::new("A", ClockModel::perfect()).at(0));
        s.nodes
            .push(Node::new("B", ClockModel::perfect()).at(1_000));
        s.links.push(Link::new("A", "B", 999, 1_000));
        assert!(s.validate().is_err());

        let mut s = Scenario::new("unlinked", 1);
        s.nodes.push(Node::new("A", ClockModel::perfect()));
        s.nodes.push(Node::new("B", ClockModel::perfect()));
        s.traffic.push(Traffic::Message {
            from: "A".into(),
            to: "B".into(),
            at_ns: 0,
        });
        assert!(s.validate().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let trace = Trace {
            events: vec![
                TraceEvent {
                    kind: EventKind::Send,
                    node: "A".into(),
                    msg_id: Some(0),
                    true_time_ns: 0,
                    displayed_ns: -5,
                },
                TraceEvent {
                    kind: EventKind::LocalTick,
                    node: "B".into(),
                    msg_id: None,
                    true_time_ns: 3,
                    displayed_ns: 3,
                },
            ],
            messages: vec![],
        };
        let csv = trace.to_csv();
        assert!(csv.starts_with(
            "kind,node,msg_id,true_time_ns,displayed_ns\nSend,A,0,0,-5\nLocalTick,B,,3,3\n"
        ));
        assert_eq!(Trace::from_csv(&csv).unwrap(), trace);
    }
}
