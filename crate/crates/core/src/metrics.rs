//! Delay metrics and receive-before-send detection.
//!
//! One-way delay subtracts readings of two different clocks, so it carries
//! whatever offset those clocks have; it is returned signed and never
//! clamped. Round-trip time reads one clock, and delay variation is a
//! difference of two one-way delays, so both cancel constant offsets.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::clocknet::{EventKind, MsgId, NodeId, Scenario, Trace};
use crate::conventions::Epsilon;
use crate::exact::FracNs;
use crate::syncproto::{convention_offset, ExchangeLog};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DelaySample {
    pub msg_id: MsgId,
    pub from: NodeId,
    pub to: NodeId,
    /// Sender clock at departure.
    pub send_displayed_ns: i64,
    /// Receiver clock at arrival.
    pub recv_displayed_ns: i64,
    pub send_true_ns: i64,
    pub recv_true_ns: i64,
}

/// Pairs every receive in the trace with its send.
pub fn samples(trace: &Trace) -> Result<Vec<DelaySample>> {
    let mut sends = BTreeMap::new();
    for e in trace.events.iter().filter(|e| e.kind == EventKind::Send) {
        if let Some(id) = e.msg_id {
            sends.insert(id, e);
        }
    }
    let mut out = Vec::new();
    for r in trace.events.iter().filter(|e| e.kind == EventKind::Receive) {
        let id = r
            .msg_id
            .ok_or_else(|| Error::validation("receive event without a message id"))?;
        let s = sends
            .get(&id)
            .ok_or_else(|| Error::validation(format!("unmatched receive of message {id}")))?;
        out.push(DelaySample {
            msg_id: id,
            from: s.node.clone(),
            to: r.node.clone(),
            send_displayed_ns: s.displayed_ns,
            recv_displayed_ns: r.displayed_ns,
            send_true_ns: s.true_time_ns,
            recv_true_ns: r.true_time_ns,
        });
    }
    Ok(out)
}

/// Receiver reading minus sender reading. Negative values are data.
pub fn one_way_delay(s: &DelaySample) -> i64 {
    s.recv_displayed_ns - s.send_displayed_ns
}

/// `|owd(a) − owd(b)|` for two samples on the same path.
pub fn pdv(a: &DelaySample, b: &DelaySample) -> Result<i64> {
    if a.from != b.from || a.to != b.to {
        return Err(Error::validation(format!(
            "delay variation across different paths: {}→{} vs {}→{}",
            a.from, a.to, b.from, b.to
        )));
    }
    Ok((one_way_delay(a) - one_way_delay(b)).abs())
}

/// Round trip on the requester's clock: reply arrival minus request departure.
pub fn rtt(request: &DelaySample, reply: &DelaySample) -> Result<i64> {
    if reply.from != request.to || reply.to != request.from {
        return Err(Error::validation(format!(
            "reply {}→{} does not answer request {}→{}",
            reply.from, reply.to, request.from, request.to
        )));
    }
    if reply.send_true_ns < request.recv_true_ns {
        return Err(Error::validation(format!(
            "reply {} left before request {} arrived",
            reply.msg_id, request.msg_id
        )));
    }
    Ok(reply.recv_displayed_ns - request.send_displayed_ns)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectionReport {
    pub from: NodeId,
    pub to: NodeId,
    pub samples: usize,
    pub violating_samples: usize,
    pub min_margin_ns: i64,
    /// Receiver offset minus sender offset below minus the base delay.
    pub predicted_violation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForbiddenZoneReport {
    pub total_samples: usize,
    /// Samples whose receive reading precedes the send reading.
    pub violating_samples: usize,
    /// Smallest displayed one-way delay; `None` without samples.
    pub min_margin_ns: Option<i64>,
    pub predicted_violation: bool,
    pub per_link: Vec<DirectionReport>,
}

impl ForbiddenZoneReport {
    /// Human summary in microseconds.
    pub fn summary(&self) -> String {
        let margin = self
            .min_margin_ns
            .map(|m| format!("{:.3} μs", m as f64 / 1_000.0))
            .unwrap_or_else(|| "n/a".into());
        format!(
            "{} of {} samples received before they were sent (min margin {margin}); predicted: {}",
            self.violating_samples, self.total_samples, self.predicted_violation
        )
    }
}

/// Counts receive-before-send samples and predicts them from ground truth.
///
/// The prediction uses clock offsets and base link delays only, so under
/// zero noise, zero jitter and zero rate error it holds exactly:
/// violations occur iff `predicted_violation`. Directions carrying no
/// traffic are not predicted.
pub fn forbidden_zone(trace: &Trace, scenario: &Scenario) -> Result<ForbiddenZoneReport> {
    let all = samples(trace)?;
    let mut by_dir: BTreeMap<(NodeId, NodeId), Vec<&DelaySample>> = BTreeMap::new();
    for s in &all {
        by_dir
            .entry((s.from.clone(), s.to.clone()))
            .or_default()
            .push(s);
    }
    let mut per_link = Vec::new();
    for ((from, to), ss) in by_dir {
        let offset = |id: &str| {
            scenario
                .node(id)
                .map(|n| n.clock.offset_ns)
                .ok_or_else(|| Error::validation(format!("trace node {id:?} not in scenario")))
        };
        let delay = scenario
            .link_between(&from, &to)
            .and_then(|(_, l)| l.delay_from(&from, &to))
            .ok_or_else(|| Error::validation(format!("trace path {from}→{to} has no link")))?;
        let skew = offset(&to)? as i128 - offset(&from)? as i128;
        per_link.push(DirectionReport {
            samples: ss.len(),
            violating_samples: ss.iter().filter(|s| one_way_delay(s) < 0).count(),
            min_margin_ns: ss
                .iter()
                .map(|s| one_way_delay(s))
                .min()
                .expect("non-empty"),
            predicted_violation: skew < -(delay as i128),
            from,
            to,
        });
    }
    Ok(ForbiddenZoneReport {
        total_samples: all.len(),
        violating_samples: per_link.iter().map(|d| d.violating_samples).sum(),
        min_margin_ns: per_link.iter().map(|d| d.min_margin_ns).min(),
        predicted_violation: per_link.iter().any(|d| d.predicted_violation),
        per_link,
    })
}

pub const OWD_CSV_HEADER: &str = "msg_id,from,to,send_displayed_ns,recv_displayed_ns,owd_ns";

/// Per-sample one-way delays for external plotting.
pub fn owd_csv(samples: &[DelaySample]) -> String {
    let mut out = String::from(OWD_CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.msg_id,
            s.from,
            s.to,
            s.send_displayed_ns,
            s.recv_displayed_ns,
            one_way_delay(s)
        ));
    }
    out
}

/// Exchange observables after synchronizing the slave under one convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConventionSample {
    pub exchange: usize,
    pub repetition: u32,
    pub rtt_ns: i64,
    pub owd_forward_ns: FracNs,
    pub owd_reverse_ns: FracNs,
    /// Forward delay minus the previous repetition's; zero for the first.
    pub pdv_ns: FracNs,
}

/// Synchronizes once per exchange entry, from its first repetition, under
/// `epsilon`, then reads every repetition through that fixed correction.
/// Forward delay is `ε·RTT₀` plus drift since the first repetition.
pub fn convention_samples(logs: &[ExchangeLog], epsilon: Epsilon) -> Result<Vec<ConventionSample>> {
    let mut firsts: BTreeMap<usize, (u32, FracNs)> = BTreeMap::new();
    for l in logs {
        let offset = convention_offset(&l.timestamps, epsilon)?;
        let slot = firsts.entry(l.exchange).or_insert((l.repetition, offset));
        if l.repetition < slot.0 {
            *slot = (l.repetition, offset);
        }
    }
    let mut previous: BTreeMap<usize, FracNs> = BTreeMap::new();
    let mut sorted: Vec<&ExchangeLog> = logs.iter().collect();
    sorted.sort_by_key(|l| (l.exchange, l.repetition));
    let mut out = Vec::with_capacity(logs.len());
    for l in sorted {
        let x = &l.timestamps;
        let offset = firsts[&l.exchange].1;
        let forward = FracNs::from_ns(x.t2 - x.t1) - offset;
        let reverse = FracNs::from_ns(x.t4 - x.t3) + offset;
        let pdv = previous
            .insert(l.exchange, forward)
            .map_or(FracNs::ZERO, |p| forward - p);
        out.push(ConventionSample {
            exchange: l.exchange,
            repetition: l.repetition,
            rtt_ns: x.round_trip(),
            owd_forward_ns: forward,
            owd_reverse_ns: reverse,
            pdv_ns: pdv,
        });
    }
    Ok(out)
}
