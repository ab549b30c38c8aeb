//! Four-timestamp offset/delay estimation over the simulated network.
//!
//! The master stamps `t1` on sending, the slave `t2` on receipt and `t3` on
//! replying, the master `t4` on receipt. Only `(t4 − t1) − (t3 − t2)` is a
//! single-clock quantity; splitting it into two one-way legs is where the
//! symmetric-path (ε = ½) assumption enters. With asymmetric legs the offset
//! estimate is biased by exactly `(forward − reverse)/2`.

use serde::Serialize;

use crate::clocknet::{
    self, ClockModel, EventKind, ExchangeSpec, MessageRole, Scenario, Trace, Traffic,
};
use crate::conventions::Epsilon;
use crate::exact::{halve_even, FracNs};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SyncExchange {
    pub t1: i64,
    pub t2: i64,
    pub t3: i64,
    pub t4: i64,
}

impl SyncExchange {
    pub fn new(t1: i64, t2: i64, t3: i64, t4: i64) -> Result<Self> {
        let x = SyncExchange { t1, t2, t3, t4 };
        x.validate()?;
        Ok(x)
    }

    fn validate(&self) -> Result<()> {
        if self.t3 < self.t2 {
            return Err(Error::validation(format!(
                "slave replied before receiving: t3 = {} < t2 = {}",
                self.t3, self.t2
            )));
        }
        if self.t4 < self.t1 {
            return Err(Error::validation(format!(
                "negative master round trip: t4 = {} < t1 = {}",
                self.t4, self.t1
            )));
        }
        Ok(())
    }

    /// Master round trip minus slave residence; each difference is read on one clock.
    pub fn round_trip(&self) -> i64 {
        (self.t4 - self.t1) - (self.t3 - self.t2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SyncEstimate {
    /// Estimated slave − master clock offset.
    pub offset_ns: i64,
    /// Estimated one-way path delay.
    pub delay_ns: i64,
}

/// Offset and delay under the symmetric-path assumption, halved with ties to even.
pub fn ptp_estimate(x: &SyncExchange) -> Result<SyncEstimate> {
    x.validate()?;
    let fwd = x.t2 as i128 - x.t1 as i128;
    let rev = x.t4 as i128 - x.t3 as i128;
    let narrow =
        |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("sync estimate exceeds i64".into()));
    Ok(SyncEstimate {
        offset_ns: narrow(halve_even(fwd - rev))?,
        delay_ns: narrow(halve_even(fwd + rev))?,
    })
}

/// Offset estimate when the slave's receipt is assigned master time
/// `t1 + ε·RTT` instead of the midpoint: `(t2 − t1) − ε·RTT`, exact.
///
/// At ε = ½ this is the unrounded symmetric estimate; moving ε shifts it by
/// `−(ε − ½)·RTT`.
pub fn convention_offset(x: &SyncExchange, epsilon: Epsilon) -> Result<FracNs> {
    x.validate()?;
    Ok(FracNs::from_ns(x.t2 - x.t1) - FracNs::scaled(x.round_trip(), epsilon.ppb()))
}

/// Shifts the clock by the estimated offset. Not idempotent: applying the
/// same estimate twice subtracts it twice.
pub fn apply_correction(clock: &ClockModel, estimate: &SyncEstimate) -> ClockModel {
    ClockModel {
        offset_ns: clock.offset_ns - estimate.offset_ns,
        ..*clock
    }
}

/// One completed exchange found in a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeLog {
    /// Index of the exchange entry in the scenario's traffic list.
    pub exchange: usize,
    pub repetition: u32,
    pub master: String,
    pub slave: String,
    pub timestamps: SyncExchange,
    pub estimate: SyncEstimate,
}

pub const SYNC_CSV_HEADER: &str = "t1,t2,t3,t4,offset,delay";

/// Collects every completed four-timestamp exchange in trace order of `t1`.
pub fn extract_exchanges(trace: &Trace) -> Result<Vec<ExchangeLog>> {
    let displayed = |id: u64, kind: EventKind| {
        trace
            .events
            .iter()
            .find(|e| e.msg_id == Some(id) && e.kind == kind)
            .map(|e| e.displayed_ns)
    };
    let mut logs = Vec::new();
    for req in &trace.messages {
        let MessageRole::SyncRequest {
            exchange,
            repetition,
        } = req.role
        else {
            continue;
        };
        let reply = trace
            .messages
            .iter()
            .find(|m| {
                m.role
                    == MessageRole::SyncReply {
                        exchange,
                        repetition,
                    }
            })
            .ok_or_else(|| Error::validation(format!("sync request {} has no reply", req.id)))?;
        let stamps = (
            displayed(req.id, EventKind::Send),
            displayed(req.id, EventKind::Receive),
            displayed(reply.id, EventKind::Send),
            displayed(reply.id, EventKind::Receive),
        );
        let (Some(t1), Some(t2), Some(t3), Some(t4)) = stamps else {
            return Err(Error::validation(format!(
                "exchange {exchange}/{repetition} is incomplete in the trace"
            )));
        };
        let timestamps = SyncExchange { t1, t2, t3, t4 };
        logs.push(ExchangeLog {
            exchange,
            repetition,
            master: req.from.clone(),
            slave: req.to.clone(),
            timestamps,
            estimate: ptp_estimate(&timestamps)?,
        });
    }
    Ok(logs)
}

pub fn sync_csv(logs: &[ExchangeLog]) -> String {
    let mut out = String::from(SYNC_CSV_HEADER);
    out.push('\n');
    for l in logs {
        let x = &l.timestamps;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            x.t1, x.t2, x.t3, x.t4, l.estimate.offset_ns, l.estimate.delay_ns
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyncConfig {
    pub repetitions: u32,
    pub start_ns: i64,
    /// Spacing between exchanges; `None` uses one full round trip plus 1 ns.
    pub interval_ns: Option<i64>,
    pub residence_ns: i64,
}

impl SyncConfig {
    pub fn repetitions(repetitions: u32) -> Self {
        SyncConfig {
            repetitions,
            start_ns: 0,
            interval_ns: None,
            residence_ns: 0,
        }
    }
}

/// Runs `repetitions` exchanges between `master` and `slave` on the
/// scenario's network (its own traffic is replaced) and returns the estimates.
pub fn run_sync(
    scenario: &Scenario,
    master: &str,
    slave: &str,
    repetitions: u32,
) -> Result<Vec<SyncEstimate>> {
    Ok(run_sync_with(
        scenario,
        master,
        slave,
        SyncConfig::repetitions(repetitions),
    )?
    .into_iter()
    .map(|l| l.estimate)
    .collect())
}

pub fn run_sync_with(
    scenario: &Scenario,
    master: &str,
    slave: &str,
    config: SyncConfig,
) -> Result<Vec<ExchangeLog>> {
    if config.repetitions < 1 {
        return Err(Error::config("run_sync needs at least one repetition"));
    }
    let (_, link) = scenario
        .link_between(master, slave)
        .ok_or_else(|| Error::config(format!("no link between {master} and {slave}")))?;
    let interval_ns = config
        .interval_ns
        .unwrap_or(link.delay_ab_ns + link.delay_ba_ns + config.residence_ns + 1);
    let mut s = scenario.clone();
    s.traffic = vec![Traffic::Exchange(ExchangeSpec {
        master: master.to_string(),
        slave: slave.to_string(),
        start_ns: config.start_ns,
        repetitions: config.repetitions,
        interval_ns,
        residence_ns: config.residence_ns,
    })];
    let trace = clocknet::run(&s)?;
    extract_exchanges(&trace)
}
