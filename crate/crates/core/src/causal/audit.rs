use std::cmp::Ordering;

use serde::Serialize;

use crate::clocknet::{Scenario, Trace};
use crate::conventions::Epsilon;
use crate::exact::PPB;
use crate::spacetime::{order_in_frame, Boost, FrameOrder, IntervalClass, SpacetimeEvent};
use crate::{Error, Result};

/// One cross-node event pair. Orders are of `a` relative to `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditPair {
    pub id: usize,
    pub a: usize,
    pub b: usize,
    pub class: IntervalClass,
    pub true_order: FrameOrder,
    pub convention_orders: Vec<FrameOrder>,
    pub boost_orders: Vec<FrameOrder>,
}

impl AuditPair {
    fn varies(orders: &[FrameOrder]) -> bool {
        orders.windows(2).any(|w| w[0] != w[1])
    }

    pub fn flips_across_conventions(&self) -> bool {
        Self::varies(&self.convention_orders)
    }

    pub fn flips_across_boosts(&self) -> bool {
        Self::varies(&self.boost_orders)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitoAuditReport {
    pub reference_node: String,
    pub conventions: Vec<f64>,
    pub boosts: Vec<f64>,
    pub cross_node_pairs: usize,
    pub spacelike_pairs: usize,
    /// Spacelike pairs whose order differs between at least two conventions.
    pub flipped_pairs: usize,
    /// Spacelike pairs whose order differs between at least two frames.
    pub boost_flipped_pairs: usize,
    /// Timelike or lightlike pairs whose order moved under some convention or frame.
    pub timelike_violations: usize,
    /// Happens-before built from the same trace has no cycle. The audit treats
    /// this as the finite content of "a cannot influence b if b influenced a".
    pub causal_order_acyclic: bool,
    pub pairs: Vec<AuditPair>,
}

fn order_from_sign(o: Ordering) -> FrameOrder {
    match o {
        Ordering::Less => FrameOrder::After,
        Ordering::Equal => FrameOrder::Simultaneous,
        Ordering::Greater => FrameOrder::Before,
    }
}

/// Audits cross-node timestamp orderings under each convention and frame.
///
/// Timelines start from simulator coordinate time, which is the Einstein
/// (ε = ½) assignment in the simulator frame. Under ε every node's timeline
/// moves by `(2ε − 1)·(x − x_ref)`: the Reichenbach shift `(ε − ½)·RTT` for
/// the light round trip to the reference node, signed by direction so that a
/// single anisotropic convention covers the whole line. The shift between any
/// two nodes is then strictly smaller than their light distance, which is why
/// causally connectable pairs cannot reorder. Convention arithmetic is exact
/// at the ppb resolution of [`Epsilon::ppb`].
pub fn fito_audit(
    trace: &Trace,
    scenario: &Scenario,
    conventions: &[Epsilon],
    boosts: &[f64],
) -> Result<FitoAuditReport> {
    if conventions.is_empty() {
        return Err(Error::config("audit needs at least one convention"));
    }
    for v in boosts {
        Boost::new(*v)?;
    }
    let position = |node: &str| -> Result<i64> {
        scenario
            .node(node)
            .and_then(|n| n.position_ns)
            .ok_or_else(|| {
                Error::config(format!(
                    "node {node:?} has no position; audit needs positions"
                ))
            })
    };
    let reference = scenario
        .nodes
        .first()
        .ok_or_else(|| Error::config("scenario has no nodes"))?;
    let positions = trace
        .events
        .iter()
        .map(|e| position(&e.node))
        .collect::<Result<Vec<_>>>()?;

    let causal_order_acyclic = super::happens_before(trace).is_ok();
    let skew: Vec<i128> = conventions
        .iter()
        .map(|e| 2 * e.ppb() as i128 - PPB as i128)
        .collect();

    let mut pairs = Vec::new();
    let n = trace.events.len();
    for a in 0..n {
        for b in a + 1..n {
            let (ea, eb) = (&trace.events[a], &trace.events[b]);
            if ea.node == eb.node {
                continue;
            }
            let dt = eb.true_time_ns as i128 - ea.true_time_ns as i128;
            let dx = positions[b] as i128 - positions[a] as i128;
            let class = match dt.abs().cmp(&dx.abs()) {
                Ordering::Greater => IntervalClass::Timelike,
                Ordering::Less => IntervalClass::Spacelike,
                Ordering::Equal => IntervalClass::Lightlike,
            };
            let convention_orders = skew
                .iter()
                .map(|k| order_from_sign((dt * PPB as i128 + k * dx).cmp(&0)))
                .collect();
            let pa = SpacetimeEvent::new(ea.true_time_ns as f64, positions[a] as f64)?;
            let pb = SpacetimeEvent::new(eb.true_time_ns as f64, positions[b] as f64)?;
            let boost_orders = boosts
                .iter()
                .map(|v| order_in_frame(&pa, &pb, *v))
                .collect::<Result<Vec<_>>>()?;
            pairs.push(AuditPair {
                id: pairs.len(),
                a,
                b,
                class,
                true_order: order_from_sign(dt.cmp(&0)),
                convention_orders,
                boost_orders,
            });
        }
    }

    let spacelike: Vec<&AuditPair> = pairs
        .iter()
        .filter(|p| p.class == IntervalClass::Spacelike)
        .collect();
    let timelike_violations = pairs
        .iter()
        .filter(|p| p.class != IntervalClass::Spacelike)
        .filter(|p| {
            p.convention_orders
                .iter()
                .chain(&p.boost_orders)
                .any(|o| *o != p.true_order)
        })
        .count();

    Ok(FitoAuditReport {
        reference_node: reference.id.clone(),
        conventions: conventions.iter().map(|e| e.value()).collect(),
        boosts: boosts.to_vec(),
        cross_node_pairs: pairs.len(),
        spacelike_pairs: spacelike.len(),
        flipped_pairs: spacelike
            .iter()
            .filter(|p| p.flips_across_conventions())
            .count(),
        boost_flipped_pairs: spacelike.iter().filter(|p| p.flips_across_boosts()).count(),
        timelike_violations,
        causal_order_acyclic,
        pairs,
    })
}
