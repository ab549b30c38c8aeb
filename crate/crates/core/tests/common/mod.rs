//! Random scenario generators shared by the integration and acceptance tests.
#![allow(dead_code)]

use clockconv::clocknet::{ClockModel, ExchangeSpec, Link, Node, Scenario, Traffic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two nodes with one noiseless exchange: (scenario, slave offset, forward, reverse).
pub fn noiseless_exchange(rng: &mut ChaCha8Rng) -> (Scenario, i64, i64, i64) {
    let offset = rng.gen_range(-1_000_000..=1_000_000);
    let df = rng.gen_range(1..=100_000);
    let dr = rng.gen_range(1..=100_000);
    let mut s = Scenario::new("noiseless", rng.gen());
    s.nodes.push(Node::new("master", ClockModel::perfect()));
    s.nodes
        .push(Node::new("slave", ClockModel::with_offset(offset)));
    s.links.push(Link::new("master", "slave", df, dr));
    s.traffic.push(Traffic::Exchange(ExchangeSpec {
        master: "master".into(),
        slave: "slave".into(),
        start_ns: rng.gen_range(0..1_000_000),
        repetitions: 1,
        interval_ns: 1,
        residence_ns: rng.gen_range(0..10_000),
    }));
    (s, offset, df, dr)
}

/// Fully meshed nodes on a line with light-respecting links and mixed traffic.
pub fn positioned(rng: &mut ChaCha8Rng, noisy: bool) -> Scenario {
    let n = rng.gen_range(2..=5);
    let mut s = Scenario::new("positioned", rng.gen());
    for i in 0..n {
        let clock = ClockModel {
            offset_ns: rng.gen_range(-5_000..=5_000),
            rate_ppb: if noisy {
                rng.gen_range(-1_000..=1_000)
            } else {
                0
            },
            noise_stddev_ns: if noisy { rng.gen_range(0..=20) } else { 0 },
        };
        s.nodes
            .push(Node::new(format!("n{i}"), clock).at(rng.gen_range(-50_000..=50_000)));
    }
    for i in 0..n {
        for j in i + 1..n {
            let light = (s.nodes[i].position_ns.unwrap() - s.nodes[j].position_ns.unwrap()).abs();
            let mut link = Link::new(
                s.nodes[i].id.clone(),
                s.nodes[j].id.clone(),
                light.max(1) + rng.gen_range(0..=20_000),
                light.max(1) + rng.gen_range(0..=20_000),
            );
            if noisy {
                link.jitter_stddev_ns = rng.gen_range(0..=50);
            }
            s.links.push(link);
        }
    }
    for _ in 0..rng.gen_range(1..=8) {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        s.traffic.push(Traffic::Message {
            from: s.nodes[a].id.clone(),
            to: s.nodes[b].id.clone(),
            at_ns: rng.gen_range(0..=100_000),
        });
    }
    for _ in 0..rng.gen_range(0..=4) {
        s.traffic.push(Traffic::Tick {
            node: s.nodes[rng.gen_range(0..n)].id.clone(),
            at_ns: rng.gen_range(0..=100_000),
        });
    }
    s
}

/// At most 50 events, every node with at least two local ticks.
pub fn small_trace(rng: &mut ChaCha8Rng) -> Scenario {
    let n = rng.gen_range(2..=4);
    let mut s = Scenario::new("small", rng.gen());
    for i in 0..n {
        s.nodes
            .push(Node::new(format!("p{i}"), ClockModel::perfect()));
    }
    for i in 0..n {
        for j in i + 1..n {
            let id = |k: usize| format!("p{k}");
            s.links.push(Link::new(
                id(i),
                id(j),
                rng.gen_range(1..=500),
                rng.gen_range(1..=500),
            ));
        }
    }
    for i in 0..n {
        for _ in 0..2 {
            s.traffic.push(Traffic::Tick {
                node: format!("p{i}"),
                at_ns: rng.gen_range(0..=2_000),
            });
        }
    }
    let budget = (50 - 2 * n) / 2;
    for _ in 0..rng.gen_range(0..=budget) {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        s.traffic.push(Traffic::Message {
            from: format!("p{a}"),
            to: format!("p{b}"),
            at_ns: rng.gen_range(0..=2_000),
        });
    }
    s
}

/// Master and slave with drift, noise and jitter exchanging repeatedly.
pub fn drifting_exchange(rng: &mut ChaCha8Rng) -> Scenario {
    let mut s = Scenario::new("drifting", rng.gen());
    s.nodes.push(Node::new(
        "master",
        ClockModel {
            offset_ns: 0,
            rate_ppb: 0,
            noise_stddev_ns: rng.gen_range(0..=30),
        },
    ));
    s.nodes.push(Node::new(
        "slave",
        ClockModel {
            offset_ns: rng.gen_range(-100_000..=100_000),
            rate_ppb: rng.gen_range(-50_000..=50_000),
            noise_stddev_ns: rng.gen_range(0..=30),
        },
    ));
    let mut link = Link::new(
        "master",
        "slave",
        rng.gen_range(1..=50_000),
        rng.gen_range(1..=50_000),
    );
    link.jitter_stddev_ns = rng.gen_range(0..=100);
    s.links.push(link);
    s.traffic.push(Traffic::Exchange(ExchangeSpec {
        master: "master".into(),
        slave: "slave".into(),
        start_ns: 0,
        repetitions: rng.gen_range(2..=12),
        interval_ns: 1_000_000,
        residence_ns: rng.gen_range(500..=1_000),
    }));
    s
}
