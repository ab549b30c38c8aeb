//! Scenario files.
//!
//! A scenario is a TOML document with a fixed set of sections; see
//! `docs/scenario-grammar.md` for the grammar. Parsing is strict: unknown
//! keys, missing required keys and malformed values are rejected with the
//! line and column of the offending token. Optional sections configure the
//! analyses that do not run on the simulated network (leap smear, clock
//! rates, CHSH, daylight saving).

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::civiltime::{
    CivilDateTime, DstRule, SmearPlacement, SmearWindow, DEFAULT_SMEAR_WINDOW_S,
};
use crate::clocknet::{ClockModel, ExchangeSpec, Link, Node, Scenario, Traffic};
use crate::conventions::{
    gps_potential_delta, kappa_to_epsilon, relativistic_rate, Epsilon, Kappa, RelativisticRates,
    GPS_ORBITAL_SPEED, SPEED_OF_LIGHT,
};
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    seed: u64,
    #[serde(default, rename = "node")]
    nodes: Vec<RawNode>,
    #[serde(default, rename = "link")]
    links: Vec<RawLink>,
    #[serde(default, rename = "message")]
    messages: Vec<RawMessage>,
    #[serde(default, rename = "exchange")]
    exchanges: Vec<RawExchange>,
    #[serde(default, rename = "tick")]
    ticks: Vec<RawTick>,
    conventions: Option<RawConventions>,
    smear: Option<RawSmear>,
    rates: Option<RawRates>,
    chsh: Option<RawChsh>,
    #[serde(default)]
    dst: Vec<RawDst>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    position_ns: Option<i64>,
    #[serde(default)]
    offset_ns: i64,
    #[serde(default)]
    rate_ppb: i64,
    #[serde(default)]
    noise_stddev_ns: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    a: String,
    b: String,
    delay_ab_ns: i64,
    delay_ba_ns: i64,
    #[serde(default)]
    jitter_stddev_ns: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMessage {
    from: String,
    to: String,
    at_ns: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExchange {
    master: String,
    slave: String,
    #[serde(default)]
    start_ns: i64,
    #[serde(default = "one")]
    repetitions: u32,
    interval_ns: Option<i64>,
    #[serde(default)]
    residence_ns: i64,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTick {
    node: String,
    at_ns: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConventions {
    epsilon: Option<Vec<f64>>,
    #[serde(default)]
    kappa: Vec<f64>,
    #[serde(default)]
    boosts: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSmear {
    leap_effective: String,
    #[serde(default = "default_window")]
    window_s: i64,
    #[serde(default)]
    placement: Option<String>,
    #[serde(default = "default_step")]
    step_s: i64,
    leap_table: Option<String>,
}

fn default_window() -> i64 {
    DEFAULT_SMEAR_WINDOW_S
}

fn default_step() -> i64 {
    3_600
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRates {
    preset: Option<String>,
    velocity_m_s: Option<f64>,
    potential_delta_m2_s2: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChsh {
    #[serde(default = "default_grid_steps")]
    grid_steps: usize,
}

fn default_grid_steps() -> usize {
    90
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDst {
    #[serde(default)]
    base_offset_s: i64,
    #[serde(default = "default_dst_offset")]
    dst_offset_s: i64,
    start: String,
    end: String,
    #[serde(default)]
    probes: Vec<String>,
}

fn default_dst_offset() -> i64 {
    3_600
}

/// Leap-smear analysis: the leap taking effect at `leap_effective` (a table
/// entry date), sampled every `step_s` seconds across its window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmearConfig {
    pub leap_effective: NaiveDate,
    pub window: SmearWindow,
    pub step_s: i64,
    /// Leap table path relative to the scenario file; the bundled historical
    /// table when absent.
    pub leap_table: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatesConfig {
    pub velocity_m_s: f64,
    pub potential_delta_m2_s2: f64,
}

impl RatesConfig {
    pub fn gps() -> Self {
        RatesConfig {
            velocity_m_s: GPS_ORBITAL_SPEED,
            potential_delta_m2_s2: gps_potential_delta(),
        }
    }

    pub fn evaluate(&self) -> Result<RelativisticRates> {
        relativistic_rate(
            self.velocity_m_s,
            self.potential_delta_m2_s2,
            SPEED_OF_LIGHT,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DstConfig {
    pub rule: DstRule,
    /// Wall-clock readings to resolve against the rule.
    pub probes: Vec<CivilDateTime>,
}

/// A parsed scenario: the network plus any standalone analyses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// κ values as written; their ε images are appended to the scenario's conventions.
    pub kappas: Vec<f64>,
    pub smear: Option<SmearConfig>,
    pub rates: Option<RatesConfig>,
    pub chsh_grid_steps: Option<usize>,
    pub dst: Vec<DstConfig>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |i| before.len() - i - 1)
        + 1;
    (line, column)
}

fn civil(field: &str, value: &str) -> Result<CivilDateTime> {
    let c: CivilDateTime = value
        .parse()
        .map_err(|e: Error| Error::config(format!("{field}: {e}")))?;
    c.validate(false)
        .map_err(|e| Error::config(format!("{field}: {e}")))?;
    Ok(c)
}

/// Parses a scenario document and validates it.
pub fn parse(text: &str) -> Result<ScenarioConfig> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    build(raw)
}

/// Reads and parses a scenario file. Relative leap-table paths are resolved
/// against the file's directory.
pub fn load(path: &Path) -> Result<ScenarioConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut config = parse(&text)?;
    if let Some(smear) = config.smear.as_mut() {
        if let Some(table) = smear.leap_table.as_mut() {
            if table.is_relative() {
                *table = path.parent().unwrap_or(Path::new(".")).join(&*table);
            }
        }
    }
    Ok(config)
}

fn build(raw: RawScenario) -> Result<ScenarioConfig> {
    let mut s = Scenario::new(raw.name, raw.seed);
    for n in raw.nodes {
        let clock = ClockModel {
            offset_ns: n.offset_ns,
            rate_ppb: n.rate_ppb,
            noise_stddev_ns: n.noise_stddev_ns,
        };
        s.nodes.push(Node {
            id: n.id,
            position_ns: n.position_ns,
            clock,
        });
    }
    for l in raw.links {
        let mut link = Link::new(l.a, l.b, l.delay_ab_ns, l.delay_ba_ns);
        link.jitter_stddev_ns = l.jitter_stddev_ns;
        s.links.push(link);
    }
    for m in raw.messages {
        s.traffic.push(Traffic::Message {
            from: m.from,
            to: m.to,
            at_ns: m.at_ns,
        });
    }
    for x in raw.exchanges {
        let interval_ns = match x.interval_ns {
            Some(v) => v,
            None => {
                let (_, link) = s.link_between(&x.master, &x.slave).ok_or_else(|| {
                    Error::config(format!(
                        "exchange {} -> {}: no link between them",
                        x.master, x.slave
                    ))
                })?;
                link.delay_ab_ns + link.delay_ba_ns + x.residence_ns + 1
            }
        };
        s.traffic.push(Traffic::Exchange(ExchangeSpec {
            master: x.master,
            slave: x.slave,
            start_ns: x.start_ns,
            repetitions: x.repetitions,
            interval_ns,
            residence_ns: x.residence_ns,
        }));
    }
    for t in raw.ticks {
        s.traffic.push(Traffic::Tick {
            node: t.node,
            at_ns: t.at_ns,
        });
    }

    let mut kappas = Vec::new();
    match raw.conventions {
        None => s.conventions = Epsilon::default_grid(),
        Some(c) => {
            s.conventions = match c.epsilon {
                Some(list) => list.into_iter().map(Epsilon::new).collect::<Result<_>>()?,
                None if c.kappa.is_empty() => Epsilon::default_grid(),
                None => Vec::new(),
            };
            for k in &c.kappa {
                s.conventions.push(kappa_to_epsilon(Kappa::new(*k)?)?);
            }
            kappas = c.kappa;
            s.boosts = c.boosts;
        }
    }
    s.validate()?;

    let smear = raw
        .smear
        .map(|m| -> Result<SmearConfig> {
            let leap_effective =
                NaiveDate::parse_from_str(&m.leap_effective, "%Y-%m-%d").map_err(|e| {
                    Error::config(format!("smear.leap_effective {:?}: {e}", m.leap_effective))
                })?;
            let placement = match m.placement.as_deref() {
                None | Some("end") => SmearPlacement::End,
                Some("centered") => SmearPlacement::Centered,
                Some("start") => SmearPlacement::Start,
                Some(other) => {
                    return Err(Error::config(format!(
                        "smear.placement {other:?}: expected \"end\", \"centered\" or \"start\""
                    )))
                }
            };
            if m.step_s <= 0 {
                return Err(Error::config(format!(
                    "smear.step_s must be positive, got {}",
                    m.step_s
                )));
            }
            Ok(SmearConfig {
                leap_effective,
                window: SmearWindow::new(m.window_s, placement)?,
                step_s: m.step_s,
                leap_table: m.leap_table.map(PathBuf::from),
            })
        })
        .transpose()?;

    let rates = raw
        .rates
        .map(|r| -> Result<RatesConfig> {
            let config = match (r.preset.as_deref(), r.velocity_m_s, r.potential_delta_m2_s2) {
                (Some("gps"), None, None) => RatesConfig::gps(),
                (Some(p), None, None) => return Err(Error::config(format!("rates.preset {p:?}: only \"gps\" is known"))),
                (None, Some(v), Some(phi)) => RatesConfig { velocity_m_s: v, potential_delta_m2_s2: phi },
                _ => {
                    return Err(Error::config(
                        "rates: give either `preset` or both `velocity_m_s` and `potential_delta_m2_s2`",
                    ))
                }
            };
            config.evaluate()?;
            Ok(config)
        })
        .transpose()?;

    let chsh_grid_steps = match raw.chsh {
        Some(c) if c.grid_steps < 2 => {
            return Err(Error::config(format!(
                "chsh.grid_steps must be at least 2, got {}",
                c.grid_steps
            )))
        }
        other => other.map(|c| c.grid_steps),
    };

    let dst = raw
        .dst
        .into_iter()
        .enumerate()
        .map(|(i, d)| -> Result<DstConfig> {
            let rule = DstRule::new(
                d.base_offset_s,
                d.dst_offset_s,
                civil("dst.start", &d.start)?,
                civil("dst.end", &d.end)?,
            )
            .map_err(|e| Error::config(format!("dst rule {i}: {e}")))?;
            let probes = d
                .probes
                .iter()
                .map(|p| civil("dst.probes", p))
                .collect::<Result<_>>()?;
            Ok(DstConfig { rule, probes })
        })
        .collect::<Result<_>>()?;

    Ok(ScenarioConfig {
        scenario: s,
        kappas,
        smear,
        rates,
        chsh_grid_steps,
        dst,
    })
}
