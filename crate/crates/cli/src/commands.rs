use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use clockconv::causal::fito_audit;
use clockconv::chsh::{lhv_max, singlet_grid_max, singlet_refine, GridOptimum};
use clockconv::civiltime::{
    resolve_local, smear, tai_to_utc, unsmeared, utc_to_tai, CivilDateTime, LeapTable, TaiInstant,
    NS_PER_SECOND,
};
use clockconv::clocknet::{self, Scenario, Trace};
use clockconv::conventions::{kappa_to_epsilon, Epsilon, Kappa};
use clockconv::metrics::{self, convention_samples, ConventionSample};
use clockconv::scenario::{self, RatesConfig, ScenarioConfig, SmearConfig};
use clockconv::spacetime::{Boost, FrameOrder, IntervalClass};
use clockconv::syncproto::{extract_exchanges, sync_csv};
use clockconv::Error;

use crate::output::{usage, RunManifest, Staging};
use crate::{bundled, Scale};

/// Writes to stdout. A closed pipe ends output quietly instead of panicking.
fn emit(args: std::fmt::Arguments) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_fmt(args) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(format_args!($($t)*))? };
}

macro_rules! outln {
    ($($t:tt)*) => { emit(format_args!("{}\n", format_args!($($t)*)))? };
}

/// Resolves a scenario argument: an existing file first, then a bundled name.
fn load_scenario(arg: &str) -> Result<ScenarioConfig> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(scenario::load(path)?);
    }
    match bundled::lookup(arg) {
        Some(text) => Ok(scenario::parse(text)?),
        None => Err(usage(format!(
            "{arg}: no such scenario file or bundled scenario"
        ))),
    }
}

fn epsilons(values: &[f64]) -> Result<Vec<Epsilon>> {
    Ok(values
        .iter()
        .map(|v| Epsilon::new(*v))
        .collect::<Result<_, Error>>()?)
}

/// Loads the scenario and applies command-line overrides.
fn prepare(manifest: &RunManifest) -> Result<ScenarioConfig> {
    let mut config = load_scenario(&manifest.scenario)?;
    let s = &mut config.scenario;
    if let Some(seed) = manifest.seed {
        s.seed = seed;
    }
    if let Some(grid) = &manifest.epsilon_grid {
        s.conventions = epsilons(grid)?;
        config.kappas.clear();
    }
    if let Some(grid) = &manifest.boost_grid {
        for v in grid {
            Boost::new(*v)?;
        }
        s.boosts = grid.clone();
    }
    Ok(config)
}

fn auditable(s: &Scenario) -> bool {
    !s.nodes.is_empty() && s.is_positioned()
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{}: no such file", path.display())))
    }
}

fn leap_table(path: Option<&Path>) -> Result<LeapTable> {
    match path {
        Some(p) => {
            require_file(p)?;
            Ok(LeapTable::from_path(p)?)
        }
        None => Ok(LeapTable::historical()),
    }
}

pub fn simulate(manifest: &RunManifest, leap_table_flag: Option<PathBuf>) -> Result<()> {
    let config = prepare(manifest)?;
    let s = &config.scenario;
    let table_path =
        leap_table_flag.or_else(|| config.smear.as_ref().and_then(|m| m.leap_table.clone()));
    if let Some(p) = &table_path {
        require_file(p)?;
    }
    let stage = Staging::new(&manifest.out)?;
    let mut analyses = vec!["trace", "sync", "metrics"];

    let trace = clocknet::run(s)?;
    stage.write("trace.csv", trace.to_csv())?;
    stage.write("trace.json", trace.to_json())?;
    stage.write("sync.csv", sync_csv(&extract_exchanges(&trace)?))?;
    stage.write("owd.csv", metrics::owd_csv(&metrics::samples(&trace)?))?;
    let zone = metrics::forbidden_zone(&trace, s)?;
    stage.write_json("forbidden_zone.json", &zone)?;
    outln!(
        "{}: {} events, {}",
        s.name,
        trace.events.len(),
        zone.summary()
    );

    if auditable(s) {
        let report = fito_audit(&trace, s, &s.conventions, &s.boosts)?;
        outln!(
            "audit: {} spacelike pairs, {} flip across conventions, {} across frames, {} timelike violations",
            report.spacelike_pairs, report.flipped_pairs, report.boost_flipped_pairs, report.timelike_violations
        );
        stage.write_json("fito_audit.json", &report)?;
        analyses.push("audit");
    }
    if let Some(smear_config) = &config.smear {
        let table = leap_table(table_path.as_deref())?;
        stage.write("smear.csv", smear_csv(smear_config, &table)?)?;
        analyses.push("smear");
    }
    if let Some(rates) = &config.rates {
        stage.write_json("rates.json", &rates_json(rates)?)?;
        analyses.push("rates");
    }
    if let Some(steps) = config.chsh_grid_steps {
        stage.write_json("chsh.json", &chsh_json(steps))?;
        analyses.push("chsh");
    }
    if !config.dst.is_empty() {
        stage.write_json("dst.json", &dst_json(&config)?)?;
        analyses.push("dst");
    }

    let mut written = manifest.clone();
    written.analyses = analyses;
    stage.write_json("manifest.json", &written)?;
    stage.commit()
}

fn smear_csv(config: &SmearConfig, table: &LeapTable) -> Result<String> {
    let entries = table.entries();
    let idx = entries
        .iter()
        .position(|e| e.effective == config.leap_effective)
        .filter(|&i| i > 0)
        .ok_or_else(|| {
            Error::Config(format!(
                "leap table has no leap taking effect on {}",
                config.leap_effective
            ))
        })?;
    let leap = table.leap_events()[idx - 1];
    let (start, end) = config.window.bounds(leap.at);
    let step = config.step_s * NS_PER_SECOND;
    let mut out =
        String::from("tai_ns,tai,utc,unsmeared_ns,smeared_ns,smear_offset_ns,smeared_utc\n");
    let mut t = start - step;
    while t <= end + step {
        let instant = TaiInstant(t);
        let plain = unsmeared(instant, &leap);
        let smeared = smear(instant, &leap, &config.window)?;
        writeln!(
            out,
            "{t},{},{},{plain},{smeared},{},{}",
            instant.to_calendar(),
            tai_to_utc(instant, table)?,
            smeared - plain,
            CivilDateTime::from_leapless_ns(smeared)
        )?;
        t += step;
    }
    Ok(out)
}

fn rates_json(config: &RatesConfig) -> Result<serde_json::Value> {
    let r = config.evaluate()?;
    Ok(json!({
        "velocity_m_s": config.velocity_m_s,
        "potential_delta_m2_s2": config.potential_delta_m2_s2,
        "velocity_term": r.velocity_term,
        "gravity_term": r.gravity_term,
        "velocity_us_per_day": r.velocity_per_day(),
        "gravity_us_per_day": r.gravity_per_day(),
        "net_us_per_day": r.net_per_day,
    }))
}

fn degrees(g: &GridOptimum) -> Vec<f64> {
    g.angles.iter().map(|a| a.to_degrees()).collect()
}

fn chsh_json(steps: usize) -> serde_json::Value {
    let grid = singlet_grid_max(steps);
    let refined = singlet_refine(&grid, 1e-9);
    json!({
        "lhv_max": lhv_max(),
        "tsirelson_bound": 2.0 * std::f64::consts::SQRT_2,
        "grid_steps": steps,
        "grid_max": grid.value,
        "grid_angles_deg": degrees(&grid),
        "refined_max": refined.value,
        "refined_angles_deg": degrees(&refined),
    })
}

fn dst_json(config: &ScenarioConfig) -> Result<serde_json::Value> {
    let mut rules = Vec::new();
    for d in &config.dst {
        let mut probes = Vec::new();
        for wall in &d.probes {
            let resolution = match resolve_local(wall, &d.rule) {
                Ok(r) => serde_json::to_value(r)?,
                Err(Error::DstGap(_)) => json!({ "kind": "gap" }),
                Err(e) => return Err(e.into()),
            };
            probes.push(json!({ "wall": wall, "resolution": resolution }));
        }
        rules.push(json!({ "rule": d.rule, "probes": probes }));
    }
    Ok(json!({ "rules": rules }))
}

#[derive(Debug, Serialize)]
struct SweepRow {
    convention: &'static str,
    parameter: f64,
    epsilon: f64,
    samples: usize,
    /// Spacelike pairs ordered differently than under ε = ½; absent without positions.
    flipped_pairs: Option<usize>,
}

#[derive(Debug, Serialize)]
struct BoostRow {
    velocity: f64,
    /// Spacelike pairs ordered differently than in the simulator frame.
    flipped_pairs: Option<usize>,
}

#[derive(Debug, Serialize)]
struct SweepSummary<'a> {
    scenario: &'a str,
    seed: u64,
    rtt_constant: bool,
    pdv_constant: bool,
    spacelike_pairs: Option<usize>,
    conventions: Vec<SweepRow>,
    boosts: Vec<BoostRow>,
}

/// Spacelike pair count, then flips per convention and per boost.
type Flips = (usize, Vec<usize>, Vec<usize>);

/// Spacelike pairs whose order under column `k` differs from column 0.
fn flips(trace: &Trace, s: &Scenario, eps: &[Epsilon], boosts: &[f64]) -> Result<Option<Flips>> {
    if !auditable(s) {
        return Ok(None);
    }
    let mut conventions = vec![Epsilon::EINSTEIN];
    conventions.extend_from_slice(eps);
    let mut frames = vec![0.0];
    frames.extend_from_slice(boosts);
    let report = fito_audit(trace, s, &conventions, &frames)?;
    if report.cross_node_pairs == 0 {
        return Ok(None);
    }
    let spacelike: Vec<_> = report
        .pairs
        .iter()
        .filter(|p| p.class == IntervalClass::Spacelike)
        .collect();
    let count = |pick: &dyn Fn(&clockconv::causal::AuditPair) -> (FrameOrder, FrameOrder)| {
        spacelike
            .iter()
            .filter(|p| {
                let (base, other) = pick(p);
                base != other
            })
            .count()
    };
    let by_eps = (1..conventions.len())
        .map(|k| count(&|p| (p.convention_orders[0], p.convention_orders[k])))
        .collect();
    let by_boost = (1..frames.len())
        .map(|k| count(&|p| (p.boost_orders[0], p.boost_orders[k])))
        .collect();
    Ok(Some((report.spacelike_pairs, by_eps, by_boost)))
}

fn cell(v: Option<impl ToString>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn sweep(manifest: &RunManifest) -> Result<()> {
    let config = prepare(manifest)?;
    let s = &config.scenario;
    let kappas = match &manifest.kappa_grid {
        Some(k) => k.clone(),
        None => config.kappas.clone(),
    };
    let direct = s.conventions.len() - config.kappas.len().min(s.conventions.len());
    let mut rows: Vec<(&'static str, f64, Epsilon)> = s.conventions[..direct]
        .iter()
        .map(|e| ("epsilon", e.value(), *e))
        .collect();
    for k in &kappas {
        rows.push(("kappa", *k, kappa_to_epsilon(Kappa::new(*k)?)?));
    }
    if rows.is_empty() {
        return Err(usage("sweep needs at least one ε or κ value"));
    }
    let stage = Staging::new(&manifest.out)?;

    let trace = clocknet::run(s)?;
    let logs = extract_exchanges(&trace)?;
    let per_row: Vec<Vec<ConventionSample>> = rows
        .par_iter()
        .map(|(_, _, eps)| convention_samples(&logs, *eps))
        .collect::<Result<_, Error>>()?;
    let row_eps: Vec<Epsilon> = rows.iter().map(|r| r.2).collect();
    let ordering = flips(&trace, s, &row_eps, &s.boosts)?;

    let same = |f: &dyn Fn(&ConventionSample) -> String| {
        per_row
            .iter()
            .all(|r| r.iter().map(f).eq(per_row[0].iter().map(f)))
    };
    let rtt_constant = same(&|c| c.rtt_ns.to_string());
    let pdv_constant = same(&|c| c.pdv_ns.to_string());

    let mut samples_csv =
        String::from("convention,parameter,epsilon,exchange,repetition,rtt_ns,pdv_ns,owd_forward_ns,owd_reverse_ns\n");
    let mut table_csv = String::from(
        "convention,parameter,epsilon,rtt_ns,owd_forward_ns,owd_reverse_ns,flipped_pairs\n",
    );
    let mut summary_rows = Vec::new();
    for (k, ((name, param, eps), samples)) in rows.iter().zip(&per_row).enumerate() {
        for c in samples {
            writeln!(
                samples_csv,
                "{name},{param},{},{},{},{},{},{},{}",
                eps.value(),
                c.exchange,
                c.repetition,
                c.rtt_ns,
                c.pdv_ns,
                c.owd_forward_ns,
                c.owd_reverse_ns
            )?;
        }
        let first = samples.first();
        let flipped = ordering.as_ref().map(|o| o.1[k]);
        writeln!(
            table_csv,
            "{name},{param},{},{},{},{},{}",
            eps.value(),
            cell(first.map(|c| c.rtt_ns)),
            cell(first.map(|c| c.owd_forward_ns)),
            cell(first.map(|c| c.owd_reverse_ns)),
            cell(flipped)
        )?;
        summary_rows.push(SweepRow {
            convention: name,
            parameter: *param,
            epsilon: eps.value(),
            samples: samples.len(),
            flipped_pairs: flipped,
        });
    }
    let boosts: Vec<BoostRow> = s
        .boosts
        .iter()
        .enumerate()
        .map(|(k, v)| BoostRow {
            velocity: *v,
            flipped_pairs: ordering.as_ref().map(|o| o.2[k]),
        })
        .collect();
    let summary = SweepSummary {
        scenario: &s.name,
        seed: s.seed,
        rtt_constant,
        pdv_constant,
        spacelike_pairs: ordering.as_ref().map(|o| o.0),
        conventions: summary_rows,
        boosts,
    };

    out!("{table_csv}");
    stage.write("sweep_samples.csv", &samples_csv)?;
    stage.write("sweep_table.csv", &table_csv)?;
    stage.write_json("sweep_summary.json", &summary)?;
    let mut written = manifest.clone();
    written.analyses = vec!["sweep"];
    written.kappa_grid = Some(kappas);
    stage.write_json("manifest.json", &written)?;
    if !(rtt_constant && pdv_constant) {
        return Err(anyhow!("single-clock observables changed across conventions (rtt {rtt_constant}, pdv {pdv_constant})"));
    }
    stage.commit()
}

pub fn convert(time: &str, from: Scale, to: Scale, table_path: Option<&Path>) -> Result<()> {
    let table = leap_table(table_path)?;
    let input: CivilDateTime = time.parse()?;
    let output = match (from, to) {
        (Scale::Tai, Scale::Tai) => TaiInstant::from_calendar(&input)?.to_calendar(),
        (Scale::Tai, Scale::Utc) => tai_to_utc(TaiInstant::from_calendar(&input)?, &table)?,
        (Scale::Utc, Scale::Tai) => utc_to_tai(&input, &table)?.to_calendar(),
        (Scale::Utc, Scale::Utc) => tai_to_utc(utc_to_tai(&input, &table)?, &table)?,
    };
    outln!("{output}");
    Ok(())
}

pub fn chsh(steps: Option<usize>, scenario: Option<&str>) -> Result<()> {
    let from_scenario = match scenario {
        Some(arg) => load_scenario(arg)?.chsh_grid_steps,
        None => None,
    };
    let steps = steps.or(from_scenario).unwrap_or(90);
    if steps < 2 {
        return Err(usage(format!("--steps must be at least 2, got {steps}")));
    }
    outln!("{}", serde_json::to_string_pretty(&chsh_json(steps))?);
    Ok(())
}

pub fn rates(
    velocity: Option<f64>,
    potential_delta: Option<f64>,
    scenario: Option<&str>,
) -> Result<()> {
    let config = match (velocity, potential_delta, scenario) {
        (Some(v), Some(phi), _) => RatesConfig {
            velocity_m_s: v,
            potential_delta_m2_s2: phi,
        },
        (_, _, Some(arg)) => load_scenario(arg)?
            .rates
            .ok_or_else(|| usage(format!("{arg}: scenario has no [rates] section")))?,
        _ => RatesConfig::gps(),
    };
    outln!("{}", serde_json::to_string_pretty(&rates_json(&config)?)?);
    Ok(())
}
