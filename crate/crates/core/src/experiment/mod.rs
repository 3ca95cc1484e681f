//! Named scenarios that sweep powers, geometries and relay counts and emit
//! CSV or JSON tables.

mod config;

pub use config::{GainSource, Scenario, ScenarioConfig};

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotics::{
    asymptotic_delta, gap_report, high_snr_prelog, low_snr_sumrate, numeric_prelog, Regime,
};
use crate::channel::{db_to_linear, GainMatrix, Geometry};
use crate::error::{Error, Result};
use crate::optimizer::{lambda_grid, RegionBoundary};
use crate::protocol::{max_sum_rate, region, EvalOptions, Protocol};
use crate::schedule::{phase_count, run_schedule, verify_delivery};

/// Power used for the low-SNR comparisons.
pub const LOW_SNR_POWER: f64 = 1e-4;

/// Tolerance of the per-weight containment check.
const CONTAINMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!("format must be csv or json, got {other}"))),
        }
    }
}

/// A named table; the name is the output file stem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric column values (non-numbers become NaN).
    pub fn floats(&self, name: &str) -> Vec<f64> {
        match self.column(name) {
            Some(c) => self.rows.iter().map(|r| r[c].as_f64().unwrap_or(f64::NAN)).collect(),
            None => Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Array of objects keyed by the header.
    pub fn to_json(&self) -> Result<String> {
        let objects: Vec<serde_json::Map<String, Value>> = self
            .rows
            .iter()
            .map(|r| self.header.iter().cloned().zip(r.iter().cloned()).collect())
            .collect();
        Ok(serde_json::to_string_pretty(&objects)?)
    }

    pub fn from_boundary(name: impl Into<String>, b: &RegionBoundary) -> Self {
        let mut header = vec!["lambda".to_string(), "R_a".into(), "R_b".into()];
        header.extend((1..=b.t).map(|l| format!("delta_{l}")));
        header.push("config_id".into());
        let rows = b
            .points
            .iter()
            .map(|p| {
                let mut r = vec![json!(p.lambda), json!(p.rates.ra), json!(p.rates.rb)];
                r.extend(p.delta.iter().map(|d| json!(d)));
                r.push(json!(p.config_id));
                r
            })
            .collect();
        Table { name: name.into(), header, rows }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, Default)]
pub struct ScenarioOutput {
    pub tables: Vec<Table>,
    /// Files written verbatim: `(file name, contents)`.
    pub documents: Vec<(String, String)>,
}

impl ScenarioOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes every table as `<name>.csv` or `<name>.json` plus the
    /// documents; returns the written paths.
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.tables {
            let (ext, body) = match format {
                Format::Csv => ("csv", t.to_csv()),
                Format::Json => ("json", t.to_json()?),
            };
            let path = dir.join(format!("{}.{ext}", t.name));
            fs::write(&path, body)?;
            written.push(path);
        }
        for (name, body) in &self.documents {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// `0` → `0dB`, `-3.5` → `-3.5dB`.
pub fn db_label(p_db: f64) -> String {
    format!("{p_db}dB")
}

pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    cfg.validate()?;
    match cfg.scenario {
        Scenario::Regions => scenario_regions(cfg),
        Scenario::Line => scenario_line(cfg),
        Scenario::RelayCount => scenario_relay_count(cfg),
        Scenario::TwoRelayGrid => scenario_two_relay_grid(cfg),
        Scenario::Schedule => scenario_schedule(cfg),
        Scenario::Asymptotics => scenario_asymptotics(cfg),
    }
}

fn eval_options(cfg: &ScenarioConfig, m: usize) -> Result<EvalOptions> {
    Ok(EvalOptions {
        hull: cfg.hull,
        power_grid: cfg.power_grid,
        exhaustive_order: cfg.exhaustive_order,
        partition: cfg.hop_partition(m)?,
        ..EvalOptions::default()
    })
}

/// Regions for every configured protocol at every power, single-relay
/// baselines when `baselines` is set, and a summary table with the best sum
/// rate and whether each DF frontier lies inside its outer bound.
fn region_study(cfg: &ScenarioConfig, g: &GainMatrix, baselines: bool) -> Result<ScenarioOutput> {
    let scenario = cfg.scenario.name();
    let lambdas = lambda_grid(cfg.lambda_steps);
    let opts = eval_options(cfg, g.m())?;
    let mut out = ScenarioOutput::default();
    let mut summary = Table::new(format!("{scenario}_summary"), &["protocol", "p_db", "max_sum_rate", "within_outer"]);
    for &p_db in &cfg.p_db {
        let p = db_to_linear(p_db);
        let mut regions: HashMap<Protocol, RegionBoundary> = HashMap::new();
        let mut order = Vec::new();
        for &proto in &cfg.protocols {
            let b = region(proto, g, p, &lambdas, &opts)?;
            order.push((proto.name().to_string(), b.clone()));
            regions.insert(proto, b);
        }
        if baselines && g.m() > 1 {
            for r in 1..=g.m() {
                let single = g.induced(&[r])?;
                for proto in [Protocol::DfMabc, Protocol::DfTdbc, Protocol::AfMabc, Protocol::AfTdbc] {
                    if cfg.protocols.contains(&proto) {
                        let mut b = region(proto, &single, p, &lambdas, &EvalOptions { hull: cfg.hull, ..EvalOptions::default() })?;
                        b.protocol = format!("{}-r{r}", proto.name());
                        order.push((b.protocol.clone(), b));
                    }
                }
            }
        }
        for (name, b) in &order {
            let within = name
                .parse::<Protocol>()
                .ok()
                .filter(|p| p.is_df())
                .and_then(|p| p.outer())
                .and_then(|o| regions.get(&o))
                .map(|outer| within_outer(b, outer));
            summary.push(vec![json!(name), json!(p_db), json!(b.max_sum_rate()), json!(within)]);
            out.tables.push(Table::from_boundary(format!("{scenario}_{name}_{}", db_label(p_db)), b));
        }
    }
    out.tables.push(summary);
    Ok(out)
}

/// Pointwise weighted-objective comparison at matching weights.
pub fn within_outer(inner: &RegionBoundary, outer: &RegionBoundary) -> bool {
    inner.points.iter().all(|p| match outer.value_at(p.lambda) {
        Some(v) => p.objective <= v + CONTAINMENT_TOL * v.abs().max(1.0),
        None => true,
    })
}

pub fn scenario_regions(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let g = cfg.gain_matrix(cfg.m)?;
    region_study(cfg, &g, true)
}

pub fn scenario_line(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let g = cfg.gain_matrix(cfg.m)?;
    region_study(cfg, &g, false)
}

pub fn scenario_relay_count(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let (lo, hi) = cfg.m_range;
    let mut out = ScenarioOutput::default();
    for &p_db in &cfg.p_db {
        let p = db_to_linear(p_db);
        for &proto in &cfg.protocols {
            let rows: Vec<Result<(usize, f64)>> = (lo..=hi)
                .into_par_iter()
                .map(|m| {
                    let g = cfg.gain_matrix(m)?;
                    Ok((m, max_sum_rate(proto, &g, p, &eval_options(cfg, m)?)?))
                })
                .collect();
            let mut t = Table::new(format!("relay-count_{proto}_{}", db_label(p_db)), &["m", "sum_rate"]);
            for r in rows {
                let (m, v) = r?;
                t.push(vec![json!(m), json!(v)]);
            }
            out.tables.push(t);
        }
    }
    Ok(out)
}

/// All `(d1, d2)` with `0 < d1 < d2 < 1` on a grid of the given step.
pub fn grid_pairs(step: f64) -> Vec<(f64, f64)> {
    let n = (1.0 / step).round() as usize;
    let pt = |k: usize| (k as f64 * step * 1e9).round() / 1e9;
    (1..n).flat_map(|i| (i + 1..n).map(move |j| (pt(i), pt(j)))).collect()
}

pub fn scenario_two_relay_grid(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let pairs = grid_pairs(cfg.grid_step);
    let mut out = ScenarioOutput::default();
    let mut best = Table::new("two-relay-grid_argmax", &["protocol", "p_db", "d1", "d2", "sum_rate"]);
    for &p_db in &cfg.p_db {
        let p = db_to_linear(p_db);
        for &proto in &cfg.protocols {
            let rows: Vec<Result<f64>> = pairs
                .par_iter()
                .map(|&(d1, d2)| {
                    let positions = vec![0.0, d1 * cfg.d_ab, d2 * cfg.d_ab, cfg.d_ab];
                    let g = Geometry::new(positions, cfg.pathloss_exponent, cfg.k, Some(cfg.h_ab_sq))?.gains()?;
                    max_sum_rate(proto, &g, p, &eval_options(cfg, 2)?)
                })
                .collect();
            let mut t = Table::new(format!("two-relay-grid_{proto}_{}", db_label(p_db)), &["d1", "d2", "sum_rate"]);
            let mut top: Option<(f64, f64, f64)> = None;
            for (&(d1, d2), r) in pairs.iter().zip(rows) {
                let v = r?;
                if top.is_none_or(|(_, _, b)| v > b) {
                    top = Some((d1, d2, v));
                }
                t.push(vec![json!(d1), json!(d2), json!(v)]);
            }
            if let Some((d1, d2, v)) = top {
                best.push(vec![json!(proto.name()), json!(p_db), json!(d1), json!(d2), json!(v)]);
            }
            out.tables.push(t);
        }
    }
    out.tables.push(best);
    Ok(out)
}

pub fn scenario_schedule(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let (m, blocks) = (cfg.m, cfg.blocks);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let msgs_a: Vec<u64> = (0..blocks).map(|_| rng.random_range(0..cfg.modulus)).collect();
    let msgs_b: Vec<u64> = (0..blocks).map(|_| rng.random_range(0..cfg.modulus)).collect();
    let tr = run_schedule(m, blocks, &msgs_a, &msgs_b, cfg.modulus)?;
    let expected = phase_count(m, blocks)?;
    let delivered = verify_delivery(&tr, &msgs_a, &msgs_b);
    let mut report = Table::new("schedule_report", &["m", "blocks", "modulus", "events", "expected_events", "delivered"]);
    report.push(vec![json!(m), json!(blocks), json!(cfg.modulus), json!(tr.len()), json!(expected), json!(delivered)]);
    Ok(ScenarioOutput {
        tables: vec![report],
        documents: vec![(format!("schedule_transcript_m{m}_B{blocks}.jsonl"), tr.to_json_lines())],
    })
}

pub fn scenario_asymptotics(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let m = cfg.m;
    let g = cfg.gain_matrix(m)?;
    let opts = eval_options(cfg, m)?;
    let mut out = ScenarioOutput::default();

    let mut prelog = Table::new("asymptotics_prelog", &["protocol", "m", "prelog", "numeric_prelog", "p_lo", "p_hi"]);
    for &proto in &cfg.protocols {
        let want = high_snr_prelog(proto, m)?;
        let got = numeric_prelog(|p| max_sum_rate(proto, &g, p, &opts), cfg.p_lo, cfg.p_hi)?;
        prelog.push(vec![json!(proto.name()), json!(m), json!(want), json!(got), json!(cfg.p_lo), json!(cfg.p_hi)]);
    }
    out.tables.push(prelog);

    let low_rows = [
        Protocol::DfMabc,
        Protocol::MabcOut,
        Protocol::DfTdbc,
        Protocol::TdbcOut,
        Protocol::DfMhmr,
        Protocol::MhmrOutLower,
        Protocol::MhmrOutUpper,
    ];
    let mut low = Table::new("asymptotics_low_snr", &["protocol", "m", "p", "closed_form", "optimized"]);
    for proto in low_rows {
        let closed = low_snr_sumrate(proto, m, cfg.h_sq, LOW_SNR_POWER)?;
        let optimized = match proto {
            Protocol::MhmrOutLower | Protocol::MhmrOutUpper => None,
            _ => Some(max_sum_rate(proto, &g, LOW_SNR_POWER, &opts)?),
        };
        low.push(vec![json!(proto.name()), json!(m), json!(LOW_SNR_POWER), json!(closed), json!(optimized)]);
    }
    out.tables.push(low);

    let mut deltas = Table::new("asymptotics_delta", &["protocol", "regime", "alpha", "delta"]);
    for regime in [Regime::Low, Regime::High] {
        for proto in low_rows {
            let family = asymptotic_delta(proto, m, regime)?;
            let alphas: &[f64] = if family.is_parametric() { &[0.0, 0.5, 1.0] } else { &[0.0] };
            for &alpha in alphas {
                let d = family.at(alpha)?;
                let text: Vec<String> = d.delta().iter().map(|x| x.to_string()).collect();
                let alpha = if family.is_parametric() { json!(alpha) } else { Value::Null };
                deltas.push(vec![json!(proto.name()), json!(regime.to_string()), alpha, json!(text.join(" "))]);
            }
        }
    }
    out.tables.push(deltas);

    let (lo, hi) = g.extremes();
    let reports = [Protocol::AfMabc, Protocol::DfMabc, Protocol::AfTdbc, Protocol::DfTdbc, Protocol::AfMhmr, Protocol::DfMhmr]
        .into_iter()
        .map(|p| gap_report(p, m, lo, hi))
        .collect::<Result<Vec<_>>>()?;
    out.documents.push(("asymptotics_gaps.json".into(), serde_json::to_string_pretty(&reports)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec![json!(1.5), json!("k[1 2]")]);
        t.push(vec![json!(null), json!(true)]);
        assert_eq!(t.to_csv(), "a,b\n1.5,k[1 2]\n,true\n");
        assert!(t.to_json().unwrap().contains("\"b\": \"k[1 2]\""));
        assert_eq!(t.floats("a")[0], 1.5);
    }

    #[test]
    fn db_labels() {
        assert_eq!(db_label(0.0), "0dB");
        assert_eq!(db_label(20.0), "20dB");
        assert_eq!(db_label(-3.5), "-3.5dB");
    }

    #[test]
    fn pairs() {
        let p = grid_pairs(0.1);
        assert_eq!(p.len(), 36);
        assert!(p.iter().all(|(a, b)| a < b && *a > 0.0 && *b < 1.0));
        assert!(p.contains(&(0.2, 0.6)));
    }

    #[test]
    fn schedule_scenario() {
        let mut cfg = ScenarioConfig::defaults(Scenario::Schedule);
        cfg.m = 2;
        cfg.blocks = 3;
        let out = run(&cfg).unwrap();
        let t = out.table("schedule_report").unwrap();
        assert_eq!(t.rows[0][3], json!(13));
        assert_eq!(t.rows[0][5], json!(true));
        assert_eq!(out.documents[0].1.lines().count(), 13);
    }

    #[test]
    fn regions_rows_match_lambda_grid() {
        let mut cfg = ScenarioConfig::defaults(Scenario::Regions);
        cfg.lambda_steps = 11;
        cfg.p_db = vec![0.0];
        let out = run(&cfg).unwrap();
        let t = out.table("regions_df-mhmr_0dB").unwrap();
        assert_eq!(t.rows.len(), 11);
        assert!(out.table("regions_df-mabc-r1_0dB").is_some());
        let s = out.table("regions_summary").unwrap();
        let within = s.column("within_outer").unwrap();
        assert!(s.rows.iter().all(|r| r[within] != json!(false)));
    }
}
