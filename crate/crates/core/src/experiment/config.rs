//! Scenario configuration files.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    := blank | comment | entry
//! comment := '#' any*
//! entry   := key '=' value          (whitespace around both is ignored)
//! list    := item (',' item)*       (for p_db and protocols)
//! range   := int '..' int           (inclusive, for m_range)
//! ```
//!
//! Keys: `scenario`, `gains` (`example`, `line`, `equal` or a path to a
//! CSV/JSON gain matrix), `m`, `m_range`, `p_db`, `protocols`, `d_ab`,
//! `pathloss_exponent`, `k`, `h_ab_sq`, `h_sq`, `positions` (space or comma separated,
//! `a` first and `b` last),
//! `partition` (hops as space-separated relays split by `|`),
//! `lambda_steps`, `grid_step`, `hull`, `power_grid`, `exhaustive_order`,
//! `blocks`, `modulus`, `seed`, `p_lo`, `p_hi`. Unknown keys are an error.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::{line_gains, example_gains, GainMatrix, Geometry};
use crate::df::HopPartition;
use crate::error::{Error, Result};
use crate::protocol::Protocol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Regions,
    Line,
    RelayCount,
    TwoRelayGrid,
    Schedule,
    Asymptotics,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Regions,
        Scenario::Line,
        Scenario::RelayCount,
        Scenario::TwoRelayGrid,
        Scenario::Schedule,
        Scenario::Asymptotics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Regions => "regions",
            Scenario::Line => "line",
            Scenario::RelayCount => "relay-count",
            Scenario::TwoRelayGrid => "two-relay-grid",
            Scenario::Schedule => "schedule",
            Scenario::Asymptotics => "asymptotics",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scenario {s}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GainSource {
    Example,
    /// Relays evenly spaced between the terminals.
    Line,
    /// Every link, including the direct one, has squared gain `h_sq`.
    Equal,
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub gains: GainSource,
    pub m: usize,
    pub m_range: (usize, usize),
    pub p_db: Vec<f64>,
    pub protocols: Vec<Protocol>,
    pub d_ab: f64,
    pub pathloss_exponent: f64,
    pub k: f64,
    pub h_ab_sq: f64,
    pub h_sq: f64,
    pub positions: Option<Vec<f64>>,
    pub partition: Option<Vec<Vec<usize>>>,
    pub lambda_steps: usize,
    pub grid_step: f64,
    pub hull: bool,
    pub power_grid: bool,
    pub exhaustive_order: bool,
    pub blocks: usize,
    pub modulus: u64,
    pub seed: u64,
    pub p_lo: f64,
    pub p_hi: f64,
}

const DF_AF: [Protocol; 6] =
    [Protocol::DfMabc, Protocol::DfTdbc, Protocol::DfMhmr, Protocol::AfMabc, Protocol::AfTdbc, Protocol::AfMhmr];

impl ScenarioConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let mut c = ScenarioConfig {
            scenario,
            gains: GainSource::Line,
            m: 8,
            m_range: (1, 8),
            p_db: vec![0.0, 20.0],
            protocols: DF_AF.to_vec(),
            d_ab: 1.0,
            pathloss_exponent: 3.8,
            k: 1.0,
            h_ab_sq: 0.04,
            h_sq: 1.0,
            positions: None,
            partition: None,
            lambda_steps: 101,
            grid_step: 0.1,
            hull: false,
            power_grid: false,
            exhaustive_order: false,
            blocks: 3,
            modulus: 256,
            seed: 7,
            p_lo: 1e6,
            p_hi: 1e8,
        };
        match scenario {
            Scenario::Regions => {
                c.gains = GainSource::Example;
                c.m = 2;
                c.protocols.extend([Protocol::MabcOut, Protocol::TdbcOut, Protocol::MhmrOut]);
            }
            Scenario::Line => c.protocols.extend([Protocol::MabcOut, Protocol::TdbcOut, Protocol::MhmrOut]),
            Scenario::RelayCount => {}
            Scenario::TwoRelayGrid => {
                c.m = 2;
                c.p_db = vec![0.0];
            }
            Scenario::Schedule => c.m = 2,
            Scenario::Asymptotics => {
                c.gains = GainSource::Equal;
                c.m = 2;
                c.protocols = vec![
                    Protocol::AfMabc,
                    Protocol::DfMabc,
                    Protocol::MabcOut,
                    Protocol::AfTdbc,
                    Protocol::DfTdbc,
                    Protocol::TdbcOut,
                    Protocol::AfMhmr,
                    Protocol::DfMhmr,
                    Protocol::MhmrOut,
                ];
            }
        }
        c
    }

    /// Parses a config file. `fallback` supplies the scenario when the file
    /// does not name one.
    pub fn parse(text: &str, fallback: Option<Scenario>) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            entries.push((n + 1, key.trim().to_string(), value.trim().to_string()));
        }
        let named = entries.iter().find(|e| e.1 == "scenario").map(|e| e.2.parse::<Scenario>()).transpose()?;
        let scenario = match (named, fallback) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::InvalidConfig(format!("config is for scenario {a}, not {b}")));
            }
            (Some(s), _) | (None, Some(s)) => s,
            (None, None) => return Err(Error::InvalidConfig("no scenario given".into())),
        };
        let mut c = ScenarioConfig::defaults(scenario);
        for (n, key, value) in entries {
            c.set(&key, &value).map_err(|e| Error::Parse(format!("line {n}: {e}")))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path, fallback: Option<Scenario>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, fallback)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = value.parse()?,
            "gains" => {
                self.gains = match value {
                    "example" => GainSource::Example,
                    "line" => GainSource::Line,
                    "equal" => GainSource::Equal,
                    path => GainSource::File(PathBuf::from(path)),
                }
            }
            "m" => self.m = num(key, value)?,
            "m_range" => {
                let (lo, hi) = value.split_once("..").ok_or_else(|| Error::Parse(format!("m_range {value}")))?;
                self.m_range = (num(key, lo.trim())?, num(key, hi.trim())?);
            }
            "p_db" => self.p_db = list(value).map(|v| num(key, v)).collect::<Result<_>>()?,
            "protocols" => self.protocols = list(value).map(str::parse).collect::<Result<_>>()?,
            "d_ab" => self.d_ab = num(key, value)?,
            "pathloss_exponent" => self.pathloss_exponent = num(key, value)?,
            "k" => self.k = num(key, value)?,
            "h_ab_sq" => self.h_ab_sq = num(key, value)?,
            "h_sq" => self.h_sq = num(key, value)?,
            "positions" => {
                let parts = value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
                self.positions = Some(parts.map(|v| num(key, v)).collect::<Result<_>>()?)
            }
            "partition" => {
                self.partition = Some(
                    value
                        .split('|')
                        .map(|hop| hop.split_whitespace().map(|v| num(key, v)).collect::<Result<Vec<usize>>>())
                        .collect::<Result<_>>()?,
                )
            }
            "lambda_steps" => self.lambda_steps = num(key, value)?,
            "grid_step" => self.grid_step = num(key, value)?,
            "hull" => self.hull = flag(key, value)?,
            "power_grid" => self.power_grid = flag(key, value)?,
            "exhaustive_order" => self.exhaustive_order = flag(key, value)?,
            "blocks" => self.blocks = num(key, value)?,
            "modulus" => self.modulus = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "p_lo" => self.p_lo = num(key, value)?,
            "p_hi" => self.p_hi = num(key, value)?,
            other => return Err(Error::Parse(format!("unknown key {other}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if let GainSource::File(p) = &self.gains {
            if !p.exists() {
                return Err(Error::InvalidConfig(format!("gain file {} does not exist", p.display())));
            }
        }
        if self.p_db.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidConfig("p_db values must be finite".into()));
        }
        if self.lambda_steps == 0 {
            return Err(Error::InvalidConfig("lambda_steps must be positive".into()));
        }
        let (lo, hi) = self.m_range;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidConfig(format!("m_range {lo}..{hi} must satisfy 1 <= lo <= hi")));
        }
        let n = (1.0 / self.grid_step).round();
        if !(self.grid_step > 0.0 && self.grid_step < 0.5 && (n * self.grid_step - 1.0).abs() < 1e-9) {
            return Err(Error::InvalidConfig(format!("grid_step {} must divide 1 into at least 3 cells", self.grid_step)));
        }
        if self.modulus < 2 {
            return Err(Error::InvalidConfig("modulus must be at least 2".into()));
        }
        Ok(())
    }

    /// Gain matrix for the configured source with `m` relays.
    pub fn gain_matrix(&self, m: usize) -> Result<GainMatrix> {
        match &self.gains {
            GainSource::Example => Ok(example_gains()),
            GainSource::Equal => GainMatrix::equal(m, self.h_sq),
            GainSource::Line => match &self.positions {
                Some(pos) => Geometry::new(pos.clone(), self.pathloss_exponent, self.k, Some(self.h_ab_sq))?.gains(),
                None => line_gains(m, self.d_ab, self.pathloss_exponent, self.k, Some(self.h_ab_sq)),
            },
            GainSource::File(path) => {
                let text = std::fs::read_to_string(path)?;
                if path.extension().is_some_and(|e| e == "json") {
                    GainMatrix::from_json(&text)
                } else {
                    GainMatrix::from_csv(&text)
                }
            }
        }
    }

    pub fn hop_partition(&self, m: usize) -> Result<Option<HopPartition>> {
        self.partition.as_ref().map(|p| HopPartition::new(m, p.clone())).transpose()
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse(format!("{key}: cannot parse {value:?}")))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse(format!("{key}: expected true or false, got {value:?}"))),
    }
}
