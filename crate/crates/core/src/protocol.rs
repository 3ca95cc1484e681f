//! Protocol identifiers and one-call evaluation of their regions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::af::{af_mabc_rates, af_mhmr_rates, af_tdbc_rates};
use crate::channel::GainMatrix;
use crate::df::{
    all_relay_orders, build_mabc_df, build_mabc_df_split, build_mhmr_df_full, build_mhmr_df_general, build_tdbc_df,
    build_tdbc_df_split, enumerate_decode_sets_capped, power_split_grid, DecodeSets, HopPartition, RelayOrder,
    SplitConfig, DECODE_SET_CAP,
};
use crate::error::{Error, Result};
use crate::optimizer::{trace_boundary, BoundaryPoint, RatePair, RegionBoundary, TraceOptions};
use crate::outer::{outer_mabc, outer_mhmr, outer_mhmr_general, outer_tdbc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    DfMabc,
    DfTdbc,
    DfMhmr,
    DfMhmrPartition,
    AfMabc,
    AfTdbc,
    AfMhmr,
    MabcOut,
    TdbcOut,
    MhmrOut,
    MhmrPartitionOut,
    /// Equal-duration evaluation of the chain outer bound (low-SNR tables).
    MhmrOutLower,
    /// Twice the `R_a`-only optimum of the chain outer bound (low-SNR tables).
    MhmrOutUpper,
}

impl Protocol {
    pub const ALL: [Protocol; 13] = [
        Protocol::DfMabc,
        Protocol::DfTdbc,
        Protocol::DfMhmr,
        Protocol::DfMhmrPartition,
        Protocol::AfMabc,
        Protocol::AfTdbc,
        Protocol::AfMhmr,
        Protocol::MabcOut,
        Protocol::TdbcOut,
        Protocol::MhmrOut,
        Protocol::MhmrPartitionOut,
        Protocol::MhmrOutLower,
        Protocol::MhmrOutUpper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::DfMabc => "df-mabc",
            Protocol::DfTdbc => "df-tdbc",
            Protocol::DfMhmr => "df-mhmr",
            Protocol::DfMhmrPartition => "df-mhmr-partition",
            Protocol::AfMabc => "af-mabc",
            Protocol::AfTdbc => "af-tdbc",
            Protocol::AfMhmr => "af-mhmr",
            Protocol::MabcOut => "mabc-out",
            Protocol::TdbcOut => "tdbc-out",
            Protocol::MhmrOut => "mhmr-out",
            Protocol::MhmrPartitionOut => "mhmr-partition-out",
            Protocol::MhmrOutLower => "mhmr-out-lower",
            Protocol::MhmrOutUpper => "mhmr-out-upper",
        }
    }

    pub fn is_df(self) -> bool {
        matches!(self, Protocol::DfMabc | Protocol::DfTdbc | Protocol::DfMhmr | Protocol::DfMhmrPartition)
    }

    pub fn is_af(self) -> bool {
        matches!(self, Protocol::AfMabc | Protocol::AfTdbc | Protocol::AfMhmr)
    }

    pub fn is_outer(self) -> bool {
        !self.is_df() && !self.is_af()
    }

    /// Outer bound for the same temporal protocol.
    pub fn outer(self) -> Option<Protocol> {
        match self {
            Protocol::DfMabc | Protocol::AfMabc => Some(Protocol::MabcOut),
            Protocol::DfTdbc | Protocol::AfTdbc => Some(Protocol::TdbcOut),
            Protocol::DfMhmr | Protocol::AfMhmr => Some(Protocol::MhmrOut),
            Protocol::DfMhmrPartition => Some(Protocol::MhmrPartitionOut),
            _ => None,
        }
    }

    /// Phase count for `m` relays (`partition_len` intermediate hops for the
    /// partition variants).
    pub fn phases(self, m: usize, partition_len: Option<usize>) -> usize {
        match self {
            Protocol::DfMabc | Protocol::AfMabc | Protocol::MabcOut => 2,
            Protocol::DfTdbc | Protocol::AfTdbc | Protocol::TdbcOut => 3,
            Protocol::DfMhmrPartition | Protocol::MhmrPartitionOut => partition_len.unwrap_or(0) + 2,
            _ => m + 2,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::UnknownProtocol(s.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Convex-hull post-processing of traced frontiers.
    pub hull: bool,
    /// Search the broadcast power split on a grid (MABC/TDBC DF).
    pub power_grid: bool,
    /// Try every relay order for the chain protocols (`m <= 6`).
    pub exhaustive_order: bool,
    pub order: Option<RelayOrder>,
    pub partition: Option<HopPartition>,
    /// Explicit decode-set list; otherwise all 4^m are enumerated.
    pub decode_sets: Option<Vec<DecodeSets>>,
    pub decode_cap: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            hull: false,
            power_grid: false,
            exhaustive_order: false,
            order: None,
            partition: None,
            decode_sets: None,
            decode_cap: DECODE_SET_CAP,
        }
    }
}

fn decode_sets(g: &GainMatrix, opts: &EvalOptions) -> Result<Vec<DecodeSets>> {
    match &opts.decode_sets {
        Some(list) => Ok(list.clone()),
        None => enumerate_decode_sets_capped(g.m(), opts.decode_cap),
    }
}

fn orders(g: &GainMatrix, opts: &EvalOptions) -> Result<Vec<RelayOrder>> {
    if opts.exhaustive_order {
        all_relay_orders(g.m())
    } else {
        Ok(vec![opts.order.clone().unwrap_or_else(|| RelayOrder::identity(g.m()))])
    }
}

fn partition(opts: &EvalOptions) -> Result<&HopPartition> {
    opts.partition
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("partition protocols need an explicit hop partition".into()))
}

fn split_configs(sets: &[DecodeSets], grid: bool) -> Vec<SplitConfig> {
    sets.iter()
        .flat_map(|ds| {
            let splits = if grid { power_split_grid(ds) } else { vec![crate::df::PowerSplit::proportional(ds)] };
            splits.into_iter().map(move |split| SplitConfig { sets: *ds, split })
        })
        .collect()
}

/// A single AF operating point, reported at every weight.
fn fixed_point_boundary(protocol: Protocol, rates: RatePair, t: usize, lambdas: &[f64]) -> RegionBoundary {
    let points = lambdas
        .iter()
        .map(|&lambda| BoundaryPoint {
            lambda,
            rates,
            delta: vec![1.0 / t as f64; t],
            objective: rates.weighted(lambda),
            config_index: 0,
            config_id: "fixed".into(),
        })
        .collect();
    RegionBoundary { protocol: protocol.name().into(), t, hull: false, points }
}

/// AF rate pair for the AF protocols.
pub fn af_rates(protocol: Protocol, g: &GainMatrix, p: f64) -> Result<RatePair> {
    match protocol {
        Protocol::AfMabc => af_mabc_rates(g, p),
        Protocol::AfTdbc => af_tdbc_rates(g, p),
        Protocol::AfMhmr => af_mhmr_rates(g, p),
        other => Err(Error::UnknownProtocol(format!("{other} is not an amplify-and-forward protocol"))),
    }
}

/// Traces the frontier of `protocol` on `g` at power `p`.
pub fn region(protocol: Protocol, g: &GainMatrix, p: f64, lambdas: &[f64], opts: &EvalOptions) -> Result<RegionBoundary> {
    let trace = TraceOptions { hull: opts.hull };
    let mut b = match protocol {
        Protocol::DfMabc | Protocol::DfTdbc => {
            let sets = decode_sets(g, opts)?;
            let mabc = protocol == Protocol::DfMabc;
            if opts.power_grid {
                let configs = split_configs(&sets, true);
                trace_boundary(
                    |c: &SplitConfig| {
                        if mabc {
                            build_mabc_df_split(g, p, &c.sets, &c.split)
                        } else {
                            build_tdbc_df_split(g, p, &c.sets, &c.split)
                        }
                    },
                    &configs,
                    lambdas,
                    trace,
                )?
            } else {
                trace_boundary(
                    |ds: &DecodeSets| if mabc { build_mabc_df(g, p, ds) } else { build_tdbc_df(g, p, ds) },
                    &sets,
                    lambdas,
                    trace,
                )?
            }
        }
        Protocol::DfMhmr => trace_boundary(|o: &RelayOrder| build_mhmr_df_full(g, p, o), &orders(g, opts)?, lambdas, trace)?,
        Protocol::DfMhmrPartition => {
            let part = partition(opts)?;
            let t = part.hops.len() + 2;
            trace_boundary(|pt: &HopPartition| build_mhmr_df_general(g, p, pt, t), std::slice::from_ref(part), lambdas, trace)?
        }
        Protocol::AfMabc | Protocol::AfTdbc | Protocol::AfMhmr => {
            let t = protocol.phases(g.m(), None);
            return Ok(fixed_point_boundary(protocol, af_rates(protocol, g, p)?, t, lambdas));
        }
        Protocol::MabcOut => trace_boundary(|_: &Label| outer_mabc(g, p), &[Label("cuts")], lambdas, trace)?,
        Protocol::TdbcOut => trace_boundary(|_: &Label| outer_tdbc(g, p), &[Label("cuts")], lambdas, trace)?,
        Protocol::MhmrOut => trace_boundary(|o: &RelayOrder| outer_mhmr(g, p, o), &orders(g, opts)?, lambdas, trace)?,
        Protocol::MhmrPartitionOut => {
            let part = partition(opts)?;
            let t = part.hops.len() + 2;
            trace_boundary(|pt: &HopPartition| outer_mhmr_general(g, p, pt, t), std::slice::from_ref(part), lambdas, trace)?
        }
        Protocol::MhmrOutLower | Protocol::MhmrOutUpper => {
            return Err(Error::UnknownProtocol(format!("{protocol} is a low-SNR table variant, not a region")))
        }
    };
    b.protocol = protocol.name().into();
    Ok(b)
}

/// Largest `R_a + R_b` over the protocol's region.
pub fn max_sum_rate(protocol: Protocol, g: &GainMatrix, p: f64, opts: &EvalOptions) -> Result<f64> {
    if protocol.is_af() {
        return Ok(af_rates(protocol, g, p)?.sum());
    }
    let b = region(protocol, g, p, &[0.5], &EvalOptions { hull: false, ..opts.clone() })?;
    Ok(2.0 * b.points[0].objective)
}

struct Label(&'static str);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}
