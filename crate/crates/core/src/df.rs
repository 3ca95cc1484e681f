//! Decode-and-forward Gaussian regions as linear constraint sets.
//!
//! Phase numbering follows the protocols: MABC has the terminals transmit in
//! phase 1 and the relays in phase 2; TDBC adds a separate phase for `b`
//! (phase 2) and moves the relay broadcast to phase 3; in the `(m, m+2)`
//! chain node `c_i` transmits in phase `m + 2 - i`, so `b` goes first and `a`
//! last.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{cap, check_power, GainMatrix};
use crate::error::{Error, Result};
use crate::optimizer::{RateConstraintSet, Target};

/// Default cap for 4^m decode-set enumeration.
pub const DECODE_SET_CAP: usize = 8;
/// Exhaustive relay-order search is allowed up to this many relays.
pub const ORDER_SEARCH_CAP: usize = 6;

/// Bitmask over relay indices `1..=63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RelaySet(pub u64);

impl RelaySet {
    pub fn from_relays(relays: &[usize]) -> Self {
        RelaySet(relays.iter().fold(0u64, |acc, r| acc | (1u64 << r)))
    }

    pub fn all(m: usize) -> Self {
        RelaySet(((1u64 << m) - 1) << 1)
    }

    pub fn contains(self, r: usize) -> bool {
        self.0 >> r & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn and(self, o: RelaySet) -> RelaySet {
        RelaySet(self.0 & o.0)
    }

    pub fn or(self, o: RelaySet) -> RelaySet {
        RelaySet(self.0 | o.0)
    }

    pub fn minus(self, o: RelaySet) -> RelaySet {
        RelaySet(self.0 & !o.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (1..64).filter(move |&r| self.contains(r))
    }

    pub fn max_relay(self) -> usize {
        if self.0 == 0 {
            0
        } else {
            63 - self.0.leading_zeros() as usize
        }
    }
}

impl fmt::Display for RelaySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.iter().map(|r| r.to_string()).collect();
        write!(f, "[{}]", v.join(" "))
    }
}

/// Relays that decode `w_a` (set A) and `w_b` (set B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecodeSets {
    pub a: RelaySet,
    pub b: RelaySet,
}

impl DecodeSets {
    pub fn new(m: usize, a: &[usize], b: &[usize]) -> Result<Self> {
        if let Some(r) = a.iter().chain(b).find(|&&r| r == 0 || r > m) {
            return Err(Error::InvalidConfig(format!("relay {r} outside 1..={m}")));
        }
        Ok(DecodeSets { a: RelaySet::from_relays(a), b: RelaySet::from_relays(b) })
    }

    pub fn full(m: usize) -> Self {
        DecodeSets { a: RelaySet::all(m), b: RelaySet::all(m) }
    }

    pub fn both(&self) -> RelaySet {
        self.a.and(self.b)
    }

    pub fn a_only(&self) -> RelaySet {
        self.a.minus(self.b)
    }

    pub fn b_only(&self) -> RelaySet {
        self.b.minus(self.a)
    }

    fn check(&self, m: usize) -> Result<()> {
        if self.a.or(self.b).max_relay() > m || self.a.contains(0) || self.b.contains(0) {
            return Err(Error::InvalidConfig(format!("decode sets {self} exceed m = {m}")));
        }
        Ok(())
    }
}

impl fmt::Display for DecodeSets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}B{}", self.a, self.b)
    }
}

/// Fractions of `P` given to the relays in `A∩B`, `A\B` and `B\A` during
/// the relay broadcast. Each group's power multiplies every member's gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub both: f64,
    pub a_only: f64,
    pub b_only: f64,
}

impl PowerSplit {
    /// `P_X = |X| / |A∪B| · P`.
    pub fn proportional(ds: &DecodeSets) -> Self {
        let n = ds.a.or(ds.b).len();
        if n == 0 {
            return PowerSplit { both: 0.0, a_only: 0.0, b_only: 0.0 };
        }
        let n = n as f64;
        PowerSplit {
            both: ds.both().len() as f64 / n,
            a_only: ds.a_only().len() as f64 / n,
            b_only: ds.b_only().len() as f64 / n,
        }
    }

    fn check(&self) -> Result<()> {
        let parts = [self.both, self.a_only, self.b_only];
        if parts.iter().any(|v| !v.is_finite() || *v < 0.0) || parts.iter().sum::<f64>() > 1.0 + 1e-12 {
            return Err(Error::InvalidConfig(format!("power split {self:?}")));
        }
        Ok(())
    }
}

/// Proportional split plus a 21-point grid on every free ratio among the
/// non-empty groups.
pub fn power_split_grid(ds: &DecodeSets) -> Vec<PowerSplit> {
    let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let groups = [!ds.both().is_empty(), !ds.a_only().is_empty(), !ds.b_only().is_empty()];
    let live: Vec<usize> = (0..3).filter(|&k| groups[k]).collect();
    let mut out = vec![PowerSplit::proportional(ds)];
    let mk = |f: [f64; 3]| PowerSplit { both: f[0], a_only: f[1], b_only: f[2] };
    match live.len() {
        2 => {
            for &x in &grid {
                let mut f = [0.0; 3];
                f[live[0]] = x;
                f[live[1]] = 1.0 - x;
                out.push(mk(f));
            }
        }
        3 => {
            for &x in &grid {
                for &y in &grid {
                    out.push(mk([x, (1.0 - x) * y, (1.0 - x) * (1.0 - y)]));
                }
            }
        }
        _ => {}
    }
    let mut uniq: Vec<PowerSplit> = Vec::with_capacity(out.len());
    for s in out {
        if !uniq.contains(&s) {
            uniq.push(s);
        }
    }
    uniq
}

/// A decode-set assignment together with a broadcast power split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub sets: DecodeSets,
    pub split: PowerSplit,
}

impl fmt::Display for SplitConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:.3}/{:.3}/{:.3}", self.sets, self.split.both, self.split.a_only, self.split.b_only)
    }
}

/// Ordered intermediate hops `R_1..R_{t-2}` of the `(m, t)` protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopPartition {
    pub hops: Vec<Vec<usize>>,
}

impl HopPartition {
    pub fn new(m: usize, hops: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; m + 1];
        for h in &hops {
            if h.is_empty() {
                return Err(Error::InvalidConfig("empty hop in partition".into()));
            }
            for &r in h {
                if r == 0 || r > m {
                    return Err(Error::InvalidConfig(format!("relay {r} outside 1..={m}")));
                }
                if std::mem::replace(&mut seen[r], true) {
                    return Err(Error::InvalidConfig(format!("relay {r} appears in two hops")));
                }
            }
        }
        Ok(HopPartition { hops })
    }

    /// Consecutive relays grouped `m / hops` at a time.
    pub fn regular(m: usize, hops: usize) -> Result<Self> {
        if hops == 0 || m % hops != 0 {
            return Err(Error::InvalidConfig(format!("{m} relays do not split evenly into {hops} hops")));
        }
        let size = m / hops;
        Self::new(m, (0..hops).map(|h| (h * size + 1..=(h + 1) * size).collect()).collect())
    }
}

impl fmt::Display for HopPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hops: Vec<String> = self
            .hops
            .iter()
            .map(|h| h.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "hops[{}]", hops.join("|"))
    }
}

/// Relay order `r_1..r_m` of the `(m, m+2)` chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelayOrder {
    pub order: Vec<usize>,
}

impl RelayOrder {
    pub fn new(m: usize, order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; m + 1];
        if order.len() != m || order.iter().any(|&r| r == 0 || r > m || std::mem::replace(&mut seen[r], true)) {
            return Err(Error::InvalidConfig(format!("{order:?} is not a permutation of 1..={m}")));
        }
        Ok(RelayOrder { order })
    }

    pub fn identity(m: usize) -> Self {
        RelayOrder { order: (1..=m).collect() }
    }

    /// Node index of chain position `i` (0 = a, m+1 = b).
    fn node(&self, i: usize) -> usize {
        let m = self.order.len();
        if i == 0 {
            0
        } else if i == m + 1 {
            m + 1
        } else {
            self.order[i - 1]
        }
    }
}

impl fmt::Display for RelayOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.order.iter().map(|r| r.to_string()).collect();
        write!(f, "order[{}]", v.join(" "))
    }
}

/// Every permutation of the relays, for `m <= ORDER_SEARCH_CAP`.
pub fn all_relay_orders(m: usize) -> Result<Vec<RelayOrder>> {
    if m > ORDER_SEARCH_CAP {
        return Err(Error::EnumerationLimit { what: "relay orders", m, cap: ORDER_SEARCH_CAP });
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=m).collect();
    permute(&mut cur, 0, &mut out);
    out.sort();
    Ok(out.into_iter().map(|order| RelayOrder { order }).collect())
}

fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

/// All 4^m assignments of relays to {neither, A only, B only, both}.
pub fn enumerate_decode_sets(m: usize) -> Result<Vec<DecodeSets>> {
    enumerate_decode_sets_capped(m, DECODE_SET_CAP)
}

pub fn enumerate_decode_sets_capped(m: usize, cap: usize) -> Result<Vec<DecodeSets>> {
    if m > cap || m > 31 {
        return Err(Error::EnumerationLimit { what: "decode sets", m, cap });
    }
    let total = 1u64 << (2 * m);
    Ok((0..total)
        .map(|code| {
            let mut a = 0u64;
            let mut b = 0u64;
            for r in 1..=m {
                let role = code >> (2 * (r - 1)) & 3;
                if role & 1 == 1 {
                    a |= 1 << r;
                }
                if role & 2 == 2 {
                    b |= 1 << r;
                }
            }
            DecodeSets { a: RelaySet(a), b: RelaySet(b) }
        })
        .collect())
}

fn min_over(set: RelaySet, f: impl Fn(usize) -> f64) -> Option<f64> {
    set.iter().map(f).reduce(f64::min)
}

// Relay broadcast SNR toward `dest` from the groups carrying that direction.
fn broadcast_snr(g: &GainMatrix, p: f64, ds: &DecodeSets, split: &PowerSplit, dest: usize, toward_b: bool) -> f64 {
    let (own, own_power) = if toward_b { (ds.a_only(), split.a_only) } else { (ds.b_only(), split.b_only) };
    let both: f64 = ds.both().iter().map(|r| g.get(r, dest)).sum();
    let own: f64 = own.iter().map(|r| g.get(r, dest)).sum();
    both * split.both * p + own * own_power * p
}

/// `(m, 2)` DF MABC with the proportional broadcast power split.
pub fn build_mabc_df(g: &GainMatrix, p: f64, ds: &DecodeSets) -> Result<RateConstraintSet> {
    build_mabc_df_split(g, p, ds, &PowerSplit::proportional(ds))
}

pub fn build_mabc_df_split(g: &GainMatrix, p: f64, ds: &DecodeSets, split: &PowerSplit) -> Result<RateConstraintSet> {
    check_power(p)?;
    ds.check(g.m())?;
    split.check()?;
    let (a, b) = (0, g.b());
    let mut cs = RateConstraintSet::new(2);

    if let Some(c) = min_over(ds.both(), |r| cap(p / 2.0 * g.get(a, r))) {
        cs.push_single(Target::Ra, 1, c);
    }
    if let Some(c) = min_over(ds.a_only(), |r| cap(p * g.get(a, r) / (p * g.get(b, r) + 2.0))) {
        cs.push_single(Target::Ra, 1, c);
    }
    cs.push_single(Target::Ra, 2, cap(broadcast_snr(g, p, ds, split, b, true)));

    if let Some(c) = min_over(ds.both(), |r| cap(p / 2.0 * g.get(b, r))) {
        cs.push_single(Target::Rb, 1, c);
    }
    if let Some(c) = min_over(ds.b_only(), |r| cap(p * g.get(b, r) / (p * g.get(a, r) + 2.0))) {
        cs.push_single(Target::Rb, 1, c);
    }
    cs.push_single(Target::Rb, 2, cap(broadcast_snr(g, p, ds, split, a, false)));

    if let Some(c) = min_over(ds.both(), |r| cap(p / 2.0 * (g.get(a, r) + g.get(b, r)))) {
        cs.push_single(Target::Sum, 1, c);
    }
    Ok(cs)
}

/// `(m, 3)` DF TDBC with the proportional broadcast power split. There is
/// no sum-rate row.
pub fn build_tdbc_df(g: &GainMatrix, p: f64, ds: &DecodeSets) -> Result<RateConstraintSet> {
    build_tdbc_df_split(g, p, ds, &PowerSplit::proportional(ds))
}

pub fn build_tdbc_df_split(g: &GainMatrix, p: f64, ds: &DecodeSets, split: &PowerSplit) -> Result<RateConstraintSet> {
    check_power(p)?;
    ds.check(g.m())?;
    split.check()?;
    let (a, b) = (0, g.b());
    let direct = cap(p * g.get(a, b));
    let mut cs = RateConstraintSet::new(3);

    if let Some(c) = min_over(ds.a, |r| cap(p * g.get(a, r))) {
        cs.push_single(Target::Ra, 1, c);
    }
    cs.push(Target::Ra, vec![direct, 0.0, cap(broadcast_snr(g, p, ds, split, b, true))]);

    if let Some(c) = min_over(ds.b, |r| cap(p * g.get(b, r))) {
        cs.push_single(Target::Rb, 2, c);
    }
    cs.push(Target::Rb, vec![0.0, direct, cap(broadcast_snr(g, p, ds, split, a, false))]);
    Ok(cs)
}

/// `(m, m+2)` DF MHMR along the given relay order.
pub fn build_mhmr_df_full(g: &GainMatrix, p: f64, order: &RelayOrder) -> Result<RateConstraintSet> {
    check_power(p)?;
    let m = g.m();
    if m == 0 {
        return Err(Error::ProtocolUndefined("the relay chain needs m >= 1".into()));
    }
    let order = RelayOrder::new(m, order.order.clone())?;
    let t = m + 2;
    let c = |i: usize| order.node(i);
    let mut cs = RateConstraintSet::new(t);
    for k in 1..=m + 1 {
        let mut coeff = vec![0.0; t];
        for i in 1..=k {
            coeff[m + 3 - i - 1] += cap(p * g.get(c(i - 1), c(k)));
        }
        cs.push(Target::Ra, coeff);
    }
    for k in 1..=m + 1 {
        let mut coeff = vec![0.0; t];
        for i in 1..=k {
            coeff[i - 1] += cap(p * g.get(c(m + 2 - i), c(m + 1 - k)));
        }
        cs.push(Target::Rb, coeff);
    }
    Ok(cs)
}

/// Hop sets `H_0 = {a}, H_1..H_{t-2}, H_{t-1} = {b}` as node indices.
pub(crate) fn hop_sets(m: usize, part: &HopPartition, t: usize) -> Result<Vec<Vec<usize>>> {
    if !(t > 3 && t < m + 2) {
        return Err(Error::PhaseCount { t, m });
    }
    let part = HopPartition::new(m, part.hops.clone())?;
    if part.hops.len() != t - 2 {
        return Err(Error::InvalidConfig(format!(
            "a {t}-phase protocol needs {} intermediate hops, got {}",
            t - 2,
            part.hops.len()
        )));
    }
    let mut h = vec![vec![0]];
    h.extend(part.hops);
    h.push(vec![m + 1]);
    Ok(h)
}

/// `(m, t)` DF MHMR: hop `H_j` transmits in phase `t - j` with power `P` per
/// transmitter; one row per (hop, receiver) pair.
pub fn build_mhmr_df_general(g: &GainMatrix, p: f64, part: &HopPartition, t: usize) -> Result<RateConstraintSet> {
    check_power(p)?;
    let h = hop_sets(g.m(), part, t)?;
    let incoming = |from: &[usize], r: usize| cap(p * from.iter().map(|&s| g.get(s, r)).sum::<f64>());
    let mut cs = RateConstraintSet::new(t);
    for k in 1..t {
        for &r in &h[k] {
            let mut coeff = vec![0.0; t];
            for i in 1..=k {
                coeff[t + 1 - i - 1] += incoming(&h[i - 1], r);
            }
            cs.push(Target::Ra, coeff);
        }
    }
    for k in 1..t {
        for &r in &h[t - 1 - k] {
            let mut coeff = vec![0.0; t];
            for i in 1..=k {
                coeff[i - 1] += incoming(&h[t - i], r);
            }
            cs.push(Target::Rb, coeff);
        }
    }
    Ok(cs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::example_gains;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_decode_sets(1).unwrap().len(), 4);
        let sets = enumerate_decode_sets(2).unwrap();
        assert_eq!(sets.len(), 16);
        for want in [
            DecodeSets::new(2, &[1, 2], &[1, 2]).unwrap(),
            DecodeSets::new(2, &[1], &[2]).unwrap(),
            DecodeSets::new(2, &[2], &[1]).unwrap(),
        ] {
            assert!(sets.contains(&want));
        }
        assert!(matches!(enumerate_decode_sets(9), Err(Error::EnumerationLimit { .. })));
    }

    #[test]
    fn empty_sets_zero_mabc() {
        let g = example_gains();
        let cs = build_mabc_df(&g, 1.0, &DecodeSets::new(2, &[], &[]).unwrap()).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.constraints.iter().all(|c| c.coeff.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn empty_sets_tdbc_direct_only() {
        let g = example_gains();
        let cs = build_tdbc_df(&g, 1.0, &DecodeSets::new(2, &[], &[]).unwrap()).unwrap();
        assert_eq!(cs.len(), 2);
        let direct = (1.0f64 + 0.04).log2();
        assert!((cs.constraints[0].coeff[0] - direct).abs() < 1e-15);
        assert_eq!(cs.constraints[0].coeff[2], 0.0);
    }

    #[test]
    fn mhmr_first_row() {
        let g = example_gains();
        let cs = build_mhmr_df_full(&g, 1.0, &RelayOrder::identity(2)).unwrap();
        assert_eq!(cs.len(), 6);
        let first = &cs.constraints[0];
        assert_eq!(first.target, Target::Ra);
        assert_eq!(first.coeff[..3], [0.0, 0.0, 0.0]);
        assert!((first.coeff[3] - (1.0f64 + 1.44).log2()).abs() < 1e-15);
    }

    #[test]
    fn general_range_checks() {
        let g = crate::channel::line_gains(4, 1.0, 3.8, 1.0, None).unwrap();
        let part = HopPartition::new(4, vec![vec![1, 2], vec![3, 4]]).unwrap();
        assert!(build_mhmr_df_general(&g, 1.0, &part, 4).is_ok());
        assert!(matches!(build_mhmr_df_general(&g, 1.0, &part, 3), Err(Error::PhaseCount { .. })));
        assert!(matches!(build_mhmr_df_general(&g, 1.0, &part, 6), Err(Error::PhaseCount { .. })));
        assert!(build_mhmr_df_general(&g, 1.0, &part, 5).is_err());
        assert!(HopPartition::new(4, vec![vec![1], vec![1]]).is_err());
    }

    #[test]
    fn regular_partition() {
        let p = HopPartition::regular(8, 4).unwrap();
        assert_eq!(p.hops, vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8]]);
        assert!(HopPartition::regular(8, 3).is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(all_relay_orders(3).unwrap().len(), 6);
        assert!(all_relay_orders(7).is_err());
        assert!(RelayOrder::new(3, vec![1, 2, 2]).is_err());
    }

    #[test]
    fn split_grid_contains_proportional() {
        let ds = DecodeSets::new(3, &[1, 2], &[1, 3]).unwrap();
        let grid = power_split_grid(&ds);
        assert_eq!(grid[0], PowerSplit::proportional(&ds));
        assert!(grid.len() > 21);
        let ds = DecodeSets::new(2, &[1, 2], &[1, 2]).unwrap();
        assert_eq!(power_split_grid(&ds).len(), 1);
    }
}
