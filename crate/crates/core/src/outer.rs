//! Cut-set outer bounds. Every relay subset `S` contributes one row per
//! rate: for `R_a` the cut puts `S ∪ {a}` on the source side and the
//! remaining relays with `b` on the sink side (mirrored for `R_b`). The
//! minimum over cuts is realized by intersecting the rows.

use crate::channel::{cap, check_power, GainMatrix};
use crate::df::{hop_sets, HopPartition, RelayOrder, RelaySet};
use crate::error::{Error, Result};
use crate::optimizer::{RateConstraintSet, Target};

/// Largest `m` for which all 2^m cuts are enumerated.
pub const OUTER_CUT_CAP: usize = 12;

/// Every subset of `1..=m`, for `m <= OUTER_CUT_CAP`.
pub fn all_cuts(m: usize) -> Result<Vec<RelaySet>> {
    if m > OUTER_CUT_CAP {
        return Err(Error::EnumerationLimit { what: "cut subsets", m, cap: OUTER_CUT_CAP });
    }
    Ok((0..1u64 << m).map(|s| RelaySet(s << 1)).collect())
}

fn check_cuts(m: usize, cuts: &[RelaySet]) -> Result<()> {
    match cuts.iter().find(|s| s.max_relay() > m || s.contains(0)) {
        Some(s) => Err(Error::InvalidConfig(format!("cut {s} exceeds m = {m}"))),
        None => Ok(()),
    }
}

pub fn outer_mabc(g: &GainMatrix, p: f64) -> Result<RateConstraintSet> {
    outer_mabc_cuts(g, p, &all_cuts(g.m())?)
}

pub fn outer_mabc_cuts(g: &GainMatrix, p: f64, cuts: &[RelaySet]) -> Result<RateConstraintSet> {
    check_power(p)?;
    check_cuts(g.m(), cuts)?;
    let (a, b) = (0, g.b());
    let all = RelaySet::all(g.m());
    let sum = |set: RelaySet, node: usize| set.iter().map(|r| g.get(node, r)).sum::<f64>();
    let mut cs = RateConstraintSet::new(2);
    for &s in cuts {
        let sbar = all.minus(s);
        cs.push(Target::Ra, vec![cap(p / 2.0 * sum(sbar, a)), cap(p * sum(s, b))]);
        cs.push(Target::Rb, vec![cap(p / 2.0 * sum(sbar, b)), cap(p * sum(s, a))]);
    }
    Ok(cs)
}

pub fn outer_tdbc(g: &GainMatrix, p: f64) -> Result<RateConstraintSet> {
    outer_tdbc_cuts(g, p, &all_cuts(g.m())?)
}

pub fn outer_tdbc_cuts(g: &GainMatrix, p: f64, cuts: &[RelaySet]) -> Result<RateConstraintSet> {
    check_power(p)?;
    check_cuts(g.m(), cuts)?;
    let (a, b) = (0, g.b());
    let all = RelaySet::all(g.m());
    let direct = g.get(a, b);
    let sum = |set: RelaySet, node: usize| set.iter().map(|r| g.get(node, r)).sum::<f64>();
    let mut cs = RateConstraintSet::new(3);
    for &s in cuts {
        let sbar = all.minus(s);
        cs.push(Target::Ra, vec![cap(p * (sum(sbar, a) + direct)), 0.0, cap(p * sum(s, b))]);
        cs.push(Target::Rb, vec![0.0, cap(p * (sum(sbar, b) + direct)), cap(p * sum(s, a))]);
    }
    Ok(cs)
}

pub fn outer_mhmr(g: &GainMatrix, p: f64, order: &RelayOrder) -> Result<RateConstraintSet> {
    outer_mhmr_cuts(g, p, order, &all_cuts(g.m())?)
}

/// Cuts here are sets of chain positions `1..=m` (after applying `order`).
pub fn outer_mhmr_cuts(g: &GainMatrix, p: f64, order: &RelayOrder, cuts: &[RelaySet]) -> Result<RateConstraintSet> {
    check_power(p)?;
    let m = g.m();
    if m == 0 {
        return Err(Error::ProtocolUndefined("the relay chain needs m >= 1".into()));
    }
    check_cuts(m, cuts)?;
    let chain = g.reordered(&RelayOrder::new(m, order.order.clone())?.order)?;
    let t = m + 2;
    let all = RelaySet::all(m);
    let mut cs = RateConstraintSet::new(t);
    for &s in cuts {
        let sbar = all.minus(s);
        // Transmitters on the source side, receivers on the sink side.
        let row = |tx: Vec<usize>, rx: Vec<usize>| {
            let mut coeff = vec![0.0; t];
            for &i in &tx {
                let snr: f64 = rx.iter().map(|&j| chain.get(i, j)).sum::<f64>() * p;
                coeff[m + 2 - i - 1] += cap(snr);
            }
            coeff
        };
        let with = |set: RelaySet, node: usize| std::iter::once(node).chain(set.iter()).collect::<Vec<_>>();
        cs.push(Target::Ra, row(with(s, 0), with(sbar, m + 1)));
        cs.push(Target::Rb, row(with(s, m + 1), with(sbar, 0)));
    }
    Ok(cs)
}

pub fn outer_mhmr_general(g: &GainMatrix, p: f64, part: &HopPartition, t: usize) -> Result<RateConstraintSet> {
    outer_mhmr_general_cuts(g, p, part, t, &all_cuts(g.m())?)
}

/// Independent-input specialization: in the phase of hop `H_i`, the
/// transmitters of `H_i` on the source side send with power `P` each to the
/// sink-side receivers outside `H_i`; sink-side members of `H_i` are
/// conditioned on and contribute nothing.
pub fn outer_mhmr_general_cuts(
    g: &GainMatrix,
    p: f64,
    part: &HopPartition,
    t: usize,
    cuts: &[RelaySet],
) -> Result<RateConstraintSet> {
    check_power(p)?;
    let m = g.m();
    let h = hop_sets(m, part, t)?;
    check_cuts(m, cuts)?;
    let all = RelaySet::all(m);
    let mut cs = RateConstraintSet::new(t);
    for &s in cuts {
        let sbar = all.minus(s);
        let row = |source: usize, sink: usize, source_side: RelaySet, sink_side: RelaySet| {
            let mut coeff = vec![0.0; t];
            for (i, hop) in h.iter().enumerate() {
                let tx: Vec<usize> = hop.iter().copied().filter(|&n| n == source || source_side.contains(n)).collect();
                let rx: Vec<usize> = sink_side.iter().filter(|r| !hop.contains(r)).chain(std::iter::once(sink)).collect();
                let snr: f64 = tx.iter().flat_map(|&x| rx.iter().map(move |&y| (x, y))).map(|(x, y)| g.get(x, y)).sum::<f64>() * p;
                coeff[t - i - 1] += cap(snr);
            }
            coeff
        };
        cs.push(Target::Ra, row(0, m + 1, s, sbar));
        cs.push(Target::Rb, row(m + 1, 0, s, sbar));
    }
    Ok(cs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::example_gains;

    #[test]
    fn extreme_cuts_mabc() {
        let g = example_gains();
        let cs = outer_mabc(&g, 1.0).unwrap();
        assert_eq!(cs.len(), 8);
        // S = ∅ is the first cut.
        let ra = &cs.constraints[0];
        assert!((ra.coeff[0] - (1.0f64 + 0.5 * (1.44 + 0.64)).log2()).abs() < 1e-15);
        assert_eq!(ra.coeff[1], 0.0);
        // S = all is the last cut.
        let ra = &cs.constraints[6];
        assert_eq!(ra.coeff[0], 0.0);
        assert!((ra.coeff[1] - (1.0f64 + 0.64 + 1.44).log2()).abs() < 1e-15);
    }

    #[test]
    fn extreme_cuts_tdbc() {
        let g = example_gains();
        let cs = outer_tdbc(&g, 1.0).unwrap();
        let all = &cs.constraints[6];
        assert!((all.coeff[0] - (1.04f64).log2()).abs() < 1e-15);
        assert!((all.coeff[2] - (1.0f64 + 0.64 + 1.44).log2()).abs() < 1e-15);
    }

    #[test]
    fn mhmr_empty_cut_only_a() {
        let g = example_gains();
        let cs = outer_mhmr(&g, 1.0, &RelayOrder::identity(2)).unwrap();
        let ra = &cs.constraints[0];
        assert_eq!(ra.coeff[..3], [0.0, 0.0, 0.0]);
        assert!((ra.coeff[3] - (1.0f64 + 1.44 + 0.64 + 0.04).log2()).abs() < 1e-15);
    }

    #[test]
    fn caps() {
        let g = GainMatrix::equal(13, 1.0).unwrap();
        assert!(matches!(outer_mabc(&g, 1.0), Err(Error::EnumerationLimit { .. })));
        let cuts = [RelaySet::from_relays(&[1, 2])];
        assert_eq!(outer_mabc_cuts(&g, 1.0, &cuts).unwrap().len(), 2);
    }

    #[test]
    fn general_all_relays_cut() {
        // With every relay on the sink side only terminal transmissions cross the cut.
        let g = crate::channel::line_gains(4, 1.0, 3.8, 1.0, None).unwrap();
        let part = HopPartition::new(4, vec![vec![1, 2], vec![3, 4]]).unwrap();
        let cs = outer_mhmr_general_cuts(&g, 1.0, &part, 4, &[RelaySet(0)]).unwrap();
        let ra = &cs.constraints[0];
        let want: f64 = (1..=5).map(|j| g.get(0, j)).sum();
        assert!((ra.coeff[3] - (1.0 + want).log2()).abs() < 1e-12);
        assert_eq!(ra.coeff[..3], [0.0, 0.0, 0.0]);
    }
}
