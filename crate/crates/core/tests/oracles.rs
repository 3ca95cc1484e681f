//! Frozen values checked against independent scalar evaluations.

use bidir_relay::af::{af_mabc_rates, af_mhmr_effective_gains, af_mhmr_rates, af_tdbc_rates};
use bidir_relay::channel::example_gains;
use bidir_relay::df::{
    build_mabc_df, build_mhmr_df_full, build_mhmr_df_general, build_tdbc_df, DecodeSets, HopPartition, RelayOrder,
};
use bidir_relay::outer::{outer_mabc, outer_mhmr, outer_mhmr_general, outer_tdbc};
use bidir_relay::schedule::{phase_count, run_schedule, verify_delivery};
use bidir_relay::{GainMatrix, RateConstraintSet};

fn c(x: f64) -> f64 {
    (1.0 + x).log2()
}

fn close(got: f64, want: f64, what: &str) {
    assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{what}: got {got}, want {want}");
}

fn check_bounds(cs: &RateConstraintSet, delta: &[f64], ra: f64, rb: f64, sum: f64) {
    let b = cs.bounds_at(delta);
    close(b.ra, ra, "R_a bound");
    close(b.rb, rb, "R_b bound");
    if sum.is_infinite() {
        assert!(b.sum.is_infinite(), "unexpected sum row: {}", b.sum);
    } else {
        close(b.sum, sum, "sum bound");
    }
}

// Example network, squared: a-r1 1.44, a-r2 0.64, a-b 0.04, r1-r2 4, r1-b 0.64, r2-b 1.44.
const AR1: f64 = 1.44;
const AR2: f64 = 0.64;
const AB: f64 = 0.04;
const R12: f64 = 4.0;
const R1B: f64 = 0.64;
const R2B: f64 = 1.44;

#[test]
fn example_gains_are_squared_magnitudes() {
    let g = example_gains();
    for (i, j, v) in [(0, 1, AR1), (0, 2, AR2), (0, 3, AB), (1, 2, R12), (1, 3, R1B), (2, 3, R2B)] {
        close(g.get(i, j), v, "gain");
        close(g.get(j, i), v, "gain");
    }
}

#[test]
fn df_mabc_both_relays_decode_both() {
    let p = 1.0;
    let cs = build_mabc_df(&example_gains(), p, &DecodeSets::new(2, &[1, 2], &[1, 2]).unwrap()).unwrap();
    // Both relays in A∩B, so the broadcast group gets all of P.
    let ra = (0.5 * c(p / 2.0 * AR1).min(c(p / 2.0 * AR2))).min(0.5 * c(p * (R1B + R2B)));
    let rb = (0.5 * c(p / 2.0 * R1B).min(c(p / 2.0 * R2B))).min(0.5 * c(p * (AR1 + AR2)));
    let sum = 0.5 * c(p / 2.0 * (AR1 + R1B)).min(c(p / 2.0 * (AR2 + R2B)));
    check_bounds(&cs, &[0.5, 0.5], ra, rb, sum);
}

#[test]
fn df_mabc_split_sets() {
    let p = 1.0;
    // r1 decodes a only, r2 decodes b only; each group gets half the power.
    let cs = build_mabc_df(&example_gains(), p, &DecodeSets::new(2, &[1], &[2]).unwrap()).unwrap();
    let d = [0.4, 0.6];
    let ra = (d[0] * c(p * AR1 / (p * R1B + 2.0))).min(d[1] * c(R1B * p / 2.0));
    let rb = (d[0] * c(p * R2B / (p * AR2 + 2.0))).min(d[1] * c(AR2 * p / 2.0));
    check_bounds(&cs, &d, ra, rb, f64::INFINITY);
}

#[test]
fn df_tdbc_split_sets() {
    let p = 1.0;
    let cs = build_tdbc_df(&example_gains(), p, &DecodeSets::new(2, &[1], &[2]).unwrap()).unwrap();
    let d = [1.0 / 3.0; 3];
    let ra = (d[0] * c(p * AR1)).min(d[0] * c(p * AB) + d[2] * c(R1B * p / 2.0));
    let rb = (d[1] * c(p * R2B)).min(d[1] * c(p * AB) + d[2] * c(AR2 * p / 2.0));
    check_bounds(&cs, &d, ra, rb, f64::INFINITY);
}

#[test]
fn df_mhmr_identity_order() {
    let p = 1.0;
    let cs = build_mhmr_df_full(&example_gains(), p, &RelayOrder::identity(2)).unwrap();
    assert_eq!(cs.len(), 6);
    // Uneven durations so every phase index matters. a sends in phase 4, r1 in 3, r2 in 2, b in 1.
    let d = [0.1, 0.2, 0.3, 0.4];
    let ra = [
        d[3] * c(p * AR1),
        d[3] * c(p * AR2) + d[2] * c(p * R12),
        d[3] * c(p * AB) + d[2] * c(p * R1B) + d[1] * c(p * R2B),
    ];
    let rb = [
        d[0] * c(p * R2B),
        d[0] * c(p * R1B) + d[1] * c(p * R12),
        d[0] * c(p * AB) + d[1] * c(p * AR2) + d[2] * c(p * AR1),
    ];
    let min = |v: [f64; 3]| v.into_iter().fold(f64::INFINITY, f64::min);
    check_bounds(&cs, &d, min(ra), min(rb), f64::INFINITY);

    let u = [0.25; 4];
    check_bounds(&cs, &u, c(p * AR1) / 4.0, c(p * R2B) / 4.0, f64::INFINITY);
}

fn random_gains(m: usize, seed: u64) -> GainMatrix {
    // Small LCG so the matrix is fixed without a dependency on rand's stream.
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        0.1 + 3.9 * ((s >> 11) as f64 / (1u64 << 53) as f64)
    };
    let n = m + 2;
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = next();
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    GainMatrix::new(m, g).unwrap()
}

#[test]
fn df_mhmr_general_partition() {
    let g = random_gains(4, 7);
    let p = 3.0;
    let hops = vec![vec![2, 4], vec![1, 3]];
    let part = HopPartition::new(4, hops.clone()).unwrap();
    let cs = build_mhmr_df_general(&g, p, &part, 4).unwrap();
    let d = [0.15, 0.25, 0.35, 0.25];
    // H_0 = {a}, H_1 = {2, 4}, H_2 = {1, 3}, H_3 = {b}; hop j sends in phase 4 - j.
    let h: Vec<Vec<usize>> = vec![vec![0], hops[0].clone(), hops[1].clone(), vec![5]];
    let into = |from: &[usize], r: usize| c(p * from.iter().map(|&s| g.get(s, r)).sum::<f64>());
    let mut ra = f64::INFINITY;
    let mut rb = f64::INFINITY;
    for k in 1..4 {
        for &r in &h[k] {
            let v: f64 = (1..=k).map(|i| d[4 - i] * into(&h[i - 1], r)).sum();
            ra = ra.min(v);
        }
        for &r in &h[3 - k] {
            let v: f64 = (1..=k).map(|i| d[i - 1] * into(&h[4 - i], r)).sum();
            rb = rb.min(v);
        }
    }
    check_bounds(&cs, &d, ra, rb, f64::INFINITY);
}

// Cuts listed as relay sets on the source side.
const CUTS2: [&[usize]; 4] = [&[], &[1], &[2], &[1, 2]];

fn others(s: &[usize]) -> Vec<usize> {
    [1, 2].into_iter().filter(|r| !s.contains(r)).collect()
}

#[test]
fn outer_mabc_all_cuts() {
    let g = example_gains();
    let p = 1.0;
    let d = [0.5, 0.5];
    let sum_to = |set: &[usize], node: usize| set.iter().map(|&r| g.get(r, node)).sum::<f64>();
    let mut ra = f64::INFINITY;
    let mut rb = f64::INFINITY;
    for s in CUTS2 {
        let sbar = others(s);
        ra = ra.min(d[0] * c(p / 2.0 * sum_to(&sbar, 0)) + d[1] * c(p * sum_to(s, 3)));
        rb = rb.min(d[0] * c(p / 2.0 * sum_to(&sbar, 3)) + d[1] * c(p * sum_to(s, 0)));
    }
    // Hand values for two of the cuts.
    close(d[0] * c(0.5 * (AR1 + AR2)), 0.5 * c(1.04), "empty cut");
    close(d[0] * c(0.5 * AR2) + d[1] * c(R1B), 0.5 * (c(0.32) + c(0.64)), "cut {1}");
    check_bounds(&outer_mabc(&g, p).unwrap(), &d, ra, rb, f64::INFINITY);
}

#[test]
fn outer_tdbc_all_cuts() {
    let g = example_gains();
    let p = 1.0;
    let d = [0.3, 0.3, 0.4];
    let sum_to = |set: &[usize], node: usize| set.iter().map(|&r| g.get(r, node)).sum::<f64>();
    let mut ra = f64::INFINITY;
    let mut rb = f64::INFINITY;
    for s in CUTS2 {
        let sbar = others(s);
        ra = ra.min(d[0] * c(p * (sum_to(&sbar, 0) + AB)) + d[2] * c(p * sum_to(s, 3)));
        rb = rb.min(d[1] * c(p * (sum_to(&sbar, 3) + AB)) + d[2] * c(p * sum_to(s, 0)));
    }
    check_bounds(&outer_tdbc(&g, p).unwrap(), &d, ra, rb, f64::INFINITY);
}

#[test]
fn outer_mhmr_all_cuts() {
    let g = example_gains();
    let p = 1.0;
    let d = [0.1, 0.2, 0.3, 0.4];
    // Node i (a = 0, relays 1..2, b = 3) sends in phase 4 - i.
    let phase = |i: usize| 4 - i;
    let across = |tx: &[usize], rx: &[usize]| -> f64 {
        tx.iter()
            .map(|&i| d[phase(i) - 1] * c(p * rx.iter().map(|&j| g.get(i, j)).sum::<f64>()))
            .sum()
    };
    let mut ra = f64::INFINITY;
    let mut rb = f64::INFINITY;
    for s in CUTS2 {
        let sbar = others(s);
        let with = |v: &[usize], n: usize| std::iter::once(n).chain(v.iter().copied()).collect::<Vec<_>>();
        ra = ra.min(across(&with(s, 0), &with(&sbar, 3)));
        rb = rb.min(across(&with(s, 3), &with(&sbar, 0)));
    }
    check_bounds(&outer_mhmr(&g, p, &RelayOrder::identity(2)).unwrap(), &d, ra, rb, f64::INFINITY);
}

#[test]
fn outer_mhmr_general_partition() {
    let g = random_gains(4, 11);
    let p = 2.0;
    let hops = vec![vec![3], vec![1, 2, 4]];
    let cs = outer_mhmr_general(&g, p, &HopPartition::new(4, hops.clone()).unwrap(), 4).unwrap();
    let d = [0.2, 0.3, 0.1, 0.4];
    let h: Vec<Vec<usize>> = vec![vec![0], hops[0].clone(), hops[1].clone(), vec![5]];
    let value = |src: usize, sink: usize, side: &[usize]| -> f64 {
        let far: Vec<usize> = (1..=4).filter(|r| !side.contains(r)).collect();
        let mut v = 0.0;
        for (i, hop) in h.iter().enumerate() {
            let tx: Vec<usize> = hop.iter().copied().filter(|&n| n == src || side.contains(&n)).collect();
            let mut rx: Vec<usize> = far.iter().copied().filter(|r| !hop.contains(r)).collect();
            rx.push(sink);
            let snr: f64 = tx.iter().map(|&x| rx.iter().map(|&y| g.get(x, y)).sum::<f64>()).sum::<f64>() * p;
            v += d[4 - i - 1] * c(snr);
        }
        v
    };
    let mut ra = f64::INFINITY;
    let mut rb = f64::INFINITY;
    for mask in 0u32..16 {
        let side: Vec<usize> = (1..=4).filter(|r| mask & (1 << (r - 1)) != 0).collect();
        ra = ra.min(value(0, 5, &side));
        rb = rb.min(value(5, 0, &side));
    }
    check_bounds(&cs, &d, ra, rb, f64::INFINITY);
}

#[test]
fn af_mabc_single_relay() {
    let g = GainMatrix::new(1, vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]).unwrap();
    let r = af_mabc_rates(&g, 2.0).unwrap();
    // P~ = 2/3, SNR = 0.4.
    close(r.ra, 0.5 * c(0.4), "R_a");
    assert!((r.ra - 0.2428).abs() < 1e-4);
    close(r.rb, r.ra, "R_b");
}

#[test]
fn af_tdbc_example() {
    let p = 1.0;
    let r = af_tdbc_rates(&example_gains(), p).unwrap();
    let pt = [(p / 2.0) / (p * (R1B + AR1) + 2.0), (p / 2.0) / (p * (R2B + AR2) + 2.0)];
    let num = p * ((R1B * AR1 * pt[0]).sqrt() + (R2B * AR2 * pt[1]).sqrt()).powi(2);
    let ra = c(AB * p + num / (2.0 * (R1B * pt[0] + R2B * pt[1]) + 1.0)) / 3.0;
    let rb = c(AB * p + num / (2.0 * (AR1 * pt[0] + AR2 * pt[1]) + 1.0)) / 3.0;
    close(r.ra, ra, "R_a");
    close(r.rb, rb, "R_b");
}

fn hop(g: f64, h: f64, pt: f64, p: f64) -> f64 {
    g * h * pt * p / (2.0 * g * pt + 1.0)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) * f(hi) <= 0.0, "bracket does not straddle a root");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(lo) <= 0.0) == (f(mid) <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two relays: the only unknown is r2's view of a, everything else follows.
fn af_two_relay_oracle(g: &GainMatrix, p: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let (ga1, g12, gb2) = (g.get(0, 1), g.get(1, 2), g.get(3, 2));
    let pt = |ha: f64, hb: f64| p / (p * (ha + hb) + 2.0);
    let chain = |x: f64| {
        let pt2 = pt(x, gb2);
        let hb1 = hop(g12, gb2, pt2, p);
        let pt1 = pt(ga1, hb1);
        (hop(g12, ga1, pt1, p), hb1, pt1, pt2)
    };
    let x = bisect(|x| chain(x).0 - x, 0.0, g12 * ga1 * p + 1.0);
    let (_, hb1, pt1, pt2) = chain(x);
    ([ga1, x], [hb1, gb2], [pt1, pt2])
}

#[test]
fn af_mhmr_two_relays_against_bisection() {
    let g = example_gains();
    for p in [0.1, 1.0, 10.0, 1e4] {
        let eff = af_mhmr_effective_gains(&g, p).unwrap();
        let (ha, hb, pt) = af_two_relay_oracle(&g, p);
        for i in 0..2 {
            close(eff.h_a_tilde_sq[i], ha[i], "h_a~");
            close(eff.h_b_tilde_sq[i], hb[i], "h_b~");
            close(eff.p_tilde[i], pt[i], "P~");
        }
        let r = af_mhmr_rates(&g, p).unwrap();
        let ra = c(AB * p + hop(R1B, ha[0], pt[0], p) + hop(R2B, ha[1], pt[1], p)) / 4.0;
        let rb = c(AB * p + hop(AR1, hb[0], pt[0], p) + hop(AR2, hb[1], pt[1], p)) / 4.0;
        close(r.ra, ra, "R_a");
        close(r.rb, rb, "R_b");
    }
}

#[test]
fn af_mhmr_single_relay_uses_raw_gains() {
    let g = random_gains(1, 3);
    let eff = af_mhmr_effective_gains(&g, 5.0).unwrap();
    close(eff.h_a_tilde_sq[0], g.get(0, 1), "h_a~");
    close(eff.h_b_tilde_sq[0], g.get(2, 1), "h_b~");
}

#[test]
fn phase_counts() {
    assert_eq!(run_schedule(2, 3, &[0; 3], &[0; 3], 2).unwrap().len(), 13);
    assert_eq!(phase_count(2, 3).unwrap(), 13);
    assert_eq!(run_schedule(3, 10, &[0; 10], &[0; 10], 2).unwrap().len(), 53);
    assert_eq!(phase_count(3, 10).unwrap(), 53);
}

/// Who sends which sub-messages in each slot, without any decoding.
fn four_case(m: usize, blocks: usize) -> Vec<(usize, usize, Option<usize>, Option<usize>)> {
    let mut out = Vec::new();
    for s in 1..=blocks + 2 * m {
        if s <= blocks {
            out.push((s, 0, Some(s - 1), None));
        }
        for k in 1..=m {
            let a = (s > k && s - k <= blocks).then(|| s - k - 1);
            let b = (s > m && s <= blocks + m).then(|| s - m - 1);
            if a.is_some() || b.is_some() {
                out.push((s, k, a, b));
            }
        }
        if s > m && s <= blocks + m {
            out.push((s, m + 1, None, Some(s - m - 1)));
        }
    }
    out.sort();
    out
}

#[test]
fn schedule_matches_four_case_replay() {
    let mut seed = 99u64;
    for m in [2, 3, 4] {
        for blocks in [m, m + 3, 20] {
            let mut draw = || {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                (seed >> 33) % 256
            };
            let wa: Vec<u64> = (0..blocks).map(|_| draw()).collect();
            let wb: Vec<u64> = (0..blocks).map(|_| draw()).collect();
            let tr = run_schedule(m, blocks, &wa, &wb, 256).unwrap();
            let mut seen: Vec<_> = tr.events.iter().map(|e| (e.slot, e.tx, e.payload.a, e.payload.b)).collect();
            seen.sort();
            assert_eq!(seen, four_case(m, blocks), "m={m} B={blocks}");
            for e in &tr.events {
                let v = e.payload.a.map_or(0, |i| wa[i]) + e.payload.b.map_or(0, |j| wb[j]);
                assert_eq!(e.value, v % 256);
            }
            assert!(verify_delivery(&tr, &wa, &wb));
        }
    }
}
