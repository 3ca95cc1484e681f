//! Amplify-and-forward rates. Phase durations are fixed at `1/t`.

use serde::{Deserialize, Serialize};

use crate::channel::{cap, check_power, GainMatrix};
use crate::error::{Error, Result};
use crate::optimizer::RatePair;

const FIXED_POINT_TOL: f64 = 1e-14;

fn check_m(g: &GainMatrix) -> Result<usize> {
    match g.m() {
        0 => Err(Error::ProtocolUndefined("amplify-and-forward needs at least one relay".into())),
        m => Ok(m),
    }
}

/// `(m, 2)` AF MABC; each rate is `1/2 C(SNR)`.
pub fn af_mabc_rates(g: &GainMatrix, p: f64) -> Result<RatePair> {
    check_power(p)?;
    let m = check_m(g)?;
    let (a, b) = (0, g.b());
    let pt: Vec<f64> = (1..=m)
        .map(|r| (p / m as f64) / (p / 2.0 * (g.get(r, b) + g.get(r, a)) + 1.0))
        .collect();
    let coherent: f64 = (1..=m).map(|r| (g.get(b, r) * g.get(a, r) * pt[r - 1]).sqrt()).sum();
    let num = p / 2.0 * coherent * coherent;
    let noise = |dest: usize| (1..=m).map(|r| g.get(dest, r) * pt[r - 1]).sum::<f64>() + 1.0;
    Ok(RatePair::new(0.5 * cap(num / noise(b)), 0.5 * cap(num / noise(a))))
}

/// `(m, 3)` AF TDBC; the direct link adds to the relayed SNR.
pub fn af_tdbc_rates(g: &GainMatrix, p: f64) -> Result<RatePair> {
    check_power(p)?;
    let m = check_m(g)?;
    let (a, b) = (0, g.b());
    let pt: Vec<f64> = (1..=m)
        .map(|r| (p / m as f64) / (p * (g.get(r, b) + g.get(r, a)) + 2.0))
        .collect();
    let coherent: f64 = (1..=m).map(|r| (g.get(b, r) * g.get(a, r) * pt[r - 1]).sqrt()).sum();
    let num = p * coherent * coherent;
    let noise = |dest: usize| 2.0 * (1..=m).map(|r| g.get(dest, r) * pt[r - 1]).sum::<f64>() + 1.0;
    let direct = g.get(a, b) * p;
    Ok(RatePair::new(cap(direct + num / noise(b)) / 3.0, cap(direct + num / noise(a)) / 3.0))
}

/// Effective squared gains along the relay chain `1..=m` (vectors indexed by
/// relay `i - 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AfEffectiveGains {
    pub h_a_tilde_sq: Vec<f64>,
    pub h_b_tilde_sq: Vec<f64>,
    pub p_tilde: Vec<f64>,
    pub iterations: usize,
}

// One hop of the effective-gain map: what relay `to` sees of a terminal
// through neighbour `from`.
#[inline]
fn hop(g_hop: f64, h_from: f64, pt_from: f64, p: f64) -> f64 {
    g_hop * h_from * pt_from * p / (2.0 * g_hop * pt_from + 1.0)
}

/// Solves the coupled effective-gain equations.
///
/// `h̃_a[i]` is relay `i`'s view of `a` through relay `i-1` and `h̃_b[i]` its
/// view of `b` through relay `i+1`; both depend on the neighbours' scaling
/// `P̃ = P / (P(h̃_a + h̃_b) + 2)`, which in turn depends on the effective
/// gains, so the system is circular. The boundary values
/// `h̃_a[1] = g(a, r_1)` and `h̃_b[m] = g(b, r_m)` stay fixed. A few damped
/// fixed-point sweeps from the raw neighbour gains are followed by Newton
/// steps on `ln T(x) - ln x`; the plain iteration alone is very slow at high
/// SNR, where the map is close to neutral.
pub fn af_mhmr_effective_gains(g: &GainMatrix, p: f64) -> Result<AfEffectiveGains> {
    check_power(p)?;
    let m = check_m(g)?;
    // Node indices: relay i is node i.
    let mut ha: Vec<f64> = (1..=m).map(|i| g.get(i - 1, i)).collect();
    let mut hb: Vec<f64> = (1..=m).map(|i| g.get(i + 1, i)).collect();
    let mut iterations = 0;
    if m > 1 {
        let n = m - 1;
        // Unknowns: ha[1..m] then hb[0..m-1] (0-based).
        let pack = |ha: &[f64], hb: &[f64]| -> Vec<f64> { ha[1..].iter().chain(&hb[..n]).copied().collect() };
        let map = |x: &[f64]| -> Vec<f64> {
            let (mut a, mut b) = (ha.clone(), hb.clone());
            a[1..].copy_from_slice(&x[..n]);
            b[..n].copy_from_slice(&x[n..]);
            let pt = p_tilde(&a, &b, p);
            let next_a = (2..=m).map(|i| hop(g.get(i - 1, i), a[i - 2], pt[i - 2], p));
            let next_b = (1..m).map(|i| hop(g.get(i + 1, i), b[i], pt[i], p));
            next_a.chain(next_b).collect()
        };
        if (0..=m).any(|i| g.get(i, i + 1) == 0.0) {
            // A broken chain link zeroes everything past it in each
            // direction, which cuts every cycle; plain sweeps are exact.
            let mut x = pack(&ha, &hb);
            for _ in 0..2 * m {
                x = map(&x);
                iterations += 1;
            }
            ha[1..].copy_from_slice(&x[..n]);
            hb[..n].copy_from_slice(&x[n..]);
        } else {
            let x = solve_fixed_point(&map, pack(&ha, &hb), &mut iterations)
                .map_err(|change| Error::NoConvergence(format!("effective gains, m = {m}, P = {p}, last change {change:e}")))?;
            ha[1..].copy_from_slice(&x[..n]);
            hb[..n].copy_from_slice(&x[n..]);
        }
    }
    let pt = p_tilde(&ha, &hb, p);
    Ok(AfEffectiveGains { h_a_tilde_sq: ha, h_b_tilde_sq: hb, p_tilde: pt, iterations })
}

fn rel_change(old: f64, new: f64) -> f64 {
    let d = (new - old).abs();
    if d == 0.0 {
        0.0
    } else {
        d / new.abs().max(old.abs())
    }
}

fn p_tilde(ha: &[f64], hb: &[f64], p: f64) -> Vec<f64> {
    ha.iter().zip(hb).map(|(x, y)| p / (p * (x + y) + 2.0)).collect()
}

const WARM_UP_SWEEPS: usize = 50;
const NEWTON_MAX_STEPS: usize = 200;

// Fixed point of a positive map `T`. Returns the last relative change on
// failure.
fn solve_fixed_point(map: &impl Fn(&[f64]) -> Vec<f64>, mut x: Vec<f64>, iterations: &mut usize) -> std::result::Result<Vec<f64>, f64> {
    let n = x.len();
    for _ in 0..WARM_UP_SWEEPS {
        *iterations += 1;
        let t = map(&x);
        let change = t.iter().zip(&x).map(|(a, b)| rel_change(*b, *a)).fold(0.0, f64::max);
        for (xi, ti) in x.iter_mut().zip(&t) {
            *xi = 0.5 * *xi + 0.5 * ti;
        }
        if change <= FIXED_POINT_TOL {
            return Ok(x);
        }
    }
    // Residual in log coordinates, F(y) = ln T(e^y) - y.
    let resid = |y: &[f64]| -> Vec<f64> {
        let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        map(&x).iter().zip(y).map(|(t, v)| t.ln() - v).collect()
    };
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut y: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let mut r = resid(&y);
    for _ in 0..NEWTON_MAX_STEPS {
        *iterations += 1;
        let nr = norm(&r);
        if !nr.is_finite() {
            return Err(nr);
        }
        if nr <= FIXED_POINT_TOL {
            return Ok(y.iter().map(|v| v.exp()).collect());
        }
        let h = 1e-7;
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut yj = y.clone();
            yj[j] += h;
            let rj = resid(&yj);
            for i in 0..n {
                jac[i][j] = (rj[i] - r[i]) / h;
            }
        }
        let step = match solve_linear(jac, r.iter().map(|v| -v).collect()) {
            Some(s) => s,
            None => return Err(nr),
        };
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = y.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let rc = resid(&cand);
            if norm(&rc) < nr || t < 1e-6 {
                y = cand;
                r = rc;
                break;
            }
            t *= 0.5;
        }
    }
    Err(norm(&r))
}

// Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// `(m, m+2)` AF MHMR; every relay's forwarded signal reaches the far
/// terminal alongside the direct link.
pub fn af_mhmr_rates(g: &GainMatrix, p: f64) -> Result<RatePair> {
    let eff = af_mhmr_effective_gains(g, p)?;
    let m = g.m();
    let (a, b) = (0, g.b());
    let direct = g.get(a, b) * p;
    let relayed = |dest: usize, h: &[f64]| -> f64 {
        (1..=m).map(|i| hop(g.get(i, dest), h[i - 1], eff.p_tilde[i - 1], p)).sum()
    };
    let t = (m + 2) as f64;
    Ok(RatePair::new(
        cap(direct + relayed(b, &eff.h_a_tilde_sq)) / t,
        cap(direct + relayed(a, &eff.h_b_tilde_sq)) / t,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::example_gains;

    fn single(ga: f64, gb: f64, gab: f64) -> GainMatrix {
        GainMatrix::new(1, vec![vec![0.0, ga, gab], vec![ga, 0.0, gb], vec![gab, gb, 0.0]]).unwrap()
    }

    #[test]
    fn mabc_single_relay_value() {
        let r = af_mabc_rates(&single(1.0, 1.0, 0.0), 2.0).unwrap();
        let want = 0.5 * (1.4f64).log2();
        assert!((r.ra - want).abs() < 1e-14);
        assert!((r.ra - 0.2427).abs() < 1e-3);
        assert!((r.ra - r.rb).abs() < 1e-15);
    }

    #[test]
    fn no_relay_paths() {
        let g = single(0.0, 0.0, 0.0);
        let r = af_mabc_rates(&g, 10.0).unwrap();
        assert_eq!((r.ra, r.rb), (0.0, 0.0));
        let r = af_mhmr_rates(&g, 10.0).unwrap();
        assert_eq!((r.ra, r.rb), (0.0, 0.0));
        let r = af_tdbc_rates(&single(0.0, 0.0, 0.5), 4.0).unwrap();
        assert!((r.ra - (3.0f64).log2() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_relay_effective_gains_are_raw() {
        let g = single(0.7, 1.9, 0.1);
        let e = af_mhmr_effective_gains(&g, 3.0).unwrap();
        assert_eq!(e.h_a_tilde_sq, vec![0.7]);
        assert_eq!(e.h_b_tilde_sq, vec![1.9]);
        assert_eq!(e.iterations, 0);
    }

    #[test]
    fn equal_gains_mirror() {
        let g = GainMatrix::equal(5, 0.8).unwrap();
        let e = af_mhmr_effective_gains(&g, 10.0).unwrap();
        for i in 0..5 {
            assert!((e.h_a_tilde_sq[i] - e.h_b_tilde_sq[4 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn long_line_is_a_fixed_point() {
        let g = crate::channel::line_gains(8, 1.0, 3.8, 1.0, Some(0.04)).unwrap();
        for p in [1.0, 100.0, 1e8] {
            let e = af_mhmr_effective_gains(&g, p).unwrap();
            for i in 2..=8 {
                let want = hop(g.get(i - 1, i), e.h_a_tilde_sq[i - 2], e.p_tilde[i - 2], p);
                assert!(rel_change(e.h_a_tilde_sq[i - 1], want) < 1e-12);
            }
            for i in 1..8 {
                let want = hop(g.get(i + 1, i), e.h_b_tilde_sq[i], e.p_tilde[i], p);
                assert!(rel_change(e.h_b_tilde_sq[i - 1], want) < 1e-12);
            }
        }
    }

    #[test]
    fn broken_link_zeroes_downstream() {
        let mut g = crate::channel::line_gains(4, 1.0, 3.8, 1.0, Some(0.04)).unwrap().rows().to_vec();
        g[2][3] = 0.0;
        g[3][2] = 0.0;
        let g = GainMatrix::new(4, g).unwrap();
        let e = af_mhmr_effective_gains(&g, 10.0).unwrap();
        assert_eq!(e.h_a_tilde_sq[2..], [0.0, 0.0]);
        assert_eq!(e.h_b_tilde_sq[..2], [0.0, 0.0]);
        assert!(e.h_a_tilde_sq[1] > 0.0 && e.h_b_tilde_sq[2] > 0.0);
    }

    #[test]
    fn converges_on_example() {
        let g = example_gains();
        for p in [1e-4, 1.0, 100.0, 1e8] {
            let e = af_mhmr_effective_gains(&g, p).unwrap();
            assert!(e.iterations < 1000);
            let r = af_mhmr_rates(&g, p).unwrap();
            assert!(r.ra.is_finite() && r.rb.is_finite() && r.ra >= 0.0 && r.rb >= 0.0);
        }
    }
}
