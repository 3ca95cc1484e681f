//! Low- and high-SNR closed forms: sum rates, multiplicative gaps between
//! achievable and outer-bound sum rates, and the phase allocations that
//! attain them.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channel::{check_power, GainMatrix};
use crate::error::{Error, Result};
use crate::optimizer::PhaseSchedule;
use crate::protocol::{af_rates, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Low,
    High,
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "low" => Ok(Regime::Low),
            "high" => Ok(Regime::High),
            other => Err(Error::UnknownProtocol(format!("regime {other}"))),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Low => "low",
            Regime::High => "high",
        })
    }
}

fn check_m(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    Ok(m as f64)
}

/// Low-SNR sum rate with every squared gain equal to `h_sq`.
pub fn low_snr_sumrate(protocol: Protocol, m: usize, h_sq: f64, p: f64) -> Result<f64> {
    let mf = check_m(m)?;
    check_power(p)?;
    if !(h_sq.is_finite() && h_sq >= 0.0) {
        return Err(Error::InvalidGains(format!("squared gain {h_sq}")));
    }
    let base = p * h_sq / LN_2;
    Ok(match protocol {
        Protocol::DfMabc => base * 2.0 * mf / (2.0 * mf + 1.0),
        Protocol::MabcOut | Protocol::TdbcOut => 2.0 * mf * base,
        Protocol::DfTdbc | Protocol::DfMhmr => base,
        Protocol::MhmrOutLower => 2.0 * base * (mf + 1.0) / (mf + 2.0),
        Protocol::MhmrOutUpper => 2.0 * base,
        other => return Err(Error::UnknownProtocol(format!("no low-SNR closed form for {other}"))),
    })
}

fn check_ordering(h_min_sq: f64, h_max_sq: f64) -> Result<f64> {
    if !(h_min_sq > 0.0 && h_min_sq <= h_max_sq && h_max_sq.is_finite()) {
        return Err(Error::InvalidGainOrdering { min: h_min_sq, max: h_max_sq });
    }
    Ok(h_max_sq / h_min_sq)
}

/// `(lower, upper)` bounds on the low-SNR gap of a DF protocol.
pub fn low_snr_gap_bounds(protocol: Protocol, m: usize, h_min_sq: f64, h_max_sq: f64) -> Result<(f64, f64)> {
    let mf = check_m(m)?;
    let r = check_ordering(h_min_sq, h_max_sq)?;
    Ok(match protocol {
        Protocol::DfMabc => {
            let f = 1.0 / (2.0 * mf + 1.0);
            (f / r, f * r)
        }
        Protocol::DfTdbc => {
            let f = 1.0 / (2.0 * mf);
            (f / r, f * r)
        }
        Protocol::DfMhmr => (0.5 / r, 0.5 * r * (mf + 2.0) / (mf + 1.0)),
        other => return Err(Error::UnknownProtocol(format!("no low-SNR gap for {other}"))),
    })
}

/// High-SNR gap constant.
pub fn high_snr_gap(protocol: Protocol, m: usize) -> Result<f64> {
    let mf = check_m(m)?;
    Ok(match protocol {
        Protocol::AfMabc => 0.5,
        Protocol::DfMabc => 1.0 / 3.0,
        Protocol::AfTdbc => 1.0 / 3.0,
        Protocol::DfTdbc => 0.5,
        Protocol::AfMhmr => 2.0 / (mf + 2.0),
        Protocol::DfMhmr => 1.0,
        other => return Err(Error::UnknownProtocol(format!("no high-SNR gap for {other}"))),
    })
}

/// Coefficient of `log2 P` in the high-SNR sum rate.
pub fn high_snr_prelog(protocol: Protocol, m: usize) -> Result<f64> {
    let mf = check_m(m)?;
    Ok(match protocol {
        Protocol::AfMabc => 1.0,
        Protocol::DfMabc => 2.0 / 3.0,
        Protocol::MabcOut => 2.0,
        Protocol::AfTdbc => 2.0 / 3.0,
        Protocol::DfTdbc => 1.0,
        Protocol::TdbcOut => 2.0,
        Protocol::AfMhmr => 2.0 / (mf + 2.0),
        Protocol::DfMhmr => 1.0,
        Protocol::MhmrOut => 1.0,
        other => return Err(Error::UnknownProtocol(format!("no pre-log for {other}"))),
    })
}

/// Smallest `P_hi / P_lo` accepted by [`numeric_prelog`].
pub const MIN_PRELOG_SPAN: f64 = 100.0;

/// Slope of `evaluator` against `log2 P` between `p_lo` and `p_hi`.
pub fn numeric_prelog<F>(evaluator: F, p_lo: f64, p_hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    check_power(p_lo)?;
    check_power(p_hi)?;
    if p_hi / p_lo < MIN_PRELOG_SPAN * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!("P_hi / P_lo must be at least {MIN_PRELOG_SPAN}, got {}", p_hi / p_lo)));
    }
    let eval = |p: f64| -> Result<f64> {
        let v = evaluator(p)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(p))
        }
    };
    Ok((eval(p_hi)? - eval(p_lo)?) / (p_hi.log2() - p_lo.log2()))
}

/// `Δ(α) = fixed + α·slope`, `α ∈ [0, 1]`. A zero slope means the
/// allocation has no free parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaFamily {
    pub fixed: Vec<f64>,
    pub slope: Vec<f64>,
}

impl DeltaFamily {
    fn fixed(fixed: Vec<f64>) -> Self {
        let slope = vec![0.0; fixed.len()];
        DeltaFamily { fixed, slope }
    }

    /// `α` on the first phase, `1 - α` on the phase `other`.
    fn split(t: usize, other: usize) -> Self {
        let mut fixed = vec![0.0; t];
        let mut slope = vec![0.0; t];
        fixed[other] = 1.0;
        slope[other] = -1.0;
        slope[0] = 1.0;
        DeltaFamily { fixed, slope }
    }

    pub fn is_parametric(&self) -> bool {
        self.slope.iter().any(|&s| s != 0.0)
    }

    pub fn at(&self, alpha: f64) -> Result<PhaseSchedule> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        PhaseSchedule::new(self.fixed.iter().zip(&self.slope).map(|(f, s)| f + alpha * s).collect())
    }

    /// Members at `α ∈ {0, 0.5, 1}` (a single member if not parametric).
    pub fn samples(&self) -> Vec<PhaseSchedule> {
        let alphas: &[f64] = if self.is_parametric() { &[0.0, 0.5, 1.0] } else { &[0.0] };
        alphas.iter().map(|&a| self.at(a).expect("table allocations sum to one")).collect()
    }
}

/// Phase allocation attaining the asymptotic sum rate.
pub fn asymptotic_delta(protocol: Protocol, m: usize, regime: Regime) -> Result<DeltaFamily> {
    let mf = check_m(m)?;
    let t = m + 2;
    let unknown = || Error::UnknownProtocol(format!("no {regime}-SNR allocation for {protocol}"));
    Ok(match (regime, protocol) {
        (Regime::Low, Protocol::DfMabc) => DeltaFamily::fixed(vec![2.0 * mf / (2.0 * mf + 1.0), 1.0 / (2.0 * mf + 1.0)]),
        (Regime::High, Protocol::DfMabc) => DeltaFamily::fixed(vec![2.0 / 3.0, 1.0 / 3.0]),
        (Regime::Low, Protocol::MabcOut) => DeltaFamily::fixed(vec![0.0, 1.0]),
        (Regime::High, Protocol::MabcOut) => DeltaFamily::split(2, 1),
        (_, Protocol::DfTdbc) => DeltaFamily::split(3, 1),
        (_, Protocol::TdbcOut) => DeltaFamily::fixed(vec![0.0, 0.0, 1.0]),
        (_, Protocol::DfMhmr) => DeltaFamily::split(t, t - 1),
        (Regime::High, Protocol::MhmrOut | Protocol::MhmrOutLower | Protocol::MhmrOutUpper) => DeltaFamily::split(t, t - 1),
        (Regime::Low, Protocol::MhmrOutLower) => DeltaFamily::fixed(vec![1.0 / t as f64; t]),
        (Regime::Low, Protocol::MhmrOutUpper) => {
            let mut d = vec![0.0; t];
            for i in 2..=m + 1 {
                let i_f = i as f64;
                d[i - 1] = ((mf + 2.0 - i_f) / (i_f - 1.0) - (mf + 1.0 - i_f) / i_f) / (mf + 1.0);
            }
            d[t - 1] = 1.0 / (mf + 1.0);
            DeltaFamily::fixed(d)
        }
        _ => return Err(unknown()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub protocol: String,
    pub m: usize,
    #[serde(rename = "G_L_lower")]
    pub g_l_lower: Option<f64>,
    #[serde(rename = "G_L_upper")]
    pub g_l_upper: Option<f64>,
    #[serde(rename = "G_H")]
    pub g_h: Option<f64>,
    pub h_min_sq: f64,
    pub h_max_sq: f64,
    /// Set when a bound exceeds 1; values are reported unclamped.
    pub exceeds_one: bool,
}

impl GapReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Gap report for `protocol`. Low-SNR bounds are only defined for DF.
pub fn gap_report(protocol: Protocol, m: usize, h_min_sq: f64, h_max_sq: f64) -> Result<GapReport> {
    check_ordering(h_min_sq, h_max_sq)?;
    let low = if protocol.is_df() { Some(low_snr_gap_bounds(protocol, m, h_min_sq, h_max_sq)?) } else { None };
    let high = high_snr_gap(protocol, m).ok();
    if low.is_none() && high.is_none() {
        return Err(Error::UnknownProtocol(format!("no gap defined for {protocol}")));
    }
    let exceeds_one = low.is_some_and(|(_, u)| u > 1.0) || high.is_some_and(|h| h > 1.0);
    Ok(GapReport {
        protocol: protocol.name().into(),
        m,
        g_l_lower: low.map(|l| l.0),
        g_l_upper: low.map(|l| l.1),
        g_h: high,
        h_min_sq,
        h_max_sq,
        exceeds_one,
    })
}

/// Gap report using the extreme squared gains of `g`.
pub fn gap_report_for(protocol: Protocol, g: &GainMatrix) -> Result<GapReport> {
    let (lo, hi) = g.extremes();
    gap_report(protocol, g.m(), lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sensitivity {
    pub i: usize,
    pub j: usize,
    /// Central difference of the AF sum rate with respect to `g(i, j)`.
    pub derivative: f64,
}

/// Finite-difference sensitivities of an AF sum rate to every nonzero link.
/// Negative entries show where a stronger link lowers the sum rate.
pub fn af_sensitivity_probe(protocol: Protocol, g: &GainMatrix, p: f64, rel_step: f64) -> Result<Vec<Sensitivity>> {
    if !protocol.is_af() {
        return Err(Error::UnknownProtocol(format!("{protocol} is not an amplify-and-forward protocol")));
    }
    if !(rel_step > 0.0 && rel_step < 1.0) {
        return Err(Error::InvalidArgument(format!("relative step must lie in (0, 1), got {rel_step}")));
    }
    let n = g.nodes();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = g.get(i, j);
            if v == 0.0 {
                continue;
            }
            let h = v * rel_step;
            let shifted = |d: f64| -> Result<f64> {
                let mut rows = g.rows().to_vec();
                rows[i][j] = v + d;
                rows[j][i] = v + d;
                af_rates(protocol, &GainMatrix::new(g.m(), rows)?, p).map(|r| r.sum())
            };
            out.push(Sensitivity { i, j, derivative: (shifted(h)? - shifted(-h)?) / (2.0 * h) });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn low_snr_rows() {
        let base = 1e-3 / LN_2;
        assert!(close(low_snr_sumrate(Protocol::DfMabc, 2, 1.0, 1e-3).unwrap(), 0.8 * base));
        assert!(close(low_snr_sumrate(Protocol::DfMhmr, 7, 1.0, 1e-3).unwrap(), base));
        assert!(close(low_snr_sumrate(Protocol::MhmrOutLower, 2, 1.0, 1e-3).unwrap(), 2.0 * base * 0.75));
        assert!(low_snr_sumrate(Protocol::AfMabc, 2, 1.0, 1e-3).is_err());
    }

    #[test]
    fn gap_bounds() {
        let (l, u) = low_snr_gap_bounds(Protocol::DfMabc, 1, 0.5, 0.5).unwrap();
        assert!(close(l, 1.0 / 3.0) && close(u, 1.0 / 3.0));
        let (l, u) = low_snr_gap_bounds(Protocol::DfTdbc, 2, 2.0, 2.0).unwrap();
        assert!(close(l, 0.25) && close(u, 0.25));
        let (l, u) = low_snr_gap_bounds(Protocol::DfMhmr, 2, 1.0, 1.0).unwrap();
        assert!(close(l, 0.5) && close(u, 2.0 / 3.0));
        assert!(matches!(
            low_snr_gap_bounds(Protocol::DfMhmr, 2, 2.0, 1.0),
            Err(Error::InvalidGainOrdering { .. })
        ));
        assert!(low_snr_gap_bounds(Protocol::DfMhmr, 2, 0.0, 1.0).is_err());
    }

    #[test]
    fn high_snr_constants() {
        assert_eq!(high_snr_gap(Protocol::DfMhmr, 9).unwrap(), 1.0);
        assert_eq!(high_snr_gap(Protocol::AfMhmr, 2).unwrap(), 0.5);
        assert!(close(high_snr_gap(Protocol::DfMabc, 3).unwrap(), 1.0 / 3.0));
        assert!(high_snr_gap(Protocol::MabcOut, 3).is_err());
    }

    #[test]
    fn prelog_of_log() {
        let s = numeric_prelog(|p| Ok(p.log2()), 1.0, 1e4).unwrap();
        assert!(close(s, 1.0));
        assert!(numeric_prelog(|p| Ok(p.log2()), 1.0, 99.0).is_err());
        assert!(numeric_prelog(|p| Ok(p.log2()), 1e6, 1e8).is_ok());
        assert!(matches!(numeric_prelog(|_| Ok(f64::NAN), 1.0, 1e6), Err(Error::NonFinite(_))));
    }

    #[test]
    fn deltas() {
        let d = asymptotic_delta(Protocol::DfMabc, 3, Regime::Low).unwrap();
        assert!(!d.is_parametric());
        assert!(close(d.fixed[0], 6.0 / 7.0) && close(d.fixed[1], 1.0 / 7.0));
        let d = asymptotic_delta(Protocol::MhmrOutUpper, 2, Regime::Low).unwrap();
        let want = [0.0, 0.5, 1.0 / 6.0, 1.0 / 3.0];
        assert!(d.fixed.iter().zip(want).all(|(x, y)| close(*x, y)));
        let d = asymptotic_delta(Protocol::DfTdbc, 4, Regime::High).unwrap();
        let s = d.samples();
        assert_eq!(s.len(), 3);
        assert_eq!(s[1].delta(), &[0.5, 0.5, 0.0]);
        assert!(asymptotic_delta(Protocol::AfMabc, 2, Regime::Low).is_err());
    }

    #[test]
    fn mhmr_upper_allocation_sums_to_one() {
        for m in 1..=12 {
            let d = asymptotic_delta(Protocol::MhmrOutUpper, m, Regime::Low).unwrap();
            assert!(d.samples()[0].delta().iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn report_flags() {
        let r = gap_report(Protocol::DfMhmr, 2, 0.5, 1.0).unwrap();
        assert!(r.exceeds_one);
        assert!(r.to_json().unwrap().contains("\"G_L_upper\""));
        let r = gap_report(Protocol::AfMhmr, 2, 1.0, 1.0).unwrap();
        assert!(r.g_l_lower.is_none() && !r.exceeds_one);
    }

    #[test]
    fn probe_runs() {
        let g = crate::channel::example_gains();
        let s = af_sensitivity_probe(Protocol::AfMhmr, &g, 10.0, 1e-4).unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.iter().all(|x| x.derivative.is_finite()));
    }
}
