//! Low- and high-SNR behaviour: closed forms, numeric pre-logs, gap reports
//! and the asymptotically optimal phase durations.
//!
//! cargo run --release --example asymptotic_gaps

use bidir_relay::asymptotics::{
    asymptotic_delta, gap_report, high_snr_prelog, low_snr_sumrate, numeric_prelog, Regime,
};
use bidir_relay::protocol::{max_sum_rate, EvalOptions};
use bidir_relay::{GainMatrix, Protocol, Result};

fn main() -> Result<()> {
    let m = 2;
    let g = GainMatrix::equal(m, 1.0)?;
    let opts = EvalOptions::default();

    println!("protocol   low-SNR closed/solved (P=1e-4)   pre-log table/numeric");
    for proto in [Protocol::DfMabc, Protocol::DfTdbc, Protocol::DfMhmr, Protocol::AfMabc, Protocol::AfMhmr] {
        let low = match low_snr_sumrate(proto, m, 1.0, 1e-4) {
            Ok(v) => format!("{v:.3e}/{:.3e}", max_sum_rate(proto, &g, 1e-4, &opts)?),
            Err(_) => "-".into(),
        };
        let slope = numeric_prelog(|p| max_sum_rate(proto, &g, p, &opts), 1e6, 1e8)?;
        println!("{:<10} {low:<32} {:.3}/{slope:.3}", proto.name(), high_snr_prelog(proto, m)?);
    }

    println!("\ngap reports for gains between 0.5 and 2:");
    for proto in [Protocol::DfMabc, Protocol::DfTdbc, Protocol::DfMhmr] {
        println!("{}", gap_report(proto, m, 0.5, 2.0)?.to_json()?);
    }

    for regime in [Regime::Low, Regime::High] {
        let d = asymptotic_delta(Protocol::DfMabc, m, regime)?;
        println!("\ndf-mabc {regime:?}-SNR durations: fixed {:?} slope {:?}", d.fixed, d.slope);
    }
    Ok(())
}
