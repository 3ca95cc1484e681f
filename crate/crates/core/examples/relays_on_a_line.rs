//! Sum rates for m relays evenly spaced between the terminals.
//!
//! cargo run --release --example relays_on_a_line [m]

use bidir_relay::channel::{db_to_linear, line_gains};
use bidir_relay::protocol::{max_sum_rate, EvalOptions};
use bidir_relay::{Protocol, Result};

fn main() -> Result<()> {
    let m: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let g = line_gains(m, 1.0, 3.8, 1.0, Some(0.04))?;
    let opts = EvalOptions::default();
    let protos = [Protocol::DfMabc, Protocol::DfTdbc, Protocol::DfMhmr, Protocol::AfMabc, Protocol::AfTdbc, Protocol::AfMhmr];

    print!("P_dB");
    for p in protos {
        print!(" {:>9}", p.name());
    }
    println!();
    for p_db in [0.0, 10.0, 20.0] {
        print!("{p_db:4}");
        for proto in protos {
            print!(" {:9.4}", max_sum_rate(proto, &g, db_to_linear(p_db), &opts)?);
        }
        println!();
    }
    Ok(())
}
