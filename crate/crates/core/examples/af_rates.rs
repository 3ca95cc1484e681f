//! Amplify-and-forward rates, the effective gains of the chain, and which
//! links hurt the sum rate when strengthened.
//!
//! cargo run --example af_rates

use bidir_relay::af::af_mhmr_effective_gains;
use bidir_relay::asymptotics::af_sensitivity_probe;
use bidir_relay::channel::{db_to_linear, example_gains};
use bidir_relay::protocol::af_rates;
use bidir_relay::{Protocol, Result};

fn main() -> Result<()> {
    let g = example_gains();
    println!("P_dB   af-mabc         af-tdbc         af-mhmr");
    for p_db in [0.0, 10.0, 20.0, 30.0] {
        let p = db_to_linear(p_db);
        let mut line = format!("{p_db:4}");
        for proto in [Protocol::AfMabc, Protocol::AfTdbc, Protocol::AfMhmr] {
            let r = af_rates(proto, &g, p)?;
            line.push_str(&format!("  {:6.3}/{:6.3}", r.ra, r.rb));
        }
        println!("{line}");
    }

    let eff = af_mhmr_effective_gains(&g, 10.0)?;
    println!("\nchain at P = 10: h_a~ {:?}", eff.h_a_tilde_sq);
    println!("                 h_b~ {:?}", eff.h_b_tilde_sq);
    println!("                 P~   {:?} ({} iterations)", eff.p_tilde, eff.iterations);

    println!("\nd(sum)/d g(i,j) for af-mhmr at P = 10:");
    for s in af_sensitivity_probe(Protocol::AfMhmr, &g, 10.0, 1e-4)? {
        let flag = if s.derivative < 0.0 { "  <- stronger is worse" } else { "" };
        println!("  g({},{}) {:+.5}{flag}", s.i, s.j, s.derivative);
    }
    Ok(())
}
