//! DF regions of the three protocols on the example network, each beside its
//! cut-set outer bound.
//!
//! cargo run --release --example rate_regions [P_dB]

use bidir_relay::channel::{db_to_linear, example_gains};
use bidir_relay::optimizer::lambda_grid;
use bidir_relay::protocol::{region, EvalOptions};
use bidir_relay::{Protocol, Result};

fn main() -> Result<()> {
    let p_db: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let p = db_to_linear(p_db);
    let g = example_gains();
    let lambdas = lambda_grid(11);
    let opts = EvalOptions::default();

    for proto in [Protocol::DfMabc, Protocol::DfTdbc, Protocol::DfMhmr] {
        let inner = region(proto, &g, p, &lambdas, &opts)?;
        let outer = region(proto.outer().expect("DF protocols have outer bounds"), &g, p, &lambdas, &opts)?;
        println!("{proto} at {p_db} dB, {} phases", inner.t);
        println!("  lambda      Ra      Rb   outer obj  config");
        for pt in &inner.points {
            println!(
                "  {:6.2} {:7.4} {:7.4} {:11.4}  {}",
                pt.lambda,
                pt.rates.ra,
                pt.rates.rb,
                outer.value_at(pt.lambda).unwrap_or(f64::NAN),
                pt.config_id
            );
        }
        println!("  max sum rate {:.4} (outer {:.4})\n", inner.max_sum_rate(), outer.max_sum_rate());
    }
    Ok(())
}
