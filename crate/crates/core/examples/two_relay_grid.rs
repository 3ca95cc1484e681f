//! Where to put two relays on the segment, by grid search over positions.
//!
//! cargo run --release --example two_relay_grid [step]

use bidir_relay::channel::Geometry;
use bidir_relay::experiment::grid_pairs;
use bidir_relay::protocol::{max_sum_rate, EvalOptions};
use bidir_relay::{Protocol, Result};

fn main() -> Result<()> {
    let step: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let opts = EvalOptions::default();
    for proto in [Protocol::DfMabc, Protocol::DfTdbc, Protocol::DfMhmr] {
        let mut best = ((0.0, 0.0), f64::NEG_INFINITY);
        for (x1, x2) in grid_pairs(step) {
            let g = Geometry::new(vec![0.0, x1, x2, 1.0], 3.8, 1.0, Some(0.04))?.gains()?;
            let s = max_sum_rate(proto, &g, 1.0, &opts)?;
            if s > best.1 {
                best = ((x1, x2), s);
            }
        }
        println!("{:<8} best at ({:.2}, {:.2}) with sum rate {:.4}", proto.name(), best.0 .0, best.0 .1, best.1);
    }
    Ok(())
}
