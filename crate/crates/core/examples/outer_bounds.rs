//! Cut-set outer bounds: the full intersection against single cuts.
//!
//! cargo run --example outer_bounds

use bidir_relay::df::{RelayOrder, RelaySet};
use bidir_relay::optimizer::max_weighted;
use bidir_relay::outer::{all_cuts, outer_mabc, outer_mabc_cuts, outer_mhmr, outer_tdbc};
use bidir_relay::{GainMatrix, Result};

fn main() -> Result<()> {
    let g = GainMatrix::equal(2, 1.0)?;
    let p = 100.0;

    let full = [
        ("mabc-out", outer_mabc(&g, p)?),
        ("tdbc-out", outer_tdbc(&g, p)?),
        ("mhmr-out", outer_mhmr(&g, p, &RelayOrder::identity(2))?),
    ];
    for (name, cs) in &full {
        let s = max_weighted(cs, 0.5)?;
        println!("{name}: {} rows, sum rate {:.4} at delta {:?}", cs.len(), s.rates.sum(), s.schedule.delta());
    }

    println!("\nmabc-out one cut at a time (relays on the a side):");
    for cut in all_cuts(2)? {
        let cs = outer_mabc_cuts(&g, p, &[cut])?;
        let s = max_weighted(&cs, 0.5)?;
        let side: Vec<usize> = cut.iter().collect();
        println!("  {side:?}: sum rate {:.4}", s.rates.sum());
    }
    let all = outer_mabc_cuts(&g, p, &[RelaySet::all(2)])?;
    println!("all relays with a only: {:.4}", max_weighted(&all, 0.5)?.rates.sum());
    Ok(())
}
