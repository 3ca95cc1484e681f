//! Hand-built constraint set solved by the LP and checked against the grid
//! oracle, then traced into a frontier.
//!
//! cargo run --example phase_optimizer

use bidir_relay::optimizer::{grid_oracle, lambda_grid, max_weighted, trace_boundary, Target, TraceOptions};
use bidir_relay::{RateConstraintSet, Result};

fn toy(scale: f64) -> Result<RateConstraintSet> {
    // Two phases: a talks in the first, b in the second, and a shared
    // bottleneck caps the sum.
    let mut cs = RateConstraintSet::new(2);
    cs.push(Target::Ra, vec![2.0 * scale, 0.0]);
    cs.push(Target::Rb, vec![0.0, 1.5 * scale]);
    cs.push(Target::Sum, vec![1.2, 1.2]);
    cs.validate()?;
    Ok(cs)
}

fn main() -> Result<()> {
    let cs = toy(1.0)?;
    for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let sol = max_weighted(&cs, lambda)?;
        let grid = grid_oracle(&cs, lambda, 0.01)?;
        println!(
            "lambda {lambda:.2}: Ra {:.4} Rb {:.4} delta {:?} objective {:.4} grid {:.4}",
            sol.rates.ra,
            sol.rates.rb,
            sol.schedule.delta(),
            sol.objective,
            grid
        );
    }

    // Each scale is one "configuration"; the frontier keeps the best per weight.
    let scales = [0.5, 1.0, 1.5];
    let b = trace_boundary(|s: &f64| toy(*s), &scales, &lambda_grid(11), TraceOptions { hull: true })?;
    println!("\nhull over {} configurations:", scales.len());
    print!("{}", b.to_csv());
    Ok(())
}
