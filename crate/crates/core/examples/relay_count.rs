//! Best sum rate as relays are added to the line, through the scenario runner.
//!
//! cargo run --release --example relay_count

use bidir_relay::experiment::{run, Scenario, ScenarioConfig};
use bidir_relay::Result;

fn main() -> Result<()> {
    let mut cfg = ScenarioConfig::defaults(Scenario::RelayCount);
    cfg.set("m_range", "1..5")?;
    cfg.set("p_db", "10")?;
    let out = run(&cfg)?;
    for t in &out.tables {
        println!("# {}", t.name);
        print!("{}", t.to_csv());
    }
    Ok(())
}
