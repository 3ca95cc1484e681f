//! Builds gain matrices three ways and round-trips one through CSV and JSON.
//!
//! cargo run --example channel_model

use bidir_relay::channel::{capacity, example_gains, line_gains, Geometry};
use bidir_relay::{GainMatrix, Result};

fn show(title: &str, g: &GainMatrix) {
    println!("{title} (m = {})", g.m());
    for row in g.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:9.4}")).collect();
        println!("  {}", cells.join(" "));
    }
}

fn main() -> Result<()> {
    show("example network, squared gains", &example_gains());

    // Four relays spread evenly between a at 0 and b at 1.
    let line = line_gains(4, 1.0, 3.8, 1.0, Some(0.04))?;
    show("evenly spaced line", &line);

    let custom = Geometry::new(vec![0.0, 0.3, 0.7, 1.0], 3.8, 1.0, Some(0.04))?;
    show("relays at 0.3 and 0.7", &custom.gains()?);

    let back = GainMatrix::from_csv(&line.to_csv())?;
    assert_eq!(back, line);
    let back = GainMatrix::from_json(&line.to_json()?)?;
    assert_eq!(back, line);
    println!("CSV and JSON round trips are exact");

    let (lo, hi) = line.extremes();
    println!("weakest and strongest link: {lo:.4} {hi:.4}");
    println!("C(1) = {:.4}, C(P h_ab^2) at P = 100: {:.4}", capacity(1.0)?, capacity(100.0 * line.get(0, 5))?);
    Ok(())
}
