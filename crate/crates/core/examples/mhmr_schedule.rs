//! Runs the chain schedule for a few blocks and prints the transcript.
//!
//! cargo run --example mhmr_schedule [m] [blocks]

use bidir_relay::schedule::{knowledge_after, phase_count, run_schedule, verify_delivery};
use bidir_relay::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let m = args.next().flatten().unwrap_or(3);
    let blocks = args.next().flatten().unwrap_or(4);
    let modulus = 16;

    let wa: Vec<u64> = (0..blocks as u64).map(|i| (3 * i + 1) % modulus).collect();
    let wb: Vec<u64> = (0..blocks as u64).map(|i| (5 * i + 2) % modulus).collect();
    let tr = run_schedule(m, blocks, &wa, &wb, modulus)?;

    println!("m = {m}, B = {blocks}: {} phases (formula {})", tr.len(), phase_count(m, blocks)?);
    for e in &tr.events {
        println!("slot {:2} phase {} tx {} sends {:8} value {:2}", e.slot, e.phase, e.tx, e.payload.to_string(), e.value);
    }
    println!("delivered: {}", verify_delivery(&tr, &wa, &wb));

    let known = knowledge_after(&tr, &wa, &wb, tr.len());
    println!("a holds b parts {:?}, b holds a parts {:?}", known[0].1, known[m + 1].0);
    Ok(())
}
