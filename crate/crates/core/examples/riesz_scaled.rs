//! Thresholds scaled by the lower Riesz bound of the prefix push the cuts of
//! an independent family later than the plain schedule.
//!
//! cargo run --example riesz_scaled

use frame_decomp::decomp::{ordered_decompose, riesz_scaled_decompose, verify_ledger};
use frame_decomp::{zoo, DecompConfig, Error};

fn main() -> frame_decomp::Result<()> {
    let family = zoo::gen_shift_pair(32)?;
    let config = DecompConfig::default();
    let plain = ordered_decompose(&family, 0.1, &config)?;
    let scaled = riesz_scaled_decompose(&family, 0.1, &config)?;

    println!("ordered cuts: {:?}", plain.schedule.cuts);
    println!("scaled cuts:  {:?}", scaled.schedule.cuts);
    println!(
        "{:>5} {:>5} {:>10} {:>12} {:>12}",
        "step", "kind", "delta_k", "threshold", "tail"
    );
    for e in &scaled.schedule.ledger {
        println!(
            "{:>5} {:>5} {:>10.5} {:>12.4e} {:>12.4e}",
            e.step,
            e.kind,
            e.delta_k.unwrap_or(1.0),
            e.threshold,
            e.achieved
        );
    }
    println!(
        "verified: {}",
        verify_ledger(&family, &scaled, &config.tol).ok
    );

    let dependent = zoo::gen_union_onb(4, 2, 0)?;
    match riesz_scaled_decompose(&dependent, 0.1, &config) {
        Err(e @ Error::LinearlyDependent { .. }) => println!("dependent family refused: {e}"),
        other => println!("unexpected: {:?}", other.map(|r| r.energies)),
    }
    Ok(())
}
