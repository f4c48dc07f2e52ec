//! Ordered blocking of random unit vectors, with its budget ledger.
//!
//! cargo run --example ordered_decomposition

use frame_decomp::decomp::{ordered_decompose, verify_ledger};
use frame_decomp::{zoo, DecompConfig};

fn main() -> frame_decomp::Result<()> {
    let family = zoo::gen_random_bessel(40, 24, 4.0, 11)?;
    let epsilon = 0.1;
    let config = DecompConfig::default();
    let result = ordered_decompose(&family, epsilon, &config)?;

    println!("cuts: {:?}", result.schedule.cuts);
    println!(
        "{:>5} {:>5} {:>12} {:>12}",
        "step", "kind", "threshold", "tail"
    );
    for e in &result.schedule.ledger {
        println!(
            "{:>5} {:>5} {:>12.4e} {:>12.4e}",
            e.step, e.kind, e.threshold, e.achieved
        );
    }
    println!("S-part labels: {:?}", result.perturbed[0].labels());
    println!("T-part labels: {:?}", result.perturbed[1].labels());
    println!(
        "energies: {:.3e} + {:.3e} (budget {epsilon})",
        result.energies[0], result.energies[1]
    );
    let check = verify_ledger(&family, &result, &config.tol);
    println!("ledger verified: {}", check.ok);
    Ok(())
}
