//! The greedy construction splits the shift-pair family `(e_i + e_{i+1})/√2`
//! into its odd and even members, each an orthonormal system, even after the
//! dyadic reordering.
//!
//! cargo run --example greedy_shift_pair

use frame_decomp::decomp::{greedy_decompose, ordered_decompose};
use frame_decomp::frames::spectral_report;
use frame_decomp::{zoo, DecompConfig, Tolerances};

fn main() -> frame_decomp::Result<()> {
    let tol = Tolerances::default();
    let config = DecompConfig::default();
    for (name, family) in [
        ("natural order", zoo::gen_shift_pair(16)?),
        ("dyadic reorder", zoo::gen_dyadic_reorder(15)?),
    ] {
        let r = greedy_decompose(&family, 0.01, &config)?;
        println!("{name}:");
        for which in 0..2 {
            let part = &r.perturbed[which];
            let s = spectral_report(part, &tol)?;
            println!(
                "  part {}: labels {:?}, riesz bounds [{:.3}, {:.3}], energy {}",
                which + 1,
                part.labels(),
                s.riesz_lower,
                s.riesz_upper,
                r.energies[which]
            );
        }
    }

    let ordered = ordered_decompose(&zoo::gen_shift_pair(16)?, 0.01, &config)?;
    println!(
        "ordered strategy for comparison: {} blocks, energies {:.3e} / {:.3e}",
        ordered.schedule.cuts.len(),
        ordered.energies[0],
        ordered.energies[1]
    );
    Ok(())
}
