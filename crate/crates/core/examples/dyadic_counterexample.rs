//! After the dyadic reordering, the ordered construction puts the levels
//! `4^k..2·4^k-1` into one part. Alternating combinations on those levels have
//! unit coefficient norm but vanishing synthesis norm, so the part is not a
//! Riesz sequence.
//!
//! cargo run --example dyadic_counterexample

use frame_decomp::decomp::ordered_decompose;
use frame_decomp::frames::spectral_report;
use frame_decomp::{zoo, DecompConfig, Tolerances};

fn main() -> frame_decomp::Result<()> {
    let n = 255;
    let family = zoo::gen_dyadic_reorder(n)?;
    let r = ordered_decompose(&family, 0.01, &DecompConfig::default())?;
    println!("cuts: {:?}", r.schedule.cuts);
    let expected: Vec<usize> = zoo::dyadic_even_levels(n).iter().map(|p| p - 1).collect();
    println!(
        "first part is the even dyadic levels: {}",
        r.parts[0] == expected
    );

    let tol = Tolerances::default();
    println!(
        "{:>2} {:>12} {:>14} {:>14}",
        "k", "‖a‖²", "‖Σ a_i f_i‖²", "riesz_lower"
    );
    for k in 1..=3u32 {
        let w = zoo::alternating_coefficients(k);
        let positions: Vec<usize> = w.positions().map(|p| p - 1).collect();
        let level = family.subfamily(&positions)?;
        let value = w.coefficients.synthesize(&level)?.norm_squared();
        let upto: Vec<usize> = expected
            .iter()
            .copied()
            .filter(|&p| p < *w.positions().end())
            .collect();
        let lower = spectral_report(&family.subfamily(&upto)?, &tol)?.riesz_lower;
        println!(
            "{k:>2} {:>12.6} {value:>14.6e} {lower:>14.6e}",
            w.coefficients.norm_squared()
        );
    }
    Ok(())
}
