//! Frame, Bessel and Riesz bounds of a few generated families.
//!
//! cargo run --example analyze_spectrum

use frame_decomp::frames::{is_linearly_independent, spectral_report};
use frame_decomp::{zoo, Tolerances, VectorFamily};

fn show(name: &str, family: &VectorFamily, tol: &Tolerances) -> frame_decomp::Result<()> {
    let r = spectral_report(family, tol)?;
    let ind = is_linearly_independent(family, tol);
    println!(
        "{name:<28} N={:<4} d={:<4} A={:<10.6} B={:<10.6} riesz=[{:.6}, {:.6}] independent={} (margin {:.2e})",
        family.len(),
        family.dim(),
        r.frame_a,
        r.bessel_b,
        r.riesz_lower,
        r.riesz_upper,
        ind.independent,
        ind.margin,
    );
    Ok(())
}

fn main() -> frame_decomp::Result<()> {
    let tol = Tolerances::default();
    show("shift_pair(64)", &zoo::gen_shift_pair(64)?, &tol)?;
    println!(
        "{:<28} B should be 1 + cos(pi/65) = {:.6}",
        "",
        1.0 + (std::f64::consts::PI / 65.0).cos()
    );
    show(
        "union_onb(d=8, copies=3)",
        &zoo::gen_union_onb(8, 3, 1)?,
        &tol,
    )?;
    show(
        "random_bessel(16, 64, B<=8)",
        &zoo::gen_random_bessel(16, 64, 8.0, 2)?,
        &tol,
    )?;
    show(
        "random_bessel(10, 10, B<=1)",
        &zoo::gen_random_bessel(10, 10, 1.0, 3)?,
        &tol,
    )?;
    Ok(())
}
