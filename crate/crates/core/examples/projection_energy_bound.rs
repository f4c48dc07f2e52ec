//! Total projection energy of a Bessel family onto a rank-r subspace is at
//! most r times the Bessel bound.
//!
//! cargo run --example projection_energy_bound

use frame_decomp::frames::spectral_report;
use frame_decomp::linops::{project_energy, span_projector};
use frame_decomp::{zoo, Tolerances};

fn main() -> frame_decomp::Result<()> {
    let tol = Tolerances::default();
    let family = zoo::gen_random_bessel(12, 40, 4.0, 5)?;
    let bessel = spectral_report(&family, &tol)?.bessel_b;
    let subspaces = zoo::gen_union_onb(12, 1, 9)?;
    println!("bessel bound {bessel:.4}");
    println!("{:>4} {:>12} {:>12}", "r", "Σ‖P f_i‖²", "r·B");
    for r in [1, 2, 4, 8, 12] {
        let positions: Vec<usize> = (0..r).collect();
        let p = span_projector(&subspaces, &positions, &tol)?;
        let total = project_energy(&p, &family, 0)?.total;
        println!("{r:>4} {total:>12.4} {:>12.4}", r as f64 * bessel);
    }
    Ok(())
}
