//! No small perturbation of the shift-pair family splits along finite blocks
//! into mutually orthogonal pieces. The certificate compares the two closed
//! forms at the first block boundary.
//!
//! cargo run --example impossibility_certificate

use frame_decomp::decomp::impossibility_certificate;
use frame_decomp::{zoo, Tolerances};

fn main() -> frame_decomp::Result<()> {
    let family = zoo::gen_shift_pair(8)?;
    let blocks: Vec<Vec<usize>> = (0..4).map(|b| vec![2 * b, 2 * b + 1]).collect();
    let tol = Tolerances::default();
    println!(
        "{:>8} {:>8} {:>8} {:>8}",
        "epsilon", "lhs", "rhs", "verdict"
    );
    for eps in [0.0, 0.005, 0.01, 0.0147, 0.0148, 0.05, 0.25] {
        let c = impossibility_certificate(&family, &blocks, eps, &tol)?;
        println!("{eps:>8} {:>8.4} {:>8.4} {:>8}", c.lhs, c.rhs, c.verdict);
    }
    let root = (2f64.sqrt() - 1.0) / (2f64.sqrt() + 2.0);
    println!("crossover epsilon = {:.7}", root * root);
    Ok(())
}
