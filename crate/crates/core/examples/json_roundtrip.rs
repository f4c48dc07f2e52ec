//! Families and decomposition reports survive a trip through JSON bit for bit.
//!
//! cargo run --example json_roundtrip

use frame_decomp::decomp::{greedy_decompose, verify_ledger};
use frame_decomp::io::{
    parse_family, parse_report, to_json, DecompositionReport, FamilyFile, ReportFile,
};
use frame_decomp::{zoo, DecompConfig, VectorFamily};

fn main() -> frame_decomp::Result<()> {
    let family = zoo::gen_random_bessel(3, 5, 2.0, 42)?;
    let text = to_json(&FamilyFile::from_family(&family));
    print!("{text}");
    let back: VectorFamily = parse_family(&text)?.to_family()?;
    println!("family identical after parse: {}", back == family);

    let config = DecompConfig::default();
    let result = greedy_decompose(&family, 0.1, &config)?;
    let report = ReportFile::Decomposition(DecompositionReport::from_result(&family, &result));
    let report_text = to_json(&report);
    let ReportFile::Decomposition(parsed) = parse_report(&report_text)? else {
        unreachable!("a decomposition was written");
    };
    let restored = parsed.to_result(&back)?;
    println!("report identical after parse: {}", restored == result);
    println!(
        "restored report verifies: {}",
        verify_ledger(&back, &restored, &config.tol).ok
    );
    Ok(())
}
