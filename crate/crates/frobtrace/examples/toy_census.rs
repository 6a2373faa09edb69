// Runs the census on a table small enough to check by hand. For
// y^2 = x^3 + x + 1 up to x = 10 the good primes are 3, 5, 7 and counting
// points directly gives traces 0, -3, 3.
//
// Run with `cargo run --example toy_census`.

use frobtrace::census::{build_report, CensusOptions, ImageOption};
use frobtrace::frobenius::CurveSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curve = CurveSpec::new(1, 1)?;
    let options = CensusOptions {
        image: ImageOption::FullLevel(2),
        ..CensusOptions::default()
    };
    let report = build_report(&curve, 10, &options)?;

    println!("{}", report.to_json());

    // Hand checks. The traces are 0, -3, 3, so exactly two have prime
    // absolute value, one is zero, and none is a unit. The reciprocal sum
    // over primes with prime trace is 1/5 + 1/7 = 12/35. Filtering to odd
    // traces (m_E = 2) keeps two members.
    assert_eq!(report.counts.prime, 2);
    assert_eq!(report.counts.zero, 1);
    assert_eq!(report.counts.unit, 0);
    assert_eq!(report.sieve.gcd_filtered_size, 2);
    let recip = report.diagnostics.reciprocal_partial;
    assert!((recip - 12.0 / 35.0).abs() < 1e-12);
    println!("\nall hand counts confirmed");
    Ok(())
}
