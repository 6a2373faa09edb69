// A full census at x = 10^5: almost-prime trace counts, the sieve block,
// the conjectural constant, and the diagnostics that compare the prime
// count against C x / (log x)^2.
//
// Run with `cargo run --example census_report`.

use frobtrace::census::{build_report, CensusOptions, ImageOption};
use frobtrace::frobenius::{BuildMethod, CurveSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curve = CurveSpec::new(1, 1)?;
    let x = 100_000u64;
    let options = CensusOptions {
        method: BuildMethod::Auto,
        workers: 4,
        image: ImageOption::FullLevel(2),
        ..CensusOptions::default()
    };
    let report = build_report(&curve, x, &options)?;

    println!("curve {curve}, x = {x}");
    let counts = &report.counts;
    println!("\ncounts:");
    println!("  prime traces          {}", counts.prime);
    println!("  zero traces           {}", counts.zero);
    println!("  unit traces           {}", counts.unit);
    println!("  half-prime traces     {}", counts.half_prime);
    for k in [1u64, 2, 4, 8] {
        println!(
            "  k = {k}: Q_k = {:5}  P_k = {:5}",
            counts.q[&k], counts.p[&k]
        );
    }

    println!("\nsieve block:");
    let sieve = &report.sieve;
    println!("  filtered size {}  S = {}  H = {:.2}", sieve.gcd_filtered_size, sieve.s, sieve.h);
    println!("  params: U = {}, V = {:.4}, z = {:.4}, r = {}", sieve.params.u, sieve.params.v, sieve.params.z, sieve.params.r);

    let constants = report.constants.as_ref().expect("image supplied");
    println!("\nconstants: C1 = {:.6}  C2 = {:.6}  C = {:.6}", constants.c1, constants.c2, constants.c);

    // The ratio pi_prime(x) (log x)^2 / (C x) would tend to 1 under the
    // conjecture. At desk scale it sits above 1; the report only records it.
    let d = &report.diagnostics;
    println!("\ndiagnostics:");
    println!("  ratio to C x/(log x)^2: {:.4}", d.ratio);
    println!("  reciprocal partial sum: {:.6}", d.reciprocal_partial);
    for (dd, rd) in &d.empirical_rd {
        println!("  empirical R_{dd}: {rd:+.2}");
    }
    Ok(())
}
