// Runs the weighted sieve on real trace data: builds a table up to
// x = 10^4, filters to traces coprime to m_E = 2, computes the sifted
// count S and the weighted sum H, and checks the lower-bound lemma that
// converts H into a count of almost-prime traces.
//
// Run with `cargo run --example greaves_lower_bound`.

use frobtrace::frobenius::{build_trace_table, BuildMethod, CurveSpec};
use frobtrace::sieve::{
    check_lower_lemma, minimal_r, sifted_count, weighted_h, GreavesParams, SieveData,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curve = CurveSpec::new(-2, 7)?;
    let x = 10_000u64;
    let table = build_trace_table(&curve, x, BuildMethod::Auto, 4)?;
    let data = SieveData::from_table(&table, 2)?;
    println!("curve {curve}, x = {x}");
    println!(
        "good primes {}, odd traces kept {}",
        table.len(),
        data.len()
    );

    // Greaves ramp at theta = 1/2: (U, V) = (0.83, 1/6) and z = x^(1/6).
    let z = (x as f64).powf(1.0 / 6.0);
    let max_abs = data.values().iter().map(|a| a.unsigned_abs()).max().unwrap();
    let r = minimal_r(z, 0.83, 1.0 / 6.0, max_abs)?;
    let params = GreavesParams {
        u: 0.83,
        v: 1.0 / 6.0,
        z,
        theta: 0.5,
        xi: 1.0 / 6.0,
        r,
    };
    params.validate()?;
    println!("\nz = {z:.4}, max |a_p| = {max_abs}, minimal r = {r}");

    // S counts members with no prime factor below z. H tempers the count
    // with ramp weights on [z^V, z^U) and is the sieve's lower-bound side.
    let s = sifted_count(&data, z)?;
    let h = weighted_h(&data, &params)?;
    println!("sifted count S(A, P, z) = {s}");
    println!("weighted sum H = {h:.4}");

    // The lemma: whenever every prime factor of every member lies in the
    // sieve set and max |a| <= z^(rU + V), at least H members have at most
    // r distinct prime factors.
    let lemma = check_lower_lemma(&data, &params)?;
    println!("\nlower-bound lemma:");
    println!("  members with omega <= {r}: {}", lemma.count_omega_le_r);
    println!("  members with Omega <= {r}: {}", lemma.count_big_omega_le_r);
    println!("  square hits in the ramp window: {}", lemma.square_hits);
    println!("  max hypothesis holds: {}", lemma.max_ok);
    assert!(lemma.max_ok && lemma.factors_in_sieve_set);
    assert!(lemma.count_omega_le_r as f64 >= h - 1e-9);
    println!("  {} >= {h:.4} confirmed", lemma.count_omega_le_r);
    Ok(())
}
