// Builds a Frobenius trace table for one curve, checks the two trace
// algorithms against each other, and round-trips the CSV cache format.
//
// Run with `cargo run --example trace_table`.

use frobtrace::frobenius::{
    build_trace_table, parse_trace_table, render_trace_table, trace_fast, trace_naive,
    BuildMethod, CurveSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curve = CurveSpec::new(2, 3)?;
    println!("curve: {curve}");
    println!("short discriminant: {}", curve.disc_short());

    let table = build_trace_table(&curve, 200, BuildMethod::Auto, 2)?;
    println!("\ngood primes up to {}: {}", table.x(), table.len());
    println!("first records (p, a_p, #E(F_p) = p + 1 - a_p):");
    for r in table.records().iter().take(8) {
        let points = r.p as i64 + 1 - r.a_p;
        println!("  p = {:3}  a_p = {:3}  #E = {}", r.p, r.a_p, points);
    }

    // The Weil bound a_p^2 < 4p holds for every record.
    let worst = table
        .records()
        .iter()
        .map(|r| (r.a_p * r.a_p) as f64 / r.p as f64)
        .fold(0.0f64, f64::max);
    println!("\nmax a_p^2 / p over the table: {worst:.3} (Weil bound gives < 4)");

    // The naive character sum and the baby-step giant-step point count
    // must agree prime by prime.
    for p in [101, 151, 199] {
        let slow = trace_naive(&curve, p)?;
        let quick = trace_fast(&curve, p)?;
        assert_eq!(slow, quick);
        println!("p = {p}: naive {slow}, fast {quick}");
    }

    // Cache round trip through the CSV format.
    let text = render_trace_table(&table);
    let reloaded = parse_trace_table(&text)?;
    assert!(reloaded == table, "cache round trip preserves the table");
    println!("\ncache round trip ok ({} bytes)", text.len());
    Ok(())
}
