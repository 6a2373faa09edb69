// Counts trace classes in GL2(Z/mZ) two ways, by the closed formulas and
// by enumerating matrices, and shows the group orders they must sum to.
//
// Run with `cargo run --example gl2_counts`.

use frobtrace::gl2::{
    count_projective_trace_zero, count_trace_class, count_trace_class_brute, gl2_order,
    pgl2_order, trace_class_histogram_brute, verify_against_enumeration, GaloisImage,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Group orders from the product formula match full enumeration.
    for m in [2u64, 3, 4, 6, 8, 12] {
        let order = gl2_order(m)?;
        let enumerated = GaloisImage::full(m)?.len();
        assert_eq!(order, enumerated as u128);
        println!(
            "#GL2(Z/{m}Z) = {order:6}   #PGL2 = {:5}",
            pgl2_order(m)?
        );
    }

    // Trace classes mod 5. The count depends only on whether the trace
    // vanishes: l^3 - l^2 matrices for trace 0, l^3 - l^2 - l otherwise.
    println!("\ntrace classes mod 5 (closed form vs brute force):");
    let hist = trace_class_histogram_brute(5)?;
    for alpha in 0..5i64 {
        let closed = count_trace_class(5, alpha)?;
        assert_eq!(closed, hist[alpha as usize]);
        println!("  tr = {alpha}: {closed}");
    }
    let total: u128 = hist.iter().sum();
    assert_eq!(total, gl2_order(5)?);
    println!("  sum = {total} = #GL2(Z/5Z)");

    // Prime powers lift by a factor of l^3 per step, so the zero-trace
    // class mod 25 is 5^3 times the one mod 5.
    let c25 = count_trace_class(25, 0)?;
    assert_eq!(c25, count_trace_class_brute(25, 0)?);
    assert_eq!(c25, 125 * count_trace_class(5, 0)?);
    println!("\nzero-trace class mod 25: {c25} = 5^3 x {}", count_trace_class(5, 0)?);

    // The projective zero-trace count divides out the phi(m) scalars.
    println!("\nprojective zero-trace classes:");
    for m in [3u64, 5, 9, 15] {
        println!("  m = {m:2}: {}", count_projective_trace_zero(m)?);
    }

    // The full verification pass used by `frobtrace gl2-verify`.
    let checks = verify_against_enumeration(7)?;
    let passed = checks.iter().filter(|(_, ok)| *ok).count();
    println!("\nverification pass: {passed}/{} checks ok", checks.len());
    assert_eq!(passed, checks.len());
    Ok(())
}
