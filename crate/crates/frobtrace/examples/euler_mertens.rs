// Numerical behaviour of the Euler products behind the constants: the
// cutoff convergence of C2 with its tail bound, and the Mertens-style
// normalisation in which W(z) log z approaches e^(-gamma) times C2.
//
// Run with `cargo run --example euler_mertens`.

use frobtrace::arith::mertens_first_deviation;
use frobtrace::gl2::{c2_constant_with_cutoff, w_product};

const EXP_NEG_GAMMA: f64 = 0.561_459_483_566_885_1;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // C2 at m_E = 2 under growing cutoffs. The tail bound 1/(2 y^2) is a
    // crude overestimate of the error from truncating at y, and the
    // observed movement stays well inside it.
    println!("C2(m_E = 2) by Euler-product cutoff:");
    let mut last = 0.0;
    for cutoff in [1_000u64, 10_000, 100_000, 1_000_000] {
        let (c2, tail) = c2_constant_with_cutoff(2, cutoff)?;
        let moved = if last == 0.0 { f64::NAN } else { (c2 - last).abs() };
        println!("  cutoff {cutoff:8}: C2 = {c2:.12}  tail bound {tail:.2e}  moved {moved:.2e}");
        last = c2;
    }

    // W(z) multiplies 1 - l/(l^2 - 1) over sieve primes below z. Since
    // l/(l^2 - 1) is 1/l plus a cubic correction, W(z) decays like
    // Mertens' product and W(z) log z tends to e^(-gamma) C2.
    println!("\nW(z) log z / C2 against e^(-gamma) = {EXP_NEG_GAMMA:.10}:");
    let (c2, _) = c2_constant_with_cutoff(2, 1_000_000)?;
    for z in [1e3, 1e4, 1e5, 1e6] {
        let ratio = w_product(2, z)? * z.ln() / c2;
        let off = (ratio / EXP_NEG_GAMMA - 1.0) * 100.0;
        println!("  z = {z:>9.0}: {ratio:.6} ({off:+.2} percent)");
    }

    // The deviation in Mertens' first theorem, |sum log p / p - log y|,
    // stays under 2 for every y in range.
    println!("\nMertens first-theorem deviation:");
    for y in [10.0, 1e3, 1e6] {
        println!("  y = {y:>9.0}: {:.4}", mertens_first_deviation(y)?);
    }
    Ok(())
}
