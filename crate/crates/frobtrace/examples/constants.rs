// Computes the conjectural density constants attached to a Galois image:
// the archimedean-free factor C1, the Euler factor C2, their product
// C = 2 C1 C2, and the half-trace variant C'.
//
// Run with `cargo run --example constants`.

use frobtrace::gl2::{
    c1_constant, closure, conjecture_constant, half_trace_constant, GaloisImage, ResidueMatrix,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A curve with irreducible 2-division polynomial has the full image at
    // level 2, where exactly 2 of the 6 matrices have invertible trace.
    let full2 = GaloisImage::full(2)?;
    let report = conjecture_constant(&full2, 1e-10)?;
    println!("full image at level 2:");
    println!("  C1 = {:.12} (exactly 1/3)", report.c1);
    println!("  C2 = {:.12}", report.c2);
    println!("  C  = {:.12}", report.c);
    println!("  Euler tail bound {:.3e}", report.euler_tail_bound);
    assert!((report.c - 2.0 * report.c1 * report.c2).abs() <= 1e-12);

    // The half-trace constant weights traces that are twice a unit one
    // level up, at 2 m_E = 4.
    let full4 = GaloisImage::full(4)?;
    let cprime = half_trace_constant(&full4, 2, 1e-10)?;
    println!("  C' = {cprime:.12}");

    // Full image at level 6: C1 drops to 5/24.
    let full6 = GaloisImage::full(6)?;
    let report6 = conjecture_constant(&full6, 1e-10)?;
    println!("\nfull image at level 6:");
    println!("  C1 = {:.12} (exactly 5/24)", report6.c1);
    println!("  C  = {:.12}", report6.c);

    // An image generated from matrices. The subgroup generated by
    // [[0,1],[1,1]] mod 2 has order 3 and no invertible-trace elements
    // beyond the two of trace 1, giving a different C1.
    let gen = ResidueMatrix::new(2, 0, 1, 1, 1)?;
    let image = closure(2, &[gen])?;
    println!("\ngenerated subgroup at level 2: order {}", image.len());
    println!("  C1 = {:.12}", c1_constant(&image)?);

    // The identity-only image has no invertible traces at all, so the
    // constant vanishes and the census would predict no prime traces.
    let identity = closure(2, &[])?;
    let degenerate = conjecture_constant(&identity, 1e-10)?;
    println!("\nidentity image: C = {}", degenerate.c);
    assert_eq!(degenerate.c, 0.0);
    Ok(())
}
