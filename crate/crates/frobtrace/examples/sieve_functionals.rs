// Evaluates the weighted-sieve functionals: the integrals alpha(V) and
// beta(V), the combined functional J(U, V), the bisection solver for U,
// and the parameter recipes for each sieve mode.
//
// Run with `cargo run --example sieve_functionals`.

use frobtrace::sieve::{
    alpha_of, beta_of, greaves_values, j_of, leading_terms, parameter_recipe, r1_of, r2_of,
    solve_u, SieveMode,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // The two parameter pairs used by the almost-prime counts.
    let v6 = 1.0 / 6.0;
    let q = greaves_values(0.83, v6)?;
    println!("U = 0.83, V = 1/6:");
    println!("  alpha = {:.6}  beta = {:.6}", q.alpha, q.beta);
    println!("  J = {:.6} (quadrature error {:.1e})", q.j, q.quadrature_error_estimate);

    let p = greaves_values(0.6, 0.25)?;
    println!("U = 3/5, V = 1/4:");
    println!("  J = {:.6}", p.j);

    // At V = 1/4 both integrals vanish identically, so J is closed form.
    assert_eq!(alpha_of(0.25)?, 0.0);
    assert_eq!(beta_of(0.25)?, 0.0);
    println!("\nalpha(1/4) = beta(1/4) = 0 exactly");

    // J( . , 1/4) falls from above 1 near U = 1/4 through zero at U = 3/4,
    // so a bracket straddling the target pins the solution.
    for u in [0.3, 0.5, 0.75, 0.9] {
        println!("  J({u:.2}, 1/4) = {:+.4}", j_of(u, 0.25)?);
    }
    let u_half = solve_u(0.25, 0.5, (0.3, 0.9))?;
    println!("solve J(U, 1/4) = 1/2: U = {u_half:.7}");

    // Almost-prime exponents as functions of the quasi-GRH exponent theta.
    println!("\nexponents r1 (distinct factors) and r2 (with multiplicity):");
    for theta in [0.5, 2.0 / 3.0, 0.99] {
        println!("  theta = {theta:.2}: r1 = {}, r2 = {}", r1_of(theta)?, r2_of(theta)?);
    }

    // Literal parameter recipes at x = 10^6. The sifting level z of the
    // selberg and pcc recipes is far below 1 at this scale, which the
    // validate method flags; data runs substitute z = x^xi instead.
    println!("\nrecipes at theta = 1/2, x = 1e6:");
    for mode in [
        SieveMode::Selberg,
        SieveMode::GreavesQ,
        SieveMode::GreavesP,
        SieveMode::Pcc,
    ] {
        let params = parameter_recipe(0.5, mode, 1e6)?;
        println!(
            "  {mode:9} U = {:.7}  V = {:.4}  xi = {:.4}  z = {:.3e}  r = {}",
            params.u, params.v, params.xi, params.z, params.r
        );
    }

    // Leading terms of the conditional bounds at x = 1e6 with C = 1.
    let lt = leading_terms(1e6, 0.5, 1.0)?;
    println!("\nleading terms at x = 1e6, theta = 1/2, C = 1:");
    println!("  upper {:.1}  lower_Q {:.1}  lower_P {:.1}  PCC {:.1}", lt.upper, lt.lower_q, lt.lower_p, lt.lower_pcc);
    Ok(())
}
