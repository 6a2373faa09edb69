//! # frobtrace
//!
//! Frobenius-trace censuses for elliptic curves over prime fields, together
//! with the group-theoretic constants and sieve-theoretic functionals that
//! govern how often the trace `a_p` is prime or almost prime.
//!
//! The crate is organised as a small pipeline:
//!
//! - [`arith`]: prime generation, Legendre symbols, factorization, and the
//!   Mertens-sum diagnostics everything else leans on.
//! - [`frobenius`]: computes `a_p(E)` for all good primes `p <= x` of a short
//!   Weierstrass curve `y^2 = x^3 + Ax + B`, with a slow exact path and a
//!   baby-step/giant-step order-finding path, plus a CSV trace cache.
//! - [`gl2`]: trace-class counts in `GL2(Z/mZ)` and `PGL2(Z/mZ)`, subgroup
//!   closures, and the constants `C1`, `C2`, `C`, `C'` built from a supplied
//!   Galois image, together with the sieve product `W(z)`.
//! - [`sieve`]: the Greaves lower-bound sieve functionals `alpha`, `beta`,
//!   `J(U, V)`, parameter solving, the data-side weighted sums `S` and `H`,
//!   and leading-term evaluators.
//! - [`census`]: turns a trace table into a machine-readable report: prime
//!   trace counts, `Q_k`/`P_k` almost-prime counts, half-trace counts,
//!   reciprocal sums, and conjecture ratios.
//! - [`cli`]: the `frobtrace` binary's subcommands.
//!
//! The `examples/` directory is the front door: each example is a runnable
//! walkthrough of one capability (`cargo run --example toy_census`, etc.).

pub mod arith;
pub mod census;
pub mod cli;
pub mod frobenius;
pub mod gl2;
pub mod sieve;

pub use arith::{factorize, legendre_symbol, mertens_first_deviation, primes_up_to};
pub use census::{build_report, CensusOptions, CensusReport};
pub use frobenius::{build_trace_table, CurveSpec, TraceTable};
pub use gl2::{conjecture_constant, ConstantsReport, GaloisImage};
pub use sieve::{j_of, parameter_recipe, solve_u, GreavesParams};
