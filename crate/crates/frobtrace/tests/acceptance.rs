// Acceptance gate. Runs the ten checks below end to end and prints one
// PASS or FAIL line per criterion (visible with `cargo test -- --nocapture`).
// The test fails unless every criterion passes at its stated tolerance.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use frobtrace::arith::mertens_first_deviation;
use frobtrace::census::{
    conjecture_ratio, pk_count, prime_trace_count, qk_count, reciprocal_partial_sum,
};
use frobtrace::frobenius::{build_trace_table, BuildMethod, CurveSpec, TraceTable};
use frobtrace::gl2::{
    c2_constant, c2_constant_with_cutoff, conjecture_constant, verify_against_enumeration,
    w_product, GaloisImage,
};
use frobtrace::sieve::{
    check_lower_lemma, j_of, leading_terms, minimal_r, r1_of, r2_of, solve_u, GreavesParams,
    SieveData,
};

const SEED: u64 = 0xacce_0001;
const EXP_NEG_GAMMA: f64 = 0.561_459_483_566_885_1;

fn seeded_curves(n: usize, seed: u64) -> Vec<CurveSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let a = rng.gen_range(-20..=20);
        let b = rng.gen_range(-20..=20);
        if let Ok(curve) = CurveSpec::new(a, b) {
            out.push(curve);
        }
    }
    out
}

fn build(curve: &CurveSpec, x: u64, method: BuildMethod, workers: usize) -> TraceTable {
    build_trace_table(curve, x, method, workers)
        .unwrap_or_else(|e| panic!("table build failed for {curve:?} at x = {x}: {e}"))
}

struct Outcome {
    index: usize,
    pass: bool,
    detail: String,
}

fn record(results: &mut Vec<Outcome>, index: usize, body: impl FnOnce() -> (bool, String)) {
    let (pass, detail) = body();
    results.push(Outcome {
        index,
        pass,
        detail,
    });
}

#[test]
fn acceptance() {
    // Shared data used by several criteria. A failure here fails everything
    // downstream, so plain panics are fine.
    let curves = seeded_curves(5, SEED);
    let small_naive: Vec<TraceTable> = curves
        .iter()
        .map(|c| build(c, 10_000, BuildMethod::Naive, 4))
        .collect();
    let small_fast: Vec<TraceTable> = curves
        .iter()
        .map(|c| build(c, 10_000, BuildMethod::Fast, 4))
        .collect();

    let base_curve = CurveSpec::new(1, 1).unwrap();
    let sweep_start = Instant::now();
    let big = build(&base_curve, 1_000_000, BuildMethod::Fast, 8);
    let sweep_secs = sweep_start.elapsed().as_secs_f64();
    let big_other_workers = build(&base_curve, 1_000_000, BuildMethod::Fast, 3);

    let mid_tables: Vec<TraceTable> = curves[..3]
        .iter()
        .map(|c| build(c, 100_000, BuildMethod::Fast, 4))
        .collect();

    let toy = build(&base_curve, 10, BuildMethod::Naive, 1);

    let mut results: Vec<Outcome> = Vec::new();

    // 1. Greaves functional values at the two pinned parameter pairs.
    record(&mut results, 1, || {
        let t1 = Instant::now();
        let j1 = j_of(0.83, 1.0 / 6.0).unwrap();
        let s1 = t1.elapsed().as_secs_f64();
        let t2 = Instant::now();
        let j2 = j_of(0.6, 0.25).unwrap();
        let s2 = t2.elapsed().as_secs_f64();
        let pass =
            (j1 - 0.00692).abs() <= 5e-5 && (j2 - 0.3162).abs() <= 5e-4 && s1 < 1.0 && s2 < 1.0;
        (
            pass,
            format!("J(0.83,1/6) = {j1:.6}, J(3/5,1/4) = {j2:.5}, each under 1 s ({s1:.3}/{s2:.3})"),
        )
    });

    // 2. Solved parameter U at V = 1/4, closed form so no quadrature error.
    record(&mut results, 2, || {
        let u = solve_u(0.25, 0.5, (0.3, 0.9)).unwrap();
        (
            (u - 0.511_128_6).abs() <= 5e-5,
            format!("solve_U(1/4, 1/2) = {u:.7}"),
        )
    });

    // 3. Exponents and leading coefficients at theta = 1/2.
    record(&mut results, 3, || {
        let r1 = r1_of(0.5).unwrap();
        let r2 = r2_of(0.5).unwrap();
        let x = 100.0f64;
        let lt = leading_terms(x, 0.5, 1.0).unwrap();
        let base = x / (x.ln() * x.ln());
        let cu = lt.upper / base;
        let cq = lt.lower_q / base;
        let cp = lt.lower_p / base;
        let cc = lt.lower_pcc / base;
        let pass = r1 == 4
            && r2 == 5
            && (cu - 6.0).abs() < 1e-12
            && (cq - 0.0415).abs() <= 5e-5
            && (cp - 1.8972).abs() < 1e-9
            && (cc - 1.0).abs() < 1e-12;
        (
            pass,
            format!("r1 = {r1}, r2 = {r2}, coefficients {cu:.1}/{cq:.4}/{cp:.4}/{cc:.0}"),
        )
    });

    // 4. Brute-force matrix counts against every closed form.
    record(&mut results, 4, || {
        let t = Instant::now();
        let checks = verify_against_enumeration(11).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let bad: Vec<&str> = checks
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| name.as_str())
            .collect();
        (
            bad.is_empty() && secs < 30.0,
            format!(
                "{} enumeration checks in {secs:.2} s{}",
                checks.len(),
                if bad.is_empty() {
                    String::new()
                } else {
                    format!(", failing: {bad:?}")
                }
            ),
        )
    });

    // 5. Constant identity, Euler cutoff stability, Mertens normalisation.
    record(&mut results, 5, || {
        let rep = conjecture_constant(&GaloisImage::full(2).unwrap(), 1e-8).unwrap();
        let identity = (rep.c - 2.0 * rep.c1 * rep.c2).abs() <= 1e-12;
        let (c2_lo, tail_lo) = c2_constant_with_cutoff(2, 10_000).unwrap();
        let (c2_hi, _) = c2_constant_with_cutoff(2, 100_000).unwrap();
        let stable = (c2_hi - c2_lo).abs() < tail_lo;
        let c2 = c2_constant(2, 1e-12).unwrap();
        let z = 1e6f64;
        let ratio = w_product(2, z).unwrap() * z.ln() / c2;
        let mertens = (ratio - EXP_NEG_GAMMA).abs() <= 0.05 * EXP_NEG_GAMMA;
        (
            identity && stable && mertens,
            format!(
                "C = {:.6} = 2 C1 C2, cutoff move {:.2e} < {:.2e}, W(z) log z / C2 = {ratio:.4}",
                rep.c,
                (c2_hi - c2_lo).abs(),
                tail_lo
            ),
        )
    });

    // 6. Trace engine agreement, Weil bound, sweep time, determinism.
    record(&mut results, 6, || {
        let methods_agree = small_naive
            .iter()
            .zip(&small_fast)
            .all(|(naive, fast)| naive == fast);
        let weil = big
            .records()
            .iter()
            .all(|r| (r.a_p as i128) * (r.a_p as i128) < 4 * (r.p as i128));
        let deterministic = big == big_other_workers;
        (
            methods_agree && weil && sweep_secs <= 60.0 && deterministic,
            format!(
                "5 curves agree naive/fast to 1e4, Weil holds on {} records, sweep {sweep_secs:.1} s, workers 8 = 3",
                big.len()
            ),
        )
    });

    // 7. Toy census, every value fixed by exhaustive point enumeration.
    record(&mut results, 7, || {
        let recs: Vec<(u64, i64)> = toy.records().iter().map(|r| (r.p, r.a_p)).collect();
        let traces_ok = recs == vec![(3, 0), (5, -3), (7, 3)];
        let prime = prime_trace_count(&toy).unwrap();
        let recip = reciprocal_partial_sum(&toy, 2.0).unwrap();
        let recip_ok = (recip - 12.0 / 35.0).abs() < 1e-15;
        let filtered = SieveData::from_table(&toy, 2).unwrap().len();
        (
            traces_ok && prime == 2 && recip_ok && filtered == 2,
            format!("traces {recs:?}, pi_prime = {prime}, sum = {recip:.6}, filtered size = {filtered}"),
        )
    });

    // 8. Lower-bound lemma on real data at x = 1e4, hard combinatorial check.
    record(&mut results, 8, || {
        let x = 10_000u64;
        let z = (x as f64).powf(1.0 / 6.0);
        let max_abs = 2.0 * (x as f64).sqrt();
        let r = minimal_r(z, 0.83, 1.0 / 6.0, max_abs.ceil() as u64).unwrap();
        let mut all_ok = true;
        let mut margins = Vec::new();
        for table in &small_fast {
            let data = SieveData::from_table(table, 2).unwrap();
            let params = GreavesParams {
                u: 0.83,
                v: 1.0 / 6.0,
                z,
                theta: 0.5,
                xi: 1.0 / 6.0,
                r,
            };
            params.validate().unwrap();
            let rep = check_lower_lemma(&data, &params).unwrap();
            let holds =
                rep.max_ok && rep.factors_in_sieve_set && rep.count_omega_le_r as f64 >= rep.h - 1e-9;
            all_ok &= holds;
            margins.push(format!("{} >= {:.1}", rep.count_omega_le_r, rep.h));
        }
        (
            all_ok,
            format!("r = {r}, z^(rU+V) covers 2 sqrt(x), counts vs H: {}", margins.join(", ")),
        )
    });

    // 9. Census invariant chain at x = 1e5 plus the Mertens deviation band.
    record(&mut results, 9, || {
        let mut chain_ok = true;
        for table in &mid_tables {
            let prime = prime_trace_count(table).unwrap();
            let mut prev_q = 0;
            let mut prev_p = 0;
            for k in 1..=8 {
                let q = qk_count(table, k).unwrap();
                let p = pk_count(table, k).unwrap();
                chain_ok &= prime <= p && p <= q && q >= prev_q && p >= prev_p;
                prev_q = q;
                prev_p = p;
            }
        }
        let mut mertens_ok = true;
        let mut worst = 0.0f64;
        for y in [10.0, 1e2, 1e3, 1e4, 1e5, 1e6] {
            let dev = mertens_first_deviation(y).unwrap();
            worst = worst.max(dev);
            mertens_ok &= dev <= 2.0;
        }
        (
            chain_ok && mertens_ok,
            format!("3 curves ordered in k, worst Mertens deviation {worst:.3}"),
        )
    });

    // 10. Report-only asymptotics with one gross sanity band.
    record(&mut results, 10, || {
        let rep = conjecture_constant(&GaloisImage::full(2).unwrap(), 1e-8).unwrap();
        let ratio = conjecture_ratio(&big, rep.c).unwrap();
        let lt = leading_terms(1_000_000.0, 0.5, rep.c).unwrap();
        let prime = prime_trace_count(&big).unwrap() as f64;
        (
            prime <= 10.0 * lt.upper,
            format!(
                "pi_prime(1e6) = {prime}, ratio to C x/log^2 x = {ratio:.3}, 10 x upper term = {:.0}",
                10.0 * lt.upper
            ),
        )
    });

    let mut failed = 0;
    for outcome in &results {
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {}: {}", outcome.index, outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criterion(s) failed");
}
