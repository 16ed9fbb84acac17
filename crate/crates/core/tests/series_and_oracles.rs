use avoid1324::oracles::p1234_numerator;
use avoid1324::{
    brute_count, enumerate_series, p1234, p1342, series_mod, Mode, Pattern, RunManifest,
    RunOptions, SeriesTable,
};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

const REFERENCE_SERIES: &str = include_str!("../../../data/p1324.txt");

fn reference_series() -> SeriesTable {
    SeriesTable::from_text(REFERENCE_SERIES).unwrap()
}

fn pat(s: &str) -> Pattern {
    s.parse().unwrap()
}

#[test]
fn reference_file_round_trips_and_is_consistent() {
    let t = reference_series();
    assert_eq!(t.len(), 37);
    assert_eq!(SeriesTable::from_text(&t.to_text()).unwrap(), t);
    t.check_invariants().unwrap();
}

#[test]
fn engine_matches_table_up_to_18() {
    let reference = reference_series();
    let big = enumerate_series(18, &Mode::BigInt, RunOptions::default()).unwrap();
    assert_eq!(big.coefficients[..], reference.coefficients[..19]);
    assert_eq!(big.coefficients[17], BigUint::from(458_374_397_312u64));
    big.check_invariants().unwrap();
}

#[test]
fn crt_equals_bigint_at_16() {
    let opts = RunOptions::default();
    let big = enumerate_series(16, &Mode::BigInt, opts).unwrap();
    let crt = enumerate_series(16, &Mode::auto_crt(16).unwrap(), opts).unwrap();
    assert_eq!(big.coefficients, crt.coefficients);
    assert_eq!(crt.coefficients[16], BigUint::from(62_300_851_632u64));
}

#[test]
fn memo_policy_and_factorization_do_not_change_residues() {
    let prime = avoid1324::DEFAULT_PRIMES[1];
    let base = series_mod(15, prime, RunOptions::default()).unwrap();
    for (p, seed, factorize) in [
        (1.0, 0, false),
        (0.3, 1, true),
        (0.3, 99, false),
        (0.05, 7, true),
    ] {
        let opts = RunOptions {
            store_probability: p,
            factorize,
            seed,
        };
        let run: RunManifest = series_mod(15, prime, opts).unwrap();
        assert_eq!(
            run.residues, base.residues,
            "p={p} seed={seed} factorize={factorize}"
        );
    }
}

#[test]
fn brute_force_matches_engine_up_to_11() {
    let engine = enumerate_series(11, &Mode::BigInt, RunOptions::default()).unwrap();
    for n in 0..=11 {
        let brute = brute_count(&pat("1324"), n).unwrap();
        assert_eq!(BigUint::from(brute), engine.coefficients[n], "n = {n}");
    }
}

#[test]
fn closed_forms_match_brute_force_up_to_10() {
    for n in 0..=10u64 {
        assert_eq!(
            p1234(n),
            BigUint::from(brute_count(&pat("1234"), n as usize).unwrap()),
            "1234 at n = {n}"
        );
        assert_eq!(
            p1342(n),
            BigUint::from(brute_count(&pat("1342"), n as usize).unwrap()),
            "1342 at n = {n}"
        );
    }
}

#[test]
fn binomial_sum_is_divisible() {
    for n in 1..=30u64 {
        let den = BigUint::from((n + 1) * (n + 1) * (n + 2));
        assert!((p1234_numerator(n) % den).is_zero(), "n = {n}");
    }
}

#[test]
fn normalized_1342_counts_approach_their_limit() {
    // p_n / (8^n n^{-5/2}) approaches its limit 64/(243 sqrt(pi)) monotonically, from above.
    let normalized = |n: u64| {
        let p = p1342(n).to_f64().unwrap();
        (p.ln() - n as f64 * 8f64.ln() + 2.5 * (n as f64).ln()).exp()
    };
    let limit = 64.0 / (243.0 * std::f64::consts::PI.sqrt());
    let mut prev = normalized(20);
    for n in 21..=200 {
        let cur = normalized(n);
        assert!(cur < prev, "n = {n}");
        assert!(cur > limit);
        prev = cur;
    }
}

#[test]
fn symmetry_class_counts_agree() {
    let base = pat("1324");
    let images = [
        base.reverse(),
        base.complement(),
        base.inverse(),
        base.reverse().complement(),
        base.reverse().complement().inverse(),
    ];
    for n in 0..=8 {
        let expected = brute_count(&base, n).unwrap();
        for image in &images {
            assert_eq!(
                brute_count(image, n).unwrap(),
                expected,
                "{image} at n = {n}"
            );
        }
    }
}

#[test]
fn wilf_classes_differ_at_six() {
    assert_eq!(brute_count(&pat("1324"), 6).unwrap(), 513);
    assert_eq!(brute_count(&pat("1234"), 6).unwrap(), 513);
    assert_eq!(brute_count(&pat("1342"), 6).unwrap(), 512);
    assert_eq!(brute_count(&pat("1324"), 7).unwrap(), 2762);
    assert_eq!(brute_count(&pat("1234"), 7).unwrap(), 2761);
}
