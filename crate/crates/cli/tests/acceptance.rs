//! One line per acceptance criterion, run against the built binary and the
//! library crates. Exits non-zero when the set of failing criteria differs
//! from the documented known failures.
//!
//! `AVOID1324_STRETCH=1` adds the n = 28 enumeration. `AVOID1324_CRITERIA=5,6`
//! runs a subset.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::process::{Command, ExitCode, Output, Stdio};
use std::time::{Duration, Instant};

use avoid1324::signature::all_signatures;
use avoid1324::{
    canonicalize, decode, encode, p1342, AsymptoticParams, Item, RawSignature, SeriesTable,
    Signature,
};
use avoid1324_analysis::{
    fit_da, fit_log_quad, fit_log_triple_mu, fit_ratio_triple, loglog_gradient, physical_root,
    sigma_free, AnalysisError, CoefficientSeries, RealSeries,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const BIN: &str = env!("CARGO_BIN_EXE_avoid1324");
const REFERENCE_SERIES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/p1324.txt");

/// Criteria that are implemented faithfully but do not reach their band.
const KNOWN_FAILURES: &[u32] = &[7];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

struct Run {
    output: Output,
    elapsed: Duration,
}

impl Run {
    fn ok(&self) -> bool {
        self.output.status.success()
    }

    fn code(&self) -> Option<i32> {
        self.output.status.code()
    }

    fn stdout(&self) -> String {
        String::from_utf8_lossy(&self.output.stdout).into_owned()
    }
}

fn run(args: &[&str]) -> Run {
    run_with_input(args, None)
}

fn run_with_input(args: &[&str], input: Option<&[u8]>) -> Run {
    let start = Instant::now();
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(if input.is_some() {
            Stdio::piped()
        } else {
            Stdio::null()
        })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    if let Some(bytes) = input {
        child.stdin.take().unwrap().write_all(bytes).unwrap();
    }
    let output = child.wait_with_output().expect("binary finishes");
    Run {
        output,
        elapsed: start.elapsed(),
    }
}

/// Largest resident set of any waited-for child so far, in bytes.
fn peak_child_rss() -> u64 {
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    let rc = unsafe { libc::getrusage(libc::RUSAGE_CHILDREN, &mut usage) };
    if rc == 0 {
        usage.ru_maxrss as u64 * 1024
    } else {
        0
    }
}

fn reference() -> SeriesTable {
    SeriesTable::from_text(&std::fs::read_to_string(REFERENCE_SERIES).unwrap()).unwrap()
}

fn data_lines(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

/// Checks an enumeration's table against the reference for indices 0..=n.
fn matches_reference(text: &str, n: usize) -> Result<(), String> {
    let got = SeriesTable::from_text(text).map_err(|e| e.to_string())?;
    let want = reference();
    if got.coefficients.len() != n + 1 {
        return Err(format!("{} coefficients", got.coefficients.len()));
    }
    match (0..=n).find(|&k| got.coefficients[k] != want.coefficients[k]) {
        Some(k) => Err(format!("p_{k} = {}", got.coefficients[k])),
        None => Ok(()),
    }
}

fn last_cell(csv: &str, level: &str) -> Option<f64> {
    csv.lines()
        .rfind(|l| l.starts_with(&format!("{level},")))?
        .rsplit(',')
        .next()?
        .parse()
        .ok()
}

fn column(line: &str, index: usize) -> Option<f64> {
    line.split(',').nth(index)?.parse().ok()
}

const SIGNATURE_COUNTS: &[(&str, u64)] = &[
    ("1", 1),
    (",1", 1),
    ("2", 2),
    (",2", 2),
    ("1,1", 2),
    ("3", 6),
    (",3", 5),
    ("1,2", 6),
    ("2,1", 6),
    ("4", 23),
    (",4", 14),
    ("1[1]1", 3),
    ("1,3", 20),
    ("2,2", 23),
    ("3,1", 23),
    ("5", 103),
    (",5", 42),
    ("1[1]2", 8),
    ("1[2]1", 8),
    ("1,4", 70),
    (",1[1]1", 3),
    ("2[1]1", 12),
    ("2,3", 92),
    ("3,2", 103),
    ("4,1", 103),
    ("6", 513),
];

fn signature_trace() -> Outcome {
    let start = Instant::now();
    let mut wrong = Vec::new();
    for &(sig, want) in SIGNATURE_COUNTS {
        let r = run(&["sig", "count", sig]);
        if r.stdout().trim() != want.to_string() {
            wrong.push(format!("f({sig}) = {}", r.stdout().trim()));
        }
    }
    let per_call = start.elapsed() / SIGNATURE_COUNTS.len() as u32;
    Outcome::new(
        wrong.is_empty() && per_call < Duration::from_secs(1),
        if wrong.is_empty() {
            format!(
                "{} values exact, {per_call:.2?} per call",
                SIGNATURE_COUNTS.len()
            )
        } else {
            wrong.join("; ")
        },
    )
}

fn reference_enumeration() -> Outcome {
    let small = run(&["enumerate", "--n", "16"]);
    let small_ok = small.ok() && matches_reference(&small.stdout(), 16).is_ok();
    let mut detail = format!("n=16 {:.1?}", small.elapsed);
    if !small_ok || small.elapsed > Duration::from_secs(10) {
        return Outcome::new(false, format!("{detail}, matches={small_ok}"));
    }

    let full = run(&["enumerate", "--n", "24"]);
    let checked = if full.ok() {
        matches_reference(&full.stdout(), 24)
    } else {
        Err(format!("exit {:?}", full.code()))
    };
    let rss = peak_child_rss();
    let _ = write!(
        detail,
        "; n=24 {:.0?}, peak {} MB",
        full.elapsed,
        rss / (1 << 20)
    );
    if let Err(e) = &checked {
        let _ = write!(detail, ", mismatch: {e}");
    }
    let mut pass =
        checked.is_ok() && full.elapsed < Duration::from_secs(600) && rss < 4 * (1u64 << 30);

    if std::env::var_os("AVOID1324_STRETCH").is_some() {
        let stretch = run(&["enumerate", "--n", "28"]);
        let hit = stretch.ok() && matches_reference(&stretch.stdout(), 28).is_ok();
        let _ = write!(detail, "; n=28 {:.0?} matches={hit}", stretch.elapsed);
    }
    pass &= small_ok;
    Outcome::new(pass, detail)
}

fn oracle_equivalence() -> Outcome {
    let runs = [
        (
            "1324",
            "11",
            run(&["verify", "--max-n", "11", "--pattern", "1324"]),
        ),
        (
            "1234",
            "10",
            run(&["verify", "--max-n", "10", "--pattern", "1234"]),
        ),
        (
            "1342",
            "10",
            run(&["verify", "--max-n", "10", "--pattern", "1342"]),
        ),
    ];
    let failed: Vec<String> = runs
        .iter()
        .filter(|(_, _, r)| !r.ok())
        .map(|(p, n, r)| format!("{p} to {n} exit {:?}", r.code()))
        .collect();
    Outcome::new(
        failed.is_empty(),
        if failed.is_empty() {
            "1324 to 11, 1234 and 1342 to 10 agree".to_string()
        } else {
            failed.join("; ")
        },
    )
}

fn integrity() -> Outcome {
    let bigint = run(&["enumerate", "--n", "16", "--mode", "bigint"]).stdout();
    let crt = run(&["enumerate", "--n", "16", "--mode", "crt"]).stdout();
    let modes_agree = data_lines(&bigint) == data_lines(&crt);

    let dir = tempfile::tempdir().unwrap();
    let manifests = dir.path().join("runs");
    let primes = "4611686018427387847,4611686018427387817,1000000007";
    let checked = run(&[
        "enumerate",
        "--n",
        "16",
        "--primes",
        primes,
        "--manifest-dir",
        manifests.to_str().unwrap(),
    ]);
    let m = |p: &str| manifests.join(format!("manifest-{p}.txt"));
    let combined = run(&[
        "crt-combine",
        "--in",
        m("4611686018427387847").to_str().unwrap(),
        m("4611686018427387817").to_str().unwrap(),
        "--check",
        m("1000000007").to_str().unwrap(),
    ]);
    let check_ok =
        checked.ok() && combined.ok() && data_lines(&combined.stdout()) == data_lines(&bigint);

    let variants = [
        vec!["--memo-prob", "0.3", "--seed", "11"],
        vec!["--factorize", "off"],
        vec!["--memo-prob", "0.3", "--factorize", "off", "--seed", "12"],
    ];
    let invariant = variants.iter().all(|extra| {
        let mut args = vec!["enumerate", "--n", "16"];
        args.extend(extra.iter().copied());
        run(&args).stdout() == crt
    });
    Outcome::new(
        modes_agree && check_ok && invariant,
        format!("crt=bigint {modes_agree}, check prime {check_ok}, memo/factorize invariant {invariant}"),
    )
}

fn ratio_tableau() -> Outcome {
    let r = run(&[
        "analyze",
        "bs",
        "--w",
        "0.5",
        "--lmax",
        "3",
        "--in",
        REFERENCE_SERIES,
    ]);
    let out = r.stdout();
    let want = [12.83193533, 11.66629498, 11.61124940];
    let got: Vec<Option<f64>> = ["1", "2", "3"].iter().map(|l| last_cell(&out, l)).collect();
    let pass = r.ok()
        && r.elapsed < Duration::from_secs(1)
        && got
            .iter()
            .zip(want)
            .all(|(g, w)| g.is_some_and(|g| (g - w).abs() <= 1e-3));
    Outcome::new(pass, format!("{got:?} in {:.0?}", r.elapsed))
}

fn renormalized_tableau() -> Outcome {
    let transformed = run(&["analyze", "transform", "--in", REFERENCE_SERIES]);
    let r = run_with_input(
        &["analyze", "bs", "--w", "1", "--lmax", "2"],
        Some(&transformed.output.stdout),
    );
    let out = r.stdout();
    let want = [11.63499412, 11.62202312];
    let got: Vec<Option<f64>> = ["1", "2"].iter().map(|l| last_cell(&out, l)).collect();
    let pass = transformed.ok()
        && r.ok()
        && got
            .iter()
            .zip(want)
            .all(|(g, w)| g.is_some_and(|g| (g - w).abs() <= 5e-3));
    Outcome::new(pass, format!("{got:?}"))
}

fn da_band() -> Outcome {
    let transformed = run(&["analyze", "transform", "--in", REFERENCE_SERIES]);
    let scan = run_with_input(
        &["analyze", "da", "--order", "3", "--lmax", "10"],
        Some(&transformed.output.stdout),
    );
    let out = scan.stdout();
    let all = out.lines().find(|l| l.starts_with("all,")).unwrap_or("");
    let (root, rho) = (column(all, 1), column(all, 2));
    let root_ok = root.is_some_and(|x| (0.0861..=0.0862).contains(&x));
    let rho_ok = rho.is_some_and(|x| (-2.05..=-1.90).contains(&x));

    let raw = run(&[
        "analyze",
        "da",
        "--order",
        "3",
        "--lmax",
        "10",
        "--in",
        REFERENCE_SERIES,
    ])
    .stdout();
    let canary = raw.contains("# canary: non-algebraic");
    Outcome::new(
        scan.ok() && root_ok && rho_ok && canary,
        format!(
            "mean root {} (band {root_ok}), mean exponent {} (band {rho_ok}), raw canary fires {canary}",
            root.map_or("none".into(), |x| format!("{x:.6}")),
            rho.map_or("none".into(), |x| format!("{x:.3}")),
        ),
    )
}

fn da_control() -> Outcome {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    for n in 0..30u64 {
        writeln!(file, "{n}\t{}", p1342(n)).unwrap();
    }
    let path = file.path().to_str().unwrap().to_string();
    let r = run(&[
        "analyze",
        "da",
        "--order",
        "2",
        "--lmax",
        "3",
        "--homogeneous",
        "--in",
        &path,
    ]);
    let out = r.stdout();
    let all = out.lines().find(|l| l.starts_with("all,")).unwrap_or("");
    let (root, rho) = (column(all, 1), column(all, 2));
    let pass = r.ok()
        && root.is_some_and(|x| (x - 0.125).abs() <= 1e-6)
        && rho.is_some_and(|x| (x - 1.5).abs() <= 0.01);
    Outcome::new(pass, format!("root {root:?}, exponent {rho:?}"))
}

fn fit_bands() -> Outcome {
    let series = CoefficientSeries::from_table(&reference());
    let quad = fit_log_quad(&series).unwrap();
    // the largest windows, pair-extrapolated in 1/k
    let c1 = quad
        .extrapolate(0, 1.0)
        .ok()
        .and_then(|s| s.last())
        .map(|p| p.1);
    let c2 = quad
        .extrapolate(1, 1.0)
        .ok()
        .and_then(|s| s.last())
        .map(|p| p.1);
    let ratio = fit_ratio_triple(&series.ratios().unwrap(), 11.60).unwrap();
    let r1 = ratio.last().map(|w| w.coefficients[0]);
    let pass = c1.is_some_and(|c| (2.44..=2.46).contains(&c))
        && c2.is_some_and(|c| (-3.3..=-3.1).contains(&c))
        && r1.is_some_and(|c| (-1.68..=-1.55).contains(&c));
    Outcome::new(
        pass,
        format!("log fit c1 {c1:?} c2 {c2:?}; ratio fit c1 {r1:?}"),
    )
}

fn conclusion() -> Outcome {
    let r = run(&[
        "analyze",
        "asym",
        "--params",
        "9.5,11.60,0.0398,0.5,-1.1",
        "--n",
        "1000",
    ]);
    let out = r.stdout();
    let log10 = out.lines().nth(1).and_then(|l| column(l, 0));
    Outcome::new(
        r.ok() && log10.is_some_and(|x| (1017.0..=1018.5).contains(&x)),
        format!("log10 p_1000 = {log10:?}"),
    )
}

fn walk(n: u32, choices: &[u32]) -> Signature {
    let mut sig = Signature::fresh(n);
    for &c in choices {
        if sig.total() <= 1 {
            break;
        }
        let p = sig
            .placements()
            .nth((c % sig.available()) as usize)
            .unwrap();
        sig = sig.place(p).unwrap();
    }
    sig
}

fn reachable(max_n: u32) -> impl Strategy<Value = Signature> {
    (1..=max_n, prop::collection::vec(any::<u32>(), 0..64)).prop_map(|(n, c)| walk(n, &c))
}

fn raw_signature() -> impl Strategy<Value = RawSignature> {
    let leaf = (0u32..4).prop_map(Item::Gap);
    let item = leaf.prop_recursive(4, 32, 4, |inner| {
        prop::collection::vec(inner, 0..4).prop_map(Item::Bracket)
    });
    (0u32..4, prop::collection::vec(item, 0..6))
        .prop_map(|(below, rest)| RawSignature::new(below, rest))
}

fn q(num: i64) -> BigRational {
    BigRational::from_integer(num.into())
}

/// `None` when the series also satisfies other equations of this shape, as
/// polynomial solutions do, so that no fit is unique.
fn planted_ode_recovered(root_num: i64, root_den: i64, q0: i64, q1: i64) -> Option<bool> {
    // (1 - x/root) F'' + q1 F' + q0 F = 1, F(0) = 1, F'(0) = 1
    let inv_root = BigRational::new(root_den.into(), root_num.into());
    let mut f = vec![q(1), q(1)];
    for m in 0..28usize {
        let m_big = BigInt::from(m);
        let mut acc = if m == 0 { q(1) } else { q(0) };
        acc -= q(q0) * &f[m];
        acc -= q(q1) * BigRational::from_integer(&m_big + 1) * &f[m + 1];
        let lag = BigRational::from_integer(&m_big * (&m_big + 1));
        acc += &inv_root * lag * &f[m + 1];
        f.push(acc / BigRational::from_integer((&m_big + 1) * (&m_big + 2)));
    }
    let model = match fit_da(&f, 2, &[0, 0, 1], Some(0)) {
        Err(AnalysisError::DegenerateSystem { nullity }) if nullity > 1 => return None,
        Err(_) => return Some(false),
        Ok(model) => model,
    };
    let want = root_num as f64 / root_den as f64;
    Some(
        model.residual_is_zero(&f)
            && physical_root(&model).is_ok_and(|r| (r - want).abs() < 1e-9 * want.max(1.0)),
    )
}

fn property_suites() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |name: &str, result: Result<(), String>| {
        if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
    };
    let config = |cases| Config {
        failure_persistence: None,
        ..Config::with_cases(cases)
    };
    let runner = || {
        TestRunner::new_with_rng(
            config(256),
            TestRng::deterministic_rng(RngAlgorithm::ChaCha),
        )
    };

    let exhaustive = (0..=10)
        .flat_map(all_signatures)
        .find(|s| encode(s).ok().and_then(|k| decode(&k).ok()).as_ref() != Some(s));
    check(
        "codec exhaustive",
        exhaustive.map_or(Ok(()), |s| Err(s.to_string())),
    );
    check(
        "codec random",
        runner()
            .run(&reachable(63), |s| {
                if let Ok(key) = encode(&s) {
                    prop_assert_eq!(decode(&key).unwrap(), s);
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    check(
        "canonicalize idempotence",
        runner()
            .run(&raw_signature(), |raw| {
                let once = canonicalize(raw);
                let again = canonicalize(RawSignature::new(once.below(), once.rest().to_vec()));
                prop_assert_eq!(again, once);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    check(
        "children law",
        runner()
            .run(&reachable(40), |s| {
                let kids = s.children().unwrap();
                prop_assert_eq!(kids.len() as u32, s.available());
                prop_assert!(kids.iter().all(|k| k.total() + 1 == s.total()));
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    check(
        "parse/format identity",
        runner()
            .run(&reachable(63), |s| {
                prop_assert_eq!(s.to_string().parse::<Signature>().unwrap(), s);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    check(
        "planted ratio fit",
        runner()
            .run(
                &(-2.0f64..2.0, -1.0f64..1.0, -1.0f64..1.0, 2.0f64..15.0),
                |(c1, c2, c3, mu)| {
                    let ratios = RealSeries::new(
                        1,
                        (1..=40)
                            .map(|j| {
                                let j = j as f64;
                                mu * (1.0 + c1 / j.sqrt() + c2 / j + c3 * j.powf(-1.5))
                            })
                            .collect(),
                    );
                    for w in fit_ratio_triple(&ratios, mu).unwrap().windows {
                        for (got, want) in w.coefficients.iter().zip([c1, c2, c3]) {
                            prop_assert!((got - want).abs() < 1e-9);
                        }
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );
    check(
        "planted log fits",
        runner()
            .run(
                &(-4.0f64..1.0, -2.0f64..2.0, -1.0f64..3.0, 2.0f64..15.0),
                |(c1, c2, c3, mu)| {
                    // planted in exact logs, so both fits see the same data
                    let ln: Vec<f64> = (1..=20)
                        .map(|n| {
                            let n = n as f64;
                            n * mu.ln() + c1 * n.sqrt() + c2 * n.ln() + c3
                        })
                        .collect();
                    let series = CoefficientSeries::float(1, ln.iter().map(|l| l.exp()).collect());
                    for w in fit_log_triple_mu(&series, mu).unwrap().windows {
                        for (got, want) in w.coefficients.iter().zip([c1, c2, c3]) {
                            prop_assert!((got - want).abs() < 1e-9);
                        }
                    }
                    for w in fit_log_quad(&series).unwrap().windows {
                        prop_assert!((w.coefficients[0] - mu.ln()).abs() < 1e-6);
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );
    check(
        "planted ODE",
        TestRunner::new_with_rng(config(48), TestRng::deterministic_rng(RngAlgorithm::ChaCha))
            .run(
                &(1i64..9, 1i64..5, -3i64..=3, -3i64..=3),
                |(a, b, q0, q1)| {
                    let recovered = planted_ode_recovered(a, b, q0, q1);
                    prop_assume!(recovered.is_some());
                    prop_assert!(recovered.unwrap());
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );
    for sigma in [1.0 / 3.0, 0.5, 2.0 / 3.0] {
        let params = AsymptoticParams::new(1.0, 11.6, 0.04, sigma, 0.0);
        let values = (1..=200)
            .map(|n| params.ln_value(n as f64).unwrap().exp())
            .collect();
        let series = CoefficientSeries::float(1, values);
        let gradient = sigma_free(&series)
            .and_then(|d| loglog_gradient(&d))
            .map_err(|e| e.to_string())
            .and_then(|g| g.last().map(|p| p.1).ok_or_else(|| "empty".to_string()));
        check(
            &format!("sigma {sigma:.3}"),
            gradient.and_then(|g| {
                let estimate = g + 2.0;
                if (estimate - sigma).abs() < 0.05 {
                    Ok(())
                } else {
                    Err(format!("estimated {estimate}"))
                }
            }),
        );
    }
    Outcome::new(
        failures.is_empty(),
        if failures.is_empty() {
            "codec, canonical form, children, parsing, planted fits, planted ODE, sigma recovery"
                .to_string()
        } else {
            failures.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, signature_trace),
        (2, reference_enumeration),
        (3, oracle_equivalence),
        (4, integrity),
        (5, ratio_tableau),
        (6, renormalized_tableau),
        (7, da_band),
        (8, da_control),
        (9, fit_bands),
        (10, conclusion),
        (11, property_suites),
    ];
    let selected: Option<BTreeSet<u32>> = std::env::var("AVOID1324_CRITERIA").ok().map(|list| {
        list.split(',')
            .filter_map(|c| c.trim().parse().ok())
            .collect()
    });
    let wanted = |id: &u32| selected.as_ref().is_none_or(|s| s.contains(id));
    let mut failed = BTreeSet::new();
    for (id, criterion) in criteria.into_iter().filter(|(id, _)| wanted(id)) {
        let outcome = criterion();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {id}: {verdict} - {}", outcome.detail);
        if !outcome.pass {
            failed.insert(id);
        }
    }
    let known: BTreeSet<u32> = KNOWN_FAILURES.iter().copied().filter(wanted).collect();
    println!("known failures: {known:?}; observed failures: {failed:?}");
    if failed == known {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
