use avoid1324::signature::all_signatures;
use avoid1324::{
    count_signature, prefix_to_signature, BigCount, MemoStore, Modulus, Signature, DEFAULT_PRIMES,
};
use num_bigint::BigUint;

fn sig(text: &str) -> Signature {
    text.parse().unwrap()
}

fn count(s: &Signature) -> u64 {
    let mut store = MemoStore::always();
    count_signature(
        s,
        &mut store,
        &Modulus::new(DEFAULT_PRIMES[0]).unwrap(),
        true,
    )
    .unwrap()
}

// (signature, children in placement order, count) for every signature needed up to n = 6.
const TRACE: &[(&str, &[&str], u64)] = &[
    ("1", &[","], 1),
    (",1", &[","], 1),
    ("2", &[",1", "1"], 2),
    (",2", &[",1", ",1"], 2),
    ("1,1", &[",1", "1"], 2),
    ("3", &[",2", "1,1", "2"], 6),
    (",3", &[",2", "[1]1", ",2"], 5),
    ("1,2", &[",2", "1,1", "1,1"], 6),
    ("2,1", &[",2", "1,1", "2"], 6),
    ("4", &[",3", "1,2", "2,1", "3"], 23),
    (",4", &[",3", "[1]2", "[2]1", ",3"], 14),
    ("1[1]1", &["[1]1", "1,1"], 3),
    ("1,3", &[",3", "1,2", "1[1]1", "1,2"], 20),
    ("2,2", &[",3", "1,2", "2,1", "2,1"], 23),
    ("3,1", &[",3", "1,2", "2,1", "3"], 23),
    ("5", &[",4", "1,3", "2,2", "3,1", "4"], 103),
    (",5", &[",4", "[1]3", "[2]2", "[3]1", ",4"], 42),
    ("1[1]2", &["[1]2", "1[1]1", "1[1]1"], 8),
    ("1[2]1", &["[2]1", "1,2"], 8),
    ("1,4", &[",4", "1,3", "1[1]2", "1[2]1", "1,3"], 70),
    (",1[1]1", &["[1]1", ",2"], 3),
    ("2[1]1", &[",1[1]1", "1[1]1", "2,1"], 12),
    ("2,3", &[",4", "1,3", "2,2", "2[1]1", "2,2"], 92),
    ("3,2", &[",4", "1,3", "2,2", "3,1", "3,1"], 103),
    ("4,1", &[",4", "1,3", "2,2", "3,1", "4"], 103),
    ("6", &[",5", "1,4", "2,3", "3,2", "4,1", "5"], 513),
];

#[test]
fn full_trace_up_to_six() {
    for &(s, kids, value) in TRACE {
        let parent = sig(s);
        let expected: Vec<Signature> = kids.iter().map(|k| sig(k)).collect();
        assert_eq!(parent.children().unwrap(), expected, "children of {s}");
        assert_eq!(count(&parent), value, "f({s})");
    }
}

#[test]
fn trace_covers_every_signature_reached_from_six() {
    // Every non-trivial signature reachable from "6" with factorization applied
    // appears in the trace, apart from the pieces of split signatures.
    let listed: Vec<Signature> = TRACE.iter().map(|(s, _, _)| sig(s)).collect();
    for s in all_signatures(6) {
        if s.total() <= 1 || s.factor_split().len() > 1 {
            continue;
        }
        let split_piece = s.below() == 0 && s.rest().len() == 1;
        assert!(
            listed.contains(&s) || split_piece,
            "{s} missing from the trace"
        );
    }
}

#[test]
fn factor_split_examples() {
    assert_eq!(sig("[1]1").factor_split(), vec![sig(",1"), sig(",1")]);
    assert_eq!(sig("[2]1").factor_split(), vec![sig(",2"), sig(",1")]);
    assert_eq!(sig("1[1]1").factor_split(), vec![sig("1[1]1")]);
}

#[test]
fn prefixes_of_size_twenty() {
    let rows: &[(&[u32], &str)] = &[
        (&[], "20"),
        (&[11], "10,9"),
        (&[11, 14], "10,[2]6"),
        (&[11, 14, 5], "4,5[2]6"),
        (&[11, 14, 5, 9], "4,[3]1[2]6"),
        (&[11, 14, 5, 9, 15], "4,[3][3]5"),
    ];
    for (prefix, expected) in rows {
        assert_eq!(
            prefix_to_signature(20, prefix).unwrap(),
            sig(expected),
            "{prefix:?}"
        );
    }
    assert_eq!(sig("4,[[3]1[2]]5"), sig("4,[3][3]5"));
    assert_eq!(sig("4,[3][3]5").total(), 15);
}

#[test]
fn counts_agree_across_rings() {
    for s in all_signatures(7) {
        let mut store = MemoStore::always();
        let exact = count_signature(&s, &mut store, &BigCount, false).unwrap();
        assert_eq!(exact, BigUint::from(count(&s)), "{s}");
    }
}
