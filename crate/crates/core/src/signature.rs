//! Canonical signatures for classes of 1324-avoiding permutation prefixes.
//!
//! A signature records how many values remain below the prefix minimum (the
//! part before the comma) and, for the values above it, which runs are still
//! free and which are blocked by a 13 pattern (the bracketed runs). Prefixes
//! with equal signatures have equally many 1324-avoiding completions.
//!
//! Textual form: `4,[3]1[2]6`, `[1]1`, `,3`, `6`. The comma is omitted when a
//! bracket follows it directly, and a signature with nothing after the comma
//! is written as a bare integer.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::SignatureError;

/// One element of a signature, left to right in increasing value order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    /// A run of `count` available values.
    Gap(u32),
    /// Values that may not be used until everything to the right is placed.
    Bracket(Vec<Item>),
}

impl Item {
    pub fn total(&self) -> u32 {
        match self {
            Item::Gap(g) => *g,
            Item::Bracket(inner) => inner.iter().map(Item::total).sum(),
        }
    }
}

/// A signature before simplification. Any shape is accepted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RawSignature {
    pub below: u32,
    pub rest: Vec<Item>,
}

impl RawSignature {
    pub fn new(below: u32, rest: Vec<Item>) -> Self {
        RawSignature { below, rest }
    }
}

/// A signature in canonical form.
///
/// Invariants: no `Gap(0)`, no two adjacent gaps, no empty bracket, no bracket
/// starting or ending with a bracket (at any depth), and the last top-level
/// item is never a bracket.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Signature {
    below: u32,
    rest: Vec<Item>,
}

/// Where the next value of a prefix goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    /// Into the values below the current minimum, leaving `left` values under it.
    Below { left: u32 },
    /// Into the top-level gap at `index` of `rest`, leaving `left` values of that gap under it.
    Gap { index: usize, left: u32 },
}

impl Signature {
    /// The signature of `n` values with nothing placed yet.
    pub fn fresh(n: u32) -> Self {
        Signature {
            below: n,
            rest: Vec::new(),
        }
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn below(&self) -> u32 {
        self.below
    }

    pub fn rest(&self) -> &[Item] {
        &self.rest
    }

    pub fn is_fresh(&self) -> bool {
        self.rest.is_empty()
    }

    /// Number of values still to be placed.
    pub fn total(&self) -> u32 {
        self.below + self.rest.iter().map(Item::total).sum::<u32>()
    }

    /// Number of values that may legally be placed next.
    pub fn available(&self) -> u32 {
        self.below
            + self
                .rest
                .iter()
                .map(|it| match it {
                    Item::Gap(g) => *g,
                    Item::Bracket(_) => 0,
                })
                .sum::<u32>()
    }

    /// Every legal placement, in increasing order of the placed value.
    pub fn placements(&self) -> impl Iterator<Item = Placement> + '_ {
        let below = (0..self.below).map(|left| Placement::Below { left });
        let gaps = self
            .rest
            .iter()
            .enumerate()
            .filter_map(|(index, it)| match it {
                Item::Gap(g) => Some((index, *g)),
                Item::Bracket(_) => None,
            })
            .flat_map(|(index, g)| (0..g).map(move |left| Placement::Gap { index, left }));
        below.chain(gaps)
    }

    /// The signature after placing one value.
    ///
    /// Placing below the minimum makes it the new minimum; the old comma
    /// dissolves. Placing above it forms a 13 pattern with the minimum, so
    /// everything between the minimum and the new value becomes blocked.
    pub fn place(&self, placement: Placement) -> Result<Signature, SignatureError> {
        match placement {
            Placement::Below { left } => {
                if left >= self.below {
                    return Err(SignatureError::InvalidPlacement);
                }
                let right = self.below - 1 - left;
                let mut rest = Vec::with_capacity(self.rest.len() + 1);
                match self.rest.first() {
                    Some(Item::Gap(g)) => {
                        rest.push(Item::Gap(g + right));
                        rest.extend_from_slice(&self.rest[1..]);
                    }
                    _ => {
                        if right > 0 {
                            rest.push(Item::Gap(right));
                        }
                        rest.extend_from_slice(&self.rest);
                    }
                }
                Ok(Signature { below: left, rest })
            }
            Placement::Gap { index, left } => {
                let g = match self.rest.get(index) {
                    Some(Item::Gap(g)) if left < *g => *g,
                    _ => return Err(SignatureError::InvalidPlacement),
                };
                let right = g - 1 - left;
                let mut wrapped = self.rest[..index].to_vec();
                wrapped.push(Item::Gap(left));
                let mut rest = Vec::with_capacity(self.rest.len() - index + 1);
                rest.push(Item::Bracket(wrapped));
                rest.push(Item::Gap(right));
                rest.extend_from_slice(&self.rest[index + 1..]);
                Ok(canonicalize(RawSignature {
                    below: self.below,
                    rest,
                }))
            }
        }
    }

    /// One child per legal placement; duplicates are kept.
    pub fn children(&self) -> Result<Vec<Signature>, SignatureError> {
        if self.total() == 0 {
            return Err(SignatureError::EmptySignature);
        }
        Ok(self
            .placements()
            .map(|p| self.place(p).expect("placement enumerated from self"))
            .collect())
    }

    /// Splits `[A]R` (nothing below the minimum) into independent factors.
    ///
    /// The count of the signature is the product of the counts of the parts.
    pub fn factor_split(&self) -> Vec<Signature> {
        let mut parts = Vec::new();
        self.split_into(&mut parts);
        parts
    }

    fn split_into(&self, parts: &mut Vec<Signature>) {
        if self.below == 0 && self.rest.len() > 1 {
            if let Item::Bracket(inner) = &self.rest[0] {
                canonicalize(RawSignature::new(0, inner.clone())).split_into(parts);
                Signature {
                    below: 0,
                    rest: self.rest[1..].to_vec(),
                }
                .split_into(parts);
                return;
            }
        }
        parts.push(self.clone());
    }

    /// Checks every canonical-form invariant.
    pub fn is_canonical(&self) -> bool {
        fn seq_ok(items: &[Item], top: bool) -> bool {
            if !top {
                if items.is_empty() {
                    return false;
                }
                if matches!(items.first(), Some(Item::Bracket(_)))
                    || matches!(items.last(), Some(Item::Bracket(_)))
                {
                    return false;
                }
            } else if matches!(items.last(), Some(Item::Bracket(_))) {
                return false;
            }
            let mut prev_gap = false;
            for it in items {
                match it {
                    Item::Gap(0) => return false,
                    Item::Gap(_) => {
                        if prev_gap {
                            return false;
                        }
                        prev_gap = true;
                    }
                    Item::Bracket(inner) => {
                        if !seq_ok(inner, false) {
                            return false;
                        }
                        prev_gap = false;
                    }
                }
            }
            true
        }
        seq_ok(&self.rest, true)
    }
}

/// Simplifies a raw signature to canonical form.
///
/// Rules, applied bottom-up to a fixpoint: drop zero gaps, merge adjacent
/// gaps, drop empty brackets, split `[[X]R]` into `[X][R]`, merge `[R[Y]]`
/// into `[RY]`, and at top level drop a trailing bracket (splicing its
/// contents in place).
pub fn canonicalize(raw: RawSignature) -> Signature {
    let mut rest = normalize_seq(raw.rest);
    while let Some(Item::Bracket(_)) = rest.last() {
        let Some(Item::Bracket(inner)) = rest.pop() else {
            unreachable!()
        };
        for it in inner {
            push_flat(&mut rest, it);
        }
    }
    Signature {
        below: raw.below,
        rest,
    }
}

fn normalize_seq(items: Vec<Item>) -> Vec<Item> {
    let mut out = Vec::with_capacity(items.len());
    for it in items {
        match it {
            Item::Gap(_) => push_flat(&mut out, it),
            Item::Bracket(inner) => push_bracket(&mut out, normalize_seq(inner)),
        }
    }
    out
}

/// Appends an item whose inner structure is already canonical, merging gaps.
fn push_flat(out: &mut Vec<Item>, it: Item) {
    match it {
        Item::Gap(0) => {}
        Item::Gap(g) => match out.last_mut() {
            Some(Item::Gap(h)) => *h += g,
            _ => out.push(Item::Gap(g)),
        },
        b @ Item::Bracket(_) => out.push(b),
    }
}

/// Appends `[contents]` where `contents` is a normalized sequence.
fn push_bracket(out: &mut Vec<Item>, mut contents: Vec<Item>) {
    // [R[Y]] -> [RY]; Y is canonical so it does not itself end in a bracket.
    if let Some(Item::Bracket(_)) = contents.last() {
        let Some(Item::Bracket(inner)) = contents.pop() else {
            unreachable!()
        };
        for it in inner {
            push_flat(&mut contents, it);
        }
    }
    if contents.is_empty() {
        return;
    }
    // [[X]R] -> [X][R]
    if let Item::Bracket(_) = contents[0] {
        let tail = contents.split_off(1);
        let head = contents.pop().expect("one element");
        out.push(head);
        push_bracket(out, tail);
        return;
    }
    out.push(Item::Bracket(contents));
}

/// Follows a prefix from the fresh signature of size `n`.
pub fn prefix_to_signature(n: u32, prefix: &[u32]) -> Result<Signature, SignatureError> {
    if n > 63 {
        return Err(SignatureError::TooLarge(n));
    }
    let mut remaining: Vec<u32> = (1..=n).collect();
    let mut sig = Signature::fresh(n);
    for &v in prefix {
        let rank = remaining
            .binary_search(&v)
            .map_err(|_| SignatureError::InvalidPrefixValue(v))?;
        remaining.remove(rank);
        let placement = locate(&sig, rank as u32).ok_or(SignatureError::BlockedPrefix(v))?;
        sig = sig.place(placement)?;
    }
    Ok(sig)
}

/// Maps the rank of a remaining value to its placement, or `None` when blocked.
fn locate(sig: &Signature, rank: u32) -> Option<Placement> {
    if rank < sig.below {
        return Some(Placement::Below { left: rank });
    }
    let mut offset = rank - sig.below;
    for (index, it) in sig.rest.iter().enumerate() {
        let size = it.total();
        if offset < size {
            return match it {
                Item::Gap(_) => Some(Placement::Gap {
                    index,
                    left: offset,
                }),
                Item::Bracket(_) => None,
            };
        }
        offset -= size;
    }
    None
}

/// All canonical signatures reachable from the fresh signature of size `n`.
pub fn all_signatures(n: u32) -> BTreeSet<Signature> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![Signature::fresh(n)];
    while let Some(s) = stack.pop() {
        if !seen.insert(s.clone()) || s.total() == 0 {
            continue;
        }
        for c in s.children().expect("non-empty") {
            if !seen.contains(&c) {
                stack.push(c);
            }
        }
    }
    seen
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[Item]) -> fmt::Result {
    for it in items {
        match it {
            Item::Gap(g) => write!(f, "{g}")?,
            Item::Bracket(inner) => {
                f.write_str("[")?;
                write_items(f, inner)?;
                f.write_str("]")?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rest.is_empty() {
            return write!(f, "{}", self.below);
        }
        if self.below > 0 {
            write!(f, "{}", self.below)?;
        }
        if !matches!(self.rest[0], Item::Bracket(_)) {
            f.write_str(",")?;
        }
        write_items(f, &self.rest)
    }
}

impl FromStr for Signature {
    type Err = SignatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_raw(s).map(canonicalize)
    }
}

/// Parses the textual form without simplifying it.
pub fn parse_raw(text: &str) -> Result<RawSignature, SignatureError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SignatureError::Syntax {
            pos: 0,
            msg: "empty input".into(),
        });
    }
    let bytes = text.as_bytes();
    let mut pos = 0;

    let below = match read_int(bytes, &mut pos)? {
        Some(v) => v,
        None => 0,
    };
    let had_int = pos > 0;
    if pos < bytes.len() && bytes[pos] == b',' {
        pos += 1;
    } else if had_int && pos < bytes.len() && bytes[pos] != b'[' {
        return Err(syntax(pos, "expected ',' or '['"));
    }
    let mut stack: Vec<Vec<Item>> = vec![Vec::new()];
    while pos < bytes.len() {
        match bytes[pos] {
            b'[' => {
                stack.push(Vec::new());
                pos += 1;
            }
            b']' => {
                if stack.len() < 2 {
                    return Err(syntax(pos, "unbalanced ']'"));
                }
                let inner = stack.pop().expect("checked");
                stack
                    .last_mut()
                    .expect("checked")
                    .push(Item::Bracket(inner));
                pos += 1;
            }
            b'0'..=b'9' => {
                let v = read_int(bytes, &mut pos)?.expect("digit present");
                stack.last_mut().expect("non-empty").push(Item::Gap(v));
            }
            _ => return Err(syntax(pos, "unexpected character")),
        }
    }
    if stack.len() != 1 {
        return Err(syntax(pos, "unbalanced '['"));
    }
    Ok(RawSignature {
        below,
        rest: stack.pop().expect("one level"),
    })
}

fn syntax(pos: usize, msg: &str) -> SignatureError {
    SignatureError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn read_int(bytes: &[u8], pos: &mut usize) -> Result<Option<u32>, SignatureError> {
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Ok(None);
    }
    std::str::from_utf8(&bytes[start..*pos])
        .expect("ascii")
        .parse()
        .map(Some)
        .map_err(|_| syntax(start, "integer too large"))
}
