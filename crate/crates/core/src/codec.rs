//! Bit-packed signature keys.
//!
//! Layout, most significant bit first:
//!
//! ```text
//! [6: total] [1: below == 0] { [1: open] [int] [1: close] }*
//! ```
//!
//! The comma-flag bit and the tokens are omitted for the empty signature.
//! When `below > 0` it is the first token, with both bracket bits clear.
//! Integers use a prefix code: `00` = 1, `01` = 2, `10bbb` = 3..10,
//! `11bbbbbb` = 11..74. The key is self-delimiting: decoding stops once the
//! integers read add up to the total, so the zero padding after the last
//! token carries no information.

use std::fmt;

use crate::error::CodecError;
use crate::signature::{canonicalize, Item, RawSignature, Signature};

pub const MAX_TOTAL: u32 = 63;
pub const MAX_GAP: u32 = 74;

/// An encoded signature, left-aligned in a `u128`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitKey {
    bits: u128,
    len: u8,
}

impl BitKey {
    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn from_bits(bits: u128, len: usize) -> Result<Self, CodecError> {
        if len > 128 {
            return Err(CodecError::MalformedKey(format!("{len} bits")));
        }
        Ok(BitKey {
            bits,
            len: len as u8,
        })
    }

    /// Hex of all 128 bits, zero-padded, most significant first.
    pub fn to_hex(&self) -> String {
        format!("{:032x}", self.bits)
    }

    pub fn from_hex(text: &str) -> Result<Self, CodecError> {
        let bits = u128::from_str_radix(text.trim().trim_start_matches("0x"), 16)
            .map_err(|e| CodecError::MalformedKey(e.to_string()))?;
        Ok(BitKey { bits, len: 128 })
    }

    /// The key as a string of `0`/`1`, only the meaningful bits.
    pub fn to_binary(&self) -> String {
        (0..self.len)
            .map(|i| {
                if self.bits >> (127 - i as u32) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

impl fmt::Display for BitKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

struct Writer {
    bits: u128,
    len: u32,
}

impl Writer {
    fn put(&mut self, value: u32, width: u32) -> Result<(), CodecError> {
        if self.len + width > 128 {
            return Err(CodecError::EncodingOverflow("more than 128 bits".into()));
        }
        if width > 0 {
            self.bits |= (value as u128) << (128 - self.len - width);
        }
        self.len += width;
        Ok(())
    }

    fn int(&mut self, v: u32) -> Result<(), CodecError> {
        match v {
            1 => self.put(0b00, 2),
            2 => self.put(0b01, 2),
            3..=10 => self.put((0b10 << 3) | (v - 3), 5),
            11..=MAX_GAP => self.put((0b11 << 6) | (v - 11), 8),
            _ => Err(CodecError::EncodingOverflow(format!(
                "integer {v} outside 1..={MAX_GAP}"
            ))),
        }
    }

    fn token(&mut self, open: bool, v: u32, close: bool) -> Result<(), CodecError> {
        self.put(open as u32, 1)?;
        self.int(v)?;
        self.put(close as u32, 1)
    }
}

/// Encodes a canonical signature into at most 128 bits.
pub fn encode(sig: &Signature) -> Result<BitKey, CodecError> {
    let total = sig.total();
    if total > MAX_TOTAL {
        return Err(CodecError::EncodingOverflow(format!(
            "total {total} exceeds {MAX_TOTAL}"
        )));
    }
    let mut w = Writer { bits: 0, len: 0 };
    w.put(total, 6)?;
    if total > 0 {
        w.put((sig.below() == 0) as u32, 1)?;
        if sig.below() > 0 {
            w.token(false, sig.below(), false)?;
        }
        write_items(&mut w, sig.rest(), false, false)?;
    }
    Ok(BitKey {
        bits: w.bits,
        len: w.len as u8,
    })
}

/// Emits the gaps of `items` in order. `open`/`close` mark whether the
/// enclosing bracket starts before the first / ends after the last gap.
fn write_items(w: &mut Writer, items: &[Item], open: bool, close: bool) -> Result<(), CodecError> {
    let last = items.len().saturating_sub(1);
    for (i, it) in items.iter().enumerate() {
        let o = open && i == 0;
        let c = close && i == last;
        match it {
            Item::Gap(g) => w.token(o, *g, c)?,
            Item::Bracket(inner) => {
                // A canonical bracket never starts or ends with a bracket, so
                // no gap ever needs two open or two close marks.
                if o || c {
                    return Err(CodecError::EncodingOverflow(
                        "signature is not canonical".into(),
                    ));
                }
                write_items(w, inner, true, true)?;
            }
        }
    }
    Ok(())
}

struct Reader {
    bits: u128,
    pos: u32,
}

impl Reader {
    fn take(&mut self, width: u32) -> Result<u32, CodecError> {
        if self.pos + width > 128 {
            return Err(CodecError::MalformedKey("ran past 128 bits".into()));
        }
        let v = if width == 0 {
            0
        } else {
            ((self.bits << self.pos) >> (128 - width)) as u32
        };
        self.pos += width;
        Ok(v)
    }

    fn int(&mut self) -> Result<u32, CodecError> {
        Ok(match self.take(2)? {
            0b00 => 1,
            0b01 => 2,
            0b10 => 3 + self.take(3)?,
            _ => 11 + self.take(6)?,
        })
    }
}

/// Decodes a key produced by [`encode`].
pub fn decode(key: &BitKey) -> Result<Signature, CodecError> {
    let mut r = Reader {
        bits: key.bits,
        pos: 0,
    };
    let total = r.take(6)?;
    if total == 0 {
        return finish(&r, key, Signature::empty());
    }
    let comma_first = r.take(1)? == 1;
    let mut sum = 0;
    let mut below = 0;
    let mut stack: Vec<Vec<Item>> = vec![Vec::new()];
    let mut first = true;
    while sum < total {
        let open = r.take(1)? == 1;
        let v = r.int()?;
        let close = r.take(1)? == 1;
        sum += v;
        if sum > total {
            return Err(CodecError::MalformedKey(format!(
                "integers sum past total {total}"
            )));
        }
        if first && !comma_first {
            if open || close {
                return Err(CodecError::MalformedKey(
                    "bracket around the below count".into(),
                ));
            }
            below = v;
            first = false;
            continue;
        }
        first = false;
        if open {
            stack.push(Vec::new());
        }
        stack.last_mut().expect("non-empty").push(Item::Gap(v));
        if close {
            if stack.len() < 2 {
                return Err(CodecError::MalformedKey("unbalanced close".into()));
            }
            let inner = stack.pop().expect("checked");
            stack
                .last_mut()
                .expect("checked")
                .push(Item::Bracket(inner));
        }
    }
    if stack.len() != 1 {
        return Err(CodecError::MalformedKey("unbalanced open".into()));
    }
    let raw = RawSignature::new(below, stack.pop().expect("one level"));
    let sig = canonicalize(raw.clone());
    if sig.below() != raw.below || sig.rest() != raw.rest.as_slice() {
        return Err(CodecError::MalformedKey(
            "decodes to a non-canonical signature".into(),
        ));
    }
    finish(&r, key, sig)
}

fn finish(r: &Reader, key: &BitKey, sig: Signature) -> Result<Signature, CodecError> {
    let rest = if r.pos >= 128 { 0 } else { key.bits << r.pos };
    if rest != 0 {
        return Err(CodecError::MalformedKey("trailing bits set".into()));
    }
    Ok(sig)
}
