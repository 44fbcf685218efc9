//! Bit strings and the self-delimiting length code that frames machine indexes.
//!
//! A frame for a payload of `c` bits is `0^L 1 B x`, where `L = floor(log2(c + 1))`
//! and `B` holds the low `L` bits of `c + 1` (most-significant first). This is an
//! Elias-gamma frame on `c + 1` followed by the payload, so the empty string
//! frames to `"1"` and the family is prefix-free for every `c >= 0`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite sequence of bits. Ordered by length first, then lexicographically.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// `n` copies of `bit`.
    pub fn repeat(bit: bool, n: usize) -> Self {
        Self { bits: vec![bit; n] }
    }

    /// Expands every byte into 8 bits, most-significant first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let bits = bytes
            .iter()
            .flat_map(|&b| (0..8).rev().map(move |k| (b >> k) & 1 == 1))
            .collect();
        Self { bits }
    }

    /// Parses ASCII `'0'`/`'1'`, skipping ASCII whitespace.
    pub fn parse_ascii(text: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for (pos, ch) in text.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_ascii_whitespace() => {}
                c => {
                    return Err(Error::Domain(format!(
                        "invalid bit character {c:?} at position {pos}"
                    )))
                }
            }
        }
        Ok(Self { bits })
    }

    /// The low `width` bits of `value`, most-significant first.
    pub fn from_uint(value: u64, width: usize) -> Self {
        assert!(width <= 64);
        let bits = (0..width).rev().map(|k| (value >> k) & 1 == 1).collect();
        Self { bits }
    }

    /// Every bit string of length exactly `n`, in lexicographic order.
    pub fn all_of_len(n: usize) -> impl Iterator<Item = BitString> {
        assert!(n < 64);
        (0u64..(1u64 << n)).map(move |v| BitString::from_uint(v, n))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString::from_bits(self.bits[start..end].to_vec())
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        self.bits.starts_with(&prefix.bits)
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("BitString(ε)")
        } else {
            write!(f, "BitString({self})")
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_ascii(s)
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        Self::from_bits(bits.to_vec())
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bits(iter.into_iter().collect())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        BitString::parse_ascii(&s).map_err(serde::de::Error::custom)
    }
}

/// A payload together with its self-delimiting encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdFrame {
    pub payload: BitString,
    pub encoded: BitString,
}

impl SdFrame {
    pub fn new(payload: BitString) -> Self {
        let encoded = encode_sd(&payload);
        Self { payload, encoded }
    }
}

#[inline]
pub(crate) fn floor_log2(v: u64) -> u32 {
    debug_assert!(v > 0);
    63 - v.leading_zeros()
}

/// Length of the frame around a `c`-bit payload: `c + 2*floor(log2(c+1)) + 1`.
#[inline]
pub fn sd_len(c: usize) -> usize {
    c + 2 * floor_log2(c as u64 + 1) as usize + 1
}

pub fn encode_sd(x: &BitString) -> BitString {
    let c1 = x.len() as u64 + 1;
    let width = floor_log2(c1) as usize;
    let mut out = Vec::with_capacity(sd_len(x.len()));
    out.extend(std::iter::repeat_n(false, width));
    out.push(true);
    out.extend((0..width).rev().map(|k| (c1 >> k) & 1 == 1));
    out.extend_from_slice(x.bits());
    BitString::from_bits(out)
}

/// Random-access view of a run of bits; implemented for slices and for
/// words packed most-significant-first.
pub(crate) trait BitSource: Copy {
    fn bit_len(self) -> usize;
    fn bit(self, i: usize) -> bool;
    fn sub(self, start: usize, end: usize) -> Self;
}

impl BitSource for &[bool] {
    #[inline]
    fn bit_len(self) -> usize {
        self.len()
    }

    #[inline]
    fn bit(self, i: usize) -> bool {
        self[i]
    }

    #[inline]
    fn sub(self, start: usize, end: usize) -> Self {
        &self[start..end]
    }
}

/// Up to 64 bits right-aligned in a word; bit 0 is the most significant of the `len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Packed {
    pub len: u32,
    pub word: u64,
}

impl Packed {
    #[inline]
    pub fn new(word: u64, len: u32) -> Self {
        debug_assert!(len <= 64);
        Self {
            len,
            word: word & low_mask(len),
        }
    }

    pub fn to_bitstring(self) -> BitString {
        BitString::from_uint(self.word, self.len as usize)
    }

    pub fn from_bitstring(x: &BitString) -> Option<Self> {
        if x.len() > 64 {
            return None;
        }
        let word = x.bits().iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Some(Self {
            len: x.len() as u32,
            word,
        })
    }
}

#[inline]
pub(crate) fn low_mask(len: u32) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl BitSource for Packed {
    #[inline]
    fn bit_len(self) -> usize {
        self.len as usize
    }

    #[inline]
    fn bit(self, i: usize) -> bool {
        (self.word >> (self.len as usize - 1 - i)) & 1 == 1
    }

    #[inline]
    fn sub(self, start: usize, end: usize) -> Self {
        let len = (end - start) as u32;
        let shift = self.len as usize - end;
        let word = if shift >= 64 { 0 } else { self.word >> shift };
        Self {
            len,
            word: word & low_mask(len),
        }
    }
}

/// Reads the frame at the head of `bits`, returning `(payload_start, payload_len)`.
pub(crate) fn read_frame_header<B: BitSource>(bits: B) -> Result<(usize, usize)> {
    let n = bits.bit_len();
    let width = (0..n).find(|&i| bits.bit(i)).ok_or(Error::TruncatedFrame(
        "stream ends inside the leading zeros",
    ))?;
    if width > 62 {
        return Err(Error::TruncatedFrame("length field wider than 62 bits"));
    }
    let start = width + 1;
    if n < start + width {
        return Err(Error::TruncatedFrame("stream ends inside the length bits"));
    }
    let mut c1: u64 = 1;
    for i in start..start + width {
        c1 = (c1 << 1) | bits.bit(i) as u64;
    }
    let len = (c1 - 1) as usize;
    let payload_start = start + width;
    if n - payload_start < len {
        return Err(Error::TruncatedFrame("stream ends inside the payload"));
    }
    Ok((payload_start, len))
}

/// Splits `stream` into the payload of its leading frame and the remaining bits.
pub fn decode_sd(stream: &BitString) -> Result<(BitString, BitString)> {
    let (start, len) = read_frame_header(stream.bits())?;
    Ok((
        stream.slice(start, start + len),
        stream.slice(start + len, stream.len()),
    ))
}
