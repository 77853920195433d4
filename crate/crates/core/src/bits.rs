//! Bit sequences and fixed-width system states.
//!
//! Bit index 0 is always the leftmost bit of a rendering, and bytes are
//! unpacked most significant bit first.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Arbitrary-length ordered sequence of bits.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            bits: Vec::with_capacity(capacity),
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    /// Unpacks every byte into 8 bits, most significant first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut out = Self::with_capacity(bytes.len() * 8);
        for &b in bytes {
            out.push_uint(u64::from(b), 8);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.bits.get(index).copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: u32) {
        for shift in (0..width).rev() {
            self.bits.push((value >> shift) & 1 == 1);
        }
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    /// Bit `i` of the result is bit `(i + k) mod len` of `self`.
    pub fn rotate_left(&self, k: usize) -> BitString {
        let mut bits = self.bits.clone();
        if !bits.is_empty() {
            let k = k % bits.len();
            bits.rotate_left(k);
        }
        BitString { bits }
    }

    /// Bit `i` of the result is bit `(i + len - k) mod len` of `self`.
    pub fn rotate_right(&self, k: usize) -> BitString {
        let mut bits = self.bits.clone();
        if !bits.is_empty() {
            let k = k % bits.len();
            bits.rotate_right(k);
        }
        BitString { bits }
    }

    pub fn reverse(&self) -> BitString {
        BitString {
            bits: self.bits.iter().rev().copied().collect(),
        }
    }

    /// XOR of all consecutive `n`-bit blocks.
    pub fn xor_fold(&self, n: usize) -> Result<Configuration> {
        if n == 0 || self.is_empty() || !self.len().is_multiple_of(n) {
            return Err(Error::Precondition(format!(
                "cannot fold {} bits into {n}-bit blocks",
                self.len()
            )));
        }
        let mut acc = vec![false; n];
        for block in self.bits.chunks_exact(n) {
            for (a, &b) in acc.iter_mut().zip(block) {
                *a ^= b;
            }
        }
        Configuration::new(BitString { bits: acc })
    }

    /// Values of the consecutive 8-bit blocks, most significant bit first.
    /// A trailing partial block is ignored.
    pub fn bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits
            .chunks_exact(8)
            .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b)))
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

/// Canonical rendering: groups of 8 bits separated by single spaces; the last
/// group may be shorter.
impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, chunk) in self.bits.chunks(8).enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            for &b in chunk {
                f.write_str(if b { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString[{}]({self})", self.len())
    }
}

/// Accepts `0`/`1` with arbitrary whitespace between them.
impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect()
    }
}

/// An `n`-bit system state.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    state: BitString,
}

impl Configuration {
    pub fn new(state: BitString) -> Result<Self> {
        if state.is_empty() {
            return Err(Error::Dimension("configuration must have at least one bit".into()));
        }
        Ok(Self { state })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(BitString::zeros(n))
    }

    /// Number of components.
    pub fn n(&self) -> usize {
        self.state.len()
    }

    pub fn bits(&self) -> &BitString {
        &self.state
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.state.get(index)
    }

    pub(crate) fn flip_unchecked(&mut self, index: usize) {
        let bit = &mut self.state.bits[index];
        *bit = !*bit;
    }

    pub fn hamming(&self, other: &Configuration) -> Result<usize> {
        check_same_n(self, other)?;
        Ok(self
            .state
            .iter()
            .zip(other.state.iter())
            .filter(|(a, b)| a != b)
            .count())
    }

    /// Uppercase hexadecimal, one symbol per 4-bit group.
    pub fn to_hex(&self) -> Result<String> {
        if !self.n().is_multiple_of(4) {
            return Err(Error::Dimension(format!(
                "{} bits cannot be rendered as whole nibbles",
                self.n()
            )));
        }
        Ok(self
            .state
            .as_slice()
            .chunks_exact(4)
            .map(|nib| {
                let v = nib.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b));
                char::from_digit(v, 16).unwrap().to_ascii_uppercase()
            })
            .collect())
    }

    pub fn from_hex(hex: &str) -> Result<Self> {
        let mut bits = BitString::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            bits.push_uint(u64::from(v), 4);
        }
        Self::new(bits)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.state.fmt(f)
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration[{}]({})", self.n(), self.state)
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

pub(crate) fn check_same_n(a: &Configuration, b: &Configuration) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::Dimension(format!("{} bits vs {} bits", a.n(), b.n())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn cfg(s: &str) -> Configuration {
        s.parse().unwrap()
    }

    #[test]
    fn rotate_left_examples() {
        assert_eq!(bs("10110").rotate_left(1), bs("01101"));
        assert_eq!(bs("10110").rotate_left(0), bs("10110"));
        assert_eq!(bs("10110").rotate_left(5), bs("10110"));
        assert_eq!(BitString::new().rotate_left(3), BitString::new());
    }

    #[test]
    fn rotate_right_undoes_left() {
        let s = bs("1011000111");
        assert_eq!(s.rotate_left(3).rotate_right(3), s);
        assert_eq!(bs("10110").rotate_right(1), bs("01011"));
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(bs("110").reverse(), bs("011"));
        assert_eq!(BitString::new().reverse(), BitString::new());
        assert_eq!(bs("11110001").reverse(), bs("10001111"));
    }

    #[test]
    fn xor_fold_examples() {
        let block = bs("1011 0010");
        assert_eq!(block.xor_fold(8).unwrap(), cfg("10110010"));

        let mut twice = block.clone();
        twice.extend_from(&block);
        assert_eq!(twice.xor_fold(8).unwrap(), Configuration::zeros(8).unwrap());

        assert!(matches!(bs("10110").xor_fold(4), Err(Error::Precondition(_))));
        assert!(matches!(BitString::new().xor_fold(4), Err(Error::Precondition(_))));
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(cfg("0000").hamming(&cfg("0000")).unwrap(), 0);
        assert_eq!(cfg("1010").hamming(&cfg("0101")).unwrap(), 4);
        assert_eq!(cfg("1010").hamming(&cfg("1000")).unwrap(), 1);
        assert!(matches!(cfg("10").hamming(&cfg("100")), Err(Error::Dimension(_))));
    }

    #[test]
    fn to_hex_examples() {
        assert_eq!(cfg("00000000").to_hex().unwrap(), "00");
        assert_eq!(cfg("1111").to_hex().unwrap(), "F");
        assert_eq!(cfg("01100011 1010").to_hex().unwrap(), "63A");
        assert!(matches!(cfg("101").to_hex(), Err(Error::Dimension(_))));
    }

    #[test]
    fn canonical_text() {
        let s = bs("101010011010001100101");
        assert_eq!(s.to_string(), "10101001 10100011 00101");
        assert!("10a1".parse::<BitString>().is_err());
        assert_eq!(BitString::new().to_string(), "");
    }

    #[test]
    fn bytes_msb_first() {
        let s = BitString::from_bytes(&[0x01, 0x80, 0xFF]);
        assert_eq!(s.to_string(), "00000001 10000000 11111111");
        assert_eq!(s.bytes().collect::<Vec<_>>(), vec![0x01, 0x80, 0xFF]);
    }

    fn bitstring() -> impl Strategy<Value = BitString> {
        prop::collection::vec(any::<bool>(), 0..200).prop_map(BitString::from)
    }

    proptest! {
        #[test]
        fn rotations_compose(s in bitstring(), a in 0usize..500, b in 0usize..500) {
            prop_assert_eq!(s.rotate_left(a).rotate_left(b), s.rotate_left(a + b));
        }

        #[test]
        fn reverse_is_involution(s in bitstring()) {
            prop_assert_eq!(s.reverse().reverse(), s);
        }

        #[test]
        fn text_round_trip(s in bitstring()) {
            prop_assert_eq!(s.to_string().parse::<BitString>().unwrap(), s);
        }

        #[test]
        fn xor_fold_ignores_block_order(
            blocks in prop::collection::vec(prop::collection::vec(any::<bool>(), 16), 1..8),
            seed in any::<u64>(),
        ) {
            let join = |bs: &[Vec<bool>]| bs.iter().flatten().copied().collect::<BitString>();
            let mut shuffled = blocks.clone();
            // deterministic permutation from the seed
            let len = shuffled.len();
            for i in (1..len).rev() {
                let j = (seed.rotate_left(i as u32) as usize) % (i + 1);
                shuffled.swap(i, j);
            }
            prop_assert_eq!(join(&blocks).xor_fold(16).unwrap(), join(&shuffled).xor_fold(16).unwrap());
        }

        #[test]
        fn hamming_is_a_metric(
            (a, b, c) in (1usize..64).prop_flat_map(|n| {
                let v = || prop::collection::vec(any::<bool>(), n).prop_map(|v| Configuration::new(v.into()).unwrap());
                (v(), v(), v())
            })
        ) {
            let ab = a.hamming(&b).unwrap();
            prop_assert_eq!(ab, b.hamming(&a).unwrap());
            prop_assert_eq!(a.hamming(&a).unwrap(), 0);
            prop_assert_eq!(ab == 0, a == b);
            prop_assert!(ab <= a.hamming(&c).unwrap() + c.hamming(&b).unwrap());
        }

        #[test]
        fn hex_round_trip(
            bits in (1usize..65).prop_flat_map(|k| prop::collection::vec(any::<bool>(), 4 * k))
        ) {
            let c = Configuration::new(bits.into()).unwrap();
            prop_assert_eq!(Configuration::from_hex(&c.to_hex().unwrap()).unwrap(), c);
        }
    }
}
