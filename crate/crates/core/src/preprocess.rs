//! Message normalization: encoding, length marking, mirroring, block
//! expansion, and the XOR fold that yields the initial configuration.

use serde::{Deserialize, Serialize};

use crate::bits::{BitString, Configuration};
use crate::error::{Error, Result};
use crate::keystream::Profile;

/// Carrier lengths are always a multiple of this many bits.
pub const BLOCK_BITS: usize = 512;

pub const DEFAULT_DIGEST_BITS: usize = 256;

pub const MAX_DIGEST_BITS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// 7 bits per byte; bytes >= 128 are rejected.
    Ascii7,
    /// 8 bits per byte.
    #[default]
    Raw8,
}

impl Encoding {
    pub fn bits_per_byte(self) -> usize {
        match self {
            Encoding::Ascii7 => 7,
            Encoding::Raw8 => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyMode {
    /// The strategy starts from the first keystream byte.
    #[default]
    Unkeyed,
    /// The strategy starts from `k mod n`.
    Keyed(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HashParams {
    /// Digest length in bits.
    pub n: usize,
    pub encoding: Encoding,
    pub key: KeyMode,
    pub profile: Profile,
}

impl Default for HashParams {
    fn default() -> Self {
        Self {
            n: DEFAULT_DIGEST_BITS,
            encoding: Encoding::Raw8,
            key: KeyMode::Unkeyed,
            profile: Profile::Reference,
        }
    }
}

impl HashParams {
    pub fn new(n: usize) -> Result<Self> {
        let params = Self {
            n,
            ..Self::default()
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_encoding(mut self, encoding: Encoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn with_key(mut self, key: u64) -> Self {
        self.key = KeyMode::Keyed(key);
        self
    }

    pub fn with_profile(mut self, profile: Profile) -> Self {
        self.profile = profile;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(4) || self.n > MAX_DIGEST_BITS {
            return Err(Error::InvalidParams(format!(
                "digest bits must be a multiple of 4 in 4..={MAX_DIGEST_BITS}, got {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Carrier length granularity: `lcm(512, n)`.
    pub fn granularity(&self) -> usize {
        lcm(BLOCK_BITS, self.n)
    }
}

/// Intermediate strings produced while normalizing, kept for auditing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageLog {
    pub encoded: BitString,
    pub marked: BitString,
    pub mirrored: BitString,
    pub expanded: BitString,
}

impl StageLog {
    pub const STAGE_NAMES: [&'static str; 4] = ["encoded", "marked", "mirrored", "expanded"];

    pub fn stages(&self) -> [(&'static str, &BitString); 4] {
        [
            ("encoded", &self.encoded),
            ("marked", &self.marked),
            ("mirrored", &self.mirrored),
            ("expanded", &self.expanded),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedInput {
    /// The carrier string.
    pub d: BitString,
    pub x0: Configuration,
    pub stage_log: StageLog,
}

pub fn encode_message(bytes: &[u8], encoding: Encoding) -> Result<BitString> {
    let width = encoding.bits_per_byte();
    let mut out = BitString::with_capacity(bytes.len() * width);
    for (position, &byte) in bytes.iter().enumerate() {
        if encoding == Encoding::Ascii7 && byte >= 0x80 {
            return Err(Error::Encoding { position, byte });
        }
        out.push_uint(u64::from(byte), width as u32);
    }
    Ok(out)
}

fn bit_width(value: usize) -> u32 {
    usize::BITS - value.leading_zeros()
}

/// `s ‖ 1 ‖ bin(len(s) + 1) ‖ 1`, the length written in its minimal width.
pub fn pad_mark(s: &BitString) -> BitString {
    let marked_len = s.len() + 1;
    let width = bit_width(marked_len);
    let mut out = BitString::with_capacity(marked_len + width as usize + 1);
    out.extend_from(s);
    out.push(true);
    out.push_uint(marked_len as u64, width);
    out.push(true);
    out
}

/// Palindrome of length `2L - 1`: the last bit of `s` is shared.
pub fn mirror(s: &BitString) -> Result<BitString> {
    if s.is_empty() {
        return Err(Error::Precondition("cannot mirror an empty string".into()));
    }
    let mut out = BitString::with_capacity(2 * s.len() - 1);
    out.extend_from(s);
    for bit in s.as_slice()[..s.len() - 1].iter().rev() {
        out.push(*bit);
    }
    Ok(out)
}

/// Repeats `s` cyclically up to the next multiple of `lcm(512, n)`.
pub fn expand_to_blocks(s: &BitString, n: usize) -> Result<BitString> {
    if s.is_empty() {
        return Err(Error::Precondition("cannot expand an empty string".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    let target = round_up(s.len(), lcm(BLOCK_BITS, n));
    Ok(s.as_slice().iter().copied().cycle().take(target).collect())
}

pub fn normalize(message: &[u8], params: &HashParams) -> Result<NormalizedInput> {
    params.validate()?;
    let encoded = encode_message(message, params.encoding)?;
    normalize_bits(encoded, params)
}

/// Normalizes an already-encoded bit message (any length, including ones
/// that are not whole bytes).
pub fn normalize_bits(encoded: BitString, params: &HashParams) -> Result<NormalizedInput> {
    params.validate()?;
    let marked = pad_mark(&encoded);
    let mirrored = mirror(&marked)?;
    let expanded = expand_to_blocks(&mirrored, params.n)?;
    let x0 = expanded.xor_fold(params.n)?;
    Ok(NormalizedInput {
        d: expanded.clone(),
        x0,
        stage_log: StageLog {
            encoded,
            marked,
            mirrored,
            expanded,
        },
    })
}

/// Length of the carrier for an `message_bits`-bit message, without building it.
pub fn carrier_len(message_bits: usize, n: usize) -> usize {
    let marked = message_bits + 1 + bit_width(message_bits + 1) as usize + 1;
    let mirrored = 2 * marked - 1;
    round_up(mirrored, lcm(BLOCK_BITS, n))
}

fn round_up(len: usize, granularity: usize) -> usize {
    len.div_ceil(granularity) * granularity
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Renders `name: bits` lines, bits in the canonical 8-bit grouping.
pub fn write_golden<'a>(stages: impl IntoIterator<Item = (&'a str, &'a BitString)>) -> String {
    let mut out = String::new();
    for (name, bits) in stages {
        out.push_str(name);
        out.push_str(": ");
        out.push_str(&bits.to_string());
        out.push('\n');
    }
    out
}

/// Parses the format written by [`write_golden`]. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_golden(text: &str) -> Result<Vec<(String, BitString)>> {
    text.lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(|line| {
            let (name, bits) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("missing ':' in golden line {line:?}")))?;
            Ok((name.trim().to_string(), bits.parse()?))
        })
        .collect()
}
