//! Byte stream and update strategy derived from the carrier.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::preprocess::{HashParams, KeyMode};

/// Number of rotation passes over the carrier.
pub const PASSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rotation {
    Left,
    Right,
}

/// How the keystream is read and how much of the strategy is iterated.
///
/// `Reference` reproduces the published digests for "The original text" and
/// "the original text" bit for bit: each pass rotates the carrier one more
/// bit to the right, and the last eight strategy terms are not applied.
/// `Literal` rotates left and applies every term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Reference,
    Literal,
}

impl Profile {
    pub fn rotation(self) -> Rotation {
        match self {
            Profile::Reference => Rotation::Right,
            Profile::Literal => Rotation::Left,
        }
    }

    /// Strategy terms left unapplied at the end of the iteration.
    pub fn unused_tail(self) -> usize {
        match self {
            Profile::Reference => 8,
            Profile::Literal => 0,
        }
    }

    /// Number of iterations performed for a carrier of `carrier_bits` bits.
    pub fn iterations(self, carrier_bits: usize) -> usize {
        carrier_bits.saturating_sub(self.unused_tail())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UStream {
    terms: Vec<u8>,
}

impl UStream {
    pub fn terms(&self) -> &[u8] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl From<Vec<u8>> for UStream {
    fn from(terms: Vec<u8>) -> Self {
        Self { terms }
    }
}

/// Eight passes over `d`, pass `p` reading `d` rotated left by `p` bits.
pub fn build_u(d: &BitString) -> Result<UStream> {
    build_u_rotating(d, Rotation::Left)
}

pub fn build_u_rotating(d: &BitString, rotation: Rotation) -> Result<UStream> {
    if !d.len().is_multiple_of(8) {
        return Err(Error::Dimension(format!(
            "carrier length {} is not a multiple of 8",
            d.len()
        )));
    }
    let mut terms = Vec::with_capacity(d.len());
    for pass in 0..PASSES {
        let rotated = match rotation {
            Rotation::Left => d.rotate_left(pass),
            Rotation::Right => d.rotate_right(pass),
        };
        terms.extend(rotated.bytes());
    }
    Ok(UStream { terms })
}

/// Sequence of component indices, each in `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Strategy {
    n: usize,
    terms: VecDeque<usize>,
}

impl Strategy {
    pub fn new(terms: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("strategy over zero components".into()));
        }
        let terms: VecDeque<usize> = terms.into_iter().collect();
        if let Some(&bad) = terms.iter().find(|&&t| t >= n) {
            return Err(Error::Dimension(format!("strategy term {bad} out of range for n = {n}")));
        }
        Ok(Self { n, terms })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new([], n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<usize> {
        self.terms.get(index).copied()
    }

    pub fn first(&self) -> Option<usize> {
        self.terms.front().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Removes and returns the first term.
    pub fn shift(&mut self) -> Option<usize> {
        self.terms.pop_front()
    }

    pub fn truncate(&mut self, len: usize) {
        self.terms.truncate(len);
    }
}

/// `S⁰` from the key (or from `u⁰`), then `Sᵗ = (uᵗ + 2·Sᵗ⁻¹ + t) mod n`.
pub fn build_strategy(u: &UStream, params: &HashParams) -> Result<Strategy> {
    let n = params.n;
    let (&u0, rest) = u
        .terms
        .split_first()
        .ok_or_else(|| Error::Precondition("empty keystream".into()))?;
    let s0 = match params.key {
        KeyMode::Keyed(k) => (k % n as u64) as usize,
        KeyMode::Unkeyed => usize::from(u0) % n,
    };
    let mut terms = VecDeque::with_capacity(u.len());
    terms.push_back(s0);
    let mut prev = s0;
    for (i, &ut) in rest.iter().enumerate() {
        let t = i + 1;
        prev = (usize::from(ut) + 2 * prev + t % n) % n;
        terms.push_back(prev);
    }
    Ok(Strategy { n, terms })
}
