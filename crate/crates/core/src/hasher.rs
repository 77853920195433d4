//! End-to-end digest computation.

use std::fmt;
use std::path::Path;

use crate::bits::{BitString, Configuration};
use crate::dynamics::{g_neg_step, Point};
use crate::error::{Error, Result};
use crate::keystream::{build_strategy, build_u_rotating};
use crate::preprocess::{normalize_bits, encode_message, HashParams, NormalizedInput};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digest {
    config: Configuration,
    hex: String,
}

impl Digest {
    pub fn new(config: Configuration) -> Result<Self> {
        let hex = config.to_hex()?;
        Ok(Self { config, hex })
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn hex(&self) -> &str {
        &self.hex
    }

    pub fn bits(&self) -> usize {
        self.config.n()
    }

    pub fn hamming(&self, other: &Digest) -> Result<usize> {
        self.config.hamming(&other.config)
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex)
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.hex)
    }
}

/// A digest together with counters from the run that produced it.
#[derive(Debug, Clone)]
pub struct HashRun {
    pub digest: Digest,
    pub carrier_bits: usize,
    /// Number of single-step applications performed.
    pub iterations: usize,
}

/// The starting point of the iteration: the full strategy and `x⁰`.
pub fn initial_point(norm: &NormalizedInput, params: &HashParams) -> Result<Point> {
    let u = build_u_rotating(&norm.d, params.profile.rotation())?;
    let strategy = build_strategy(&u, params)?;
    Point::new(strategy, norm.x0.clone())
}

pub fn hash(message: &[u8], params: &HashParams) -> Result<Digest> {
    Ok(hash_traced(message, params)?.digest)
}

pub fn hash_traced(message: &[u8], params: &HashParams) -> Result<HashRun> {
    params.validate()?;
    hash_bits_traced(encode_message(message, params.encoding)?, params)
}

/// Hashes a message given directly as bits; the encoding setting is unused.
pub fn hash_bits(message: BitString, params: &HashParams) -> Result<Digest> {
    Ok(hash_bits_traced(message, params)?.digest)
}

pub fn hash_bits_traced(message: BitString, params: &HashParams) -> Result<HashRun> {
    let norm = normalize_bits(message, params)?;
    let mut point = initial_point(&norm, params)?;
    let carrier_bits = norm.d.len();
    let steps = params.profile.iterations(carrier_bits);

    let mut iterations = 0;
    while iterations < steps {
        point = g_neg_step(point)?;
        iterations += 1;
    }
    let (_, config) = point.into_parts();
    Ok(HashRun {
        digest: Digest::new(config)?,
        carrier_bits,
        iterations,
    })
}

pub fn hash_file(path: impl AsRef<Path>, params: &HashParams) -> Result<Digest> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    hash(&bytes, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keystream::Profile;
    use crate::preprocess::Encoding;

    const THE: &str = "63A88CB6AF0B18E3BE828F9BDA4596A6A13DFE38440AB9557DA1C0C6B1EDBDBD";
    const LOWER_THE: &str = "33E0DFB5BB1D88C924D2AF80B14FF5A7B1A3DEF9D0E831194BD814C8A3B948B3";

    fn ascii() -> HashParams {
        HashParams::default().with_encoding(Encoding::Ascii7)
    }

    #[test]
    fn published_digests() {
        assert_eq!(hash(b"The original text", &ascii()).unwrap().hex(), THE);
        assert_eq!(hash(b"the original text", &ascii()).unwrap().hex(), LOWER_THE);
    }

    #[test]
    fn literal_profile_differs() {
        let params = ascii().with_profile(Profile::Literal);
        let run = hash_traced(b"The original text", &params).unwrap();
        assert_ne!(run.digest.hex(), THE);
        assert_eq!(run.iterations, 512);
    }

    #[test]
    fn reference_profile_skips_tail() {
        let run = hash_traced(b"The original text", &ascii()).unwrap();
        assert_eq!(run.carrier_bits, 512);
        assert_eq!(run.iterations, 504);
    }

    #[test]
    fn deterministic() {
        let params = HashParams::default().with_key(99);
        assert_eq!(hash(b"abc", &params).unwrap(), hash(b"abc", &params).unwrap());
    }

    #[test]
    fn digest_length_follows_n() {
        for n in [4, 80, 128, 256] {
            let d = hash(b"length", &HashParams::new(n).unwrap()).unwrap();
            assert_eq!(d.hex().len(), n / 4);
            assert_eq!(d.bits(), n);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let params = HashParams {
            n: 6,
            ..HashParams::default()
        };
        assert!(matches!(hash(b"x", &params), Err(Error::InvalidParams(_))));
        assert!(matches!(hash(b"\xFF", &ascii()), Err(Error::Encoding { position: 0, .. })));
    }

    #[test]
    fn keyed_differs_from_unkeyed() {
        let unkeyed = hash(b"message", &HashParams::default()).unwrap();
        let keyed = hash(b"message", &HashParams::default().with_key(17)).unwrap();
        assert_ne!(unkeyed, keyed);
    }
}
