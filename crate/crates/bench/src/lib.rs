//! Criterion throughput benches live in `benches/`.

/// Deterministic filler message of `len` bytes.
pub fn message(len: usize) -> Vec<u8> {
    (0..len).map(|i| (i.wrapping_mul(131) >> 3) as u8).collect()
}
