//! Metric on (strategy, configuration) pairs and constructive checks of
//! expansivity.
//!
//! The distance is `d = d_e + d_s`, where `d_e` is the Hamming distance
//! between configurations and
//!
//! ```text
//! d_s(S, T) = (9 / n) · Σ_{i=1..K} |S_i − T_i| / 10^i
//! ```
//!
//! over the first `K` strategy terms (term 0 carries weight 1/10). The
//! strategy part is kept as an exact rational `9·m / (n·10^K)` so that
//! threshold comparisons never depend on rounding.

use crate::bits::{check_same_n, Configuration};
use crate::dynamics::{g_neg_step, Point};
use crate::error::{Error, Result};
use crate::keystream::Strategy;

pub const DEFAULT_DEPTH: usize = 15;

/// Largest supported truncation depth (keeps the exact numerators in `u128`).
pub const MAX_DEPTH: usize = 30;

/// Reference value of the Lyapunov exponent for `n` components, `ln(n)`.
/// Recorded as a constant only; nothing here estimates it.
pub fn lyapunov_exponent_reference(n: usize) -> f64 {
    (n as f64).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceValue {
    pub total: f64,
    /// `d_e`, the number of differing cells.
    pub config_part: usize,
    pub strategy_part: f64,
    /// Number of strategy terms compared.
    pub truncation_depth: usize,
    n: usize,
    numerator: u128,
}

impl DistanceValue {
    /// `⌊d⌋`, computed exactly.
    pub fn floor(&self) -> usize {
        // d_s < 1 always: 9·m ≤ 9·(n−1)·(10^K − 1)/9 < n·10^K
        debug_assert!(!self.strategy_at_least(0));
        self.config_part
    }

    /// Exact test of `d_s < 10^(−k)` for `k ≤ truncation_depth`.
    pub fn strategy_below_pow10(&self, k: usize) -> Result<bool> {
        if k > self.truncation_depth {
            return Err(Error::Depth {
                needed: k,
                available: self.truncation_depth,
            });
        }
        Ok(!self.strategy_at_least(k))
    }

    fn strategy_at_least(&self, k: usize) -> bool {
        // d_s ≥ 10^-k  ⟺  9·m ≥ n·10^(K−k)
        9 * self.numerator >= self.n as u128 * pow10(self.truncation_depth - k)
    }

    /// Upper bound on the contribution of the terms beyond the truncation.
    pub fn truncation_error_bound(&self) -> f64 {
        10f64.powi(-(self.truncation_depth as i32))
    }
}

fn pow10(k: usize) -> u128 {
    10u128.pow(k as u32)
}

pub fn d_e(a: &Configuration, b: &Configuration) -> Result<usize> {
    a.hamming(b)
}

fn strategy_numerator(s: &Strategy, t: &Strategy, depth: usize) -> Result<u128> {
    if s.n() != t.n() {
        return Err(Error::Dimension(format!("strategies over {} and {} components", s.n(), t.n())));
    }
    if depth > MAX_DEPTH {
        return Err(Error::InvalidParams(format!("depth {depth} exceeds {MAX_DEPTH}")));
    }
    if s.n() > 1 << 16 {
        return Err(Error::InvalidParams(format!("strategy distance supports n ≤ 65536, got {}", s.n())));
    }
    let available = s.len().min(t.len());
    if available < depth {
        return Err(Error::Depth {
            needed: depth,
            available,
        });
    }
    Ok(s.iter()
        .zip(t.iter())
        .take(depth)
        .enumerate()
        .map(|(i, (a, b))| a.abs_diff(b) as u128 * pow10(depth - 1 - i))
        .sum())
}

pub fn d_s(s: &Strategy, t: &Strategy, depth: usize) -> Result<f64> {
    let m = strategy_numerator(s, t, depth)?;
    Ok(strategy_value(m, s.n(), depth))
}

fn strategy_value(numerator: u128, n: usize, depth: usize) -> f64 {
    9.0 * numerator as f64 / (n as f64 * 10f64.powi(depth as i32))
}

pub fn distance(x: &Point, y: &Point, depth: usize) -> Result<DistanceValue> {
    let config_part = d_e(x.config(), y.config())?;
    let numerator = strategy_numerator(x.strategy(), y.strategy(), depth)?;
    let strategy_part = strategy_value(numerator, x.n(), depth);
    Ok(DistanceValue {
        total: config_part as f64 + strategy_part,
        config_part,
        strategy_part,
        truncation_depth: depth,
        n: x.n(),
        numerator,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansivityWitness {
    /// Number of steps applied to both points.
    pub step: usize,
    pub distance: DistanceValue,
}

/// Smallest `k ≤ horizon` with `d(Gᵏx, Gᵏy) ≥ 1`, or `None` if the points
/// stay within distance 1 for as long as their strategies allow.
pub fn expansivity_witness(x: &Point, y: &Point, horizon: usize) -> Result<Option<ExpansivityWitness>> {
    check_same_n(x.config(), y.config())?;
    let (mut a, mut b) = (x.clone(), y.clone());
    for step in 0..=horizon {
        let depth = DEFAULT_DEPTH.min(a.strategy().len()).min(b.strategy().len());
        let d = distance(&a, &b, depth)?;
        // d ≥ 1 exactly when the configurations differ
        if d.config_part >= 1 {
            return Ok(Some(ExpansivityWitness { step, distance: d }));
        }
        if step == horizon || a.strategy().is_empty() || b.strategy().is_empty() {
            break;
        }
        a = g_neg_step(a)?;
        b = g_neg_step(b)?;
    }
    Ok(None)
}

/// `d(Gᵏx, Gᵏy)` for `k = 0..=steps`.
pub fn divergence_trace(x: &Point, y: &Point, steps: usize, depth: usize) -> Result<Vec<DistanceValue>> {
    let needed = steps + depth;
    let available = x.strategy().len().min(y.strategy().len());
    if available < needed {
        return Err(Error::Depth { needed, available });
    }
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(distance(&a, &b, depth)?);
    for _ in 0..steps {
        a = g_neg_step(a)?;
        b = g_neg_step(b)?;
        trace.push(distance(&a, &b, depth)?);
    }
    Ok(trace)
}

/// CSV with header `step,d_e,d_s,d`.
pub fn trace_csv(trace: &[DistanceValue]) -> String {
    let mut out = String::from("step,d_e,d_s,d\n");
    for (step, d) in trace.iter().enumerate() {
        out.push_str(&format!("{step},{},{},{}\n", d.config_part, d.strategy_part, d.total));
    }
    out
}
