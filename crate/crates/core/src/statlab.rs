//! Diffusion and confusion experiments, iteration accounting and timing.
//!
//! Every random message is drawn from a ChaCha8 stream keyed by the 64-bit
//! experiment seed, with the stream number derived from the experiment kind
//! and the trial index. Trials therefore do not depend on execution order,
//! and results are identical for any thread count.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::hasher::{hash, hash_bits, hash_bits_traced, Digest};
use crate::preprocess::{carrier_len, HashParams};

#[derive(Debug, Clone, Copy)]
enum StreamKind {
    Avalanche = 0,
    Uniformity = 1,
    Bench = 2,
}

fn trial_rng(seed: u64, kind: StreamKind, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((kind as u64) << 56) | index);
    rng
}

fn random_bits(rng: &mut impl Rng, len: usize) -> BitString {
    (0..len).map(|_| rng.gen::<bool>()).collect()
}

/// Summary statistics of per-trial changed-bit counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BitChangeStats {
    #[serde(rename = "B_min")]
    pub b_min: usize,
    #[serde(rename = "B_max")]
    pub b_max: usize,
    #[serde(rename = "B_bar")]
    pub b_bar: f64,
    #[serde(rename = "P")]
    pub p: f64,
    /// Sample standard deviation of B; absent for fewer than two trials.
    #[serde(rename = "delta_B")]
    pub delta_b: Option<f64>,
    #[serde(rename = "delta_P")]
    pub delta_p: Option<f64>,
}

pub fn stats_from_b(b_values: &[usize], n: usize) -> Result<BitChangeStats> {
    if b_values.is_empty() {
        return Err(Error::Precondition("no trials".into()));
    }
    if let Some(&bad) = b_values.iter().find(|&&b| b > n) {
        return Err(Error::Precondition(format!("changed-bit count {bad} exceeds {n}")));
    }
    let count = b_values.len() as f64;
    let nf = n as f64;
    let b_bar = b_values.iter().sum::<usize>() as f64 / count;
    let p = b_bar / nf;
    let (delta_b, delta_p) = if b_values.len() >= 2 {
        let var_b = b_values.iter().map(|&b| (b as f64 - b_bar).powi(2)).sum::<f64>() / (count - 1.0);
        let var_p = b_values.iter().map(|&b| (b as f64 / nf - p).powi(2)).sum::<f64>() / (count - 1.0);
        (Some(var_b.sqrt()), Some(var_p.sqrt()))
    } else {
        (None, None)
    };
    Ok(BitChangeStats {
        b_min: *b_values.iter().min().unwrap(),
        b_max: *b_values.iter().max().unwrap(),
        b_bar,
        p,
        delta_b,
        delta_p,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AvalancheReport {
    pub trials: usize,
    pub message_bits: usize,
    pub digest_bits: usize,
    #[serde(rename = "B_values")]
    pub b_values: Vec<usize>,
    #[serde(flatten)]
    pub stats: BitChangeStats,
    pub histogram: BTreeMap<usize, usize>,
    pub seed: u64,
}

impl AvalancheReport {
    /// Most frequent changed-bit count (smallest on ties).
    pub fn mode(&self) -> usize {
        let mut best = (0, 0);
        for (&distance, &count) in &self.histogram {
            if count > best.1 {
                best = (distance, count);
            }
        }
        best.0
    }

    /// `distance,count` rows for every observed distance.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("distance,count\n");
        for (distance, count) in &self.histogram {
            out.push_str(&format!("{distance},{count}\n"));
        }
        out
    }
}

/// Hashes random messages before and after toggling one random bit.
pub fn avalanche_experiment(
    trials: usize,
    message_bits: usize,
    params: &HashParams,
    seed: u64,
) -> Result<AvalancheReport> {
    if trials == 0 || message_bits == 0 {
        return Err(Error::Precondition("trials and message bits must be positive".into()));
    }
    params.validate()?;
    let b_values = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, StreamKind::Avalanche, trial as u64);
            let original = random_bits(&mut rng, message_bits);
            let flip = rng.gen_range(0..message_bits);
            let toggled: BitString = original
                .iter()
                .enumerate()
                .map(|(i, b)| if i == flip { !b } else { b })
                .collect();
            hash_bits(original, params)?.hamming(&hash_bits(toggled, params)?)
        })
        .collect::<Result<Vec<_>>>()?;

    let stats = stats_from_b(&b_values, params.n)?;
    let mut histogram = BTreeMap::new();
    for &b in &b_values {
        *histogram.entry(b).or_insert(0) += 1;
    }
    Ok(AvalancheReport {
        trials,
        message_bits,
        digest_bits: params.n,
        b_values,
        stats,
        histogram,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    pub digests: usize,
    /// Occurrences of hex symbols `0..=F`.
    pub counts: [u64; 16],
    pub total: u64,
    pub chi_square: f64,
    /// Upper-tail probability with 15 degrees of freedom.
    pub p_value: f64,
}

impl UniformityReport {
    pub fn expected(&self) -> f64 {
        self.total as f64 / 16.0
    }

    pub fn counts_csv(&self) -> String {
        let mut out = String::from("symbol,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{:X},{c}\n", i));
        }
        out
    }
}

pub fn nibble_uniformity(digests: &[Digest]) -> Result<UniformityReport> {
    if digests.is_empty() {
        return Err(Error::Precondition("no digests".into()));
    }
    let mut counts = [0u64; 16];
    for d in digests {
        for c in d.hex().chars() {
            counts[c.to_digit(16).expect("digest hex") as usize] += 1;
        }
    }
    let (chi_square, total) = chi_square_uniform(&counts);
    Ok(UniformityReport {
        digests: digests.len(),
        counts,
        total,
        chi_square,
        p_value: chi_square_survival(chi_square, 15.0),
    })
}

fn chi_square_uniform(counts: &[u64; 16]) -> (f64, u64) {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / 16.0;
    let chi = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    (chi, total)
}

fn chi_square_survival(statistic: f64, dof: f64) -> f64 {
    match ChiSquared::new(dof) {
        Ok(dist) => 1.0 - dist.cdf(statistic),
        Err(_) => f64::NAN,
    }
}

/// Quantile of the chi-square distribution.
pub fn chi_square_quantile(q: f64, dof: f64) -> Result<f64> {
    let dist = ChiSquared::new(dof).map_err(|e| Error::InvalidParams(e.to_string()))?;
    Ok(dist.inverse_cdf(q))
}

/// Digests of `count` random messages, as used for the uniformity check.
pub fn random_digests(count: usize, message_bits: usize, params: &HashParams, seed: u64) -> Result<Vec<Digest>> {
    params.validate()?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, StreamKind::Uniformity, i as u64);
            hash_bits(random_bits(&mut rng, message_bits), params)
        })
        .collect()
}

pub fn uniformity_experiment(
    count: usize,
    message_bits: usize,
    params: &HashParams,
    seed: u64,
) -> Result<UniformityReport> {
    nibble_uniformity(&random_digests(count, message_bits, params, seed)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IterationCount {
    pub message_bits: usize,
    /// `|D|`.
    pub carrier_bits: usize,
    /// Iterations actually performed under the profile.
    pub iterations: usize,
    /// `2l + 2⌈log₂(l+1)⌉ + 515`.
    pub bound: usize,
    /// `bound − carrier_bits`; negative if the bound is violated.
    pub slack: i64,
}

impl IterationCount {
    pub fn within_bound(&self) -> bool {
        self.slack >= 0
    }
}

fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

pub fn iteration_bound(message_bits: usize) -> usize {
    2 * message_bits + 2 * ceil_log2(message_bits + 1) + 515
}

/// Carrier length and iteration count for an `l`-bit message, traced
/// symbolically through the normalization stages.
pub fn iteration_count(message_bits: usize, params: &HashParams) -> IterationCount {
    let carrier_bits = carrier_len(message_bits, params.n);
    let bound = iteration_bound(message_bits);
    IterationCount {
        message_bits,
        carrier_bits,
        iterations: params.profile.iterations(carrier_bits),
        bound,
        slack: bound as i64 - carrier_bits as i64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub input_bits: usize,
    pub carrier_bits: usize,
    /// Predicted by [`iteration_count`].
    pub iteration_count: usize,
    /// Counted during the timed run.
    pub measured_iterations: usize,
    /// Median seconds per hash.
    pub wall_time: f64,
    pub ns_per_bit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// `T(l_{i+1}) / T(l_i)` for consecutive sizes where `l_{i+1} = 2·l_i`.
    pub doubling_ratios: Vec<f64>,
    /// Least-squares slope of wall time against input bits, ns per bit.
    pub slope_ns_per_bit: f64,
    /// Coefficient of determination of the linear fit.
    pub linearity_r2: f64,
}

pub const MIN_BENCH_BITS: usize = 512 * 8;

/// Each timed sample repeats the hash until at least this much time passes.
const MIN_SAMPLE: Duration = Duration::from_millis(20);

pub fn bench_linear(sizes: &[usize], params: &HashParams, repetitions: usize) -> Result<BenchReport> {
    params.validate()?;
    if repetitions < 3 {
        return Err(Error::Precondition("at least 3 repetitions are required".into()));
    }
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Precondition("sizes must be non-empty and ascending".into()));
    }
    if let Some(&small) = sizes.iter().find(|&&s| s < MIN_BENCH_BITS) {
        return Err(Error::Precondition(format!(
            "size {small} bits is below the {MIN_BENCH_BITS}-bit minimum"
        )));
    }

    struct Case {
        bits: usize,
        message: BitString,
        carrier_bits: usize,
        iterations: usize,
        batch: usize,
        best: f64,
    }
    let mut cases = Vec::with_capacity(sizes.len());
    for (i, &bits) in sizes.iter().enumerate() {
        let mut rng = trial_rng(0, StreamKind::Bench, i as u64);
        let message = random_bits(&mut rng, bits);
        let start = Instant::now();
        let run = hash_bits_traced(message.clone(), params)?;
        let single = start.elapsed();
        let batch = (MIN_SAMPLE.as_secs_f64() / single.as_secs_f64().max(1e-9)).ceil().max(1.0) as usize;
        cases.push(Case {
            bits,
            message,
            carrier_bits: run.carrier_bits,
            iterations: run.iterations,
            batch,
            best: f64::INFINITY,
        });
    }

    // Sizes are interleaved so a slow spell hits all of them alike; the
    // minimum is kept because interference only ever adds time.
    for _ in 0..repetitions {
        for case in &mut cases {
            let start = Instant::now();
            for _ in 0..case.batch {
                std::hint::black_box(hash_bits(std::hint::black_box(case.message.clone()), params)?);
            }
            case.best = case.best.min(start.elapsed().as_secs_f64() / case.batch as f64);
        }
    }

    let mut rows = Vec::with_capacity(cases.len());
    for case in cases {
        if case.best <= 0.0 {
            return Err(Error::Environment("timer resolution too coarse".into()));
        }
        rows.push(BenchRow {
            input_bits: case.bits,
            carrier_bits: case.carrier_bits,
            iteration_count: iteration_count(case.bits, params).iterations,
            measured_iterations: case.iterations,
            wall_time: case.best,
            ns_per_bit: case.best * 1e9 / case.bits as f64,
        });
    }

    let doubling_ratios = rows
        .windows(2)
        .filter(|w| w[1].input_bits == 2 * w[0].input_bits)
        .map(|w| w[1].wall_time / w[0].wall_time)
        .collect();
    let (slope, r2) = linear_fit(
        &rows.iter().map(|r| r.input_bits as f64).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.wall_time * 1e9).collect::<Vec<_>>(),
    );
    Ok(BenchReport {
        rows,
        doubling_ratios,
        slope_ns_per_bit: slope,
        linearity_r2: r2,
    })
}

/// Ordinary least squares `y = a + b·x`; returns `(b, r²)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.len() < 2 {
        return (y.first().zip(x.first()).map_or(0.0, |(y, x)| y / x), 1.0);
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryRow {
    pub label: String,
    pub digest: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryReport {
    pub rows: Vec<BatteryRow>,
    /// Pairwise Hamming distances; `None` where either side failed or the
    /// digest lengths differ.
    pub distances: Vec<Vec<Option<usize>>>,
}

impl BatteryReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,digest,error\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                row.label,
                row.digest.as_deref().unwrap_or(""),
                row.error.as_deref().unwrap_or("")
            ));
        }
        out
    }
}

pub struct BatteryInput {
    pub label: String,
    pub message: Vec<u8>,
    pub params: HashParams,
}

pub fn case_battery(inputs: &[BatteryInput]) -> BatteryReport {
    let results: Vec<Result<Digest>> = inputs.iter().map(|i| hash(&i.message, &i.params)).collect();
    let rows = inputs
        .iter()
        .zip(&results)
        .map(|(input, r)| BatteryRow {
            label: input.label.clone(),
            digest: r.as_ref().ok().map(|d| d.hex().to_string()),
            error: r.as_ref().err().map(|e| e.to_string()),
        })
        .collect();
    let distances = results
        .iter()
        .map(|a| {
            results
                .iter()
                .map(|b| match (a, b) {
                    (Ok(a), Ok(b)) => a.hamming(b).ok(),
                    _ => None,
                })
                .collect()
        })
        .collect();
    BatteryReport { rows, distances }
}
