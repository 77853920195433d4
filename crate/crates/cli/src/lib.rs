//! Command-line front end: file hashing, experiments and report output.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cihash::statlab::{self, BatteryInput};
use cihash::{hash, topology, Encoding, Error, HashParams, Profile};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cihash", version, about = "Keyed hash function based on chaotic iterations")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Digest length in bits (multiple of 4, at most 256)
    #[arg(long = "n", global = true, default_value_t = 256)]
    pub n: usize,

    /// Key for keyed mode; omit for the unkeyed hash
    #[arg(long, global = true)]
    pub key: Option<u64>,

    /// Encode input bytes on 7 bits (ASCII only) instead of 8
    #[arg(long, global = true)]
    pub ascii7: bool,

    /// Use the literal keystream schedule (left rotations, every strategy term)
    #[arg(long, global = true)]
    pub literal: bool,

    /// Seed for randomized experiments
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the report here instead of standard output
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Worker threads for experiments (never changes the output)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print "<hex>  <name>" for each file ("-" reads standard input)
    Hash {
        files: Vec<String>,
    },
    /// One-bit-toggle avalanche experiment
    Avalanche {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long = "msg-bits", default_value_t = 1000)]
        msg_bits: usize,
    },
    /// Hex-symbol repartition of digests of random messages
    Uniformity {
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long = "msg-bits", default_value_t = 1000)]
        msg_bits: usize,
    },
    /// Time the hash over doubling input sizes
    Bench {
        /// Smallest size is 2^min-exp bits
        #[arg(long = "min-exp", default_value_t = 13)]
        min_exp: u32,
        /// Largest size is 2^max-exp bits
        #[arg(long = "max-exp", default_value_t = 20)]
        max_exp: u32,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
    /// Hash several files and compare every pair of digests
    Battery {
        files: Vec<PathBuf>,
    },
    /// Distance between two iteration trajectories that start one change apart
    Trace {
        /// Message whose normalized form gives the first starting point
        #[arg(long, default_value = "The original text")]
        message: String,
        /// Flip this configuration bit in the second point
        #[arg(long = "flip-config", conflicts_with = "perturb_strategy")]
        flip_config: Option<usize>,
        /// Change this strategy term in the second point
        #[arg(long = "perturb-strategy")]
        perturb_strategy: Option<usize>,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long, default_value_t = topology::DEFAULT_DEPTH)]
        depth: usize,
    },
}

/// A failure with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Encoding { .. } | Error::Io { .. } | Error::Parse(_) => EXIT_INPUT,
            Error::InvalidParams(_) | Error::Precondition(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<String, Failure>;

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the process exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, stdin) {
        Ok(text) => match emit(&cli.common, &text, stdout) {
            Ok(()) => EXIT_OK,
            Err(f) => report(f, stderr),
        },
        Err(f) => report(f, stderr),
    }
}

fn report(f: Failure, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "cihash: {}", f.message);
    f.code
}

fn emit(common: &Common, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &common.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("{}: {e}", path.display()),
        }),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn params(common: &Common) -> Result<HashParams, Failure> {
    let mut p = HashParams::new(common.n)?;
    if common.ascii7 {
        p = p.with_encoding(Encoding::Ascii7);
    }
    if let Some(k) = common.key {
        p = p.with_key(k);
    }
    if common.literal {
        p = p.with_profile(Profile::Literal);
    }
    Ok(p)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Failure::usage("--threads must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Failure {
                code: EXIT_INTERNAL,
                message: e.to_string(),
            }),
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> CmdResult {
    let common = &cli.common;
    let params = params(common)?;
    match &cli.command {
        Command::Hash { files } => hash_files(common, &params, files, stdin),
        Command::Avalanche { trials, msg_bits } => {
            let r = with_threads(common.threads, || {
                statlab::avalanche_experiment(*trials, *msg_bits, &params, common.seed)
            })??;
            Ok(match common.format {
                Format::Json => to_json(&r)?,
                Format::Csv => format!("# seed={}\n{}", r.seed, r.histogram_csv()),
                Format::Text => {
                    let s = &r.stats;
                    let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
                    format!(
                        "seed: {}\ntrials: {}\nmessage_bits: {}\ndigest_bits: {}\nB_min: {}\nB_max: {}\nB_bar: {:.4}\nP: {:.4}\ndelta_B: {}\ndelta_P: {}\nmode: {}\n",
                        r.seed, r.trials, r.message_bits, r.digest_bits, s.b_min, s.b_max, s.b_bar, s.p,
                        opt(s.delta_b), opt(s.delta_p), r.mode()
                    )
                }
            })
        }
        Command::Uniformity { count, msg_bits } => {
            let r = with_threads(common.threads, || {
                statlab::uniformity_experiment(*count, *msg_bits, &params, common.seed)
            })??;
            Ok(match common.format {
                Format::Json => {
                    let mut v = serde_json::to_value(&r).map_err(internal)?;
                    v["seed"] = json!(common.seed);
                    v["message_bits"] = json!(msg_bits);
                    pretty(&v)?
                }
                Format::Csv => format!("# seed={}\n{}", common.seed, r.counts_csv()),
                Format::Text => format!(
                    "seed: {}\ndigests: {}\nchi_square: {:.4}\np_value: {:.4}\ncounts: {:?}\n",
                    common.seed, r.digests, r.chi_square, r.p_value, r.counts
                ),
            })
        }
        Command::Bench { min_exp, max_exp, reps } => {
            if min_exp > max_exp || *max_exp > 30 {
                return Err(Failure::usage("need min-exp <= max-exp <= 30"));
            }
            let sizes: Vec<usize> = (*min_exp..=*max_exp).map(|e| 1usize << e).collect();
            let r = statlab::bench_linear(&sizes, &params, *reps)?;
            Ok(match common.format {
                Format::Json => to_json(&r)?,
                Format::Csv => {
                    let mut out = String::from("input_bits,carrier_bits,iterations,wall_time_s,ns_per_bit\n");
                    for row in &r.rows {
                        out.push_str(&format!(
                            "{},{},{},{},{}\n",
                            row.input_bits, row.carrier_bits, row.measured_iterations, row.wall_time, row.ns_per_bit
                        ));
                    }
                    out
                }
                Format::Text => {
                    let mut out = String::from("input_bits  carrier_bits  iterations\n");
                    for row in &r.rows {
                        out.push_str(&format!(
                            "{:>10}  {:>12}  {:>10}\n",
                            row.input_bits, row.carrier_bits, row.measured_iterations
                        ));
                    }
                    out.push_str("\ntiming (wall clock, not reproducible):\n");
                    for row in &r.rows {
                        out.push_str(&format!(
                            "{:>10} bits  {:>12.6} s  {:>8.3} ns/bit\n",
                            row.input_bits, row.wall_time, row.ns_per_bit
                        ));
                    }
                    let ratios: Vec<String> = r.doubling_ratios.iter().map(|x| format!("{x:.3}")).collect();
                    out.push_str(&format!(
                        "doubling ratios: [{}]\nslope: {:.3} ns/bit  r2: {:.5}\n",
                        ratios.join(", "),
                        r.slope_ns_per_bit,
                        r.linearity_r2
                    ));
                    out
                }
            })
        }
        Command::Battery { files } => battery(common, &params, files),
        Command::Trace {
            message,
            flip_config,
            perturb_strategy,
            steps,
            depth,
        } => trace(&params, message, *flip_config, *perturb_strategy, *steps, *depth),
    }
}

fn internal(e: serde_json::Error) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: e.to_string(),
    }
}

fn pretty(v: &Value) -> CmdResult {
    Ok(serde_json::to_string_pretty(v).map_err(internal)? + "\n")
}

fn to_json<T: serde::Serialize>(v: &T) -> CmdResult {
    pretty(&serde_json::to_value(v).map_err(internal)?)
}

fn hash_files(common: &Common, params: &HashParams, files: &[String], stdin: &mut dyn Read) -> CmdResult {
    if files.is_empty() {
        return Err(Failure::usage("usage: cihash hash [OPTIONS] <FILE>... (use - for standard input)"));
    }
    if common.ascii7 && files.iter().any(|f| f == "-") {
        return Err(Failure::usage("standard input is hashed in raw 8-bit mode only"));
    }
    let mut rows = Vec::new();
    for name in files {
        let bytes = if name == "-" {
            let mut buf = Vec::new();
            stdin.read_to_end(&mut buf)?;
            buf
        } else {
            fs::read(name).map_err(|source| {
                Failure::from(Error::Io {
                    path: name.into(),
                    source,
                })
            })?
        };
        rows.push((name.clone(), hash(&bytes, params)?));
    }
    Ok(match common.format {
        Format::Json => pretty(&Value::Array(
            rows.iter()
                .map(|(f, d)| json!({ "file": f, "digest": d.hex() }))
                .collect(),
        ))?,
        Format::Csv => {
            let mut out = String::from("file,digest\n");
            for (f, d) in &rows {
                out.push_str(&format!("{f},{d}\n"));
            }
            out
        }
        Format::Text => rows.iter().map(|(f, d)| format!("{d}  {f}\n")).collect(),
    })
}

fn battery(common: &Common, params: &HashParams, files: &[PathBuf]) -> CmdResult {
    if files.is_empty() {
        return Err(Failure::usage("usage: cihash battery [OPTIONS] <FILE>..."));
    }
    let inputs = files
        .iter()
        .map(|path| {
            let message = fs::read(path).map_err(|source| {
                Failure::from(Error::Io {
                    path: path.clone(),
                    source,
                })
            })?;
            Ok(BatteryInput {
                label: path.display().to_string(),
                message,
                params: *params,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let r = statlab::case_battery(&inputs);
    Ok(match common.format {
        Format::Json => to_json(&r)?,
        Format::Csv => r.to_csv(),
        Format::Text => {
            let mut out = String::new();
            for (i, row) in r.rows.iter().enumerate() {
                let shown = row.digest.as_deref().or(row.error.as_deref()).unwrap_or("");
                out.push_str(&format!("[{}] {}  {}\n", i + 1, shown, row.label));
            }
            out.push_str("\npairwise Hamming distances:\n");
            for row in &r.distances {
                let cells: Vec<String> = row
                    .iter()
                    .map(|d| d.map_or("  -".to_string(), |d| format!("{d:>3}")))
                    .collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
            out
        }
    })
}

fn trace(
    params: &HashParams,
    message: &str,
    flip_config: Option<usize>,
    perturb_strategy: Option<usize>,
    steps: usize,
    depth: usize,
) -> CmdResult {
    use cihash::dynamics::f_neg;
    use cihash::hasher::initial_point;
    use cihash::preprocess::normalize;
    use cihash::{Point, Strategy};

    let norm = normalize(message.as_bytes(), params)?;
    let x = initial_point(&norm, params)?;
    let n = x.n();
    let y = match (flip_config, perturb_strategy) {
        (_, Some(term)) => {
            let mut terms = x.strategy().to_vec();
            let slot = terms
                .get_mut(term)
                .ok_or_else(|| Failure::usage(format!("strategy has only {} terms", x.strategy().len())))?;
            *slot = (*slot + 1) % n;
            Point::new(Strategy::new(terms, n)?, x.config().clone())?
        }
        (bit, None) => {
            let bit = bit.unwrap_or(0);
            if bit >= n {
                return Err(Failure::usage(format!("bit {bit} out of range for n = {n}")));
            }
            Point::new(x.strategy().clone(), f_neg(bit, x.config())?)?
        }
    };
    let trace = topology::divergence_trace(&x, &y, steps, depth)?;
    Ok(topology::trace_csv(&trace))
}
