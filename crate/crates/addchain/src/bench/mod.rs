//! Reproducible method comparisons: accumulated chain lengths over exponent
//! ranges, multi-run statistics, average lengths for random fixed-width
//! exponents, and a set of six hard special exponents, with JSON/CSV report
//! output.
//!
//! Every genetic run derives its seed as `hash(master_seed, run, exponent)`,
//! so results are reproducible from a single master seed, independent runs
//! stay independent, and per-exponent work can execute in parallel without
//! affecting the outcome.

pub mod report;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::baselines::{binary_length, mary_chain, Radix, RadixInvalid};
use crate::chain::Exponent;
use crate::ga::{evolve, GaConfig, GaError};
use crate::oracle::OptimalTable;

pub use report::{render_report, write_report, Report, ReportFormat, ReportMeta, ReportRow};

/// A chain-construction method under measurement.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Method {
    /// The genetic search with a given config.
    Ga,
    /// The left-to-right binary method.
    Binary,
    /// The m-ary method for a power-of-two radix.
    Mary(u64),
    /// Exact minimal lengths from the exhaustive search.
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Ga => write!(f, "ga"),
            Method::Binary => write!(f, "binary"),
            Method::Mary(m) => write!(f, "mary({m})"),
            Method::Oracle => write!(f, "oracle"),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ga" => Ok(Method::Ga),
            "binary" => Ok(Method::Binary),
            "oracle" => Ok(Method::Oracle),
            _ => s
                .strip_prefix("mary(")
                .and_then(|rest| rest.strip_suffix(')'))
                .and_then(|m| m.parse().ok())
                .map(Method::Mary)
                .ok_or_else(|| format!("unknown method {s:?}")),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(D::Error::custom)
    }
}

/// Why a benchmark could not complete.
#[derive(Debug)]
pub enum BenchError {
    Ga(GaError),
    Radix(RadixInvalid),
    Unsupported(&'static str),
    EmptyReport,
    Io(std::io::Error),
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Ga(e) => e.fmt(f),
            BenchError::Radix(e) => e.fmt(f),
            BenchError::Unsupported(what) => write!(f, "unsupported benchmark: {what}"),
            BenchError::EmptyReport => write!(f, "refusing to write a report with no rows"),
            BenchError::Io(e) => write!(f, "report i/o failed: {e}"),
        }
    }
}

impl std::error::Error for BenchError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            BenchError::Ga(e) => Some(e),
            BenchError::Radix(e) => Some(e),
            BenchError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<GaError> for BenchError {
    fn from(e: GaError) -> Self {
        BenchError::Ga(e)
    }
}

impl From<RadixInvalid> for BenchError {
    fn from(e: RadixInvalid) -> Self {
        BenchError::Radix(e)
    }
}

impl From<std::io::Error> for BenchError {
    fn from(e: std::io::Error) -> Self {
        BenchError::Io(e)
    }
}

/// Mixes `(master, run, exponent)` into one well-spread 64-bit seed
/// (splitmix64 finalizer chain), so per-run and per-exponent streams are
/// independent without storing any seed lists.
pub fn derive_seed(master: u64, run: u64, exponent: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(master ^ 0x9e37_79b9_7f4a_7c15) ^ run) ^ exponent)
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// One method's chain length for one exponent; the genetic method derives
/// its seed from `(master, run, exponent)`.
fn method_length(
    method: Method,
    e: u64,
    master: u64,
    run: u64,
    config: &GaConfig,
) -> Result<usize, BenchError> {
    let exponent = Exponent::new(e).expect("benchmark exponents start at 1");
    match method {
        Method::Ga => {
            let cfg = config.with_seed(derive_seed(master, run, e));
            Ok(evolve(exponent, &cfg)?.length.additions())
        }
        Method::Binary => Ok(binary_length(exponent).additions()),
        Method::Mary(m) => Ok(mary_chain(exponent, Radix::new(m)?).length().additions()),
        Method::Oracle => Err(BenchError::Unsupported(
            "per-exponent oracle lengths outside accumulated ranges",
        )),
    }
}

/// Best chain lengths summed over every exponent in `[1, range_max]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Accumulated {
    pub method: Method,
    pub range_max: u64,
    /// Sum of `per_exponent`.
    pub total: u64,
    /// Length for exponent `i + 1` at index `i`.
    pub per_exponent: Vec<u32>,
    /// Master seed, for methods that use randomness.
    pub seed: Option<u64>,
}

/// Runs `method` once per exponent in `[1, range_max]` and sums the chain
/// lengths. Genetic runs use one derived seed per exponent; the oracle sums
/// its exact table.
pub fn accumulated(
    method: Method,
    range_max: Exponent,
    config: &GaConfig,
) -> Result<Accumulated, BenchError> {
    accumulated_run(method, range_max, config, config.seed, 0)
}

fn accumulated_run(
    method: Method,
    range_max: Exponent,
    config: &GaConfig,
    master: u64,
    run: u64,
) -> Result<Accumulated, BenchError> {
    let limit = range_max.get();
    let per_exponent: Vec<u32> = match method {
        Method::Oracle => {
            let table = OptimalTable::compute(limit);
            (1..=limit).map(|n| table.length(n).additions() as u32).collect()
        }
        Method::Ga => (1..=limit)
            .into_par_iter()
            .map(|e| method_length(method, e, master, run, config).map(|l| l as u32))
            .collect::<Result<_, _>>()?,
        Method::Binary | Method::Mary(_) => (1..=limit)
            .map(|e| method_length(method, e, master, run, config).map(|l| l as u32))
            .collect::<Result<_, _>>()?,
    };
    let total = per_exponent.iter().map(|&l| u64::from(l)).sum();
    let seed = matches!(method, Method::Ga).then_some(master);
    Ok(Accumulated { method, range_max: limit, total, per_exponent, seed })
}

/// Order statistics of accumulated totals over repeated runs.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RunStats {
    pub method: Method,
    pub range_max: u64,
    pub runs: usize,
    pub master_seed: u64,
    /// Per-run accumulated totals, in run order.
    pub totals: Vec<u64>,
    pub best: u64,
    pub worst: u64,
    /// Mean of the totals, rounded to 2 decimals.
    pub average: f64,
    /// Median of the totals (mean of the central pair for even counts),
    /// rounded to 2 decimals.
    pub median: f64,
}

/// Repeats `accumulated` over `runs` independently seeded runs and reports
/// best/worst/average/median totals. Deterministic methods are computed once
/// and replicated (their variance is zero by construction).
pub fn run_stats(
    method: Method,
    range_max: Exponent,
    runs: usize,
    master_seed: u64,
    config: &GaConfig,
) -> Result<RunStats, BenchError> {
    assert!(runs >= 1, "statistics need at least one run");
    let totals: Vec<u64> = if method == Method::Ga {
        (0..runs)
            .map(|r| {
                accumulated_run(method, range_max, config, master_seed, r as u64).map(|a| a.total)
            })
            .collect::<Result<_, _>>()?
    } else {
        let once = accumulated_run(method, range_max, config, master_seed, 0)?.total;
        vec![once; runs]
    };

    let mut sorted = totals.clone();
    sorted.sort_unstable();
    let best = sorted[0];
    let worst = sorted[sorted.len() - 1];
    let average = round2(totals.iter().sum::<u64>() as f64 / runs as f64);
    let median = round2(if runs % 2 == 1 {
        sorted[runs / 2] as f64
    } else {
        (sorted[runs / 2 - 1] + sorted[runs / 2]) as f64 / 2.0
    });
    Ok(RunStats { method, range_max: range_max.get(), runs, master_seed, totals, best, worst, average, median })
}

/// One method's average chain length over a shared sample of exponents.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MethodAverage {
    pub method: Method,
    /// Mean chain length, rounded to 2 decimals.
    pub average: f64,
}

/// Average chain lengths over random exponents of an exact bit width.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct BitSizeAverages {
    pub bits: u32,
    pub samples: usize,
    pub master_seed: u64,
    /// The sampled exponents (top bit always set), shared by all methods.
    pub exponents: Vec<u64>,
    pub averages: Vec<MethodAverage>,
}

/// Draws `samples` uniform exponents with exactly `bits` bits and averages
/// each method's chain length over the same sample.
pub fn random_exponent_avg(
    bits: u32,
    samples: usize,
    methods: &[Method],
    master_seed: u64,
    config: &GaConfig,
) -> Result<BitSizeAverages, BenchError> {
    assert!((2..=64).contains(&bits), "bit width must be in [2, 64]");
    assert!(samples >= 1, "averages need at least one sample");
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, 0, u64::from(bits)));
    let top = 1u64 << (bits - 1);
    let exponents: Vec<u64> = (0..samples).map(|_| top | rng.random_range(0..top)).collect();

    let averages = methods
        .iter()
        .map(|&method| {
            let lengths: Vec<usize> = exponents
                .par_iter()
                .enumerate()
                .map(|(sample, &e)| method_length(method, e, master_seed, sample as u64, config))
                .collect::<Result<_, _>>()?;
            let average = round2(lengths.iter().sum::<usize>() as f64 / samples as f64);
            Ok(MethodAverage { method, average })
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    Ok(BitSizeAverages { bits, samples, master_seed, exponents, averages })
}

/// Six exponents around 2^21 to 2^22 whose published-quality chains take 27
/// additions, used as a hard single-exponent workload.
pub const SPECIAL_EXPONENTS: [u64; 6] =
    [3_922_763, 2_948_207, 3_093_839, 3_325_439, 3_704_431, 3_243_931];

/// Hand-copied reference chains for the special exponents, as quoted in
/// circulation. Four validate at exactly 27 additions; the chains for
/// 3704431 and 3243931 contain copying mistakes (a value with no summand
/// pair, and an out-of-order element) and fail validation.
pub const REFERENCE_CHAINS: [(u64, &str); 6] = [
    (
        3_922_763,
        "1 2 3 6 12 24 26 52 104 208 416 832 1664 3328 3331 6659 9990 19980 39960 79920 159840 \
         163171 326342 652684 1305368 1958052 3916104 3922763",
    ),
    (
        2_948_207,
        "1 2 3 4 7 14 28 29 58 116 232 239 478 956 1912 3824 3853 7677 15354 30708 61416 122832 \
         245664 491328 982656 1965312 2947968 2948207",
    ),
    (
        3_093_839,
        "1 2 3 5 10 20 30 60 120 150 151 302 604 1208 2416 4832 9664 19328 38656 77312 154624 \
         309248 618496 1236992 2473984 3092480 3093688 3093839",
    ),
    (
        3_325_439,
        "1 2 4 8 16 17 33 66 132 264 528 1056 2112 4224 4241 8482 16964 33928 67856 135712 \
         271424 271457 542914 1085828 1085861 2171722 3257583 3325439",
    ),
    (
        3_704_431,
        "1 2 4 5 9 18 36 72 144 288 576 1157 2314 4628 9256 18512 37024 74048 148096 296192 \
         592384 1184768 1185349 2370698 3556047 3704143 3704431",
    ),
    (
        3_243_931,
        "1 2 4 8 16 32 64 27 128 256 258 514 515 1029 2058 4116 8232 16464 32928 65856 66371 \
         132227 198083 396166 792332 1584664 3169328 3235699 3243931",
    ),
];

/// The genetic search's best result on one special exponent.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SingleRun {
    pub exponent: u64,
    /// Shortest length over all seeds, in additions.
    pub best_length: usize,
    /// The winning chain's values.
    pub best_chain: Vec<u64>,
    /// Seeds tried, one full search each.
    pub seeds: Vec<u64>,
}

/// Runs the genetic search on every special exponent once per seed and keeps
/// each exponent's shortest result (first seed wins ties).
pub fn special_exponents(config: &GaConfig, seeds: &[u64]) -> Result<Vec<SingleRun>, BenchError> {
    assert!(!seeds.is_empty(), "need at least one seed");
    SPECIAL_EXPONENTS
        .iter()
        .map(|&n| {
            let exponent = Exponent::new(n).expect("special exponents are positive");
            let results: Vec<_> = seeds
                .par_iter()
                .map(|&seed| evolve(exponent, &config.with_seed(seed)))
                .collect::<Result<_, _>>()?;
            let best = results
                .into_iter()
                .min_by_key(|r| r.length.additions())
                .expect("at least one seed");
            Ok(SingleRun {
                exponent: n,
                best_length: best.length.additions(),
                best_chain: best.best.values().to_vec(),
                seeds: seeds.to_vec(),
            })
        })
        .collect()
}
