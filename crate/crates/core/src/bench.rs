//! Timing runs for `modmul bench`.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bignat::{mul_oracle, BigNat};
use crate::multiply::{multiply_with_report, plan_transform, MulError, MulReport, PlanOptions};

/// CSV column names, in order.
pub const CSV_HEADER: [&str; 5] = [
    "n_bits",
    "algorithm",
    "wall_time_ns",
    "general_ring_muls",
    "shift_muls",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Fft,
    Oracle,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Fft => "fft",
            Algorithm::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub n_bits: usize,
    pub algorithm: Algorithm,
    pub wall_time_ns: u128,
    pub general_ring_muls: u64,
    pub shift_muls: u64,
}

impl BenchRecord {
    /// Fields in [`CSV_HEADER`] order.
    pub fn fields(&self) -> [String; 5] {
        [
            self.n_bits.to_string(),
            self.algorithm.to_string(),
            self.wall_time_ns.to_string(),
            self.general_ring_muls.to_string(),
            self.shift_muls.to_string(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub min_bits: usize,
    pub max_bits: usize,
    pub steps: usize,
    /// Count plan construction in the transform timings.
    pub include_plan: bool,
    pub seed: u64,
    pub options: PlanOptions,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("min_bits {min} exceeds max_bits {max}")]
    Range { min: usize, max: usize },
    #[error("steps must be at least 1")]
    NoSteps,
    #[error("transform product differs from the oracle at {0} bits")]
    Mismatch(usize),
    #[error(transparent)]
    Mul(#[from] MulError),
}

/// `steps` sizes from `min` to `max`, evenly spaced on a log scale.
pub fn sizes(min: usize, max: usize, steps: usize) -> Vec<usize> {
    if steps == 1 {
        return vec![min];
    }
    let (lo, hi) = ((min as f64).ln(), (max as f64).ln());
    (0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            (lo + t * (hi - lo)).exp().round() as usize
        })
        .collect()
}

/// One transform row and one oracle row per size. Each transform product
/// is compared with the oracle before its timing is kept.
pub fn run(config: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    if config.steps == 0 {
        return Err(BenchError::NoSteps);
    }
    if config.min_bits > config.max_bits || config.min_bits == 0 {
        return Err(BenchError::Range {
            min: config.min_bits,
            max: config.max_bits,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(2 * config.steps);
    for n in sizes(config.min_bits, config.max_bits, config.steps) {
        let a = random_bits(n, &mut rng);
        let b = random_bits(n, &mut rng);

        let start = Instant::now();
        let plan = plan_transform(n, &config.options)?;
        let plan_time = start.elapsed();
        let report = MulReport::default();
        let start = Instant::now();
        let product = multiply_with_report(&a, &b, &plan, &report)?;
        let mut fft_time = start.elapsed();
        if config.include_plan {
            fft_time += plan_time;
        }

        let start = Instant::now();
        let expect = mul_oracle(&a, &b);
        let oracle_time = start.elapsed();
        if product != expect {
            return Err(BenchError::Mismatch(n));
        }

        out.push(BenchRecord {
            n_bits: n,
            algorithm: Algorithm::Fft,
            wall_time_ns: fft_time.as_nanos().max(1),
            general_ring_muls: report.stats.general_muls(),
            shift_muls: report.stats.shift_muls(),
        });
        out.push(BenchRecord {
            n_bits: n,
            algorithm: Algorithm::Oracle,
            wall_time_ns: oracle_time.as_nanos().max(1),
            general_ring_muls: 0,
            shift_muls: 0,
        });
    }
    Ok(out)
}

fn random_bits(bits: usize, rng: &mut ChaCha8Rng) -> BigNat {
    let limbs = (0..bits.div_ceil(64)).map(|_| rng.gen()).collect();
    BigNat::from_limbs(limbs).extract_bits(0, bits)
}
