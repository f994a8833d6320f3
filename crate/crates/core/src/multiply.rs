//! End-to-end multiplication: plan, encode, transform, pointwise products,
//! inverse transform, decode.
//!
//! Ring products inside the transforms are integer products of packed
//! operands. When such an operand has at least `threshold_bits` bits and its
//! power-of-two bucket is at most a quarter of the enclosing plan's, it is
//! multiplied by this module again; otherwise [`mul_oracle`] is used. The
//! required shrink bounds the recursion depth, since at small sizes a packed
//! operand can be nearly as wide as the plan's own operands.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::bignat::{mul_oracle, BigNat};
use crate::encode::{decode, encode, EncodeError, EncodingLayout, OverflowCertificate};
use crate::gfft::{self, FftError, GroupSpec, PolyMV, TransformStats};
use crate::params::{select_params_with, Params, ParamsError};
use crate::primes::{PrimeSearchReport, SearchStrategy};
use crate::ring::{IntMul, OracleMul, RingCtx, RingElem, RingError};
use crate::roots::{
    is_principal_in_ring, is_principal_scalar, odd_power_product, RootError, RootTable,
};
use crate::scalar::Residue;

/// Operands below this many bits are multiplied by [`mul_oracle`].
pub const DEFAULT_THRESHOLD_BITS: usize = 1 << 14;
/// Environment variable overriding [`DEFAULT_THRESHOLD_BITS`].
pub const THRESHOLD_ENV: &str = "MODMUL_THRESHOLD";
/// A nested product recurses only if its bucket is at most the enclosing
/// bucket divided by this.
pub const RECURSION_SHRINK: usize = 4;
/// Largest `m` for which the factorization of `x^m + 1` is re-expanded at
/// plan time.
const FACTOR_CHECK_MAX_DEGREE: usize = 8;

#[derive(Debug, Error)]
pub enum MulError {
    #[error("operand has {bits} bits; the plan handles at most {capacity}")]
    Range { bits: usize, capacity: usize },
    #[error("root certificate failed: {0}")]
    Certificate(&'static str),
    #[error("invalid {THRESHOLD_ENV} value {0:?}")]
    Threshold(String),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Fft(#[from] FftError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlanOptions {
    /// Number of variables `k`.
    pub num_vars: usize,
    pub threshold_bits: usize,
    pub strategy: SearchStrategy,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            num_vars: 1,
            threshold_bits: DEFAULT_THRESHOLD_BITS,
            strategy: SearchStrategy::Deterministic,
        }
    }
}

impl PlanOptions {
    /// Defaults, with the threshold taken from `MODMUL_THRESHOLD` if set.
    pub fn from_env() -> Result<Self, MulError> {
        let threshold_bits = match std::env::var(THRESHOLD_ENV) {
            Ok(v) => parse_threshold(&v)?,
            Err(_) => DEFAULT_THRESHOLD_BITS,
        };
        Ok(PlanOptions {
            threshold_bits,
            ..Self::default()
        })
    }

    pub fn with_num_vars(self, num_vars: usize) -> Self {
        PlanOptions { num_vars, ..self }
    }

    pub fn with_threshold(self, threshold_bits: usize) -> Self {
        PlanOptions {
            threshold_bits,
            ..self
        }
    }

    pub fn with_strategy(self, strategy: SearchStrategy) -> Self {
        PlanOptions { strategy, ..self }
    }
}

/// Accepts a decimal bit count or `2^e`.
pub fn parse_threshold(text: &str) -> Result<usize, MulError> {
    let t = text.trim();
    let parsed = match t.strip_prefix("2^") {
        Some(e) => e.parse::<u32>().ok().and_then(|e| 1usize.checked_shl(e)),
        None => t.parse().ok(),
    };
    parsed.ok_or_else(|| MulError::Threshold(text.to_string()))
}

/// Everything needed to run the transform path at one size.
#[derive(Debug)]
pub struct FftPlan<T: Residue> {
    params: Params,
    report: PrimeSearchReport,
    ctx: Arc<RingCtx<T>>,
    roots: RootTable<T>,
    spec: GroupSpec,
    layout: EncodingLayout,
}

impl<T: Residue> FftPlan<T> {
    fn build(params: Params, report: PrimeSearchReport) -> Result<Self, MulError> {
        let ctx = Arc::new(RingCtx::new(
            params.prime,
            params.exponent,
            params.alpha_degree,
        )?);
        let roots = RootTable::build(&ctx, params.group_side(), params.num_vars, &OracleMul)?;
        let spec = GroupSpec::from_params(&params)?;
        let layout = EncodingLayout::new(&params)?;
        let plan = FftPlan {
            params,
            report,
            ctx,
            roots,
            spec,
            layout,
        };
        plan.certify()?;
        Ok(plan)
    }

    /// Checks the defining identities of the roots once per plan.
    fn certify(&self) -> Result<(), MulError> {
        let ctx = &self.ctx;
        let m = ctx.degree();
        let side = self.roots.side();
        if !self.roots.defining_identities_hold(&OracleMul) {
            return Err(MulError::Certificate("rho^(M/m) = alpha and rho^M = -1"));
        }
        if !is_principal_in_ring(self.roots.rho(), side, &OracleMul) {
            return Err(MulError::Certificate("rho is not principal"));
        }
        if !is_principal_scalar(self.roots.omega(), side, ctx) {
            return Err(MulError::Certificate("omega is not principal"));
        }
        if !is_principal_in_ring(&RingElem::alpha(ctx), 2 * m, &OracleMul) {
            return Err(MulError::Certificate("alpha is not principal"));
        }
        if !self
            .spec
            .inner_roots_are_alpha_powers(&self.roots, &OracleMul)
        {
            return Err(MulError::Certificate("inner transform root is not alpha"));
        }
        if m <= FACTOR_CHECK_MAX_DEGREE {
            let poly = odd_power_product(self.roots.sigma(), ctx);
            let expect: Vec<T> = (0..=m)
                .map(|i| {
                    if i == 0 || i == m {
                        T::one()
                    } else {
                        T::zero()
                    }
                })
                .collect();
            if poly != expect {
                return Err(MulError::Certificate(
                    "odd powers of sigma do not factor x^m + 1",
                ));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn prime_report(&self) -> &PrimeSearchReport {
        &self.report
    }

    pub fn ctx(&self) -> &Arc<RingCtx<T>> {
        &self.ctx
    }

    pub fn roots(&self) -> &RootTable<T> {
        &self.roots
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn layout(&self) -> &EncodingLayout {
        &self.layout
    }

    /// The product polynomial `idft(dft(encode a)·dft(encode b))`.
    pub fn product_poly(
        &self,
        a: &BigNat,
        b: &BigNat,
        int_mul: &dyn IntMul,
        stats: Option<&TransformStats>,
    ) -> Result<PolyMV<T>, MulError> {
        let fa = encode(a, &self.layout, &self.ctx)?;
        let fb = encode(b, &self.layout, &self.ctx)?;
        let local = TransformStats::default();
        let stats = stats.unwrap_or(&local);
        let ta = gfft::dft_counted(&fa, &self.roots, &self.spec, int_mul, stats)?;
        let tb = gfft::dft_counted(&fb, &self.roots, &self.spec, int_mul, stats)?;
        let prod = gfft::pointwise_mul_counted(&ta, &tb, int_mul, stats)?;
        Ok(gfft::idft_counted(
            &prod,
            &self.roots,
            &self.spec,
            int_mul,
            stats,
        )?)
    }

    fn multiply(
        &self,
        a: &BigNat,
        b: &BigNat,
        int_mul: &dyn IntMul,
        stats: Option<&TransformStats>,
    ) -> Result<BigNat, MulError> {
        Ok(decode(
            &self.product_poly(a, b, int_mul, stats)?,
            &self.layout,
        ))
    }
}

/// How a plan multiplies.
#[derive(Debug)]
pub enum PlanKind {
    /// Below the threshold: [`mul_oracle`] directly.
    Oracle,
    /// Transform path with `p^c < 2^63`.
    Word(FftPlan<u64>),
    /// Transform path with `p^c < 2^127`.
    Wide(FftPlan<u128>),
}

#[derive(Debug)]
pub struct MulPlan {
    bits: usize,
    options: PlanOptions,
    kind: PlanKind,
}

impl MulPlan {
    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn options(&self) -> &PlanOptions {
        &self.options
    }

    pub fn kind(&self) -> &PlanKind {
        &self.kind
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self.kind, PlanKind::Oracle)
    }

    /// Parameters of the transform path, if any.
    pub fn params(&self) -> Option<&Params> {
        match &self.kind {
            PlanKind::Oracle => None,
            PlanKind::Word(p) => Some(p.params()),
            PlanKind::Wide(p) => Some(p.params()),
        }
    }

    pub fn prime_report(&self) -> Option<&PrimeSearchReport> {
        match &self.kind {
            PlanKind::Oracle => None,
            PlanKind::Word(p) => Some(p.prime_report()),
            PlanKind::Wide(p) => Some(p.prime_report()),
        }
    }

    /// Coefficients of `ρ(α)`, widened to `u128`.
    pub fn rho_coeffs(&self) -> Option<Vec<u128>> {
        match &self.kind {
            PlanKind::Oracle => None,
            PlanKind::Word(p) => Some(
                p.roots()
                    .rho()
                    .coeffs()
                    .iter()
                    .map(|&c| c as u128)
                    .collect(),
            ),
            PlanKind::Wide(p) => Some(p.roots().rho().coeffs().to_vec()),
        }
    }

    /// Power-of-two bucket used by the recursion guard.
    fn bucket(&self) -> usize {
        self.bits.max(1).next_power_of_two()
    }

    /// Exact coefficients of the unreduced product, for overflow checks.
    pub fn overflow_certificate(
        &self,
        a: &BigNat,
        b: &BigNat,
    ) -> Result<Option<OverflowCertificate>, MulError> {
        let layout = match &self.kind {
            PlanKind::Oracle => return Ok(None),
            PlanKind::Word(p) => p.layout(),
            PlanKind::Wide(p) => p.layout(),
        };
        Ok(Some(crate::encode::overflow_certificate(a, b, layout)?))
    }

    /// Residues of the transform-path product polynomial widened to `u128`,
    /// flattened like [`PolyMV::data`].
    pub fn product_residues(&self, a: &BigNat, b: &BigNat) -> Result<Option<Vec<u128>>, MulError> {
        let report = MulReport::default();
        let rec = Recurse {
            options: self.options,
            bucket: self.bucket(),
            depth: 1,
            report: &report,
        };
        Ok(match &self.kind {
            PlanKind::Oracle => None,
            PlanKind::Word(p) => Some(
                p.product_poly(a, b, &rec, None)?
                    .data()
                    .iter()
                    .map(|&c| c as u128)
                    .collect(),
            ),
            PlanKind::Wide(p) => Some(p.product_poly(a, b, &rec, None)?.into_data()),
        })
    }
}

/// Builds a plan for operands of at most `bits` bits.
pub fn plan(bits: usize, options: &PlanOptions) -> Result<MulPlan, MulError> {
    build_plan(bits, options, false)
}

/// Like [`plan`] but always takes the transform path at the top level;
/// nested ring products still follow `options.threshold_bits`.
pub fn plan_transform(bits: usize, options: &PlanOptions) -> Result<MulPlan, MulError> {
    build_plan(bits, options, true)
}

fn build_plan(bits: usize, options: &PlanOptions, force: bool) -> Result<MulPlan, MulError> {
    let bits = bits.max(1);
    let kind = if bits < options.threshold_bits && !force {
        PlanKind::Oracle
    } else {
        let (params, report) = select_params_with(bits, options.num_vars, options.strategy)?;
        let modulus = params.modulus().expect("selected modulus fits 127 bits");
        if modulus < 1u128 << <u64 as Residue>::MAX_MODULUS_BITS {
            PlanKind::Word(FftPlan::build(params, report)?)
        } else {
            PlanKind::Wide(FftPlan::build(params, report)?)
        }
    };
    Ok(MulPlan {
        bits,
        options: *options,
        kind,
    })
}

/// Counters for one top-level multiplication.
#[derive(Debug, Default)]
pub struct MulReport {
    /// Operation counts of the outermost transform only.
    pub stats: TransformStats,
    max_depth: AtomicUsize,
    nested_calls: AtomicUsize,
}

impl MulReport {
    /// Deepest level that ran the transform path; 0 if none did.
    pub fn max_depth(&self) -> usize {
        self.max_depth.load(Ordering::Relaxed)
    }

    /// Ring sub-products that were sent back through the transform path.
    pub fn nested_calls(&self) -> usize {
        self.nested_calls.load(Ordering::Relaxed)
    }
}

/// Integer multiplier handed to the ring at recursion depth `depth`.
struct Recurse<'a> {
    options: PlanOptions,
    bucket: usize,
    depth: usize,
    report: &'a MulReport,
}

impl IntMul for Recurse<'_> {
    fn mul(&self, a: &BigNat, b: &BigNat) -> BigNat {
        let bits = a.bit_len().max(b.bit_len()).max(1);
        if bits < self.options.threshold_bits
            || bits.next_power_of_two() * RECURSION_SHRINK > self.bucket
        {
            return mul_oracle(a, b);
        }
        self.report.nested_calls.fetch_add(1, Ordering::Relaxed);
        let plan = cached_plan(bits.next_power_of_two(), &self.options)
            .expect("nested plan construction succeeded at a larger size");
        run(a, b, &plan, self.depth + 1, self.report, false)
            .expect("nested operands are within the plan")
    }
}

fn run(
    a: &BigNat,
    b: &BigNat,
    plan: &MulPlan,
    depth: usize,
    report: &MulReport,
    record: bool,
) -> Result<BigNat, MulError> {
    let capacity = match plan.params() {
        Some(p) => p.padded_bits.max(plan.bits),
        None => plan.bits,
    };
    for x in [a, b] {
        if x.bit_len() > capacity {
            return Err(MulError::Range {
                bits: x.bit_len(),
                capacity,
            });
        }
    }
    let rec = Recurse {
        options: plan.options,
        bucket: plan.bucket(),
        depth,
        report,
    };
    let stats = record.then_some(&report.stats);
    let out = match &plan.kind {
        PlanKind::Oracle => return Ok(mul_oracle(a, b)),
        PlanKind::Word(p) => p.multiply(a, b, &rec, stats)?,
        PlanKind::Wide(p) => p.multiply(a, b, &rec, stats)?,
    };
    report.max_depth.fetch_max(depth, Ordering::Relaxed);
    Ok(out)
}

/// `a·b` under `plan`; both operands must fit the plan's width.
pub fn multiply(a: &BigNat, b: &BigNat, plan: &MulPlan) -> Result<BigNat, MulError> {
    multiply_with_report(a, b, plan, &MulReport::default())
}

/// [`multiply`] recording operation counts and recursion depth.
pub fn multiply_with_report(
    a: &BigNat,
    b: &BigNat,
    plan: &MulPlan,
    report: &MulReport,
) -> Result<BigNat, MulError> {
    run(a, b, plan, 1, report, true)
}

type PlanCache = Mutex<HashMap<(usize, PlanOptions), Arc<MulPlan>>>;

fn cache() -> &'static PlanCache {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The shared plan for the bucket containing `bits`.
pub fn cached_plan(bits: usize, options: &PlanOptions) -> Result<Arc<MulPlan>, MulError> {
    let bucket = bits.max(1).next_power_of_two();
    let key = (bucket, *options);
    if let Some(p) = cache().lock().expect("plan cache poisoned").get(&key) {
        return Ok(Arc::clone(p));
    }
    // Built outside the lock: nested plans may be requested meanwhile.
    let built = Arc::new(plan(bucket, options)?);
    let mut guard = cache().lock().expect("plan cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(built)))
}

fn auto_options() -> PlanOptions {
    static OPTIONS: OnceLock<PlanOptions> = OnceLock::new();
    *OPTIONS.get_or_init(|| PlanOptions::from_env().unwrap_or_default())
}

/// `a·b` with a cached plan sized to the larger operand. Options come from
/// the environment on first use.
pub fn mul_auto(a: &BigNat, b: &BigNat) -> BigNat {
    mul_with(a, b, &auto_options())
}

/// `a·b` with a cached plan for `options`.
pub fn mul_with(a: &BigNat, b: &BigNat, options: &PlanOptions) -> BigNat {
    let bits = a.bit_len().max(b.bit_len()).max(1);
    if bits < options.threshold_bits {
        return mul_oracle(a, b);
    }
    let plan =
        cached_plan(bits, options).expect("plans exist for every size up to the modulus limit");
    multiply(a, b, &plan).expect("operands fit their bucket")
}
