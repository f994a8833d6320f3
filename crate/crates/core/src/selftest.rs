//! Invariant suites run by `modmul selftest`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bignat::{mul_oracle, mul_schoolbook, BigNat};
use crate::encode::{decode, encode, overflow_certificate, EncodingLayout};
use crate::gfft::{convolve_oracle, dft, dft_oracle, idft, pointwise_mul, GroupSpec, PolyMV};
use crate::multiply::{multiply, plan_transform, PlanOptions};
use crate::params::{select_params, Params};
use crate::primes::{find_prime, is_prime};
use crate::ring::{OracleMul, RingCtx, RingElem};
use crate::roots::{is_principal_in_ring, is_principal_scalar, odd_power_product, RootTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    /// Largest `(2M)^k` exercised by the transform suites.
    pub fn group_cap(self) -> usize {
        match self {
            Level::Quick => 1 << 10,
            Level::Full => 1 << 12,
        }
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level {other:?} (expected quick or full)")),
        }
    }
}

/// A deliberate defect, used to check that the suites notice it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Multiply one tabulated twiddle `ρ^(-1)` by `α`.
    FlipTwiddle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {:<12} {}", self.name, self.detail)
    }
}

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

/// Runs every suite at `level`, optionally with a fault injected.
pub fn run(level: Level, fault: Option<Fault>) -> Vec<SuiteResult> {
    let suites: [(&'static str, fn(Level, Option<Fault>) -> Outcome); 8] = [
        ("primes", suite_primes),
        ("params", suite_params),
        ("ring", suite_ring),
        ("roots", suite_roots),
        ("gfft", suite_gfft),
        ("convolution", suite_convolution),
        ("encode", suite_encode),
        ("multiply", suite_multiply),
    ];
    suites
        .iter()
        .map(|(name, suite)| {
            let (passed, detail) = match suite(level, fault) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            SuiteResult {
                name,
                passed,
                detail,
            }
        })
        .collect()
}

fn suite_primes(level: Level, _: Option<Fault>) -> Outcome {
    let max_exp = match level {
        Level::Quick => 10,
        Level::Full => 16,
    };
    let limit = 1usize << 22;
    let mut composite = vec![false; limit];
    for i in 2..limit {
        if !composite[i] && i * i < limit {
            for j in (i * i..limit).step_by(i) {
                composite[j] = true;
            }
        }
    }
    for e in 1..=max_exp {
        let m_deg = 1u64 << e;
        let two_m = 2 * m_deg as usize;
        let expect = (1..)
            .map(|i| i * two_m + 1)
            .find(|&c| c >= limit || !composite[c]);
        let got = find_prime(m_deg).map_err(|e| e.to_string())?.p as usize;
        if let Some(c) = expect.filter(|&c| c < limit) {
            check(got == c, || {
                format!("2M = {two_m}: found {got}, least is {c}")
            })?;
        }
    }
    check(find_prime(4).map(|r| r.p) == Ok(17), || {
        "2M = 8 must give 17".into()
    })?;
    check(find_prime(32).map(|r| r.p) == Ok(193), || {
        "2M = 64 must give 193".into()
    })?;
    for n in 2..100_000u64 {
        check(is_prime(n) == Ok(!composite[n as usize]), || {
            format!("is_prime({n})")
        })?;
    }
    Ok(format!("least primes for 2M up to 2^{}", max_exp + 1))
}

fn suite_params(level: Level, _: Option<Fault>) -> Outcome {
    let max_exp = match level {
        Level::Quick => 16,
        Level::Full => 24,
    };
    let mut count = 0;
    for k in 1..=3 {
        for e in 4..=max_exp {
            for bits in [(1usize << e) - 3, 1 << e] {
                let p = select_params(bits, k).map_err(|e| e.to_string())?;
                let v = p.validate();
                check(v.is_empty(), || format!("N = {bits}, k = {k}: {v:?}"))?;
                let back = Params::from_kv(&p.to_kv()).map_err(|e| e.to_string())?;
                check(back == p, || "key=value round trip".into())?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} parameter bundles valid"))
}

fn suite_ring(level: Level, _: Option<Fault>) -> Outcome {
    let trials = match level {
        Level::Quick => 200,
        Level::Full => 2000,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (p, c, m) in [
        (5u64, 2u32, 2usize),
        (17, 5, 4),
        (193, 6, 8),
        (12289, 4, 32),
    ] {
        let ctx = Arc::new(RingCtx::<u128>::new(p, c, m).map_err(|e| e.to_string())?);
        let q = ctx.modulus();
        for _ in 0..trials / 4 {
            let x: Vec<u128> = (0..m).map(|_| rng.gen_range(0..q)).collect();
            let y: Vec<u128> = (0..m).map(|_| rng.gen_range(0..q)).collect();
            let mut expect = vec![0u128; m];
            for i in 0..m {
                for j in 0..m {
                    let t = ctx.mul(x[i], y[j]);
                    let d = i + j;
                    if d < m {
                        expect[d] = ctx.add(expect[d], t);
                    } else {
                        expect[d - m] = ctx.sub(expect[d - m], t);
                    }
                }
            }
            let got = RingElem::from_coeffs(&ctx, x)
                .and_then(|a| a.mul(&RingElem::from_coeffs(&ctx, y)?, &OracleMul))
                .map_err(|e| e.to_string())?;
            check(got.coeffs() == expect, || {
                format!("negacyclic product mod {p}^{c}, m = {m}")
            })?;
        }
    }
    Ok(format!("{trials} products agree with schoolbook"))
}

/// Transform shapes `(p, c, m, k, 2M)` with `(2M)^k` under the level cap.
fn shapes(level: Level) -> Vec<(u64, u32, usize, usize, usize)> {
    let all = [
        (17u64, 3u32, 2usize, 1usize, 8usize),
        (17, 2, 4, 1, 8),
        (97, 2, 2, 1, 16),
        (97, 3, 8, 1, 16),
        (17, 2, 2, 2, 8),
        (17, 3, 4, 2, 8),
        (5, 3, 2, 3, 4),
        (13, 2, 2, 3, 4),
        (193, 2, 4, 1, 64),
        (257, 1, 2, 2, 16),
        (12289, 2, 8, 1, 1024),
        (193, 2, 4, 2, 64),
    ];
    all.into_iter()
        .filter(|&(_, _, _, k, side)| side.pow(k as u32) <= level.group_cap())
        .collect()
}

fn build(
    p: u64,
    c: u32,
    m: usize,
    k: usize,
    side: usize,
    fault: Option<Fault>,
) -> Result<(Arc<RingCtx<u64>>, RootTable<u64>, GroupSpec), String> {
    let ctx = Arc::new(RingCtx::new(p, c, m).map_err(|e| e.to_string())?);
    let mut roots = RootTable::build(&ctx, side, k, &OracleMul).map_err(|e| e.to_string())?;
    if fault == Some(Fault::FlipTwiddle) {
        roots.corrupt_power(side - 1);
    }
    let spec = GroupSpec::new(k, side, 2 * m).map_err(|e| e.to_string())?;
    Ok((ctx, roots, spec))
}

fn random_poly(ctx: &Arc<RingCtx<u64>>, spec: &GroupSpec, rng: &mut ChaCha8Rng) -> PolyMV<u64> {
    let data = (0..spec.order() * ctx.degree())
        .map(|_| rng.gen_range(0..ctx.modulus()))
        .collect();
    PolyMV::from_flat(ctx, spec.k(), spec.side(), data).expect("reduced and sized")
}

fn suite_roots(level: Level, fault: Option<Fault>) -> Outcome {
    let mut count = 0;
    for (p, c, m, k, side) in shapes(level) {
        let (ctx, roots, spec) = build(p, c, m, k, side, fault)?;
        let tag = || format!("p = {p}, c = {c}, m = {m}, 2M = {side}");
        check(roots.defining_identities_hold(&OracleMul), || {
            format!("{}: ρ identities", tag())
        })?;
        check(is_principal_in_ring(roots.rho(), side, &OracleMul), || {
            format!("{}: ρ principal", tag())
        })?;
        check(is_principal_scalar(roots.omega(), side, &ctx), || {
            format!("{}: ω principal", tag())
        })?;
        check(
            is_principal_in_ring(&RingElem::alpha(&ctx), 2 * m, &OracleMul),
            || format!("{}: α principal", tag()),
        )?;
        check(
            spec.inner_roots_are_alpha_powers(&roots, &OracleMul),
            || format!("{}: inner roots", tag()),
        )?;
        let poly = odd_power_product(roots.sigma(), &ctx);
        let ok = poly[0] == 1 && poly[m] == 1 && poly[1..m].iter().all(|&c| c == 0);
        check(ok, || format!("{}: x^m + 1 factorization", tag()))?;
        count += 1;
    }
    Ok(format!("{count} root tables certified"))
}

fn suite_gfft(level: Level, fault: Option<Fault>) -> Outcome {
    let inputs = match level {
        Level::Quick => 10,
        Level::Full => 200,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xff7);
    let mut count = 0;
    for (p, c, m, k, side) in shapes(level) {
        let (ctx, roots, spec) = build(p, c, m, k, side, fault)?;
        let n = if spec.order() > 256 { 2 } else { inputs };
        for _ in 0..n {
            let f = random_poly(&ctx, &spec, &mut rng);
            let fast = dft(&f, &roots, &spec, &OracleMul).map_err(|e| e.to_string())?;
            let slow = dft_oracle(&f, &roots, &spec, &OracleMul).map_err(|e| e.to_string())?;
            check(fast == slow, || {
                format!("dft != oracle at p = {p}, m = {m}, k = {k}, 2M = {side}")
            })?;
            let back = idft(&fast, &roots, &spec, &OracleMul).map_err(|e| e.to_string())?;
            check(back == f, || {
                format!("idft(dft f) != f at k = {k}, 2M = {side}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} transforms match the direct sum"))
}

fn suite_convolution(level: Level, fault: Option<Fault>) -> Outcome {
    let inputs = match level {
        Level::Quick => 5,
        Level::Full => 50,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0);
    let mut count = 0;
    for (p, c, m, k, side) in shapes(level)
        .into_iter()
        .filter(|s| s.4.pow(s.3 as u32) <= 256)
    {
        let (ctx, roots, spec) = build(p, c, m, k, side, fault)?;
        for _ in 0..inputs {
            let f = random_poly(&ctx, &spec, &mut rng);
            let g = random_poly(&ctx, &spec, &mut rng);
            let via_fft = (|| {
                let prod = pointwise_mul(
                    &dft(&f, &roots, &spec, &OracleMul)?,
                    &dft(&g, &roots, &spec, &OracleMul)?,
                    &OracleMul,
                )?;
                idft(&prod, &roots, &spec, &OracleMul)
            })()
            .map_err(|e| e.to_string())?;
            let direct = convolve_oracle(&f, &g, &OracleMul).map_err(|e| e.to_string())?;
            check(via_fft == direct, || {
                format!("convolution theorem at k = {k}, 2M = {side}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} convolutions agree"))
}

fn suite_encode(level: Level, _: Option<Fault>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe1);
    for (bits, k) in [(16usize, 1usize), (1000, 1), (3000, 2), (5000, 3)] {
        let params = select_params(bits, k).map_err(|e| e.to_string())?;
        let layout = EncodingLayout::new(&params).map_err(|e| e.to_string())?;
        let ctx = Arc::new(
            RingCtx::<u128>::new(params.prime, params.exponent, params.alpha_degree)
                .map_err(|e| e.to_string())?,
        );
        for _ in 0..20 {
            let a = random_bits(bits, &mut rng);
            let back = decode(
                &encode(&a, &layout, &ctx).map_err(|e| e.to_string())?,
                &layout,
            );
            check(back == a, || format!("round trip at N = {bits}, k = {k}"))?;
            let b = random_bits(bits, &mut rng);
            let cert = overflow_certificate(&a, &b, &layout).map_err(|e| e.to_string())?;
            check(cert.holds(&params), || {
                format!("overflow bounds at N = {bits}, k = {k}")
            })?;
        }
    }
    if level == Level::Full {
        return homomorphism_sweep().map(|n| format!("round trips, overflow bounds, {n}"));
    }
    Ok("round trips and overflow bounds".into())
}

/// Covers every pair `a, b < 2^16` under the 16-bit plan. The transform
/// pipeline is bilinear over `Z/p^c` in the encoded coefficients, so it is
/// exact on all inputs once it is exact on every pair of coefficient basis
/// vectors; together with the coefficient bound (checked for the extreme
/// inputs) this gives `decode(...) = a·b` for all pairs. The sweep also runs
/// every `a < 2^16` against a fixed set of `b` through the full path.
fn homomorphism_sweep() -> Result<String, String> {
    let mul_plan = plan_transform(16, &PlanOptions::default()).map_err(|e| e.to_string())?;
    let params = select_params(16, 1).map_err(|e| e.to_string())?;
    let layout = EncodingLayout::new(&params).map_err(|e| e.to_string())?;
    let ctx = Arc::new(
        RingCtx::<u128>::new(params.prime, params.exponent, params.alpha_degree)
            .map_err(|e| e.to_string())?,
    );
    let roots =
        RootTable::build(&ctx, params.group_side(), 1, &OracleMul).map_err(|e| e.to_string())?;
    let spec = GroupSpec::from_params(&params).map_err(|e| e.to_string())?;
    let m = params.alpha_degree;
    let slots: Vec<(usize, usize)> = (0..params.degree_bound)
        .flat_map(|e| (0..m / 2).map(move |j| (e, j)))
        .collect();
    let basis = |(e, j): (usize, usize)| {
        let mut f = PolyMV::zeros(&ctx, 1, params.group_side());
        f.entry_mut(e)[j] = 1;
        f
    };
    for &x in &slots {
        for &y in &slots {
            let (f, g) = (basis(x), basis(y));
            let via = pointwise_mul(
                &dft(&f, &roots, &spec, &OracleMul).map_err(|e| e.to_string())?,
                &dft(&g, &roots, &spec, &OracleMul).map_err(|e| e.to_string())?,
                &OracleMul,
            )
            .and_then(|p| idft(&p, &roots, &spec, &OracleMul))
            .map_err(|e| e.to_string())?;
            let direct = convolve_oracle(&f, &g, &OracleMul).map_err(|e| e.to_string())?;
            check(via == direct, || format!("basis pair {x:?} x {y:?}"))?;
        }
    }
    let max = BigNat::ones(16);
    let cert = overflow_certificate(&max, &max, &layout).map_err(|e| e.to_string())?;
    check(cert.holds(&params), || {
        "coefficient bound at a = b = 2^16 - 1".into()
    })?;
    let fixed = [0u64, 1, 2, 255, 256, 4097, 0x8000, 0xabcd, 0xfffe, 0xffff];
    for a in 0..1u64 << 16 {
        for &b in &fixed {
            let got = multiply(&BigNat::from_u64(a), &BigNat::from_u64(b), &mul_plan)
                .map_err(|e| e.to_string())?;
            check(got == BigNat::from_u64(a * b), || format!("{a} * {b}"))?;
        }
    }
    Ok(format!(
        "{} basis pairs + {} direct products",
        slots.len().pow(2),
        fixed.len() << 16
    ))
}

fn random_bits(bits: usize, rng: &mut ChaCha8Rng) -> BigNat {
    let limbs = (0..bits.div_ceil(64)).map(|_| rng.gen()).collect();
    BigNat::from_limbs(limbs).extract_bits(0, bits)
}

fn suite_multiply(level: Level, _: Option<Fault>) -> Outcome {
    let (sizes, pairs): (&[usize], usize) = match level {
        Level::Quick => (&[12, 300, 4096], 20),
        Level::Full => (&[12, 300, 4096, 1 << 14, 1 << 16], 100),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x77);
    for &bits in sizes {
        let p = plan_transform(bits, &PlanOptions::default()).map_err(|e| e.to_string())?;
        for _ in 0..pairs {
            let a = random_bits(bits, &mut rng);
            let b = random_bits(bits, &mut rng);
            let got = multiply(&a, &b, &p).map_err(|e| e.to_string())?;
            check(got == mul_oracle(&a, &b), || {
                format!("product mismatch at N = {bits}")
            })?;
        }
    }
    let a = random_bits(3000, &mut rng);
    let b = random_bits(2000, &mut rng);
    check(mul_oracle(&a, &b) == mul_schoolbook(&a, &b), || {
        "Karatsuba vs schoolbook".into()
    })?;
    Ok(format!("{} products match the oracle", sizes.len() * pairs))
}
