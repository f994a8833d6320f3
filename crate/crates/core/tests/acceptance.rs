//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p modmul --test acceptance`; append
//! `-- 2 9` to run only the listed criteria.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use modmul::bignat::{mul_oracle, mul_schoolbook, BigNat};
use modmul::gfft::{
    convolve_oracle, dft, dft_counted, dft_oracle, idft, pointwise_mul, GroupSpec, PolyMV,
    TransformStats,
};
use modmul::multiply::{
    multiply, multiply_with_report, plan, plan_transform, MulPlan, MulReport, PlanKind,
    PlanOptions, THRESHOLD_ENV,
};
use modmul::primes::find_prime;
use modmul::ring::{OracleMul, RingCtx, RingElem};
use modmul::roots::{is_principal_in_ring, is_principal_scalar, RootTable};
use modmul::Residue;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn random_bits(bits: usize, rng: &mut ChaCha8Rng) -> BigNat {
    let limbs = (0..bits.div_ceil(64)).map(|_| rng.gen()).collect();
    BigNat::from_limbs(limbs).extract_bits(0, bits)
}

/// Operand pairs of at most `bits` bits: a few extremal ones, then uniform.
fn operand_pairs(bits: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<(BigNat, BigNat)> {
    let ones = BigNat::ones(bits);
    let mut pairs = vec![
        (ones.clone(), ones.clone()),
        (BigNat::zero(), ones.clone()),
        (BigNat::from_u64(1), ones.clone()),
        (BigNat::from_u64(1) << (bits - 1), ones),
    ];
    while pairs.len() < count {
        pairs.push((random_bits(bits, rng), random_bits(bits, rng)));
    }
    pairs.truncate(count);
    pairs
}

/// Transform-path plans at the sizes shared by several criteria.
struct Sweep {
    plans: BTreeMap<usize, MulPlan>,
}

impl Sweep {
    const EXPONENTS: [u32; 6] = [14, 16, 18, 20, 22, 24];

    fn build() -> Result<Self, String> {
        let options = PlanOptions::default();
        let mut plans = BTreeMap::new();
        for e in Self::EXPONENTS {
            plans.insert(1usize << e, plan_transform(1 << e, &options).map_err(err)?);
        }
        Ok(Sweep { plans })
    }

    fn get(&self, bits: usize) -> &MulPlan {
        &self.plans[&bits]
    }
}

fn criterion_1() -> Outcome {
    std::env::set_var(THRESHOLD_ENV, "2^3");
    let options = PlanOptions::from_env().map_err(err);
    std::env::remove_var(THRESHOLD_ENV);
    let tiny = plan(12, &options?).map_err(err)?;
    ensure(!tiny.is_oracle(), || {
        "12-bit plan fell back to the oracle".into()
    })?;
    let values: Vec<BigNat> = (0..1u64 << 12).map(BigNat::from_u64).collect();
    for a in &values {
        for b in &values {
            let got = multiply(a, b, &tiny).map_err(err)?;
            ensure(got == mul_oracle(a, b), || {
                format!("{} * {} differs", a.to_hex(), b.to_hex())
            })?;
        }
    }
    let p = tiny.params().expect("transform plan");
    Ok(format!(
        "{} pairs, plan M = {}, m = {}, p^c = {}^{}",
        values.len() * values.len(),
        p.group_side() / 2,
        p.alpha_degree,
        p.prime,
        p.exponent
    ))
}

fn criterion_2(sweep: &Sweep) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut total = 0;
    for (e, count) in [(14, 1000), (16, 1000), (18, 1000), (20, 1000), (24, 20)] {
        let bits = 1usize << e;
        let p = sweep.get(bits);
        for (a, b) in operand_pairs(bits, count, &mut rng) {
            let got = multiply(&a, &b, p).map_err(err)?;
            ensure(got == mul_oracle(&a, &b), || {
                format!("mismatch at N = 2^{e}")
            })?;
            total += 1;
        }
    }
    Ok(format!("{total} pairs over N = 2^14..2^20 and 2^24"))
}

/// `(p, c, m, k, 2M)`: two or more rings per transform shape.
const SMALL_SHAPES: [(u64, u32, usize, usize, usize); 12] = [
    (17, 3, 2, 1, 8),
    (41, 2, 4, 1, 8),
    (17, 2, 4, 1, 8),
    (97, 3, 8, 1, 16),
    (113, 2, 4, 1, 16),
    (97, 2, 2, 1, 16),
    (17, 2, 2, 2, 8),
    (73, 2, 4, 2, 8),
    (17, 3, 4, 2, 8),
    (5, 3, 2, 3, 4),
    (29, 2, 2, 3, 4),
    (13, 2, 2, 3, 4),
];

/// `(p, c, m, k, 2M)` with `p^c` above 2^64.
const WIDE_SHAPES: [(u64, u32, usize, usize, usize); 2] = [(97, 12, 4, 1, 16), (17, 20, 2, 3, 4)];

struct Shape<T: Residue> {
    ctx: Arc<RingCtx<T>>,
    roots: RootTable<T>,
    spec: GroupSpec,
}

fn shape<T: Residue>(p: u64, c: u32, m: usize, k: usize, side: usize) -> Result<Shape<T>, String> {
    let ctx = Arc::new(RingCtx::<T>::new(p, c, m).map_err(err)?);
    let roots = RootTable::build(&ctx, side, k, &OracleMul).map_err(err)?;
    let spec = GroupSpec::new(k, side, 2 * m).map_err(err)?;
    Ok(Shape { ctx, roots, spec })
}

fn random_poly<T: Residue>(s: &Shape<T>, rng: &mut ChaCha8Rng) -> PolyMV<T> {
    let modulus = s.ctx.modulus().as_u128();
    let data = (0..s.spec.order() * s.ctx.degree())
        .map(|_| T::from_u128_checked(rng.gen_range(0..modulus)).expect("below modulus"))
        .collect();
    PolyMV::from_flat(&s.ctx, s.spec.k(), s.spec.side(), data).expect("sized and reduced")
}

fn transform_roundtrips<T: Residue>(
    s: &Shape<T>,
    inputs: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), String> {
    for _ in 0..inputs {
        let f = random_poly(s, rng);
        let fast = dft(&f, &s.roots, &s.spec, &OracleMul).map_err(err)?;
        let slow = dft_oracle(&f, &s.roots, &s.spec, &OracleMul).map_err(err)?;
        ensure(fast == slow, || "dft differs from the direct sum".into())?;
        let back = idft(&fast, &s.roots, &s.spec, &OracleMul).map_err(err)?;
        ensure(back == f, || "idft(dft f) != f".into())?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut count = 0;
    for (p, c, m, k, side) in SMALL_SHAPES {
        let tag = |e: String| format!("p = {p}, c = {c}, m = {m}, k = {k}, 2M = {side}: {e}");
        transform_roundtrips(&shape::<u64>(p, c, m, k, side).map_err(tag)?, 200, &mut rng)
            .map_err(tag)?;
        count += 200;
    }
    for (p, c, m, k, side) in WIDE_SHAPES {
        let tag = |e: String| format!("p = {p}, c = {c}, m = {m}, k = {k}, 2M = {side}: {e}");
        transform_roundtrips(
            &shape::<u128>(p, c, m, k, side).map_err(tag)?,
            200,
            &mut rng,
        )
        .map_err(tag)?;
        count += 200;
    }
    Ok(format!(
        "{count} inputs over {} rings",
        SMALL_SHAPES.len() + WIDE_SHAPES.len()
    ))
}

fn convolutions<T: Residue>(
    s: &Shape<T>,
    inputs: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), String> {
    for _ in 0..inputs {
        let f = random_poly(s, rng);
        let g = random_poly(s, rng);
        let tf = dft(&f, &s.roots, &s.spec, &OracleMul).map_err(err)?;
        let tg = dft(&g, &s.roots, &s.spec, &OracleMul).map_err(err)?;
        let prod = pointwise_mul(&tf, &tg, &OracleMul).map_err(err)?;
        let via_fft = idft(&prod, &s.roots, &s.spec, &OracleMul).map_err(err)?;
        let direct = convolve_oracle(&f, &g, &OracleMul).map_err(err)?;
        ensure(via_fft == direct, || "idft(dft f · dft g) != f * g".into())?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut count = 0;
    for (p, c, m, k, side) in SMALL_SHAPES {
        let tag = |e: String| format!("p = {p}, c = {c}, m = {m}, k = {k}, 2M = {side}: {e}");
        convolutions(&shape::<u64>(p, c, m, k, side).map_err(tag)?, 50, &mut rng).map_err(tag)?;
        count += 50;
    }
    for (p, c, m, k, side) in WIDE_SHAPES {
        let tag = |e: String| format!("p = {p}, c = {c}, m = {m}, k = {k}, 2M = {side}: {e}");
        convolutions(&shape::<u128>(p, c, m, k, side).map_err(tag)?, 50, &mut rng).map_err(tag)?;
        count += 50;
    }
    Ok(format!("{count} convolutions"))
}

/// Largest group for which the principality sums are expanded here rather
/// than by the library.
const DIRECT_SUM_LIMIT: usize = 64;

/// `Σ_{i<n} r^(i·j) = 0` for `0 < j < n`, summed term by term.
fn schur_sums_vanish<T: Residue>(root: &RingElem<T>, n: usize) -> bool {
    let ctx = root.ctx();
    let zero = RingElem::zero(ctx);
    let mut step = RingElem::one(ctx);
    for _ in 1..n {
        step = step.mul(root, &OracleMul).expect("same ring");
        let mut term = RingElem::one(ctx);
        let mut sum = RingElem::zero(ctx);
        for _ in 0..n {
            sum = sum.add(&term).expect("same ring");
            term = term.mul(&step, &OracleMul).expect("same ring");
        }
        if sum != zero {
            return false;
        }
    }
    true
}

/// Coefficients of `Π_{i=1..m} (x − σ^(2i−1))` modulo `p^c`, lowest first.
fn odd_root_polynomial<T: Residue>(sigma: T, ctx: &RingCtx<T>) -> Vec<T> {
    let m = ctx.degree();
    let mut poly = vec![T::one()];
    let sigma_sq = ctx.mul(sigma, sigma);
    let mut root = sigma;
    for _ in 0..m {
        let mut next = vec![T::zero(); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i + 1] = ctx.add(next[i + 1], c);
            next[i] = ctx.sub(next[i], ctx.mul(c, root));
        }
        poly = next;
        root = ctx.mul(root, sigma_sq);
    }
    poly
}

fn root_certificate<T: Residue>(roots: &RootTable<T>) -> Result<(), String> {
    let ctx = roots.ctx();
    let (side, m) = (roots.side(), ctx.degree());
    let rho = roots.rho();
    let alpha = RingElem::alpha(ctx);
    ensure(
        rho.pow(side as u64, &OracleMul) == RingElem::one(ctx),
        || "ρ^(2M) != 1".into(),
    )?;
    ensure(rho.pow((side / 2 / m) as u64, &OracleMul) == alpha, || {
        "ρ^(M/m) != α".into()
    })?;
    let omega = RingElem::scalar(ctx, roots.omega());
    for (name, root, n) in [("ρ", rho, side), ("ω", &omega, side), ("α", &alpha, 2 * m)] {
        let principal = if n <= DIRECT_SUM_LIMIT {
            schur_sums_vanish(root, n)
        } else {
            is_principal_in_ring(root, n, &OracleMul)
        };
        ensure(principal, || {
            format!("{name} is not a principal {n}-th root")
        })?;
    }
    ensure(is_principal_scalar(roots.omega(), side, ctx), || {
        "ω fails the scalar check".into()
    })?;
    if m <= 8 {
        let poly = odd_root_polynomial(roots.sigma(), ctx);
        let expect: Vec<T> = (0..=m)
            .map(|i| {
                if i == 0 || i == m {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect();
        ensure(poly == expect, || "Π(x − σ^(2i−1)) != x^m + 1".into())?;
    }
    Ok(())
}

fn plan_certificate(plan: &MulPlan) -> Result<(), String> {
    match plan.kind() {
        PlanKind::Oracle => Err("oracle plan in the sweep".into()),
        PlanKind::Word(p) => root_certificate(p.roots()),
        PlanKind::Wide(p) => root_certificate(p.roots()),
    }
}

fn criterion_5(sweep: &Sweep) -> Outcome {
    let mut count = 0;
    let mut factored = 0;
    for (bits, p) in &sweep.plans {
        plan_certificate(p).map_err(|e| format!("N = {bits}: {e}"))?;
        count += 1;
    }
    for bits in [12, 64, 256, 1024, 4096] {
        let p = plan_transform(bits, &PlanOptions::default()).map_err(err)?;
        plan_certificate(&p).map_err(|e| format!("N = {bits}: {e}"))?;
        factored += usize::from(p.params().is_some_and(|q| q.alpha_degree <= 8));
        count += 1;
    }
    for (p, c, m, k, side) in SMALL_SHAPES {
        root_certificate(&shape::<u64>(p, c, m, k, side)?.roots)
            .map_err(|e| format!("p = {p}, m = {m}, 2M = {side}: {e}"))?;
        count += 1;
        factored += 1;
    }
    for (p, c, m, k, side) in WIDE_SHAPES {
        root_certificate(&shape::<u128>(p, c, m, k, side)?.roots)
            .map_err(|e| format!("p = {p}, m = {m}, 2M = {side}: {e}"))?;
        count += 1;
        factored += 1;
    }
    Ok(format!(
        "{count} root tables certified, {factored} with the x^m + 1 factorization"
    ))
}

fn least_prime_by_sieve(modulus: u64) -> u64 {
    let is_prime = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
    (1..)
        .map(|i| i * modulus + 1)
        .find(|&n| is_prime(n))
        .expect("progression contains primes")
}

fn criterion_6() -> Outcome {
    for e in 1..=16 {
        let half = 1u64 << e;
        let got = find_prime(half).map_err(err)?.p;
        let expect = least_prime_by_sieve(2 * half);
        ensure(got == expect, || {
            format!("2M = {}: got {got}, sieve says {expect}", 2 * half)
        })?;
    }
    for (half, expect) in [(4, 17), (32, 193)] {
        let got = find_prime(half).map_err(err)?.p;
        ensure(got == expect, || {
            format!("2M = {}: got {got}, expected {expect}", 2 * half)
        })?;
    }
    Ok("M = 2..2^16 agree with trial division; 2M = 8 -> 17, 2M = 64 -> 193".into())
}

struct CountingMul(AtomicU64);

impl modmul::IntMul for CountingMul {
    fn mul(&self, a: &BigNat, b: &BigNat) -> BigNat {
        self.0.fetch_add(1, Ordering::Relaxed);
        mul_oracle(a, b)
    }
}

fn shift_purity<T: Residue>(
    plan: &modmul::multiply::FftPlan<T>,
    a: &BigNat,
    b: &BigNat,
) -> Outcome {
    let spec = plan.spec();
    let (order, levels) = (spec.order() as u64, spec.twiddle_levels() as u64);
    let counter = CountingMul(AtomicU64::new(0));
    let stats = TransformStats::default();
    let poly = plan
        .product_poly(a, b, &counter, Some(&stats))
        .map_err(err)?;
    ensure(
        modmul::decode(&poly, plan.layout()) == mul_oracle(a, b),
        || "product differs".into(),
    )?;
    let calls = counter.0.load(Ordering::Relaxed);
    ensure(stats.twiddle_muls() == 3 * order * levels, || {
        format!("twiddle count {}", stats.twiddle_muls())
    })?;
    ensure(stats.pointwise_muls() == order, || {
        format!("pointwise count {}", stats.pointwise_muls())
    })?;
    ensure(calls == stats.general_muls(), || {
        format!(
            "{calls} integer products but {} twiddle/pointwise products",
            stats.general_muls()
        )
    })?;
    ensure(stats.shift_muls() > 0, || {
        "no shift operations recorded".into()
    })?;

    // A transform made only of inner stages performs no general products.
    let ctx = plan.ctx();
    let inner_side = 2 * ctx.degree();
    let inner_roots = RootTable::build(ctx, inner_side, 1, &OracleMul).map_err(err)?;
    let inner_spec = GroupSpec::new(1, inner_side, inner_side).map_err(err)?;
    let inner_counter = CountingMul(AtomicU64::new(0));
    let inner_stats = TransformStats::default();
    let mut f = PolyMV::zeros(ctx, 1, inner_side);
    for (i, x) in f.data_mut().iter_mut().enumerate() {
        *x = T::from_usize(i % 251).expect("small");
    }
    dft_counted(&f, &inner_roots, &inner_spec, &inner_counter, &inner_stats).map_err(err)?;
    ensure(inner_counter.0.load(Ordering::Relaxed) == 0, || {
        "inner transform called IntMul".into()
    })?;
    ensure(inner_stats.general_muls() == 0, || {
        "inner transform counted general products".into()
    })?;
    Ok(format!(
        "|E| = {order}, {levels} twiddle levels: {calls} general = 3·|E|·levels + |E|, {} shifts, 0 inside inner transforms",
        stats.shift_muls()
    ))
}

fn criterion_7(sweep: &Sweep) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bits = 1 << 18;
    let (a, b) = (random_bits(bits, &mut rng), random_bits(bits, &mut rng));
    match sweep.get(bits).kind() {
        PlanKind::Oracle => Err("oracle plan at 2^18".into()),
        PlanKind::Word(p) => shift_purity(p, &a, &b),
        PlanKind::Wide(p) => shift_purity(p, &a, &b),
    }
}

fn criterion_8(sweep: &Sweep) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut count = 0;
    for e in [14, 16, 18, 20] {
        let bits = 1usize << e;
        let p = sweep.get(bits);
        let params = p.params().expect("transform plan");
        let m = params.alpha_degree;
        let modulus = BigNat::from_u128(params.modulus().expect("fits"));
        for (a, b) in operand_pairs(bits, 100, &mut rng) {
            let cert = p
                .overflow_certificate(&a, &b)
                .map_err(err)?
                .expect("transform plan");
            ensure(cert.holds(params), || {
                format!("N = 2^{e}: bound violated: {cert:?}")
                    .chars()
                    .take(300)
                    .collect()
            })?;
            let residues = p
                .product_residues(&a, &b)
                .map_err(err)?
                .expect("transform plan");
            for (entry, slots) in residues.chunks_exact(m).enumerate() {
                for (j, &r) in slots.iter().enumerate() {
                    let exact = cert.coefficient(entry, j, params);
                    ensure(exact < &modulus && BigNat::from_u128(r) == *exact, || {
                        format!("N = 2^{e}: residue at entry {entry}, α^{j} differs from the exact coefficient")
                    })?;
                }
            }
            count += 1;
        }
    }
    Ok(format!(
        "{count} products: degrees, α-degree and coefficients within bounds; residues exact"
    ))
}

/// Least-squares slope of `log2 t` against `log2 n`, as a doubling ratio.
fn doubling_ratio(points: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).log2()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, t)| t.log2()).collect();
    let len = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / len, ys.iter().sum::<f64>() / len);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (cov / var).exp2()
}

/// Best of several timed runs, each at least `budget` long in total.
fn best_time(budget: Duration, mut f: impl FnMut()) -> f64 {
    let mut best = f64::MAX;
    for _ in 0..3 {
        let start = Instant::now();
        let mut reps = 0u32;
        while reps == 0 || start.elapsed() < budget {
            f();
            reps += 1;
        }
        best = best.min(start.elapsed().as_secs_f64() / f64::from(reps));
    }
    best
}

fn criterion_9(sweep: &Sweep) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let budget = Duration::from_millis(200);
    let mut fft = Vec::new();
    for e in 14..=24u32 {
        let bits = 1usize << e;
        let owned;
        let p = match sweep.plans.get(&bits) {
            Some(p) => p,
            None => {
                owned = plan_transform(bits, &PlanOptions::default()).map_err(err)?;
                &owned
            }
        };
        let (a, b) = (random_bits(bits, &mut rng), random_bits(bits, &mut rng));
        fft.push((
            bits,
            best_time(budget, || {
                std::hint::black_box(multiply(&a, &b, p).expect("within plan"));
            }),
        ));
    }
    let mut school = Vec::new();
    for e in 12..=15u32 {
        let bits = 1usize << e;
        let (a, b) = (random_bits(bits, &mut rng), random_bits(bits, &mut rng));
        school.push((
            bits,
            best_time(budget, || {
                std::hint::black_box(mul_schoolbook(&a, &b));
            }),
        ));
    }
    let (fft_ratio, school_ratio) = (doubling_ratio(&fft), doubling_ratio(&school));
    let table: Vec<String> = fft
        .iter()
        .map(|(n, t)| format!("2^{}:{:.3}s", n.trailing_zeros(), t))
        .collect();
    let detail = format!(
        "transform T(2N)/T(N) = {fft_ratio:.3} (<= 2.5), schoolbook = {school_ratio:.3} (>= 3.5); {}",
        table.join(" ")
    );
    ensure(fft_ratio <= 2.5 && school_ratio >= 3.5, || detail.clone())?;
    Ok(detail)
}

fn criterion_10() -> Outcome {
    std::env::set_var(THRESHOLD_ENV, "2^8");
    let options = PlanOptions::from_env().map_err(err);
    std::env::remove_var(THRESHOLD_ENV);
    let options = options?;
    ensure(options.threshold_bits == 256, || {
        "threshold not read from the environment".into()
    })?;
    let bits = 1 << 16;
    let p = plan(bits, &options).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (a, b) = (random_bits(bits, &mut rng), random_bits(bits, &mut rng));
    let report = MulReport::default();
    let got = multiply_with_report(&a, &b, &p, &report).map_err(err)?;
    ensure(got == mul_oracle(&a, &b), || {
        "product differs from the oracle".into()
    })?;
    ensure(report.max_depth() >= 2, || {
        format!("depth {}", report.max_depth())
    })?;
    Ok(format!(
        "depth {}, {} nested transform products",
        report.max_depth(),
        report.nested_calls()
    ))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let sweep = Sweep::build();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("exhaustive small", Box::new(criterion_1)),
        (
            "randomized large",
            Box::new(|| criterion_2(sweep.as_ref()?)),
        ),
        ("fft correctness", Box::new(criterion_3)),
        ("convolution theorem", Box::new(criterion_4)),
        (
            "root certificates",
            Box::new(|| criterion_5(sweep.as_ref()?)),
        ),
        ("prime search", Box::new(criterion_6)),
        ("shift purity", Box::new(|| criterion_7(sweep.as_ref()?))),
        (
            "overflow certificates",
            Box::new(|| criterion_8(sweep.as_ref()?)),
        ),
        (
            "empirical scaling",
            Box::new(|| criterion_9(sweep.as_ref()?)),
        ),
        ("recursion", Box::new(criterion_10)),
    ];
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !selected.is_empty() && !selected.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name:<22} [{secs:.1}s] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name:<22} [{secs:.1}s] {detail}", i + 1);
            }
        }
    }
    println!(
        "{} criteria, {failed} failed, {:.0}s",
        if selected.is_empty() {
            criteria.len()
        } else {
            selected.len()
        },
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
