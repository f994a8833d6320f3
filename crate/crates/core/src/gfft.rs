//! Fourier transform over the group algebra `R[E]`, `E = (Z/2M)^k`.
//!
//! The transform at exponent `n` splits `E_n = (Z/n)^k` through the
//! subgroup `A = (Z/2m)^k`. Writing `x = b + s·a` (`s = n/2m`) and
//! `y = φ + 2m·λ`:
//!
//! 1. for each coset `b`, a transform over `A` with root `α` (shifts only);
//! 2. multiply entry `(b, φ)` by the twiddle `w^(-⟨b,φ⟩)`, `w = ρ^(2M/n)`;
//! 3. for each `φ`, a transform over `(Z/s)^k` with root `w^(2m)`, recursively.
//!
//! Once `n` divides `2m` every root needed is a power of `α` and the
//! transform is done directly. Entries are stored row-major with the first
//! axis outermost.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::params::Params;
use crate::ring::{IntMul, RingCtx, RingElem, RingError};
use crate::roots::RootTable;
use crate::scalar::Residue;

/// Largest `|E|` accepted by the quadratic oracles.
pub const ORACLE_LIMIT: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FftError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("operands live in different rings")]
    ContextMismatch,
    #[error("group order {order} exceeds the oracle limit {limit}")]
    TooLarge { order: usize, limit: usize },
    #[error("invalid group: side {side}, inner side {inner}, k = {k}")]
    BadSpec { k: usize, side: usize, inner: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// `E = (Z/side)^k` with subgroup `(Z/inner_side)^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    k: usize,
    side: usize,
    inner_side: usize,
    levels: Vec<usize>,
}

impl GroupSpec {
    pub fn new(k: usize, side: usize, inner_side: usize) -> Result<Self, FftError> {
        let ok = k >= 1
            && side.is_power_of_two()
            && inner_side.is_power_of_two()
            && inner_side >= 2
            && inner_side <= side
            && side.checked_pow(k as u32).is_some();
        if !ok {
            return Err(FftError::BadSpec {
                k,
                side,
                inner: inner_side,
            });
        }
        let mut levels = vec![side];
        let mut n = side;
        while n > inner_side {
            n /= inner_side;
            levels.push(n);
        }
        Ok(GroupSpec {
            k,
            side,
            inner_side,
            levels,
        })
    }

    pub fn from_params(params: &Params) -> Result<Self, FftError> {
        Self::new(
            params.num_vars,
            params.group_side(),
            2 * params.alpha_degree,
        )
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn inner_side(&self) -> usize {
        self.inner_side
    }

    /// Exponents of the groups visited by the recursion, outermost first.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Number of levels that apply a twiddle pass.
    pub fn twiddle_levels(&self) -> usize {
        self.levels.iter().filter(|&&n| n > self.inner_side).count()
    }

    /// `|E|`.
    pub fn order(&self) -> usize {
        self.side.pow(self.k as u32)
    }

    /// Row-major linear index of `coords` in `(Z/n)^k`.
    pub fn linear_index(coords: &[usize], n: usize) -> usize {
        coords.iter().fold(0, |acc, &c| acc * n + c)
    }

    /// Inverse of [`GroupSpec::linear_index`].
    pub fn coords(mut index: usize, n: usize, k: usize) -> Vec<usize> {
        let mut out = vec![0; k];
        for c in out.iter_mut().rev() {
            *c = index % n;
            index /= n;
        }
        out
    }

    /// Checks that every level's `A`-transform root is exactly `α`, and that
    /// the terminal root `ρ^(2M/n)` is `α^(2m/n)`.
    pub fn inner_roots_are_alpha_powers<T: Residue>(
        &self,
        roots: &RootTable<T>,
        int_mul: &dyn IntMul,
    ) -> bool {
        let alpha = RingElem::alpha(roots.ctx());
        self.levels.iter().all(|&n| {
            let w = self.side / n;
            if n > self.inner_side {
                roots.rho_pow(w * (n / self.inner_side), int_mul) == alpha
            } else {
                roots.rho_pow(w, int_mul) == alpha.mul_alpha_pow(self.inner_side / n - 1)
            }
        })
    }
}

/// Operation counters, shared across threads.
#[derive(Debug, Default)]
pub struct TransformStats {
    twiddle_muls: AtomicU64,
    pointwise_muls: AtomicU64,
    shift_muls: AtomicU64,
}

impl TransformStats {
    pub fn twiddle_muls(&self) -> u64 {
        self.twiddle_muls.load(Ordering::Relaxed)
    }

    pub fn pointwise_muls(&self) -> u64 {
        self.pointwise_muls.load(Ordering::Relaxed)
    }

    /// General ring multiplications (twiddles and pointwise products).
    pub fn general_muls(&self) -> u64 {
        self.twiddle_muls() + self.pointwise_muls()
    }

    /// Multiplications by a non-trivial power of `α`.
    pub fn shift_muls(&self) -> u64 {
        self.shift_muls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.twiddle_muls.store(0, Ordering::Relaxed);
        self.pointwise_muls.store(0, Ordering::Relaxed);
        self.shift_muls.store(0, Ordering::Relaxed);
    }
}

/// An element of `R[E]`: `(side)^k` ring elements stored flat.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMV<T: Residue> {
    ctx: Arc<RingCtx<T>>,
    k: usize,
    side: usize,
    data: Vec<T>,
}

impl<T: Residue> std::fmt::Debug for PolyMV<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PolyMV")
            .field("k", &self.k)
            .field("side", &self.side)
            .field("data", &self.data)
            .finish()
    }
}

impl<T: Residue> PolyMV<T> {
    pub fn zeros(ctx: &Arc<RingCtx<T>>, k: usize, side: usize) -> Self {
        PolyMV {
            ctx: Arc::clone(ctx),
            k,
            side,
            data: vec![T::zero(); side.pow(k as u32) * ctx.degree()],
        }
    }

    /// One at the identity, zero elsewhere.
    pub fn delta(ctx: &Arc<RingCtx<T>>, k: usize, side: usize) -> Self {
        let mut f = Self::zeros(ctx, k, side);
        f.data[0] = T::one();
        f
    }

    /// Every entry equal to `value`.
    pub fn constant(value: &RingElem<T>, k: usize, side: usize) -> Self {
        let mut f = Self::zeros(value.ctx(), k, side);
        for chunk in f.data.chunks_exact_mut(value.ctx().degree()) {
            chunk.copy_from_slice(value.coeffs());
        }
        f
    }

    /// Builds from flat coefficients (`|E|·m` reduced residues).
    pub fn from_flat(
        ctx: &Arc<RingCtx<T>>,
        k: usize,
        side: usize,
        data: Vec<T>,
    ) -> Result<Self, FftError> {
        let len = side.pow(k as u32) * ctx.degree();
        if data.len() != len {
            return Err(RingError::Length {
                expected: len,
                got: data.len(),
            }
            .into());
        }
        if let Some(&c) = data.iter().find(|&&c| c >= ctx.modulus()) {
            return Err(RingError::OutOfRange(c.as_u128()).into());
        }
        Ok(PolyMV {
            ctx: Arc::clone(ctx),
            k,
            side,
            data,
        })
    }

    pub fn ctx(&self) -> &Arc<RingCtx<T>> {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Number of entries, `side^k`.
    pub fn len(&self) -> usize {
        self.data.len() / self.ctx.degree()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn entry(&self, index: usize) -> &[T] {
        let m = self.ctx.degree();
        &self.data[index * m..(index + 1) * m]
    }

    pub fn entry_mut(&mut self, index: usize) -> &mut [T] {
        let m = self.ctx.degree();
        &mut self.data[index * m..(index + 1) * m]
    }

    pub fn get(&self, index: usize) -> RingElem<T> {
        RingElem::from_slice_unchecked(&self.ctx, self.entry(index))
    }

    pub fn set(&mut self, index: usize, value: &RingElem<T>) -> Result<(), FftError> {
        if **value.ctx() != *self.ctx {
            return Err(FftError::ContextMismatch);
        }
        self.entry_mut(index).copy_from_slice(value.coeffs());
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FftError> {
        check_same(self, other)?;
        let mut out = self.clone();
        self.ctx.add_assign(&mut out.data, &other.data);
        Ok(out)
    }

    /// Every entry multiplied by the scalar `s`.
    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        self.ctx.scale_assign(&mut out.data, s % self.ctx.modulus());
        out
    }

    fn shape(&self) -> (usize, usize) {
        (self.k, self.side)
    }
}

fn check_same<T: Residue>(a: &PolyMV<T>, b: &PolyMV<T>) -> Result<(), FftError> {
    if a.shape() != b.shape() {
        return Err(FftError::Shape {
            expected: a.shape(),
            found: b.shape(),
        });
    }
    if !Arc::ptr_eq(&a.ctx, &b.ctx) && *a.ctx != *b.ctx {
        return Err(FftError::ContextMismatch);
    }
    Ok(())
}

fn check_inputs<T: Residue>(
    f: &PolyMV<T>,
    roots: &RootTable<T>,
    spec: &GroupSpec,
) -> Result<(), FftError> {
    let expected = (spec.k, spec.side);
    if f.shape() != expected {
        return Err(FftError::Shape {
            expected,
            found: f.shape(),
        });
    }
    if roots.side() != spec.side || 2 * roots.ctx().degree() != spec.inner_side {
        return Err(FftError::BadSpec {
            k: spec.k,
            side: roots.side(),
            inner: 2 * roots.ctx().degree(),
        });
    }
    if *f.ctx != **roots.ctx() {
        return Err(FftError::ContextMismatch);
    }
    Ok(())
}

struct Engine<'a, T: Residue> {
    ctx: &'a RingCtx<T>,
    roots: &'a RootTable<T>,
    k: usize,
    side: usize,
    inner: usize,
    inverse: bool,
    int_mul: &'a dyn IntMul,
    stats: Option<&'a TransformStats>,
}

impl<T: Residue> Engine<'_, T> {
    fn count(&self, counter: fn(&TransformStats) -> &AtomicU64, n: u64) {
        if let Some(s) = self.stats {
            counter(s).fetch_add(n, Ordering::Relaxed);
        }
    }

    /// Transform of `input` over `(Z/n)^k` with root `ρ^(±2M/n)` into `out`.
    fn transform(&self, input: &[T], n: usize, out: &mut [T]) {
        let (k, m, inner) = (self.k, self.ctx.degree(), self.inner);
        if inner % n == 0 {
            out.copy_from_slice(input);
            self.direct(out, n);
            return;
        }
        let s = n / inner;
        let a_count = inner.pow(k as u32);
        let b_count = s.pow(k as u32);
        let b_coords: Vec<Vec<usize>> = (0..b_count).map(|b| GroupSpec::coords(b, s, k)).collect();
        let a_coords: Vec<Vec<usize>> = (0..a_count)
            .map(|a| GroupSpec::coords(a, inner, k))
            .collect();
        let b_offset: Vec<usize> = b_coords
            .iter()
            .map(|c| GroupSpec::linear_index(c, n))
            .collect();
        let a_offset: Vec<usize> = a_coords
            .iter()
            .map(|c| c.iter().fold(0, |acc, &x| acc * n + x * s))
            .collect();
        let twiddle_unit = self.side / n;

        // Steps 1 and 2: coset transforms, then twiddles, stored φ-major.
        let mut mixed = vec![T::zero(); n.pow(k as u32) * m];
        let mut line = vec![T::zero(); a_count * m];
        for (b, bc) in b_coords.iter().enumerate() {
            for (a, &off) in a_offset.iter().enumerate() {
                let src = (b_offset[b] + off) * m;
                line[a * m..(a + 1) * m].copy_from_slice(&input[src..src + m]);
            }
            self.direct(&mut line, inner);
            for (phi, pc) in a_coords.iter().enumerate() {
                let dot: usize = bc.iter().zip(pc).map(|(x, y)| x * y).sum();
                let e = (twiddle_unit * dot) % self.side;
                let e = if self.inverse {
                    e
                } else {
                    (self.side - e) % self.side
                };
                let twiddle = self.roots.rho_pow_coeffs(e, self.int_mul);
                let dst = (phi * b_count + b) * m;
                self.ctx.mul_into(
                    &line[phi * m..(phi + 1) * m],
                    &twiddle,
                    &mut mixed[dst..dst + m],
                    self.int_mul,
                );
            }
        }
        self.count(|s| &s.twiddle_muls, (a_count * b_count) as u64);

        // Step 3: transforms over the quotient, scattered to y = φ + 2m·λ.
        let block = b_count * m;
        let mut sub = vec![T::zero(); block];
        let lambda_offset: Vec<usize> = b_coords
            .iter()
            .map(|c| c.iter().fold(0, |acc, &x| acc * n + x * inner))
            .collect();
        for (phi, pc) in a_coords.iter().enumerate() {
            self.transform(&mixed[phi * block..(phi + 1) * block], s, &mut sub);
            let phi_offset = GroupSpec::linear_index(pc, n);
            for (lambda, &off) in lambda_offset.iter().enumerate() {
                let dst = (phi_offset + off) * m;
                out[dst..dst + m].copy_from_slice(&sub[lambda * m..(lambda + 1) * m]);
            }
        }
    }

    /// In-place transform over `(Z/n)^k`, `n | 2m`, axis by axis.
    fn direct(&self, data: &mut [T], n: usize) {
        if n == 1 {
            return;
        }
        let (k, m) = (self.k, self.ctx.degree());
        let mut line = vec![T::zero(); n * m];
        let mut scratch = vec![T::zero(); m];
        for axis in 0..k {
            let stride = n.pow((k - 1 - axis) as u32);
            let outer = n.pow(axis as u32);
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * n * stride + i;
                    for x in 0..n {
                        let src = (base + x * stride) * m;
                        line[x * m..(x + 1) * m].copy_from_slice(&data[src..src + m]);
                    }
                    self.radix2(&mut line, n, &mut scratch);
                    for x in 0..n {
                        let dst = (base + x * stride) * m;
                        data[dst..dst + m].copy_from_slice(&line[x * m..(x + 1) * m]);
                    }
                }
            }
        }
    }

    /// Length-`n` transform with root `α^(±2m/n)`: bit reversal followed by
    /// radix-2 butterflies whose twiddles are `α`-powers.
    fn radix2(&self, line: &mut [T], n: usize, scratch: &mut [T]) {
        let m = self.ctx.degree();
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                for c in 0..m {
                    line.swap(i * m + c, j * m + c);
                }
            }
        }
        let mut shifts = 0u64;
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let unit = self.inner / len;
            for start in (0..n).step_by(len) {
                for j in 0..half {
                    let e = unit * j;
                    let e = if self.inverse || e == 0 {
                        e
                    } else {
                        self.inner - e
                    };
                    let (lo, hi) = line.split_at_mut((start + half + j) * m);
                    let u = &mut lo[(start + j) * m..(start + j + 1) * m];
                    let v = &mut hi[..m];
                    if e != 0 {
                        self.ctx.mul_alpha_pow_into(v, e, scratch);
                        v.copy_from_slice(scratch);
                        shifts += 1;
                    }
                    scratch.copy_from_slice(u);
                    self.ctx.add_assign(u, v);
                    self.ctx.sub_assign(scratch, v);
                    v.copy_from_slice(scratch);
                }
            }
            len *= 2;
        }
        self.count(|s| &s.shift_muls, shifts);
    }
}

fn run<T: Residue>(
    f: &PolyMV<T>,
    roots: &RootTable<T>,
    spec: &GroupSpec,
    inverse: bool,
    int_mul: &dyn IntMul,
    stats: Option<&TransformStats>,
) -> Result<PolyMV<T>, FftError> {
    check_inputs(f, roots, spec)?;
    let engine = Engine {
        ctx: &f.ctx,
        roots,
        k: spec.k,
        side: spec.side,
        inner: spec.inner_side,
        inverse,
        int_mul,
        stats,
    };
    let mut out = PolyMV::zeros(&f.ctx, spec.k, spec.side);
    engine.transform(&f.data, spec.side, &mut out.data);
    if inverse {
        f.ctx.scale_assign(&mut out.data, roots.group_order_inv());
    }
    Ok(out)
}

/// Forward transform: `F[y] = Σ_x ρ^(-⟨x,y⟩) f[x]`.
pub fn dft<T: Residue>(
    f: &PolyMV<T>,
    roots: &RootTable<T>,
    spec: &GroupSpec,
    int_mul: &dyn IntMul,
) -> Result<PolyMV<T>, FftError> {
    run(f, roots, spec, false, int_mul, None)
}

/// [`dft`] recording operation counts into `stats`.
pub fn dft_counted<T: Residue>(
    f: &PolyMV<T>,
    roots: &RootTable<T>,
    spec: &GroupSpec,
    int_mul: &dyn IntMul,
    stats: &TransformStats,
) -> Result<PolyMV<T>, FftError> {
    run(f, roots, spec, false, int_mul, Some(stats))
}

/// Inverse transform: `f[x] = |E|^(-1) Σ_y ρ^(⟨x,y⟩) F[y]`.
pub fn idft<T: Residue>(
    f: &PolyMV<T>,
    roots: &RootTable<T>,
    spec: &GroupSpec,
    int_mul: &dyn IntMul,
) -> Result<PolyMV<T>, FftError> {
    run(f, roots, spec, true, int_mul, None)
}

/// [`idft`] recording operation counts into `stats`.
pub fn idft_counted<T: Residue>(
    f: &PolyMV<T>,
    roots: &RootTable<T>,
    spec: &GroupSpec,
    int_mul: &dyn IntMul,
    stats: &TransformStats,
) -> Result<PolyMV<T>, FftError> {
    run(f, roots, spec, true, int_mul, Some(stats))
}

/// Entry-wise products.
pub fn pointwise_mul<T: Residue>(
    f: &PolyMV<T>,
    g: &PolyMV<T>,
    int_mul: &dyn IntMul,
) -> Result<PolyMV<T>, FftError> {
    pointwise_impl(f, g, int_mul, None)
}

pub fn pointwise_mul_counted<T: Residue>(
    f: &PolyMV<T>,
    g: &PolyMV<T>,
    int_mul: &dyn IntMul,
    stats: &TransformStats,
) -> Result<PolyMV<T>, FftError> {
    pointwise_impl(f, g, int_mul, Some(stats))
}

fn pointwise_impl<T: Residue>(
    f: &PolyMV<T>,
    g: &PolyMV<T>,
    int_mul: &dyn IntMul,
    stats: Option<&TransformStats>,
) -> Result<PolyMV<T>, FftError> {
    check_same(f, g)?;
    let m = f.ctx.degree();
    let mut out = PolyMV::zeros(&f.ctx, f.k, f.side);
    for ((x, y), o) in f
        .data
        .chunks_exact(m)
        .zip(g.data.chunks_exact(m))
        .zip(out.data.chunks_exact_mut(m))
    {
        f.ctx.mul_into(x, y, o, int_mul);
    }
    if let Some(s) = stats {
        s.pointwise_muls
            .fetch_add(f.len() as u64, Ordering::Relaxed);
    }
    Ok(out)
}

fn oracle_guard(order: usize) -> Result<(), FftError> {
    if order > ORACLE_LIMIT {
        return Err(FftError::TooLarge {
            order,
            limit: ORACLE_LIMIT,
        });
    }
    Ok(())
}

/// `F[y] = Σ_x ρ^(-⟨x,y⟩) f[x]` by direct summation, with the powers of `ρ`
/// recomputed from `ρ` itself rather than read from the table.
pub fn dft_oracle<T: Residue>(
    f: &PolyMV<T>,
    roots: &RootTable<T>,
    spec: &GroupSpec,
    int_mul: &dyn IntMul,
) -> Result<PolyMV<T>, FftError> {
    check_inputs(f, roots, spec)?;
    oracle_guard(spec.order())?;
    let ctx = &f.ctx;
    let side = spec.side;
    let mut pows = vec![RingElem::one(ctx)];
    for t in 1..side {
        pows.push(pows[t - 1].mul(roots.rho(), int_mul)?);
    }
    let coords: Vec<Vec<usize>> = (0..f.len())
        .map(|i| GroupSpec::coords(i, side, spec.k))
        .collect();
    let mut out = PolyMV::zeros(ctx, spec.k, side);
    for (y, yc) in coords.iter().enumerate() {
        let mut acc = RingElem::zero(ctx);
        for (x, xc) in coords.iter().enumerate() {
            let fx = f.get(x);
            if fx.is_zero() {
                continue;
            }
            let dot: usize = xc.iter().zip(yc).map(|(a, b)| a * b).sum::<usize>() % side;
            acc = acc.add(&pows[(side - dot) % side].mul(&fx, int_mul)?)?;
        }
        out.set(y, &acc)?;
    }
    Ok(out)
}

/// `(f ∗ g)[u] = Σ_{x+y=u} f[x]·g[y]` by direct summation.
pub fn convolve_oracle<T: Residue>(
    f: &PolyMV<T>,
    g: &PolyMV<T>,
    int_mul: &dyn IntMul,
) -> Result<PolyMV<T>, FftError> {
    check_same(f, g)?;
    oracle_guard(f.len())?;
    let (k, side) = f.shape();
    let coords: Vec<Vec<usize>> = (0..f.len())
        .map(|i| GroupSpec::coords(i, side, k))
        .collect();
    let mut out: Vec<RingElem<T>> = vec![RingElem::zero(&f.ctx); f.len()];
    let mut sum = vec![0; k];
    for (x, xc) in coords.iter().enumerate() {
        let fx = f.get(x);
        if fx.is_zero() {
            continue;
        }
        for (y, yc) in coords.iter().enumerate() {
            let gy = g.get(y);
            if gy.is_zero() {
                continue;
            }
            for ((s, a), b) in sum.iter_mut().zip(xc).zip(yc) {
                *s = (a + b) % side;
            }
            let u = GroupSpec::linear_index(&sum, side);
            out[u] = out[u].add(&fx.mul(&gy, int_mul)?)?;
        }
    }
    let mut result = PolyMV::zeros(&f.ctx, k, side);
    for (u, v) in out.iter().enumerate() {
        result.set(u, v)?;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::OracleMul;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::atomic::AtomicUsize;

    struct Setup {
        ctx: Arc<RingCtx<u64>>,
        roots: RootTable<u64>,
        spec: GroupSpec,
    }

    fn setup(p: u64, c: u32, m: usize, k: usize, side: usize) -> Setup {
        let ctx = Arc::new(RingCtx::new(p, c, m).unwrap());
        let roots = RootTable::build(&ctx, side, k, &OracleMul).unwrap();
        let spec = GroupSpec::new(k, side, 2 * m).unwrap();
        Setup { ctx, roots, spec }
    }

    fn random_poly(s: &Setup, rng: &mut ChaCha8Rng) -> PolyMV<u64> {
        let n = s.spec.order() * s.ctx.degree();
        let q = s.ctx.modulus();
        let data = (0..n).map(|_| rng.gen_range(0..q)).collect();
        PolyMV::from_flat(&s.ctx, s.spec.k(), s.spec.side(), data).unwrap()
    }

    #[test]
    fn spec_levels() {
        let spec = GroupSpec::new(1, 1 << 16, 64).unwrap();
        assert_eq!(spec.levels(), &[1 << 16, 1024, 16]);
        assert_eq!(spec.twiddle_levels(), 2);
        let spec = GroupSpec::new(2, 8, 8).unwrap();
        assert_eq!(spec.levels(), &[8]);
        assert_eq!(spec.twiddle_levels(), 0);
        assert!(GroupSpec::new(1, 8, 16).is_err());
        assert!(GroupSpec::new(1, 12, 4).is_err());
    }

    #[test]
    fn index_roundtrip() {
        for i in 0..512 {
            let c = GroupSpec::coords(i, 8, 3);
            assert_eq!(GroupSpec::linear_index(&c, 8), i);
        }
        assert_eq!(GroupSpec::coords(1, 8, 2), vec![0, 1]);
    }

    #[test]
    fn delta_and_constant() {
        let s = setup(17, 2, 2, 2, 8);
        let delta = PolyMV::delta(&s.ctx, 2, 8);
        let one = RingElem::one(&s.ctx);
        let ones = PolyMV::constant(&one, 2, 8);
        assert_eq!(dft(&delta, &s.roots, &s.spec, &OracleMul).unwrap(), ones);
        assert_eq!(
            dft_oracle(&delta, &s.roots, &s.spec, &OracleMul).unwrap(),
            delta_like_ones(&s)
        );

        let f = dft(&ones, &s.roots, &s.spec, &OracleMul).unwrap();
        assert_eq!(f.get(0), RingElem::scalar(&s.ctx, 64));
        assert!((1..64).all(|i| f.get(i).is_zero()));
        assert_eq!(idft(&ones, &s.roots, &s.spec, &OracleMul).unwrap(), delta);
    }

    fn delta_like_ones(s: &Setup) -> PolyMV<u64> {
        PolyMV::constant(&RingElem::one(&s.ctx), s.spec.k(), s.spec.side())
    }

    #[test]
    fn four_point_dft_matrix() {
        // k = 1, 2M = 4, m = 2, p = 5: ρ has order 4 and the transform is
        // the matrix [ρ^(-ij)].
        let s = setup(5, 1, 2, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let f = random_poly(&s, &mut rng);
            let out = dft(&f, &s.roots, &s.spec, &OracleMul).unwrap();
            for y in 0..4 {
                let mut acc = RingElem::zero(&s.ctx);
                for x in 0..4 {
                    let w = s.roots.rho_inv_pow(x * y, &OracleMul);
                    acc = acc.add(&w.mul(&f.get(x), &OracleMul).unwrap()).unwrap();
                }
                assert_eq!(out.get(y), acc);
            }
        }
    }

    #[test]
    fn matches_oracle() {
        let configs = [
            (17u64, 3u32, 2usize, 1usize, 8usize),
            (17, 2, 4, 2, 8),
            (97, 2, 2, 1, 16),
            (193, 2, 4, 1, 64),
            (97, 1, 2, 3, 8),
            (257, 1, 2, 2, 16),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, c, m, k, side) in configs {
            let s = setup(p, c, m, k, side);
            for _ in 0..10 {
                let f = random_poly(&s, &mut rng);
                let fast = dft(&f, &s.roots, &s.spec, &OracleMul).unwrap();
                let slow = dft_oracle(&f, &s.roots, &s.spec, &OracleMul).unwrap();
                assert_eq!(fast, slow, "p={p} c={c} m={m} k={k} side={side}");
                assert_eq!(idft(&fast, &s.roots, &s.spec, &OracleMul).unwrap(), f);
            }
        }
    }

    #[test]
    fn oracle_is_linear() {
        let s = setup(17, 2, 2, 2, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_poly(&s, &mut rng);
        let g = random_poly(&s, &mut rng);
        let lhs = dft_oracle(
            &f.scale(3).add(&g.scale(5)).unwrap(),
            &s.roots,
            &s.spec,
            &OracleMul,
        )
        .unwrap();
        let rhs = dft_oracle(&f, &s.roots, &s.spec, &OracleMul)
            .unwrap()
            .scale(3)
            .add(
                &dft_oracle(&g, &s.roots, &s.spec, &OracleMul)
                    .unwrap()
                    .scale(5),
            )
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_on_every_basis_vector() {
        let s = setup(17, 2, 2, 2, 8);
        let m = s.ctx.degree();
        for i in 0..s.spec.order() * m {
            let mut data = vec![0u64; s.spec.order() * m];
            data[i] = 1;
            let f = PolyMV::from_flat(&s.ctx, 2, 8, data).unwrap();
            let back = idft(
                &dft(&f, &s.roots, &s.spec, &OracleMul).unwrap(),
                &s.roots,
                &s.spec,
                &OracleMul,
            )
            .unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn convolution_theorem() {
        let s = setup(17, 3, 2, 1, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let f = random_poly(&s, &mut rng);
            let g = random_poly(&s, &mut rng);
            let prod = pointwise_mul(
                &dft(&f, &s.roots, &s.spec, &OracleMul).unwrap(),
                &dft(&g, &s.roots, &s.spec, &OracleMul).unwrap(),
                &OracleMul,
            )
            .unwrap();
            let conv = idft(&prod, &s.roots, &s.spec, &OracleMul).unwrap();
            assert_eq!(conv, convolve_oracle(&f, &g, &OracleMul).unwrap());
            assert_eq!(conv, convolve_oracle(&g, &f, &OracleMul).unwrap());
        }
    }

    #[test]
    fn convolution_basics() {
        let s = setup(17, 2, 2, 2, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_poly(&s, &mut rng);
        let delta = PolyMV::delta(&s.ctx, 2, 8);
        assert_eq!(convolve_oracle(&f, &delta, &OracleMul).unwrap(), f);
        let ones = delta_like_ones(&s);
        assert_eq!(pointwise_mul(&f, &ones, &OracleMul).unwrap(), f);
        let zero = PolyMV::zeros(&s.ctx, 2, 8);
        assert!(pointwise_mul(&f, &zero, &OracleMul).unwrap().is_zero());
    }

    #[test]
    fn convolution_matches_polynomial_product() {
        // Degree < M per axis: the cyclic convolution equals the plain
        // bivariate product.
        let s = setup(17, 3, 2, 2, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut f = PolyMV::zeros(&s.ctx, 2, 8);
        let mut g = PolyMV::zeros(&s.ctx, 2, 8);
        let q = s.ctx.modulus();
        for i in 0..4 {
            for j in 0..4 {
                for poly in [&mut f, &mut g] {
                    let e = RingElem::from_coeffs(
                        &s.ctx,
                        vec![rng.gen_range(0..q), rng.gen_range(0..q)],
                    )
                    .unwrap();
                    poly.set(i * 8 + j, &e).unwrap();
                }
            }
        }
        let mut expect = vec![RingElem::zero(&s.ctx); 64];
        for (i1, j1, i2, j2) in (0..4).flat_map(|a| {
            (0..4).flat_map(move |b| (0..4).flat_map(move |c| (0..4).map(move |d| (a, b, c, d))))
        }) {
            let t = f
                .get(i1 * 8 + j1)
                .mul(&g.get(i2 * 8 + j2), &OracleMul)
                .unwrap();
            let u = (i1 + i2) * 8 + j1 + j2;
            expect[u] = expect[u].add(&t).unwrap();
        }
        let conv = convolve_oracle(&f, &g, &OracleMul).unwrap();
        for (u, e) in expect.iter().enumerate() {
            assert_eq!(&conv.get(u), e);
        }
    }

    #[test]
    fn operation_counts() {
        // side 64, inner 4: levels 64 -> 16 -> 4, two twiddle passes.
        let s = setup(193, 2, 2, 2, 64);
        assert_eq!(s.spec.twiddle_levels(), 2);
        let calls = AtomicUsize::new(0);
        let counting = |a: &crate::bignat::BigNat, b: &crate::bignat::BigNat| {
            calls.fetch_add(1, Ordering::Relaxed);
            crate::bignat::mul_oracle(a, b)
        };
        let stats = TransformStats::default();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f = random_poly(&s, &mut rng);
        let out = dft_counted(&f, &s.roots, &s.spec, &counting, &stats).unwrap();
        let order = s.spec.order();
        // Every general multiplication is a twiddle: the inner transforms
        // contribute none.
        assert_eq!(calls.load(Ordering::Relaxed), order * 2);
        assert_eq!(stats.twiddle_muls(), (order * 2) as u64);
        assert!(stats.shift_muls() > 0);
        assert_eq!(
            idft_counted(&out, &s.roots, &s.spec, &counting, &stats).unwrap(),
            f
        );
        assert_eq!(calls.load(Ordering::Relaxed), order * 4);
        pointwise_mul_counted(&f, &out, &counting, &stats).unwrap();
        assert_eq!(stats.pointwise_muls(), order as u64);
        assert_eq!(stats.general_muls(), (order * 5) as u64);
    }

    #[test]
    fn inner_roots() {
        for (p, c, m, k, side) in [
            (193u64, 2u32, 2usize, 1usize, 64usize),
            (193, 2, 8, 1, 64),
            (17, 2, 4, 1, 8),
        ] {
            let s = setup(p, c, m, k, side);
            assert!(s.spec.inner_roots_are_alpha_powers(&s.roots, &OracleMul));
        }
    }

    #[test]
    fn oracle_refuses_large_groups() {
        let s = setup(12289, 1, 2, 2, 128);
        let f = PolyMV::zeros(&s.ctx, 2, 128);
        assert!(matches!(
            dft_oracle(&f, &s.roots, &s.spec, &OracleMul),
            Err(FftError::TooLarge { .. })
        ));
        assert!(matches!(
            convolve_oracle(&f, &f, &OracleMul),
            Err(FftError::TooLarge { .. })
        ));
    }

    #[test]
    fn shape_errors() {
        let s = setup(17, 2, 2, 1, 8);
        let other = PolyMV::zeros(&s.ctx, 1, 4);
        assert!(dft(&other, &s.roots, &s.spec, &OracleMul).is_err());
        let f = PolyMV::zeros(&s.ctx, 1, 8);
        assert!(pointwise_mul(&f, &other, &OracleMul).is_err());
        let ctx2 = Arc::new(RingCtx::<u64>::new(17, 3, 2).unwrap());
        let g = PolyMV::zeros(&ctx2, 1, 8);
        assert_eq!(
            pointwise_mul(&f, &g, &OracleMul),
            Err(FftError::ContextMismatch)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn roundtrip_and_linearity(seed in any::<u64>()) {
            let s = setup(193, 2, 4, 1, 64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_poly(&s, &mut rng);
            let g = random_poly(&s, &mut rng);
            let ff = dft(&f, &s.roots, &s.spec, &OracleMul).unwrap();
            let fg = dft(&g, &s.roots, &s.spec, &OracleMul).unwrap();
            prop_assert_eq!(idft(&ff, &s.roots, &s.spec, &OracleMul).unwrap(), f.clone());
            prop_assert_eq!(dft(&f.add(&g).unwrap(), &s.roots, &s.spec, &OracleMul).unwrap(), ff.add(&fg).unwrap());
        }
    }
}
