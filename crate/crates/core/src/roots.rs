//! The principal `2M`-th root of unity `ρ(α)` with `ρ^(M/m) = α`.
//!
//! Construction: a generator of `F_p^*` is lifted one exponent at a time to
//! a primitive `(p-1)`-th root `ζ` mod `p^c`; `ω = ζ^((p-1)/2M)` has order
//! `2M` and `σ = ω^(M/m)` has order `2m`. `ρ` is the polynomial of degree
//! `< m` interpolating `ρ(σ^(2i-1)) = ω^(2i-1)` for `i = 1..m`; because
//! `α^m + 1 = Π (α - σ^(2i-1))`, CRT gives `ρ^(M/m) = α` in `R`.

use std::borrow::Cow;
use std::sync::Arc;

use thiserror::Error;

use crate::params::Params;
use crate::primes::distinct_prime_factors;
use crate::ring::{IntMul, RingCtx, RingElem, RingError};
use crate::scalar::{self, Residue};

/// Largest group side `2M` for which every power of `ρ` is precomputed.
pub const TABLE_LIMIT: usize = 1 << 16;

/// Largest order for which principality is checked by summing every
/// `Σ_i r^(ij)` directly; above it the equivalent test `r^(n/2) = -1` is used.
pub const DIRECT_SCHUR_LIMIT: usize = 1 << 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("f'(zeta) is divisible by p = {0}; cannot lift")]
    Lift(u64),
    #[error("interpolation node difference {0} is not a unit")]
    NonUnitDifference(u128),
    #[error(
        "group side {side} must be a power of two >= 2m = {inner} dividing p - 1 = {p_minus_1}"
    )]
    BadSide {
        side: usize,
        inner: usize,
        p_minus_1: u64,
    },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Least `g >= 2` generating `F_p^*`.
pub fn find_generator(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let order = p - 1;
    let factors = distinct_prime_factors(order);
    (2..p)
        .find(|&g| {
            factors
                .iter()
                .all(|&r| scalar::pow_mod(g, (order / r) as u128, p) != 1)
        })
        .expect("F_p^* is cyclic")
}

/// One Newton step for `f(X) = X^(p-1) - 1`: lifts a root mod `p^s` to the
/// unique root mod `p^(s+1)` congruent to it.
pub fn hensel_lift<T: Residue>(zeta: T, p: u64, s: u32) -> Result<T, RootError> {
    let n = T::from_u128_checked((p as u128).pow(s + 1)).expect("p^(s+1) fits the word");
    let pm1 = T::from_u64(p - 1).unwrap() % n;
    let z = zeta % n;
    let f = scalar::sub_mod(scalar::pow_mod(z, (p - 1) as u128, n), T::one() % n, n);
    let df = T::mul_mod(pm1, scalar::pow_mod(z, (p - 2) as u128, n), n);
    let inv = scalar::inv_mod(df, n).ok_or(RootError::Lift(p))?;
    Ok(scalar::sub_mod(z, T::mul_mod(f, inv, n), n))
}

/// Lifts `g` (a generator mod `p`) to a primitive `(p-1)`-th root of unity
/// mod `p^c` using `c - 1` single-exponent Hensel steps.
pub fn lift_generator<T: Residue>(g: u64, p: u64, c: u32) -> Result<T, RootError> {
    let mut zeta = T::from_u64(g % p).unwrap();
    for s in 1..c {
        zeta = hensel_lift(zeta, p, s)?;
    }
    Ok(zeta)
}

/// `ω = ζ^((p-1)/side)`, an element of order exactly `side`.
pub fn compute_omega<T: Residue>(zeta: T, side: usize, ctx: &RingCtx<T>) -> T {
    ctx.pow(zeta, ((ctx.prime() - 1) / side as u64) as u128)
}

/// Coefficients (low to high, length `m + 1`) of `Π_{i=1..m} (x - σ^(2i-1))`.
pub fn odd_power_product<T: Residue>(sigma: T, ctx: &RingCtx<T>) -> Vec<T> {
    let m = ctx.degree();
    let mut poly = vec![T::one()];
    for node in odd_powers(sigma, ctx) {
        // poly *= (x - node)
        let mut next = vec![T::zero(); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i + 1] = ctx.add(next[i + 1], c);
            next[i] = ctx.sub(next[i], ctx.mul(c, node));
        }
        poly = next;
    }
    debug_assert_eq!(poly.len(), m + 1);
    poly
}

/// `σ^1, σ^3, ..., σ^(2m-1)`.
fn odd_powers<T: Residue>(sigma: T, ctx: &RingCtx<T>) -> Vec<T> {
    let sq = ctx.mul(sigma, sigma);
    let mut cur = sigma;
    (0..ctx.degree())
        .map(|_| {
            let out = cur;
            cur = ctx.mul(cur, sq);
            out
        })
        .collect()
}

/// Lagrange interpolation of `ρ(σ^(2i-1)) = ω^(2i-1)`, `i = 1..m`.
pub fn compute_rho<T: Residue>(
    omega: T,
    side: usize,
    ctx: &Arc<RingCtx<T>>,
) -> Result<RingElem<T>, RootError> {
    let m = ctx.degree();
    let ratio = (side / 2) / m;
    let sigma = ctx.pow(omega, ratio as u128);
    let nodes = odd_powers(sigma, ctx);
    let values = odd_powers(omega, ctx);
    let full = odd_power_product(sigma, ctx);

    let mut rho = vec![T::zero(); m];
    let mut quotient = vec![T::zero(); m];
    for (i, (&node, &value)) in nodes.iter().zip(&values).enumerate() {
        // Π_{j≠i}(x - x_j) by synthetic division of the full product.
        quotient[m - 1] = full[m];
        for d in (1..m).rev() {
            quotient[d - 1] = ctx.add(full[d], ctx.mul(node, quotient[d]));
        }
        let mut denom = T::one();
        for (j, &other) in nodes.iter().enumerate() {
            if j != i {
                let diff = ctx.sub(node, other);
                if diff % T::from_u64(ctx.prime()).unwrap() == T::zero() {
                    return Err(RootError::NonUnitDifference(diff.as_u128()));
                }
                denom = ctx.mul(denom, diff);
            }
        }
        let weight = ctx.mul(value, ctx.inv_mod_pc(denom)?);
        for (r, &q) in rho.iter_mut().zip(&quotient) {
            *r = ctx.add(*r, ctx.mul(weight, q));
        }
    }
    Ok(RingElem::from_coeffs(ctx, rho)?)
}

/// `ρ(α)` and its powers, plus the scalars used to build it.
#[derive(Debug, Clone)]
pub struct RootTable<T: Residue> {
    ctx: Arc<RingCtx<T>>,
    side: usize,
    num_vars: usize,
    generator: u64,
    zeta: T,
    omega: T,
    sigma: T,
    rho: RingElem<T>,
    /// `ρ^t` for `t in 0..side`, flattened; `None` above [`TABLE_LIMIT`].
    pows: Option<Vec<T>>,
    group_order_inv: T,
}

impl<T: Residue> RootTable<T> {
    /// Builds the table for the group `(Z/side)^num_vars`.
    pub fn build(
        ctx: &Arc<RingCtx<T>>,
        side: usize,
        num_vars: usize,
        int_mul: &dyn IntMul,
    ) -> Result<Self, RootError> {
        let p = ctx.prime();
        let inner = 2 * ctx.degree();
        if !side.is_power_of_two() || side < inner || (p - 1) % side as u64 != 0 {
            return Err(RootError::BadSide {
                side,
                inner,
                p_minus_1: p - 1,
            });
        }
        let generator = find_generator(p);
        let zeta = lift_generator::<T>(generator, p, ctx.exponent())?;
        let omega = compute_omega(zeta, side, ctx);
        let sigma = ctx.pow(omega, (side / inner) as u128);
        let rho = compute_rho(omega, side, ctx)?;

        let pows = (side <= TABLE_LIMIT).then(|| {
            let m = ctx.degree();
            let mut pows = vec![T::zero(); side * m];
            pows[0] = T::one();
            for t in 1..side {
                let (done, rest) = pows.split_at_mut(t * m);
                ctx.mul_into(&done[(t - 1) * m..], rho.coeffs(), &mut rest[..m], int_mul);
            }
            pows
        });

        let order = ctx.pow(
            T::from_usize(side).unwrap() % ctx.modulus(),
            num_vars as u128,
        );
        let group_order_inv = ctx.inv_mod_pc(order)?;

        Ok(RootTable {
            ctx: Arc::clone(ctx),
            side,
            num_vars,
            generator,
            zeta,
            omega,
            sigma,
            rho,
            pows,
            group_order_inv,
        })
    }

    pub fn ctx(&self) -> &Arc<RingCtx<T>> {
        &self.ctx
    }

    /// `2M`, the order of `ρ`.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn rho(&self) -> &RingElem<T> {
        &self.rho
    }

    /// Inverse of `(2M)^k` mod `p^c`.
    pub fn group_order_inv(&self) -> T {
        self.group_order_inv
    }

    pub fn is_tabulated(&self) -> bool {
        self.pows.is_some()
    }

    /// Coefficients of `ρ^t` (`t` taken mod `2M`).
    pub fn rho_pow_coeffs(&self, t: usize, int_mul: &dyn IntMul) -> Cow<'_, [T]> {
        let t = t % self.side;
        let m = self.ctx.degree();
        match &self.pows {
            Some(p) => Cow::Borrowed(&p[t * m..(t + 1) * m]),
            None => Cow::Owned(self.rho.pow(t as u64, int_mul).coeffs().to_vec()),
        }
    }

    pub fn rho_pow(&self, t: usize, int_mul: &dyn IntMul) -> RingElem<T> {
        RingElem::from_slice_unchecked(&self.ctx, &self.rho_pow_coeffs(t, int_mul))
    }

    /// `ρ^(-t) = (ρ^(2M-1))^t`.
    pub fn rho_inv_pow(&self, t: usize, int_mul: &dyn IntMul) -> RingElem<T> {
        self.rho_pow(self.side - t % self.side, int_mul)
    }

    /// Whether `ρ^(M/m) = α` and `ρ^M = -1` (so `ρ` has order exactly `2M`).
    pub fn defining_identities_hold(&self, int_mul: &dyn IntMul) -> bool {
        let ratio = self.side / (2 * self.ctx.degree());
        let alpha = RingElem::alpha(&self.ctx);
        let one = RingElem::one(&self.ctx);
        self.rho.pow(ratio as u64, int_mul) == alpha
            && self.rho.pow(self.side as u64 / 2, int_mul) == one.neg()
            && self.rho.pow(self.side as u64, int_mul) == one
    }

    /// Overwrites one tabulated power with `ρ^t·α`; used to check that the
    /// self-test suites notice a corrupted twiddle.
    #[doc(hidden)]
    pub fn corrupt_power(&mut self, t: usize) {
        let m = self.ctx.degree();
        if let Some(p) = &mut self.pows {
            let t = t % self.side;
            let mut shifted = vec![T::zero(); m];
            self.ctx
                .mul_alpha_pow_into(&p[t * m..(t + 1) * m], 1, &mut shifted);
            p[t * m..(t + 1) * m].copy_from_slice(&shifted);
        }
    }

    /// Every tabulated power equals `ρ^t` computed by square-and-multiply,
    /// checked at the given exponents.
    pub fn ladder_consistent(&self, exponents: &[usize], int_mul: &dyn IntMul) -> bool {
        exponents.iter().all(|&t| {
            self.rho_pow(t, int_mul).coeffs()
                == self.rho.pow((t % self.side) as u64, int_mul).coeffs()
        })
    }
}

/// Builds the table for a parameter bundle.
pub fn build_root_table<T: Residue>(
    params: &Params,
    ctx: &Arc<RingCtx<T>>,
    int_mul: &dyn IntMul,
) -> Result<RootTable<T>, RootError> {
    RootTable::build(ctx, params.group_side(), params.num_vars, int_mul)
}

/// Whether `root` is a principal `n`-th root of unity in `R` (`n` a power
/// of two). Small `n`: every Schur sum `Σ_{i<n} root^(ij)`, `0 < j < n`, is
/// computed and compared with zero. Large `n`: `root^(n/2) = -1`, which for
/// `n = 2^e` is equivalent because `Σ_{i<n} x^i = Π_{t<e} (1 + x^(2^t))`.
pub fn is_principal_in_ring<T: Residue>(
    root: &RingElem<T>,
    n: usize,
    int_mul: &dyn IntMul,
) -> bool {
    let ctx = root.ctx();
    let one = RingElem::one(ctx);
    if root.pow(n as u64, int_mul) != one {
        return false;
    }
    if n > DIRECT_SCHUR_LIMIT {
        return root.pow(n as u64 / 2, int_mul) == one.neg();
    }
    let mut pows = Vec::with_capacity(n);
    let mut cur = one;
    for _ in 0..n {
        pows.push(cur.clone());
        cur = cur.mul(root, int_mul).expect("same ring");
    }
    (1..n).all(|j| {
        let mut sum = RingElem::zero(ctx);
        for i in 0..n {
            sum = sum.add(&pows[(i * j) % n]).expect("same ring");
        }
        sum.is_zero()
    })
}

/// Scalar analogue of [`is_principal_in_ring`] over `Z/p^cZ`.
pub fn is_principal_scalar<T: Residue>(root: T, n: usize, ctx: &RingCtx<T>) -> bool {
    if ctx.pow(root, n as u128) != T::one() {
        return false;
    }
    if n > DIRECT_SCHUR_LIMIT {
        return ctx.pow(root, n as u128 / 2) == ctx.neg(T::one());
    }
    let pows: Vec<T> = (0..n).map(|i| ctx.pow(root, i as u128)).collect();
    (1..n).all(|j| {
        (0..n)
            .fold(T::zero(), |acc, i| ctx.add(acc, pows[(i * j) % n]))
            .is_zero()
    })
}
