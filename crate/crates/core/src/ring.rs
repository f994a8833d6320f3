//! Arithmetic in `R = Z[α]/(p^c, α^m + 1)`.
//!
//! Elements are length-`m` coefficient vectors of residues mod `p^c`.
//! Multiplication by a power of α is a negacyclic rotation. General
//! multiplication packs both operands into integers (α ↦ 2^d), multiplies
//! them with a caller-supplied integer multiplier, and folds the `2m` slots
//! of the product back using α^m = -1.
//!
//! The hot paths operate on raw coefficient slices through [`RingCtx`];
//! [`RingElem`] is the checked, owned wrapper around them.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::bignat::{mul_oracle, BigNat, LIMB_BITS};
use crate::scalar::{self, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("operands belong to different rings")]
    ContextMismatch,
    #[error("{0} is not a unit modulo p^c")]
    NonUnit(u128),
    #[error("expected {expected} coefficients, got {got}")]
    Length { expected: usize, got: usize },
    #[error("coefficient {0} is not reduced modulo p^c")]
    OutOfRange(u128),
    #[error("alpha degree {0} is not a power of two >= 1")]
    BadDegree(usize),
    #[error("p^c = {prime}^{exponent} does not fit the residue word")]
    ModulusTooWide { prime: u64, exponent: u32 },
}

/// Exact integer multiplication used for ring products.
pub trait IntMul: Sync {
    fn mul(&self, a: &BigNat, b: &BigNat) -> BigNat;
}

impl<F> IntMul for F
where
    F: Fn(&BigNat, &BigNat) -> BigNat + Sync,
{
    fn mul(&self, a: &BigNat, b: &BigNat) -> BigNat {
        self(a, b)
    }
}

/// [`IntMul`] backed by [`mul_oracle`].
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleMul;

impl IntMul for OracleMul {
    fn mul(&self, a: &BigNat, b: &BigNat) -> BigNat {
        mul_oracle(a, b)
    }
}

/// Shared description of one ring: `p`, `c`, `m` and derived constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingCtx<T: Residue> {
    prime: u64,
    exponent: u32,
    degree: usize,
    modulus: T,
    /// Packing stride `d` in bits.
    pack_bits: usize,
}

/// Upper bound on the limbs of one product slot (`d ≤ 2·127 + 64`).
const SLOT_LIMBS: usize = 6;

/// One `d`-bit slot of a packed product, little-endian.
#[derive(Debug, Clone, Copy)]
pub struct Slot {
    limbs: [u64; SLOT_LIMBS],
    len: usize,
}

impl std::ops::Deref for Slot {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.limbs[..self.len]
    }
}

impl<T: Residue> RingCtx<T> {
    pub fn new(prime: u64, exponent: u32, degree: usize) -> Result<Self, RingError> {
        if degree == 0 || !degree.is_power_of_two() {
            return Err(RingError::BadDegree(degree));
        }
        let too_wide = RingError::ModulusTooWide { prime, exponent };
        let pc = (prime as u128)
            .checked_pow(exponent)
            .ok_or(too_wide.clone())?;
        if exponent == 0 || prime < 2 || 128 - pc.leading_zeros() > T::MAX_MODULUS_BITS {
            return Err(too_wide);
        }
        let modulus = T::from_u128_checked(pc).ok_or(too_wide)?;

        // Smallest d with 2^d > m·p^(2c).
        let pc_big = BigNat::from_u128(pc);
        let bound = mul_oracle(
            &mul_oracle(&pc_big, &pc_big),
            &BigNat::from_u64(degree as u64),
        );
        let pack_bits = bound.bit_len();

        Ok(RingCtx {
            prime,
            exponent,
            degree,
            modulus,
            pack_bits,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// `m`, the number of coefficients per element.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `p^c`.
    pub fn modulus(&self) -> T {
        self.modulus
    }

    /// Packing stride `d` in bits.
    pub fn pack_bits(&self) -> usize {
        self.pack_bits
    }

    /// Bit length of a packed operand, `m·d`.
    pub fn packed_operand_bits(&self) -> usize {
        self.degree * self.pack_bits()
    }

    /// Inverse of a residue modulo `p^c`.
    pub fn inv_mod_pc(&self, x: T) -> Result<T, RingError> {
        scalar::inv_mod(x % self.modulus, self.modulus).ok_or(RingError::NonUnit(x.as_u128()))
    }

    #[inline]
    pub fn add(&self, a: T, b: T) -> T {
        scalar::add_mod(a, b, self.modulus)
    }

    #[inline]
    pub fn sub(&self, a: T, b: T) -> T {
        scalar::sub_mod(a, b, self.modulus)
    }

    #[inline]
    pub fn neg(&self, a: T) -> T {
        scalar::neg_mod(a, self.modulus)
    }

    #[inline]
    pub fn mul(&self, a: T, b: T) -> T {
        T::mul_mod(a, b, self.modulus)
    }

    pub fn pow(&self, a: T, e: u128) -> T {
        scalar::pow_mod(a, e, self.modulus)
    }

    pub fn add_assign(&self, acc: &mut [T], x: &[T]) {
        for (a, &b) in acc.iter_mut().zip(x) {
            *a = self.add(*a, b);
        }
    }

    pub fn sub_assign(&self, acc: &mut [T], x: &[T]) {
        for (a, &b) in acc.iter_mut().zip(x) {
            *a = self.sub(*a, b);
        }
    }

    pub fn neg_assign(&self, acc: &mut [T]) {
        for a in acc.iter_mut() {
            *a = self.neg(*a);
        }
    }

    pub fn scale_assign(&self, acc: &mut [T], s: T) {
        for a in acc.iter_mut() {
            *a = self.mul(*a, s);
        }
    }

    /// `out = x·α^j`. Rotation with sign flips; no multiplications.
    pub fn mul_alpha_pow_into(&self, x: &[T], j: usize, out: &mut [T]) {
        let m = self.degree;
        let j = j % (2 * m);
        let (shift, negate) = if j < m { (j, false) } else { (j - m, true) };
        // Coefficients that wrap past α^m pick up a factor of -1.
        for i in 0..m - shift {
            out[i + shift] = if negate { self.neg(x[i]) } else { x[i] };
        }
        for i in m - shift..m {
            out[i + shift - m] = if negate { x[i] } else { self.neg(x[i]) };
        }
    }

    /// Packs coefficients at stride `d`: the integer `x(2^d)`.
    pub fn pack(&self, x: &[T]) -> BigNat {
        let d = self.pack_bits;
        let mut limbs = vec![0u64; (self.degree * d).div_ceil(LIMB_BITS) + T::LIMBS + 1];
        for (i, &c) in x.iter().enumerate() {
            let mut buf = [0u64; 2];
            c.write_limbs(&mut buf);
            let (word, sh) = (i * d / LIMB_BITS, i * d % LIMB_BITS);
            for (j, &v) in buf[..T::LIMBS].iter().enumerate() {
                limbs[word + j] |= v << sh;
                if sh > 0 {
                    limbs[word + j + 1] |= v >> (LIMB_BITS - sh);
                }
            }
        }
        BigNat::from_limbs(limbs)
    }

    /// Splits a packed product into its `2m` slots of `d` bits each.
    pub fn product_slots<'a>(&self, product: &'a BigNat) -> impl Iterator<Item = Slot> + 'a {
        let d = self.pack_bits;
        let limbs = product.limbs();
        let word = move |w: usize| limbs.get(w).copied().unwrap_or(0);
        (0..2 * self.degree).map(move |s| {
            let mut slot = Slot {
                limbs: [0; SLOT_LIMBS],
                len: d.div_ceil(LIMB_BITS),
            };
            let (start, sh) = (s * d / LIMB_BITS, s * d % LIMB_BITS);
            for (j, out) in slot.limbs[..slot.len].iter_mut().enumerate() {
                *out = word(start + j) >> sh;
                if sh > 0 {
                    *out |= word(start + j + 1) << (LIMB_BITS - sh);
                }
            }
            let top = d % LIMB_BITS;
            if top > 0 {
                slot.limbs[slot.len - 1] &= (1u64 << top) - 1;
            }
            slot
        })
    }

    /// `out = x·y` via one integer multiplication of the packed operands.
    pub fn mul_into(&self, x: &[T], y: &[T], out: &mut [T], int_mul: &dyn IntMul) {
        let m = self.degree;
        let product = int_mul.mul(&self.pack(x), &self.pack(y));
        let mut reduced = vec![T::zero(); 2 * m];
        for (s, slot) in self.product_slots(&product).enumerate() {
            reduced[s] = T::rem_limbs(&slot, self.modulus);
        }
        for i in 0..m {
            out[i] = self.sub(reduced[i], reduced[i + m]);
        }
    }
}

/// An element of `R`, tied to its ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElem<T: Residue> {
    ctx: Arc<RingCtx<T>>,
    coeffs: Vec<T>,
}

impl<T: Residue> fmt::Debug for RingElem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElem{:?}", self.coeffs)
    }
}

impl<T: Residue> RingElem<T> {
    pub fn zero(ctx: &Arc<RingCtx<T>>) -> Self {
        RingElem {
            ctx: Arc::clone(ctx),
            coeffs: vec![T::zero(); ctx.degree],
        }
    }

    pub fn one(ctx: &Arc<RingCtx<T>>) -> Self {
        let mut e = Self::zero(ctx);
        e.coeffs[0] = T::one();
        e
    }

    /// The generator α (for `m = 1`, α = -1).
    pub fn alpha(ctx: &Arc<RingCtx<T>>) -> Self {
        Self::one(ctx).mul_alpha_pow(1)
    }

    /// The constant element `c`, reduced mod `p^c`.
    pub fn scalar(ctx: &Arc<RingCtx<T>>, c: T) -> Self {
        let mut e = Self::zero(ctx);
        e.coeffs[0] = c % ctx.modulus;
        e
    }

    pub fn from_coeffs(ctx: &Arc<RingCtx<T>>, coeffs: Vec<T>) -> Result<Self, RingError> {
        if coeffs.len() != ctx.degree {
            return Err(RingError::Length {
                expected: ctx.degree,
                got: coeffs.len(),
            });
        }
        if let Some(bad) = coeffs.iter().find(|&&c| c >= ctx.modulus) {
            return Err(RingError::OutOfRange(bad.as_u128()));
        }
        Ok(RingElem {
            ctx: Arc::clone(ctx),
            coeffs,
        })
    }

    pub(crate) fn from_slice_unchecked(ctx: &Arc<RingCtx<T>>, coeffs: &[T]) -> Self {
        debug_assert_eq!(coeffs.len(), ctx.degree);
        RingElem {
            ctx: Arc::clone(ctx),
            coeffs: coeffs.to_vec(),
        }
    }

    pub fn ctx(&self) -> &Arc<RingCtx<T>> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn same_ring(&self, other: &Self) -> Result<(), RingError> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(RingError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        self.same_ring(other)?;
        let mut out = self.clone();
        self.ctx.add_assign(&mut out.coeffs, &other.coeffs);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RingError> {
        self.same_ring(other)?;
        let mut out = self.clone();
        self.ctx.sub_assign(&mut out.coeffs, &other.coeffs);
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        self.ctx.neg_assign(&mut out.coeffs);
        out
    }

    /// Multiplies every coefficient by a scalar residue.
    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        self.ctx.scale_assign(&mut out.coeffs, s % self.ctx.modulus);
        out
    }

    /// `self·α^j` for any `j` (taken mod `2m`).
    pub fn mul_alpha_pow(&self, j: usize) -> Self {
        let mut out = Self::zero(&self.ctx);
        self.ctx
            .mul_alpha_pow_into(&self.coeffs, j, &mut out.coeffs);
        out
    }

    pub fn mul(&self, other: &Self, int_mul: &dyn IntMul) -> Result<Self, RingError> {
        self.same_ring(other)?;
        let mut out = Self::zero(&self.ctx);
        self.ctx
            .mul_into(&self.coeffs, &other.coeffs, &mut out.coeffs, int_mul);
        Ok(out)
    }

    /// `self^e` by square-and-multiply.
    pub fn pow(&self, mut e: u64, int_mul: &dyn IntMul) -> Self {
        let mut result = Self::one(&self.ctx);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, int_mul).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, int_mul).expect("same ring");
            }
        }
        result
    }
}
