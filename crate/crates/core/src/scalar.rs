//! Machine-word residues modulo `p^c`.
//!
//! Everything above this module is generic over [`Residue`], which is
//! implemented for `u64` (moduli below 2^63) and `u128` (moduli below
//! 2^127). The modulus is always kept at least one bit narrower than the
//! word so that the sum of two reduced residues never overflows.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{FromPrimitive, PrimInt, ToPrimitive, Unsigned};

/// An unsigned machine word used to store residues modulo some `n`.
pub trait Residue:
    PrimInt
    + Unsigned
    + FromPrimitive
    + ToPrimitive
    + Hash
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Width of the word in bits.
    const BITS: u32;
    /// Number of 64-bit limbs the word occupies.
    const LIMBS: usize;
    /// Moduli must be strictly below `2^MAX_MODULUS_BITS`.
    const MAX_MODULUS_BITS: u32;

    /// `a * b mod n` for reduced `a`, `b`.
    fn mul_mod(a: Self, b: Self, n: Self) -> Self;

    /// Reduces a little-endian limb sequence modulo `n`.
    fn rem_limbs(limbs: &[u64], n: Self) -> Self;

    /// Writes the value as `LIMBS` little-endian limbs.
    fn write_limbs(self, out: &mut [u64]);

    /// Inverse of [`Residue::write_limbs`]; reads at most `LIMBS` limbs.
    fn from_limbs(limbs: &[u64]) -> Self;

    fn from_u128_checked(x: u128) -> Option<Self>;

    fn as_u128(self) -> u128;
}

impl Residue for u64 {
    const BITS: u32 = 64;
    const LIMBS: usize = 1;
    const MAX_MODULUS_BITS: u32 = 63;

    #[inline]
    fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
        ((a as u128 * b as u128) % n as u128) as u64
    }

    fn rem_limbs(limbs: &[u64], n: u64) -> u64 {
        let n = n as u128;
        let mut r: u128 = 0;
        for &limb in limbs.iter().rev() {
            r = ((r << 64) | limb as u128) % n;
        }
        r as u64
    }

    #[inline]
    fn write_limbs(self, out: &mut [u64]) {
        out[0] = self;
    }

    #[inline]
    fn from_limbs(limbs: &[u64]) -> u64 {
        limbs.first().copied().unwrap_or(0)
    }

    fn from_u128_checked(x: u128) -> Option<u64> {
        u64::try_from(x).ok()
    }

    #[inline]
    fn as_u128(self) -> u128 {
        self as u128
    }
}

impl Residue for u128 {
    const BITS: u32 = 128;
    const LIMBS: usize = 2;
    const MAX_MODULUS_BITS: u32 = 127;

    fn mul_mod(a: u128, b: u128, n: u128) -> u128 {
        if n >> 64 == 0 {
            return u64::mul_mod(a as u64, b as u64, n as u64) as u128;
        }
        let prod = mul_wide(a, b);
        rem_wide(&prod, n)
    }

    fn rem_limbs(limbs: &[u64], n: u128) -> u128 {
        if n >> 64 == 0 {
            u64::rem_limbs(limbs, n as u64) as u128
        } else {
            rem_wide(limbs, n)
        }
    }

    #[inline]
    fn write_limbs(self, out: &mut [u64]) {
        out[0] = self as u64;
        out[1] = (self >> 64) as u64;
    }

    #[inline]
    fn from_limbs(limbs: &[u64]) -> u128 {
        let lo = limbs.first().copied().unwrap_or(0) as u128;
        let hi = limbs.get(1).copied().unwrap_or(0) as u128;
        lo | (hi << 64)
    }

    fn from_u128_checked(x: u128) -> Option<u128> {
        Some(x)
    }

    #[inline]
    fn as_u128(self) -> u128 {
        self
    }
}

/// Full 256-bit product of two `u128`, little-endian limbs.
fn mul_wide(a: u128, b: u128) -> [u64; 4] {
    let (a0, a1) = (a as u64 as u128, (a >> 64) as u64 as u128);
    let (b0, b1) = (b as u64 as u128, (b >> 64) as u64 as u128);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;

    let mid = (p00 >> 64) + (p01 as u64 as u128) + (p10 as u64 as u128);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    [p00 as u64, mid as u64, hi as u64, (hi >> 64) as u64]
}

/// Remainder of a limb sequence by a modulus of exactly two limbs
/// (`n >= 2^64`), by schoolbook long division with 64-bit digits.
fn rem_wide(limbs: &[u64], n: u128) -> u128 {
    debug_assert!(n >> 64 != 0);
    let shift = n.leading_zeros();
    let nn = n << shift;

    let mut r: u128 = 0;
    let len = limbs.len();
    if shift == 0 {
        for &digit in limbs.iter().rev() {
            r = rem_3by2(r, digit, nn);
        }
    } else {
        // Digits of (limbs << shift), most significant first.
        let top = limbs.last().map_or(0, |&l| l >> (64 - shift));
        r = rem_3by2(r, top, nn);
        for i in (0..len).rev() {
            let lower = if i > 0 {
                limbs[i - 1] >> (64 - shift)
            } else {
                0
            };
            r = rem_3by2(r, (limbs[i] << shift) | lower, nn);
        }
    }
    r >> shift
}

/// `(r * 2^64 + digit) mod nn` where `r < nn` and `nn` has its top bit set.
#[inline]
fn rem_3by2(r: u128, digit: u64, nn: u128) -> u128 {
    let d1 = (nn >> 64) as u64;
    let d0 = nn as u64;
    let u2 = (r >> 64) as u64;
    let u_lo = (r << 64) | digit as u128;

    let qhat: u64 = if u2 >= d1 {
        u64::MAX
    } else {
        (r / d1 as u128) as u64
    };

    // t = qhat * nn as (t_hi, t_lo)
    let p0 = qhat as u128 * d0 as u128;
    let p1 = qhat as u128 * d1 as u128;
    let (mut t_lo, carry) = p0.overflowing_add((p1 as u64 as u128) << 64);
    let mut t_hi = ((p1 >> 64) as u64).wrapping_add(carry as u64);

    // qhat overshoots by at most two.
    while (t_hi, t_lo) > (u2, u_lo) {
        let (lo, borrow) = t_lo.overflowing_sub(nn);
        t_lo = lo;
        t_hi = t_hi.wrapping_sub(borrow as u64);
    }
    u_lo.wrapping_sub(t_lo)
}

#[inline]
pub fn add_mod<T: Residue>(a: T, b: T, n: T) -> T {
    let s = a + b;
    if s >= n {
        s - n
    } else {
        s
    }
}

#[inline]
pub fn sub_mod<T: Residue>(a: T, b: T, n: T) -> T {
    if a >= b {
        a - b
    } else {
        a + (n - b)
    }
}

#[inline]
pub fn neg_mod<T: Residue>(a: T, n: T) -> T {
    if a.is_zero() {
        a
    } else {
        n - a
    }
}

/// `base^exp mod n` by square-and-multiply.
pub fn pow_mod<T: Residue>(base: T, mut exp: u128, n: T) -> T {
    let mut result = T::one() % n;
    let mut b = base % n;
    while exp > 0 {
        if exp & 1 == 1 {
            result = T::mul_mod(result, b, n);
        }
        b = T::mul_mod(b, b, n);
        exp >>= 1;
    }
    result
}

/// Inverse of `x` modulo `n` by the extended Euclidean algorithm, with the
/// Bezout coefficient tracked modulo `n` so it stays unsigned.
pub fn inv_mod<T: Residue>(x: T, n: T) -> Option<T> {
    let (mut r0, mut r1) = (n, x % n);
    let (mut t0, mut t1) = (T::zero(), T::one() % n);
    while !r1.is_zero() {
        let q = r0 / r1;
        let r2 = r0 - q * r1;
        let t2 = sub_mod(t0, T::mul_mod(q % n, t1, n), n);
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if r0 == T::one() {
        Some(t0)
    } else {
        None
    }
}
