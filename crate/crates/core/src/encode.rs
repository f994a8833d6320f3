//! Conversion between integers and elements of `R[E]`.
//!
//! The `N` bits of `a` are cut into `M^k` blocks of `block_bits` bits. Block
//! `i = i_1 + i_2·M + ... + i_k·M^(k-1)` goes to the entry at multi-index
//! `(i_1, ..., i_k)` and is split into `m/2` limbs of `u` bits, which become
//! the coefficients of `α^0 .. α^(m/2-1)`. Decoding substitutes `α = 2^u`
//! and `X_s = 2^(block_bits·M^(s-1))`.

use std::sync::Arc;

use thiserror::Error;

use crate::bignat::{add_shifted_into, mul_oracle, BigNat, LIMB_BITS};
use crate::gfft::{GroupSpec, PolyMV};
use crate::params::Params;
use crate::ring::RingCtx;
use crate::scalar::Residue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("operand has {bits} bits; the layout holds {capacity}")]
    Range { bits: usize, capacity: usize },
    #[error("ring (p = {prime}, c = {exponent}, m = {degree}) does not match the parameters")]
    RingMismatch {
        prime: u64,
        exponent: u32,
        degree: usize,
    },
    #[error("inconsistent layout: {0}")]
    Layout(&'static str),
}

/// Bit layout derived from a parameter bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingLayout {
    params: Params,
    block_bits: usize,
    alpha_block_bits: usize,
    blocks_per_coeff: usize,
}

impl EncodingLayout {
    pub fn new(params: &Params) -> Result<Self, EncodeError> {
        let half = params.alpha_degree / 2;
        if half == 0 || params.alpha_block_bits * half != params.block_bits {
            return Err(EncodeError::Layout("u·m/2 must equal the block width"));
        }
        if params.block_bits * params.monomials() != params.padded_bits {
            return Err(EncodeError::Layout(
                "M^k blocks must cover the padded width",
            ));
        }
        if params.alpha_block_bits > 128 {
            return Err(EncodeError::Layout("limbs wider than 128 bits"));
        }
        Ok(EncodingLayout {
            params: params.clone(),
            block_bits: params.block_bits,
            alpha_block_bits: params.alpha_block_bits,
            blocks_per_coeff: half,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn block_bits(&self) -> usize {
        self.block_bits
    }

    /// `u`.
    pub fn alpha_block_bits(&self) -> usize {
        self.alpha_block_bits
    }

    /// `m/2`, the number of filled `α`-slots per entry.
    pub fn blocks_per_coeff(&self) -> usize {
        self.blocks_per_coeff
    }

    /// Largest accepted operand width.
    pub fn capacity_bits(&self) -> usize {
        self.params.padded_bits
    }

    /// Bit offset of `X^(coords)·α^j` after substitution.
    pub fn bit_offset(&self, coords: &[usize], j: usize) -> usize {
        let degree_bound = self.params.degree_bound;
        let block = coords
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * degree_bound + c);
        block * self.block_bits + j * self.alpha_block_bits
    }

    fn check_ring<T: Residue>(&self, ctx: &RingCtx<T>) -> Result<(), EncodeError> {
        if ctx.prime() != self.params.prime
            || ctx.exponent() != self.params.exponent
            || ctx.degree() != self.params.alpha_degree
        {
            return Err(EncodeError::RingMismatch {
                prime: ctx.prime(),
                exponent: ctx.exponent(),
                degree: ctx.degree(),
            });
        }
        Ok(())
    }
}

/// Up to 128 bits of `limbs` starting at bit `offset`; absent bits read as zero.
fn read_bits(limbs: &[u64], offset: usize, count: usize) -> u128 {
    let word = offset / LIMB_BITS;
    let sh = offset % LIMB_BITS;
    let get = |i: usize| limbs.get(i).copied().unwrap_or(0) as u128;
    let mut raw = get(word) | (get(word + 1) << 64);
    if sh != 0 {
        raw = (raw >> sh) | (get(word + 2) << (128 - sh));
    }
    if count >= 128 {
        raw
    } else {
        raw & ((1u128 << count) - 1)
    }
}

/// Spreads `a` over `R[E]`. Entries with some index `>= M` stay zero, as do
/// the upper `m/2` coefficients of every entry.
pub fn encode<T: Residue>(
    a: &BigNat,
    layout: &EncodingLayout,
    ctx: &Arc<RingCtx<T>>,
) -> Result<PolyMV<T>, EncodeError> {
    layout.check_ring(ctx)?;
    if a.bit_len() > layout.capacity_bits() {
        return Err(EncodeError::Range {
            bits: a.bit_len(),
            capacity: layout.capacity_bits(),
        });
    }
    let params = &layout.params;
    let (k, side, m) = (params.num_vars, params.group_side(), params.alpha_degree);
    let u = layout.alpha_block_bits;
    let mut poly = PolyMV::zeros(ctx, k, side);
    let limbs = a.limbs();
    let used_blocks = a.bit_len().div_ceil(layout.block_bits);
    let mut coords = vec![0usize; k];
    for block in 0..used_blocks {
        // coords[s] is the base-M digit s of the block index.
        let mut rest = block;
        for c in coords.iter_mut() {
            *c = rest % params.degree_bound;
            rest /= params.degree_bound;
        }
        let entry = GroupSpec::linear_index(&coords, side);
        let slot = &mut poly.data_mut()[entry * m..entry * m + layout.blocks_per_coeff];
        let base = block * layout.block_bits;
        for (j, c) in slot.iter_mut().enumerate() {
            let bits = read_bits(limbs, base + j * u, u);
            *c = T::from_u128_checked(bits).expect("u-bit limb fits the residue word");
        }
    }
    Ok(poly)
}

/// Evaluates a product polynomial at `α = 2^u`, `X_s = 2^(block_bits·M^(s-1))`,
/// reading each residue as its representative in `[0, p^c)`.
pub fn decode<T: Residue>(h: &PolyMV<T>, layout: &EncodingLayout) -> BigNat {
    let params = &layout.params;
    let (k, side, m) = (params.num_vars, params.group_side(), params.alpha_degree);
    let top = layout.bit_offset(&vec![side - 1; k], m) + T::BITS as usize;
    let mut acc = vec![0u64; top / LIMB_BITS + 2];
    let mut value = vec![0u64; T::LIMBS];
    for entry in 0..h.len() {
        let coeffs = h.entry(entry);
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let coords = GroupSpec::coords(entry, side, k);
        let base = layout.bit_offset(&coords, 0);
        for (j, &c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            c.write_limbs(&mut value);
            add_shifted_into(&mut acc, &value, base + j * layout.alpha_block_bits);
        }
    }
    BigNat::from_limbs(acc)
}

/// Exact coefficients of the product of `encode(a)` and `encode(b)` over
/// `Z[X_1..X_k, α]` (no reduction of any kind), and the checks that the
/// modular transform cannot have wrapped around.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverflowCertificate {
    /// Largest exponent of each `X_s` with a non-zero coefficient.
    pub axis_degrees: Vec<usize>,
    /// Largest exponent of `α` with a non-zero coefficient.
    pub alpha_degree: usize,
    pub max_coefficient: BigNat,
    /// `M^k·m·2^(2u)`.
    pub bound: BigNat,
    pub modulus: u128,
    /// Every exact coefficient, indexed like a [`PolyMV`] of side `2M`
    /// with `2m` `α`-slots per entry.
    pub coefficients: Vec<BigNat>,
}

impl OverflowCertificate {
    /// Per-axis degree `< 2M`, `α`-degree `< m`, coefficients `< bound < p^c`.
    pub fn holds(&self, params: &Params) -> bool {
        let side = params.group_side();
        self.axis_degrees.iter().all(|&d| d < side)
            && self.alpha_degree < params.alpha_degree
            && self.max_coefficient < self.bound
            && self.bound < BigNat::from_u128(self.modulus)
    }

    /// Exact coefficient of `X^(entry)·α^j`.
    pub fn coefficient(&self, entry: usize, j: usize, params: &Params) -> &BigNat {
        &self.coefficients[entry * 2 * params.alpha_degree + j]
    }
}

/// Computes the exact product polynomial by Kronecker substitution at a
/// stride wide enough that no two coefficients interact, using
/// [`mul_oracle`] for the single large product.
pub fn overflow_certificate(
    a: &BigNat,
    b: &BigNat,
    layout: &EncodingLayout,
) -> Result<OverflowCertificate, EncodeError> {
    let params = &layout.params;
    let (k, m, degree_bound) = (params.num_vars, params.alpha_degree, params.degree_bound);
    let side = params.group_side();
    let u = layout.alpha_block_bits;
    for x in [a, b] {
        if x.bit_len() > layout.capacity_bits() {
            return Err(EncodeError::Range {
                bits: x.bit_len(),
                capacity: layout.capacity_bits(),
            });
        }
    }
    // Exact coefficients are below (M^k·m/2)·2^(2u); leave headroom.
    let terms_bits = (params.monomials() * m)
        .next_power_of_two()
        .trailing_zeros() as usize;
    let stride = 2 * u + terms_bits + 2;
    // Positions: α-slot j in [0, 2m), axis s in [0, 2M); α fastest.
    let pos = |coords: &[usize], j: usize| {
        coords.iter().rev().fold(0usize, |acc, &c| acc * side + c) * 2 * m + j
    };
    let pack = |x: &BigNat| {
        let mut limbs = vec![0u64; (pos(&vec![side - 1; k], 2 * m) * stride) / LIMB_BITS + 2];
        let mut coords = vec![0usize; k];
        for block in 0..x.bit_len().div_ceil(layout.block_bits) {
            let mut rest = block;
            for c in coords.iter_mut() {
                *c = rest % degree_bound;
                rest /= degree_bound;
            }
            for j in 0..m / 2 {
                let v = read_bits(x.limbs(), block * layout.block_bits + j * u, u);
                add_shifted_into(
                    &mut limbs,
                    &[v as u64, (v >> 64) as u64],
                    pos(&coords, j) * stride,
                );
            }
        }
        BigNat::from_limbs(limbs)
    };
    let product = mul_oracle(&pack(a), &pack(b));

    let total = side.pow(k as u32);
    let mut coefficients = Vec::with_capacity(total * 2 * m);
    let mut axis_degrees = vec![0usize; k];
    let mut alpha_degree = 0;
    let mut max_coefficient = BigNat::zero();
    for entry in 0..total {
        // Entry index is row-major in (Z/2M)^k with the first axis outermost.
        let coords = GroupSpec::coords(entry, side, k);
        for j in 0..2 * m {
            let c = product.extract_bits(pos(&coords, j) * stride, stride);
            if !c.is_zero() {
                for (d, &x) in axis_degrees.iter_mut().zip(&coords) {
                    *d = (*d).max(x);
                }
                alpha_degree = alpha_degree.max(j);
                if c > max_coefficient {
                    max_coefficient = c.clone();
                }
            }
            coefficients.push(c);
        }
    }
    Ok(OverflowCertificate {
        axis_degrees,
        alpha_degree,
        max_coefficient,
        bound: params.coefficient_bound(),
        modulus: params.modulus().unwrap_or(u128::MAX),
        coefficients,
    })
}
