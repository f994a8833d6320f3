//! Exact integer multiplication through a Fourier transform over
//! `R[(Z/2M)^k]`, `R = Z[α]/(p^c, α^m + 1)`.
//!
//! The transform's inner stages multiply only by powers of `α`, which are
//! coefficient rotations; general ring products appear only in the twiddle
//! and pointwise stages, and are themselves integer products that may
//! recurse into [`multiply`].
//!
//! ```
//! use modmul::{mul_auto, BigNat};
//!
//! let a = BigNat::from_hex("ff").unwrap();
//! assert_eq!(mul_auto(&a, &a).to_hex(), "fe01");
//! ```

pub mod bench;
pub mod bignat;
pub mod encode;
pub mod gfft;
pub mod multiply;
pub mod params;
pub mod primes;
pub mod ring;
pub mod roots;
pub mod scalar;
pub mod selftest;

pub use bignat::{mul_oracle, BigNat};
pub use encode::{decode, encode, EncodingLayout};
pub use gfft::{dft, dft_oracle, idft, pointwise_mul, GroupSpec};
pub use multiply::{mul_auto, multiply, plan, MulError, MulPlan, PlanOptions};
pub use params::{select_params, Params};
pub use primes::{find_prime, is_prime, SearchStrategy};
pub use ring::IntMul;
pub use scalar::Residue;

/// Ring element with `p^c < 2^63`.
pub type RingElem64 = ring::RingElem<u64>;
/// Ring element with `p^c < 2^127`.
pub type RingElem128 = ring::RingElem<u128>;
pub type RingCtx64 = ring::RingCtx<u64>;
pub type RingCtx128 = ring::RingCtx<u128>;
pub type RootTable64 = roots::RootTable<u64>;
pub type RootTable128 = roots::RootTable<u128>;
pub type PolyMV64 = gfft::PolyMV<u64>;
pub type PolyMV128 = gfft::PolyMV<u128>;
pub type FftPlan64 = multiply::FftPlan<u64>;
pub type FftPlan128 = multiply::FftPlan<u128>;
