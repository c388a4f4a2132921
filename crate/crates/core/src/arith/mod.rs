//! Exact integer arithmetic shared by every engine.

mod factor;
mod modular;
mod primality;
mod sieve;

pub use factor::{factorize, factorize_u64, FactorMap};
pub use modular::{
    common_primitive_root_prime, crt_combine, mod_pow, multiplicative_order, primitive_root,
};
pub use primality::{is_prime, is_prime_u64};
pub use sieve::{primes_up_to, small_primes, SEGMENT_LEN, SMALL_PRIME_BOUND};

pub(crate) use primality::pow_mod;
