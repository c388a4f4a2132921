//! Prime-power instances, outside-prime witnesses, prime-set closure,
//! primitive prime divisors and bounded diophantine searches.

pub mod arith;
pub mod closure;
pub mod diophantine;
pub mod error;
pub mod instance;
mod serde_big;
pub mod subset;
pub mod witness;
pub mod zsigmondy;

pub use error::{Error, Result};
pub use instance::{PrimePowerInstance, Sign, SignAssignment, SubsetFamily};
pub use subset::Subset;
