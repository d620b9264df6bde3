//! Correlation sums of Zeckendorf-digit signs against multiplicative
//! functions, Fibonacci-block sums, and decay-exponent fits.

mod fit;
mod sieve;
mod sums;

pub use fit::{fit_decay_exponent, DecayFit, MIN_FIT_BLOCKS};
pub use sieve::{base_primes, moebius_sieve, MultiplicativeSieve, MultiplicativeSpec, PrimeSigns};
pub use sums::{
    parity_spot_check, sum_pq, sum_theorem1, sum_with_l_offset, CorrelationReport, SumOptions,
    Table,
};
