//! Zeckendorf numeration and the Möbius orthogonality of `(-1)^{s_φ(n)}`.
//!
//! The crate is organised bottom-up:
//!
//! - [`fib`] and [`zeck`]: Fibonacci numbers, Zeckendorf digits, `s_φ`, the
//!   digit shift `S`, `r`-separation and indecomposable decompositions.
//! - [`golden`]: exact `Z[φ]` arithmetic and low-digit detection from `nφ`.
//! - [`morphic`]: substitution fixed points, the four-letter system coding
//!   `s_φ(n) mod 2`, and the Fibonacci word.
//! - [`quasi`]: `f(n) = s_φ(pn) + s_φ(qn)` and its quasi-additivity checks.
//! - [`genfun`]: the digit-block sets `B`, `B'`, truncated generating
//!   functions, the `H_L` identity, `φ_r`, and the zero-free probe.
//! - [`correlation`]: sieves and correlation sums against `μ`, `λ` and
//!   `(-1)^{f(n)}`, with decay-exponent fits.
//! - [`cli`]: the `zeckmob` command-line surface.

pub mod cli;
pub mod correlation;
pub mod error;
pub mod fib;
pub mod genfun;
pub mod golden;
pub mod morphic;
pub mod quasi;
pub mod zeck;

pub use error::{Error, Result};
pub use fib::{fib, FibTable};
pub use golden::{GoldenInterval, GoldenNum};
pub use zeck::{s_phi, zeck_decode, zeck_encode, ZeckRep};
