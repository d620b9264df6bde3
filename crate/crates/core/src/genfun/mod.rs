//! Digit-block sets and their generating functions.
//!
//! For a radius `r`, `B'` is the set of `n ≥ 1` whose Zeckendorf digits have
//! no gap of `2r + 1` or more zeros, and `B ⊂ B'` keeps those whose lowest
//! digit sits exactly at position `r`. Series are indexed by
//! `ℓ(n) = k ⟺ F_{k-1} ≤ n < F_k` and carry `z^{f(n)}` weights.

mod growth;
mod series;
mod sets;
mod zerofree;

pub use growth::{check_count_growth, phi_r_root, CountGrowth, CountRow, PhiR};
pub use series::{
    series_b, series_bl, series_blprime, series_bprime, series_hl_direct, verify_hl_identity,
    IdentityCheck, SeriesBundle, SeriesKind, TruncatedSeries, MAX_SERIES_ORDER,
};
pub use sets::{enumerate_b, enumerate_bprime, in_b, in_bprime, n_l, LSet};
pub use zerofree::{probe_zero_free, ZeroFreeProbe};
