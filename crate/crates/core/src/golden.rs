//! Exact arithmetic in `Z[φ]`, `φ = (1 + √5)/2`.
//!
//! Elements are `a + bφ` with `|a|, |b| ≤ 2^61`. Within that range every
//! sign, comparison and floor is decided with 128-bit integer arithmetic, so
//! interval membership tests never depend on rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, Result};
use crate::fib::FIB;

/// Magnitude bound on both coordinates.
pub const GOLDEN_LIMIT: i64 = 1 << 61;

/// The element `a + bφ` of `Z[φ]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GoldenNum {
    pub a: i64,
    pub b: i64,
}

fn fit(a: i128, b: i128) -> Result<GoldenNum> {
    let lim = GOLDEN_LIMIT as i128;
    if a.abs() > lim || b.abs() > lim {
        return Err(capacity(format!("{a} + {b}φ exceeds the Z[φ] range")));
    }
    Ok(GoldenNum {
        a: a as i64,
        b: b as i64,
    })
}

/// Sign of `a + bφ`. Needs `|2a + b| < 2^64` and `5b² < 2^128`.
fn sign_wide(a: i128, b: i128) -> Ordering {
    let s = 2 * a + b; // 2(a + bφ) = s + b√5
    match (s.cmp(&0), b.cmp(&0)) {
        (Ordering::Equal, o) | (o, Ordering::Equal) => o,
        (x, y) if x == y => x,
        (x, _) => {
            // opposite signs: compare s² with 5b²
            let s2 = s.unsigned_abs() * s.unsigned_abs();
            let b2 = b.unsigned_abs() * b.unsigned_abs() * 5;
            match s2.cmp(&b2) {
                Ordering::Greater => x,
                Ordering::Less => x.reverse(),
                Ordering::Equal => unreachable!("√5 is irrational"),
            }
        }
    }
}

/// `⌊a + bφ⌋` for 128-bit coordinates with `5b² < 2^128`.
fn floor_wide(a: i128, b: i128) -> i128 {
    // a + bφ = (2a + b + b√5) / 2 and ⌊y/2⌋ = ⌊⌊y⌋/2⌋ for real y.
    let root = (b.unsigned_abs() * b.unsigned_abs() * 5).isqrt() as i128;
    let floor_b_sqrt5 = match b.cmp(&0) {
        Ordering::Less => -root - 1,
        _ => root,
    };
    (2 * a + b + floor_b_sqrt5).div_euclid(2)
}

impl GoldenNum {
    pub const ZERO: GoldenNum = GoldenNum { a: 0, b: 0 };
    pub const ONE: GoldenNum = GoldenNum { a: 1, b: 0 };
    pub const PHI: GoldenNum = GoldenNum { a: 0, b: 1 };
    /// `1/φ = φ - 1`.
    pub const INV_PHI: GoldenNum = GoldenNum { a: -1, b: 1 };

    pub fn new(a: i64, b: i64) -> Result<Self> {
        fit(a as i128, b as i128)
    }

    pub fn integer(n: i64) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn checked_add(self, o: Self) -> Result<Self> {
        fit(self.a as i128 + o.a as i128, self.b as i128 + o.b as i128)
    }

    pub fn checked_sub(self, o: Self) -> Result<Self> {
        fit(self.a as i128 - o.a as i128, self.b as i128 - o.b as i128)
    }

    /// `(a + bφ)(c + dφ) = (ac + bd) + (ad + bc + bd)φ`.
    pub fn checked_mul(self, o: Self) -> Result<Self> {
        let (a, b, c, d) = (self.a as i128, self.b as i128, o.a as i128, o.b as i128);
        fit(a * c + b * d, a * d + b * c + b * d)
    }

    pub fn checked_neg(self) -> Result<Self> {
        fit(-(self.a as i128), -(self.b as i128))
    }

    /// `n · self`.
    pub fn checked_scale(self, n: i64) -> Result<Self> {
        let n = n as i128;
        match ((self.a as i128).checked_mul(n), (self.b as i128).checked_mul(n)) {
            (Some(a), Some(b)) => fit(a, b),
            _ => Err(capacity("scaled value exceeds the Z[φ] range")),
        }
    }

    /// `φ^k` for any integer `k`; negative powers are `(φ - 1)^{|k|}`.
    pub fn phi_pow(k: i32) -> Result<Self> {
        let j = k.unsigned_abs() as usize;
        if j + 1 >= FIB.len() {
            return Err(capacity(format!("φ^{k} exceeds the Z[φ] range")));
        }
        let (prev, cur, next) = (FIB[j.max(1) - 1] as i128, FIB[j] as i128, FIB[j + 1] as i128);
        if k >= 0 {
            // φ^j = F_{j-1} + F_j φ (with F_{-1} = 1)
            let prev = if j == 0 { 1 } else { prev };
            fit(prev, cur)
        } else {
            // φ^{-j} = (-1)^j (F_{j+1} - F_j φ)
            let s = if j.is_multiple_of(2) { 1 } else { -1 };
            fit(s * next, -s * cur)
        }
    }

    pub fn pow(self, e: u32) -> Result<Self> {
        let mut acc = GoldenNum::ONE;
        for _ in 0..e {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Exact sign as `-1`, `0` or `+1`.
    pub fn sign(self) -> i8 {
        match sign_wide(self.a as i128, self.b as i128) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn is_integer(self) -> bool {
        self.b == 0
    }

    /// `⌊a + bφ⌋`.
    pub fn floor(self) -> i64 {
        floor_wide(self.a as i128, self.b as i128) as i64
    }

    /// Signed distance to the nearest integer: `x - m` for the unique integer
    /// `m` with `x - m ∈ [-1/2, 1/2)`.
    pub fn signed_dist(self) -> GoldenNum {
        // m = ⌊x + 1/2⌋ = ⌊⌊2x + 1⌋ / 2⌋
        let twice = floor_wide(2 * self.a as i128 + 1, 2 * self.b as i128);
        let m = twice.div_euclid(2);
        GoldenNum {
            a: (self.a as i128 - m) as i64,
            b: self.b,
        }
    }

    /// Representative of `x mod 1` in `[0, 1)`.
    pub fn frac(self) -> GoldenNum {
        GoldenNum {
            a: self.a - self.floor(),
            b: self.b,
        }
    }

    pub fn to_f64(self) -> f64 {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        self.a as f64 + self.b as f64 * phi
    }
}

impl PartialOrd for GoldenNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GoldenNum {
    fn cmp(&self, other: &Self) -> Ordering {
        sign_wide(
            self.a as i128 - other.a as i128,
            self.b as i128 - other.b as i128,
        )
    }
}

impl fmt::Display for GoldenNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b < 0 {
            write!(f, "{} - {}φ", self.a, -(self.b as i128))
        } else {
            write!(f, "{} + {}φ", self.a, self.b)
        }
    }
}

// Operator forms panic on leaving the Z[φ] range, like integer overflow.
impl Add for GoldenNum {
    type Output = GoldenNum;
    fn add(self, o: Self) -> Self {
        self.checked_add(o).expect("Z[φ] addition overflow")
    }
}

impl Sub for GoldenNum {
    type Output = GoldenNum;
    fn sub(self, o: Self) -> Self {
        self.checked_sub(o).expect("Z[φ] subtraction overflow")
    }
}

impl Mul for GoldenNum {
    type Output = GoldenNum;
    fn mul(self, o: Self) -> Self {
        self.checked_mul(o).expect("Z[φ] multiplication overflow")
    }
}

impl Neg for GoldenNum {
    type Output = GoldenNum;
    fn neg(self) -> Self {
        self.checked_neg().expect("Z[φ] negation overflow")
    }
}

/// Interval with `Z[φ]` endpoints and explicit closedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenInterval {
    pub lo: GoldenNum,
    pub hi: GoldenNum,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl GoldenInterval {
    /// Half-open `[lo, hi)`.
    pub fn half_open(lo: GoldenNum, hi: GoldenNum) -> Result<Self> {
        if lo >= hi {
            return Err(domain(format!("empty interval [{lo}, {hi})")));
        }
        Ok(GoldenInterval {
            lo,
            hi,
            lo_closed: true,
            hi_closed: false,
        })
    }

    pub fn length(&self) -> GoldenNum {
        self.hi - self.lo
    }

    pub fn contains(&self, x: GoldenNum) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    /// Whether `x ∈ self + Z`. Exact for intervals of length at most 1.
    pub fn contains_mod_one(&self, x: GoldenNum) -> bool {
        let m = (x - self.lo).floor();
        (m - 1..=m).any(|m| self.contains(GoldenNum { a: x.a - m, b: x.b }))
    }

    pub fn translate(&self, by: GoldenNum) -> Result<Self> {
        Ok(GoldenInterval {
            lo: self.lo.checked_add(by)?,
            hi: self.hi.checked_add(by)?,
            ..*self
        })
    }
}

/// `(-1)^k`.
fn parity_sign(k: u32) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `R_k(u)`: `(-1)^k uφ + [-φ^{-(k-1)}, φ^{-k})` when `u < F_{k-1}` and
/// `(-1)^k uφ + [-φ^{-(k+1)}, φ^{-k})` when `F_{k-1} ≤ u < F_k`.
pub fn interval_rk(k: u32, u: u64) -> Result<GoldenInterval> {
    if k < 2 {
        return Err(domain(format!("R_k needs k ≥ 2, got {k}")));
    }
    let ku = k as usize;
    if ku + 1 >= FIB.len() {
        return Err(capacity(format!("R_{k} exceeds the Fibonacci table")));
    }
    if u >= FIB[ku] {
        return Err(domain(format!("u = {u} must be below F_{k} = {}", FIB[ku])));
    }
    let center = GoldenNum::PHI.checked_scale(parity_sign(k) * u as i64)?;
    let hi = GoldenNum::phi_pow(-(k as i32))?;
    let lo_exp = if u < FIB[ku - 1] { k - 1 } else { k + 1 };
    let lo = GoldenNum::phi_pow(-(lo_exp as i32))?.checked_neg()?;
    GoldenInterval::half_open(lo, hi)?.translate(center)
}

/// Whether `(-1)^k nφ ∈ R_k(u) + Z`.
pub fn in_rk_mod_one(n: u64, k: u32, u: u64) -> Result<bool> {
    let x = GoldenNum::PHI.checked_scale(parity_sign(k) * n as i64)?;
    Ok(interval_rk(k, u)?.contains_mod_one(x))
}

/// Largest `k` accepted by [`LowDigitDetector`]; `F_30 = 832040` intervals.
pub const DETECTOR_MAX_INDEX: u32 = 30;

/// The `F_k` intervals `R_k(u)` reduced mod 1 and sorted, so the `u` whose
/// interval holds `(-1)^k nφ` is found by binary search.
#[derive(Debug, Clone)]
pub struct LowDigitDetector {
    k: u32,
    /// `(start, end, u)` with `start ∈ [0, 1)`, `end = start + length`.
    cells: Vec<(GoldenNum, GoldenNum, u64)>,
}

impl LowDigitDetector {
    pub fn new(k: u32) -> Result<Self> {
        if !(2..=DETECTOR_MAX_INDEX).contains(&k) {
            return Err(domain(format!(
                "detector needs 2 ≤ k ≤ {DETECTOR_MAX_INDEX}, got {k}"
            )));
        }
        let mut cells = (0..FIB[k as usize])
            .map(|u| {
                let iv = interval_rk(k, u)?;
                let start = iv.lo.frac();
                Ok((start, start.checked_add(iv.length())?, u))
            })
            .collect::<Result<Vec<_>>>()?;
        cells.sort_by_key(|x| x.0);
        Ok(LowDigitDetector { k, cells })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The unique `u` with `(-1)^k nφ ∈ R_k(u) + Z`.
    pub fn detect(&self, n: u64) -> Result<u64> {
        let x = GoldenNum::PHI.checked_scale(parity_sign(self.k) * n as i64)?;
        let t = x.frac();
        let idx = self.cells.partition_point(|c| c.0 <= t);
        if idx > 0 {
            let (_, end, u) = self.cells[idx - 1];
            if t < end {
                return Ok(u);
            }
        }
        // the cell with the largest start may wrap past 1
        let (_, end, u) = *self.cells.last().expect("F_k ≥ 1 cells");
        if t + GoldenNum::ONE < end {
            return Ok(u);
        }
        Err(domain(format!("no R_{}(u) contains (-1)^k·{n}φ", self.k)))
    }

    /// The reduced intervals tile the circle: consecutive cells touch, the
    /// last wraps onto the first, and the lengths sum to exactly 1.
    pub fn is_exact_partition(&self) -> bool {
        let total = self
            .cells
            .iter()
            .fold(GoldenNum::ZERO, |acc, c| acc + (c.1 - c.0));
        let touching = self.cells.windows(2).all(|w| w[0].1 == w[1].0);
        let wraps = self.cells.last().map(|c| c.1) == self.cells.first().map(|c| c.0 + GoldenNum::ONE);
        total == GoldenNum::ONE && touching && wraps
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// `u = v(n, k)` recovered from `nφ` alone.
pub fn detect_low_digits(n: u64, k: u32) -> Result<u64> {
    LowDigitDetector::new(k)?.detect(n)
}
