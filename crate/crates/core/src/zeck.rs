//! Zeckendorf numeration.
//!
//! Every `n ≥ 0` is written uniquely as `n = Σ ε_i F_i` with digits
//! `ε_i ∈ {0, 1}`, indices `i ≥ 2`, and no two adjacent ones. Digits are
//! packed into a `u128` mask where bit `i` is `ε_i`; every `u64` fits since
//! `F_94 > u64::MAX`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, invalid, Result};
use crate::fib::{block_index, FIB, MAX_FIB_INDEX};

/// Digit mask of `n`: bit `i` set iff `ε_i(n) = 1`.
pub type Digits = u128;

/// Canonical Zeckendorf representation as a strictly decreasing index list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZeckRep {
    indices: Vec<u32>,
}

impl ZeckRep {
    /// Validates an index list: strictly decreasing, every index `≥ 2`,
    /// consecutive indices at least 2 apart, and a sum that fits in `u64`.
    pub fn new(indices: Vec<u32>) -> Result<Self> {
        for w in indices.windows(2) {
            if w[0] <= w[1] {
                return Err(invalid(format!(
                    "indices must be strictly decreasing: {} then {}",
                    w[0], w[1]
                )));
            }
            if w[0] - w[1] < 2 {
                return Err(invalid(format!(
                    "adjacent indices {} and {} are not allowed",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&low) = indices.last() {
            if low < 2 {
                return Err(invalid(format!("index {low} is below 2")));
            }
        }
        if let Some(&top) = indices.first() {
            if top as usize > MAX_FIB_INDEX {
                return Err(capacity(format!("F_{top} does not fit in 64 bits")));
            }
        }
        let rep = ZeckRep { indices };
        rep.try_value()?;
        Ok(rep)
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The represented integer.
    pub fn value(&self) -> u64 {
        // Checked in `new` / produced by `zeck_encode`.
        self.try_value().expect("validated representation")
    }

    fn try_value(&self) -> Result<u64> {
        self.indices.iter().try_fold(0u64, |acc, &i| {
            acc.checked_add(FIB[i as usize])
                .ok_or_else(|| capacity("representation value overflows u64"))
        })
    }

    pub fn digits(&self) -> Digits {
        self.indices.iter().fold(0, |m, &i| m | (1u128 << i))
    }
}

impl fmt::Display for ZeckRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.indices.iter().map(|i| format!("F_{i}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Greedy Zeckendorf encoding (largest `F_i ≤` remainder first).
pub fn zeck_encode(n: u64) -> ZeckRep {
    let mut indices = Vec::new();
    let mut rest = n;
    let mut i = block_index(n) - 1;
    while rest > 0 {
        while FIB[i] > rest {
            i -= 1;
        }
        indices.push(i as u32);
        rest -= FIB[i];
        i -= 1;
    }
    ZeckRep { indices }
}

/// Sum of `F_i` over a validated index list.
pub fn zeck_decode(indices: &[u32]) -> Result<u64> {
    Ok(ZeckRep::new(indices.to_vec())?.value())
}

/// Digit mask of `n`.
pub fn digits(n: u64) -> Digits {
    let mut mask = 0u128;
    let mut rest = n;
    let mut i = block_index(n) - 1;
    while rest > 0 {
        while FIB[i] > rest {
            i -= 1;
        }
        mask |= 1u128 << i;
        rest -= FIB[i];
        i -= 1;
    }
    mask
}

/// Value of a digit mask, or `None` if it overflows `u64` or uses indices
/// outside `2..=93`. Adjacency is not checked.
pub fn digits_value(mask: Digits) -> Option<u64> {
    if mask & 0b11 != 0 {
        return None;
    }
    let mut m = mask;
    let mut acc = 0u64;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        if i > MAX_FIB_INDEX {
            return None;
        }
        acc = acc.checked_add(FIB[i])?;
        m &= m - 1;
    }
    Some(acc)
}

/// `s_φ(n)`, the Zeckendorf sum of digits; `s_φ(0) = 0`.
pub fn s_phi(n: u64) -> u32 {
    let mut count = 0;
    let mut rest = n;
    let mut i = block_index(n) - 1;
    while rest > 0 {
        while FIB[i] > rest {
            i -= 1;
        }
        count += 1;
        rest -= FIB[i];
        i -= 1;
    }
    count
}

/// Largest argument accepted by [`s_phi_min_oracle`] and [`s_phi_min_table`].
pub const ORACLE_BOUND: u64 = 1_000_000;

/// Minimal number of Fibonacci summands for every `0 ≤ n ≤ bound`, by
/// unbounded coin-change dynamic programming. Independent of the greedy
/// encoder; meant as ground truth for `s_phi`.
pub fn s_phi_min_table(bound: u64) -> Result<Vec<u32>> {
    if bound > ORACLE_BOUND {
        return Err(capacity(format!(
            "oracle bound {bound} exceeds {ORACLE_BOUND}"
        )));
    }
    let bound = bound as usize;
    let coins: Vec<usize> = FIB[2..]
        .iter()
        .map(|&f| f as usize)
        .take_while(|&f| f <= bound.max(1))
        .collect();
    let mut best = vec![u32::MAX; bound + 1];
    best[0] = 0;
    for n in 1..=bound {
        for &c in coins.iter().take_while(|&&c| c <= n) {
            let cand = best[n - c].saturating_add(1);
            if cand < best[n] {
                best[n] = cand;
            }
        }
    }
    Ok(best)
}

/// Least `k` such that `n` is a sum of `k` Fibonacci numbers.
pub fn s_phi_min_oracle(n: u64) -> Result<u32> {
    Ok(s_phi_min_table(n)?[n as usize])
}

/// `ε_i(n)`. Indices `< 2` and past the table are always zero.
pub fn digit(n: u64, i: u32) -> u8 {
    if i >= 128 {
        return 0;
    }
    ((digits(n) >> i) & 1) as u8
}

/// Mask of all bit positions `< k`.
fn below(k: u32) -> u128 {
    if k >= 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    }
}

/// `v(n, k) = Σ_{2 ≤ i < k} ε_i(n) F_i`, the value of the digits below `k`.
pub fn v(n: u64, k: u32) -> u64 {
    digits_value(digits(n) & below(k)).expect("sub-mask of a valid mask")
}

/// Shift operator `S(n) = Σ F_{i+1} ε_i(n)`.
pub fn shift_s(n: u64) -> Result<u64> {
    shift_s_pow(n, 1)
}

/// `S^t(n)`.
pub fn shift_s_pow(n: u64, t: u32) -> Result<u64> {
    if n == 0 {
        return Ok(0);
    }
    let mask = digits(n);
    let top = 127 - mask.leading_zeros();
    if top + t > MAX_FIB_INDEX as u32 {
        return Err(capacity(format!("S^{t}({n}) overflows u64")));
    }
    digits_value(mask << t).ok_or_else(|| capacity(format!("S^{t}({n}) overflows u64")))
}

/// Radius `r` and position `k` for an `r`-separation test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationSpec {
    pub r: u32,
    pub k: u32,
}

impl SeparationSpec {
    pub fn new(r: u32, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(domain(format!("separation position k={k} must be ≥ 2")));
        }
        Ok(SeparationSpec { r, k })
    }
}

/// `n1` and `n2` are `r`-separated at `k`: `ε_i(n1) = 0` for `i ≥ k - r` and
/// `ε_i(n2) = 0` for `i ≤ k + r`.
pub fn is_r_separated(n1: u64, n2: u64, spec: SeparationSpec) -> bool {
    let (r, k) = (spec.r as i64, spec.k as i64);
    let low_cut = k - r;
    let n1_ok = if low_cut <= 0 {
        n1 == 0
    } else {
        digits(n1) & !below(low_cut as u32) == 0
    };
    let high_cut = k + r + 1;
    let n2_ok = digits(n2) & below(high_cut.min(128) as u32) == 0;
    n1_ok && n2_ok
}

/// One piece of an indecomposable decomposition: `S^shift(part)` is a block
/// of the original digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub part: u64,
    pub shift: u32,
}

/// Splits the digit mask into maximal blocks separated by at least `2r + 1`
/// zeros, lowest block first.
pub fn digit_blocks(mask: Digits, r: u32) -> Vec<Digits> {
    let mut blocks = Vec::new();
    let mut m = mask;
    let mut current: Digits = 0;
    let mut last: Option<u32> = None;
    while m != 0 {
        let i = m.trailing_zeros();
        if let Some(prev) = last {
            if i - prev > 2 * r + 1 {
                blocks.push(current);
                current = 0;
            }
        }
        current |= 1u128 << i;
        last = Some(i);
        m &= m - 1;
    }
    if current != 0 {
        blocks.push(current);
    }
    blocks
}

/// Lowest digit position of a normalised higher block: `max(r, 2)`.
pub fn block_base(r: u32) -> u32 {
    r.max(2)
}

/// Decomposes `n` into indecomposable parts at radius `r`, splitting at every
/// gap of `≥ 2r + 1` zeros. The lowest block is returned unshifted; every
/// higher block is shifted down so its lowest digit sits at `max(r, 2)`.
/// Summing `S^shift(part)` reproduces `n`. `n = 0` yields no parts.
pub fn decompose_indecomposable(n: u64, r: u32) -> Vec<Part> {
    let base = block_base(r);
    digit_blocks(digits(n), r)
        .into_iter()
        .enumerate()
        .map(|(idx, block)| {
            if idx == 0 {
                Part {
                    part: digits_value(block).expect("block of a valid mask"),
                    shift: 0,
                }
            } else {
                let low = block.trailing_zeros();
                let shift = low - base;
                Part {
                    part: digits_value(block >> shift).expect("shifted block fits"),
                    shift,
                }
            }
        })
        .collect()
}

/// `n ≥ 1` admits no split into two nonzero `r`-separated summands.
pub fn is_indecomposable(n: u64, r: u32) -> bool {
    n > 0 && digit_blocks(digits(n), r).len() == 1
}

/// Sum of `S^shift(part)` over the parts.
pub fn reassemble(parts: &[Part]) -> Result<u64> {
    parts.iter().try_fold(0u64, |acc, p| {
        acc.checked_add(shift_s_pow(p.part, p.shift)?)
            .ok_or_else(|| capacity("reassembled value overflows u64"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_examples() {
        assert!(zeck_encode(0).is_empty());
        assert_eq!(zeck_encode(4).indices(), &[4, 2]);
        assert_eq!(zeck_encode(17).indices(), &[7, 4, 2]);
        assert_eq!(zeck_encode(u64::MAX).value(), u64::MAX);
    }

    #[test]
    fn decode_examples_and_errors() {
        assert_eq!(zeck_decode(&[]).unwrap(), 0);
        assert_eq!(zeck_decode(&[2]).unwrap(), 1);
        assert_eq!(zeck_decode(&[7, 4, 2]).unwrap(), 17);
        assert!(matches!(zeck_decode(&[3, 2]), Err(crate::Error::Validation(_))));
        assert!(zeck_decode(&[2, 4]).is_err());
        assert!(zeck_decode(&[1]).is_err());
        assert!(zeck_decode(&[5, 5]).is_err());
        assert!(matches!(zeck_decode(&[94]), Err(crate::Error::Capacity(_))));
        // every valid sum below F_94 fits
        assert_eq!(zeck_decode(&[93, 91]).unwrap(), FIB[93] + FIB[91]);
    }

    #[test]
    fn s_phi_examples() {
        assert_eq!(s_phi(0), 0);
        assert_eq!(s_phi(12), 3);
        assert_eq!(s_phi(17), 3);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(s_phi_min_oracle(1).unwrap(), 1);
        assert_eq!(s_phi_min_oracle(4).unwrap(), 2);
        assert_eq!(s_phi_min_oracle(100).unwrap(), 3);
        assert!(s_phi_min_oracle(ORACLE_BOUND + 1).is_err());
    }

    #[test]
    fn digit_and_v_examples() {
        assert_eq!(digit(17, 7), 1);
        assert_eq!(digit(17, 3), 0);
        assert_eq!(digit(0, 5), 0);
        assert_eq!(v(17, 5), 4);
        assert_eq!(v(12345, 2), 0);
        assert_eq!(v(8, 6), 0);
        assert_eq!(v(17, 200), 17);
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_s(0).unwrap(), 0);
        assert_eq!(shift_s(1).unwrap(), 2);
        assert_eq!(shift_s(4).unwrap(), 7);
        assert_eq!(shift_s_pow(1, 8).unwrap(), 55);
        assert!(matches!(shift_s(FIB[93]), Err(crate::Error::Capacity(_))));
    }

    #[test]
    fn separation_examples() {
        let s = |r, k| SeparationSpec::new(r, k).unwrap();
        assert!(is_r_separated(1, 5, s(0, 4)));
        assert!(!is_r_separated(1, 2, s(0, 3)));
        assert!(is_r_separated(0, 13, s(1, 5)));
        assert!(!is_r_separated(0, 5, s(1, 5)));
        assert!(SeparationSpec::new(0, 1).is_err());
        // k - r ≤ 2 leaves no room for a nonzero n1
        assert!(!is_r_separated(1, 89, s(3, 4)));
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(decompose_indecomposable(4, 1), vec![Part { part: 4, shift: 0 }]);
        assert_eq!(
            decompose_indecomposable(56, 1),
            vec![Part { part: 1, shift: 0 }, Part { part: 1, shift: 8 }]
        );
        // trailing zeros never split: 8 = F_6 alone
        assert_eq!(decompose_indecomposable(8, 0), vec![Part { part: 8, shift: 0 }]);
        assert!(decompose_indecomposable(0, 2).is_empty());
        // higher blocks normalised to position r when r ≥ 2
        let parts = decompose_indecomposable(FIB[2] + FIB[20], 3);
        assert_eq!(parts[1], Part { part: FIB[3], shift: 17 });
    }

    #[test]
    fn display() {
        assert_eq!(zeck_encode(17).to_string(), "F_7 + F_4 + F_2");
        assert_eq!(zeck_encode(0).to_string(), "0");
    }
}
