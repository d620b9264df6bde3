//! Fibonacci numbers with `F_0 = 0`, `F_1 = 1`.

use crate::error::{capacity, Result};

/// Largest `k` with `F_k` representable as `u64`.
pub const MAX_FIB_INDEX: usize = 93;

const fn build_table() -> [u64; MAX_FIB_INDEX + 1] {
    let mut t = [0u64; MAX_FIB_INDEX + 1];
    t[1] = 1;
    let mut k = 2;
    while k <= MAX_FIB_INDEX {
        t[k] = t[k - 1] + t[k - 2];
        k += 1;
    }
    t
}

/// `FIB[k] = F_k` for every index that fits in 64 bits.
pub static FIB: [u64; MAX_FIB_INDEX + 1] = build_table();

/// An immutable prefix of the Fibonacci sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibTable {
    values: Vec<u64>,
}

impl FibTable {
    /// Builds `F_0..=F_max_index`, failing if the last value overflows `u64`.
    pub fn new(max_index: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(max_index + 1);
        values.push(0u64);
        if max_index >= 1 {
            values.push(1);
        }
        for k in 2..=max_index {
            let next = values[k - 1]
                .checked_add(values[k - 2])
                .ok_or_else(|| capacity(format!("F_{k} does not fit in 64 bits")))?;
            values.push(next);
        }
        Ok(FibTable { values })
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> Result<u64> {
        self.values.get(k).copied().ok_or_else(|| {
            capacity(format!(
                "index {k} beyond table capacity {}",
                self.max_index()
            ))
        })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// `F_k`, or a capacity error past [`MAX_FIB_INDEX`].
pub fn fib(k: usize) -> Result<u64> {
    FIB.get(k)
        .copied()
        .ok_or_else(|| capacity(format!("F_{k} does not fit in 64 bits")))
}

/// `ℓ(n)`: the unique `k ≥ 2` with `F_{k-1} ≤ n < F_k`, i.e. one more than the
/// index of the leading Zeckendorf digit. `ℓ(0) = 2`.
pub fn block_index(n: u64) -> usize {
    // F_94 overflows, so n ≥ F_93 maps to 94.
    FIB[2..].partition_point(|&f| f <= n) + 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_cases_and_recurrence() {
        assert_eq!(fib(0).unwrap(), 0);
        assert_eq!(fib(1).unwrap(), 1);
        assert_eq!(fib(10).unwrap(), 55);
        assert_eq!(fib(20).unwrap(), 6765);
        for k in 2..=MAX_FIB_INDEX {
            assert_eq!(FIB[k], FIB[k - 1] + FIB[k - 2]);
        }
    }

    #[test]
    fn capacity_limit() {
        assert!(FibTable::new(MAX_FIB_INDEX).is_ok());
        assert!(matches!(
            FibTable::new(MAX_FIB_INDEX + 1),
            Err(crate::Error::Capacity(_))
        ));
        assert!(fib(MAX_FIB_INDEX + 1).is_err());
        let t = FibTable::new(12).unwrap();
        assert_eq!(t.get(12).unwrap(), 144);
        assert!(t.get(13).is_err());
    }

    #[test]
    fn block_index_brackets() {
        assert_eq!(block_index(0), 2);
        assert_eq!(block_index(1), 3);
        assert_eq!(block_index(2), 4);
        assert_eq!(block_index(4), 5);
        assert_eq!(block_index(5), 6);
        for n in 1..5000u64 {
            let k = block_index(n);
            assert!(FIB[k - 1] <= n && n < FIB[k]);
        }
        assert_eq!(block_index(u64::MAX), 94);
    }
}
