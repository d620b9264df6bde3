use serde::Serialize;

use crate::error::{capacity, domain, invalid, Result};
use crate::fib::{FIB, MAX_FIB_INDEX};
use crate::zeck::{is_indecomposable, v};

/// Offsets `ℓ_1 < … < ℓ_d` of extra digits placed above a block.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LSet {
    elems: Vec<u32>,
}

impl LSet {
    /// Checks `ℓ_1 ≥ 1`, `ℓ_1 ≤ 2r` and `ℓ_j + 1 < ℓ_{j+1}`; with `strict`
    /// also `ℓ_{j+1} ≤ ℓ_j + 2r + 1`.
    pub fn new(elems: Vec<u32>, r: u32, strict: bool) -> Result<Self> {
        if let Some(&first) = elems.first() {
            if first == 0 {
                return Err(invalid("L must contain positive integers"));
            }
            if first > 2 * r {
                return Err(invalid(format!("ℓ_1 = {first} exceeds 2r = {}", 2 * r)));
            }
        }
        for w in elems.windows(2) {
            if w[0] + 1 >= w[1] {
                return Err(invalid(format!(
                    "consecutive offsets {} and {} must differ by at least 2",
                    w[0], w[1]
                )));
            }
            if strict && w[1] > w[0] + 2 * r + 1 {
                return Err(invalid(format!(
                    "offsets {} and {} are more than 2r + 1 apart",
                    w[0], w[1]
                )));
            }
        }
        Ok(LSet { elems })
    }

    pub fn empty() -> Self {
        LSet::default()
    }

    pub fn elems(&self) -> &[u32] {
        &self.elems
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

/// `N_L(k) = Σ_{ℓ ∈ L} F_{k+ℓ}`.
pub fn n_l(l: &LSet, k: u32) -> Result<u64> {
    l.elems.iter().try_fold(0u64, |acc, &ell| {
        let idx = (k + ell) as usize;
        if idx > MAX_FIB_INDEX {
            return Err(capacity(format!("F_{idx} does not fit in 64 bits")));
        }
        acc.checked_add(FIB[idx])
            .ok_or_else(|| capacity("N_L(k) overflows u64"))
    })
}

pub fn in_bprime(n: u64, r: u32) -> bool {
    is_indecomposable(n, r)
}

/// `n ∈ B'` and `v(n, r + 1) = F_r`. Needs `r ≥ 2`.
pub fn in_b(n: u64, r: u32) -> bool {
    r >= 2 && in_bprime(n, r) && v(n, r + 1) == FIB[r as usize]
}

fn block(k: u32) -> Result<std::ops::Range<u64>> {
    let k = k as usize;
    if k > MAX_FIB_INDEX {
        return Err(capacity(format!("F_{k} does not fit in 64 bits")));
    }
    if k < 2 {
        return Ok(0..0);
    }
    Ok(FIB[k - 1]..FIB[k])
}

/// Members of `B'` with `ℓ(n) = k`.
pub fn enumerate_bprime(r: u32, k: u32) -> Result<Vec<u64>> {
    Ok(block(k)?.filter(|&n| in_bprime(n, r)).collect())
}

/// Members of `B` with `ℓ(n) = k`.
pub fn enumerate_b(r: u32, k: u32) -> Result<Vec<u64>> {
    if r < 2 {
        return Err(domain(format!("B needs r ≥ 2 so that F_r is a digit, got r = {r}")));
    }
    Ok(block(k)?.filter(|&n| in_b(n, r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeck::digit;

    #[test]
    fn n_l_examples() {
        assert_eq!(n_l(&LSet::empty(), 7).unwrap(), 0);
        assert_eq!(n_l(&LSet::new(vec![2], 1, true).unwrap(), 3).unwrap(), 5);
        assert_eq!(n_l(&LSet::new(vec![1, 3], 1, true).unwrap(), 4).unwrap(), 18);
        assert!(n_l(&LSet::new(vec![2], 1, true).unwrap(), 92).is_err());
    }

    #[test]
    fn lset_validation() {
        assert!(LSet::new(vec![0], 2, true).is_err());
        assert!(LSet::new(vec![5], 2, true).is_err());
        assert!(LSet::new(vec![1, 2], 2, true).is_err());
        assert!(LSet::new(vec![1, 7], 2, true).is_err());
        assert!(LSet::new(vec![1, 7], 2, false).is_ok());
        assert!(LSet::new(vec![2, 5], 6, true).is_ok());
    }

    #[test]
    fn bprime_examples() {
        assert_eq!(enumerate_bprime(1, 3).unwrap(), vec![1]);
        assert_eq!(enumerate_bprime(1, 4).unwrap(), vec![2]);
        for r in 0..4 {
            for k in 3..20 {
                assert!(enumerate_bprime(r, k).unwrap().contains(&FIB[k as usize - 1]));
            }
        }
    }

    #[test]
    fn b_examples() {
        assert_eq!(enumerate_b(2, 3).unwrap(), vec![1]);
        assert!(enumerate_b(2, 4).unwrap().is_empty());
        assert!(enumerate_b(1, 4).is_err());
        for r in 2..5u32 {
            for k in 3..18 {
                for n in enumerate_b(r, k).unwrap() {
                    assert_eq!(digit(n, r), 1);
                    assert!((2..r).all(|i| digit(n, i) == 0));
                }
            }
        }
    }
}
