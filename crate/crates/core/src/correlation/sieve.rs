use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

/// Primes `≤ limit` by the sieve of Eratosthenes.
pub fn base_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Values `±1` on primes, extended completely multiplicatively.
#[derive(Clone)]
pub struct PrimeSigns {
    name: String,
    sign: Arc<dyn Fn(u64) -> i8 + Send + Sync>,
}

impl PrimeSigns {
    pub fn new(name: impl Into<String>, sign: impl Fn(u64) -> i8 + Send + Sync + 'static) -> Self {
        PrimeSigns {
            name: name.into(),
            sign: Arc::new(sign),
        }
    }

    /// `m ≡ 1`.
    pub fn trivial() -> Self {
        PrimeSigns::new("one", |_| 1)
    }

    fn at(&self, p: u64) -> Result<i8> {
        match (self.sign)(p) {
            s @ (1 | -1) => Ok(s),
            s => Err(invalid(format!(
                "custom value {s} at prime {p} is not unimodular"
            ))),
        }
    }
}

impl fmt::Debug for PrimeSigns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeSigns({})", self.name)
    }
}

/// The multiplicative function paired with `(-1)^{s_φ(n)}`.
#[derive(Debug, Clone)]
pub enum MultiplicativeSpec {
    Moebius,
    Liouville,
    Custom(PrimeSigns),
}

impl MultiplicativeSpec {
    pub fn name(&self) -> String {
        match self {
            MultiplicativeSpec::Moebius => "moebius".into(),
            MultiplicativeSpec::Liouville => "liouville".into(),
            MultiplicativeSpec::Custom(c) => format!("custom:{}", c.name),
        }
    }

    /// Combines the contribution of `p^e` into `acc`.
    fn apply(&self, acc: i8, p: u64, e: u32) -> Result<i8> {
        Ok(match self {
            MultiplicativeSpec::Moebius => match e {
                1 => -acc,
                _ => 0,
            },
            MultiplicativeSpec::Liouville => {
                if e % 2 == 1 {
                    -acc
                } else {
                    acc
                }
            }
            MultiplicativeSpec::Custom(c) => {
                if e % 2 == 1 {
                    acc * c.at(p)?
                } else {
                    acc
                }
            }
        })
    }

    /// `m(n)` by trial division.
    pub fn value(&self, n: u64) -> Result<i8> {
        if n == 0 {
            return Ok(0);
        }
        let mut acc = 1i8;
        let mut rest = n;
        let mut p = 2u64;
        while p * p <= rest {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            if e > 0 {
                acc = self.apply(acc, p, e)?;
            }
            p += 1;
        }
        if rest > 1 {
            acc = self.apply(acc, rest, 1)?;
        }
        Ok(acc)
    }
}

/// Segmented sieve for `m(n)`, `1 ≤ n < limit`; memory per call is one
/// segment plus the primes up to `√limit`.
#[derive(Debug, Clone)]
pub struct MultiplicativeSieve {
    spec: MultiplicativeSpec,
    primes: Vec<u64>,
    limit: u64,
}

impl MultiplicativeSieve {
    pub fn new(spec: MultiplicativeSpec, limit: u64) -> Self {
        let root = (limit as f64).sqrt() as u64 + 1;
        MultiplicativeSieve {
            spec,
            primes: base_primes(root),
            limit,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `m(n)` for `n ∈ [start, start + len)`; `n = 0` maps to 0.
    pub fn segment(&self, start: u64, len: usize) -> Result<Vec<i8>> {
        let end = start + len as u64;
        let mut value = vec![1i8; len];
        let mut rest: Vec<u64> = (start..end).collect();
        for &p in &self.primes {
            if p * p >= end {
                break;
            }
            let first = start.div_ceil(p).max(1) * p;
            let mut n = first;
            while n < end {
                let i = (n - start) as usize;
                let mut e = 0;
                while rest[i].is_multiple_of(p) {
                    rest[i] /= p;
                    e += 1;
                }
                value[i] = self.spec.apply(value[i], p, e)?;
                n += p;
            }
        }
        for (i, (v, &r)) in value.iter_mut().zip(&rest).enumerate() {
            if start + i as u64 == 0 {
                *v = 0;
            } else if r > 1 {
                *v = self.spec.apply(*v, r, 1)?;
            }
        }
        Ok(value)
    }
}

/// `μ(n)` for `0 ≤ n < limit`, with index 0 set to 0.
pub fn moebius_sieve(limit: u64) -> Vec<i8> {
    MultiplicativeSieve::new(MultiplicativeSpec::Moebius, limit)
        .segment(0, limit as usize)
        .expect("μ never fails")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_examples() {
        let mu = moebius_sieve(100);
        assert_eq!(mu[1], 1);
        assert_eq!(mu[4], 0);
        assert_eq!(mu[30], -1);
        assert_eq!(mu[97], -1);
        assert_eq!(mu[6], 1);
    }

    #[test]
    fn segments_match_trial_division() {
        for spec in [
            MultiplicativeSpec::Moebius,
            MultiplicativeSpec::Liouville,
            MultiplicativeSpec::Custom(PrimeSigns::new("mod4", |p| if p % 4 == 3 { -1 } else { 1 })),
        ] {
            let sieve = MultiplicativeSieve::new(spec.clone(), 50_000);
            for start in [0u64, 1, 977, 31_000] {
                let seg = sieve.segment(start, 1500).unwrap();
                for (i, &m) in seg.iter().enumerate() {
                    assert_eq!(m, spec.value(start + i as u64).unwrap(), "{}", start + i as u64);
                }
            }
        }
    }

    #[test]
    fn rejects_non_unimodular_custom() {
        let spec = MultiplicativeSpec::Custom(PrimeSigns::new("bad", |_| 2));
        assert!(spec.value(3).is_err());
        assert!(MultiplicativeSieve::new(spec, 100).segment(1, 50).is_err());
    }

    #[test]
    fn primes() {
        assert_eq!(base_primes(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(base_primes(1).is_empty());
    }
}
