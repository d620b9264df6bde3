//! Substitutions, their fixed points, and codings.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Debug;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{capacity, domain, invalid, Result};
use crate::golden::GoldenNum;
use crate::zeck::s_phi;

/// A substitution on a finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism<S: Ord> {
    rules: BTreeMap<S, Vec<S>>,
}

impl<S: Ord + Copy + Debug> Morphism<S> {
    /// The alphabet is the key set of `rules`; every image must be nonempty
    /// and stay inside it.
    pub fn new(rules: impl IntoIterator<Item = (S, Vec<S>)>) -> Result<Self> {
        let rules: BTreeMap<S, Vec<S>> = rules.into_iter().collect();
        for (s, img) in &rules {
            if img.is_empty() {
                return Err(invalid(format!("image of {s:?} is empty")));
            }
            if let Some(bad) = img.iter().find(|t| !rules.contains_key(t)) {
                return Err(invalid(format!(
                    "image of {s:?} uses {bad:?}, which is outside the alphabet"
                )));
            }
        }
        Ok(Morphism { rules })
    }

    pub fn alphabet(&self) -> impl Iterator<Item = &S> {
        self.rules.keys()
    }

    pub fn image(&self, s: &S) -> Option<&[S]> {
        self.rules.get(s).map(Vec::as_slice)
    }

    /// `σ(seed)` starts with `seed` and is longer than one symbol, so the
    /// iterates converge to an infinite fixed point.
    pub fn is_prolongable(&self, seed: &S) -> bool {
        matches!(self.rules.get(seed), Some(img) if img.len() >= 2 && img[0] == *seed)
    }
}

/// A letter-to-letter output map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coding<S: Ord> {
    map: BTreeMap<S, u8>,
}

impl<S: Ord + Copy + Debug> Coding<S> {
    pub fn new(map: impl IntoIterator<Item = (S, u8)>) -> Self {
        Coding {
            map: map.into_iter().collect(),
        }
    }

    pub fn constant(alphabet: impl IntoIterator<Item = S>, value: u8) -> Self {
        Coding::new(alphabet.into_iter().map(|s| (s, value)))
    }

    pub fn is_total_on(&self, m: &Morphism<S>) -> bool {
        m.alphabet().all(|s| self.map.contains_key(s))
    }

    pub fn apply(&self, s: &S) -> u8 {
        self.map[s]
    }
}

/// One level of the lazy expansion. Level `j` reads the fixed point from
/// level `j + 1` (starting at position 1) and emits the images of those
/// symbols, preceded by `σ(seed)`. Deeper levels are created on demand, so
/// a prefix of length `L` costs `O(L)` time and `O(log L)` memory.
#[derive(Debug, Clone)]
struct Level<S> {
    image: Vec<S>,
    pos: usize,
    source: Option<Box<Level<S>>>,
}

impl<S: Ord + Copy + Debug> Level<S> {
    fn root(rules: &BTreeMap<S, Vec<S>>, seed: S) -> Self {
        Level {
            image: rules[&seed].clone(),
            pos: 0,
            source: None,
        }
    }

    fn next(&mut self, rules: &BTreeMap<S, Vec<S>>, seed: S) -> S {
        if self.pos == self.image.len() {
            let source = self.source.get_or_insert_with(|| {
                let mut child = Box::new(Level::root(rules, seed));
                child.next(rules, seed); // position 0 is the seed itself
                child
            });
            let s = source.next(rules, seed);
            self.image.clear();
            self.image.extend_from_slice(&rules[&s]);
            self.pos = 0;
        }
        let s = self.image[self.pos];
        self.pos += 1;
        s
    }
}

/// The infinite fixed point `σ^∞(seed)` as an iterator.
#[derive(Debug, Clone)]
pub struct FixedPoint<S: Ord> {
    rules: Arc<BTreeMap<S, Vec<S>>>,
    seed: S,
    top: Level<S>,
}

impl<S: Ord + Copy + Debug> Iterator for FixedPoint<S> {
    type Item = S;

    fn next(&mut self) -> Option<S> {
        Some(self.top.next(&self.rules, self.seed))
    }
}

pub fn fixed_point_stream<S: Ord + Copy + Debug>(m: &Morphism<S>, seed: S) -> Result<FixedPoint<S>> {
    if !m.rules.contains_key(&seed) {
        return Err(invalid(format!("seed {seed:?} is not in the alphabet")));
    }
    if !m.is_prolongable(&seed) {
        return Err(invalid(format!(
            "morphism is not prolongable at {seed:?}: its image must start with it and have length ≥ 2"
        )));
    }
    let rules = Arc::new(m.rules.clone());
    let top = Level::root(&rules, seed);
    Ok(FixedPoint { rules, seed, top })
}

/// `π(σ^∞(seed))`.
pub fn coded_stream<S: Ord + Copy + Debug>(
    m: &Morphism<S>,
    coding: &Coding<S>,
    seed: S,
) -> Result<impl Iterator<Item = u8>> {
    if !coding.is_total_on(m) {
        return Err(invalid("coding is not defined on the whole alphabet"));
    }
    let coding = coding.clone();
    Ok(fixed_point_stream(m, seed)?.map(move |s| coding.apply(&s)))
}

/// `a ↦ ab, b ↦ c, c ↦ cd, d ↦ a` with coding `a, d ↦ 0` and `b, c ↦ 1`;
/// the coded fixed point from `a` is `s_φ(n) mod 2` for `n = 0, 1, 2, …`.
pub fn zeck_parity_system() -> (Morphism<char>, Coding<char>, char) {
    let m = Morphism::new([
        ('a', vec!['a', 'b']),
        ('b', vec!['c']),
        ('c', vec!['c', 'd']),
        ('d', vec!['a']),
    ])
    .expect("static rules");
    let c = Coding::new([('a', 0), ('b', 1), ('c', 1), ('d', 0)]);
    (m, c, 'a')
}

/// `s_φ(n) mod 2` for `n = 0, 1, 2, …`, generated by substitution.
pub fn parity_stream() -> impl Iterator<Item = u8> {
    let (m, c, seed) = zeck_parity_system();
    coded_stream(&m, &c, seed).expect("static system is prolongable")
}

/// `0 ↦ 01, 1 ↦ 0`.
pub fn fibonacci_morphism() -> (Morphism<char>, Coding<char>, char) {
    let m = Morphism::new([('0', vec!['0', '1']), ('1', vec!['0'])]).expect("static rules");
    (m, Coding::new([('0', 0), ('1', 1)]), '0')
}

/// The Fibonacci word `x_1 x_2 …` from the substitution.
pub fn fibonacci_word_stream() -> impl Iterator<Item = u8> {
    let (m, c, seed) = fibonacci_morphism();
    coded_stream(&m, &c, seed).expect("static system is prolongable")
}

/// `x_n = 2 + ⌊nφ⌋ - ⌊(n+1)φ⌋` for `n ≥ 1`, with exact floors.
pub fn fibonacci_word(n: u64) -> Result<u8> {
    if n == 0 {
        return Err(domain("the Fibonacci word is indexed from n = 1"));
    }
    let lo = GoldenNum::PHI.checked_scale(n as i64)?.floor();
    let hi = GoldenNum::PHI.checked_scale(n as i64 + 1)?.floor();
    Ok((2 + lo - hi) as u8)
}

/// First disagreement between `(-1)^{s_φ(k^λ₁ n)}` and `(-1)^{s_φ(k^λ₂ n)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelPair {
    pub lambda1: u32,
    pub lambda2: u32,
    /// Least `n < horizon` where the two sequences differ, if any.
    pub first_difference: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub k: u64,
    pub horizon: u64,
    pub pairs: Vec<KernelPair>,
}

impl KernelReport {
    pub fn all_distinct(&self) -> bool {
        self.pairs
            .iter()
            .all(|p| p.lambda1 == p.lambda2 || p.first_difference.is_some())
    }
}

/// Finite-horizon evidence that the subsequences `n ↦ (-1)^{s_φ(k^λ n)}` of
/// the `k`-kernel are pairwise distinct.
pub fn kkernel_distinctness(k: u64, lambdas: &[u32], horizon: u64) -> Result<KernelReport> {
    if k < 2 {
        return Err(domain(format!("kernel base k={k} must be ≥ 2")));
    }
    if horizon > 1_000_000 {
        return Err(domain(format!("horizon {horizon} exceeds 10^6")));
    }
    let mut multipliers = BTreeMap::new();
    for &l in lambdas {
        let m = k
            .checked_pow(l)
            .filter(|m| m.checked_mul(horizon).is_some())
            .ok_or_else(|| capacity(format!("{k}^{l} · {horizon} overflows u64")))?;
        multipliers.insert(l, m);
    }
    let mut pairs = Vec::new();
    for (i, &l1) in lambdas.iter().enumerate() {
        for &l2 in &lambdas[i + 1..] {
            let (m1, m2) = (multipliers[&l1], multipliers[&l2]);
            let first_difference =
                (0..horizon).find(|&n| s_phi(m1 * n) % 2 != s_phi(m2 * n) % 2);
            pairs.push(KernelPair {
                lambda1: l1,
                lambda2: l2,
                first_difference,
            });
        }
    }
    Ok(KernelReport { k, horizon, pairs })
}

/// Number of distinct length-`len` factors of `seq`.
pub fn count_distinct_factors(seq: &[u8], len: usize) -> usize {
    if len == 0 {
        return 1;
    }
    seq.windows(len).collect::<HashSet<_>>().len()
}

/// Symbols reachable from `seed`.
pub fn reachable<S: Ord + Copy + Debug>(m: &Morphism<S>, seed: S) -> BTreeSet<S> {
    let mut seen = BTreeSet::from([seed]);
    let mut stack = vec![seed];
    while let Some(s) = stack.pop() {
        for t in m.image(&s).unwrap_or(&[]) {
            if seen.insert(*t) {
                stack.push(*t);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_system_prefix() {
        let (m, _, seed) = zeck_parity_system();
        let first: String = fixed_point_stream(&m, seed).unwrap().take(6).collect();
        assert_eq!(first, "abccdc");
        let bits: Vec<u8> = parity_stream().take(16).collect();
        assert_eq!(&bits[..8], &[0, 1, 1, 1, 0, 1, 0, 0]);
        assert_eq!(&bits[8..], &[1, 0, 0, 0, 1, 1, 0, 0]);
    }

    #[test]
    fn doubling_morphism_is_constant() {
        let m = Morphism::new([('x', vec!['x', 'x'])]).unwrap();
        assert!(fixed_point_stream(&m, 'x').unwrap().take(1000).all(|s| s == 'x'));
    }

    #[test]
    fn constant_coding() {
        let (m, _, seed) = zeck_parity_system();
        let c = Coding::constant(['a', 'b', 'c', 'd'], 1);
        assert!(coded_stream(&m, &c, seed).unwrap().take(500).all(|x| x == 1));
    }

    #[test]
    fn fibonacci_prefix() {
        let bits: Vec<u8> = fibonacci_word_stream().take(6).collect();
        assert_eq!(bits, vec![0, 1, 0, 0, 1, 0]);
        assert_eq!(fibonacci_word(1).unwrap(), 0);
        assert_eq!(fibonacci_word(2).unwrap(), 1);
        assert_eq!(fibonacci_word(6).unwrap(), 0);
        assert!(fibonacci_word(0).is_err());
    }

    #[test]
    fn validation() {
        assert!(Morphism::new([('a', vec![])]).is_err());
        assert!(Morphism::new([('a', vec!['a', 'z'])]).is_err());
        let m = Morphism::new([('a', vec!['b']), ('b', vec!['a', 'b'])]).unwrap();
        assert!(fixed_point_stream(&m, 'a').is_err());
        assert!(fixed_point_stream(&m, 'q').is_err());
        let id = Morphism::new([('a', vec!['a'])]).unwrap();
        assert!(fixed_point_stream(&id, 'a').is_err());
        let partial = Coding::new([('a', 0)]);
        let (m, _, seed) = zeck_parity_system();
        assert!(coded_stream(&m, &partial, seed).is_err());
        assert_eq!(reachable(&m, 'a').len(), 4);
    }

    #[test]
    fn kernel_examples() {
        let r = kkernel_distinctness(2, &[0, 1], 100).unwrap();
        let d = r.pairs[0].first_difference.unwrap();
        assert!(d <= 100);
        assert!(s_phi(d) % 2 != s_phi(2 * d) % 2);
        let same = kkernel_distinctness(2, &[1, 1], 100).unwrap();
        assert_eq!(same.pairs[0].first_difference, None);
        assert!(kkernel_distinctness(3, &[0, 1], 100).unwrap().all_distinct());
        assert!(matches!(
            kkernel_distinctness(10, &[0, 19], 1000),
            Err(crate::Error::Capacity(_))
        ));
    }
}
