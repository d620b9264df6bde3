//! `f(n) = s_φ(pn) + s_φ(qn)` and checks of its quasi-additivity.
//!
//! A digit function `g` is quasi-additive at radius `r` when
//! `g(n1 + n2) = g(n1) + g(n2)` for every pair `r`-separated at some
//! position, and `g(S(n)) = g(n)` whenever `v(n, r) = 0`. The checks below
//! return violations as data; an empty list means the identities held on
//! every tested instance.

use serde::Serialize;

use crate::error::{capacity, domain, invalid, Result};
use crate::golden::GoldenNum;
use crate::zeck::{
    digit_blocks, digits, digits_value, is_indecomposable, s_phi, shift_s, v, zeck_encode, Digits,
};

/// Multipliers `q > p ≥ 2`, separation radius `r`, and modulus `m ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PqSpec {
    pub p: u64,
    pub q: u64,
    pub r: u32,
    pub m: u32,
}

impl PqSpec {
    pub fn new(p: u64, q: u64, r: u32, m: u32) -> Result<Self> {
        if p < 2 {
            return Err(invalid(format!("p = {p} must be ≥ 2")));
        }
        if q <= p {
            return Err(invalid(format!("q = {q} must exceed p = {p}")));
        }
        if m < 2 {
            return Err(invalid(format!("modulus m = {m} must be ≥ 2")));
        }
        Ok(PqSpec { p, q, r, m })
    }

    /// Spec at the analytic radius for `q`, with `m = 2`.
    pub fn at_analytic_radius(p: u64, q: u64) -> Result<Self> {
        PqSpec::new(p, q, analytic_radius(q)?, 2)
    }

    pub fn with_r(self, r: u32) -> Self {
        PqSpec { r, ..self }
    }

    pub fn with_m(self, m: u32) -> Result<Self> {
        PqSpec::new(self.p, self.q, self.r, m)
    }

    /// `f(n)`.
    pub fn f(&self, n: u64) -> Result<u32> {
        f_value(n, self)
    }
}

/// `f(n) = s_φ(pn) + s_φ(qn)`.
pub fn f_value(n: u64, spec: &PqSpec) -> Result<u32> {
    let qn = spec
        .q
        .checked_mul(n)
        .ok_or_else(|| capacity(format!("{} · {n} overflows u64", spec.q)))?;
    Ok(s_phi(spec.p * n) + s_phi(qn))
}

/// Smallest `r ≥ 0` with `φ^{r-3} > q`, decided exactly in `Z[φ]`.
pub fn analytic_radius(q: u64) -> Result<u32> {
    let target = GoldenNum::integer(q as i64)?;
    for r in 0u32..90 {
        if GoldenNum::phi_pow(r as i32 - 3)? > target {
            return Ok(r);
        }
    }
    Err(capacity(format!("no radius below 90 for q = {q}")))
}

/// `f(n1 + n2) ≠ f(n1) + f(n2)` for an `r`-separated pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationViolation {
    pub n1: u64,
    pub n2: u64,
    /// A position at which the pair is `r`-separated.
    pub k: u32,
    pub f_sum: u32,
    pub f_parts: u32,
}

/// `f(S(n)) ≠ f(n)` although `v(n, r) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftViolation {
    pub n: u64,
    pub f_n: u32,
    pub f_shifted: u32,
}

/// All `r`-separated pairs `(n1, n2)`, both nonzero, with `n1 + n2 < bound`.
///
/// Such a pair's digits are disjoint blocks with a gap of at least `2r + 1`
/// zeros, so each pair arises exactly once by cutting some `n < bound` at one
/// of its wide gaps. Pairs with a zero member are trivial and skipped.
pub fn separated_pairs(r: u32, bound: u64) -> impl Iterator<Item = (u64, u64, u32)> {
    (1..bound).flat_map(move |n| {
        let blocks = digit_blocks(digits(n), r);
        let mut low: Digits = 0;
        let mut cuts = Vec::with_capacity(blocks.len().saturating_sub(1));
        for b in &blocks[..blocks.len() - 1] {
            low |= b;
            let n1 = digits_value(low).expect("sub-mask");
            let top = 127 - low.leading_zeros();
            cuts.push((n1, n - n1, top + r + 1));
        }
        cuts
    })
}

pub fn check_separated_additivity_with<F>(f: F, r: u32, bound: u64) -> Result<Vec<SeparationViolation>>
where
    F: Fn(u64) -> Result<u32>,
{
    let mut out = Vec::new();
    for (n1, n2, k) in separated_pairs(r, bound) {
        let f_sum = f(n1 + n2)?;
        let f_parts = f(n1)? + f(n2)?;
        if f_sum != f_parts {
            out.push(SeparationViolation {
                n1,
                n2,
                k,
                f_sum,
                f_parts,
            });
        }
    }
    Ok(out)
}

pub fn check_shift_compatibility_with<F>(f: F, r: u32, bound: u64) -> Result<Vec<ShiftViolation>>
where
    F: Fn(u64) -> Result<u32>,
{
    let mut out = Vec::new();
    for n in 1..bound {
        if v(n, r) != 0 {
            continue;
        }
        let f_n = f(n)?;
        let f_shifted = f(shift_s(n)?)?;
        if f_n != f_shifted {
            out.push(ShiftViolation { n, f_n, f_shifted });
        }
    }
    Ok(out)
}

/// Separated pairs with sum `< bound` violating additivity at `spec.r`.
pub fn check_separated_additivity(spec: &PqSpec, bound: u64) -> Result<Vec<SeparationViolation>> {
    check_separated_additivity_with(|n| f_value(n, spec), spec.r, bound)
}

/// `n < bound` with `v(n, r) = 0` and `f(S(n)) ≠ f(n)`.
pub fn check_shift_compatibility(spec: &PqSpec, bound: u64) -> Result<Vec<ShiftViolation>> {
    check_shift_compatibility_with(|n| f_value(n, spec), spec.r, bound)
}

/// Outcome of the empirical radius search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RadiusSearch {
    /// Smallest `r ≤ r_max` passing both checks below `bound`.
    pub empirical: Option<u32>,
    /// Smallest `r` with `φ^{r-3} > q`, when a multiplier is known.
    pub analytic: Option<u32>,
    pub bound: u64,
    pub r_max: u32,
}

/// Smallest radius at which a digit function passes both quasi-additivity
/// checks below `bound`. Both checks only get weaker as `r` grows, so the
/// first passing radius is the least one.
pub fn min_quasi_additive_radius_with<F>(f: F, bound: u64, r_max: u32) -> Result<Option<u32>>
where
    F: Fn(u64) -> Result<u32> + Copy,
{
    for r in 0..=r_max {
        if check_separated_additivity_with(f, r, bound)?.is_empty()
            && check_shift_compatibility_with(f, r, bound)?.is_empty()
        {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Empirical and analytic radii for `f(n) = s_φ(pn) + s_φ(qn)`; `spec.r` is
/// ignored.
pub fn min_quasi_additive_radius(spec: &PqSpec, bound: u64, r_max: u32) -> Result<RadiusSearch> {
    let spec = *spec;
    let empirical = min_quasi_additive_radius_with(move |n| f_value(n, &spec), bound, r_max)?;
    Ok(RadiusSearch {
        empirical,
        analytic: Some(analytic_radius(spec.q)?),
        bound,
        r_max,
    })
}

/// Lowest nonzero digit position of `n`, i.e. `max{ℓ : v(n, ℓ) = 0}`.
pub fn lowest_digit(n: u64) -> Option<u32> {
    (n != 0).then(|| digits(n).trailing_zeros())
}

/// Violation of `max{ℓ : v(qn,ℓ)=0} ≤ max{ℓ : v(pn,ℓ)=0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominationViolation {
    pub n: u64,
    pub low_pn: u32,
    pub low_qn: u32,
}

/// Every `n < bound` with `v(n, k) = 0` whose multiple `qn` has strictly
/// more trailing zero digits than `pn`. Requires `φ^{k-1} > 2q`.
pub fn check_low_digit_domination(spec: &PqSpec, k: u32, bound: u64) -> Result<Vec<DominationViolation>> {
    let two_q = GoldenNum::integer(2 * spec.q as i64)?;
    if GoldenNum::phi_pow(k as i32 - 1)? <= two_q {
        return Err(domain(format!(
            "hypothesis φ^(k-1) > 2q fails for k = {k}, q = {}",
            spec.q
        )));
    }
    spec.q
        .checked_mul(bound)
        .ok_or_else(|| capacity("q · bound overflows u64"))?;
    let mut out = Vec::new();
    for n in 1..bound {
        if v(n, k) != 0 {
            continue;
        }
        let low_pn = lowest_digit(spec.p * n).expect("n > 0");
        let low_qn = lowest_digit(spec.q * n).expect("n > 0");
        if low_qn > low_pn {
            out.push(DominationViolation { n, low_pn, low_qn });
        }
    }
    Ok(out)
}

/// A certified witness for the parity search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: u64,
    pub pn: u64,
    pub qn: u64,
    pub s_pn: u32,
    pub s_qn: u32,
    pub digits_n: Vec<u32>,
    pub digits_pn: Vec<u32>,
    pub digits_qn: Vec<u32>,
}

impl Witness {
    fn build(n: u64, spec: &PqSpec) -> Witness {
        let (pn, qn) = (spec.p * n, spec.q * n);
        Witness {
            n,
            pn,
            qn,
            s_pn: s_phi(pn),
            s_qn: s_phi(qn),
            digits_n: zeck_encode(n).indices().to_vec(),
            digits_pn: zeck_encode(pn).indices().to_vec(),
            digits_qn: zeck_encode(qn).indices().to_vec(),
        }
    }

    /// `s_φ(qn) ≡ s_φ(pn) (mod m)`.
    pub fn is_congruent(&self, m: u32) -> bool {
        self.s_pn % m == self.s_qn % m
    }

    /// Recomputes every recorded quantity and the structural conditions.
    pub fn verify(&self, spec: &PqSpec, require_b: bool) -> bool {
        let fresh = Witness::build(self.n, spec);
        let digits_ok = [
            (&self.digits_n, self.n),
            (&self.digits_pn, self.pn),
            (&self.digits_qn, self.qn),
        ]
        .iter()
        .all(|(d, val)| crate::zeck::zeck_decode(d).ok() == Some(*val));
        fresh == *self && digits_ok && satisfies_structure(self.n, spec.r, require_b)
    }
}

/// Result of [`find_parity_witnesses`]; missing entries mean the search
/// failed below the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessSearch {
    pub spec: PqSpec,
    pub horizon: u64,
    pub require_b: bool,
    /// `s_φ(qn') ≡ s_φ(pn') (mod m)`.
    pub congruent: Option<Witness>,
    /// `s_φ(qn'') ≢ s_φ(pn'') (mod m)`.
    pub incongruent: Option<Witness>,
}

impl WitnessSearch {
    pub fn is_complete(&self) -> bool {
        self.congruent.is_some() && self.incongruent.is_some()
    }

    pub fn verify(&self) -> bool {
        let m = self.spec.m;
        let ok = |w: &Option<Witness>, congruent: bool| match w {
            Some(w) => w.verify(&self.spec, self.require_b) && w.is_congruent(m) == congruent,
            None => false,
        };
        ok(&self.congruent, true) && ok(&self.incongruent, false)
    }
}

/// `v(n, r) = 0`, indecomposable at `r`, and optionally `v(n, r+1) = F_r`.
fn satisfies_structure(n: u64, r: u32, require_b: bool) -> bool {
    if n == 0 || v(n, r) != 0 || !is_indecomposable(n, r) {
        return false;
    }
    !require_b || (r >= 2 && r as usize <= crate::fib::MAX_FIB_INDEX && v(n, r + 1) == crate::fib::FIB[r as usize])
}

/// Scans `1 ≤ n < horizon` for the least `n'` with `s_φ(qn') ≡ s_φ(pn')` and
/// the least `n''` with `s_φ(qn'') ≢ s_φ(pn'')` modulo `m`, among `n` with
/// `v(n, r) = 0` that admit no `r`-separated split. With `require_b`, also
/// demands the lowest digit to sit exactly at position `r`.
pub fn find_parity_witnesses(spec: &PqSpec, horizon: u64, require_b: bool) -> Result<WitnessSearch> {
    if require_b && spec.r < 2 {
        return Err(domain("membership in B needs r ≥ 2"));
    }
    spec.q
        .checked_mul(horizon)
        .ok_or_else(|| capacity("q · horizon overflows u64"))?;
    let mut search = WitnessSearch {
        spec: *spec,
        horizon,
        require_b,
        congruent: None,
        incongruent: None,
    };
    for n in 1..horizon {
        if !satisfies_structure(n, spec.r, require_b) {
            continue;
        }
        let w = Witness::build(n, spec);
        let slot = if w.is_congruent(spec.m) {
            &mut search.congruent
        } else {
            &mut search.incongruent
        };
        if slot.is_none() {
            *slot = Some(w);
        }
        if search.is_complete() {
            break;
        }
    }
    Ok(search)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec23(r: u32) -> PqSpec {
        PqSpec::new(2, 3, r, 2).unwrap()
    }

    #[test]
    fn f_examples() {
        let s = spec23(6);
        assert_eq!(f_value(0, &s).unwrap(), 0);
        assert_eq!(f_value(1, &s).unwrap(), 2);
        assert_eq!(f_value(6, &s).unwrap(), 5);
        assert!(matches!(f_value(u64::MAX / 2, &s), Err(crate::Error::Capacity(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(PqSpec::new(2, 2, 0, 2).is_err());
        assert!(PqSpec::new(1, 3, 0, 2).is_err());
        assert!(PqSpec::new(2, 3, 0, 1).is_err());
    }

    #[test]
    fn analytic_radii() {
        assert_eq!(analytic_radius(3).unwrap(), 6);
        assert_eq!(analytic_radius(2).unwrap(), 5);
        assert_eq!(analytic_radius(5).unwrap(), 7);
        assert_eq!(analytic_radius(1).unwrap(), 4);
    }

    #[test]
    fn s_phi_itself_is_zero_quasi_additive() {
        let r = min_quasi_additive_radius_with(|n| Ok(2 * s_phi(n)), 3000, 4).unwrap();
        assert_eq!(r, Some(0));
    }

    #[test]
    fn separated_pairs_are_separated() {
        use crate::zeck::{is_r_separated, SeparationSpec};
        for (n1, n2, k) in separated_pairs(1, 2000) {
            assert!(is_r_separated(n1, n2, SeparationSpec::new(1, k).unwrap()));
        }
        // brute force count of 1-separated pairs for small sums
        let mut brute = 0;
        for n in 1..300u64 {
            for n1 in 1..n {
                let n2 = n - n1;
                if (2..40).any(|k| is_r_separated(n1, n2, SeparationSpec::new(1, k).unwrap())) {
                    brute += 1;
                }
            }
        }
        assert_eq!(separated_pairs(1, 300).count(), brute);
    }

    #[test]
    fn small_radius_fails_large_radius_passes() {
        assert!(!check_separated_additivity(&spec23(0), 10_000).unwrap().is_empty());
        assert!(check_separated_additivity(&spec23(6), 10_000).unwrap().is_empty());
        assert!(check_shift_compatibility(&spec23(6), 10_000).unwrap().is_empty());
        let radius = min_quasi_additive_radius(&spec23(0), 10_000, 8).unwrap();
        assert!(radius.empirical.unwrap() <= 6);
        assert_eq!(radius.analytic, Some(6));
    }

    #[test]
    fn domination() {
        assert!(check_low_digit_domination(&spec23(0), 5, 10_000).unwrap().is_empty());
        assert!(matches!(
            check_low_digit_domination(&spec23(0), 3, 100),
            Err(crate::Error::Domain(_))
        ));
        // φ^3 ≈ 4.236 < 6
        assert!(check_low_digit_domination(&spec23(0), 4, 100).is_err());
    }

    #[test]
    fn unconstrained_parity_probe() {
        let s = spec23(0);
        assert_eq!(f_value(6, &s).unwrap() % 2, 1);
        assert_eq!(f_value(1, &s).unwrap() % 2, 0);
    }

    #[test]
    fn witnesses_found_and_verified() {
        let s = spec23(6);
        let w = find_parity_witnesses(&s, 1_000_000, false).unwrap();
        assert!(w.is_complete());
        assert!(w.verify());
        let wb = find_parity_witnesses(&s, 1_000_000, true).unwrap();
        assert!(wb.verify());
        assert!(find_parity_witnesses(&spec23(1), 100, true).is_err());
    }
}
