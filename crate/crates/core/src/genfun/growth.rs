use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Result};

/// Rational enclosure `[lo, hi]` of `φ_r`, the root in `(1, φ)` of
/// `P(x) = x^{2r+2} - x^{2r+1} - x^{2r} + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiR {
    pub r: u32,
    pub lo: BigRational,
    pub hi: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `P(x) = x^{2r+2} - x^{2r+1} - x^{2r} + 1`.
pub(crate) fn defining_poly(r: u32, x: &BigRational) -> BigRational {
    let x2r = num_traits::pow(x.clone(), 2 * r as usize);
    let x2r1 = &x2r * x;
    let x2r2 = &x2r1 * x;
    x2r2 - x2r1 - x2r + BigRational::one()
}

/// `P(x) / (x - 1) = x^{2r+1} - Σ_{j<2r} x^j`, which has a single sign
/// change on `[1, ∞)`.
fn reduced_poly(r: u32, x: &BigRational) -> BigRational {
    let mut sum = BigRational::zero();
    let mut pw = BigRational::one();
    for _ in 0..2 * r {
        sum += &pw;
        pw *= x;
    }
    // pw = x^{2r}
    pw * x - sum
}

/// `x < φ` for rational `x`, exactly: `2x - 1 < √5`.
fn below_phi(x: &BigRational) -> bool {
    let t = x * rat(2, 1) - BigRational::one();
    !t.is_positive() || &t * &t < rat(5, 1)
}

impl PhiR {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN)
    }

    pub fn midpoint(&self) -> f64 {
        ((&self.lo + &self.hi) / rat(2, 1)).to_f64().unwrap_or(f64::NAN)
    }

    /// `P(lo) · P(hi) < 0` and `1 < lo < hi < φ`.
    pub fn is_certified(&self) -> bool {
        let sign_change = (defining_poly(self.r, &self.lo) * defining_poly(self.r, &self.hi)).is_negative();
        sign_change && self.lo > BigRational::one() && self.lo < self.hi && below_phi(&self.hi)
    }
}

/// Bisection with exact rational endpoints until `hi - lo ≤ tol` and the
/// enclosure sits strictly inside `(1, φ)`.
pub fn phi_r_root(r: u32, tol: &BigRational) -> Result<PhiR> {
    if r < 2 {
        return Err(domain(format!("φ_r needs r ≥ 2, got {r}")));
    }
    if !tol.is_positive() {
        return Err(domain("tolerance must be positive"));
    }
    let mut lo = BigRational::one();
    let mut hi = rat(81, 50); // just above φ; reduced_poly(hi) > 0
    let two = rat(2, 1);
    while &(&hi - &lo) > tol || lo == BigRational::one() || !below_phi(&hi) {
        let mid = (&lo + &hi) / &two;
        if reduced_poly(r, &mid).is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(PhiR { r, lo, hi })
}

/// One row of [`CountGrowth`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRow {
    pub k: u32,
    /// `#{n ∈ B' : ℓ(n) = k}` from the digit-string automaton.
    pub bprime: u128,
    /// `#{n ∈ B : ℓ(n) = k}`.
    pub b: u128,
    /// Coefficient of `x^k` in `x^3 / ((1 - x)(1 - x^2 - … - x^{2r+1}))`.
    pub closed_form: u128,
    /// `c_k / c_{k-1}`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountGrowth {
    pub r: u32,
    pub phi_r: f64,
    /// `max_{k ≤ 30} c_k / φ_r^k`.
    pub constant: f64,
    pub rows: Vec<CountRow>,
    /// `c_k ≤ C φ_r^k` for every listed `k`, up to float rounding.
    pub bound_holds: bool,
    pub closed_form_matches: bool,
}

impl CountGrowth {
    pub fn row(&self, k: u32) -> Option<&CountRow> {
        self.rows.iter().find(|row| row.k == k)
    }
}

/// Fit index for the growth constant.
pub const GROWTH_FIT_INDEX: u32 = 30;

/// Counts of `B'` and `B` per length `k ≤ k_max` without enumeration.
///
/// A member of `B'` with `ℓ(n) = k` is a digit string on positions
/// `k-1, …, 2` that starts with a one, has between 1 and `2r` zeros between
/// consecutive ones, and ends in arbitrarily many zeros. Members of `B`
/// additionally have their last one at position `r`.
pub fn check_count_growth(r: u32, k_max: u32) -> Result<CountGrowth> {
    if r < 2 {
        return Err(domain(format!("count growth needs r ≥ 2, got {r}")));
    }
    if !(3..=120).contains(&k_max) {
        return Err(domain(format!("k_max = {k_max} must lie in 3..=120")));
    }
    let gap = 2 * r as usize;
    // state z ≤ 2r: zeros since the last one; 2r + 1: too many, no more ones
    let dead = gap + 1;
    let mut dist = vec![0u128; dead + 1];
    dist[0] = 1; // the leading one
    // by_len[len] = distribution after `len` symbols
    let mut by_len = vec![Vec::new(), dist.clone()];
    for _ in 2..=k_max as usize {
        let mut next = vec![0u128; dead + 1];
        for (z, &c) in dist.iter().enumerate() {
            if c == 0 {
                continue;
            }
            next[(z + 1).min(dead)] += c;
            if (1..=gap).contains(&z) {
                next[0] += c;
            }
        }
        dist = next;
        by_len.push(dist.clone());
    }

    // closed form: x^3 / ((1 - x) (1 - Σ_{j=2}^{2r+1} x^j))
    let n = k_max as usize + 1;
    let mut g = vec![0u128; n];
    g[0] = 1;
    for i in 1..n {
        g[i] = (2..=gap + 1).filter(|&j| j <= i).map(|j| g[i - j]).sum();
    }
    let mut closed = vec![0u128; n];
    let mut running = 0u128;
    for i in 0..n {
        running += g[i];
        if i + 3 < n {
            closed[i + 3] = running;
        }
    }

    let enclosure = phi_r_root(r, &rat(1, 1_000_000_000_000))?;
    let phi_r = enclosure.midpoint();
    let mut rows: Vec<CountRow> = Vec::new();
    for k in 3..=k_max {
        let len = k as usize - 2;
        let bprime: u128 = by_len[len].iter().sum();
        let b = if k > r { by_len[(k - r) as usize][0] } else { 0 };
        let ratio = rows
            .last()
            .filter(|prev| prev.bprime > 0)
            .map(|prev| bprime as f64 / prev.bprime as f64);
        rows.push(CountRow {
            k,
            bprime,
            b,
            closed_form: closed[k as usize],
            ratio,
        });
    }
    let constant = rows
        .iter()
        .filter(|row| row.k <= GROWTH_FIT_INDEX)
        .map(|row| row.bprime as f64 / phi_r.powi(row.k as i32))
        .fold(0.0, f64::max);
    let bound_holds = rows
        .iter()
        .all(|row| row.bprime as f64 <= constant * phi_r.powi(row.k as i32) * (1.0 + 1e-12));
    let closed_form_matches = rows.iter().all(|row| row.bprime == row.closed_form);
    Ok(CountGrowth {
        r,
        phi_r,
        constant,
        rows,
        bound_holds,
        closed_form_matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fib::FIB;
    use crate::genfun::{enumerate_b, enumerate_bprime};

    fn tol9() -> BigRational {
        rat(1, 1_000_000_000)
    }

    #[test]
    fn phi_2_bracket() {
        let p = phi_r_root(2, &rat(1, 1_000_000)).unwrap();
        assert!(p.is_certified());
        assert!(p.lo_f64() > 1.53 && p.hi_f64() < 1.54);
        assert!(p.width() <= rat(1, 1_000_000));
    }

    #[test]
    fn phi_r_increases_and_stays_below_phi() {
        let roots: Vec<PhiR> = (2..=8).map(|r| phi_r_root(r, &tol9()).unwrap()).collect();
        for w in roots.windows(2) {
            assert!(w[0].hi < w[1].lo);
        }
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(roots.iter().all(|p| p.is_certified() && p.hi_f64() < phi));
    }

    #[test]
    fn phi_r_rejects_bad_input() {
        assert!(phi_r_root(1, &tol9()).is_err());
        assert!(phi_r_root(2, &BigRational::zero()).is_err());
    }

    #[test]
    fn counts_match_enumeration() {
        for r in 2..=3 {
            let g = check_count_growth(r, 20).unwrap();
            assert!(g.closed_form_matches);
            for row in &g.rows {
                assert_eq!(row.bprime, enumerate_bprime(r, row.k).unwrap().len() as u128);
                assert_eq!(row.b, enumerate_b(r, row.k).unwrap().len() as u128);
            }
        }
    }

    #[test]
    fn huge_radius_counts_every_block() {
        let g = check_count_growth(20, 30).unwrap();
        for row in &g.rows {
            assert_eq!(row.bprime, FIB[row.k as usize - 2] as u128);
        }
    }

    #[test]
    fn ratio_converges_to_phi_2() {
        let g = check_count_growth(2, 60).unwrap();
        let ratio = g.row(40).unwrap().ratio.unwrap();
        assert!((ratio - g.phi_r).abs() <= 0.02);
        assert!(g.bound_holds);
    }
}
