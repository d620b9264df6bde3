use rayon::prelude::*;
use serde::Serialize;

use super::sets::{in_b, in_bprime, n_l, LSet};
use crate::error::{capacity, domain, Result};
use crate::fib::FIB;
use crate::quasi::{f_value, PqSpec};

/// Largest truncation order: every `n < F_32` is enumerated.
pub const MAX_SERIES_ORDER: usize = 32;

/// `Σ_{k ≤ K} x^k P_k(z)` with integer polynomials `P_k`; `coeffs[k][e]` is
/// the coefficient of `x^k z^e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncatedSeries {
    order: usize,
    coeffs: Vec<Vec<i64>>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            order,
            coeffs: vec![Vec::new(); order + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficients of `z^0, z^1, …` in `[x^k]`.
    pub fn coeff(&self, k: usize) -> &[i64] {
        &self.coeffs[k]
    }

    fn add_term(&mut self, k: usize, exponent: u32, c: i64) {
        let poly = &mut self.coeffs[k];
        let e = exponent as usize;
        if poly.len() <= e {
            poly.resize(e + 1, 0);
        }
        poly[e] += c;
    }

    /// `[x^k]` evaluated at `z`.
    pub fn eval_coeff(&self, k: usize, z: i64) -> i128 {
        self.coeffs[k]
            .iter()
            .rev()
            .fold(0i128, |acc, &c| acc * z as i128 + c as i128)
    }

    /// The univariate series in `x` obtained by fixing `z`.
    pub fn eval_z(&self, z: i64) -> Vec<i128> {
        (0..=self.order).map(|k| self.eval_coeff(k, z)).collect()
    }

    /// One `k,exponent,coefficient` line per nonzero coefficient.
    pub fn dump(&self) -> String {
        let mut out = String::from("k,exponent,coefficient\n");
        for (k, poly) in self.coeffs.iter().enumerate() {
            for (e, &c) in poly.iter().enumerate() {
                if c != 0 {
                    out.push_str(&format!("{k},{e},{c}\n"));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesKind {
    B,
    BPrime,
    BL,
    BLPrime,
    HL,
}

/// `B`, `B'`, `B_L`, `B_L'` and `H_L` built from one pass over `n < F_K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesBundle {
    pub b: TruncatedSeries,
    pub bprime: TruncatedSeries,
    pub bl: TruncatedSeries,
    pub blprime: TruncatedSeries,
    pub hl: TruncatedSeries,
}

#[derive(Default)]
struct BlockTerms {
    b: Vec<u32>,
    bprime: Vec<u32>,
    bl: Vec<u32>,
    blprime: Vec<u32>,
    hl: Vec<u32>,
}

impl SeriesBundle {
    pub fn build(spec: &PqSpec, l: &LSet, order: usize) -> Result<Self> {
        if order > MAX_SERIES_ORDER {
            return Err(capacity(format!(
                "truncation order {order} exceeds {MAX_SERIES_ORDER}"
            )));
        }
        let r = spec.r;
        let blocks: Vec<(usize, BlockTerms)> = (3..=order)
            .into_par_iter()
            .map(|k| {
                let offset = n_l(l, k as u32)?;
                let mut t = BlockTerms::default();
                for n in FIB[k - 1]..FIB[k] {
                    let shifted = n
                        .checked_add(offset)
                        .ok_or_else(|| capacity("n + N_L(k) overflows u64"))?;
                    let f_off = f_value(shifted, spec)?;
                    t.hl.push(f_off);
                    if in_bprime(n, r) {
                        let f_n = f_value(n, spec)?;
                        t.bprime.push(f_n);
                        t.blprime.push(f_off);
                        if in_b(n, r) {
                            t.b.push(f_n);
                            t.bl.push(f_off);
                        }
                    }
                }
                Ok((k, t))
            })
            .collect::<Result<_>>()?;
        let mut bundle = SeriesBundle {
            b: TruncatedSeries::zero(order),
            bprime: TruncatedSeries::zero(order),
            bl: TruncatedSeries::zero(order),
            blprime: TruncatedSeries::zero(order),
            hl: TruncatedSeries::zero(order),
        };
        for (k, t) in blocks {
            for (series, exps) in [
                (&mut bundle.b, &t.b),
                (&mut bundle.bprime, &t.bprime),
                (&mut bundle.bl, &t.bl),
                (&mut bundle.blprime, &t.blprime),
                (&mut bundle.hl, &t.hl),
            ] {
                for &e in exps {
                    series.add_term(k, e, 1);
                }
            }
        }
        Ok(bundle)
    }

    pub fn get(&self, kind: SeriesKind) -> &TruncatedSeries {
        match kind {
            SeriesKind::B => &self.b,
            SeriesKind::BPrime => &self.bprime,
            SeriesKind::BL => &self.bl,
            SeriesKind::BLPrime => &self.blprime,
            SeriesKind::HL => &self.hl,
        }
    }
}

/// `B(x,z) = Σ_{n∈B} x^{ℓ(n)} z^{f(n)}`.
pub fn series_b(spec: &PqSpec, order: usize) -> Result<TruncatedSeries> {
    Ok(SeriesBundle::build(spec, &LSet::empty(), order)?.b)
}

/// `B'(x,z) = Σ_{n∈B'} x^{ℓ(n)} z^{f(n)}`.
pub fn series_bprime(spec: &PqSpec, order: usize) -> Result<TruncatedSeries> {
    Ok(SeriesBundle::build(spec, &LSet::empty(), order)?.bprime)
}

/// `B_L(x,z) = Σ_{n∈B} x^{ℓ(n)} z^{f(n + N_L(ℓ(n)))}`.
pub fn series_bl(spec: &PqSpec, l: &LSet, order: usize) -> Result<TruncatedSeries> {
    Ok(SeriesBundle::build(spec, l, order)?.bl)
}

/// `B_L'`, the analogue of `B_L` over `B'`.
pub fn series_blprime(spec: &PqSpec, l: &LSet, order: usize) -> Result<TruncatedSeries> {
    Ok(SeriesBundle::build(spec, l, order)?.blprime)
}

/// `H_L(x,z) = Σ_{k≥3} x^k Σ_{F_{k-1} ≤ n < F_k} z^{f(n + N_L(k))}`, summed
/// block by block.
pub fn series_hl_direct(spec: &PqSpec, l: &LSet, order: usize) -> Result<TruncatedSeries> {
    Ok(SeriesBundle::build(spec, l, order)?.hl)
}

fn mul_trunc(a: &[i128], b: &[i128], order: usize) -> Vec<i128> {
    let mut c = vec![0i128; order + 1];
    for (i, &x) in a.iter().enumerate().take(order + 1) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(order + 1 - i) {
            c[i + j] += x * y;
        }
    }
    c
}

fn shift_up(a: &[i128], by: usize, order: usize) -> Vec<i128> {
    let mut c = vec![0i128; order + 1];
    for (i, &x) in a.iter().enumerate() {
        if i + by <= order {
            c[i + by] = x;
        }
    }
    c
}

/// Both sides of the `H_L` decomposition at a fixed `z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub order: usize,
    pub z: i64,
    pub r: u32,
    pub lhs: Vec<i128>,
    pub rhs: Vec<i128>,
    /// `max_k |lhs_k - rhs_k|`.
    pub discrepancy: u128,
}

/// Compares the directly summed `H_L(x, z)` with
/// `B_L'(x,z) + x^{r+1} B'(x,z) B_L(x,z) / (1 - x - x^{r+1} B(x,z))`
/// coefficient by coefficient up to `x^K`.
///
/// The right-hand side counts every `n` by its block decomposition: a first
/// block from `B'`, then blocks from `B` each preceded by at least `r + 1`
/// extra zeros, the `L` digits riding on the top block. The denominator is
/// expanded as the geometric series in `t = x + x^{r+1}B`, exact because `t`
/// has no constant term.
pub fn verify_hl_identity(spec: &PqSpec, l: &LSet, order: usize, z: i64) -> Result<IdentityCheck> {
    if spec.r < 2 {
        return Err(domain("the decomposition needs r ≥ 2 so that B is defined"));
    }
    if z != 1 && z != -1 {
        return Err(domain(format!("z must be +1 or -1, got {z}")));
    }
    let bundle = SeriesBundle::build(spec, l, order)?;
    let r1 = spec.r as usize + 1;
    let b = bundle.b.eval_z(z);
    let bprime = bundle.bprime.eval_z(z);
    let bl = bundle.bl.eval_z(z);
    let blprime = bundle.blprime.eval_z(z);

    let mut t = shift_up(&b, r1, order);
    if order >= 1 {
        t[1] += 1;
    }
    let mut geometric = vec![0i128; order + 1];
    let mut power = vec![0i128; order + 1];
    power[0] = 1;
    for _ in 0..=order {
        for (g, p) in geometric.iter_mut().zip(&power) {
            *g += p;
        }
        power = mul_trunc(&power, &t, order);
    }
    let numerator = shift_up(&mul_trunc(&bprime, &bl, order), r1, order);
    let tail = mul_trunc(&numerator, &geometric, order);
    let rhs: Vec<i128> = blprime.iter().zip(&tail).map(|(a, b)| a + b).collect();
    let lhs = bundle.hl.eval_z(z);
    let discrepancy = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).unsigned_abs())
        .max()
        .unwrap_or(0);
    Ok(IdentityCheck {
        order,
        z,
        r: spec.r,
        lhs,
        rhs,
        discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasi::analytic_radius;

    fn spec() -> PqSpec {
        PqSpec::new(2, 3, analytic_radius(3).unwrap(), 2).unwrap()
    }

    #[test]
    fn hl_low_coefficients() {
        let h = series_hl_direct(&spec(), &LSet::empty(), 12).unwrap();
        assert_eq!(h.coeff(3), &[0, 0, 1]);
        assert_eq!(h.coeff(4), &[0, 0, 0, 0, 1]);
        for k in 3..=12 {
            assert_eq!(h.eval_coeff(k, 1), FIB[k - 2] as i128);
        }
        assert!(h.coeff(0).is_empty() && h.coeff(2).is_empty());
    }

    #[test]
    fn bprime_x3_coefficient() {
        let s = series_bprime(&spec(), 10).unwrap();
        assert_eq!(s.coeff(3), &[0, 0, 1]);
    }

    #[test]
    fn empty_l_matches_plain_series() {
        let bundle = SeriesBundle::build(&spec(), &LSet::empty(), 16).unwrap();
        assert_eq!(bundle.bl, bundle.b);
        assert_eq!(bundle.blprime, bundle.bprime);
    }

    #[test]
    fn bprime_at_one_counts_members() {
        let s = series_bprime(&spec(), 16).unwrap();
        for k in 3..=16u32 {
            let count = super::super::enumerate_bprime(6, k).unwrap().len() as i128;
            assert_eq!(s.eval_coeff(k as usize, 1), count);
        }
    }

    #[test]
    fn identity_holds_small() {
        let l = LSet::new(vec![2, 5], 6, true).unwrap();
        for z in [1, -1] {
            assert_eq!(verify_hl_identity(&spec(), &l, 16, z).unwrap().discrepancy, 0);
        }
        assert!(verify_hl_identity(&spec().with_r(1), &l, 10, 1).is_err());
        assert!(verify_hl_identity(&spec(), &l, 10, 2).is_err());
    }

    #[test]
    fn numerator_gap_factor_is_needed() {
        // Without the x^{r+1} in the numerator the counts at z = 1 disagree.
        let s = spec();
        let order = 16;
        let bundle = SeriesBundle::build(&s, &LSet::empty(), order).unwrap();
        let (b, bp) = (bundle.b.eval_z(1), bundle.bprime.eval_z(1));
        let mut t = shift_up(&b, s.r as usize + 1, order);
        t[1] += 1;
        let mut geometric = vec![0i128; order + 1];
        let mut power = vec![0i128; order + 1];
        power[0] = 1;
        for _ in 0..=order {
            for (g, p) in geometric.iter_mut().zip(&power) {
                *g += p;
            }
            power = mul_trunc(&power, &t, order);
        }
        let tail = mul_trunc(&mul_trunc(&bp, &b, order), &geometric, order);
        let naive: Vec<i128> = bp.iter().zip(&tail).map(|(a, b)| a + b).collect();
        assert_ne!(naive, bundle.hl.eval_z(1));
    }

    #[test]
    fn dump_format() {
        let h = series_hl_direct(&spec(), &LSet::empty(), 4).unwrap();
        assert_eq!(h.dump(), "k,exponent,coefficient\n3,2,1\n4,4,1\n");
    }

    #[test]
    fn order_limit() {
        assert!(matches!(
            series_b(&spec(), MAX_SERIES_ORDER + 1),
            Err(crate::Error::Capacity(_))
        ));
    }
}
