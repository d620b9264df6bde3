use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::fit::{fit_decay_exponent, DecayFit};
use super::sieve::{MultiplicativeSieve, MultiplicativeSpec};
use crate::error::{capacity, invalid, Result};
use crate::fib::{FIB, MAX_FIB_INDEX};
use crate::genfun::{n_l, LSet};
use crate::morphic::parity_stream;
use crate::quasi::PqSpec;
use crate::zeck::s_phi;

/// Largest horizon accepted by the sums.
pub const MAX_HORIZON: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumOptions {
    pub segment_len: usize,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    /// Random positions at which the morphic parity is compared with `s_φ`.
    pub spot_checks: usize,
    pub seed: u64,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions {
            segment_len: 1 << 16,
            workers: 0,
            spot_checks: 64,
            seed: 0,
        }
    }
}

/// Partial and Fibonacci-block sums of a `±1`/0 sequence over `1 ≤ n < N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub label: String,
    #[serde(rename = "N")]
    pub horizon: u64,
    /// `(c, Σ_{1 ≤ n < c})`.
    pub partial_sums: Vec<(u64, i64)>,
    /// `(k, Σ_{F_{k-1} ≤ n < F_k})` for complete blocks, `k ≥ 3`.
    pub block_sums: Vec<(u32, i64)>,
    /// `None` when too few blocks are nonzero.
    pub fit: Option<DecayFit>,
    pub spot_checks: usize,
    pub spot_check_mismatches: usize,
}

/// Which table of a report to serialise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Partial,
    Blocks,
}

#[derive(Serialize)]
struct CsvRow {
    k_or_checkpoint: u64,
    sum: i64,
    abs_sum: u64,
    normalized: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    #[serde(rename = "N")]
    horizon: u64,
    spec: &'a str,
    fitted_exponent: Option<f64>,
    eta_hat: Option<f64>,
    residual: Option<f64>,
    final_sum: i64,
    normalized: f64,
}

impl CorrelationReport {
    pub fn fitted_exponent(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.slope)
    }

    pub fn eta_hat(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.eta_hat)
    }

    /// `Σ_{1 ≤ n < N}`.
    pub fn total(&self) -> i64 {
        self.partial_sums.last().map_or(0, |p| p.1)
    }

    /// `|Σ_{1 ≤ n < c}| / c` at checkpoint `c`.
    pub fn normalized_at(&self, c: u64) -> Option<f64> {
        self.partial_sums
            .iter()
            .find(|p| p.0 == c)
            .map(|p| p.1.unsigned_abs() as f64 / c as f64)
    }

    pub fn block_sum(&self, k: u32) -> Option<i64> {
        self.block_sums.iter().find(|b| b.0 == k).map(|b| b.1)
    }

    /// Columns `k_or_checkpoint,sum,abs_sum,normalized`; block sums are
    /// normalised by the block length `F_{k-2}`.
    pub fn to_csv(&self, table: Table) -> Result<String> {
        let rows: Vec<CsvRow> = match table {
            Table::Partial => self
                .partial_sums
                .iter()
                .map(|&(c, s)| CsvRow {
                    k_or_checkpoint: c,
                    sum: s,
                    abs_sum: s.unsigned_abs(),
                    normalized: s as f64 / c as f64,
                })
                .collect(),
            Table::Blocks => self
                .block_sums
                .iter()
                .map(|&(k, s)| CsvRow {
                    k_or_checkpoint: k as u64,
                    sum: s,
                    abs_sum: s.unsigned_abs(),
                    normalized: s as f64 / FIB[k as usize - 2] as f64,
                })
                .collect(),
        };
        write_csv(&rows)
    }

    /// `{N, spec, fitted_exponent, eta_hat, residual, …}`.
    pub fn summary_json(&self) -> Result<String> {
        let summary = Summary {
            horizon: self.horizon,
            spec: &self.label,
            fitted_exponent: self.fitted_exponent(),
            eta_hat: self.eta_hat(),
            residual: self.fit.as_ref().map(|f| f.residual),
            final_sum: self.total(),
            normalized: self.total() as f64 / self.horizon.max(1) as f64,
        };
        serde_json::to_string_pretty(&summary).map_err(|e| invalid(e.to_string()))
    }
}

fn write_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| invalid(e.to_string()))
}

/// Running partial and block sums over `n = 1, 2, …`.
struct Accumulator {
    horizon: u64,
    checkpoints: Vec<u64>,
    next_cp: usize,
    partial: Vec<(u64, i64)>,
    running: i64,
    block: usize,
    block_end: u64,
    blocks: Vec<i64>,
    next_n: u64,
}

impl Accumulator {
    fn new(horizon: u64, checkpoints: Vec<u64>) -> Self {
        Accumulator {
            horizon,
            checkpoints,
            next_cp: 0,
            partial: Vec::new(),
            running: 0,
            block: 3,
            block_end: FIB[3],
            blocks: vec![0; MAX_FIB_INDEX + 2],
            next_n: 1,
        }
    }

    fn push(&mut self, value: i8) {
        let n = self.next_n;
        while self.next_cp < self.checkpoints.len() && self.checkpoints[self.next_cp] == n {
            self.partial.push((n, self.running));
            self.next_cp += 1;
        }
        while n >= self.block_end {
            self.block += 1;
            self.block_end = FIB.get(self.block).copied().unwrap_or(u64::MAX);
        }
        self.running += value as i64;
        self.blocks[self.block] += value as i64;
        self.next_n += 1;
    }

    #[allow(clippy::type_complexity)]
    fn finish(mut self) -> (Vec<(u64, i64)>, Vec<(u32, i64)>) {
        debug_assert_eq!(self.next_n, self.horizon.max(1));
        for &c in &self.checkpoints[self.next_cp..] {
            self.partial.push((c, self.running));
        }
        let blocks = (3..=MAX_FIB_INDEX)
            .take_while(|&k| FIB[k] <= self.horizon)
            .map(|k| (k as u32, self.blocks[k]))
            .collect();
        (self.partial, blocks)
    }
}

fn normalize_checkpoints(horizon: u64, checkpoints: &[u64]) -> Result<Vec<u64>> {
    if horizon > MAX_HORIZON {
        return Err(invalid(format!("N = {horizon} exceeds {MAX_HORIZON}")));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("checkpoints must be strictly increasing"));
    }
    if let Some(&c) = checkpoints.iter().find(|&&c| c == 0 || c > horizon) {
        return Err(invalid(format!("checkpoint {c} outside 1..={horizon}")));
    }
    let mut cps = checkpoints.to_vec();
    if cps.last() != Some(&horizon) && horizon > 0 {
        cps.push(horizon);
    }
    Ok(cps)
}

fn pool(workers: usize) -> Result<Option<rayon::ThreadPool>> {
    if workers == 0 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| invalid(e.to_string()))
}

/// Calls `segment(start, len)` for consecutive segments covering
/// `[1, horizon)` in parallel batches, feeding results to `sink` in order.
fn drive<S, K>(horizon: u64, opts: &SumOptions, segment: S, mut sink: K) -> Result<()>
where
    S: Fn(u64, usize) -> Result<Vec<i8>> + Sync,
    K: FnMut(&[i8]),
{
    if opts.segment_len == 0 {
        return Err(invalid("segment length must be positive"));
    }
    let seg = opts.segment_len as u64;
    let starts: Vec<u64> = (0..).map(|i| 1 + i * seg).take_while(|&s| s < horizon).collect();
    let pool = pool(opts.workers)?;
    let batch = rayon::current_num_threads().max(opts.workers).max(1) * 4;
    for chunk in starts.chunks(batch) {
        let run = || -> Result<Vec<Vec<i8>>> {
            chunk
                .par_iter()
                .map(|&s| segment(s, (horizon - s).min(seg) as usize))
                .collect()
        };
        let values = match &pool {
            Some(p) => p.install(run)?,
            None => run()?,
        };
        for v in &values {
            sink(v);
        }
    }
    Ok(())
}

/// Compares the morphic parity with `s_φ(n) mod 2` at `samples` seeded
/// random positions below `horizon`. Returns `(checked, mismatches)`.
pub fn parity_spot_check(horizon: u64, samples: usize, seed: u64) -> (usize, usize) {
    if horizon == 0 || samples == 0 {
        return (0, 0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<u64> = (0..samples).map(|_| rng.gen_range(0..horizon)).collect();
    positions.sort_unstable();
    positions.dedup();
    let mut stream = parity_stream();
    let mut at = 0u64;
    let mut mismatches = 0;
    for &n in &positions {
        let bit = stream.nth((n - at) as usize).expect("infinite stream");
        at = n + 1;
        if bit as u32 != s_phi(n) % 2 {
            mismatches += 1;
        }
    }
    (positions.len(), mismatches)
}

/// `Σ_{1 ≤ n < c} (-1)^{s_φ(n)} m(n)` at each checkpoint `c`, with the
/// parity taken from the substitution stream.
pub fn sum_theorem1(
    m: &MultiplicativeSpec,
    horizon: u64,
    checkpoints: &[u64],
    opts: &SumOptions,
) -> Result<CorrelationReport> {
    let cps = normalize_checkpoints(horizon, checkpoints)?;
    let sieve = MultiplicativeSieve::new(m.clone(), horizon);
    let mut acc = Accumulator::new(horizon, cps);
    let mut parity = parity_stream();
    parity.next(); // n = 0
    drive(
        horizon,
        opts,
        |s, len| sieve.segment(s, len),
        |vals| {
            for &mv in vals {
                let p = parity.next().expect("infinite stream");
                acc.push(if p == 0 { mv } else { -mv });
            }
        },
    )?;
    let (partial_sums, block_sums) = acc.finish();
    let (spot_checks, spot_check_mismatches) = parity_spot_check(horizon, opts.spot_checks, opts.seed);
    Ok(report(m.name(), horizon, partial_sums, block_sums, spot_checks, spot_check_mismatches))
}

fn report(
    label: String,
    horizon: u64,
    partial_sums: Vec<(u64, i64)>,
    block_sums: Vec<(u32, i64)>,
    spot_checks: usize,
    spot_check_mismatches: usize,
) -> CorrelationReport {
    let pts: Vec<(u32, f64)> = block_sums.iter().map(|&(k, s)| (k, s as f64)).collect();
    CorrelationReport {
        label,
        horizon,
        partial_sums,
        block_sums,
        fit: fit_decay_exponent(&pts).ok(),
        spot_checks,
        spot_check_mismatches,
    }
}

fn pq_label(spec: &PqSpec) -> String {
    format!("p={},q={}", spec.p, spec.q)
}

fn sign(f: u32) -> i8 {
    if f.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `Σ_{1 ≤ n < c} (-1)^{s_φ(pn) + s_φ(qn)}` at each checkpoint.
pub fn sum_pq(spec: &PqSpec, horizon: u64, checkpoints: &[u64], opts: &SumOptions) -> Result<CorrelationReport> {
    let cps = normalize_checkpoints(horizon, checkpoints)?;
    spec.q
        .checked_mul(horizon)
        .ok_or_else(|| capacity(format!("{} · {horizon} overflows u64", spec.q)))?;
    let (p, q) = (spec.p, spec.q);
    let mut acc = Accumulator::new(horizon, cps);
    drive(
        horizon,
        opts,
        |s, len| Ok((s..s + len as u64).map(|n| sign(s_phi(p * n) + s_phi(q * n))).collect()),
        |vals| vals.iter().for_each(|&v| acc.push(v)),
    )?;
    let (partial_sums, block_sums) = acc.finish();
    Ok(report(pq_label(spec), horizon, partial_sums, block_sums, 0, 0))
}

/// `(k, Σ_{F_{k-1} ≤ n < F_k} (-1)^{f(n + N_L(k))})` for each `k`.
pub fn sum_with_l_offset(
    spec: &PqSpec,
    l: &LSet,
    ks: std::ops::RangeInclusive<u32>,
) -> Result<Vec<(u32, i64)>> {
    ks.into_par_iter()
        .map(|k| {
            if !(2..=MAX_FIB_INDEX as u32).contains(&k) {
                return Err(capacity(format!("block index {k} outside 2..={MAX_FIB_INDEX}")));
            }
            let offset = n_l(l, k)?;
            let (lo, hi) = (FIB[k as usize - 1], FIB[k as usize]);
            let top = hi - 1 + offset;
            spec.q
                .checked_mul(top)
                .ok_or_else(|| capacity(format!("{} · {top} overflows u64", spec.q)))?;
            let sum = (lo..hi)
                .map(|n| {
                    let m = n + offset;
                    sign(s_phi(spec.p * m) + s_phi(spec.q * m)) as i64
                })
                .sum();
            Ok((k, sum))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::PrimeSigns;
    use crate::error::Error;

    fn small() -> SumOptions {
        SumOptions {
            segment_len: 97,
            workers: 2,
            spot_checks: 16,
            seed: 7,
        }
    }

    fn spec23() -> PqSpec {
        PqSpec::new(2, 3, 6, 2).unwrap()
    }

    #[test]
    fn theorem1_examples() {
        let r = sum_theorem1(&MultiplicativeSpec::Moebius, 4, &[], &small()).unwrap();
        assert_eq!(r.partial_sums, vec![(4, 1)]);
        let one = MultiplicativeSpec::Custom(PrimeSigns::trivial());
        let r = sum_theorem1(&one, 1000, &[10, 500], &small()).unwrap();
        let plain = |c: u64| (1..c).map(|n| sign(s_phi(n)) as i64).sum::<i64>();
        assert_eq!(r.partial_sums, vec![(10, plain(10)), (500, plain(500)), (1000, plain(1000))]);
        assert_eq!(r.spot_check_mismatches, 0);
    }

    #[test]
    fn pq_examples() {
        assert_eq!(sum_pq(&spec23(), 2, &[], &small()).unwrap().total(), 1);
        assert_eq!(sum_pq(&spec23(), 7, &[], &small()).unwrap().total(), 4);
    }

    #[test]
    fn pq_overflow_is_capacity() {
        let spec = PqSpec::new(2, u64::MAX / 4, 6, 2).unwrap();
        assert!(matches!(sum_pq(&spec, 100, &[], &small()), Err(Error::Capacity(_))));
    }

    #[test]
    fn block_sums_partition_the_range() {
        let r = sum_pq(&spec23(), FIB[20], &[], &small()).unwrap();
        assert_eq!(r.block_sums.len(), 18);
        let total: i64 = r.block_sums.iter().map(|b| b.1).sum();
        assert_eq!(total, r.total());
        for &(k, s) in &r.block_sums {
            assert!(s.unsigned_abs() <= FIB[k as usize - 2]);
        }
    }

    #[test]
    fn deterministic_across_partitions() {
        let a = sum_theorem1(&MultiplicativeSpec::Liouville, 50_000, &[100, 7000], &small()).unwrap();
        let b = sum_theorem1(
            &MultiplicativeSpec::Liouville,
            50_000,
            &[100, 7000],
            &SumOptions {
                segment_len: 4096,
                workers: 5,
                ..small()
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nested_checkpoints_agree_with_single_pass() {
        let full = sum_pq(&spec23(), 20_000, &[], &small()).unwrap();
        let cps: Vec<u64> = (1..20).map(|i| i * 1000).collect();
        let nested = sum_pq(&spec23(), 20_000, &cps, &small()).unwrap();
        assert_eq!(nested.total(), full.total());
        for &(c, s) in &nested.partial_sums {
            assert_eq!(s, sum_pq(&spec23(), c, &[], &small()).unwrap().total());
            assert!(s.unsigned_abs() <= c);
        }
    }

    #[test]
    fn rejects_bad_checkpoints() {
        assert!(sum_pq(&spec23(), 100, &[5, 5], &small()).is_err());
        assert!(sum_pq(&spec23(), 100, &[0], &small()).is_err());
        assert!(sum_pq(&spec23(), 100, &[101], &small()).is_err());
    }

    #[test]
    fn offset_sums() {
        let plain = sum_pq(&spec23(), FIB[18], &[], &small()).unwrap();
        let offset = sum_with_l_offset(&spec23(), &LSet::empty(), 3..=18).unwrap();
        assert_eq!(offset, plain.block_sums);
        let l = LSet::new(vec![1], 6, true).unwrap();
        let s = sum_with_l_offset(&spec23(), &l, 5..=5).unwrap();
        // block 5 is {3, 4}, offset N_{{1}}(5) = F_6 = 8
        let expect: i64 = (3..5).map(|n| sign(spec23().f(n + 8).unwrap()) as i64).sum();
        assert_eq!(s, vec![(5, expect)]);
    }

    #[test]
    fn spot_check_finds_no_mismatch() {
        let (checked, mismatches) = parity_spot_check(1_000_000, 200, 3);
        assert!(checked > 190);
        assert_eq!(mismatches, 0);
    }
}
