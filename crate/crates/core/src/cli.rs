//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and maps outcomes to exit codes: 0 success, 1 invalid input,
//! 2 a verification that reported violations or a nonzero discrepancy.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::correlation::{
    fit_decay_exponent, sum_pq, sum_theorem1, CorrelationReport, MultiplicativeSpec, PrimeSigns,
    SumOptions, Table,
};
use crate::error::{invalid, Result};
use crate::genfun::{
    check_count_growth, phi_r_root, probe_zero_free, verify_hl_identity, LSet, SeriesBundle,
    SeriesKind,
};
use crate::morphic::{fibonacci_word, fibonacci_word_stream, kkernel_distinctness, parity_stream};
use crate::quasi::{
    analytic_radius, check_low_digit_domination, check_separated_additivity,
    check_shift_compatibility, find_parity_witnesses, min_quasi_additive_radius, PqSpec,
};
use crate::zeck::{s_phi, s_phi_min_oracle, shift_s_pow, zeck_decode, zeck_encode, ORACLE_BOUND};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "zeckmob", version, about = "Zeckendorf digit experiments")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "plain", global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, env = "ZECKMOB_WORKERS", default_value_t = 0, global = true)]
    pub workers: usize,
    /// Seed for sampled cross-checks.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zeckendorf representations.
    #[command(subcommand)]
    Zeck(ZeckCmd),
    /// Substitution sequences.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Quasi-additivity of s_φ(pn) + s_φ(qn).
    #[command(subcommand)]
    Qa(QaCmd),
    /// Generating functions and growth constants.
    #[command(subcommand)]
    Genfun(GenfunCmd),
    /// Correlation sums.
    #[command(subcommand)]
    Corr(CorrCmd),
}

#[derive(Debug, Subcommand)]
pub enum ZeckCmd {
    Encode { n: u64 },
    /// Indices of the Fibonacci numbers, largest first.
    Decode {
        #[arg(required = true, num_args = 1..)]
        indices: Vec<u32>,
    },
    Sdigits {
        n: u64,
        /// Also compare with the minimal-representation oracle.
        #[arg(long)]
        oracle: bool,
    },
    Shift {
        n: u64,
        #[arg(long, default_value_t = 1)]
        times: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum SeqCmd {
    /// s_φ(n) mod 2 from the substitution.
    Parity {
        #[arg(long, default_value_t = 24)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        start: u64,
    },
    /// Fibonacci word x_1 x_2 …
    Fibword {
        #[arg(long, default_value_t = 18)]
        count: u64,
        /// Compare the floor formula with the substitution.
        #[arg(long)]
        check: bool,
    },
    Kkernel {
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [0u32, 1, 2, 3])]
        lambdas: Vec<u32>,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PqArgs {
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = 3)]
    pub q: u64,
    /// Separation radius; defaults to the analytic radius for q.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
}

impl PqArgs {
    fn spec(&self) -> Result<PqSpec> {
        let r = match self.r {
            Some(r) => r,
            None => analytic_radius(self.q)?,
        };
        PqSpec::new(self.p, self.q, r, self.m)
    }
}

#[derive(Debug, Clone, Args)]
pub struct LArgs {
    /// Offset set L, e.g. `2,5`.
    #[arg(long = "l", value_delimiter = ',')]
    pub l: Vec<u32>,
    /// Allow gaps in L wider than 2r + 1.
    #[arg(long)]
    pub relaxed: bool,
}

impl LArgs {
    fn set(&self, r: u32) -> Result<LSet> {
        LSet::new(self.l.clone(), r, !self.relaxed)
    }
}

#[derive(Debug, Subcommand)]
pub enum QaCmd {
    Radius {
        #[command(flatten)]
        pq: PqArgs,
        #[arg(long, default_value_t = 10_000)]
        bound: u64,
        #[arg(long, default_value_t = 12)]
        r_max: u32,
    },
    /// Separated additivity, shift compatibility and low-digit domination.
    Check {
        #[command(flatten)]
        pq: PqArgs,
        #[arg(long, default_value_t = 10_000)]
        bound: u64,
        /// Digit indices for the domination check.
        #[arg(long, value_delimiter = ',')]
        domination: Vec<u32>,
    },
    Witness {
        #[command(flatten)]
        pq: PqArgs,
        #[arg(long, default_value_t = 1_000_000)]
        horizon: u64,
        /// Also require the lowest digit at position r.
        #[arg(long)]
        require_b: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    B,
    Bprime,
    Bl,
    Blprime,
    Hl,
}

#[derive(Debug, Subcommand)]
pub enum GenfunCmd {
    Series {
        #[command(flatten)]
        pq: PqArgs,
        #[command(flatten)]
        l: LArgs,
        #[arg(long = "K", default_value_t = 20)]
        order: usize,
        #[arg(long, value_enum, default_value = "hl")]
        kind: Kind,
    },
    Identity {
        #[command(flatten)]
        pq: PqArgs,
        #[command(flatten)]
        l: LArgs,
        #[arg(long = "K", default_value_t = 25)]
        order: usize,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        z: i64,
    },
    Phir {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    Counts {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 60)]
        k_max: u32,
    },
    Zerofree {
        #[command(flatten)]
        pq: PqArgs,
        #[arg(long = "K", default_value_t = 25)]
        order: usize,
        /// Circle radii, each inside (0, 1/φ_r).
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.4, 0.6])]
        moduli: Vec<f64>,
        #[arg(long, default_value_t = 256)]
        angles: usize,
        /// Fail unless the anchor is this close to 1 - 1/φ.
        #[arg(long)]
        anchor_tol: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mult {
    Moebius,
    Liouville,
    /// m ≡ 1.
    One,
    /// +1 on primes ≡ 1 mod 4, -1 otherwise.
    Mod4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    Partial,
    Blocks,
}

#[derive(Debug, Clone, Args)]
pub struct SumArgs {
    #[arg(long = "N", default_value_t = 1_000_000)]
    pub horizon: u64,
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Vec<u64>,
    #[arg(long, default_value_t = 1 << 16)]
    pub segment: usize,
    /// Table written in csv format.
    #[arg(long, value_enum, default_value = "blocks")]
    pub table: TableArg,
}

#[derive(Debug, Subcommand)]
pub enum CorrCmd {
    Theorem1 {
        #[arg(long, value_enum, default_value = "moebius")]
        mult: Mult,
        #[command(flatten)]
        sums: SumArgs,
        #[arg(long, default_value_t = 64)]
        spot_checks: usize,
    },
    Pq {
        #[command(flatten)]
        pq: PqArgs,
        #[command(flatten)]
        sums: SumArgs,
    },
    /// Decay fit of block sums, read from a `k_or_checkpoint,sum,…` CSV or
    /// computed for (p, q) up to N.
    Fit {
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        pq: PqArgs,
        #[arg(long = "N", default_value_t = 3_524_578)]
        horizon: u64,
    },
}

/// A rendered report and whether it passed its own checks.
pub struct Output {
    plain: String,
    csv: String,
    json: Value,
    verified: bool,
}

impl Output {
    fn new<T: Serialize>(value: &T, plain: String, csv: String) -> Result<Output> {
        Ok(Output {
            plain,
            csv,
            json: serde_json::to_value(value).map_err(|e| invalid(e.to_string()))?,
            verified: true,
        })
    }

    fn verified(mut self, ok: bool) -> Self {
        self.verified = ok;
        self
    }

    fn render(&self, format: Format) -> String {
        let mut s = match format {
            Format::Plain => self.plain.clone(),
            Format::Csv => self.csv.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("values serialise"),
        };
        if !s.ends_with('\n') {
            s.push('\n');
        }
        s
    }
}

fn joined<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn zeck(cmd: &ZeckCmd) -> Result<Output> {
    match cmd {
        ZeckCmd::Encode { n } => {
            let rep = zeck_encode(*n);
            let csv = format!("index\n{}", joined(rep.indices(), "\n"));
            Output::new(&json!({"n": n, "indices": rep.indices()}), rep.to_string(), csv)
        }
        ZeckCmd::Decode { indices } => {
            let n = zeck_decode(indices)?;
            Output::new(&json!({"indices": indices, "n": n}), n.to_string(), format!("n\n{n}"))
        }
        ZeckCmd::Sdigits { n, oracle } => {
            let s = s_phi(*n);
            if !oracle {
                return Output::new(&json!({"n": n, "s_phi": s}), s.to_string(), format!("n,s_phi\n{n},{s}"));
            }
            if *n >= ORACLE_BOUND {
                return Err(invalid(format!("oracle only below {ORACLE_BOUND}")));
            }
            let o = s_phi_min_oracle(*n)?;
            Ok(Output::new(
                &json!({"n": n, "s_phi": s, "oracle": o}),
                format!("{s} (oracle {o})"),
                format!("n,s_phi,oracle\n{n},{s},{o}"),
            )?
            .verified(s == o))
        }
        ZeckCmd::Shift { n, times } => {
            let s = shift_s_pow(*n, *times)?;
            Output::new(&json!({"n": n, "times": times, "shifted": s}), s.to_string(), format!("n,times,shifted\n{n},{times},{s}"))
        }
    }
}

fn seq(cmd: &SeqCmd) -> Result<Output> {
    match cmd {
        SeqCmd::Parity { count, start } => {
            let bits: Vec<u8> = parity_stream().skip(*start as usize).take(*count).collect();
            let mut csv = String::from("n,parity\n");
            for (i, b) in bits.iter().enumerate() {
                writeln!(csv, "{},{b}", start + i as u64).unwrap();
            }
            Output::new(&json!({"start": start, "values": bits}), joined(&bits, " "), csv)
        }
        SeqCmd::Fibword { count, check } => {
            let bits = (1..=*count).map(fibonacci_word).collect::<Result<Vec<u8>>>()?;
            let mismatch = if *check {
                fibonacci_word_stream()
                    .zip(&bits)
                    .position(|(a, &b)| a != b)
                    .map(|i| i as u64 + 1)
            } else {
                None
            };
            let mut csv = String::from("n,value\n");
            for (i, b) in bits.iter().enumerate() {
                writeln!(csv, "{},{b}", i + 1).unwrap();
            }
            let mut plain = joined(&bits, " ");
            if *check {
                match mismatch {
                    Some(n) => write!(plain, "\nmismatch at n = {n}").unwrap(),
                    None => write!(plain, "\nformula and substitution agree").unwrap(),
                }
            }
            Ok(Output::new(&json!({"values": bits, "checked": check, "first_mismatch": mismatch}), plain, csv)?
                .verified(mismatch.is_none()))
        }
        SeqCmd::Kkernel { k, lambdas, horizon } => {
            let report = kkernel_distinctness(*k, lambdas, *horizon)?;
            let mut plain = String::new();
            let mut csv = String::from("lambda1,lambda2,first_difference\n");
            for p in &report.pairs {
                let d = p.first_difference.map_or("none".to_string(), |d| d.to_string());
                writeln!(plain, "λ={} vs λ={}: first difference at n = {d}", p.lambda1, p.lambda2).unwrap();
                writeln!(csv, "{},{},{}", p.lambda1, p.lambda2, p.first_difference.map_or(String::new(), |d| d.to_string())).unwrap();
            }
            let ok = report.all_distinct();
            Ok(Output::new(&report, plain, csv)?.verified(ok))
        }
    }
}

#[derive(Serialize)]
struct CheckReport<T: Serialize, U: Serialize, V: Serialize> {
    spec: PqSpec,
    bound: u64,
    separation: Vec<T>,
    shift: Vec<U>,
    domination: Vec<(u32, Vec<V>)>,
}

fn qa(cmd: &QaCmd) -> Result<Output> {
    match cmd {
        QaCmd::Radius { pq, bound, r_max } => {
            let spec = pq.spec()?;
            let res = min_quasi_additive_radius(&spec, *bound, *r_max)?;
            let show = |r: Option<u32>| r.map_or("none".to_string(), |r| r.to_string());
            let plain = format!("empirical {}\nanalytic {}", show(res.empirical), show(res.analytic));
            let csv = format!(
                "p,q,bound,r_max,empirical,analytic\n{},{},{},{},{},{}",
                spec.p,
                spec.q,
                bound,
                r_max,
                res.empirical.map_or(String::new(), |r| r.to_string()),
                res.analytic.map_or(String::new(), |r| r.to_string())
            );
            Output::new(&res, plain, csv)
        }
        QaCmd::Check { pq, bound, domination } => {
            let spec = pq.spec()?;
            let separation = check_separated_additivity(&spec, *bound)?;
            let shift = check_shift_compatibility(&spec, *bound)?;
            let domination = domination
                .iter()
                .map(|&k| Ok((k, check_low_digit_domination(&spec, k, *bound)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut plain = format!(
                "p={} q={} r={} bound={}\nseparated additivity violations: {}\nshift violations: {}",
                spec.p,
                spec.q,
                spec.r,
                bound,
                separation.len(),
                shift.len()
            );
            let mut csv = String::from("check,k,violations\n");
            writeln!(csv, "separation,,{}", separation.len()).unwrap();
            writeln!(csv, "shift,,{}", shift.len()).unwrap();
            for (k, v) in &domination {
                write!(plain, "\ndomination k={k} violations: {}", v.len()).unwrap();
                writeln!(csv, "domination,{k},{}", v.len()).unwrap();
            }
            let ok = separation.is_empty() && shift.is_empty() && domination.iter().all(|d| d.1.is_empty());
            let report = CheckReport {
                spec,
                bound: *bound,
                separation,
                shift,
                domination,
            };
            Ok(Output::new(&report, plain, csv)?.verified(ok))
        }
        QaCmd::Witness { pq, horizon, require_b } => {
            let spec = pq.spec()?;
            let search = find_parity_witnesses(&spec, *horizon, *require_b)?;
            let ok = search.is_complete() && search.verify();
            let mut plain = String::new();
            let mut csv = String::from("kind,n,pn,qn,s_pn,s_qn\n");
            for (name, w) in [("congruent", &search.congruent), ("incongruent", &search.incongruent)] {
                match w {
                    Some(w) => {
                        writeln!(plain, "{name}: n={} s(pn)={} s(qn)={}", w.n, w.s_pn, w.s_qn).unwrap();
                        writeln!(csv, "{name},{},{},{},{},{}", w.n, w.pn, w.qn, w.s_pn, w.s_qn).unwrap();
                    }
                    None => writeln!(plain, "{name}: none below {horizon}").unwrap(),
                }
            }
            plain.push_str(if ok { "certificates verified" } else { "verification failed" });
            Ok(Output::new(&search, plain, csv)?.verified(ok))
        }
    }
}

fn decimal(x: &BigRational, places: usize) -> String {
    // truncated towards zero; enough for reporting enclosures
    let scale = num_bigint::BigInt::from(10u32).pow(places as u32);
    let scaled = (x * BigRational::from_integer(scale.clone())).trunc().to_integer();
    let (int, frac) = (&scaled / &scale, &scaled % &scale);
    format!("{int}.{:0>width$}", frac.to_string(), width = places)
}

fn genfun(cmd: &GenfunCmd) -> Result<Output> {
    match cmd {
        GenfunCmd::Series { pq, l, order, kind } => {
            let spec = pq.spec()?;
            let bundle = SeriesBundle::build(&spec, &l.set(spec.r)?, *order)?;
            let kind = match kind {
                Kind::B => SeriesKind::B,
                Kind::Bprime => SeriesKind::BPrime,
                Kind::Bl => SeriesKind::BL,
                Kind::Blprime => SeriesKind::BLPrime,
                Kind::Hl => SeriesKind::HL,
            };
            let series = bundle.get(kind);
            let dump = series.dump();
            Output::new(&json!({"kind": kind, "spec": spec, "series": series}), dump.clone(), dump)
        }
        GenfunCmd::Identity { pq, l, order, z } => {
            let spec = pq.spec()?;
            let check = verify_hl_identity(&spec, &l.set(spec.r)?, *order, *z)?;
            let plain = format!("K={} z={} r={} discrepancy {}", check.order, check.z, check.r, check.discrepancy);
            let mut csv = String::from("k,lhs,rhs\n");
            for (k, (a, b)) in check.lhs.iter().zip(&check.rhs).enumerate() {
                writeln!(csv, "{k},{a},{b}").unwrap();
            }
            let ok = check.discrepancy == 0;
            Ok(Output::new(&check, plain, csv)?.verified(ok))
        }
        GenfunCmd::Phir { r, tol } => {
            let tol = BigRational::from_float(*tol)
                .filter(|t| t.to_f64().is_some_and(|f| f > 0.0))
                .ok_or_else(|| invalid(format!("tolerance {tol} must be positive and finite")))?;
            let root = phi_r_root(*r, &tol)?;
            let (lo, hi) = (decimal(&root.lo, 15), decimal(&root.hi, 15));
            let certified = root.is_certified();
            let width = root.width().to_f64().unwrap_or(f64::NAN);
            let plain = format!("φ_{r} ∈ [{lo}, {hi}] width {width:e} certified {certified}");
            let csv = format!("r,lo,hi,width,certified\n{r},{lo},{hi},{width:e},{certified}");
            let value = json!({"r": r, "lo": root.lo.to_string(), "hi": root.hi.to_string(),
                "lo_decimal": lo, "hi_decimal": hi, "width": width, "certified": certified});
            Ok(Output::new(&value, plain, csv)?.verified(certified))
        }
        GenfunCmd::Counts { r, k_max } => {
            let g = check_count_growth(*r, *k_max)?;
            let mut plain = format!("r={} φ_r≈{:.12} C={:.6}\n", g.r, g.phi_r, g.constant);
            let mut csv = String::from("k,bprime,b,closed_form,ratio\n");
            for row in &g.rows {
                let ratio = row.ratio.map_or(String::new(), |x| format!("{x:.9}"));
                writeln!(plain, "k={:<3} B'={:<20} B={:<20} ratio {ratio}", row.k, row.bprime, row.b).unwrap();
                writeln!(csv, "{},{},{},{},{ratio}", row.k, row.bprime, row.b, row.closed_form).unwrap();
            }
            write!(plain, "bound holds {} closed form matches {}", g.bound_holds, g.closed_form_matches).unwrap();
            let ok = g.bound_holds && g.closed_form_matches;
            Ok(Output::new(&g, plain, csv)?.verified(ok))
        }
        GenfunCmd::Zerofree {
            pq,
            order,
            moduli,
            angles,
            anchor_tol,
        } => {
            let spec = pq.spec()?;
            let p = probe_zero_free(&spec, *order, moduli, *angles)?;
            let plain = format!(
                "r={} K={} anchor {:.6} target {:.6} gap {:.6} increasing {} tail bound {:.3e}\nmin |x + x^(r+1)B(x,-1) - 1| = {:.6} over {} circles",
                p.r,
                p.order,
                p.anchor,
                p.target,
                p.anchor_gap,
                p.anchor_increasing,
                p.tail_bound,
                p.min_distance_from_one,
                p.moduli.len()
            );
            let mut csv = String::from("K,anchor\n");
            for (k, a) in &p.anchor_by_order {
                writeln!(csv, "{k},{a}").unwrap();
            }
            let ok = p.anchor_increasing
                && p.min_distance_from_one > 0.0
                && anchor_tol.is_none_or(|tol| p.anchor_gap <= tol);
            Ok(Output::new(&p, plain, csv)?.verified(ok))
        }
    }
}

fn sum_output(report: &CorrelationReport, table: TableArg) -> Result<Output> {
    let table = match table {
        TableArg::Partial => Table::Partial,
        TableArg::Blocks => Table::Blocks,
    };
    let mut plain = format!("{} N={}\n", report.label, report.horizon);
    for &(c, s) in &report.partial_sums {
        writeln!(plain, "n<{c}: {s} ({:.6})", s as f64 / c as f64).unwrap();
    }
    match &report.fit {
        Some(f) => write!(plain, "fitted exponent {:.6} eta_hat {:.6} residual {:.4}", f.slope, f.eta_hat, f.residual).unwrap(),
        None => write!(plain, "too few nonzero blocks to fit").unwrap(),
    }
    if report.spot_checks > 0 {
        write!(plain, "\nspot checks {} mismatches {}", report.spot_checks, report.spot_check_mismatches).unwrap();
    }
    let summary: Value = serde_json::from_str(&report.summary_json()?).map_err(|e| invalid(e.to_string()))?;
    let mut out = Output::new(&json!({"summary": summary, "report": report}), plain, report.to_csv(table)?)?;
    out.verified = report.spot_check_mismatches == 0;
    Ok(out)
}

fn options(cli: &Cli, sums: &SumArgs, spot_checks: usize) -> SumOptions {
    SumOptions {
        segment_len: sums.segment,
        workers: cli.workers,
        spot_checks,
        seed: cli.seed,
    }
}

#[derive(serde::Deserialize)]
struct BlockRow {
    k_or_checkpoint: u32,
    sum: f64,
}

fn corr(cli: &Cli, cmd: &CorrCmd) -> Result<Output> {
    match cmd {
        CorrCmd::Theorem1 { mult, sums, spot_checks } => {
            let m = match mult {
                Mult::Moebius => MultiplicativeSpec::Moebius,
                Mult::Liouville => MultiplicativeSpec::Liouville,
                Mult::One => MultiplicativeSpec::Custom(PrimeSigns::trivial()),
                Mult::Mod4 => MultiplicativeSpec::Custom(PrimeSigns::new("mod4", |p| if p % 4 == 1 { 1 } else { -1 })),
            };
            let report = sum_theorem1(&m, sums.horizon, &sums.checkpoints, &options(cli, sums, *spot_checks))?;
            sum_output(&report, sums.table)
        }
        CorrCmd::Pq { pq, sums } => {
            let report = sum_pq(&pq.spec()?, sums.horizon, &sums.checkpoints, &options(cli, sums, 0))?;
            sum_output(&report, sums.table)
        }
        CorrCmd::Fit { input, pq, horizon } => {
            let blocks: Vec<(u32, f64)> = match input {
                Some(path) => {
                    let mut rd = csv::Reader::from_path(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                    rd.deserialize::<BlockRow>()
                        .map(|r| r.map(|r| (r.k_or_checkpoint, r.sum)).map_err(|e| invalid(e.to_string())))
                        .collect::<Result<_>>()?
                }
                None => {
                    let opts = SumOptions {
                        workers: cli.workers,
                        spot_checks: 0,
                        seed: cli.seed,
                        ..SumOptions::default()
                    };
                    sum_pq(&pq.spec()?, *horizon, &[], &opts)?
                        .block_sums
                        .iter()
                        .map(|&(k, s)| (k, s as f64))
                        .collect()
                }
            };
            let fit = fit_decay_exponent(&blocks)?;
            let plain = format!(
                "fitted exponent {:.6} eta_hat {:.6} residual {:.4} over {} blocks",
                fit.slope, fit.eta_hat, fit.residual, fit.used
            );
            let csv = format!(
                "fitted_exponent,eta_hat,residual,used\n{},{},{},{}",
                fit.slope, fit.eta_hat, fit.residual, fit.used
            );
            Ok(Output::new(&fit, plain, csv)?.verified(fit.slope < 1.0))
        }
    }
}

/// Runs a parsed command line and returns the rendered report.
pub fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Zeck(c) => zeck(c),
        Command::Seq(c) => seq(c),
        Command::Qa(c) => qa(c),
        Command::Genfun(c) => genfun(c),
        Command::Corr(c) => corr(cli, c),
    }
}

/// Entry point shared by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if cli.workers > 0 {
        // only the first configuration wins; later calls in-process are no-ops
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global();
    }
    let out = match dispatch(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let text = out.render(cli.format);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    if out.verified {
        EXIT_OK
    } else {
        eprintln!("verification failed");
        EXIT_VERIFY
    }
}
