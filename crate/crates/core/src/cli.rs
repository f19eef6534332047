//! Command-line front end. Every verb maps to one library operation; reports go
//! to stdout as aligned text or, with `--json`, as JSON.
//!
//! Exit status: 0 on success, 1 when `--expect` is given and a certificate
//! fails or a p-curvature verdict is non-nilpotent, 2 on malformed input or a
//! violated precondition.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde::Serialize;

use crate::denomlab::{certify, delta_sequence, infer_c, infer_s, InferredS};
use crate::diffop::{DiffOp, OperatorJson, Point};
use crate::io::parse_sequence;
use crate::localsystem::{cd_bound_check_window, companion, frobenius_series, shear};
use crate::numkernel::{parse_rational, PrimeWindow, Rational};
use crate::pcurvature::{nilpotence_report, Verdict};
use crate::pipeline::{default_window, theorem_one_analyze};
use crate::recurrence::{residual, to_operator, to_recurrence, unroll, InitialData, Recurrence, RecurrenceJson};

#[derive(Parser, Debug)]
#[command(name = "holodenom", version, about = "Exact denominator analysis of holonomic power series")]
pub struct Cli {
    /// Emit JSON instead of text tables.
    #[arg(long, global = true, default_value_t = false)]
    pub json: bool,
    /// Exit with status 1 when a certificate fails or a p-curvature verdict is non-nilpotent.
    #[arg(long, global = true, default_value_t = false)]
    pub expect: bool,
    /// Worker threads for per-prime checks (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct WindowArgs {
    /// Smallest prime of the window.
    #[arg(long, default_value_t = 5)]
    pub pmin: u64,
    /// Largest prime of the window.
    #[arg(long, default_value_t = 97)]
    pub pmax: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Local exponents of an operator at a point.
    Exponents {
        #[arg(long)]
        op: PathBuf,
        /// A rational point or `inf`.
        #[arg(long, default_value = "0")]
        at: String,
    },
    /// Recurrence satisfied by the coefficients of power-series solutions.
    Recurrence {
        #[arg(long)]
        op: PathBuf,
        /// Keep the raw indexing (shifts may be negative) instead of the canonical form.
        #[arg(long, default_value_t = false)]
        raw: bool,
    },
    /// Operator annihilating the generating series of a recurrence's solutions.
    Operator {
        #[arg(long)]
        rec: PathBuf,
    },
    /// Exact terms of a recurrence solution.
    Unroll {
        #[arg(long)]
        rec: PathBuf,
        /// Comma-separated initial values v_0, v_1, ...
        #[arg(long)]
        init: String,
        /// Value at a singular index, as `index=value`; repeatable.
        #[arg(long)]
        patch: Vec<String>,
        /// Last index to compute.
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
    /// L applied to a truncated series; zero iff the prefix is consistent with a solution.
    Residual {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        seq: PathBuf,
    },
    /// Operator with coefficients B_i(z + alpha).
    Shift {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        alpha: String,
    },
    /// Operator for the substitution z -> 1/z.
    Invert {
        #[arg(long)]
        op: PathBuf,
    },
    /// Operator for the substitution z = x^b.
    Pullback {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        b: u64,
    },
    /// Shear the companion system at 0 to a nilpotent residue.
    Shear {
        #[arg(long)]
        op: PathBuf,
    },
    /// Frobenius series U_0..U_n of the sheared companion system.
    Frobenius {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Christol-Dwork valuation bound on U_n for every prime of a window.
    Cdcheck {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// delta_n, the lcm of the denominators of a_0..a_n.
    Delta {
        #[arg(long)]
        seq: PathBuf,
    },
    /// Check that D_{bn+b0}^s C^(n+1) a_n is an integer for n <= N.
    Certify {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 0)]
        s: u32,
        #[arg(long, default_value_t = 1)]
        b: u64,
        #[arg(long, default_value_t = 0)]
        b0: u64,
        #[arg(long = "C", default_value = "1")]
        c: String,
        /// Last index checked (default: last index of the file).
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Least s over a prime window, then the small-prime constant C below it.
    Infer {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 1)]
        b: u64,
        #[arg(long, default_value_t = 0)]
        b0: u64,
        /// Last index used (default: last index of the file).
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, default_value_t = crate::denomlab::DEFAULT_S_CAP)]
        cap: u32,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Nilpotence of the p-curvature for every prime of a window.
    Pcurv {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 5)]
        pmin: u64,
        #[arg(long, default_value_t = 47)]
        pmax: u64,
    },
    /// Full analysis: reduction, shearing, Frobenius, valuation checks and certificate.
    Theorem1 {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        seq: PathBuf,
        /// Last index used (default: last index of the file).
        #[arg(long = "N")]
        n: Option<usize>,
        /// Smallest window prime (default: heuristic from the operator).
        #[arg(long)]
        pmin: Option<u64>,
        /// Largest window prime (default: pmin + 100).
        #[arg(long)]
        pmax: Option<u64>,
    },
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Outcome {
    text: String,
    json: String,
    ok: bool,
}

impl Outcome {
    fn new<T: Serialize>(text: String, value: &T) -> Self {
        Self {
            text,
            json: serde_json::to_string_pretty(value).expect("reports serialize"),
            ok: true,
        }
    }

    fn verdict(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn json_error(path: &Path, e: serde_json::Error) -> Failure {
    Failure(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
}

fn load_op(path: &Path) -> Result<DiffOp, Failure> {
    let text = read(path)?;
    let j: OperatorJson = serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
    DiffOp::try_from(j).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_rec(path: &Path) -> Result<Recurrence, Failure> {
    let text = read(path)?;
    let j: RecurrenceJson = serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
    Recurrence::try_from(j).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_seq(path: &Path) -> Result<Vec<Rational>, Failure> {
    let text = read(path)?;
    parse_sequence(&text).map_err(|e| Failure(format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message)))
}

fn last_index(seq: &[Rational], n: Option<usize>) -> Result<usize, Failure> {
    if seq.is_empty() {
        return Err(Failure("empty sequence".into()));
    }
    match n {
        Some(n) if n >= seq.len() => Err(Failure(format!("N = {n} but the sequence has {} terms", seq.len()))),
        Some(n) => Ok(n),
        None => Ok(seq.len() - 1),
    }
}

fn window(pmin: u64, pmax: u64) -> Result<PrimeWindow, Failure> {
    Ok(PrimeWindow::new(pmin, pmax)?)
}

/// Left-aligned columns separated by two spaces.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let s: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(s.join("  ").trim_end());
        out.push('\n');
    };
    line(headers.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

fn join(xs: &[Rational]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn operator_outcome(l: &DiffOp) -> Outcome {
    Outcome::new(format!("{l}\n"), &OperatorJson::from(l))
}

fn recurrence_outcome(r: &Recurrence) -> Outcome {
    let rows: Vec<Vec<String>> = r
        .shifts()
        .iter()
        .map(|(d, q)| vec![d.to_string(), q.to_string_in("n")])
        .collect();
    let text = format!(
        "sum_d q_d(n) v_(n+d) = 0 for n >= {}\n{}",
        r.n_start(),
        table(&["d", "q_d(n)"], &rows)
    );
    Outcome::new(text, &RecurrenceJson::from(r))
}

fn parse_point(s: &str) -> Result<Point, Failure> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(Point::Infinity),
        t => Ok(Point::Finite(parse_rational(t)?)),
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome, Failure> {
    Ok(match cmd {
        Command::Exponents { op, at } => {
            let l = load_op(op)?;
            let point = parse_point(at)?;
            let rep = l.exponents_at(&point);
            let local = match &point {
                Point::Finite(a) => l.shift(a),
                Point::Infinity => l.invert(),
            };
            let kind = if !rep.regular {
                "irregular singular"
            } else if !num_traits::Zero::is_zero(&local.leading().coeff(0)) {
                "ordinary"
            } else {
                "regular singular"
            };
            let mut text = join(&rep.exponents);
            if !rep.all_rational {
                text.push_str(if rep.exponents.is_empty() { "(none rational)" } else { ", plus irrational exponents" });
            }
            Outcome::new(format!("{text} ({kind})\n"), &rep)
        }
        Command::Recurrence { op, raw } => {
            let r = to_recurrence(&load_op(op)?);
            recurrence_outcome(&if *raw { r } else { r.canonical() })
        }
        Command::Operator { rec } => operator_outcome(&to_operator(&load_rec(rec)?)?),
        Command::Unroll { rec, init, patch, n } => {
            let r = load_rec(rec)?;
            let values = init
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(parse_rational)
                .collect::<Result<Vec<_>, _>>()?;
            let mut data = InitialData::from_values(values);
            for p in patch {
                let (i, v) = p
                    .split_once('=')
                    .ok_or_else(|| Failure(format!("patch {p:?} is not index=value")))?;
                let i: usize = i.trim().parse().map_err(|_| Failure(format!("bad patch index {i:?}")))?;
                data = data.with_patch(i, parse_rational(v)?);
            }
            let v = unroll(&r, &data, *n)?;
            let strs: Vec<String> = v.iter().map(ToString::to_string).collect();
            Outcome::new(crate::io::format_sequence(&v), &strs)
        }
        Command::Residual { op, seq } => {
            let l = load_op(op)?;
            let a = load_seq(seq)?;
            let p = residual(&l, &a)?;
            let order = a.len() as i64 - to_recurrence(&l).d_max();
            #[derive(Serialize)]
            struct Report<'a> {
                residual: &'a crate::numkernel::Poly,
                zero: bool,
            }
            let text = format!("L(y) = {} + O(z^{order})\n", p.to_string_in("z"));
            Outcome::new(text, &Report { residual: &p, zero: p.is_zero() })
        }
        Command::Shift { op, alpha } => operator_outcome(&load_op(op)?.shift(&parse_rational(alpha)?)),
        Command::Invert { op } => operator_outcome(&load_op(op)?.invert()),
        Command::Pullback { op, b } => {
            if *b == 0 {
                return Err(Failure("b must be positive".into()));
            }
            operator_outcome(&load_op(op)?.pullback_power(*b))
        }
        Command::Shear { op } => {
            let sh = shear(&companion(&load_op(op)?)?)?;
            let text = format!(
                "steps: {}\nb0: {}\nsheared residue A(0):\n{}",
                sh.steps,
                sh.b0,
                sh.a_sheared.residue()
            );
            Outcome::new(text, &sh)
        }
        Command::Frobenius { op, n } => {
            let sh = shear(&companion(&load_op(op)?)?)?;
            let fs = frobenius_series(&sh.a_sheared, *n)?;
            let mut text = format!("b0: {}\nN:\n{}", sh.b0, fs.n);
            for (k, u) in fs.u.iter().enumerate() {
                let _ = write!(text, "U_{k}:\n{}", u);
            }
            Outcome::new(text, &fs)
        }
        Command::Cdcheck { op, n, window: w } => {
            let w = window(w.pmin, w.pmax)?;
            let sh = shear(&companion(&load_op(op)?)?)?;
            let fs = frobenius_series(&sh.a_sheared, *n)?;
            let results = cd_bound_check_window(&fs, &w, *n);
            #[derive(Serialize)]
            #[serde(untagged)]
            enum Entry {
                Checked(crate::localsystem::CdBoundReport),
                Skipped { p: u64, skipped: String },
            }
            let mut rows = Vec::new();
            let mut entries = Vec::new();
            for (p, r) in results {
                match r {
                    Ok(rep) => {
                        rows.push(vec![
                            p.to_string(),
                            rep.exponent.to_string(),
                            rep.violations.len().to_string(),
                            if rep.holds() { "ok" } else { "violated" }.into(),
                        ]);
                        entries.push(Entry::Checked(rep));
                    }
                    Err(e) => {
                        rows.push(vec![p.to_string(), "-".into(), "-".into(), format!("skipped: {e}")]);
                        entries.push(Entry::Skipped { p, skipped: e.to_string() });
                    }
                }
            }
            Outcome::new(table(&["p", "exponent", "violations", "status"], &rows), &entries)
        }
        Command::Delta { seq } => {
            let d = delta_sequence(&load_seq(seq)?);
            let rows: Vec<Vec<String>> = d.iter().enumerate().map(|(n, x)| vec![n.to_string(), x.to_string()]).collect();
            let strs: Vec<String> = d.iter().map(ToString::to_string).collect();
            Outcome::new(table(&["n", "delta_n"], &rows), &strs)
        }
        Command::Certify { seq, s, b, b0, c, n } => {
            let a = load_seq(seq)?;
            let n = last_index(&a, *n)?;
            let c: BigUint = c.trim().parse().map_err(|_| Failure(format!("C must be a positive integer, got {c:?}")))?;
            if c == BigUint::from(0u32) || *b == 0 {
                return Err(Failure("b and C must be positive".into()));
            }
            let cert = certify(&a, *s, *b, *b0, &c, n);
            let mut text = format!(
                "D_({b}n+{b0})^{s} * {c}^(n+1) * a_n integral for n <= {n}: {}\n",
                if cert.passed() { "pass" } else { "fail" }
            );
            if let Some(w) = &cert.witness {
                let _ = writeln!(text, "witness: n = {}, p = {}, deficit = {}", w.n, w.p, w.deficit);
            }
            let ok = cert.passed();
            Outcome::new(text, &cert).verdict(ok)
        }
        Command::Infer { seq, b, b0, n, cap, window: w } => {
            let a = load_seq(seq)?;
            let n = last_index(&a, *n)?;
            let w = window(w.pmin, w.pmax)?;
            let s = infer_s(&a, *b, *b0, n, &w, *cap);
            let small = w.primes_below();
            let c = match s {
                InferredS::Found(s) => Some(infer_c(&a, s, *b, *b0, n, &small)),
                InferredS::NoneUpToCap => None,
            };
            #[derive(Serialize)]
            struct Report {
                s: InferredS,
                #[serde(rename = "C")]
                c: Option<String>,
                small_primes: Vec<u64>,
                window: PrimeWindow,
                #[serde(rename = "N")]
                n: usize,
            }
            let text = match (&s, &c) {
                (InferredS::Found(s), Some(c)) => format!(
                    "s = {s} on primes {}..{}, n <= {n}\nC = {c} over primes {:?}\n",
                    w.p_min(),
                    w.p_max(),
                    small
                ),
                _ => format!("no s <= {cap} works on primes {}..{}, n <= {n}\n", w.p_min(), w.p_max()),
            };
            Outcome::new(
                text,
                &Report { s, c: c.map(|c| c.to_string()), small_primes: small, window: w, n },
            )
        }
        Command::Pcurv { op, pmin, pmax } => {
            let l = load_op(op)?;
            let r = nilpotence_report(&l, &window(*pmin, *pmax)?);
            let rows: Vec<Vec<String>> = r
                .iter()
                .map(|v| {
                    let status = serde_json::to_value(v.status).unwrap();
                    vec![
                        v.p.to_string(),
                        status.as_str().unwrap().to_string(),
                        v.reason.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            let ok = r.iter().all(|v| v.status != Verdict::NonNilpotent);
            let text = format!("p-curvature (oracle evidence)\n{}", table(&["p", "status", "reason"], &rows));
            Outcome::new(text, &r).verdict(ok)
        }
        Command::Theorem1 { op, seq, n, pmin, pmax } => {
            let l = load_op(op)?;
            let a = load_seq(seq)?;
            let n = last_index(&a, *n)?;
            let heuristic = pmin.is_none();
            let w = match (pmin, pmax) {
                (Some(lo), Some(hi)) => window(*lo, *hi)?,
                (Some(lo), None) => window(*lo, lo + 100)?,
                (None, hi) => {
                    let d = default_window(&l);
                    window(d.p_min(), hi.unwrap_or(d.p_max()))?
                }
            };
            let r = theorem_one_analyze(&l, &a, n, &w)?;
            #[derive(Serialize)]
            struct Report<'a> {
                window_heuristic: bool,
                #[serde(flatten)]
                report: &'a crate::pipeline::TheoremOneReport,
            }
            let cert = &r.certificate;
            let mut text = format!(
                "mu = {}, b = {}, b0 = {}, s = {}, C = {}\nwindow {}..{}{}\n",
                r.mu,
                r.b,
                r.b0,
                r.s,
                r.c,
                w.p_min(),
                w.p_max(),
                if heuristic { " (heuristic default)" } else { "" }
            );
            let _ = writeln!(
                text,
                "valuation bound: {} on {} primes, {} skipped",
                if r.stages.cd.consistent { "consistent" } else { "violated" },
                r.cd_primes_checked.len(),
                r.stages.cd.skipped.len()
            );
            let _ = writeln!(text, "certificate for n <= {n}: {}", if cert.passed() { "pass" } else { "fail" });
            if let Some(wt) = &cert.witness {
                let _ = writeln!(text, "witness: n = {}, p = {}, deficit = {}", wt.n, wt.p, wt.deficit);
            }
            let ok = cert.passed();
            Outcome::new(text, &Report { window_heuristic: heuristic, report: &r }).verdict(ok)
        }
    })
}

/// Parse `args` (including the program name), run the verb, write the report
/// to `out` and diagnostics to `err`; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(o) => {
            let body = if cli.json { o.json + "\n" } else { o.text };
            let _ = out.write_all(body.as_bytes());
            if cli.expect && !o.ok {
                1
            } else {
                0
            }
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
