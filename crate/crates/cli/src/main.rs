//! `latval`: batch front end for the lattice valuation library.
//!
//! Every subcommand reads JSON (a file path, or inline text starting with
//! `[` or `{`), writes one JSON or CSV document, and exits with 0 on
//! success, 1 when a checked property fails and 2 on malformed input.

mod expr;
mod seqspec;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latval::borel::{
    decode_set, decode_stratified, stump_alpha, CodeAssignment, SetKind, Stratum, Stump, TruncatedBaire,
};
use latval::fubini::{fubini_check, RectTerm, StepFn2D};
use latval::instances::{totient, Interval, IntervalMeasure, IntervalSet, StepFn, StepIntegral};
use latval::lattice::{FiniteLattice, FiniteLatticeDoc};
use latval::sequences::{phi_limits_at_depth, rational_sqrt2_scan, seq_make, sqrt2_error, sqrt2_witness, PiElem};
use latval::suites::{run_suite, SuiteError, SUITES};
use latval::uniformity::{dense_approximate, DenseError, DyadicEndpoints};
use latval::valuation::{check_valuation_exhaustive, dist, quotient, Elem, TableValuation, Valuation};
use latval::Rational;
use num::BigUint;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::seqspec::{LoadedSeq, SeqSpec};

#[derive(Parser)]
#[command(name = "latval", version, about = "Exact lattice valuations, sequences, Fubini and Borel codes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of samples (suites, random slices).
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Truncation depth for sequence commands.
    #[arg(long, global = true)]
    depth: Option<u64>,
    /// Positive rational tolerance, e.g. `1/1000000`.
    #[arg(long, global = true, value_parser = parse_tol)]
    tol: Option<Rational>,
    /// Write the document here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; commands without a CSV form reject `csv`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// μ_S of an interval set.
    Measure {
        #[arg(long)]
        set: String,
    },
    /// φ_S of a step function.
    Integrate {
        #[arg(long)]
        step: String,
    },
    /// d(a, b) for two interval sets or two step functions.
    Distance {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Whether d(a, b) = 0.
    ApproxEq {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Quotient of a finite valuation by d = 0.
    Quotient {
        /// `{"carrier": [...], "leq": [[a, b], ...], "values": {label: value}}`.
        #[arg(long)]
        lattice: String,
        /// `{label: value}`, overriding any values in the lattice document.
        #[arg(long)]
        values: Option<String>,
    },
    /// Stage values with running meets and joins of a sequence.
    ConvergeTrace {
        #[arg(long)]
        seq: String,
    },
    /// Rational sequences squeezing √2 inside interval sets.
    Sqrt2Witness,
    /// Approximates a decreasing interval-set sequence from below by a dense sublattice.
    DenseApprox {
        #[arg(long)]
        seq: String,
        #[arg(long, default_value = "dyadic-endpoints")]
        oracle: String,
        #[arg(long)]
        eps_index: u32,
    },
    /// Both integration orders of a 2-D step function and sampled slices.
    FubiniCheck {
        /// `[{"coefficient": …, "base_x": [...], "base_y": [...]}, …]`.
        #[arg(long)]
        terms: String,
    },
    /// Ordinal rank of a stump.
    StumpAlpha {
        #[arg(long)]
        tree: String,
    },
    /// Membership in a decoded set on a truncated Baire space.
    BorelDecode {
        /// Set code for `--kind`.
        #[arg(long)]
        code: Option<String>,
        #[arg(long, default_value = "a")]
        kind: SetKind,
        /// `DxM`: maps {1..D} → {1..M}.
        #[arg(long)]
        space: TruncatedBaire,
        /// Comma-separated point; omitted means every point.
        #[arg(long)]
        point: Option<String>,
        /// Stump for a stratified decode.
        #[arg(long)]
        stump: Option<String>,
        /// Code assignment for a stratified decode.
        #[arg(long)]
        assignment: Option<String>,
        #[arg(long, default_value = "pi")]
        stratum: Stratum,
        #[arg(long, default_value_t = 16)]
        child_cap: usize,
    },
    /// Euler totient of 1..=max.
    TotientTable {
        #[arg(long, default_value_t = 30)]
        max: u64,
    },
    /// Runs a named property suite (`list` shows them).
    Check {
        #[arg(long)]
        suite: String,
    },
}

fn parse_tol(s: &str) -> Result<Rational, String> {
    let r: Rational = s.parse().map_err(|e| format!("{e}"))?;
    if r.is_positive() {
        Ok(r)
    } else {
        Err("tolerance must be positive".into())
    }
}

/// An emitted document and whether a checked property failed.
struct Output {
    body: String,
    failed: bool,
}

impl Output {
    fn json(v: &impl Serialize, failed: bool) -> Self {
        let body = serde_json::to_string_pretty(v).expect("serializable");
        Output { body, failed }
    }
}

type Res = Result<Output, String>;

fn read_input(arg: &str, what: &str) -> Result<String, String> {
    let t = arg.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| format!("{what}: cannot read {arg}: {e}"))
}

fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            format!("{what}: {}", e.inner())
        } else {
            format!("{what}: at {path}: {}", e.inner())
        }
    })
}

fn load<T: DeserializeOwned>(arg: &str, what: &str) -> Result<T, String> {
    parse_json(&read_input(arg, what)?, what)
}

fn load_set(arg: &str, what: &str) -> Result<IntervalSet, String> {
    let raw: Vec<Interval> = load(arg, what)?;
    IntervalSet::make(raw).map_err(|e| format!("{what}: {e}"))
}

fn format_of(c: &Common, default: Format, csv_ok: bool) -> Result<Format, String> {
    let f = c.format.unwrap_or(default);
    if f == Format::Csv && !csv_ok {
        return Err("this command has no CSV form".into());
    }
    Ok(f)
}

enum Pair {
    Sets(IntervalSet, IntervalSet),
    Steps(StepFn, StepFn),
}

fn load_pair(a: &str, b: &str) -> Result<Pair, String> {
    let (ta, tb) = (read_input(a, "--a")?, read_input(b, "--b")?);
    let va: Value = parse_json(&ta, "--a")?;
    let vb: Value = parse_json(&tb, "--b")?;
    match (&va, &vb) {
        (Value::Array(_), Value::Array(_)) => Ok(Pair::Sets(load_set(&ta, "--a")?, load_set(&tb, "--b")?)),
        (Value::Object(_), Value::Object(_)) => Ok(Pair::Steps(parse_json(&ta, "--a")?, parse_json(&tb, "--b")?)),
        _ => Err("--a and --b must both be interval sets (arrays) or both step functions (objects)".into()),
    }
}

fn pair_distance(p: &Pair) -> (&'static str, Rational) {
    match p {
        Pair::Sets(a, b) => ("interval_set", dist(&IntervalMeasure::default(), a, b).expect("no membership limits")),
        Pair::Steps(a, b) => ("step", dist(&StepIntegral::default(), a, b).expect("no membership limits")),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuotientDoc {
    carrier: Vec<String>,
    leq: Vec<(String, String)>,
    #[serde(default)]
    values: Option<BTreeMap<String, Rational>>,
}

fn cmd_quotient(lattice: &str, values: Option<&str>) -> Res {
    let doc: QuotientDoc = load(lattice, "--lattice")?;
    let l = FiniteLattice::from_doc(&FiniteLatticeDoc {
        carrier: doc.carrier,
        leq: doc.leq,
    })
    .map_err(|e| format!("--lattice: {e}"))?;
    let vals = match values {
        Some(v) => load::<BTreeMap<String, Rational>>(v, "--values")?,
        None => doc.values.ok_or("--lattice: no \"values\" object and no --values given")?,
    };
    for k in vals.keys() {
        l.index(k).map_err(|e| format!("values: {e}"))?;
    }
    let table = l
        .elements()
        .map(|i| vals.get(l.label(i)).cloned().ok_or_else(|| format!("values: missing label {:?}", l.label(i))))
        .collect::<Result<Vec<_>, _>>()?;
    let phi = TableValuation::new(l.clone(), table);
    let input_report = check_valuation_exhaustive(&phi);
    let q = match quotient(&phi) {
        Ok(q) => q,
        Err(e) => {
            return Ok(Output::json(&json!({"error": e.to_string(), "input_report": input_report}), true));
        }
    };
    let classes: Vec<Value> = q
        .lattice
        .elements()
        .map(|c| {
            let members: Vec<&str> = l.elements().filter(|&a| q.class_of[a] == c).map(|a| l.label(a)).collect();
            json!({"label": q.lattice.label(c), "members": members, "value": q.valuation.values[c]})
        })
        .collect();
    let mut order = Vec::new();
    for a in q.lattice.elements() {
        for b in q.lattice.elements() {
            if a != b && latval::lattice::Lattice::leq(&q.lattice, &a, &b) {
                order.push((q.lattice.label(a).to_string(), q.lattice.label(b).to_string()));
            }
        }
    }
    let hausdorff = latval::valuation::is_hausdorff(&q.valuation);
    let report = check_valuation_exhaustive(&q.valuation);
    let failed = !input_report.all_pass() || !report.all_pass() || !hausdorff;
    Ok(Output::json(
        &json!({
            "classes": classes,
            "leq": order,
            "hausdorff": hausdorff,
            "input_report": input_report,
            "report": report,
        }),
        failed,
    ))
}

#[derive(Serialize)]
struct TraceRow {
    stage: u64,
    phi: Rational,
    phi_running_meet: Rational,
    phi_running_join: Rational,
}

fn trace<P: Valuation<V = Rational>>(phi: &P, f: &dyn Fn(u64) -> Elem<P>, depth: u64) -> Result<Value, String> {
    let l = phi.lattice();
    let mut rows = Vec::new();
    let mut meet = f(1);
    let mut join = meet.clone();
    for n in 1..=depth {
        let a = f(n);
        if n > 1 {
            meet = latval::lattice::Lattice::meet(l, &meet, &a);
            join = latval::lattice::Lattice::join(l, &join, &a);
        }
        rows.push(TraceRow {
            stage: n,
            phi: phi.eval(&a),
            phi_running_meet: phi.eval(&meet),
            phi_running_join: phi.eval(&join),
        });
    }
    let limits = if depth >= 2 {
        let lim = phi_limits_at_depth(phi, f, depth).map_err(|e| e.to_string())?;
        json!({"pulim_approx": lim.pulim_approx, "pllim_approx": lim.pllim_approx})
    } else {
        Value::Null
    };
    Ok(json!({"valuation": phi.name(), "rows": rows, "limits": limits}))
}

fn cmd_converge_trace(c: &Common, seq: &str) -> Res {
    let depth = c.depth.unwrap_or(20).max(1);
    let format = format_of(c, Format::Csv, true)?;
    let spec: SeqSpec = load(seq, "--seq")?;
    let loaded = seqspec::load(&spec, depth).map_err(|e| format!("--seq: {e}"))?;
    let doc = match &loaded.seq {
        LoadedSeq::Interval(f) => trace(&IntervalMeasure::default(), f.as_ref(), depth)?,
        LoadedSeq::Step(f) => trace(&StepIntegral::default(), f.as_ref(), depth)?,
    };
    if format == Format::Json {
        return Ok(Output::json(&doc, false));
    }
    let mut body = String::from("stage,phi,phi_running_meet,phi_running_join");
    for row in doc["rows"].as_array().expect("rows") {
        body.push_str(&format!(
            "\n{},{},{},{}",
            row["stage"],
            row["phi"].as_str().expect("rational"),
            row["phi_running_meet"].as_str().expect("rational"),
            row["phi_running_join"].as_str().expect("rational"),
        ));
    }
    Ok(Output { body, failed: false })
}

fn cmd_sqrt2(c: &Common) -> Res {
    let depth = c.depth.unwrap_or(40);
    if depth == 0 {
        return Err("--depth must be at least 1".into());
    }
    let tol = c.tol.clone().unwrap_or(Rational::new(1, 1_000_000));
    let trace = sqrt2_witness(depth);
    let q = trace.last().q.clone();
    let (candidates, hit) = rational_sqrt2_scan(&q, depth, &tol);
    let failed = !trace.report.all_pass() || hit;
    Ok(Output::json(
        &json!({
            "depth": depth,
            "final_q": q,
            "final_error": sqrt2_error(&q),
            "stages": trace.stages,
            "scan": {"max_denominator": depth, "tol": tol, "candidates": candidates, "rational_root_found": hit},
            "report": trace.report,
        }),
        failed,
    ))
}

fn cmd_dense(c: &Common, seq: &str, oracle: &str, eps_index: u32) -> Res {
    if oracle != "dyadic-endpoints" {
        return Err(format!("--oracle: unknown oracle {oracle:?}, expected dyadic-endpoints"));
    }
    let depth = c.depth.unwrap_or(30).max(1);
    let spec: SeqSpec = load(seq, "--seq")?;
    let loaded = seqspec::load(&spec, depth).map_err(|e| format!("--seq: {e}"))?;
    let LoadedSeq::Interval(f) = loaded.seq else {
        return Err("--seq: dense-approx needs kind \"interval\"".into());
    };
    let modulus = loaded.modulus.ok_or("--seq: dense-approx needs a \"modulus\"")?;
    let phi = IntervalMeasure::default();
    let x = seq_make(&phi, loaded.direction, f, modulus, depth)
        .and_then(PiElem::new)
        .map_err(|e| format!("--seq: {e}"))?;
    match dense_approximate(&phi, DyadicEndpoints, &x, eps_index, depth) {
        Ok(out) => Ok(Output::json(
            &json!({"oracle": oracle, "eps_index": eps_index, "stages": out.stages, "report": out.report}),
            !out.report.all_pass(),
        )),
        Err(DenseError::Seq(e)) => Err(format!("--seq: {e}")),
        Err(e) => Ok(Output::json(&json!({"error": e.to_string()}), true)),
    }
}

fn cmd_fubini(c: &Common, terms: &str) -> Res {
    let parsed: Vec<RectTerm> = load(terms, "--terms")?;
    let f = StepFn2D::make(&parsed).map_err(|e| format!("--terms: {e}"))?;
    let out = fubini_check(&f, c.samples.unwrap_or(20) as usize, c.seed);
    let failed = !out.equal || !out.report.all_pass();
    Ok(Output::json(&out, failed))
}

fn parse_point(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| format!("--point: {p:?} is not a positive integer")))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_borel(
    code: Option<&str>,
    kind: SetKind,
    space: TruncatedBaire,
    point: Option<&str>,
    stump: Option<&str>,
    assignment: Option<&str>,
    stratum: Stratum,
    child_cap: usize,
) -> Res {
    let points: Vec<Vec<u32>> = match point {
        Some(p) => {
            let p = parse_point(p)?;
            space.check_point(&p).map_err(|e| format!("--point: {e}"))?;
            vec![p]
        }
        None => space.points().collect(),
    };
    let mut results = Vec::new();
    match (code, stump, assignment) {
        (Some(k), None, None) => {
            let k: BigUint = k.trim().parse().map_err(|_| format!("--code: {k:?} is not a positive integer"))?;
            if k == BigUint::from(0u32) {
                return Err("--code: codes start at 1".into());
            }
            for p in &points {
                let m = decode_set(&k, kind, &space, p).map_err(|e| e.to_string())?;
                results.push(json!({"point": p, "member": m.member, "out_of_range": m.out_of_range.iter().map(|(m, n)| (m.to_string(), n.to_string())).collect::<Vec<_>>()}));
            }
        }
        (None, Some(s), Some(g)) => {
            let s: Stump = load(s, "--stump")?;
            let g: CodeAssignment = load(g, "--assignment")?;
            for p in &points {
                let m = decode_stratified(&s, &g, stratum, &space, p, child_cap).map_err(|e| e.to_string())?;
                let mut v = serde_json::to_value(&m).expect("serializable");
                v["point"] = json!(p);
                results.push(v);
            }
        }
        _ => return Err("give either --code, or both --stump and --assignment".into()),
    }
    if point.is_some() {
        return Ok(Output::json(&results[0], false));
    }
    let count = results.iter().filter(|r| r["member"] == json!(true)).count();
    Ok(Output::json(&json!({"space": space.to_string(), "points": results, "member_count": count}), false))
}

fn cmd_totient(c: &Common, max: u64) -> Res {
    if max == 0 {
        return Err("--max must be at least 1".into());
    }
    let format = format_of(c, Format::Json, true)?;
    let rows: Vec<(u64, u64)> = (1..=max).map(|n| (n, totient(n).expect("n >= 1"))).collect();
    if format == Format::Csv {
        let mut body = String::from("n,totient");
        for (n, t) in &rows {
            body.push_str(&format!("\n{n},{t}"));
        }
        return Ok(Output { body, failed: false });
    }
    let rows: Vec<Value> = rows.iter().map(|(n, t)| json!({"n": n, "totient": t})).collect();
    Ok(Output::json(&json!({"max": max, "rows": rows}), false))
}

fn cmd_check(c: &Common, suite: &str) -> Res {
    if suite == "list" {
        return Ok(Output::json(&json!({"suites": SUITES}), false));
    }
    match run_suite(suite, c.samples.unwrap_or(1000), c.seed) {
        Ok(rep) => Ok(Output::json(&rep, !rep.all_pass())),
        Err(e @ SuiteError::Unknown(_)) => Err(format!("--suite: {e}; known: all, {}", SUITES.join(", "))),
        Err(e) => Ok(Output::json(&json!({"error": e.to_string()}), true)),
    }
}

fn run(cli: &Cli) -> Res {
    let c = &cli.common;
    if !matches!(cli.command, Command::ConvergeTrace { .. } | Command::TotientTable { .. }) {
        format_of(c, Format::Json, false)?;
    }
    match &cli.command {
        Command::Measure { set } => {
            let s = load_set(set, "--set")?;
            Ok(Output::json(&json!({"value": s.measure()}), false))
        }
        Command::Integrate { step } => {
            let f: StepFn = load(step, "--step")?;
            Ok(Output::json(&json!({"value": f.integral()}), false))
        }
        Command::Distance { a, b } => {
            let (kind, d) = pair_distance(&load_pair(a, b)?);
            Ok(Output::json(&json!({"kind": kind, "distance": d}), false))
        }
        Command::ApproxEq { a, b } => {
            let (kind, d) = pair_distance(&load_pair(a, b)?);
            Ok(Output::json(&json!({"kind": kind, "distance": d, "approx_equal": d.is_zero()}), false))
        }
        Command::Quotient { lattice, values } => cmd_quotient(lattice, values.as_deref()),
        Command::ConvergeTrace { seq } => cmd_converge_trace(c, seq),
        Command::Sqrt2Witness => cmd_sqrt2(c),
        Command::DenseApprox {
            seq,
            oracle,
            eps_index,
        } => cmd_dense(c, seq, oracle, *eps_index),
        Command::FubiniCheck { terms } => cmd_fubini(c, terms),
        Command::StumpAlpha { tree } => {
            let s: Stump = load(tree, "--tree")?;
            Ok(Output::json(&json!({"alpha": stump_alpha(&s), "depth": s.depth()}), false))
        }
        Command::BorelDecode {
            code,
            kind,
            space,
            point,
            stump,
            assignment,
            stratum,
            child_cap,
        } => cmd_borel(
            code.as_deref(),
            *kind,
            *space,
            point.as_deref(),
            stump.as_deref(),
            assignment.as_deref(),
            *stratum,
            *child_cap,
        ),
        Command::TotientTable { max } => cmd_totient(c, *max),
        Command::Check { suite } => cmd_check(c, suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut body = out.body;
            body.push('\n');
            let written = match &cli.common.out {
                Some(path) => fs::write(path, body).map_err(|e| format!("--out: cannot write {}: {e}", path.display())),
                None => {
                    print!("{body}");
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
                Ok(()) if out.failed => ExitCode::from(1),
                Ok(()) => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
