use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use zeta_core::hybrid::{cutoffs, error_sweep_points, hybrid_z_with, Rounding, SweepTemplate};
use zeta_core::rs_classic::rs_z_with;
use zeta_core::summation::{default_workers, set_default_workers};
use zeta_core::theta_gram::{gram_point, theta_ext, GramIndex};
use zeta_core::xprec::reduce_ext;
use zeta_core::zeta_sum::{z_newsum_with, KPolicy, NewSumOptions, TermMethod, TransitionPolicy, DEFAULT_BERNOULLI_TERMS};
use zeta_rsi::{relative_difference, rsi_asymptotic, rsi_numeric};

use zcli::config;
use zcli::manifest::RunManifest;
use zcli::output::{Cell, CsvWriter};
use zcli::presets;

/// Exit status for a failed computation (bad range, non-convergence, ...).
const EXIT_COMPUTE: u8 = 1;
/// Exit status for unusable input: flags, configuration, preset names.
const EXIT_USAGE: u8 = 2;
/// Exit status for a failure to write output.
const EXIT_IO: u8 = 3;

/// Hardy's Z(t) by the Riemann–Siegel formula, the odd-integer series and
/// the hybrid of the two.
#[derive(Parser, Debug)]
#[command(name = "zcli", version)]
struct Cli {
    /// Worker threads for long sums (results do not depend on it).
    #[arg(long, env = "Z_WORKERS", global = true)]
    workers: Option<usize>,
    /// `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print JSON lines instead of text; the last line is the run manifest.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the records to this file (`.jsonl` for JSON lines,
    /// anything else for CSV), with the manifest beside it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MethodArg {
    Rs,
    Newsum,
    Hybrid,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RoundingArg {
    FloorCeil,
    Nearest,
}

impl From<RoundingArg> for Rounding {
    fn from(r: RoundingArg) -> Self {
        match r {
            RoundingArg::FloorCeil => Rounding::FloorCeil,
            RoundingArg::Nearest => Rounding::Nearest,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum KPolicyArg {
    /// N_α = odd_floor(0.35t) + 2.
    Paper035t,
    /// N_α = odd_floor(t/2) + 2.
    HalfT,
    /// N_α = odd_floor(2t/π − a).
    DoubleMin,
}

impl From<KPolicyArg> for KPolicy {
    fn from(k: KPolicyArg) -> Self {
        match k {
            KPolicyArg::Paper035t => KPolicy::Paper035t,
            KPolicyArg::HalfT => KPolicy::HalfT,
            KPolicyArg::DoubleMin => KPolicy::DoubleMin,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate Z(t) and ζ(1/2 + it) at one height.
    Z {
        t: f64,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Cost ratio Ω setting the hybrid cutoffs.
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long, value_enum)]
        rounding: Option<RoundingArg>,
        /// Where the odd-integer sum stops (newsum method).
        #[arg(long, value_enum)]
        k_policy: Option<KPolicyArg>,
        /// Bernoulli terms in the Euler–Maclaurin tail (newsum method).
        #[arg(long)]
        bernoulli_terms: Option<u32>,
        /// Odd α next to a to integrate numerically (newsum method).
        #[arg(long, value_delimiter = ',')]
        numeric: Vec<u64>,
        /// Odd α next to a to take from the generic formula (newsum method).
        #[arg(long, value_delimiter = ',')]
        generic: Vec<u64>,
    },
    /// Gram points g_n with θ(g_n) = nπ.
    Gram {
        #[arg(long, conflicts_with = "range", required_unless_present = "range")]
        index: Option<u64>,
        /// First and last index, inclusive.
        #[arg(long, num_args = 2, value_names = ["N0", "N1"])]
        range: Option<Vec<u64>>,
    },
    /// Error of the hybrid's odd-integer segment at a run of Gram points.
    Table1 {
        /// First Gram index.
        #[arg(long)]
        start: Option<u64>,
        #[arg(long)]
        count: Option<u64>,
        /// Distance between consecutive sampled Gram indices.
        #[arg(long)]
        stride: Option<u64>,
        #[arg(long, value_enum)]
        rounding: Option<RoundingArg>,
        #[arg(long)]
        omega: Option<f64>,
        /// Leave out the terms next to a.
        #[arg(long)]
        no_transition: bool,
    },
    /// Reproduce a row of the table of standalone odd-integer estimates.
    Tableai {
        #[arg(long, required_unless_present = "list")]
        preset: Option<String>,
        /// List the preset names.
        #[arg(long)]
        list: bool,
    },
    /// Quadrature against asymptotics for the Riemann–Siegel integral.
    Rsi {
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Measure Ω and the realized saving of the hybrid.
    Bench {
        #[arg(long)]
        t: Option<f64>,
        /// Terms per timed repetition (at least 10⁶).
        #[arg(long)]
        budget: Option<u64>,
        /// Timed repetitions (at least 7).
        #[arg(long)]
        reps: Option<usize>,
    },
}

/// What a command produced: text for the terminal, JSON records, and the
/// same records as CSV.
struct Report {
    text: String,
    json: Vec<Value>,
    csv_header: Vec<(&'static str, bool)>,
    csv_rows: Vec<Vec<Cell>>,
    csv_footer: Option<Vec<String>>,
}

impl Report {
    fn new(header: &[(&'static str, bool)]) -> Self {
        Report { text: String::new(), json: Vec::new(), csv_header: header.to_vec(), csv_rows: Vec::new(), csv_footer: None }
    }
}

enum Failure {
    Compute(String),
    Usage(String),
    Io(String),
}

impl From<zeta_core::Error> for Failure {
    fn from(e: zeta_core::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn pick_enum<T: ValueEnum>(cli: Option<T>, file: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, Failure> {
    if let Some(v) = cli {
        return Ok(v);
    }
    match file.get(key) {
        Some(s) => T::from_str(s, true).map_err(|e| usage(format!("config key `{key}`: {e}"))),
        None => Ok(default),
    }
}

fn pick<T: std::str::FromStr>(cli: Option<T>, file: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    config::pick(cli, file, key, default).map_err(usage)
}

fn zeta_components(t: f64, z: f64) -> (f64, f64) {
    let th = reduce_ext(theta_ext(t));
    let th = th.hi + th.lo;
    (z * th.cos(), -z * th.sin())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into())
}

#[allow(clippy::too_many_arguments)]
fn cmd_z(
    file: &BTreeMap<String, String>,
    t: f64,
    method: Option<MethodArg>,
    omega: Option<f64>,
    rounding: Option<RoundingArg>,
    k_policy: Option<KPolicyArg>,
    bernoulli_terms: Option<u32>,
    numeric: &[u64],
    generic: &[u64],
    workers: usize,
    params: &mut Value,
) -> Result<Report, Failure> {
    let method = pick_enum(method, file, "method", MethodArg::Rs)?;
    let mut r = Report::new(&[
        ("t", true),
        ("method", false),
        ("z", true),
        ("zeta_re", true),
        ("zeta_im", true),
        ("rs_terms", false),
        ("new_terms", false),
        ("error_budget", true),
    ]);
    let (z, rs_terms, new_terms, budget, extra) = match method {
        MethodArg::Rs => {
            let e = rs_z_with(t, workers)?;
            (e.z, e.n_t, 0, Some(e.remainder_bound), json!({ "main_sum": e.main_sum, "correction": e.correction }))
        }
        MethodArg::Hybrid => {
            let omega = pick(omega, file, "omega", 1.0)?;
            let rounding = pick_enum(rounding, file, "rounding", RoundingArg::FloorCeil)?;
            params["omega"] = json!(omega);
            params["rounding"] = json!(rounding);
            let cfg = cutoffs(t, omega, rounding.into())?;
            let e = hybrid_z_with(t, &cfg, workers)?;
            (e.z, e.rs_terms, e.new_terms, Some(e.error_budget), json!({ "n_co": cfg.n_co, "l_co": cfg.l_co }))
        }
        MethodArg::Newsum => {
            let mut opts = NewSumOptions::new(pick_enum(k_policy, file, "k-policy", KPolicyArg::Paper035t)?.into());
            opts.transition_policy = TransitionPolicy::TableFootnote;
            opts.bernoulli_terms = pick(bernoulli_terms, file, "bernoulli-terms", DEFAULT_BERNOULLI_TERMS)?;
            opts.workers = workers;
            opts.overrides = numeric
                .iter()
                .map(|&a| (a, TermMethod::Numeric))
                .chain(generic.iter().map(|&a| (a, TermMethod::Generic)))
                .collect();
            // Heights that appear in the published table follow that row's
            // rules unless the caller chose terms explicitly.
            if opts.overrides.is_empty() && k_policy.is_none() {
                if let Some(p) = presets::for_height(t) {
                    opts = p.options(workers);
                    params["preset"] = json!(p.name);
                }
            }
            params["newsum_options"] = serde_json::to_value(&opts).unwrap_or(Value::Null);
            let e = z_newsum_with(t, &opts)?;
            let n = (e.n_alpha - e.alpha_first) / 2 + 1;
            let extra = json!({
                "main_sum": e.main_sum, "bern_sum": e.bern_sum, "half_term": e.half_term,
                "integral_i": e.integral_i, "alpha_first": e.alpha_first, "n_alpha": e.n_alpha,
                "special_terms": e.special_terms,
            });
            (e.z, 0, n, None, extra)
        }
    };
    let (zr, zi) = zeta_components(t, z);
    let mut rec = json!({
        "record": "z", "t": t, "method": method, "z": z, "z_hex": zcli::output::hex(z),
        "zeta_re": zr, "zeta_im": zi, "rs_terms": rs_terms, "new_terms": new_terms, "error_budget": budget,
    });
    if let (Value::Object(m), Value::Object(x)) = (&mut rec, extra) {
        m.extend(x);
    }
    r.text = format!(
        "t = {t}\nmethod = {method:?}\nZ(t) = {z:.12}\nzeta(1/2+it) = {zr:.12} {} {:.12}i\nterms: {rs_terms} Riemann-Siegel, {new_terms} odd-integer\nerror budget = {}\n",
        if zi < 0.0 { "-" } else { "+" },
        zi.abs(),
        fmt_opt(budget)
    );
    r.csv_rows.push(vec![
        Cell::Real(t),
        Cell::Text(format!("{method:?}").to_lowercase()),
        Cell::Real(z),
        Cell::Real(zr),
        Cell::Real(zi),
        Cell::Int(rs_terms),
        Cell::Int(new_terms),
        Cell::Real(budget.unwrap_or(f64::NAN)),
    ]);
    r.json.push(rec);
    Ok(r)
}

fn cmd_gram(index: Option<u64>, range: Option<Vec<u64>>) -> Result<Report, Failure> {
    let (lo, hi) = match (index, range.as_deref()) {
        (Some(n), _) => (n, n),
        (None, Some([a, b])) if a <= b => (*a, *b),
        (None, Some([a, b])) => return Err(usage(format!("empty range {a}..{b}"))),
        _ => return Err(usage("give --index or --range")),
    };
    let mut r = Report::new(&[("n", false), ("t", true)]);
    for n in lo..=hi {
        let t = gram_point(GramIndex(n))?;
        r.text.push_str(&format!("{n} {t:.12}\n"));
        r.json.push(json!({ "record": "gram", "n": n, "t": t, "t_hex": zcli::output::hex(t) }));
        r.csv_rows.push(vec![Cell::Int(n), Cell::Real(t)]);
    }
    Ok(r)
}

/// First Gram point of the published desk-scale rows (t just above 10⁶).
const TABLE1_START: u64 = 1_747_145;

#[allow(clippy::too_many_arguments)]
fn cmd_table1(
    file: &BTreeMap<String, String>,
    start: Option<u64>,
    count: Option<u64>,
    stride: Option<u64>,
    rounding: Option<RoundingArg>,
    omega: Option<f64>,
    no_transition: bool,
    workers: usize,
    params: &mut Value,
) -> Result<Report, Failure> {
    let start = pick(start, file, "start", TABLE1_START)?;
    let count = pick(count, file, "count", 10_000)?;
    let stride = pick(stride, file, "stride", 100)?;
    let rounding = pick_enum(rounding, file, "rounding", RoundingArg::FloorCeil)?;
    let omega = pick(omega, file, "omega", 1.0)?;
    let template = SweepTemplate { omega, rounding: rounding.into(), include_transition: !no_transition };
    params["resolved"] = json!({ "start": start, "count": count, "stride": stride, "template": template });
    let (stats, points) = error_sweep_points(GramIndex(start), count, stride, &template, workers)?;

    let mut r = Report::new(&[
        ("gram_index", false),
        ("t", true),
        ("rs_tail", true),
        ("new_series_value", true),
        ("transition_flag", false),
        ("error", true),
        ("bound", true),
    ]);
    for p in &points {
        r.csv_rows.push(vec![
            Cell::Int(p.gram_index),
            Cell::Real(p.t),
            Cell::Real(p.rs_tail),
            Cell::Real(p.new_series_value),
            Cell::Flag(p.transition),
            Cell::Real(p.error),
            Cell::Real(p.bound),
        ]);
    }
    r.csv_footer = Some(vec![
        "stats".into(),
        format!("count={}", stats.count),
        format!("mean_abs_error={}", zcli::output::sig10(stats.mean_abs_error)),
        format!("mean_exponent_s={}", zcli::output::sig10(stats.mean_exponent_s)),
        format!("max_abs_error={}", zcli::output::sig10(stats.max_abs_error)),
        format!("max_at_gram={}", stats.max_at_gram.0),
        format!("bound={}", zcli::output::sig10(stats.bound)),
        format!("violations={}", stats.violations),
    ]);
    r.json.push(json!({ "record": "table1_stats", "stats": stats, "rounding": rounding, "stride": stride }));
    r.text = format!(
        "{} Gram points from g_{start} (stride {stride}, {rounding:?})\nmean |error| = {:.4e}\nmean s       = {:.4}\nmax |error|  = {:.4e} at g_{}\nbound        = {:.4e}\nviolations   = {}\n",
        stats.count,
        stats.mean_abs_error,
        stats.mean_exponent_s,
        stats.max_abs_error,
        stats.max_at_gram.0,
        stats.bound,
        stats.violations
    );
    Ok(r)
}

fn cmd_tableai(preset: Option<String>, list: bool, workers: usize, params: &mut Value) -> Result<Report, Failure> {
    let mut r = Report::new(&[("preset", false), ("column", false), ("computed", true), ("printed", true)]);
    if list {
        for p in &presets::PRESETS {
            r.text.push_str(&format!("{:<16} t = {} {}\n", p.name, p.t, p.markers));
            r.json.push(json!({ "record": "preset", "name": p.name, "t": p.t, "markers": p.markers }));
        }
        return Ok(r);
    }
    let name = preset.unwrap_or_default();
    let Some(p) = presets::find(&name) else {
        return Err(usage(format!("unknown preset `{name}`; valid presets: {}", presets::names().join(", "))));
    };
    let opts = p.options(workers);
    params["preset"] = serde_json::to_value(p).unwrap_or(Value::Null);
    let e = z_newsum_with(p.t, &opts)?;
    let actual = rs_z_with(p.t, workers)?.z;
    let cols = [
        ("main_sum", e.main_sum, p.printed.main_sum),
        ("bern_sum", e.bern_sum, p.printed.bern_sum),
        ("half_term", e.half_term, p.printed.half_term),
        ("integral_i", e.integral_i, p.printed.integral_i),
        ("z_estimate", e.z, p.printed.z),
        ("actual_z", actual, p.printed.actual_z),
    ];
    r.text = format!(
        "t = {} (a = {:.2}) {}\nodd-integer range {}-{}, K = {}\n{:<12} {:>16} {:>14}\n",
        p.t, e.a, p.markers, e.alpha_first, e.n_alpha, e.k, "column", "computed", "printed"
    );
    for (c, v, pr) in cols {
        r.text.push_str(&format!("{c:<12} {v:>16.6e} {pr:>14.5e}\n"));
        r.csv_rows.push(vec![Cell::Text(p.name.into()), Cell::Text(c.into()), Cell::Real(v), Cell::Real(pr)]);
    }
    for s in &e.special_terms {
        r.text.push_str(&format!("alpha = {} (varrho = {:.3}): {:?}\n", s.alpha, s.varrho, s.method));
    }
    r.json.push(json!({
        "record": "tableai", "preset": p.name, "t": p.t, "evaluation": e, "actual_z": actual, "printed": p.printed,
    }));
    Ok(r)
}

/// Printed relative errors of the comparison table, by height.
const RSI_PRINTED: [(f64, f64); 5] = [(10.0, 1.32e-2), (20.0, 6.14e-3), (30.0, 3.95e-3), (40.0, 2.90e-3), (50.0, 2.41e-3)];

fn cmd_rsi(ts: Vec<f64>) -> Result<Report, Failure> {
    let ts = if ts.is_empty() { RSI_PRINTED.iter().map(|p| p.0).collect() } else { ts };
    let mut r = Report::new(&[
        ("t", true),
        ("numeric_re", true),
        ("numeric_im", true),
        ("asymptotic_re", true),
        ("asymptotic_im", true),
        ("relative_error", true),
        ("printed_relative_error", true),
    ]);
    r.text = format!("{:>6} {:>30} {:>30} {:>10} {:>10}\n", "t", "quadrature", "asymptotic", "rel.err", "printed");
    for t in ts {
        let n = rsi_numeric(t)?;
        let a = rsi_asymptotic(t)?;
        let d = relative_difference(&n, &a);
        let printed = RSI_PRINTED.iter().find(|p| p.0 == t).map(|p| p.1);
        r.text.push_str(&format!(
            "{t:>6} {:>14.6e} {:>+14.6e}i {:>14.6e} {:>+14.6e}i {d:>10.3e} {:>10}\n",
            n.value.re,
            n.value.im,
            a.value.re,
            a.value.im,
            printed.map(|p| format!("{p:.2e}")).unwrap_or_else(|| "-".into())
        ));
        r.csv_rows.push(vec![
            Cell::Real(t),
            Cell::Real(n.value.re),
            Cell::Real(n.value.im),
            Cell::Real(a.value.re),
            Cell::Real(a.value.im),
            Cell::Real(d),
            Cell::Real(printed.unwrap_or(f64::NAN)),
        ]);
        r.json.push(json!({
            "record": "rsi", "t": t, "numeric": n, "asymptotic": a, "relative_error": d, "printed_relative_error": printed,
        }));
    }
    Ok(r)
}

fn cmd_bench(
    file: &BTreeMap<String, String>,
    t: Option<f64>,
    budget: Option<u64>,
    reps: Option<usize>,
    params: &mut Value,
) -> Result<Report, Failure> {
    let t = pick(t, file, "t", 1e8)?;
    let budget = pick(budget, file, "budget", zeta_bench::MIN_TERM_BUDGET)?;
    let reps = pick(reps, file, "reps", zeta_bench::MIN_REPS)?;
    params["resolved"] = json!({ "t": t, "budget": budget, "reps": reps });
    let m = zeta_bench::measure_omega(t, budget, reps)?;
    let s = zeta_bench::realized_saving(t, &m)?;
    let mut r = Report::new(&[
        ("t", true),
        ("omega", true),
        ("rs_ns_per_term", true),
        ("new_ns_per_term", true),
        ("dispersion", true),
        ("predicted_pct", true),
        ("realized_pct", true),
        ("term_cost_pct", true),
    ]);
    r.text = format!(
        "t = {t}\nOmega = {:.3} ({:.1} ns per odd-integer term, {:.1} ns per Riemann-Siegel term, dispersion {:.3})\npredicted saving  = {:.2}%\nrealized saving   = {:.2}%\nterm-cost saving  = {:.2}%\n",
        m.omega, m.new_ns_per_term, m.rs_ns_per_term, m.dispersion, s.predicted_pct, s.realized_pct, s.term_cost_pct
    );
    r.csv_rows.push(vec![
        Cell::Real(t),
        Cell::Real(m.omega),
        Cell::Real(m.rs_ns_per_term),
        Cell::Real(m.new_ns_per_term),
        Cell::Real(m.dispersion),
        Cell::Real(s.predicted_pct),
        Cell::Real(s.realized_pct),
        Cell::Real(s.term_cost_pct),
    ]);
    r.json.push(json!({ "record": "bench", "measurement": m, "saving": s }));
    Ok(r)
}

fn with_run_id(mut v: Value, run_id: &str) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("run_id".into(), json!(run_id));
    }
    v
}

fn write_file(path: &Path, report: &Report, run_id: &str) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    if path.extension().is_some_and(|e| e == "jsonl") {
        for rec in &report.json {
            serde_json::to_writer(&mut w, &with_run_id(rec.clone(), run_id))?;
            writeln!(w)?;
        }
    } else {
        let mut csv = CsvWriter::new(w, run_id, &report.csv_header)?;
        for row in &report.csv_rows {
            csv.row(row)?;
        }
        if let Some(f) = &report.csv_footer {
            csv.raw_row(f)?;
        }
        w = csv.into_inner();
    }
    w.flush()
}

fn run(cli: Cli, manifest: &mut RunManifest) -> Result<Report, Failure> {
    let file = match &cli.config {
        Some(p) => config::load(p).map_err(Failure::Usage)?,
        None => BTreeMap::new(),
    };
    manifest.config = file.clone();
    let workers = pick(cli.workers, &file, "workers", default_workers())?.max(1);
    set_default_workers(workers);
    let mut params = json!({ "command": format!("{:?}", cli.cmd), "workers": workers });
    let report = match cli.cmd {
        Cmd::Z { t, method, omega, rounding, k_policy, bernoulli_terms, numeric, generic } => cmd_z(
            &file,
            t,
            method,
            omega,
            rounding,
            k_policy,
            bernoulli_terms,
            &numeric,
            &generic,
            workers,
            &mut params,
        ),
        Cmd::Gram { index, range } => cmd_gram(index, range),
        Cmd::Table1 { start, count, stride, rounding, omega, no_transition } => {
            cmd_table1(&file, start, count, stride, rounding, omega, no_transition, workers, &mut params)
        }
        Cmd::Tableai { preset, list } => cmd_tableai(preset, list, workers, &mut params),
        Cmd::Rsi { t } => cmd_rsi(t),
        Cmd::Bench { t, budget, reps } => cmd_bench(&file, t, budget, reps, &mut params),
    };
    manifest.parameters = params;
    report
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let json_out = cli.json;
    let out = cli.out.clone();
    let mut manifest = RunManifest::start(std::env::args().collect(), BTreeMap::new(), Value::Null);
    let result = run(cli, &mut manifest);
    manifest.finish(result.is_ok());

    let report = match result {
        Ok(r) => r,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Compute(m) => (EXIT_COMPUTE, m),
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Io(m) => (EXIT_IO, m),
            };
            eprintln!("zcli: {msg}");
            if json_out {
                println!("{}", json!({ "record": "error", "run_id": manifest.run_id, "message": msg }));
                println!("{}", json!({ "record": "manifest", "manifest": manifest }));
            }
            return ExitCode::from(code);
        }
    };

    if let Some(path) = &out {
        let written = write_file(path, &report, &manifest.run_id)
            .and_then(|_| manifest.write(&RunManifest::path_beside(path)))
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())));
        if let Err(Failure::Io(m)) = written {
            eprintln!("zcli: {m}");
            return ExitCode::from(EXIT_IO);
        }
    }
    if json_out {
        for rec in &report.json {
            println!("{}", with_run_id(rec.clone(), &manifest.run_id));
        }
        println!("{}", json!({ "record": "manifest", "manifest": manifest }));
    } else {
        print!("{}", report.text);
    }
    ExitCode::SUCCESS
}
