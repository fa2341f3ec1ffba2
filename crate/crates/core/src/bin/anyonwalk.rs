use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use anyonwalk::braid::{close_link, combined_word, CoinHistory, PathPair, WalkConfig};
use anyonwalk::fusion::DEFAULT_PHASE_CONVENTION;
use anyonwalk::linkinv::{
    arf, jones_at_i, linking_profile, tau, writhe_corrected_bracket, Arf, BracketValue,
    DEFAULT_BRACKET_CAP,
};
use anyonwalk::properstats::{
    analytic_bound, endpoint_s, lattice_counts, parity_probs, proper_density, DensityMethod,
};
use anyonwalk::selfcheck::run_selfcheck;
use anyonwalk::walkdist::{
    anyonic_distribution, classical_rw, coin_z, hadamard_qw, pair_contribution, stats, DistRequest,
    Distribution, McScheme, Method,
};
use anyonwalk::{Error, Result};

const SELFCHECK_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "anyonwalk", version, about = "Quantum walk of a mobile Ising anyon")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "ANYONWALK_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Position distribution of the anyonic walk next to the Hadamard and classical walks.
    Dist(DistArgs),
    /// Variance and total variation distances over a range of step counts.
    VarianceScan(ScanArgs),
    /// Link invariants of the closure of one path pair.
    Invariants(InvArgs),
    /// Density of proper links among non-mirror pairs, with the parity bound.
    ProperDensity(DensityArgs),
    /// Cross-check the independent evaluators at small sizes.
    Selfcheck,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Mc,
    Transfer,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Mc => Method::Mc,
            MethodArg::Transfer => Method::Transfer,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Pairs,
    Pooled,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; the format follows the extension (.csv or .json). Default: CSV on stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Force the output format.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args)]
struct GeometryArgs {
    /// Strand count (default 2t + 2).
    #[arg(long)]
    n: Option<usize>,
    /// Starting site (default ceil(n/2)).
    #[arg(long)]
    s0: Option<usize>,
}

#[derive(Args)]
struct MethodArgs {
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "pairs")]
    mc_scheme: SchemeArg,
    /// Monte Carlo budget; scientific notation such as 1e7 is accepted.
    #[arg(long, value_parser = parse_count)]
    samples: Option<u64>,
    /// Required for Monte Carlo.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    t: usize,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    method: MethodArgs,
    /// Replace every fusion trace by 1.
    #[arg(long)]
    stub_trivial_bracket: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 1)]
    t_min: usize,
    #[arg(long)]
    t_max: usize,
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct InvArgs {
    /// Forward coin history, e.g. 10011.
    #[arg(long)]
    a: String,
    /// Backward coin history.
    #[arg(long)]
    b: String,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Skip the state-sum bracket above this many crossings.
    #[arg(long, default_value_t = DEFAULT_BRACKET_CAP)]
    bracket_cap: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long, default_value_t = 4)]
    t_min: usize,
    #[arg(long)]
    t_max: usize,
    /// Right-move count (default t/2, the starting site).
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    method: DensityArg,
    #[arg(long, value_parser = parse_count)]
    samples: Option<u64>,
    /// Required for the mc method and for the parity estimate of rho.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_count, default_value = "20000")]
    parity_samples: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum DensityArg {
    Exact,
    Mc,
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.replace('_', "").parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("{s:?} is not a non-negative integer")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.cmd {
        Cmd::Dist(a) => cmd_dist(a),
        Cmd::VarianceScan(a) => cmd_variance_scan(a),
        Cmd::Invariants(a) => cmd_invariants(a),
        Cmd::ProperDensity(a) => cmd_proper_density(a),
        Cmd::Selfcheck => cmd_selfcheck(),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn config(t: usize, g: &GeometryArgs) -> Result<WalkConfig> {
    let cfg = WalkConfig::new(t, g.n.unwrap_or(2 * t + 2))?;
    match g.s0 {
        Some(s0) => cfg.with_s0(s0),
        None => Ok(cfg),
    }
}

fn request(m: &MethodArgs) -> DistRequest {
    DistRequest {
        method: m.method.into(),
        scheme: match m.mc_scheme {
            SchemeArg::Pairs => McScheme::Pairs,
            SchemeArg::Pooled => McScheme::Pooled,
        },
        samples: m.samples,
        seed: m.seed,
        stub_trivial_bracket: false,
    }
}

fn method_label(req: &DistRequest) -> String {
    match (req.method, req.scheme) {
        (Method::Exact, _) if req.stub_trivial_bracket => "exact-stub".into(),
        (Method::Mc, McScheme::Pairs) => "mc-pairs".into(),
        (Method::Mc, McScheme::Pooled) => "mc-pooled".into(),
        (m, _) => m.name().into(),
    }
}

fn format_of(out: &OutputArgs) -> Result<Format> {
    if let Some(f) = out.format {
        return Ok(f);
    }
    match out.output.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        None | Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(Error::InvalidArgument(format!(
            "cannot infer an output format from extension .{other}"
        ))),
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<R: Serialize>(out: &OutputArgs, rows: &[R], meta: serde_json::Value) -> Result<()> {
    let format = format_of(out)?;
    let mut w = sink(&out.output)?;
    match format {
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            for r in rows {
                c.serialize(r)?;
            }
            c.flush()?;
        }
        Format::Json => {
            let mut doc = meta;
            doc["rows"] = serde_json::to_value(rows)?;
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

fn conventions() -> serde_json::Value {
    json!({
        "bracket": BracketValue::CONVENTIONS,
        "fusion": DEFAULT_PHASE_CONVENTION,
        "position": "x = 2s + s0 - t, s = right moves",
        "initial_coin": "|0>, Hadamard coin",
    })
}

#[derive(Serialize)]
struct DistRow {
    t: usize,
    s: usize,
    x: usize,
    p_anyonic: f64,
    p_qw: f64,
    p_rw: f64,
    method: String,
    stderr: Option<f64>,
}

fn cmd_dist(a: DistArgs) -> Result<u8> {
    let cfg = config(a.t, &a.geometry)?;
    let mut req = request(&a.method);
    req.stub_trivial_bracket = a.stub_trivial_bracket;
    let d = anyonic_distribution(&cfg, &req)?;
    let (qw, rw) = (hadamard_qw(&cfg), classical_rw(&cfg));
    let label = method_label(&req);
    let (p, pq, pr) = (d.probabilities(), qw.probabilities(), rw.probabilities());
    let rows: Vec<DistRow> = (0..=cfg.t())
        .map(|s| DistRow {
            t: cfg.t(),
            s,
            x: cfg.position(s),
            p_anyonic: p[s],
            p_qw: pq[s],
            p_rw: pr[s],
            method: label.clone(),
            stderr: d.stderr().map(|e| e[s]),
        })
        .collect();
    let st = stats(&d, &[&qw, &rw])?;
    let meta = json!({
        "command": "dist",
        "version": env!("CARGO_PKG_VERSION"),
        "t": cfg.t(),
        "n": cfg.n(),
        "s0": cfg.s0(),
        "method": label,
        "samples": req.samples,
        "seed": req.seed,
        "conventions": conventions(),
        "numerators_over_2_pow_t": d.numerators().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        "normalized_exactly": d.exact_normalized(),
        "variance": { "anyonic": st.variance, "qw": stats(&qw, &[])?.variance, "rw": stats(&rw, &[])?.variance },
        "tv": { "qw": st.tv[0], "rw": st.tv[1] },
    });
    emit(&a.out, &rows, meta)?;
    Ok(0)
}

#[derive(Serialize)]
struct ScanRow {
    t: usize,
    var_anyonic: f64,
    var_qw: f64,
    var_rw: f64,
    tv_qw: f64,
    tv_rw: f64,
    method: String,
}

fn scan_row(d: &Distribution, label: &str) -> Result<ScanRow> {
    let cfg = d.config();
    let (qw, rw) = (hadamard_qw(cfg), classical_rw(cfg));
    let st = stats(d, &[&qw, &rw])?;
    Ok(ScanRow {
        t: cfg.t(),
        var_anyonic: st.variance,
        var_qw: stats(&qw, &[])?.variance,
        var_rw: stats(&rw, &[])?.variance,
        tv_qw: st.tv[0],
        tv_rw: st.tv[1],
        method: label.to_string(),
    })
}

fn cmd_variance_scan(a: ScanArgs) -> Result<u8> {
    if a.t_min > a.t_max {
        return Err(Error::InvalidArgument(format!("empty range {}..={}", a.t_min, a.t_max)));
    }
    let req = request(&a.method);
    let label = method_label(&req);
    let mut rows = Vec::new();
    for t in a.t_min..=a.t_max {
        let cfg = WalkConfig::with_steps(t)?;
        rows.push(scan_row(&anyonic_distribution(&cfg, &req)?, &label)?);
    }
    let meta = json!({
        "command": "variance-scan",
        "version": env!("CARGO_PKG_VERSION"),
        "t_min": a.t_min,
        "t_max": a.t_max,
        "method": label,
        "samples": req.samples,
        "seed": req.seed,
        "conventions": conventions(),
    });
    emit(&a.out, &rows, meta)?;
    Ok(0)
}

fn cmd_invariants(a: InvArgs) -> Result<u8> {
    let ha: CoinHistory = a.a.parse()?;
    let hb: CoinHistory = a.b.parse()?;
    let cfg = config(ha.len(), &a.geometry)?;
    let pair = PathPair::new(ha, hb)?;
    let word = combined_word(&pair, &cfg)?;
    let link = close_link(&word);
    let profile = linking_profile(&link)?;
    let proper = profile.is_proper();
    let (tau_v, arf_v) = if proper {
        let arf_v = match arf(&link)? {
            Arf::Defined(v) => json!(v),
            Arf::NotProper => json!("not proper"),
        };
        (json!(tau(&link)?), arf_v)
    } else {
        (json!(null), json!("not proper"))
    };
    let bracket = if link.crossings().len() <= a.bracket_cap {
        json!(writhe_corrected_bracket(&link)?)
    } else {
        json!(null)
    };
    let z = coin_z(&pair);
    let report = json!({
        "command": "invariants",
        "version": env!("CARGO_PKG_VERSION"),
        "a": ha.to_string(),
        "b": hb.to_string(),
        "t": cfg.t(),
        "n": cfg.n(),
        "s0": cfg.s0(),
        "mirror": pair.is_mirror(),
        "right_moves": pair.right_moves(),
        "braid_word": word.to_string(),
        "components": link.component_count(),
        "crossings": link.crossings().len(),
        "linking": profile,
        "proper": proper,
        "status": if proper { "proper" } else { "not proper" },
        "z": z,
        "tau": tau_v,
        "arf": arf_v,
        "jones_at_i": jones_at_i(&link)?,
        "bracket_statesum": bracket,
        "contribution_sign": pair_contribution(&pair, &cfg)?,
        "conventions": conventions(),
    });
    if let Some(ext) = a.output.as_ref().and_then(|p| p.extension()) {
        if ext != "json" {
            return Err(Error::InvalidArgument("the invariants report is JSON only".into()));
        }
    }
    let mut w = sink(&a.output)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    Ok(0)
}

#[derive(Serialize)]
struct DensityRow {
    t: usize,
    s: Option<usize>,
    p_prop: Option<f64>,
    method: &'static str,
    stderr: Option<f64>,
    rho: Option<f64>,
    bound: Option<f64>,
    bound_holds: Option<bool>,
}

fn cmd_proper_density(a: DensityArgs) -> Result<u8> {
    if a.t_min > a.t_max {
        return Err(Error::InvalidArgument(format!("empty range {}..={}", a.t_min, a.t_max)));
    }
    let (method, label) = match a.method {
        DensityArg::Exact => (DensityMethod::Exact, "exact"),
        DensityArg::Mc => (DensityMethod::Mc, "mc"),
    };
    if a.seed.is_none() {
        eprintln!("note: no --seed given, rho and the bound are left empty");
    }
    let lattice = lattice_counts(2)?;
    eprintln!(
        "lattice self-test n=2: all={} |P_1|={} |P_2|={} identities {}",
        lattice.all,
        lattice.pw[0],
        lattice.pw[1],
        if lattice.identities_hold() { "hold" } else { "FAIL" }
    );
    let mut rows = Vec::new();
    for t in a.t_min..=a.t_max {
        let cfg = WalkConfig::with_steps(t)?;
        let Some(s) = a.s.or_else(|| endpoint_s(t)) else {
            eprintln!("t = {t}: empty stratum, odd t never returns to s0");
            rows.push(DensityRow {
                t,
                s: None,
                p_prop: None,
                method: label,
                stderr: None,
                rho: None,
                bound: None,
                bound_holds: None,
            });
            continue;
        };
        let d = proper_density(&cfg, s, method, a.samples, a.seed)?;
        if d.value.is_none() {
            eprintln!("t = {t}, s = {s}: empty stratum, no non-mirror pairs");
        }
        let rho = match a.seed {
            Some(seed) => parity_probs(&cfg, s, a.parity_samples, seed)?.rho,
            None => None,
        };
        let bound = rho.and_then(|r| analytic_bound(r, t).ok());
        rows.push(DensityRow {
            t,
            s: Some(s),
            p_prop: d.value,
            method: label,
            stderr: (method == DensityMethod::Mc).then_some(d.stderr),
            rho,
            bound,
            bound_holds: bound.zip(d.value).map(|(b, p)| b >= p),
        });
    }
    let meta = json!({
        "command": "proper-density",
        "version": env!("CARGO_PKG_VERSION"),
        "method": label,
        "samples": a.samples,
        "seed": a.seed,
        "parity_samples": a.parity_samples,
        "lattice_selftest": {
            "n": 2,
            "all": lattice.all.to_string(),
            "pw": lattice.pw.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "ok": lattice.identities_hold(),
        },
    });
    emit(&a.out, &rows, meta)?;
    Ok(0)
}

fn cmd_selfcheck() -> Result<u8> {
    let rows = run_selfcheck();
    let mut out = io::stdout().lock();
    for r in &rows {
        writeln!(out, "{:<20} {:<4} {}", r.name, if r.passed { "pass" } else { "FAIL" }, r.detail)?;
    }
    Ok(if rows.iter().all(|r| r.passed) { 0 } else { SELFCHECK_FAILED })
}
