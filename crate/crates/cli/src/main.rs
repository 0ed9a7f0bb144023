use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use omega_core::correlation::{correlation_report, ell_terms, k_point_explore, theorem_c_bridge, theorem_c_sum, PairHistogram};
use omega_core::io::fmt_f64;
use omega_core::pretentious::{dist_formula_residual, halasz_audit, FrequencyFamily, MultFunSpec, TGrid};
use omega_core::reduction::{
    audit_against, major_arc_measure, prime_exponential_sum, prime_window, reduced_sum, window_endpoints, PrimeWindow,
    WindowOverrides,
};
use omega_core::sieve::{enumerate_primes, factor_counts, PrimeTable};
use omega_core::stats::{density_table, erdos_kac_ks, ValueHistogram};
use omega_core::{BoundedFunction, CountMode, Error, FactorCountBlock, SieveConfig, WeightKind};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const EXIT_FAILURE: u8 = 1;
const EXIT_UNKNOWN_PRESET: u8 = 3;
const EXIT_DEGENERATE_WINDOW: u8 = 4;
const EXIT_CAPACITY: u8 = 5;
const EXIT_CONTRACT: u8 = 6;
const EXIT_EMPTY_DOMAIN: u8 = 7;
const EXIT_BAD_INPUT: u8 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Ω and ω value counts.
    Sieve,
    /// Per-ℓ densities with the Gaussian model.
    Densities,
    /// Kolmogorov distance to the normal law.
    ErdosKac,
    /// Two-point correlation of a(Ω(n)) and b(Ω(n+h)).
    Correlate,
    /// ℓ-resolved discrepancies and their weighted sum.
    TheoremC,
    /// Distance formula residuals across the frequency family.
    Distance,
    /// Mean values against the exp(−M₀/16) bound.
    Halasz,
    /// Reduced sum over the prime window, one term per frequency.
    Reduce,
    /// Prime exponential sum on a grid in [0, 1).
    Circle,
    /// k-point correlations (exploratory).
    ExploreK,
}

#[derive(Debug, Parser)]
#[command(name = "omega-lab", version, about = "Sieves and correlation experiments for Ω(n)")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// JSON manifest; flags given on the command line take precedence.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    /// N, or a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Vec<u64>,

    #[arg(long, global = true)]
    a: Option<String>,

    #[arg(long, global = true)]
    b: Option<String>,

    /// Function list for explore-k.
    #[arg(long, global = true, value_delimiter = ',')]
    fns: Vec<String>,

    #[arg(long, global = true, value_enum)]
    weighting: Option<Weighting>,

    /// Shift h in Ω(n+h).
    #[arg(long, global = true)]
    shift: Option<u64>,

    #[arg(long, global = true)]
    h0: Option<f64>,

    #[arg(long, global = true)]
    h: Option<f64>,

    /// Archimedean twist for `distance`.
    #[arg(long, global = true)]
    t: Option<f64>,

    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Grid size for `circle`.
    #[arg(long, global = true)]
    grid: Option<u64>,

    #[arg(long, global = true, env = "OMEGA_LAB_WORKERS")]
    workers: Option<usize>,

    /// CSV destination; the JSON report goes next to it with a `.json` extension.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum Weighting {
    Cesaro,
    Log,
}

impl From<Weighting> for WeightKind {
    fn from(w: Weighting) -> Self {
        match w {
            Weighting::Cesaro => WeightKind::Cesaro,
            Weighting::Log => WeightKind::Logarithmic,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    command: Option<Command>,
    #[serde(default, alias = "N")]
    n: Vec<u64>,
    a: Option<String>,
    b: Option<String>,
    #[serde(default)]
    fns: Vec<String>,
    weighting: Option<Weighting>,
    shift: Option<u64>,
    h0: Option<f64>,
    h: Option<f64>,
    t: Option<f64>,
    epsilon: Option<f64>,
    grid: Option<u64>,
    worker_count: Option<usize>,
    output: Option<PathBuf>,
}

/// Manifest after defaults and flag overrides are applied.
#[derive(Debug, Clone, Serialize)]
struct Resolved {
    command: Command,
    n: Vec<u64>,
    a: String,
    b: String,
    fns: Vec<String>,
    weighting: Weighting,
    shift: u64,
    overrides: Option<WindowOverrides>,
    t: f64,
    epsilon: f64,
    grid: Option<u64>,
    #[serde(skip)]
    workers: Option<usize>,
    #[serde(skip)]
    output: Option<PathBuf>,
}

fn resolve(cli: Cli) -> anyhow::Result<Resolved> {
    let m: Manifest = match &cli.manifest {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?
        }
        None => Manifest::default(),
    };
    let command = cli.command.or(m.command).ok_or_else(|| anyhow!("no command given"))?;
    let n = if cli.n.is_empty() { m.n } else { cli.n };
    if n.is_empty() {
        bail!("no N given");
    }
    let overrides = match (cli.h0.or(m.h0), cli.h.or(m.h)) {
        (Some(h0), Some(h)) => Some(WindowOverrides { h0, h }),
        (None, None) => None,
        _ => return Err(Error::Format("window overrides need both --h0 and --h".into()).into()),
    };
    let a = cli.a.or(m.a).unwrap_or_else(|| "parity".into());
    let b = cli.b.or(m.b).unwrap_or_else(|| a.clone());
    let fns = if !cli.fns.is_empty() { cli.fns } else if !m.fns.is_empty() { m.fns } else { vec![a.clone(), b.clone()] };
    Ok(Resolved {
        command,
        n,
        a,
        b,
        fns,
        weighting: cli.weighting.or(m.weighting).unwrap_or(Weighting::Log),
        shift: cli.shift.or(m.shift).unwrap_or(1),
        overrides,
        t: cli.t.or(m.t).unwrap_or(0.0),
        epsilon: cli.epsilon.or(m.epsilon).unwrap_or(0.1),
        grid: cli.grid.or(m.grid),
        workers: cli.workers.or(m.worker_count),
        output: cli.out.or(m.output),
    })
}

struct Run {
    params: Resolved,
    config: SieveConfig,
    csv: String,
    summary: Vec<Value>,
}

impl Run {
    fn max_n(&self) -> u64 {
        self.params.n.iter().copied().max().unwrap_or(0)
    }

    fn omega_block(&self, hi: u64) -> anyhow::Result<FactorCountBlock> {
        Ok(factor_counts(1, hi, CountMode::BigOmega, &self.config)?)
    }

    fn preset(&self, spec: &str, n: u64) -> anyhow::Result<BoundedFunction> {
        Ok(BoundedFunction::from_preset(spec, n)?)
    }

    fn window(&self, n: u64, table: &PrimeTable) -> anyhow::Result<PrimeWindow> {
        Ok(prime_window(n, self.params.overrides, table)?)
    }

    fn window_top(&self, n: u64) -> f64 {
        match self.params.overrides {
            Some(o) => o.h,
            None => window_endpoints(n).1,
        }
    }
}

fn header(p: &Resolved, config: &SieveConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# command={}", serde_json::to_value(p.command).unwrap().as_str().unwrap_or_default());
    let _ = writeln!(
        s,
        "# a={} b={} weighting={} shift={} t={} epsilon={}",
        p.a,
        p.b,
        p.weighting.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default(),
        p.shift,
        fmt_f64(p.t),
        fmt_f64(p.epsilon)
    );
    for &n in &p.n {
        let mut line = format!("# n={n}");
        match FrequencyFamily::new(n) {
            Ok(f) => {
                let _ = write!(line, " A={} I_N=[{},{}]", fmt_f64(f.a), f.lo, f.hi);
            }
            Err(_) => line.push_str(" A=n/a I_N=n/a"),
        }
        let (h0, h) = match p.overrides {
            Some(o) => (o.h0, o.h),
            None => window_endpoints(n),
        };
        let _ = write!(
            line,
            " H0={} H={} window={} t_N={}",
            fmt_f64(h0),
            fmt_f64(h),
            if p.overrides.is_some() { "override" } else { "formula" },
            fmt_f64(config.truncation_cutoff(n))
        );
        let _ = writeln!(s, "{line}");
    }
    s
}

fn c(z: Complex64) -> String {
    format!("{},{}", fmt_f64(z.re), fmt_f64(z.im))
}

fn sieve_cmd(run: &mut Run) -> anyhow::Result<()> {
    let n = run.max_n();
    let big = factor_counts(1, n + 1, CountMode::BigOmega, &run.config)?;
    let small = factor_counts(1, n + 1, CountMode::SmallOmega, &run.config)?;
    run.csv.push_str("n,value,big_omega_count,small_omega_count\n");
    for &m in &run.params.n {
        let hb = ValueHistogram::from_block(&big, m)?;
        let hs = ValueHistogram::from_block(&small, m)?;
        for v in 0..=hb.max_value().max(hs.max_value()) {
            let _ = writeln!(run.csv, "{m},{v},{},{}", hb.count(v), hs.count(v));
        }
        let mean = |h: &ValueHistogram| {
            (0..=h.max_value()).map(|v| v as f64 * h.count(v) as f64).sum::<f64>() / m as f64
        };
        run.summary.push(json!({"n": m, "mean_big_omega": mean(&hb), "mean_small_omega": mean(&hs)}));
    }
    Ok(())
}

fn densities_cmd(run: &mut Run) -> anyhow::Result<()> {
    let block = run.omega_block(run.max_n() + 1)?;
    run.csv.push_str("n,ell,count,pi_bar,pi_bar_log,gaussian,ratio\n");
    for &n in &run.params.n.clone() {
        let table = density_table(&ValueHistogram::from_block(&block, n)?)?;
        for r in &table.rows {
            let _ = writeln!(
                run.csv,
                "{n},{},{},{},{},{},{}",
                r.ell,
                r.count,
                fmt_f64(r.pi_bar),
                fmt_f64(r.pi_bar_log),
                fmt_f64(r.gaussian),
                fmt_f64(r.ratio())
            );
        }
        run.summary.push(json!({
            "n": n,
            "count_total": table.count_total(),
            "pi_bar_sum": table.pi_bar_sum(),
            "pi_bar_log_sum": table.pi_bar_log_sum(),
        }));
    }
    Ok(())
}

fn erdos_kac_cmd(run: &mut Run) -> anyhow::Result<()> {
    let block = run.omega_block(run.max_n() + 1)?;
    run.csv.push_str("n,ks,normalized,at\n");
    for &n in &run.params.n.clone() {
        let k = erdos_kac_ks(&ValueHistogram::from_block(&block, n)?)?;
        let _ = writeln!(run.csv, "{n},{},{},{}", fmt_f64(k.ks), fmt_f64(k.normalized), fmt_f64(k.at));
        run.summary.push(json!({"n": n, "ks": k.ks, "normalized": k.normalized}));
    }
    Ok(())
}

fn correlate_cmd(run: &mut Run) -> anyhow::Result<()> {
    let shift = run.params.shift;
    let block = run.omega_block(run.max_n() + shift + 1)?;
    let kind: WeightKind = run.params.weighting.into();
    run.csv.push_str("n,shift,lhs_re,lhs_im,prediction_re,prediction_im,error\n");
    for &n in &run.params.n.clone() {
        let (a, b) = (run.preset(&run.params.a, n)?, run.preset(&run.params.b, n)?);
        let pairs = PairHistogram::new(&block, n, shift)?;
        let r = correlation_report(&a, &b, &pairs, kind);
        let _ = writeln!(run.csv, "{n},{shift},{},{},{}", c(r.lhs), c(r.prediction), fmt_f64(r.error));
        run.summary.push(serde_json::to_value(&r)?);
    }
    Ok(())
}

fn theorem_c_cmd(run: &mut Run) -> anyhow::Result<()> {
    let block = run.omega_block(run.max_n() + 2)?;
    run.csv.push_str("n,ell,pi_bar,pi_bar_log,conditional_re,conditional_im,discrepancy\n");
    for &n in &run.params.n.clone() {
        let (a, b) = (run.preset(&run.params.a, n)?, run.preset(&run.params.b, n)?);
        let pairs = PairHistogram::new(&block, n, 1)?;
        let (terms, mean) = ell_terms(&a, &pairs);
        for t in &terms {
            let _ = writeln!(
                run.csv,
                "{n},{},{},{},{},{}",
                t.ell,
                fmt_f64(t.pi_bar),
                fmt_f64(t.pi_bar_log),
                c(t.conditional),
                fmt_f64(t.discrepancy)
            );
        }
        let bridge = theorem_c_bridge(&a, &b, &pairs)?;
        run.summary.push(json!({
            "n": n,
            "mean": [mean.re, mean.im],
            "sum": theorem_c_sum(&a, &pairs)?,
            "bridge": {
                "theorem_c": bridge.theorem_c,
                "l1_gap": bridge.l1_gap,
                "sign_error": bridge.sign_error,
                "lower_bound": bridge.lower_bound,
                "other_error": bridge.other_error,
                "upper_bound": bridge.upper_bound,
                "holds": bridge.holds,
            },
        }));
    }
    Ok(())
}

fn distance_cmd(run: &mut Run) -> anyhow::Result<()> {
    let table = enumerate_primes(run.max_n())?;
    let t = run.params.t;
    run.csv.push_str("n,xi,t,dist_sq,formula,residual\n");
    for &n in &run.params.n.clone() {
        let fam = FrequencyFamily::new(n)?;
        let mut worst = 0.0f64;
        for xi in fam.members() {
            let r = dist_formula_residual(xi, n, t, &fam, &table)?;
            worst = worst.max(r.residual);
            let _ = writeln!(
                run.csv,
                "{n},{xi},{},{},{},{}",
                fmt_f64(t),
                fmt_f64(r.dist_sq),
                fmt_f64(r.formula),
                fmt_f64(r.residual)
            );
        }
        run.summary.push(json!({"n": n, "max_residual": worst}));
    }
    Ok(())
}

/// Multiplicative counterpart of a preset: parity ↦ λ, fourier-mode:ξ ↦ f_ξ.
fn mult_preset(spec: &str, fam: &FrequencyFamily) -> anyhow::Result<MultFunSpec> {
    let unknown = || Error::UnknownPreset(spec.to_string());
    let f = match spec.split_once(':') {
        None if spec == "parity" || spec == "liouville" => MultFunSpec::liouville(),
        None if spec == "const" || spec == "one" => MultFunSpec::one(),
        Some(("fourier-mode", xi)) => MultFunSpec::frequency(xi.trim().parse().map_err(|_| unknown())?, fam),
        Some(("random", seed)) => MultFunSpec::random(seed.trim().parse().map_err(|_| unknown())?),
        _ => return Err(unknown().into()),
    };
    Ok(f)
}

fn halasz_cmd(run: &mut Run) -> anyhow::Result<()> {
    let block = run.omega_block(run.max_n() + 1)?;
    let table = enumerate_primes(run.max_n())?;
    run.csv.push_str("n,function,mean_re,mean_im,m0,argmin_t,bound,ratio\n");
    let mut specs = vec![run.params.a.clone()];
    if run.params.b != run.params.a {
        specs.push(run.params.b.clone());
    }
    for &n in &run.params.n.clone() {
        let fam = FrequencyFamily::new(n)?;
        let hist = ValueHistogram::from_block(&block, n)?;
        let grid = TGrid::symmetric_log((n as f64).ln(), 201)?;
        for spec in &specs {
            let f = mult_preset(spec, &fam)?;
            let h = halasz_audit(&f, n, &table, &grid, Some(&hist))?;
            let _ = writeln!(
                run.csv,
                "{n},{},{},{},{},{},{}",
                spec,
                c(h.mean),
                fmt_f64(h.m0),
                fmt_f64(h.argmin_t),
                fmt_f64(h.bound),
                fmt_f64(h.ratio)
            );
            run.summary.push(json!({"n": n, "function": spec, "ratio": h.ratio, "m0": h.m0}));
        }
    }
    Ok(())
}

fn reduce_cmd(run: &mut Run) -> anyhow::Result<()> {
    let top = run.params.n.iter().map(|&n| run.window_top(n)).fold(0.0, f64::max);
    let table = enumerate_primes((top.max(2.0).ceil() as u64).max(2))?;
    let block = run.omega_block(run.max_n() + top.ceil() as u64 + 2)?;
    run.csv.push_str("n,xi,term\n");
    for &n in &run.params.n.clone() {
        let fam = FrequencyFamily::new(n)?;
        let window = run.window(n, &table)?;
        let xi: Vec<i64> = fam.members().collect();
        let reduced = reduced_sum(&block, n, &window, &fam, &xi)?;
        for &(x, term) in &reduced.terms {
            let _ = writeln!(run.csv, "{n},{x},{}", fmt_f64(term));
        }
        let (a, b) = (run.preset(&run.params.a, n)?, run.preset(&run.params.b, n)?);
        let pairs = PairHistogram::new(&block, n, 1)?;
        let audit = audit_against(&a, &b, &pairs, reduced)?;
        run.summary.push(json!({
            "n": n,
            "window": {"h0": window.h0, "h": window.h, "primes": window.primes.len(), "reciprocal_sum": window.reciprocal_sum},
            "total": audit.reduced.total,
            "small": audit.reduced.small,
            "large": audit.reduced.large,
            "threshold": audit.reduced.threshold,
            "audit": {"lhs": audit.lhs, "sqrt_reduced": audit.sqrt_reduced, "o_term": audit.o_term, "slack": audit.slack},
        }));
    }
    Ok(())
}

fn circle_cmd(run: &mut Run) -> anyhow::Result<()> {
    let top = run.params.n.iter().map(|&n| run.window_top(n)).fold(0.0, f64::max);
    let table = enumerate_primes((top.ceil() as u64).max(2))?;
    run.csv.push_str("n,alpha,abs_sum\n");
    for &n in &run.params.n.clone() {
        let window = run.window(n, &table)?;
        let grid = run.params.grid.unwrap_or(10 * window.max_prime());
        let arcs = major_arc_measure(&window, run.params.epsilon, grid)?;
        for j in 0..grid {
            let alpha = j as f64 / grid as f64;
            let _ = writeln!(run.csv, "{n},{},{}", fmt_f64(alpha), fmt_f64(prime_exponential_sum(&window, alpha).norm()));
        }
        run.summary.push(serde_json::to_value(&arcs)?);
    }
    Ok(())
}

fn explore_k_cmd(run: &mut Run) -> anyhow::Result<()> {
    let k = run.params.fns.len() as u64;
    let block = run.omega_block(run.max_n() + k + 1)?;
    let kind: WeightKind = run.params.weighting.into();
    run.csv.push_str("n,k,value_re,value_im,product_re,product_im,gap,label\n");
    for &n in &run.params.n.clone() {
        let fns: Vec<BoundedFunction> =
            run.params.fns.iter().map(|s| run.preset(s, n)).collect::<anyhow::Result<_>>()?;
        let r = k_point_explore(&fns, &block, n, kind)?;
        let _ = writeln!(
            run.csv,
            "{n},{},{},{},{},{}",
            r.k,
            c(r.value),
            c(r.product_of_means),
            fmt_f64(r.gap),
            r.label
        );
        run.summary.push(serde_json::to_value(&r)?);
    }
    Ok(())
}

fn write_atomic(path: &Path, body: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating file in {}", dir.display()))?;
    tmp.write_all(body)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn execute(params: Resolved) -> anyhow::Result<()> {
    let config = match params.workers {
        Some(w) => SieveConfig::with_workers(w),
        None => SieveConfig::default(),
    };
    let mut run = Run { csv: header(&params, &config), params, config, summary: Vec::new() };
    match run.params.command {
        Command::Sieve => sieve_cmd(&mut run)?,
        Command::Densities => densities_cmd(&mut run)?,
        Command::ErdosKac => erdos_kac_cmd(&mut run)?,
        Command::Correlate => correlate_cmd(&mut run)?,
        Command::TheoremC => theorem_c_cmd(&mut run)?,
        Command::Distance => distance_cmd(&mut run)?,
        Command::Halasz => halasz_cmd(&mut run)?,
        Command::Reduce => reduce_cmd(&mut run)?,
        Command::Circle => circle_cmd(&mut run)?,
        Command::ExploreK => explore_k_cmd(&mut run)?,
    }

    let digest = Sha256::digest(run.csv.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    match &run.params.output {
        Some(path) => {
            let report = json!({
                "manifest": run.params,
                "workers": run.config.worker_count,
                "csv": path.file_name().map(|s| s.to_string_lossy().into_owned()),
                "csv_sha256": hex,
                "results": run.summary,
            });
            let mut body = serde_json::to_vec_pretty(&report)?;
            body.push(b'\n');
            write_atomic(path, run.csv.as_bytes())?;
            write_atomic(&path.with_extension("json"), &body)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(run.csv.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::UnknownPreset(_)) => EXIT_UNKNOWN_PRESET,
        Some(Error::DegenerateWindow { .. }) => EXIT_DEGENERATE_WINDOW,
        Some(Error::Capacity(_)) => EXIT_CAPACITY,
        Some(Error::Contract(_)) => EXIT_CONTRACT,
        Some(Error::EmptyDomain(_)) => EXIT_EMPTY_DOMAIN,
        Some(Error::Format(_)) => EXIT_BAD_INPUT,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match resolve(cli).and_then(execute) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("omega-lab: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
