use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use slereg_core::exponents::{
    admissible_besov, admissible_hoelder, admissible_pvar, alpha_star, alpha_zero, check_delta, hausdorff_upper, interval_i, interval_pairs, j1_pm,
    moment_order_q, p_star, r1_pm, r_critical, region_scan, BesovParams, WindowMode,
};
use slereg_core::regularity::{besov_seminorm, hoelder_norm, p_variation};
use slereg_core::{DrivingPath, Kappa};

use slereg::experiments::{self, ExperimentConfig, Report, Table};
use slereg::format::{human, machine};
use slereg::io::{self, BinaryHeader, SeminormRecord};
use slereg::manifest::{config_hash, unix_now, RunManifest, MANIFEST_FILE};
use slereg::runner::{thread_count, Runner};
use slereg::Error;

#[derive(Parser)]
#[command(name = "slereg", version, about = "Regularity exponents and Monte Carlo checks for SLE traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form exponents and admissible sets for one kappa.
    Exponents {
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        /// Report the moment order Q(p, kappa); may be repeated.
        #[arg(long = "q-moment-at-p")]
        q_moment_at_p: Vec<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Admissible sets over a kappa grid (figure data).
    Regions {
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = RegionFormat::Csv)]
        format: RegionFormat,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate one trace and write it with a manifest.
    Simulate {
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "slereg-out")]
        out: PathBuf,
        /// Use the zero driving function (trace 2i√t).
        #[arg(long)]
        zero_driving: bool,
        /// Evaluation height; defaults to √dt.
        #[arg(long)]
        y_eval: Option<f64>,
        /// Keep every stride-th time step.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long, value_enum, default_value_t = TraceFormat::Both)]
        format: TraceFormat,
    },
    /// Seminorms of a sampled path, one JSON line each.
    Norms {
        file: PathBuf,
        #[arg(long)]
        pvar: Vec<f64>,
        /// `from:to:step`.
        #[arg(long)]
        pvar_sweep: Option<String>,
        #[arg(long)]
        hoelder: Vec<f64>,
        /// Also report Hölder norms on [epsilon, end].
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        besov: Option<f64>,
        /// Take q = q(r) and check delta against the window of r.
        #[arg(long, requires = "kappa")]
        r: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        kappa: Option<f64>,
        /// Use this q without a window check (delta in (0, 1)).
        #[arg(long, conflicts_with = "r")]
        besov_q: Option<f64>,
        /// `a:b`, restrict the path to [a, b] first.
        #[arg(long)]
        window: Option<String>,
    },
    /// Run a Monte Carlo experiment from a JSON config.
    Experiment {
        config: Option<PathBuf>,
        /// Re-run the configuration embedded in a manifest.
        #[arg(long, conflicts_with = "config")]
        from_manifest: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Discard an existing checkpoint.
        #[arg(long)]
        fresh: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    Csv,
    Bin,
    Both,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Usage(e.to_string()),
            Error::Core(ref c) if is_parameter_error(c) => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e),
        }
    }
}

impl From<slereg_core::Error> for Failure {
    fn from(e: slereg_core::Error) -> Self {
        Error::Core(e).into()
    }
}

fn is_parameter_error(e: &slereg_core::Error) -> bool {
    use slereg_core::Error as E;
    matches!(
        e,
        E::InvalidKappa(_) | E::InvalidParameter { .. } | E::DeltaOutsideWindow { .. } | E::EmptyWindow { .. } | E::NotAdmissible { .. } | E::Domain { .. }
    )
}

type CliResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Exponents { kappa, q_moment_at_p, json } => cmd_exponents(kappa, &q_moment_at_p, json),
        Command::Regions { from, to, steps, format, out } => cmd_regions(from, to, steps, format, out.as_deref()),
        Command::Simulate { kappa, horizon, dt, seed, out, zero_driving, y_eval, stride, format } => {
            cmd_simulate(SimulateArgs { kappa, horizon, dt, seed, zero_driving, y_eval, stride }, &out, format)
        }
        Command::Norms { file, pvar, pvar_sweep, hoelder, epsilon, besov, r, kappa, besov_q, window } => {
            cmd_norms(&file, NormArgs { pvar, pvar_sweep, hoelder, epsilon, besov, r, kappa, besov_q, window })
        }
        Command::Experiment { config, from_manifest, out, threads, fresh } => cmd_experiment(config, from_manifest, out, threads, fresh),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn kappa_arg(kappa: f64) -> std::result::Result<Kappa, Failure> {
    Kappa::new(kappa).map_err(|e| Failure::Usage(format!("--kappa: {e}")))
}

#[derive(Serialize)]
struct ExponentSummary {
    kappa: f64,
    attainable: bool,
    r_c: f64,
    r1_minus: f64,
    r1_plus: f64,
    j1: Option<(f64, f64)>,
    i: Vec<(f64, f64)>,
    i_j1: Vec<(f64, f64)>,
    i_j2: Vec<(f64, f64)>,
    pvar_admissible: Vec<(f64, f64)>,
    p_star: f64,
    alpha_star: f64,
    alpha_zero: f64,
    hausdorff_upper: f64,
    q_moments: Vec<QMoment>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct QMoment {
    p: f64,
    q: f64,
}

fn cmd_exponents(kappa: f64, ps: &[f64], json: bool) -> CliResult {
    let k = kappa_arg(kappa)?;
    let (r1m, r1p) = r1_pm(k);
    let pvar_set = admissible_pvar(k);
    let q_moments = ps
        .iter()
        .map(|&p| moment_order_q(p, k).map(|q| QMoment { p, q }).map_err(|e| Failure::Usage(format!("--q-moment-at-p {p}: {e}"))))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut notes = Vec::new();
    if pvar_set.is_empty() {
        notes.push(format!("kappa = {kappa}: the admissible set for p-variation is empty, no moment bound applies"));
    }
    let s = ExponentSummary {
        kappa,
        attainable: k.attainable(),
        r_c: r_critical(k),
        r1_minus: r1m,
        r1_plus: r1p,
        j1: j1_pm(k),
        i: interval_pairs(&interval_i(k)),
        i_j1: interval_pairs(&admissible_besov(k)),
        i_j2: interval_pairs(&admissible_hoelder(k)),
        pvar_admissible: interval_pairs(&pvar_set),
        p_star: p_star(k),
        alpha_star: alpha_star(k),
        alpha_zero: alpha_zero(k),
        hausdorff_upper: hausdorff_upper(k),
        q_moments,
        notes,
    };
    if json {
        println!("{}", serde_json::to_string(&s).map_err(Error::from)?);
        return Ok(());
    }
    let row = |name: &str, v: String| println!("{name:<22} {v}");
    row("kappa", human(kappa));
    row("r_c", human(s.r_c));
    row("r1-", human(s.r1_minus));
    row("r1+", human(s.r1_plus));
    if let Some((a, b)) = s.j1 {
        row("j1-", human(a));
        row("j1+", human(b));
    }
    row("I", set_human(&s.i));
    row("I ∩ J1", set_human(&s.i_j1));
    row("I ∩ J2", set_human(&s.i_j2));
    row("p-var admissible", set_human(&s.pvar_admissible));
    row("p*", human(s.p_star));
    row("alpha*", human(s.alpha_star));
    row("alpha0", human(s.alpha_zero));
    row("dim upper bound", human(s.hausdorff_upper));
    for m in &s.q_moments {
        row(&format!("Q(p={})", human(m.p)), human(m.q));
    }
    for n in &s.notes {
        println!("note: {n}");
    }
    Ok(())
}

fn set_human(pairs: &[(f64, f64)]) -> String {
    if pairs.is_empty() {
        return "∅".into();
    }
    pairs.iter().map(|(a, b)| format!("({}, {})", human(*a), human(*b))).collect::<Vec<_>>().join(" ∪ ")
}

fn cmd_regions(from: f64, to: f64, steps: usize, format: RegionFormat, out: Option<&Path>) -> CliResult {
    if !(from > 0.0) {
        return Err(Failure::Usage(format!("--from must be positive, got {from}")));
    }
    let rows = region_scan(from, to, steps)?;
    let write = |w: &mut dyn std::io::Write| -> slereg::Result<()> {
        match format {
            RegionFormat::Csv => io::write_region_csv(w, &rows),
            RegionFormat::Json => io::write_json_line(w, &io::region_json(&rows)),
        }
    };
    match out {
        Some(path) => io::write_file(path, |w| write(w))?,
        None => write(&mut std::io::stdout().lock())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateArgs {
    kappa: f64,
    horizon: f64,
    dt: f64,
    seed: u64,
    zero_driving: bool,
    y_eval: Option<f64>,
    stride: usize,
}

fn cmd_simulate(args: SimulateArgs, out: &Path, format: TraceFormat) -> CliResult {
    let started = unix_now();
    let k = kappa_arg(args.kappa)?;
    if !(args.horizon > 0.0 && args.dt > 0.0 && args.dt <= args.horizon) {
        return Err(Failure::Usage(format!("need 0 < dt <= T, got dt = {}, T = {}", args.dt, args.horizon)));
    }
    let steps = (args.horizon / args.dt).round() as usize;
    if ((steps as f64) * args.dt - args.horizon).abs() > 1e-9 * args.horizon {
        return Err(Failure::Usage(format!("T = {} is not a multiple of dt = {}", args.horizon, args.dt)));
    }
    if args.stride == 0 || steps % args.stride != 0 {
        return Err(Failure::Usage(format!("--stride {} must divide the {steps} steps", args.stride)));
    }
    let y_eval = args.y_eval.unwrap_or(args.dt.sqrt());
    if !(y_eval > 0.0) {
        return Err(Failure::Usage(format!("--y-eval must be positive, got {y_eval}")));
    }
    let driving = if args.zero_driving {
        DrivingPath::zero(args.horizon, steps)?
    } else {
        DrivingPath::sample(k, args.horizon, steps, args.seed)?
    };
    let trace = driving.trace_strided(args.stride, y_eval)?;
    std::fs::create_dir_all(out).map_err(|e| Error::Io { path: out.into(), source: e })?;
    let mut outputs = Vec::new();
    if format != TraceFormat::Bin {
        io::write_file(&out.join("trace.csv"), |w| io::write_trace_csv(w, &trace))?;
        outputs.push("trace.csv".to_string());
    }
    if format != TraceFormat::Csv {
        let header = BinaryHeader { kappa: args.kappa, dt: args.dt * args.stride as f64, n: trace.len() as u64, seed: args.seed };
        io::write_file(&out.join("trace.bin"), |w| io::write_trace_binary(w, &header, &trace.points))?;
        outputs.push("trace.bin".to_string());
    }
    let config = serde_json::to_string(&args).map_err(Error::from)?;
    RunManifest::new(config, args.seed, outputs, started).save(out)?;
    if trace.clamps > 0 {
        eprintln!("warning: {} evaluations clamped onto the real line", trace.clamps);
    }
    println!("wrote {} points to {} (config hash {})", trace.len(), out.display(), config_hash(&serde_json::to_string(&args).map_err(Error::from)?));
    Ok(())
}

struct NormArgs {
    pvar: Vec<f64>,
    pvar_sweep: Option<String>,
    hoelder: Vec<f64>,
    epsilon: Option<f64>,
    besov: Option<f64>,
    r: Option<f64>,
    kappa: Option<f64>,
    besov_q: Option<f64>,
    window: Option<String>,
}

fn parse_floats(flag: &str, text: &str, n: usize) -> std::result::Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != n {
        return Err(Failure::Usage(format!("{flag}: expected {n} values separated by ':', got {text:?}")));
    }
    parts.iter().map(|p| p.trim().parse::<f64>().map_err(|e| Failure::Usage(format!("{flag}: {p:?}: {e}")))).collect()
}

fn sweep(text: &str) -> std::result::Result<Vec<f64>, Failure> {
    let v = parse_floats("--pvar-sweep", text, 3)?;
    let (a, b, h) = (v[0], v[1], v[2]);
    if !(h > 0.0 && b >= a) {
        return Err(Failure::Usage(format!("--pvar-sweep: need from <= to and step > 0, got {text:?}")));
    }
    let n = ((b - a) / h + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + h * i as f64).collect())
}

fn cmd_norms(file: &Path, a: NormArgs) -> CliResult {
    let (_, trace) = io::read_path_file(file)?;
    let mut path = trace.to_sampled()?;
    if let Some(w) = &a.window {
        let v = parse_floats("--window", w, 2)?;
        path = path.window(v[0], v[1])?;
    }
    let besov_params = match a.besov {
        None => None,
        Some(delta) => Some(match (a.r, a.kappa, a.besov_q) {
            (Some(r), Some(kappa), _) => check_delta(r, kappa_arg(kappa)?, WindowMode::Besov, delta)?,
            (_, _, Some(q)) => BesovParams::new(delta, q)?,
            (None, Some(kappa), None) => return Err(Failure::Usage(format!("--besov with --kappa {kappa} also needs --r"))),
            _ => return Err(Failure::Usage("--besov needs --r and --kappa, or --besov-q".into())),
        }),
    };
    let mut ps = a.pvar.clone();
    if let Some(s) = &a.pvar_sweep {
        ps.extend(sweep(s)?);
    }
    let source = file.display().to_string();
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    let mut emit = |r: &slereg_core::SeminormResult| -> slereg::Result<()> { io::write_json_line(&mut w, &SeminormRecord::new(&source, r)) };
    for p in ps {
        emit(&p_variation(&path, p)?)?;
    }
    let tail = match a.epsilon {
        Some(eps) => {
            let (lo, hi) = path.span();
            Some(path.window(lo + eps.max(0.0), hi)?)
        }
        None => None,
    };
    for alpha in a.hoelder {
        emit(&hoelder_norm(&path, alpha)?)?;
        if let Some(t) = &tail {
            emit(&hoelder_norm(t, alpha)?)?;
        }
    }
    if let Some(params) = besov_params {
        emit(&besov_seminorm(&path, params)?)?;
        if let Some(t) = &tail {
            emit(&besov_seminorm(t, params)?)?;
        }
    }
    Ok(())
}

const TABLE_FILE: &str = "table.csv";
const REPORT_FILE: &str = "report.jsonl";
const CHECKPOINT_FILE: &str = "checkpoint.jsonl";

fn cmd_experiment(config: Option<PathBuf>, from_manifest: Option<PathBuf>, out: Option<PathBuf>, threads: Option<usize>, fresh: bool) -> CliResult {
    let started = unix_now();
    let (text, origin) = match (&config, &from_manifest) {
        (Some(c), _) => (std::fs::read_to_string(c).map_err(|e| Error::Io { path: c.clone(), source: e })?, c.display().to_string()),
        (None, Some(m)) => (RunManifest::load(m)?.config, m.display().to_string()),
        (None, None) => return Err(Failure::Usage("give a config file or --from-manifest".into())),
    };
    let cfg = ExperimentConfig::from_json(&text).map_err(|e| Failure::Usage(format!("{origin}: {e}")))?;
    let out = out.or_else(|| cfg.output.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("experiment-out"));
    std::fs::create_dir_all(&out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
    let checkpoint = out.join(CHECKPOINT_FILE);
    if fresh && checkpoint.exists() {
        std::fs::remove_file(&checkpoint).map_err(|e| Error::Io { path: checkpoint.clone(), source: e })?;
    }
    let hash = cfg.hash();
    let runner = Runner::new(thread_count(threads)).with_checkpoint(checkpoint, hash.clone());
    let outcome = experiments::run(&cfg, &runner)?;
    io::write_file(&out.join(TABLE_FILE), |w| write_table(w, &hash, &outcome.table))?;
    io::write_file(&out.join(REPORT_FILE), |w| io::write_json_line(w, &ReportLine { config_hash: &hash, report: &outcome.report }))?;
    let outputs = vec![TABLE_FILE.into(), REPORT_FILE.into(), CHECKPOINT_FILE.into(), MANIFEST_FILE.into()];
    RunManifest::new(cfg.canonical_json(), cfg.seed, outputs, started).save(&out)?;
    print_summary(&outcome.report, &outcome.table);
    println!("outputs in {} (config hash {hash})", out.display());
    Ok(())
}

#[derive(Serialize)]
struct ReportLine<'a> {
    config_hash: &'a str,
    report: &'a Report,
}

fn write_table<W: std::io::Write>(w: W, hash: &str, table: &Table) -> slereg::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(std::iter::once("config_hash").chain(table.columns.iter().map(String::as_str)))?;
    for row in &table.rows {
        out.write_record(std::iter::once(hash.to_string()).chain(row.iter().map(|&v| machine(v))))?;
    }
    out.flush().map_err(|e| Error::Io { path: TABLE_FILE.into(), source: e })?;
    Ok(())
}

fn print_summary(report: &Report, table: &Table) {
    println!("{}", table.columns.join("\t"));
    for row in &table.rows {
        println!("{}", row.iter().map(|&v| human(v)).collect::<Vec<_>>().join("\t"));
    }
    let verdict = |ok: bool| if ok { "yes" } else { "no" };
    match report {
        Report::DerivativeMomentScan(r) => {
            println!("fitted constant {} (held-out domination: {})", human(r.domination.c_hat), verdict(r.domination.pass));
            for f in &r.y_exponents {
                println!("s = {}: y-exponent {} vs zeta {} ({})", human(f.fixed), human(f.fit.slope), human(f.target), verdict(f.consistent));
            }
        }
        Report::IncrementMomentScan(r) => {
            println!("fitted constant {} (held-out domination: {})", human(r.domination.c_hat), verdict(r.domination.pass));
            println!("alternative r_tilde {}: constant {} ({})", human(r.r_tilde_alt), human(r.domination_alt.c_hat), verdict(r.domination_alt.pass));
        }
        Report::BesovFiniteness(r) => println!("half-sample change {} (stable: {})", human(r.half_change), verdict(r.stable)),
        Report::CriticalPvar(r) => println!(
            "p_hat {} in [{}, {}], target {}{}",
            r.p_hat.map_or("none".into(), human),
            human(r.interval.0),
            human(r.interval.1),
            human(r.target),
            if r.monotone { "" } else { " (slope curve not monotone)" }
        ),
        Report::CriticalHoelder(r) => {
            println!("alpha_hat {} in [{}, {}], {} {}", human(r.alpha_hat), human(r.interval.0), human(r.interval.1), r.target_name, human(r.target))
        }
        Report::ScalingLaw(r) => println!("KS statistic {}, p = {} (rejected at 1%: {})", human(r.ks.statistic), human(r.ks.p_value), verdict(r.rejected_at_1pct)),
        Report::Embedding(r) => println!("constant {} (first half {}, stable: {})", human(r.c_hat), human(r.c_hat_first_half), verdict(r.stable)),
    }
}
