//! Command-line front end: configuration, subcommand dispatch and artifact
//! writing.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{entropy_estimate, mme_estimate, push_histogram, scc_irreducible, Histogram, PERRON_TOLERANCE};
use crate::coding::{format_word, kneading_sequences, KneadingData, Line};
use crate::diagram::{build_diagram, build_diagram_interval, classify, cut_times, Case, CutTimes, MarkovDiagram, MIN_COMPARE};
use crate::error::Error;
use crate::ldp::{linspace, mc_deviation_rates, rate_from_pressure, window_rate, McConfig};
use crate::mapspec::{AnyMap, Backend, MapSpec, NumberSpec, SignsSpec};
use crate::map::MapParams;
use crate::measures::{lebesgue_orbit, EmpiricalMeasure};
use crate::periodic::{approximate_by_periodic, hr_witness_explicit, hr_witness_search, HrContext, PeriodicSearch};
use crate::scalar::Scalar;
use crate::with_map;

#[derive(Parser, Debug)]
#[command(name = "abdyn", version, about = "Symbolic dynamics of generalized (alpha, beta)-transformations")]
pub struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub map: MapFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct MapFlags {
    /// Offset alpha in [0, 1), e.g. `0.3`, `1/3`, `(sqrt(5)-1)/2`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Slope beta > 1, e.g. `2`, `13/5`, `root(1,-1,-1)`.
    #[arg(long, global = true)]
    pub beta: Option<String>,
    /// Branch orientations, one per cell, e.g. `+-+`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub signs: Option<String>,
    /// Number field: exact (rational or quadratic) or f64.
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendFlag>,
    /// Precision recorded for the run.
    #[arg(long, global = true, env = "ABDYN_PRECISION_BITS")]
    pub precision_bits: Option<u32>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BackendFlag {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagramFormat {
    Dot,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Kneading sequences of 0+, 1- and the critical points (JSON).
    Kneading {
        /// Kneading depth in symbols.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Cut times of both kneading lines (CSV).
    Cuttimes {
        /// Kneading depth in symbols.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Markov diagram truncated at level N (DOT or JSON).
    Diagram {
        /// Truncation level N of the diagram.
        #[arg(long)]
        n: Option<usize>,
        /// Output format.
        #[arg(long, value_enum)]
        format: Option<DiagramFormat>,
    },
    /// Entropy of truncated diagrams for increasing N (CSV).
    Entropy {
        /// Truncation levels N, comma separated.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
    },
    /// Histogram of the measure of maximal entropy (CSV).
    Mme {
        /// Truncation level N of the diagram.
        #[arg(long)]
        n: Option<usize>,
        /// Number of histogram bins on [0, 1].
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Periodic orbits approximating a Lebesgue-random orbit measure (CSV).
    Periodic {
        /// Maximal cycle lengths to try, comma separated.
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<usize>>,
        /// Cap on the number of candidate words scored.
        #[arg(long)]
        budget: Option<usize>,
        /// Seed of the random generator.
        #[arg(long)]
        seed: Option<u64>,
        /// Length of the random orbit used as target.
        #[arg(long)]
        orbit_length: Option<usize>,
        /// Target measure as `position,weight` CSV instead of a random orbit.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Shadowing witnesses for every cut index up to half the depth (CSV).
    CheckHr {
        /// Kneading depth in symbols.
        #[arg(long)]
        depth: Option<usize>,
        /// Cap on search steps per cut index.
        #[arg(long)]
        budget: Option<usize>,
        /// Override of the constant N0.
        #[arg(long)]
        big_n0: Option<usize>,
        /// Override of the constant N1.
        #[arg(long)]
        big_n1: Option<usize>,
    },
    /// Invariant density: Ulam iteration against the diagram measure (CSV).
    Density {
        /// Truncation level N of the diagram.
        #[arg(long)]
        n: Option<usize>,
        /// Number of histogram bins on [0, 1].
        #[arg(long)]
        bins: Option<usize>,
        /// Number of Ulam transfer steps.
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Deviation rates of a per-symbol observable (CSV + JSON).
    Ldp {
        /// Orbit lengths n, comma separated.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        /// Number of Monte-Carlo samples.
        #[arg(long)]
        samples: Option<usize>,
        /// Seed of the random generator.
        #[arg(long)]
        seed: Option<u64>,
        /// Windows as `lo:hi`, comma separated.
        #[arg(long, value_delimiter = ',')]
        windows: Option<Vec<String>>,
        /// Observable value per symbol, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        observable: Option<Vec<f64>>,
        /// Truncation level N of the diagram used for the pressure.
        #[arg(long)]
        n: Option<usize>,
    },
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub map: Option<MapSpec>,
    pub depth: Option<usize>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub bins: Option<usize>,
    pub format: Option<DiagramFormat>,
    pub lengths: Option<Vec<usize>>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub orbit_length: Option<usize>,
    pub target: Option<PathBuf>,
    pub big_n0: Option<usize>,
    pub big_n1: Option<usize>,
    pub iterations: Option<usize>,
    pub samples: Option<usize>,
    pub windows: Option<Vec<(f64, f64)>>,
    pub observable: Option<Vec<f64>>,
}

/// Failure of a run, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or unwritable output: exit 1.
    Config(String),
    /// The computation itself failed: exit 2.
    Domain(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Domain(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(m) => CliError::Config(m),
            e => CliError::Domain(e),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Files produced by a command; `failure` turns a completed run into exit 2.
struct Artifacts {
    files: Vec<(String, String)>,
    resolved: serde_json::Value,
    failure: Option<Error>,
}

/// Parses arguments, runs, prints errors; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("abdyn: {e}");
            e.exit_code()
        }
    }
}

fn pick<T: Clone>(flag: &Option<T>, config: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| config.clone()).unwrap_or(default)
}

fn resolve_map(flags: &MapFlags, config: &RunConfig) -> CliResult<MapSpec> {
    let base = config.map.clone();
    let text = |flag: &Option<String>, from: Option<NumberSpec>, name: &str| -> CliResult<NumberSpec> {
        match (flag, from) {
            (Some(s), _) => Ok(NumberSpec::Text(s.clone())),
            (None, Some(n)) => Ok(n),
            (None, None) => Err(CliError::Config(format!("missing map parameter {name}"))),
        }
    };
    let alpha = text(&flags.alpha, base.as_ref().map(|m| m.alpha.clone()), "alpha")?;
    let beta = text(&flags.beta, base.as_ref().map(|m| m.beta.clone()), "beta")?;
    let signs = match (&flags.signs, base.as_ref().map(|m| m.signs.clone())) {
        (Some(s), _) => SignsSpec::Text(s.clone()),
        (None, Some(s)) => s,
        (None, None) => return Err(CliError::Config("missing map parameter signs".into())),
    };
    let backend = match flags.backend {
        Some(BackendFlag::Exact) => Backend::Exact,
        Some(BackendFlag::Float) => Backend::Float,
        None => base.as_ref().map(|m| m.backend).unwrap_or_default(),
    };
    let precision_bits = flags
        .precision_bits
        .or(base.as_ref().and_then(|m| m.precision_bits))
        .or(Some(crate::mapspec::default_precision_bits()));
    Ok(MapSpec { alpha, beta, signs, precision_bits, backend })
}

/// Executes the parsed command line.
pub fn run(cli: &Cli) -> CliResult<()> {
    let config: RunConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    let spec = resolve_map(&cli.map, &config)?;
    let map = spec.build()?;
    let (name, artifacts) = dispatch(&cli.command, &config, &map)?;
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", cli.out.display())))?;
    let mut names = Vec::new();
    for (file, contents) in &artifacts.files {
        write_atomic(&cli.out, file, contents)?;
        names.push(file.clone());
    }
    let manifest = json!({
        "tool": "abdyn",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "map": spec,
        "backend": map.backend_name(),
        "config": artifacts.resolved,
        "outputs": names,
        "status": artifacts.failure.as_ref().map_or("ok".to_string(), error_name),
        "message": artifacts.failure.as_ref().map(|e| e.to_string()),
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n";
    write_atomic(&cli.out, "manifest.json", &text)?;
    match artifacts.failure {
        Some(e) => Err(CliError::Domain(e)),
        None => Ok(()),
    }
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    let fail = |e: std::io::Error| CliError::Config(format!("cannot write {}: {e}", dir.join(name).display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(dir.join(name)).map_err(|e| fail(e.error))?;
    Ok(())
}

fn dispatch(cmd: &Command, cfg: &RunConfig, map: &AnyMap) -> CliResult<(&'static str, Artifacts)> {
    Ok(match cmd {
        Command::Kneading { depth } => {
            let depth = pick(depth, &cfg.depth, 64);
            ("kneading", with_map!(map, m => kneading_cmd(m, depth))?)
        }
        Command::Cuttimes { depth } => {
            let depth = pick(depth, &cfg.depth, 256);
            ("cuttimes", with_map!(map, m => cuttimes_cmd(m, depth))?)
        }
        Command::Diagram { n, format } => {
            let n = pick(n, &cfg.n, 10);
            let format = pick(format, &cfg.format, DiagramFormat::Dot);
            ("diagram", with_map!(map, m => diagram_cmd(m, n, format))?)
        }
        Command::Entropy { n_list } => {
            let n_list = pick(n_list, &cfg.n_list, vec![5, 10, 20, 40]);
            ("entropy", with_map!(map, m => entropy_cmd(m, &n_list))?)
        }
        Command::Mme { n, bins } => {
            let (n, bins) = (pick(n, &cfg.n, 40), pick(bins, &cfg.bins, 1024));
            ("mme", with_map!(map, m => mme_cmd(m, n, bins))?)
        }
        Command::Periodic { lengths, budget, seed, orbit_length, target } => {
            let lengths = pick(lengths, &cfg.lengths, vec![5, 10, 20, 40]);
            let budget = pick(budget, &cfg.budget, 100_000);
            let seed = pick(seed, &cfg.seed, 1);
            let orbit_length = pick(orbit_length, &cfg.orbit_length, 20_000);
            let target = target.clone().or_else(|| cfg.target.clone());
            ("periodic", periodic_cmd(&map.to_f64_map(), &lengths, budget, seed, orbit_length, target)?)
        }
        Command::CheckHr { depth, budget, big_n0, big_n1 } => {
            let depth = pick(depth, &cfg.depth, 512);
            let budget = pick(budget, &cfg.budget, 1_000_000);
            let bounds = (big_n0.or(cfg.big_n0), big_n1.or(cfg.big_n1));
            ("check-hr", with_map!(map, m => check_hr_cmd(m, depth, budget, bounds))?)
        }
        Command::Density { n, bins, iterations } => {
            let (n, bins) = (pick(n, &cfg.n, 40), pick(bins, &cfg.bins, 256));
            let iterations = pick(iterations, &cfg.iterations, 200);
            ("density", with_map!(map, m => density_cmd(m, n, bins, iterations))?)
        }
        Command::Ldp { n_list, samples, seed, windows, observable, n } => {
            let windows = match windows {
                Some(w) => Some(parse_windows(w)?),
                None => cfg.windows.clone(),
            }
            .unwrap_or_else(|| vec![(0.25, 0.35), (0.65, 0.75), (0.45, 0.55)]);
            let k = map.to_f64_map().k();
            let mut f = vec![0.0; k];
            f[k - 1] = 1.0;
            let params = LdpParams {
                n_list: pick(n_list, &cfg.n_list, (7..=12).map(|e| 1 << e).collect()),
                samples: pick(samples, &cfg.samples, 1_000_000),
                seed: pick(seed, &cfg.seed, 1),
                windows,
                observable: pick(observable, &cfg.observable, f),
                n: pick(n, &cfg.n, 40),
            };
            ("ldp", with_map!(map, m => ldp_cmd(m, &params))?)
        }
    })
}

fn parse_windows(items: &[String]) -> CliResult<Vec<(f64, f64)>> {
    items
        .iter()
        .map(|s| {
            let (a, b) = s.split_once(':').ok_or_else(|| CliError::Config(format!("window {s:?} is not lo:hi")))?;
            let num = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad window bound {t:?}")));
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

fn done(files: Vec<(String, String)>, resolved: serde_json::Value) -> Artifacts {
    Artifacts { files, resolved, failure: None }
}

/// Kneading data, cut times and the diagram truncated at `n`. The float
/// backend cannot follow kneading orbits far enough and iterates intervals
/// instead.
fn pipeline<S: Scalar>(map: &MapParams<S>, n: usize) -> CliResult<MarkovDiagram<S>> {
    if !S::EXACT {
        return Ok(build_diagram_interval(map, n));
    }
    let depth = n + MIN_COMPARE;
    let kn = kneading_sequences(map, depth)?;
    let cuts = cut_times(map, &kn, depth)?;
    Ok(build_diagram(&kn, &cuts, n)?)
}

fn kneading_cmd<S: Scalar>(map: &MapParams<S>, depth: usize) -> CliResult<Artifacts> {
    let kn = kneading_sequences(map, depth)?;
    let words = |v: &[Vec<u16>]| v.iter().map(|w| format_word(w)).collect::<Vec<_>>();
    let out = json!({
        "a": format_word(&kn.a),
        "b": format_word(&kn.b),
        "crit_right": words(&kn.crit_right),
        "crit_left": words(&kn.crit_left),
        "depth": kn.depth,
        "precision_used": kn.precision_used,
    });
    Ok(done(vec![("kneading.json".into(), pretty(&out))], json!({ "depth": depth })))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialise") + "\n"
}

fn cuttimes_cmd<S: Scalar>(map: &MapParams<S>, depth: usize) -> CliResult<Artifacts> {
    let kn = kneading_sequences(map, depth)?;
    let cuts = cut_times(map, &kn, depth)?;
    // classes need MIN_COMPARE symbols beyond the cut time
    let classes = classify(&kn, &cuts).ok();
    let mut csv = String::from("m,R_m,S_m,r_m,s_m,class_a,class_b\n");
    let rows = cuts.count(Line::A).max(cuts.count(Line::B));
    let cell = |v: Option<usize>| v.map_or(String::new(), |x| x.to_string());
    for m in 0..=rows {
        let label = |line: Line| match &classes {
            Some(c) if m >= 1 && m <= c.line(line).count() => c.line(line).label(m),
            _ => String::new(),
        };
        let _ = writeln!(
            csv,
            "{m},{},{},{},{},{},{}",
            cell(cuts.get(Line::A, m).ok()),
            cell(cuts.get(Line::B, m).ok()),
            cell(cuts.gap(Line::A, m).ok()),
            cell(cuts.gap(Line::B, m).ok()),
            label(Line::A),
            label(Line::B)
        );
    }
    Ok(done(vec![("cuttimes.csv".into(), csv)], json!({ "depth": depth })))
}

fn diagram_cmd<S: Scalar>(map: &MapParams<S>, n: usize, format: DiagramFormat) -> CliResult<Artifacts> {
    let d = pipeline(map, n)?;
    let resolved = json!({ "n": n, "format": format });
    Ok(match format {
        DiagramFormat::Dot => done(vec![("diagram.dot".into(), d.to_dot())], resolved),
        DiagramFormat::Json => {
            let vertices: Vec<_> = d
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    json!({
                        "id": i,
                        "tag": v.tag.label(),
                        "symbol": v.symbol,
                        "lo": v.lo.to_string(),
                        "hi": v.hi.to_string(),
                        "expanded": d.expanded[i],
                        "successors": d.successors[i],
                    })
                })
                .collect();
            let out = json!({ "depth": d.depth, "cells": d.cells, "vertices": vertices });
            done(vec![("diagram.json".into(), pretty(&out))], resolved)
        }
    })
}

fn entropy_cmd<S: Scalar>(map: &MapParams<S>, n_list: &[usize]) -> CliResult<Artifacts> {
    if n_list.is_empty() {
        return Err(CliError::Config("n_list is empty".into()));
    }
    let mut csv = String::from("N,vertices,arrows,estimate,log_beta,residual\n");
    let log_beta = map.beta().approx().ln();
    for &n in n_list {
        let d = pipeline(map, n)?;
        let report = scc_irreducible(&d)?;
        let e = entropy_estimate(&d, report.main(), PERRON_TOLERANCE)?;
        let _ = writeln!(csv, "{n},{},{},{},{log_beta},{:e}", d.len(), d.arrow_count(), e.value, e.residual);
    }
    Ok(done(vec![("entropy.csv".into(), csv)], json!({ "n_list": n_list })))
}

/// Bin table; masses are divided by the bin width when `density` is set.
fn histogram_csv(columns: &[(&str, &Histogram)], density: bool) -> String {
    let mut csv = String::from("bin_lo,bin_hi");
    for (name, _) in columns {
        let _ = write!(csv, ",{name}");
    }
    csv.push('\n');
    let h0 = columns[0].1;
    let width = if density { 1.0 / h0.bins() as f64 } else { 1.0 };
    for i in 0..h0.bins() {
        let (lo, hi) = h0.edges(i);
        let _ = write!(csv, "{lo},{hi}");
        for (_, h) in columns {
            let _ = write!(csv, ",{}", h.masses[i] / width);
        }
        csv.push('\n');
    }
    csv
}

fn mme_cmd<S: Scalar>(map: &MapParams<S>, n: usize, bins: usize) -> CliResult<Artifacts> {
    let d = pipeline(map, n)?;
    let report = scc_irreducible(&d)?;
    let h = mme_estimate(&d, report.main(), bins, PERRON_TOLERANCE)?;
    Ok(done(vec![("mme.csv".into(), histogram_csv(&[("mass", &h)], false))], json!({ "n": n, "bins": bins })))
}

fn density_cmd<S: Scalar>(map: &MapParams<S>, n: usize, bins: usize, iterations: usize) -> CliResult<Artifacts> {
    let d = pipeline(map, n)?;
    let report = scc_irreducible(&d)?;
    let mme = mme_estimate(&d, report.main(), bins, PERRON_TOLERANCE)?;
    let fm = map.to_f64_map();
    let mut h = Histogram { masses: vec![1.0 / bins as f64; bins] };
    let mut avg = Histogram { masses: vec![0.0; bins] };
    for _ in 0..iterations {
        h = push_histogram(&fm, &h);
        for (a, m) in avg.masses.iter_mut().zip(&h.masses) {
            *a += m / iterations as f64;
        }
    }
    let csv = histogram_csv(&[("ulam", &avg), ("mme", &mme)], true);
    Ok(done(
        vec![("density.csv".into(), csv)],
        json!({ "n": n, "bins": bins, "iterations": iterations, "l1_distance": avg.l1_distance(&mme) }),
    ))
}

fn periodic_cmd(
    map: &MapParams<f64>,
    lengths: &[usize],
    budget: usize,
    seed: u64,
    orbit_length: usize,
    target: Option<PathBuf>,
) -> CliResult<Artifacts> {
    let measure = match &target {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            EmpiricalMeasure::from_csv(&text).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (points, _) = lebesgue_orbit(map, orbit_length, &mut rng);
            EmpiricalMeasure::from_points(&points)?
        }
    };
    let mut csv = String::from("max_len,word,period,distance,candidates,points\n");
    for &max_len in lengths {
        let search = PeriodicSearch { max_len, budget, seed_words: Vec::new() };
        let a = approximate_by_periodic(map, &measure, &search)?;
        let points: Vec<String> = a.orbit.points.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(
            csv,
            "{max_len},{},{},{},{},{}",
            format_word(&a.orbit.word),
            a.orbit.period(),
            a.distance,
            a.candidates,
            points.join(" ")
        );
    }
    let resolved = json!({
        "lengths": lengths,
        "budget": budget,
        "seed": seed,
        "orbit_length": orbit_length,
        "target": target,
    });
    Ok(done(vec![("periodic.csv".into(), csv)], resolved))
}

fn check_hr_cmd<S: Scalar>(
    map: &MapParams<S>,
    depth: usize,
    budget: usize,
    bounds: (Option<usize>, Option<usize>),
) -> CliResult<Artifacts> {
    if depth <= 2 * MIN_COMPARE {
        return Err(CliError::Config(format!("depth must exceed {}", 2 * MIN_COMPARE)));
    }
    let kn: KneadingData<S> = kneading_sequences(map, depth)?;
    let cuts: CutTimes = cut_times(map, &kn, depth)?;
    let classes = classify(&kn, &cuts)?;
    let d = build_diagram(&kn, &cuts, depth - MIN_COMPARE)?;
    let report = scc_irreducible(&d)?;
    let mut ctx = HrContext::new(&kn, &cuts, &classes, &d, &report)?;
    if bounds.0.is_some() || bounds.1.is_some() {
        let n0 = bounds.0.unwrap_or(ctx.constants.big_n0);
        let n1 = bounds.1.unwrap_or(n0 + ctx.constants.n1);
        ctx = ctx.with_bounds(n0, n1);
    }
    let mut csv = String::from("line,j,cut,case,m,u_len,slack,method,search_slack,agree,status\n");
    let mut failure = None;
    for line in [Line::A, Line::B] {
        for j in 1..=cuts.count(line) {
            let cj = cuts.get(line, j)?;
            if cj > depth / 2 {
                break;
            }
            if cj <= ctx.constants.big_n0 && ctx.constants.big_n0 <= d.depth {
                continue;
            }
            let case = classes.line(line).case(j).unwrap_or(Case::Unknown);
            let explicit = hr_witness_explicit(&ctx, line, j, budget);
            let search = hr_witness_search(&ctx, line, j, budget);
            let row = match (&explicit, &search) {
                (Err(e), _) => Err(e.clone()),
                (Ok(Some(w)), s) => Ok((w, s.as_ref().ok().map(|s| s.slack), Some(s.is_ok()))),
                (Ok(None), Ok(s)) => Ok((s, Some(s.slack), None)),
                (Ok(None), Err(e)) => Err(e.clone()),
            };
            match row {
                Ok((w, search_slack, agree)) => {
                    let _ = writeln!(
                        csv,
                        "{},{j},{cj},{},{},{},{},{:?},{},{},ok",
                        line.name(),
                        case.label(),
                        w.m,
                        w.u_len,
                        w.slack,
                        w.method,
                        search_slack.map_or(String::new(), |s| s.to_string()),
                        agree.map_or(String::new(), |a| a.to_string()),
                    );
                }
                Err(e) => {
                    let _ = writeln!(csv, "{},{j},{cj},{},,,,,,,{}", line.name(), case.label(), error_name(&e));
                    failure.get_or_insert(e);
                }
            }
        }
    }
    let c = ctx.constants;
    let resolved = json!({
        "depth": depth,
        "budget": budget,
        "n0": c.n0,
        "m0": c.m0,
        "big_n0": c.big_n0,
        "n1": c.n1,
        "big_n1": c.big_n1,
    });
    Ok(Artifacts { files: vec![("check_hr.csv".into(), csv)], resolved, failure })
}

/// Variant name of an error, e.g. `DepthExceeded`.
fn error_name(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

struct LdpParams {
    n_list: Vec<usize>,
    samples: usize,
    seed: u64,
    windows: Vec<(f64, f64)>,
    observable: Vec<f64>,
    n: usize,
}

fn ldp_cmd<S: Scalar>(map: &MapParams<S>, p: &LdpParams) -> CliResult<Artifacts> {
    if p.observable.len() != map.k() {
        return Err(CliError::Config(format!("observable needs {} values", map.k())));
    }
    let fm = map.to_f64_map();
    let cfg = McConfig { n_list: p.n_list.clone(), samples: p.samples, seed: p.seed };
    let estimates = mc_deviation_rates(&fm, &p.observable, &p.windows, &cfg).map_err(|e| match e {
        Error::PreconditionViolated(m) => CliError::Config(m),
        e => CliError::Domain(e),
    })?;
    let d = pipeline(map, p.n)?;
    let report = scc_irreducible(&d)?;
    let comp = report.main();
    let t_grid = linspace(-20.0, 20.0, 400);
    let fmin = p.observable.iter().cloned().fold(f64::INFINITY, f64::min);
    let fmax = p.observable.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s_grid = linspace(fmin, fmax, 100);
    let curve = rate_from_pressure(&d, comp, &p.observable, &t_grid, &s_grid)?;
    let mean = curve.argmin();
    let mut mc = String::from("window_lo,window_hi,n,count,fraction,log_rate\n");
    let mut summary = Vec::new();
    let mut failure = None;
    for (w, est) in p.windows.iter().zip(&estimates) {
        match est {
            Ok(e) => {
                for r in &e.rows {
                    let lr = r.log_rate.map_or(String::new(), |v| v.to_string());
                    let _ = writeln!(mc, "{},{},{},{},{},{lr}", w.0, w.1, r.n, r.count, r.fraction);
                }
                let legendre = window_rate(&d, comp, &p.observable, &t_grid, *w, mean)?;
                summary.push(json!({
                    "window": w,
                    "rate": e.rate,
                    "band": e.band,
                    "fitted": e.fitted,
                    "zero_counts": e.zero_counts,
                    "legendre_rate": legendre,
                }));
            }
            Err(e) => {
                summary.push(json!({ "window": w, "error": error_name(&e), "message": e.to_string() }));
                failure.get_or_insert(e.clone());
            }
        }
    }
    let mut rate = String::from("s,I_legendre\n");
    for (s, i) in curve.grid.iter().zip(&curve.rate) {
        let _ = writeln!(rate, "{s},{i}");
    }
    let out = json!({
        "h_top": curve.h_top,
        "mean": mean,
        "reference": "lebesgue; decay exponents agree with the measure of maximal entropy when its density is bounded away from 0 and infinity",
        "windows": summary,
    });
    let resolved = json!({
        "n_list": p.n_list,
        "samples": p.samples,
        "seed": p.seed,
        "windows": p.windows,
        "observable": p.observable,
        "n": p.n,
    });
    Ok(Artifacts {
        files: vec![
            ("ldp_mc.csv".into(), mc),
            ("ldp_rate.csv".into(), rate),
            ("ldp_summary.json".into(), pretty(&out)),
        ],
        resolved,
        failure,
    })
}
