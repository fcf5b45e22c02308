//! Command-line front end for the walsh-lab experiment engines.
//!
//! Each subcommand resolves its parameters from an optional TOML config
//! plus flags (flags win), runs one engine inside a thread pool of the
//! requested size, writes the records to a CSV or JSON-lines file, prints
//! a one-line summary, and drops `<out>.config.toml` with the fully
//! resolved configuration. The engines are deterministic at any thread
//! count, so feeding that sidecar back through `--config` reproduces the
//! output byte for byte.
//!
//! Exit codes: 0 success, 2 usage error, 3 configuration error, 4 runtime
//! failure (contract violation, failing check, unwritable output).

mod config;

pub use config::RunConfig;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{
    parse_bits, parse_f64_list, parse_index_list, render_index_list, resolve_cone, to_orders,
};
use std::ffi::OsString;
use std::path::PathBuf;
use walsh_lab::cesaro::smallest_exact_rank;
use walsh_lab::experiments::contrast::kernel_contrast_probe;
use walsh_lab::experiments::converge::{convergence_experiment, TestFunction};
use walsh_lab::experiments::counterexample::ratio_experiment;
use walsh_lab::experiments::goginava::goginava_integrals;
use walsh_lab::experiments::records::{to_csv_string, to_jsonl_string};
use walsh_lab::experiments::sneider::sneider_probe;
use walsh_lab::experiments::survey::survey;
use walsh_lab::experiments::systems_check::systems_check;
use walsh_lab::{CesaroOrder, Error as LabError, ExperimentRecord, SystemKind};

/// A failed run: its exit code and the diagnostic for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(message: impl std::fmt::Display) -> Self {
        Failure { code: 3, message: message.to_string() }
    }

    fn runtime(message: impl std::fmt::Display) -> Self {
        Failure { code: 4, message: message.to_string() }
    }

    /// Library errors raised while assembling a run are configuration
    /// problems; a breached invariant inside a run is a runtime failure.
    fn from_setup(err: LabError) -> Self {
        match err {
            LabError::ContractViolation(_) => Failure::runtime(err),
            _ => Failure::config(err),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "walsh-lab",
    version,
    about = "Cesàro summation experiments on the Walsh group, in both the Paley and Kaczmarz enumerations"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML run configuration; flags override its entries
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// records file (defaults to <command>.<format> in the working directory)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// records format
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// worker threads (defaults to available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-check both Walsh enumerations at one resolution
    SystemsCheck {
        /// resolution exponent (grid of 2^m cells)
        #[arg(long)]
        m: Option<u32>,
    },
    /// L^1 norms of the Cesàro kernels with dyadic block maxima
    KernelSurvey {
        #[arg(long, value_enum)]
        system: Option<SystemArg>,
        /// summation orders in (0,1], comma separated; one survey per order
        #[arg(long)]
        alpha: Option<String>,
        /// largest kernel index surveyed
        #[arg(long)]
        max_n: Option<usize>,
        /// grid rank (defaults to the smallest rank resolving max-n)
        #[arg(long)]
        rank: Option<u32>,
    },
    /// The maximal weighted-kernel integrals behind the divergence bound
    Goginava {
        /// summation orders, comma separated; one sweep per order
        #[arg(long)]
        alpha: Option<String>,
        /// resolutions to sweep, e.g. 4..12 or 4,6,8
        #[arg(long)]
        n: Option<String>,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
    },
    /// Hardy-quotient growth of the witness against the cone maximal operator
    Counterexample {
        /// per-axis orders, comma separated, non-decreasing
        #[arg(long)]
        alpha: Option<String>,
        /// catalog cone (identity, loglinear, power:<p>) or a TOML file
        #[arg(long)]
        cone: Option<String>,
        /// block heights, e.g. 6..12 or 6,8,10,12
        #[arg(long)]
        n1: Option<String>,
        /// full-grid cross-check at the smallest height
        #[arg(long, value_enum)]
        oracle: Option<OracleArg>,
    },
    /// Error decay of cone-indexed means on a test function
    Converge {
        #[arg(long, value_enum)]
        function: Option<FunctionArg>,
        /// catalog cone or a TOML file
        #[arg(long)]
        cone: Option<String>,
        /// per-axis orders, comma separated
        #[arg(long)]
        alpha: Option<String>,
        /// heights to sweep, e.g. 4..10
        #[arg(long)]
        n1: Option<String>,
        #[arg(long, value_enum)]
        system: Option<SystemArg>,
    },
    /// Exceedance measures of the rearranged Dirichlet kernel
    Sneider {
        /// grid rank (2^rank cells)
        #[arg(long)]
        rank: Option<u32>,
        /// dyadic blocks sampled at n = 2^j - 1, e.g. 4..11
        #[arg(long)]
        j: Option<String>,
        /// thresholds for D_n / ln n, comma separated
        #[arg(long)]
        c: Option<String>,
    },
    /// Fejér-kernel values of both systems at one point
    Contrast {
        /// point coordinates as a bit mask, e.g. 1 or 0b11
        #[arg(long)]
        x: Option<String>,
        /// kernel indices 2^j, e.g. 3..11
        #[arg(long)]
        j: Option<String>,
        /// summation order
        #[arg(long)]
        alpha: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SystemsCheck { .. } => "systems-check",
            Command::KernelSurvey { .. } => "kernel-survey",
            Command::Goginava { .. } => "goginava",
            Command::Counterexample { .. } => "counterexample",
            Command::Converge { .. } => "converge",
            Command::Sneider { .. } => "sneider",
            Command::Contrast { .. } => "contrast",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SystemArg {
    Paley,
    Kaczmarz,
}

impl From<SystemArg> for SystemKind {
    fn from(arg: SystemArg) -> SystemKind {
        match arg {
            SystemArg::Paley => SystemKind::Paley,
            SystemArg::Kaczmarz => SystemKind::Kaczmarz,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

impl FormatArg {
    fn parse(text: &str) -> Result<Self, Failure> {
        match text {
            "csv" => Ok(FormatArg::Csv),
            "jsonl" => Ok(FormatArg::Jsonl),
            other => Err(Failure::config(format!("unknown format `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Jsonl => "jsonl",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Lemma,
    Proof,
    Both,
}

impl VariantArg {
    fn parse(text: &str) -> Result<Self, Failure> {
        match text {
            "lemma" => Ok(VariantArg::Lemma),
            "proof" => Ok(VariantArg::Proof),
            "both" => Ok(VariantArg::Both),
            other => Err(Failure::config(format!("unknown variant `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            VariantArg::Lemma => "lemma",
            VariantArg::Proof => "proof",
            VariantArg::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FunctionArg {
    Indicator,
    Polynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleArg {
    /// run the cross-check when the smallest height keeps it cheap
    Auto,
    On,
    Off,
}

impl OracleArg {
    fn parse(text: &str) -> Result<Self, Failure> {
        match text {
            "auto" => Ok(OracleArg::Auto),
            "on" => Ok(OracleArg::On),
            "off" => Ok(OracleArg::Off),
            other => Err(Failure::config(format!("unknown oracle mode `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            OracleArg::Auto => "auto",
            OracleArg::On => "on",
            OracleArg::Off => "off",
        }
    }
}

/// Parses `argv` and executes one run. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(summaries) => {
            for line in summaries {
                println!("{line}");
            }
            0
        }
        Err(failure) => {
            eprintln!("walsh-lab: {}", failure.message);
            failure.code
        }
    }
}

fn execute(cli: Cli) -> Result<Vec<String>, Failure> {
    let name = cli.command.name();
    let mut cfg = match &cli.common.config {
        Some(path) => {
            let cfg = RunConfig::load(path)?;
            cfg.check_command(name)?;
            cfg
        }
        None => RunConfig::default(),
    };
    cfg.command = Some(name.to_string());

    let threads = cli
        .common
        .threads
        .or(cfg.threads)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);
    cfg.threads = Some(threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::runtime(format!("thread pool: {e}")))?;

    let format = match (&cli.common.format, &cfg.format) {
        (Some(arg), _) => *arg,
        (None, Some(text)) => FormatArg::parse(text)?,
        (None, None) => FormatArg::Csv,
    };
    cfg.format = Some(format.name().to_string());
    let out = cli
        .common
        .out
        .clone()
        .or(cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{name}.{}", format.name())));
    cfg.out = Some(out.clone());

    let (records, mut summaries, check_failed) =
        pool.install(|| dispatch(&cli.command, &mut cfg))?;

    let rendered = match format {
        FormatArg::Csv => to_csv_string(&records),
        FormatArg::Jsonl => to_jsonl_string(&records),
    };
    std::fs::write(&out, rendered)
        .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", out.display())))?;
    let sidecar = PathBuf::from(format!("{}.config.toml", out.display()));
    let snapshot = toml::to_string_pretty(&cfg)
        .map_err(|e| Failure::runtime(format!("config snapshot: {e}")))?;
    std::fs::write(&sidecar, snapshot)
        .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", sidecar.display())))?;

    for line in &mut summaries {
        line.push_str(&format!(" -> {}", out.display()));
    }
    if let Some(message) = check_failed {
        // artifacts are on disk for diagnosis, but the run still fails
        for line in summaries {
            println!("{line}");
        }
        return Err(Failure::runtime(message));
    }
    Ok(summaries)
}

/// Runs the engine for one subcommand. Returns the records, one summary
/// line per experiment, and an error message when a check ran and failed.
#[allow(clippy::type_complexity)]
fn dispatch(
    command: &Command,
    cfg: &mut RunConfig,
) -> Result<(Vec<ExperimentRecord>, Vec<String>, Option<String>), Failure> {
    match command {
        Command::SystemsCheck { m } => {
            let m = m.or(cfg.m).unwrap_or(10);
            cfg.m = Some(m);
            let report = systems_check(m).map_err(Failure::from_setup)?;
            let summary = format!(
                "systems-check: m={m}, blocks {}, worst defect {:.3e}",
                if report.blocks_agree { "agree" } else { "DISAGREE" },
                report
                    .tau_factorization_defect
                    .max(report.unit_defect_paley)
                    .max(report.unit_defect_kaczmarz)
            );
            let failed = if report.pass(1e-12) {
                None
            } else {
                Some("systems-check failed: the enumerations disagree beyond 1e-12".to_string())
            };
            Ok((report.records(), vec![summary], failed))
        }
        Command::KernelSurvey { system, alpha, max_n, rank } => {
            let system: SystemKind = system
                .map(SystemKind::from)
                .or_else(|| cfg.system.as_deref().and_then(|s| s.parse().ok()))
                .unwrap_or(SystemKind::Kaczmarz);
            cfg.system = Some(system.to_string());
            let alphas = resolve_alphas(alpha.as_deref(), cfg, &[1.0])?;
            let max_n = max_n.or(cfg.max_n).unwrap_or(4095);
            cfg.max_n = Some(max_n);
            let rank = rank.or(cfg.rank).unwrap_or_else(|| smallest_exact_rank(max_n));
            cfg.rank = Some(rank);
            let mut records = Vec::new();
            let mut summaries = Vec::new();
            for &a in &alphas {
                let report = survey(system, a, max_n, rank).map_err(Failure::from_setup)?;
                summaries.push(format!(
                    "kernel-survey: {system} alpha={} N<={max_n} plateau {:.6} (spread {:.2}%)",
                    a.get(),
                    report.plateau,
                    100.0 * report.plateau_variation
                ));
                records.extend(report.records());
            }
            Ok((records, summaries, None))
        }
        Command::Goginava { alpha, n, variant } => {
            let alphas = resolve_alphas(alpha.as_deref(), cfg, &[1.0])?;
            let ns = resolve_indices(n.as_deref(), cfg.n.as_deref(), "4..12")?;
            cfg.n = Some(render_index_list(&ns));
            let variant = match (variant, &cfg.variant) {
                (Some(v), _) => *v,
                (None, Some(text)) => VariantArg::parse(text)?,
                (None, None) => VariantArg::Both,
            };
            cfg.variant = Some(variant.name().to_string());
            let mut records = Vec::new();
            let mut summaries = Vec::new();
            for &a in &alphas {
                let report = goginava_integrals(&ns, a).map_err(Failure::from_setup)?;
                let last = report.rows.last().expect("nonempty sweep");
                summaries.push(format!(
                    "goginava: alpha={} n={}..{} I_lemma({})={:.6} I_proof({})={:.6}",
                    a.get(),
                    ns.first().unwrap(),
                    ns.last().unwrap(),
                    last.n,
                    last.lemma,
                    last.n,
                    last.proof
                ));
                let wanted = |row_variant: &str| match variant {
                    VariantArg::Both => true,
                    VariantArg::Lemma => row_variant == "lemma",
                    VariantArg::Proof => row_variant == "proof",
                };
                records.extend(
                    report
                        .records()
                        .into_iter()
                        .filter(|r| wanted(&r.params["variant"])),
                );
            }
            Ok((records, summaries, None))
        }
        Command::Counterexample { alpha, cone, n1, oracle } => {
            let alphas = resolve_alphas(alpha.as_deref(), cfg, &[0.5, 0.5])?;
            let (cone_spec, label) = resolve_cone(
                cone.as_deref().or(cfg.cone.as_deref()),
                cfg.cone_spec.as_ref(),
                alphas.len(),
            )?;
            cfg.cone = Some(label);
            cfg.cone_spec = Some(cone_spec.clone());
            let heights = resolve_indices(n1.as_deref(), cfg.n1.as_deref(), "6..12")?;
            cfg.n1 = Some(render_index_list(&heights));
            let oracle = match (oracle, &cfg.oracle) {
                (Some(o), _) => *o,
                (None, Some(text)) => OracleArg::parse(text)?,
                (None, None) => OracleArg::Auto,
            };
            cfg.oracle = Some(oracle.name().to_string());
            let check = match oracle {
                OracleArg::On => true,
                OracleArg::Off => false,
                // the full grid doubles per unit of height; 8 keeps the
                // cross-check under a second
                OracleArg::Auto => heights[0] <= 8,
            };
            let report = ratio_experiment(&heights, &cone_spec, &alphas, check)
                .map_err(Failure::from_setup)?;
            let first = report.rows.first().expect("nonempty sweep");
            let last = report.rows.last().expect("nonempty sweep");
            let mut summary = format!(
                "counterexample: p0={:.4} R({})={:.4} R({})={:.4} slope {:.3}",
                report.p0, first.n1, first.ratio, last.n1, last.ratio, report.slope
            );
            if let Some(oracle) = &report.oracle {
                summary.push_str(&format!(" oracle gap {:.2e}", oracle.gap));
            }
            Ok((report.records(), vec![summary], None))
        }
        Command::Converge { function, cone, alpha, n1, system } => {
            let function = match (function, &cfg.function) {
                (Some(FunctionArg::Indicator), _) => TestFunction::Indicator,
                (Some(FunctionArg::Polynomial), _) => TestFunction::Polynomial,
                (None, Some(text)) => text.parse().map_err(Failure::from_setup)?,
                (None, None) => TestFunction::Indicator,
            };
            cfg.function = Some(function.to_string());
            let alphas = resolve_alphas(alpha.as_deref(), cfg, &[1.0, 1.0])?;
            let (cone_spec, label) = resolve_cone(
                cone.as_deref().or(cfg.cone.as_deref()),
                cfg.cone_spec.as_ref(),
                alphas.len(),
            )?;
            cfg.cone = Some(label);
            cfg.cone_spec = Some(cone_spec.clone());
            let heights = resolve_indices(n1.as_deref(), cfg.n1.as_deref(), "4..10")?;
            cfg.n1 = Some(render_index_list(&heights));
            if heights.windows(2).any(|w| w[1] != w[0] + 1) {
                return Err(Failure::config(
                    "converge sweeps consecutive heights; give a range like 4..10".to_string(),
                ));
            }
            let system: SystemKind = system
                .map(SystemKind::from)
                .or_else(|| cfg.system.as_deref().and_then(|s| s.parse().ok()))
                .unwrap_or(SystemKind::Kaczmarz);
            cfg.system = Some(system.to_string());
            let report = convergence_experiment(
                function,
                &cone_spec,
                &alphas,
                heights[0],
                *heights.last().unwrap(),
                system,
            )
            .map_err(Failure::from_setup)?;
            let first = report.rows.first().expect("nonempty sweep");
            let last = report.rows.last().expect("nonempty sweep");
            let summary = format!(
                "converge: {function} {system} e1({})={:.6} e1({})={:.6}",
                first.n1, first.e1, last.n1, last.e1
            );
            Ok((report.records(), vec![summary], None))
        }
        Command::Sneider { rank, j, c } => {
            let rank = rank.or(cfg.rank).unwrap_or(11);
            cfg.rank = Some(rank);
            let js = resolve_indices(j.as_deref(), cfg.j.as_deref(), "4..11")?;
            cfg.j = Some(render_index_list(&js));
            let ladder = match (c, &cfg.c) {
                (Some(text), _) => parse_f64_list(text)?,
                (None, Some(list)) => list.clone(),
                (None, None) => vec![0.1, 0.2, 0.5, 1.0],
            };
            cfg.c = Some(ladder.clone());
            let report = sneider_probe(rank, &js, &ladder).map_err(Failure::from_setup)?;
            let (n_last, ratio_last) = *report.zero_ratios.last().expect("nonempty probe");
            let summary = format!(
                "sneider: rank={rank} D_n(0)/ln n reaches {ratio_last:.2} at n={n_last}"
            );
            Ok((report.records(), vec![summary], None))
        }
        Command::Contrast { x, j, alpha } => {
            let bits = parse_bits(x.as_deref().or(cfg.x.as_deref()).unwrap_or("1"))?;
            cfg.x = Some(format!("0b{bits:b}"));
            let js = resolve_indices(j.as_deref(), cfg.j.as_deref(), "3..11")?;
            cfg.j = Some(render_index_list(&js));
            let alphas = resolve_alphas(alpha.as_deref(), cfg, &[1.0])?;
            if alphas.len() != 1 {
                return Err(Failure::config("contrast takes a single order".to_string()));
            }
            let report =
                kernel_contrast_probe(bits, &js, alphas[0]).map_err(Failure::from_setup)?;
            let last = report.rows.last().expect("nonempty probe");
            let summary = format!(
                "contrast: x=0b{bits:b} K_{{2^{}}} kaczmarz {:.4} paley {:.4}",
                last.j, last.kaczmarz, last.paley
            );
            Ok((report.records(), vec![summary], None))
        }
    }
}

/// Orders from the flag (comma list), else the config, else the default;
/// the resolved list is written back into the snapshot.
fn resolve_alphas(
    flag: Option<&str>,
    cfg: &mut RunConfig,
    default: &[f64],
) -> Result<Vec<CesaroOrder>, Failure> {
    let raw: Vec<f64> = match (flag, &cfg.alpha) {
        (Some(text), _) => parse_f64_list(text)?,
        (None, Some(list)) => list.clone(),
        (None, None) => default.to_vec(),
    };
    cfg.alpha = Some(raw.clone());
    to_orders(&raw)
}

fn resolve_indices(
    flag: Option<&str>,
    from_config: Option<&str>,
    default: &str,
) -> Result<Vec<u32>, Failure> {
    parse_index_list(flag.or(from_config).unwrap_or(default))
}
