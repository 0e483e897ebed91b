//! Command line front end: exact limit moments, mask reports, and the
//! config-driven Monte Carlo runner.
//!
//! Exit codes: 0 when every reported comparison passes, 2 for invalid
//! arguments or configs, 3 when a comparison fails, 4 when an
//! enumeration or summation budget is exceeded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use freemask::combinat::{
    enumerate_nc2, enumerate_pair_partitions, gamma_pi_orbit_count, is_noncrossing, PairPartition,
};
use freemask::error::{Error, Result};
use freemask::expcli::{
    parse_config,
    report::{csv_document, fmt_sig, RunOutput, CSV_SIG_DIGITS},
    run, ExperimentConfig, MaskGenConfig, Scenario, VerifyConfig,
};
use freemask::freelimits::{
    elliptic_star_moment, free_family_mixed_moment, mp_moment_closed, Word,
};
use freemask::linalg::Matrix;
use freemask::masks::{epsilon_sets, mask_partition_weight};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "freemask",
    version,
    about = "Exact limit *-moments of masked random matrices, and Monte Carlo checks against them"
)]
struct Cli {
    /// Master seed; overrides the seed in a config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for Monte Carlo trials (default: all cores).
    #[arg(long, global = true, env = "FREEMASK_THREADS")]
    threads: Option<usize>,

    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Directory for artifact files (CSV tables plus report.json).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MomentKind {
    /// phi((c c*)^k): alternating word of a circular variable.
    Circular,
    /// phi(a^(2k)) of an elliptic variable with mirror correlation rho.
    Elliptic,
    /// k-th moment of the Marchenko-Pastur law with aspect ratio y.
    Mp,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate pair partitions of {1,...,2k}.
    Partitions {
        /// Number of pairs.
        #[arg(long)]
        k: usize,
        /// Restrict to non-crossing pairings.
        #[arg(long)]
        noncrossing: bool,
        /// Add orbit counts and the non-crossing flag per row.
        #[arg(long)]
        stats: bool,
    },
    /// Print an exact limit moment.
    LimitMoments {
        #[arg(long, value_enum, required_unless_present = "word")]
        kind: Option<MomentKind>,
        /// Moment order (pairs; the evaluated word has 2k letters).
        #[arg(long, required_unless_present = "word")]
        k: Option<usize>,
        /// Mirror correlation for elliptic moments, or for every label of --word.
        #[arg(long)]
        rho: Option<f64>,
        /// Aspect ratio for Marchenko-Pastur moments (default 1).
        #[arg(long)]
        y: Option<f64>,
        /// Mixed word such as "1,2,1*,2*"; labels are treated as a free family.
        #[arg(long)]
        word: Option<String>,
    },
    /// Density and almost-full-row/column report for a mask generator.
    MaskReport {
        /// Generator: full, bernoulli, band-removed, kill-columns, checkerboard, block-zero.
        #[arg(long)]
        gen: String,
        /// Columns (and rows, unless --p is given).
        #[arg(long)]
        n: usize,
        /// Rows for rectangular masks.
        #[arg(long)]
        p: Option<usize>,
        /// Generator parameter as key=value (repeatable), e.g. --param q=0.9.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Threshold for the epsilon-full row and column sets.
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Pair partition such as "(1,2)(3,4)"; adds the mask partition weight.
        #[arg(long)]
        pi: Option<String>,
    },
    /// Run a moment-sweep or covariance-sweep config and compare to exact limits.
    SimulateMoment {
        /// JSON config file.
        #[arg(long)]
        config: PathBuf,
        /// Debug: write the first sampled masked matrix as CSV (17 significant digits).
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Run an esd config: eigenvalues, histogram, and KS distances.
    Esd {
        /// JSON config file.
        #[arg(long)]
        config: PathBuf,
        /// Debug: write the first sampled masked matrix as CSV (17 significant digits).
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Run a freeness config: mixed words against free-family predictions.
    Freeness {
        /// JSON config file.
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the built-in verification battery.
    Verify {
        /// Comma-separated criterion ids (1..=10); all when omitted.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<usize>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SizeLimit(_) => ExitCode::from(4),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// Runs the chosen command; the flag says whether every comparison passed.
fn run_cli(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::config(format!("cannot size thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Partitions { k, noncrossing, stats } => {
            partitions(&cli, *k, *noncrossing, *stats)?;
            Ok(true)
        }
        Command::LimitMoments { kind, k, rho, y, word } => {
            limit_moments(&cli, *kind, *k, *rho, *y, word.as_deref())?;
            Ok(true)
        }
        Command::MaskReport { gen, n, p, params, eps, pi } => {
            mask_report(&cli, gen, *n, *p, params, *eps, pi.as_deref())?;
            Ok(true)
        }
        Command::SimulateMoment { config, dump_matrix } => {
            let cfg = load_config(&cli, config)?;
            match cfg.scenario() {
                Scenario::MomentSweep | Scenario::CovarianceSweep => {}
                other => {
                    return Err(Error::config(format!(
                        "simulate-moment expects a moment-sweep or covariance-sweep config, got {other}"
                    )))
                }
            }
            if let Some(path) = dump_matrix {
                dump_first_matrix(&cfg, path)?;
            }
            let out = run(&cfg)?;
            emit_run(&cli, &out)?;
            Ok(out.report.pass)
        }
        Command::Esd { config, dump_matrix } => {
            let cfg = load_config(&cli, config)?;
            if cfg.scenario() != Scenario::Esd {
                return Err(Error::config(format!(
                    "esd expects an esd config, got {}",
                    cfg.scenario()
                )));
            }
            if let Some(path) = dump_matrix {
                dump_first_matrix(&cfg, path)?;
            }
            let out = run(&cfg)?;
            emit_run(&cli, &out)?;
            Ok(out.report.pass)
        }
        Command::Freeness { config } => {
            let cfg = load_config(&cli, config)?;
            if cfg.scenario() != Scenario::Freeness {
                return Err(Error::config(format!(
                    "freeness expects a freeness config, got {}",
                    cfg.scenario()
                )));
            }
            let out = run(&cfg)?;
            emit_run(&cli, &out)?;
            Ok(out.report.pass)
        }
        Command::Verify { criteria } => {
            let cfg = ExperimentConfig::Verify(VerifyConfig {
                scenario: Scenario::Verify,
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
                criteria: criteria.clone(),
            });
            let out = run(&cfg)?;
            emit_run(&cli, &out)?;
            Ok(out.report.pass)
        }
    }
}

fn load_config(cli: &Cli, path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    Ok(cfg)
}

fn pairs_string(pi: &PairPartition) -> String {
    pi.pairs().iter().map(|(a, b)| format!("({a},{b})")).collect()
}

fn partitions(cli: &Cli, k: usize, noncrossing: bool, stats: bool) -> Result<()> {
    let list = if noncrossing { enumerate_nc2(k)? } else { enumerate_pair_partitions(k)? };
    let (header, records): (Vec<&str>, Vec<Vec<String>>) = if stats {
        (
            vec!["pairs", "orbits", "noncrossing"],
            list.iter()
                .map(|pi| {
                    vec![
                        pairs_string(pi),
                        gamma_pi_orbit_count(pi).to_string(),
                        is_noncrossing(pi).to_string(),
                    ]
                })
                .collect(),
        )
    } else {
        (vec!["pairs"], list.iter().map(|pi| vec![pairs_string(pi)]).collect())
    };
    let json = serde_json::Value::Array(
        records
            .iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                for (name, value) in header.iter().zip(r) {
                    let v = match *name {
                        "orbits" => serde_json::json!(value.parse::<usize>().expect("numeric")),
                        "noncrossing" => serde_json::json!(value == "true"),
                        _ => serde_json::json!(value),
                    };
                    obj.insert((*name).to_string(), v);
                }
                serde_json::Value::Object(obj)
            })
            .collect(),
    );
    emit_simple(cli, "partitions.csv", csv_document(&header, &records)?, json)
}

fn sig(v: f64) -> String {
    fmt_sig(v, CSV_SIG_DIGITS)
}

fn limit_moments(
    cli: &Cli,
    kind: Option<MomentKind>,
    k: Option<usize>,
    rho: Option<f64>,
    y: Option<f64>,
    word: Option<&str>,
) -> Result<f64> {
    let (kind_name, k_out, rho_out, y_out, value) = if let Some(text) = word {
        let w: Word = text.parse()?;
        let rho_value = rho.unwrap_or(0.0);
        let rho_map: BTreeMap<usize, f64> = w.labels().into_iter().map(|l| (l, rho_value)).collect();
        let v = free_family_mixed_moment(&w, &rho_map)?;
        ("word".to_string(), w.len(), Some(rho_value), None, v)
    } else {
        let kind = kind.expect("required by clap");
        let k = k.expect("required by clap");
        match kind {
            MomentKind::Circular => {
                if rho.is_some() {
                    return Err(Error::config("circular moments take no rho"));
                }
                let stars: Vec<bool> = (0..2 * k).map(|i| i % 2 == 1).collect();
                ("circular".to_string(), k, None, None, elliptic_star_moment(&stars, 0.0)?)
            }
            MomentKind::Elliptic => {
                let rho = rho.ok_or_else(|| Error::config("elliptic moments need --rho"))?;
                let stars = vec![false; 2 * k];
                ("elliptic".to_string(), k, Some(rho), None, elliptic_star_moment(&stars, rho)?)
            }
            MomentKind::Mp => {
                if rho.is_some() {
                    return Err(Error::config("mp moments take no rho"));
                }
                let y = y.unwrap_or(1.0);
                ("mp".to_string(), k, None, Some(y), mp_moment_closed(k, y)?)
            }
        }
    };
    let record = vec![
        kind_name.clone(),
        k_out.to_string(),
        rho_out.map(sig).unwrap_or_default(),
        y_out.map(sig).unwrap_or_default(),
        sig(value),
    ];
    let json = serde_json::json!({
        "kind": kind_name,
        "k": k_out,
        "rho": rho_out,
        "y": y_out,
        "value": value,
    });
    emit_simple(
        cli,
        "limit_moments.csv",
        csv_document(&["kind", "k", "rho", "y", "value"], &[record])?,
        json,
    )?;
    Ok(value)
}

fn mask_config_from_args(gen: &str, params: &[String]) -> Result<MaskGenConfig> {
    let mut map = serde_json::Map::new();
    map.insert("gen".to_string(), serde_json::Value::String(gen.to_string()));
    for p in params {
        let (key, value) = p
            .split_once('=')
            .ok_or_else(|| Error::config(format!("parameter {p:?} is not key=value")))?;
        let parsed: serde_json::Value = serde_json::from_str(value.trim())
            .map_err(|_| Error::config(format!("parameter value {value:?} is not a number")))?;
        map.insert(key.trim().to_string(), parsed);
    }
    serde_json::from_value(serde_json::Value::Object(map))
        .map_err(|e| Error::config(format!("invalid mask parameters: {e}")))
}

fn parse_pi(text: &str) -> Result<PairPartition> {
    let mut pairs = Vec::new();
    for seg in text.trim().split(')') {
        let seg = seg.trim();
        if seg.is_empty() {
            continue;
        }
        let body = seg
            .strip_prefix('(')
            .ok_or_else(|| Error::config(format!("pair partition {text:?} is not (a,b)(c,d)...")))?;
        let (a, b) = body
            .split_once(',')
            .ok_or_else(|| Error::config(format!("pair partition {text:?} is not (a,b)(c,d)...")))?;
        let a: usize = a.trim().parse().map_err(|_| Error::config(format!("bad index in {text:?}")))?;
        let b: usize = b.trim().parse().map_err(|_| Error::config(format!("bad index in {text:?}")))?;
        pairs.push((a, b));
    }
    PairPartition::new(pairs)
}

fn mask_report(
    cli: &Cli,
    gen: &str,
    n: usize,
    p: Option<usize>,
    params: &[String],
    eps: f64,
    pi: Option<&str>,
) -> Result<()> {
    let cfg = mask_config_from_args(gen, params)?;
    let (rows, cols) = (p.unwrap_or(n), n);
    let mask = cfg.build(rows, cols)?;
    let report = epsilon_sets(&mask, eps)?;
    let mut header = vec!["generator", "rows", "cols", "density", "epsilon", "row_set_size", "col_set_size"];
    let mut record = vec![
        gen.to_string(),
        rows.to_string(),
        cols.to_string(),
        sig(report.density),
        sig(report.epsilon),
        report.row_set_size.to_string(),
        report.col_set_size.to_string(),
    ];
    let mut json = serde_json::json!({
        "generator": gen,
        "rows": rows,
        "cols": cols,
        "density": report.density,
        "epsilon": report.epsilon,
        "row_set_size": report.row_set_size,
        "col_set_size": report.col_set_size,
    });
    if let Some(text) = pi {
        let partition = parse_pi(text)?;
        let weight = mask_partition_weight(&mask, &partition)?;
        header.extend(["pi", "weight"]);
        record.push(pairs_string(&partition));
        record.push(sig(weight));
        json["pi"] = serde_json::json!(pairs_string(&partition));
        json["weight"] = serde_json::json!(weight);
    }
    emit_simple(cli, "mask_report.csv", csv_document(&header, &[record])?, json)
}

/// Writes the first matrix a runner config would sample, for debugging:
/// trial 0 of the first label at the first size, after masking (and
/// 1/sqrt(n) normalization for square words).
fn dump_first_matrix(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let matrix: Matrix = match cfg {
        ExperimentConfig::MomentSweep(c) => {
            let n = c.sizes[0];
            let lc = &c.labels[0];
            let sampled = lc.ensemble.build(n, n)?.sample(c.seed, 0, lc.label as u64);
            sampled.masked_normalized(&lc.mask.build(n, n)?)?
        }
        ExperimentConfig::CovarianceSweep(c) => {
            let size = c.sizes[0];
            let lc = &c.labels[0];
            let sampled = lc.ensemble.build(size.p, size.n)?.sample(c.seed, 0, lc.label as u64);
            sampled.masked(&lc.mask.build(size.p, size.n)?)?
        }
        ExperimentConfig::Esd(c) => {
            let lc = &c.label;
            let sampled = lc.ensemble.build(c.size.p, c.size.n)?.sample(c.seed, 0, lc.label as u64);
            sampled.masked(&lc.mask.build(c.size.p, c.size.n)?)?
        }
        _ => return Err(Error::config("this scenario has no matrix to dump")),
    };
    let mut text = String::new();
    for i in 0..matrix.rows() {
        let row: Vec<String> = matrix.row(i).iter().map(|&v| fmt_sig(v, 17)).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn emit_run(cli: &Cli, out: &RunOutput) -> Result<()> {
    match cli.format {
        Format::Csv => print!("{}", out.primary_csv()),
        Format::Json => println!("{}", out.report_json()?),
    }
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir)?;
        for artifact in &out.artifacts {
            fs::write(dir.join(&artifact.name), &artifact.text)?;
        }
        fs::write(dir.join("report.json"), out.report_json()?)?;
    }
    Ok(())
}

fn emit_simple(cli: &Cli, name: &str, csv: String, json: serde_json::Value) -> Result<()> {
    match cli.format {
        Format::Csv => print!("{csv}"),
        Format::Json => {
            let text = serde_json::to_string_pretty(&json)
                .map_err(|e| Error::config(format!("cannot encode json: {e}")))?;
            println!("{text}");
        }
    }
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), csv)?;
    }
    Ok(())
}
