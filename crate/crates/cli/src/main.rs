//! Batch CLI for the radiomics pipeline: extract features from volume/mask
//! pairs, analyze feature correlations, evaluate SMOTE->PCA->SVM models
//! under nested LOOCV, and generate synthetic data.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

// `!(x > 0.0)` deliberately rejects NaN alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use voimark_core::error::Error as CoreError;
use voimark_core::eval::{
    evaluate_feature_subset, feature_type_weights, fit_final_model, nested_loocv, EvalReport,
    HyperGrid, KernelKind, LoocvOutcome,
};
use voimark_core::features::{extract_case, FeatureType, FeatureVector, RAW_FEATURE_COUNT};
use voimark_core::filters::derive_all;
use voimark_core::synth::{gen_phantom, gen_tabular, PhantomSpec, TabularSpec};
use voimark_core::table::{
    cluster_order, correlation_summary, format_f64, pearson_matrix, prune_degenerate, FeatureTable,
};
use voimark_core::volume::{
    bounding_box, crop_mask, crop_volume, load_mask, load_volume, save_mask, save_volume, Dtype,
};

#[derive(Parser)]
#[command(name = "voimark", version, about = "radiomic image-marker pipeline")]
struct Cli {
    /// Worker threads (0 = available parallelism); env: VOIMARK_THREADS
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// key=value file overriding command-line flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the raw feature table from a manifest of volume/mask pairs
    Extract(ExtractArgs),
    /// Correlation analyses of an extracted feature table
    Analyze(AnalyzeArgs),
    /// Nested-LOOCV model evaluation on a labeled feature table
    Evaluate(EvaluateArgs),
    /// Generate synthetic phantoms or tabular datasets
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Pretty-print an evaluation report JSON
    Report(ReportArgs),
}

#[derive(Args)]
struct ExtractArgs {
    /// CSV manifest: case_id,volume_path,mask_path,label (label may be empty)
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Discretization bin width in HU
    #[arg(long, default_value_t = 25.0)]
    bin_width: f64,
    /// Also write the 16 derived images per case into this directory
    #[arg(long)]
    dump_derived: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Feature table CSV produced by `extract` or `synth table`
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct EvaluateArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Kernel family: linear | rbf
    #[arg(long, default_value = "rbf")]
    kernel: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict to one feature type (shape|firstorder|glcm|gldm|glrlm|glszm|ngtdm)
    #[arg(long)]
    feature_type: Option<String>,
    /// Comma-separated C grid override
    #[arg(long)]
    c_grid: Option<String>,
    /// Comma-separated gamma grid override (rbf)
    #[arg(long)]
    gamma_grid: Option<String>,
    /// Comma-separated PCA component counts
    #[arg(long)]
    pca_grid: Option<String>,
    /// Comma-separated SMOTE neighbour counts
    #[arg(long)]
    smote_grid: Option<String>,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Write phantom volume/mask pairs plus a manifest
    Phantoms(PhantomArgs),
    /// Write a synthetic labeled feature table CSV
    Table(TableArgs),
}

#[derive(Args)]
struct PhantomArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 60)]
    count: usize,
    /// Negative-class cases (default: two thirds)
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid dims, comma separated
    #[arg(long, default_value = "22,22,16")]
    dims: String,
    /// Voxel spacing in mm, comma separated
    #[arg(long, default_value = "1,1,1.25")]
    spacing: String,
    /// Box-smoothing radius of the negative class
    #[arg(long, default_value_t = 0)]
    radius0: usize,
    /// Box-smoothing radius of the positive class
    #[arg(long, default_value_t = 1)]
    radius1: usize,
    /// White-noise standard deviation in HU
    #[arg(long, default_value_t = 100.0)]
    sigma: f64,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 200)]
    features: usize,
    #[arg(long, default_value_t = 5)]
    informative: usize,
    #[arg(long, default_value_t = 1.5)]
    effect: f64,
    #[arg(long, default_value_t = 28)]
    negatives: usize,
    #[arg(long, default_value_t = 14)]
    positives: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Feature-type tag carried by the informative columns
    #[arg(long)]
    informative_type: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    report: PathBuf,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("i/o error on {}: {e}", path.display()))
}

fn main() -> ExitCode {
    // die quietly when a downstream pager closes the pipe instead of
    // panicking on the next print
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let mut cli = Cli::parse();
    if let Err(e) = apply_config_file(&mut cli) {
        return fail(e);
    }
    let threads = if cli.threads > 0 {
        cli.threads
    } else {
        std::env::var("VOIMARK_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => return fail(CliError::Runtime(format!("thread pool: {e}"))),
    };
    let started = Instant::now();
    let result = pool.install(|| match &cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Synth(SynthCommand::Phantoms(args)) => cmd_synth_phantoms(args),
        Command::Synth(SynthCommand::Table(args)) => cmd_synth_table(args),
        Command::Report(args) => cmd_report(args),
    });
    match result {
        Ok(sidecar) => {
            // timestamps live only in the sidecar log, never in data outputs
            if let Some(dir) = sidecar {
                let log = format!(
                    "finished in {:.3}s with {} threads\n",
                    started.elapsed().as_secs_f64(),
                    threads
                );
                let _ = fs::write(dir.join("run.log"), log);
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    match e {
        CliError::Usage(msg) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        CliError::Runtime(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// `key=value` per line; `#` comments. Values override the parsed flags.
fn apply_config_file(cli: &mut Cli) -> CliResult<()> {
    let Some(path) = cli.config.clone() else {
        return Ok(());
    };
    let text = fs::read_to_string(&path).map_err(|e| usage(format!("config: {e}")))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: missing `=`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match (key, &mut cli.command) {
            ("threads", _) => {
                cli.threads = value
                    .parse()
                    .map_err(|_| usage(format!("config: bad threads `{value}`")))?
            }
            ("bin-width", Command::Extract(a)) => {
                a.bin_width = value
                    .parse()
                    .map_err(|_| usage(format!("config: bad bin-width `{value}`")))?
            }
            ("manifest", Command::Extract(a)) => a.manifest = PathBuf::from(value),
            ("out", Command::Extract(a)) => a.out = PathBuf::from(value),
            ("out", Command::Analyze(a)) => a.out = PathBuf::from(value),
            ("out", Command::Evaluate(a)) => a.out = PathBuf::from(value),
            ("features", Command::Analyze(a)) => a.features = PathBuf::from(value),
            ("features", Command::Evaluate(a)) => a.features = PathBuf::from(value),
            ("kernel", Command::Evaluate(a)) => a.kernel = value.to_string(),
            ("seed", Command::Evaluate(a)) => {
                a.seed = value
                    .parse()
                    .map_err(|_| usage(format!("config: bad seed `{value}`")))?
            }
            ("feature-type", Command::Evaluate(a)) => a.feature_type = Some(value.to_string()),
            ("c-grid", Command::Evaluate(a)) => a.c_grid = Some(value.to_string()),
            ("gamma-grid", Command::Evaluate(a)) => a.gamma_grid = Some(value.to_string()),
            ("pca-grid", Command::Evaluate(a)) => a.pca_grid = Some(value.to_string()),
            ("smote-grid", Command::Evaluate(a)) => a.smote_grid = Some(value.to_string()),
            other => return Err(usage(format!("config: unknown key `{}`", other.0))),
        }
    }
    Ok(())
}

struct ManifestRow {
    case_id: String,
    volume: PathBuf,
    mask: PathBuf,
    label: Option<u8>,
}

fn read_manifest(path: &Path) -> CliResult<Vec<ManifestRow>> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("manifest: {e}")))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header.trim() != "case_id,volume_path,mask_path,label" {
        return Err(usage(
            "manifest header must be `case_id,volume_path,mask_path,label`",
        ));
    }
    let base = path.parent().unwrap_or(Path::new(""));
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(usage(format!(
                "manifest line {}: expected 4 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let label = match fields[3].trim() {
            "" => None,
            "0" => Some(0),
            "1" => Some(1),
            other => {
                return Err(usage(format!(
                    "manifest line {}: bad label `{other}`",
                    lineno + 2
                )))
            }
        };
        // relative paths resolve against the manifest location
        let resolve = |p: &str| {
            let pb = PathBuf::from(p);
            if pb.is_absolute() {
                pb
            } else {
                base.join(pb)
            }
        };
        rows.push(ManifestRow {
            case_id: fields[0].trim().to_string(),
            volume: resolve(fields[1].trim()),
            mask: resolve(fields[2].trim()),
            label,
        });
    }
    if rows.is_empty() {
        return Err(usage("manifest has no case rows"));
    }
    Ok(rows)
}

fn ensure_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    fs::write(path, content).map_err(|e| io_err(path, e))
}

fn cmd_extract(args: &ExtractArgs) -> CliResult<Option<PathBuf>> {
    if !(args.bin_width > 0.0) {
        return Err(usage("bin-width must be positive"));
    }
    let rows = read_manifest(&args.manifest)?;
    ensure_dir(&args.out)?;
    if let Some(dir) = &args.dump_derived {
        ensure_dir(dir)?;
    }

    let results: Vec<Result<(FeatureVector, Option<u8>), String>> = rows
        .par_iter()
        .map(|row| {
            let run = || -> Result<(FeatureVector, Option<u8>), CoreError> {
                let volume = load_volume(&row.volume)?;
                let mask = load_mask(&row.mask, &volume)?;
                if mask.is_empty() {
                    eprintln!("warning: case {} has an empty mask", row.case_id);
                }
                let fv = extract_case(&row.case_id, &volume, &mask, args.bin_width)?;
                if let Some(dir) = &args.dump_derived {
                    let bb = bounding_box(&mask, voimark_core::features::VOI_MARGIN)?;
                    let v = crop_volume(&volume, &bb);
                    let m = crop_mask(&mask, &bb);
                    for image in derive_all(&v, &m)? {
                        let name = format!("{}_{}.hdr", row.case_id, image.image_type.tag());
                        save_volume(&dir.join(name), &image.volume, Dtype::F32)?;
                    }
                }
                Ok((fv, row.label))
            };
            run().map_err(|e| format!("case {}: {e}", row.case_id))
        })
        .collect();

    let mut cases = Vec::new();
    let mut labels = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok((fv, label)) => {
                cases.push(fv);
                labels.push(label);
            }
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() {
        write_file(&args.out.join("errors.log"), &(errors.join("\n") + "\n"))?;
    }
    if cases.is_empty() {
        return Err(CliError::Runtime(format!(
            "no case extracted ({} failures, see errors.log)",
            errors.len()
        )));
    }
    let table = FeatureTable::from_cases(&cases, labels).map_err(CliError::from)?;
    table
        .write_csv(&args.out.join("features.csv"))
        .map_err(CliError::from)?;

    // Per-image-type summary of the raw layout.
    let counts = cases[0].counts_by_image_type();
    let sum_tagged = |prefix: &str| -> usize {
        counts
            .iter()
            .filter(|(t, _)| t.tag().starts_with(prefix))
            .map(|&(_, c)| c)
            .sum()
    };
    println!(
        "feature counts: Original={} Exponential={} Gradient={} LBP3D={} Logarithm={} Square={} Squareroot={} Wavelet={} Total={}",
        sum_tagged("original"),
        sum_tagged("exponential"),
        sum_tagged("gradient"),
        sum_tagged("lbp3d"),
        sum_tagged("logarithm"),
        sum_tagged("square") - sum_tagged("squareroot"),
        sum_tagged("squareroot"),
        sum_tagged("wavelet"),
        RAW_FEATURE_COUNT
    );
    println!(
        "extracted {} of {} cases -> {}",
        cases.len(),
        cases.len() + errors.len(),
        args.out.join("features.csv").display()
    );
    if errors.is_empty() {
        Ok(Some(args.out.clone()))
    } else {
        Err(CliError::Runtime(format!(
            "{} case(s) failed, see errors.log",
            errors.len()
        )))
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> CliResult<Option<PathBuf>> {
    let table = FeatureTable::read_csv(&args.features).map_err(CliError::from)?;
    ensure_dir(&args.out)?;
    let (pruned, prune_log) = prune_degenerate(&table)?;
    let corr = pearson_matrix(&pruned)?;
    let order = cluster_order(&corr);
    let summary = correlation_summary(&corr, &pruned.columns);

    let mut prune_csv = String::from("name,reason\n");
    for rec in &prune_log {
        let _ = writeln!(prune_csv, "{},{}", rec.name, rec.reason);
    }
    write_file(&args.out.join("prune_log.csv"), &prune_csv)?;

    // cluster-ordered correlation matrix
    let mut matrix_csv = String::from("feature");
    for &c in &order {
        matrix_csv.push(',');
        matrix_csv.push_str(&pruned.columns[c].name);
    }
    matrix_csv.push('\n');
    for &r in &order {
        matrix_csv.push_str(&pruned.columns[r].name);
        for &c in &order {
            matrix_csv.push(',');
            matrix_csv.push_str(&format_f64(corr.get(r, c)));
        }
        matrix_csv.push('\n');
    }
    write_file(&args.out.join("correlation_matrix.csv"), &matrix_csv)?;

    let mut hist_csv = String::from("bin_lo,bin_hi,count\n");
    for (i, count) in summary.histogram.iter().enumerate() {
        let _ = writeln!(
            hist_csv,
            "{},{},{}",
            format_f64(i as f64 * 0.05),
            format_f64((i + 1) as f64 * 0.05),
            count
        );
    }
    write_file(&args.out.join("correlation_histogram.csv"), &hist_csv)?;

    let json =
        serde_json::to_string_pretty(&summary).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_file(&args.out.join("correlation_summary.json"), &json)?;

    println!(
        "analyzed {} features over {} cases ({} pruned)",
        pruned.n_features(),
        pruned.n_cases(),
        prune_log.len()
    );
    println!("fraction of |r| <= 0.5: {:.4}", summary.fraction_le_half);
    Ok(Some(args.out.clone()))
}

fn build_grid(args: &EvaluateArgs) -> CliResult<HyperGrid> {
    let kernel = match args.kernel.as_str() {
        "linear" => KernelKind::Linear,
        "rbf" => KernelKind::Rbf,
        other => return Err(usage(format!("kernel must be linear|rbf, got `{other}`"))),
    };
    let mut grid = match kernel {
        KernelKind::Linear => HyperGrid::linear(),
        KernelKind::Rbf => HyperGrid::rbf(),
    };
    let parse_f64s = |s: &str, what: &str| -> CliResult<Vec<f64>> {
        s.split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("bad {what} entry `{f}`")))
            })
            .collect()
    };
    let parse_usizes = |s: &str, what: &str| -> CliResult<Vec<usize>> {
        s.split(',')
            .map(|f| {
                f.trim()
                    .parse::<usize>()
                    .map_err(|_| usage(format!("bad {what} entry `{f}`")))
            })
            .collect()
    };
    if let Some(s) = &args.c_grid {
        grid.c_values = parse_f64s(s, "c-grid")?;
    }
    if let Some(s) = &args.gamma_grid {
        grid.gamma_values = parse_f64s(s, "gamma-grid")?;
    }
    if let Some(s) = &args.pca_grid {
        grid.pca_k = parse_usizes(s, "pca-grid")?;
    }
    if let Some(s) = &args.smote_grid {
        grid.smote_k = parse_usizes(s, "smote-grid")?;
    }
    grid.validate().map_err(|e| usage(e.to_string()))?;
    Ok(grid)
}

fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<Option<PathBuf>> {
    let table = FeatureTable::read_csv(&args.features).map_err(CliError::from)?;
    let grid = build_grid(args)?;
    ensure_dir(&args.out)?;

    let outcome: LoocvOutcome = match &args.feature_type {
        Some(tag) => {
            let ftype = FeatureType::parse(tag).map_err(|e| usage(e.to_string()))?;
            evaluate_feature_subset(&table, ftype, &grid, args.seed)?
        }
        None => nested_loocv(&table, &grid, args.seed)?,
    };
    let report = &outcome.report;
    write_file(
        &args.out.join("eval_report.json"),
        &report.to_json_pretty()?,
    )?;
    write_file(&args.out.join("roc.csv"), &report.roc_csv())?;
    write_file(&args.out.join("confusion.csv"), &report.confusion_csv())?;
    write_file(
        &args.out.join("chosen_hyperparams.csv"),
        &report.chosen_hyperparams_csv(),
    )?;

    if grid.kernel == KernelKind::Linear {
        let weights = feature_type_weights(&outcome.models)?;
        let mut csv = String::from("feature_type,weight\n");
        for (t, w) in &weights {
            let _ = writeln!(csv, "{},{}", t.tag(), format_f64(*w));
        }
        write_file(&args.out.join("feature_type_weights.csv"), &csv)?;
    }

    // deployable model refit on all cases, hyperparameters re-selected on
    // the full table
    let subset_table;
    let model_table = match &args.feature_type {
        Some(tag) => {
            let ftype = FeatureType::parse(tag).map_err(|e| usage(e.to_string()))?;
            let idx: Vec<usize> = table
                .columns
                .iter()
                .enumerate()
                .filter(|(_, c)| c.feature_type == ftype)
                .map(|(i, _)| i)
                .collect();
            subset_table = table.select_columns(&idx);
            &subset_table
        }
        None => &table,
    };
    let (model, inner_auc) = fit_final_model(model_table, &grid, args.seed)?;
    write_file(
        &args.out.join("pipeline_model.json"),
        &model.to_json_pretty()?,
    )?;

    println!(
        "outer AUC {:.4} +/- {:.4} | ACC {:.4} | confusion tp={} fp={} fn={} tn={}",
        report.auc,
        report.auc_se,
        report.metrics.acc,
        report.confusion.tp,
        report.confusion.fp,
        report.confusion.fn_,
        report.confusion.tn
    );
    println!(
        "final model: smote_k={} pca_k={} C={} gamma={} (inner AUC {:.4})",
        model.config.smote_k,
        model.config.pca_k,
        format_f64(model.config.c),
        model.config.gamma.map_or("-".into(), format_f64),
        inner_auc
    );
    Ok(Some(args.out.clone()))
}

fn parse_triple<T: std::str::FromStr + Copy>(s: &str, what: &str) -> CliResult<(T, T, T)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(usage(format!("{what} needs three comma-separated values")));
    }
    let mut vals = Vec::with_capacity(3);
    for p in parts {
        vals.push(
            p.trim()
                .parse::<T>()
                .map_err(|_| usage(format!("bad {what} entry `{p}`")))?,
        );
    }
    Ok((vals[0], vals[1], vals[2]))
}

fn cmd_synth_phantoms(args: &PhantomArgs) -> CliResult<Option<PathBuf>> {
    if args.count < 4 {
        return Err(usage("count must be at least 4 (two per class)"));
    }
    let dims: (usize, usize, usize) = parse_triple(&args.dims, "dims")?;
    let spacing: (f64, f64, f64) = parse_triple(&args.spacing, "spacing")?;
    let n_neg = args.negatives.unwrap_or(args.count * 2 / 3);
    if n_neg < 2 || args.count - n_neg < 2 {
        return Err(usage("each class needs at least 2 cases"));
    }
    ensure_dir(&args.out)?;

    let specs: Vec<(String, PhantomSpec)> = (0..args.count)
        .map(|i| {
            let class = u8::from(i >= n_neg);
            let case_id = format!("case_{i:04}");
            // per-case ellipsoid jitter so shape features vary across cases
            let mut jrng = voimark_core::rng::SplitMix64::new(
                args.seed ^ voimark_core::rng::fnv1a64(case_id.as_bytes()),
            );
            let mut jitter = || 0.85 + 0.3 * jrng.next_f64();
            let spec = PhantomSpec {
                seed: args.seed.wrapping_add(i as u64),
                class_label: class,
                dims,
                spacing,
                semi_axes_mm: (7.5 * jitter(), 6.5 * jitter(), 6.0 * jitter()),
                smooth_radius: if class == 1 {
                    args.radius1
                } else {
                    args.radius0
                },
                offset_hu: 40.0,
                noise_sigma: args.sigma,
            };
            (case_id, spec)
        })
        .collect();

    let written: Vec<CliResult<String>> = specs
        .par_iter()
        .map(|(case_id, spec)| {
            let (volume, mask) = gen_phantom(spec).map_err(CliError::from)?;
            let vol_name = format!("{case_id}_vol.hdr");
            let msk_name = format!("{case_id}_msk.hdr");
            save_volume(&args.out.join(&vol_name), &volume, Dtype::F32).map_err(CliError::from)?;
            save_mask(&args.out.join(&msk_name), &mask, spec.spacing).map_err(CliError::from)?;
            Ok(format!(
                "{case_id},{vol_name},{msk_name},{}",
                spec.class_label
            ))
        })
        .collect();

    let mut manifest = String::from("case_id,volume_path,mask_path,label\n");
    for row in written {
        manifest.push_str(&row?);
        manifest.push('\n');
    }
    write_file(&args.out.join("manifest.csv"), &manifest)?;
    println!(
        "wrote {} phantoms ({} negative / {} positive) -> {}",
        args.count,
        n_neg,
        args.count - n_neg,
        args.out.join("manifest.csv").display()
    );
    Ok(Some(args.out.clone()))
}

fn cmd_synth_table(args: &TableArgs) -> CliResult<Option<PathBuf>> {
    let informative_type = match &args.informative_type {
        Some(tag) => Some(FeatureType::parse(tag).map_err(|e| usage(e.to_string()))?),
        None => None,
    };
    let spec = TabularSpec {
        seed: args.seed,
        n_features: args.features,
        n_informative: args.informative,
        effect_size: args.effect,
        n_negative: args.negatives,
        n_positive: args.positives,
        informative_type,
    };
    let table = gen_tabular(&spec).map_err(CliError::from)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    table.write_csv(&args.out).map_err(CliError::from)?;
    println!(
        "wrote {} cases x {} features -> {}",
        table.n_cases(),
        table.n_features(),
        args.out.display()
    );
    Ok(None)
}

fn cmd_report(args: &ReportArgs) -> CliResult<Option<PathBuf>> {
    let text = fs::read_to_string(&args.report).map_err(|e| io_err(&args.report, e))?;
    let report = EvalReport::from_json(&text).map_err(CliError::from)?;
    println!("kernel:           {}", report.kernel);
    println!("seed:             {}", report.seed);
    if let Some(subset) = &report.subset {
        println!("feature subset:   {subset}");
    }
    println!(
        "cases:            {} ({} positive / {} negative)",
        report.n_cases, report.n_positive, report.n_negative
    );
    println!(
        "AUC:              {:.4} +/- {:.4}",
        report.auc, report.auc_se
    );
    let c = &report.confusion;
    println!(
        "confusion:        tp={} fp={} fn={} tn={}",
        c.tp, c.fp, c.fn_, c.tn
    );
    let pct = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{:.1}%", 100.0 * x));
    println!("accuracy:         {:.1}%", 100.0 * report.metrics.acc);
    println!("PPV:              {}", pct(report.metrics.ppv));
    println!("NPV:              {}", pct(report.metrics.npv));
    println!("sensitivity:      {}", pct(report.metrics.sensitivity));
    println!("specificity:      {}", pct(report.metrics.specificity));
    if report.skipped_inner_folds > 0 {
        println!("skipped inner folds: {}", report.skipped_inner_folds);
    }
    println!(
        "fold  case              label  score        smote_k pca_k C        gamma   inner_auc"
    );
    for (i, f) in report.folds.iter().enumerate() {
        println!(
            "{:<5} {:<17} {:<6} {:<12.5} {:<7} {:<5} {:<8} {:<7} {:.4}",
            i,
            f.case_id,
            f.label,
            f.score,
            f.config.smote_k,
            f.config.pca_k,
            format_f64(f.config.c),
            f.config.gamma.map_or("-".into(), format_f64),
            f.inner_auc
        );
    }
    Ok(None)
}
