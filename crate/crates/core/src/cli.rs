//! `ssrlsc` command line: `run`, `sweep`, `synth`, `convert`, `inspect`.
//!
//! Experiment options can also come from `--config FILE`, one `key = value`
//! (or `key: value`) per line using the long flag names without dashes,
//! e.g. `alpha = 0.5` or `no-filter = true`. Flags on the command line win.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::datamodel::{
    load_cube, load_labels, make_synthetic, read_header, write_cube, write_labels, ByteOrder, Dtype, HyperCube,
    Interleave, LabelGrid,
};
use crate::eig::Projection;
use crate::error::{Error, Result};
use crate::pipeline::{
    run_experiment_with, sweep, write_report_csv, write_sweep_csv, ClassifierKind, ExperimentConfig, Method,
    RunReport, SweepAxis,
};

#[derive(Debug, Parser)]
#[command(name = "ssrlsc", version, about = "Spatial-spectral regularized local scaling cut for hyperspectral images")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the multi-run experiment protocol on one configuration.
    Run(RunArgs),
    /// Repeat the experiment over values of one parameter.
    Sweep(SweepArgs),
    /// Write a synthetic block-structured cube and label grid.
    Synth(SynthArgs),
    /// Rewrite a cube with another dtype, byte order or interleave.
    Convert(ConvertArgs),
    /// Print a cube header and basic statistics.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Cube header file.
    #[arg(long)]
    cube: PathBuf,
    /// Label grid CSV (0 = unlabeled).
    #[arg(long)]
    labels: PathBuf,
}

#[derive(Debug, Args, Default)]
struct ExperimentArgs {
    /// Plain-text `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// lsc, rlsc, nplsc or ssrlsc.
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Spatial weight decay (default 1/bands).
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    kw: Option<usize>,
    #[arg(long)]
    kb: Option<usize>,
    /// Spatial patch side (odd).
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    filter_radius: Option<usize>,
    #[arg(long)]
    filter_eps: Option<f64>,
    /// Skip the guided filter.
    #[arg(long)]
    no_filter: bool,
    /// Target dimensions, e.g. `2,4,8` or `2-50`.
    #[arg(long)]
    dim: Option<String>,
    /// Training pixels per class.
    #[arg(long)]
    train_per_class: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    svm_lambda: Option<f64>,
    #[arg(long)]
    svm_epochs: Option<usize>,
    /// svm or 1nn.
    #[arg(long)]
    clf: Option<ClassifierKind>,
    /// Worker threads (1 = single-threaded).
    #[arg(long)]
    threads: Option<usize>,
    /// Machine-readable results.
    #[arg(long)]
    csv_out: Option<PathBuf>,
    /// Write 0 in the CSV seconds column.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Save run 0's projection (and `<path>.svm` classifier).
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// Use a saved projection instead of solving.
    #[arg(long)]
    model_in: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    exp: ExperimentArgs,
    /// dim, window, alpha, beta or train_size.
    #[arg(long)]
    axis: SweepAxis,
    /// Comma-separated values (ranges `a-b` allowed for integer axes).
    #[arg(long)]
    values: String,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Output cube header path (payload goes next to it as `.raw`).
    #[arg(long)]
    out_cube: PathBuf,
    #[arg(long)]
    out_labels: PathBuf,
    #[arg(long, default_value_t = 3)]
    classes: usize,
    #[arg(long, default_value_t = 2)]
    blocks: usize,
    #[arg(long, default_value_t = 8)]
    block_size: usize,
    #[arg(long, default_value_t = 16)]
    bands: usize,
    #[arg(long, default_value_t = 6.0)]
    sep: f64,
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "f64")]
    dtype: Dtype,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "f64")]
    dtype: Dtype,
    #[arg(long, default_value = "little")]
    byte_order: ByteOrder,
    #[arg(long, default_value = "bsq")]
    interleave: Interleave,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[arg(long)]
    cube: PathBuf,
    /// Also report class counts from this label grid.
    #[arg(long)]
    labels: Option<PathBuf>,
}

/// Turns `key = value` lines into `--key value` arguments.
pub fn config_to_args(text: &str) -> std::result::Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| format!("config line {}: expected 'key = value'", i + 1))?;
        let key = k.trim().replace('_', "-");
        let value = v.trim();
        if key == "config" {
            return Err("config files cannot include other config files".into());
        }
        match (key.as_str(), value) {
            ("no-filter" | "no-timing", "true" | "yes" | "1") => out.push(format!("--{key}")),
            ("no-filter" | "no-timing", "false" | "no" | "0") => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value.to_string());
            }
        }
    }
    Ok(out)
}

/// Splices `--config FILE` contents in front of the explicit flags.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let pos = args.iter().position(|a| a == "--config");
    let Some(pos) = pos else { return Ok(args) };
    let Some(path) = args.get(pos + 1) else { return Ok(args) };
    let path = PathBuf::from(path);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let extra = config_to_args(&text).map_err(Error::InvalidParameter)?;
    let mut out: Vec<OsString> = args[..2.min(args.len())].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend(args[2.min(args.len())..].iter().cloned());
    Ok(out)
}

/// Parses `2,4,8` / `2-50` style integer lists.
pub fn parse_int_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once('-') {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
            if a > b {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad integer '{part}'"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

fn parse_values(axis: SweepAxis, s: &str) -> std::result::Result<Vec<f64>, String> {
    match axis {
        SweepAxis::Alpha | SweepAxis::Beta => s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<f64>().map_err(|_| format!("bad value '{p}'")))
            .collect(),
        _ => parse_int_list(s).map(|v| v.into_iter().map(|x| x as f64).collect()),
    }
}

fn build_config(exp: &ExperimentArgs, bands: usize) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::for_method(exp.method.unwrap_or(Method::Ssrlsc), bands);
    macro_rules! set {
        ($field:expr, $opt:expr) => {
            if let Some(v) = $opt {
                $field = v;
            }
        };
    }
    set!(cfg.reg.alpha, exp.alpha);
    set!(cfg.reg.beta, exp.beta);
    set!(cfg.reg.gamma, exp.gamma);
    set!(cfg.k_w, exp.kw);
    set!(cfg.k_b, exp.kb);
    set!(cfg.patch.window, exp.window);
    set!(cfg.filter.radius, exp.filter_radius);
    set!(cfg.filter.epsilon, exp.filter_eps);
    set!(cfg.split.per_class_train, exp.train_per_class);
    set!(cfg.split.runs, exp.runs);
    set!(cfg.split.seed, exp.seed);
    set!(cfg.svm.lambda, exp.svm_lambda);
    set!(cfg.svm.epochs, exp.svm_epochs);
    set!(cfg.classifier, exp.clf);
    cfg.use_filter = !exp.no_filter;
    if let Some(d) = &exp.dim {
        cfg.dims = parse_int_list(d).map_err(Error::InvalidParameter)?;
    }
    Ok(cfg)
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
}

fn load_data(data: &DataArgs) -> Result<(HyperCube, LabelGrid)> {
    let cube = load_cube(&data.cube)?;
    let grid = load_labels(&data.labels, cube.height(), cube.width())?;
    Ok((cube, grid))
}

fn write_csv(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let mut file = io::BufWriter::new(fs::File::create(path).map_err(|e| Error::io(path, e))?);
    f(&mut file).and_then(|_| file.flush()).map_err(|e| Error::io(path, e))
}

fn print_summary(out: &mut dyn Write, label: &str, cfg: &ExperimentConfig, report: &RunReport) -> io::Result<()> {
    let cfg = cfg.normalized();
    writeln!(
        out,
        "{label}: method={} filter={} alpha={} beta={} gamma={} kw={} kb={} window={} train/class={} runs={}",
        cfg.method,
        cfg.use_filter,
        cfg.reg.alpha,
        cfg.reg.beta,
        cfg.reg.gamma,
        cfg.k_w,
        cfg.k_b,
        cfg.patch.window,
        cfg.split.per_class_train,
        cfg.split.runs
    )?;
    writeln!(out, "  {:>4}  {:>8}  {:>8}  {:>8}", "dim", "OA", "AA", "kappa")?;
    for d in report.dims() {
        let m = report.mean(d).expect("dim present");
        writeln!(out, "  {:>4}  {:>8.4}  {:>8.4}  {:>8.4}", d, m.oa, m.aa, m.kappa)?;
    }
    if let Some(b) = report.best() {
        writeln!(out, "  best: OA {:.2}% at dim {} (AA {:.2}%, kappa {:.4})", 100.0 * b.oa, b.dim, 100.0 * b.aa, b.kappa)?;
    }
    let max_tau = report.tau.iter().copied().fold(0.0f64, f64::max);
    if max_tau > crate::eig::JITTER_START {
        writeln!(out, "  note: T_ss needed diagonal jitter tau up to {max_tau:e}")?;
    }
    let stages: Vec<String> = report
        .stage_seconds
        .iter()
        .map(|(k, v)| format!("{k} {v:.3}s"))
        .collect();
    writeln!(out, "  time: {}", stages.join(", "))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    init_threads(args.exp.threads);
    let (cube, grid) = load_data(&args.data)?;
    let cfg = build_config(&args.exp, cube.bands())?;
    let fixed = args.model_in.as_ref().map(Projection::load).transpose()?;
    let report = run_experiment_with(&cube, &grid, &cfg, fixed.as_ref())?;

    print_summary(&mut io::stdout().lock(), "run", &cfg, &report).map_err(|e| Error::io("<stdout>", e))?;
    if let Some(path) = &args.exp.csv_out {
        write_csv(path, |w| write_report_csv(w, "none", &report, !args.exp.no_timing))?;
    }
    if let Some(path) = &args.model_out {
        if let Some(p) = &report.projection {
            p.save(path)?;
        }
        if let Some(m) = &report.model {
            let mut svm = path.as_os_str().to_owned();
            svm.push(".svm");
            m.save(PathBuf::from(svm))?;
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    init_threads(args.exp.threads);
    let (cube, grid) = load_data(&args.data)?;
    let cfg = build_config(&args.exp, cube.bands())?;
    let values = parse_values(args.axis, &args.values).map_err(Error::InvalidParameter)?;
    let table = sweep(&cube, &grid, &cfg, args.axis, &values)?;

    let mut out = io::stdout().lock();
    for e in &table.entries {
        print_summary(&mut out, &format!("{}={}", table.axis, e.value), &e.config, &e.report)
            .map_err(|e| Error::io("<stdout>", e))?;
    }
    if let Some(path) = &args.exp.csv_out {
        write_csv(path, |w| write_sweep_csv(w, &table, !args.exp.no_timing))?;
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let (cube, grid) = make_synthetic(
        args.classes,
        args.blocks,
        args.block_size,
        args.bands,
        args.sep,
        args.noise,
        args.seed,
    )?;
    write_cube(&cube, &args.out_cube, args.dtype, ByteOrder::Little, Interleave::Bsq)?;
    write_labels(&grid, &args.out_labels)?;
    say(&format!(
        "wrote {}x{}x{} cube to {} and {} classes to {}\n",
        cube.height(),
        cube.width(),
        cube.bands(),
        args.out_cube.display(),
        grid.classes(),
        args.out_labels.display()
    ))
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    let cube = load_cube(&args.input)?;
    write_cube(&cube, &args.output, args.dtype, args.byte_order, args.interleave)?;
    say(&format!(
        "wrote {} ({}, {}, {})\n",
        args.output.display(),
        args.dtype,
        args.byte_order,
        args.interleave
    ))
}

fn cmd_inspect(args: InspectArgs) -> Result<()> {
    let header = read_header(&args.cube)?;
    let cube = load_cube(&args.cube)?;
    let vals = cube.values();
    let (min, max) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let mut text = format!(
        "height: {}\nwidth: {}\nbands: {}\ndtype: {}\nbyte_order: {}\ninterleave: {}\ndata_file: {}\n\
         min: {min}\nmax: {max}\nmean: {mean}\n",
        header.height,
        header.width,
        header.bands,
        header.dtype,
        header.byte_order,
        header.interleave,
        header.data_file.display(),
    );
    if let Some(path) = &args.labels {
        let grid = load_labels(path, cube.height(), cube.width())?;
        text += &format!("classes: {}\n", grid.classes());
        for (c, n) in grid.class_counts().iter().enumerate() {
            text += &format!("class {}: {n}\n", c + 1);
        }
    }
    say(&text)
}

fn say(text: &str) -> Result<()> {
    io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

/// Entry point; `args` includes the program name.
pub fn run(args: Vec<OsString>) -> Result<()> {
    let args = expand_config(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            e.print().ok();
            return Ok(());
        }
        Err(e) => return Err(Error::InvalidParameter(e.to_string())),
    };
    match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Inspect(a) => cmd_inspect(a),
    }
}
