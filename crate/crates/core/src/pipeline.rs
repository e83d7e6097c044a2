//! End-to-end experiment protocol: split → filter → standardize → kNN graph →
//! scatter matrices → fusion → pencil solve → projection → classification →
//! metrics, repeated over seeded runs and target dimensions.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use crate::classify::{self, ConfusionMatrix, LinearModel, Metrics, SvmParams};
use crate::datamodel::{split_positions, HyperCube, LabelGrid, SampleSet, SplitSpec, Standardizer};
use crate::eig::{self, Projection};
use crate::error::{Error, Result, StageExt};
use crate::filter::{self, FilterParams};
use crate::graph;
use crate::scatter::{self, RegularizationParams, ScatterMatrix, SpatialPatchSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Plain local scaling cut: alpha = 0, beta = 1.
    Lsc,
    /// Regularized spectral cut: beta = 1.
    Rlsc,
    /// Spatial neighboring-pixel cut only: beta = 0.
    Nplsc,
    Ssrlsc,
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lsc" => Ok(Method::Lsc),
            "rlsc" => Ok(Method::Rlsc),
            "nplsc" => Ok(Method::Nplsc),
            "ssrlsc" => Ok(Method::Ssrlsc),
            other => Err(format!("unknown method '{other}' (lsc, rlsc, nplsc, ssrlsc)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Lsc => "lsc",
            Method::Rlsc => "rlsc",
            Method::Nplsc => "nplsc",
            Method::Ssrlsc => "ssrlsc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    Svm,
    OneNn,
}

impl FromStr for ClassifierKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "svm" => Ok(ClassifierKind::Svm),
            "1nn" => Ok(ClassifierKind::OneNn),
            other => Err(format!("unknown classifier '{other}' (svm, 1nn)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub method: Method,
    pub use_filter: bool,
    pub reg: RegularizationParams,
    pub k_w: usize,
    pub k_b: usize,
    pub patch: SpatialPatchSpec,
    pub filter: FilterParams,
    /// Target dimensions; the pencil is solved once at the largest.
    pub dims: Vec<usize>,
    pub split: SplitSpec,
    pub classifier: ClassifierKind,
    pub svm: SvmParams,
}

impl ExperimentConfig {
    /// Defaults for a cube with `bands` bands: alpha 0.5, beta 0.3,
    /// gamma 1/bands, k_w = k_b = 7, 3×3 spatial window, filter radius 1 with
    /// epsilon 0.01, dims 2..=min(50, bands), 10 training pixels per class
    /// over 5 runs, linear SVM.
    pub fn for_method(method: Method, bands: usize) -> Self {
        let max_dim = bands.clamp(1, 50);
        Self {
            method,
            use_filter: true,
            reg: RegularizationParams {
                alpha: 0.5,
                beta: 0.3,
                gamma: 1.0 / bands.max(1) as f64,
            },
            k_w: 7,
            k_b: 7,
            patch: SpatialPatchSpec { window: 3 },
            filter: FilterParams::default(),
            dims: (max_dim.min(2)..=max_dim).collect(),
            split: SplitSpec::default(),
            classifier: ClassifierKind::Svm,
            svm: SvmParams::default(),
        }
    }

    /// Copy with the method's forced parameters applied.
    pub fn normalized(&self) -> Self {
        let mut cfg = self.clone();
        match cfg.method {
            Method::Lsc => {
                cfg.reg.alpha = 0.0;
                cfg.reg.beta = 1.0;
            }
            Method::Rlsc => cfg.reg.beta = 1.0,
            Method::Nplsc => cfg.reg.beta = 0.0,
            Method::Ssrlsc => {}
        }
        cfg
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn validate(&self, bands: usize) -> Result<()> {
        self.reg.validate()?;
        self.patch.validate()?;
        self.filter.validate()?;
        self.split.validate()?;
        if self.k_w == 0 || self.k_b == 0 {
            return Err(Error::InvalidParameter("k_w and k_b must be >= 1".into()));
        }
        if self.dims.is_empty() {
            return Err(Error::InvalidParameter("no target dimensions".into()));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d == 0 || d > bands) {
            return Err(Error::InvalidParameter(format!(
                "target dimension {d} outside 1..={bands}"
            )));
        }
        if !(self.svm.lambda > 0.0) {
            return Err(Error::InvalidParameter("svm lambda must be > 0".into()));
        }
        Ok(())
    }
}

/// Metrics of one (run, dimension) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimResult {
    pub run: usize,
    pub dim: usize,
    pub metrics: Metrics,
    /// Shared per-run stages plus this dimension's projection and
    /// classification.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub rows: Vec<DimResult>,
    /// Wall time per stage summed over runs.
    pub stage_seconds: BTreeMap<&'static str, f64>,
    /// Relative jitter `τ` used to factor `T_ss`, per run.
    pub tau: Vec<f64>,
    /// Run 0's projection at the largest dimension.
    pub projection: Option<Projection>,
    /// Run 0's classifier at the largest dimension (SVM only).
    pub model: Option<LinearModel>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanMetrics {
    pub dim: usize,
    pub oa: f64,
    pub aa: f64,
    pub kappa: f64,
}

impl RunReport {
    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.rows.iter().map(|r| r.dim).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Arithmetic mean over runs at `dim`.
    pub fn mean(&self, dim: usize) -> Option<MeanMetrics> {
        let rows: Vec<&DimResult> = self.rows.iter().filter(|r| r.dim == dim).collect();
        if rows.is_empty() {
            return None;
        }
        let n = rows.len() as f64;
        let avg = |f: fn(&Metrics) -> f64| rows.iter().map(|r| f(&r.metrics)).sum::<f64>() / n;
        Some(MeanMetrics {
            dim,
            oa: avg(|m| m.oa),
            aa: avg(|m| m.aa),
            kappa: avg(|m| m.kappa),
        })
    }

    pub fn mean_oa(&self, dim: usize) -> Option<f64> {
        self.mean(dim).map(|m| m.oa)
    }

    /// Dimension with the highest mean OA (smallest such dimension on ties).
    pub fn best(&self) -> Option<MeanMetrics> {
        self.dims()
            .into_iter()
            .filter_map(|d| self.mean(d))
            .fold(None, |best: Option<MeanMetrics>, m| match best {
                Some(b) if b.oa >= m.oa => Some(b),
                _ => Some(m),
            })
    }

    /// Same metrics cell by cell; timing is ignored.
    pub fn same_results(&self, other: &RunReport) -> bool {
        self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.run == b.run && a.dim == b.dim && a.metrics == b.metrics)
    }
}

struct Timer(BTreeMap<&'static str, f64>);

impl Timer {
    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> T) -> (T, f64) {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        *self.0.entry(stage).or_insert(0.0) += secs;
        (out, secs)
    }
}

/// Spectral, regularized, spatial and fused matrices for one training set.
#[derive(Debug, Clone)]
pub struct PencilParts {
    pub s_b: ScatterMatrix,
    pub s_w: ScatterMatrix,
    pub rs_b: ScatterMatrix,
    pub rs_w: ScatterMatrix,
    pub s_b_spa: ScatterMatrix,
    pub s_w_spa: ScatterMatrix,
    pub fused: scatter::FusedPencil,
}

/// Builds the spatial-spectral pencil for `train`, drawing spatial patches
/// from `cube`. Spatial matrices are only computed when `beta < 1`.
pub fn build_pencil(train: &SampleSet, cube: &HyperCube, cfg: &ExperimentConfig) -> Result<PencilParts> {
    let cfg = cfg.normalized();
    let nbrs = graph::build_neighbors(train, cfg.k_w, cfg.k_b).stage("neighbors")?;
    let (s_b, s_w) = scatter::spectral_scatter(train, &nbrs).stage("spectral scatter")?;
    let (rs_b, rs_w) = scatter::regularize_spectral(&s_b, &s_w, train, cfg.reg.alpha).stage("regularize")?;
    let (s_b_spa, s_w_spa) = if cfg.reg.beta < 1.0 {
        scatter::spatial_scatter(train, cube, &nbrs, &cfg.patch, cfg.reg.gamma).stage("spatial scatter")?
    } else {
        (ScatterMatrix::zeros(train.dim()), ScatterMatrix::zeros(train.dim()))
    };
    let fused = scatter::fuse(&rs_b, &rs_w, &s_b_spa, &s_w_spa, cfg.reg.beta).stage("fuse")?;
    Ok(PencilParts {
        s_b,
        s_w,
        rs_b,
        rs_w,
        s_b_spa,
        s_w_spa,
        fused,
    })
}

/// Runs the full protocol. With `fixed_projection`, the eigensolve is skipped
/// and that basis is used for every run.
pub fn run_experiment_with(
    cube: &HyperCube,
    grid: &LabelGrid,
    cfg: &ExperimentConfig,
    fixed_projection: Option<&Projection>,
) -> Result<RunReport> {
    let cfg = cfg.normalized();
    grid.check_aligned(cube).stage("input")?;
    cfg.validate(cube.bands()).stage("config")?;
    if grid.classes() < 2 {
        return Err(Error::InvalidParameter("need at least 2 labeled classes".into()).in_stage("input"));
    }
    if let Some(p) = fixed_projection {
        if p.input_dim() != cube.bands() || p.output_dim() < cfg.max_dim() {
            return Err(Error::DimensionMismatch(format!(
                "loaded projection is {}x{}, need {} rows and >= {} columns",
                p.input_dim(),
                p.output_dim(),
                cube.bands(),
                cfg.max_dim()
            ))
            .in_stage("projection"));
        }
    }

    let mut timer = Timer(BTreeMap::new());
    // the filter depends only on the cube, so one pass serves every run
    let (filtered, filter_secs) = timer.time("filter", || {
        if cfg.use_filter {
            filter::filter_cube(cube, &cfg.filter).map(Some)
        } else {
            Ok(None)
        }
    });
    let filtered = filtered.stage("filter")?;
    let source = filtered.as_ref().unwrap_or(cube);
    let mut dims = cfg.dims.clone();
    dims.sort_unstable();
    dims.dedup();

    let mut report = RunReport {
        rows: Vec::new(),
        stage_seconds: BTreeMap::new(),
        tau: Vec::new(),
        projection: None,
        model: None,
    };

    for run in 0..cfg.split.runs {
        let run_seed = cfg.split.run_seed(run);
        let mut shared = if run == 0 { filter_secs } else { 0.0 };

        let (sets, secs) = timer.time("split", || -> Result<_> {
            let (train_pos, test_pos) = split_positions(grid, &cfg.split, run)?;
            let raw_train = SampleSet::from_positions(source, grid, &train_pos)?;
            let st = Standardizer::fit(raw_train.features())?;
            let std_cube = st.apply_cube(source)?;
            Ok((
                SampleSet::from_positions(&std_cube, grid, &train_pos)?,
                SampleSet::from_positions(&std_cube, grid, &test_pos)?,
                std_cube,
            ))
        });
        shared += secs;
        let (train, test, std_cube) = sets.stage("split")?;

        let projection = match fixed_projection {
            Some(p) => p.clone(),
            None => {
                let (parts, secs) = timer.time("scatter", || build_pencil(&train, &std_cube, &cfg));
                shared += secs;
                let parts = parts?;
                let (proj, secs) = timer.time("eigensolve", || {
                    eig::solve_pencil(
                        parts.fused.ss_b.values(),
                        parts.fused.t_ss.values(),
                        cfg.max_dim(),
                    )
                });
                shared += secs;
                proj.stage("eigensolve")?
            }
        };
        report.tau.push(projection.tau);

        for &d in &dims {
            let (cell, secs) = timer.time("classify", || -> Result<_> {
                let p = projection.truncate(d)?;
                let tr = eig::project(&train, &p)?;
                let te = eig::project(&test, &p)?;
                let (pred, model) = match cfg.classifier {
                    ClassifierKind::Svm => {
                        let model = classify::train_svm(&tr, &cfg.svm, run_seed)?;
                        (classify::predict(&model, &te)?, Some(model))
                    }
                    ClassifierKind::OneNn => (classify::predict_1nn(&tr, &te)?, None),
                };
                let cm = ConfusionMatrix::from_predictions(te.labels(), &pred, grid.classes())?;
                Ok((classify::metrics(&cm)?, model))
            });
            let (metrics, model) = cell.stage("classify")?;
            report.rows.push(DimResult {
                run,
                dim: d,
                metrics,
                seconds: shared + secs,
            });
            if run == 0 && Some(&d) == dims.last() {
                report.model = model;
            }
        }
        if run == 0 {
            report.projection = Some(projection);
        }
    }
    report.stage_seconds = timer.0;
    Ok(report)
}

pub fn run_experiment(cube: &HyperCube, grid: &LabelGrid, cfg: &ExperimentConfig) -> Result<RunReport> {
    run_experiment_with(cube, grid, cfg, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Dim,
    Window,
    Alpha,
    Beta,
    TrainSize,
}

impl FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "dim" => Ok(SweepAxis::Dim),
            "window" => Ok(SweepAxis::Window),
            "alpha" => Ok(SweepAxis::Alpha),
            "beta" => Ok(SweepAxis::Beta),
            "train_size" => Ok(SweepAxis::TrainSize),
            other => Err(format!(
                "unknown sweep axis '{other}' (dim, window, alpha, beta, train_size)"
            )),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Dim => "dim",
            SweepAxis::Window => "window",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Beta => "beta",
            SweepAxis::TrainSize => "train_size",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub value: String,
    pub config: ExperimentConfig,
    pub report: RunReport,
}

/// One report per swept value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub entries: Vec<SweepEntry>,
}

fn as_count(axis: SweepAxis, v: f64) -> Result<usize> {
    if v < 1.0 || v.fract() != 0.0 || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{axis} value {v} must be a positive integer")));
    }
    Ok(v as usize)
}

fn value_label(v: f64) -> String {
    format!("{v}")
}

/// Runs one experiment per value of `axis`, all with the same seeds.
///
/// The `dim` axis needs only one experiment: every dimension is a truncation
/// of the same projection.
pub fn sweep(
    cube: &HyperCube,
    grid: &LabelGrid,
    base: &ExperimentConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    let mut entries = Vec::new();
    if axis == SweepAxis::Dim {
        let mut cfg = base.clone();
        cfg.dims = values.iter().map(|&v| as_count(axis, v)).collect::<Result<_>>()?;
        let report = run_experiment(cube, grid, &cfg)?;
        for &d in &cfg.dims {
            let rows = report.rows.iter().filter(|r| r.dim == d).copied().collect();
            let mut config = cfg.clone();
            config.dims = vec![d];
            entries.push(SweepEntry {
                value: d.to_string(),
                config,
                report: RunReport { rows, ..report.clone() },
            });
        }
        return Ok(SweepTable { axis, entries });
    }

    for &v in values {
        let mut cfg = base.clone();
        match axis {
            SweepAxis::Window => {
                let w = as_count(axis, v)?;
                if w % 2 == 0 {
                    return Err(Error::InvalidParameter(format!("window {w} must be odd")));
                }
                cfg.patch.window = w;
            }
            SweepAxis::Alpha => cfg.reg.alpha = v,
            SweepAxis::Beta => cfg.reg.beta = v,
            SweepAxis::TrainSize => cfg.split.per_class_train = as_count(axis, v)?,
            SweepAxis::Dim => unreachable!(),
        }
        let report = run_experiment(cube, grid, &cfg)?;
        entries.push(SweepEntry {
            value: value_label(v),
            config: cfg,
            report,
        });
    }
    Ok(SweepTable { axis, entries })
}

pub const CSV_HEADER: &str = "axis,run,dim,oa,aa,kappa,seconds";

/// Writes `axis,run,dim,oa,aa,kappa,seconds` rows. `axis_label` fills the
/// first column; with `timing == false` the seconds column is written as 0.
pub fn write_report_rows(
    out: &mut dyn Write,
    axis_label: &str,
    report: &RunReport,
    timing: bool,
) -> std::io::Result<()> {
    for r in &report.rows {
        let secs = if timing { r.seconds } else { 0.0 };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            axis_label, r.run, r.dim, r.metrics.oa, r.metrics.aa, r.metrics.kappa, secs
        )?;
    }
    Ok(())
}

pub fn write_report_csv(out: &mut dyn Write, axis_label: &str, report: &RunReport, timing: bool) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    write_report_rows(out, axis_label, report, timing)
}

pub fn write_sweep_csv(out: &mut dyn Write, table: &SweepTable, timing: bool) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for e in &table.entries {
        write_report_rows(out, &format!("{}={}", table.axis, e.value), &e.report, timing)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::make_synthetic;

    fn small_cfg(method: Method) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::for_method(method, 8);
        cfg.dims = vec![2, 3];
        cfg.split.runs = 2;
        cfg.svm.epochs = 30;
        cfg
    }

    #[test]
    fn normalization_forces_method_parameters() {
        let cfg = small_cfg(Method::Lsc).normalized();
        assert_eq!((cfg.reg.alpha, cfg.reg.beta), (0.0, 1.0));
        assert_eq!(small_cfg(Method::Rlsc).normalized().reg.beta, 1.0);
        assert_eq!(small_cfg(Method::Nplsc).normalized().reg.beta, 0.0);
        assert_eq!(small_cfg(Method::Ssrlsc).normalized().reg.beta, 0.3);
    }

    #[test]
    fn truncation_matches_direct_solve() {
        let (cube, grid) = make_synthetic(3, 2, 6, 8, 4.0, 0.5, 1).unwrap();
        let cfg = small_cfg(Method::Ssrlsc);
        let (tr, _) = split_positions(&grid, &cfg.split, 0).unwrap();
        let train = SampleSet::from_positions(&cube, &grid, &tr).unwrap();
        let parts = build_pencil(&train, &cube, &cfg).unwrap();
        let (a, b) = (parts.fused.ss_b.values(), parts.fused.t_ss.values());
        let full = eig::solve_pencil(a, b, 6).unwrap();
        for d in 1..=6 {
            assert_eq!(full.truncate(d).unwrap(), eig::solve_pencil(a, b, d).unwrap());
        }
    }

    #[test]
    fn report_is_reproducible() {
        let (cube, grid) = make_synthetic(3, 2, 6, 8, 4.0, 0.5, 2).unwrap();
        let cfg = small_cfg(Method::Ssrlsc);
        let a = run_experiment(&cube, &grid, &cfg).unwrap();
        let b = run_experiment(&cube, &grid, &cfg).unwrap();
        assert!(a.same_results(&b));
        assert_eq!(a.rows.len(), 4);
        assert_eq!(a.projection, b.projection);
        assert_eq!(a.stage_seconds.keys().copied().collect::<Vec<_>>(), vec!["classify", "eigensolve", "filter", "scatter", "split"]);
        let m = a.mean(2).unwrap();
        let manual = a.rows.iter().filter(|r| r.dim == 2).map(|r| r.metrics.oa).sum::<f64>() / 2.0;
        assert_eq!(m.oa, manual);
    }

    #[test]
    fn errors_name_their_stage() {
        let (cube, grid) = make_synthetic(2, 1, 3, 4, 4.0, 0.5, 3).unwrap();
        let mut cfg = small_cfg(Method::Ssrlsc);
        cfg.split.per_class_train = 50;
        let err = run_experiment(&cube, &grid, &cfg).unwrap_err().to_string();
        assert!(err.starts_with("split:"), "{err}");
        cfg.split.per_class_train = 2;
        cfg.dims = vec![9];
        let err = run_experiment(&cube, &grid, &cfg).unwrap_err().to_string();
        assert!(err.starts_with("config:"), "{err}");
    }

    #[test]
    fn fixed_projection_skips_the_solve() {
        let (cube, grid) = make_synthetic(3, 2, 6, 8, 4.0, 0.5, 4).unwrap();
        let cfg = small_cfg(Method::Rlsc);
        let first = run_experiment(&cube, &grid, &cfg).unwrap();
        let p = first.projection.clone().unwrap();
        let again = run_experiment_with(&cube, &grid, &cfg, Some(&p)).unwrap();
        assert!(!again.stage_seconds.contains_key("eigensolve"));
        // run 0 uses the same basis either way
        assert_eq!(first.rows[0].metrics, again.rows[0].metrics);
    }

    #[test]
    fn csv_layout() {
        let (cube, grid) = make_synthetic(2, 2, 4, 6, 4.0, 0.3, 5).unwrap();
        let mut cfg = small_cfg(Method::Ssrlsc);
        cfg.dims = vec![1, 2];
        cfg.split.per_class_train = 5;
        let table = sweep(&cube, &grid, &cfg, SweepAxis::Window, &[1.0, 3.0]).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &table, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 2 * 2 * 2);
        assert!(lines[1].starts_with("window=1,0,1,"));
        assert!(lines[1].ends_with(",0"));
        assert!(sweep(&cube, &grid, &cfg, SweepAxis::Window, &[2.0]).is_err());
    }

    #[test]
    fn dim_sweep_is_one_experiment() {
        let (cube, grid) = make_synthetic(3, 2, 5, 8, 4.0, 0.5, 6).unwrap();
        let cfg = small_cfg(Method::Ssrlsc);
        let table = sweep(&cube, &grid, &cfg, SweepAxis::Dim, &[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(table.entries.len(), 3);
        for e in &table.entries {
            assert!(e.report.rows.iter().all(|r| r.dim.to_string() == e.value));
            assert_eq!(e.report.rows.len(), 2);
        }
    }
}
