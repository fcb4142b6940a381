//! Ensemble experiments: success-probability curves per method, XM plateaus,
//! critical crossover depths and the flat/plot-data exports built on them.
//!
//! Each `(n, D)` cell runs every instance independently. Instances are
//! mapped in parallel and collected in index order, so results do not depend
//! on the thread count.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{preoptimize_gm_angles, DampingMode};
use crate::error::{Error, Result};
use crate::evt::{constant_angles, emin_estimate_quantile};
use crate::hubo::{enumerate_spectrum, generate, Problem, MAX_QUBITS};
use crate::rng::instance_seed;
use crate::search::OptBudget;
use crate::simulator::{prefix_success_curve, Mixer, ParamSchedule};
use crate::variational::optimize_layerwise;

/// Angle-selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Transverse-field mixer, layer-wise optimized.
    #[serde(rename = "XM")]
    Xm,
    /// Grover mixer, layer-wise optimized.
    #[serde(rename = "GM")]
    Gm,
    /// Grover mixer with analytically pre-optimized angles.
    #[serde(rename = "GMa")]
    Gma,
    /// Grover mixer with constant angles from the EVT estimate.
    #[serde(rename = "GMc")]
    Gmc,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Xm, Method::Gm, Method::Gma, Method::Gmc];

    pub fn name(self) -> &'static str {
        match self {
            Method::Xm => "XM",
            Method::Gm => "GM",
            Method::Gma => "GMa",
            Method::Gmc => "GMc",
        }
    }

    pub fn mixer(self) -> Mixer {
        match self {
            Method::Xm => Mixer::Transverse,
            _ => Mixer::Grover,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xm" => Ok(Method::Xm),
            "gm" => Ok(Method::Gm),
            "gma" => Ok(Method::Gma),
            "gmc" => Ok(Method::Gmc),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

/// Optimizer budgets for the methods that search angles.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodBudgets {
    #[serde(rename = "XM")]
    pub xm: OptBudget,
    #[serde(rename = "GM")]
    pub gm: OptBudget,
    #[serde(rename = "GMa")]
    pub gma: OptBudget,
}

impl MethodBudgets {
    pub fn for_method(&self, method: Method) -> &OptBudget {
        match method {
            Method::Xm => &self.xm,
            Method::Gma => &self.gma,
            _ => &self.gm,
        }
    }
}

fn default_instances() -> usize {
    100
}

fn default_max_depth() -> usize {
    64
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_sign() -> f64 {
    1.0
}

/// Sweep definition, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub n_list: Vec<usize>,
    pub d_list: Vec<usize>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budgets: MethodBudgets,
    #[serde(default)]
    pub analytic_mode: DampingMode,
    /// Coefficient of every max-cut hyperedge, `+1` or `-1`.
    #[serde(default = "default_sign")]
    pub maxcut_sign: f64,
}

impl ExperimentConfig {
    pub fn new(problem: Problem, n_list: Vec<usize>, d_list: Vec<usize>) -> Self {
        Self {
            problem,
            n_list,
            d_list,
            instances: default_instances(),
            max_depth: default_max_depth(),
            methods: default_methods(),
            seed: 0,
            budgets: MethodBudgets::default(),
            analytic_mode: DampingMode::default(),
            maxcut_sign: default_sign(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.instances == 0 {
            return bad("instances must be at least 1".into());
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1".into());
        }
        if self.n_list.is_empty() || self.d_list.is_empty() {
            return bad("n_list and d_list must be non-empty".into());
        }
        if self.methods.is_empty() {
            return bad("methods must be non-empty".into());
        }
        if self.methods.iter().collect::<BTreeSet<_>>().len() != self.methods.len() {
            return bad("methods contains duplicates".into());
        }
        for &n in &self.n_list {
            if n < 2 {
                return bad(format!("n_list entry {n} is below 2"));
            }
            if n > MAX_QUBITS {
                return bad(format!("n_list entry {n} exceeds capacity {MAX_QUBITS}"));
            }
        }
        for &d in &self.d_list {
            if d < 2 {
                return bad(format!("d_list entry {d} is below 2"));
            }
            if let Some(&n) = self.n_list.iter().find(|&&n| d > n) {
                return bad(format!("interaction order {d} exceeds n = {n}"));
            }
        }
        if self.maxcut_sign != 1.0 && self.maxcut_sign != -1.0 {
            return bad(format!("maxcut_sign must be 1 or -1, got {}", self.maxcut_sign));
        }
        Ok(())
    }

    pub fn has(&self, method: Method) -> bool {
        self.methods.contains(&method)
    }
}

/// Per-instance data shared by all methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub index: usize,
    pub seed: u64,
    pub e_min: f64,
    pub sigma2: f64,
    pub e_min_est: Option<f64>,
    pub ground_states: usize,
}

/// Curves of one method over a cell's instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodCurves {
    pub method: Method,
    /// Mean over instances of `P(k)`, `k = 1..=max_depth`.
    pub mean: Vec<f64>,
    /// Sample standard deviation over instances.
    pub std: Vec<f64>,
    /// `per_instance[i][k-1]`.
    pub per_instance: Vec<Vec<f64>>,
    pub schedules: Vec<ParamSchedule>,
}

impl MethodCurves {
    fn from_runs(method: Method, runs: Vec<(ParamSchedule, Vec<f64>)>) -> Self {
        let (schedules, per_instance): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
        let (mean, std) = column_stats(&per_instance);
        Self { method, mean, std, per_instance, schedules }
    }

    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("non-empty curve")
    }

    pub fn final_std(&self) -> f64 {
        *self.std.last().expect("non-empty curve")
    }
}

/// Per-instance crossover of one Grover method above the XM plateau.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalRecord {
    pub method: Method,
    pub plateau: Vec<f64>,
    /// 1-based critical depth per instance.
    pub depth: Vec<Option<usize>>,
    /// `P` of the method at its own critical depth.
    pub p_at_critical: Vec<Option<f64>>,
}

/// All results for one `(n, D)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub problem: Problem,
    pub n: usize,
    pub d: usize,
    pub instances: Vec<InstanceInfo>,
    pub curves: Vec<MethodCurves>,
    pub critical: Vec<CriticalRecord>,
}

impl CurveSet {
    pub fn method(&self, method: Method) -> Option<&MethodCurves> {
        self.curves.iter().find(|c| c.method == method)
    }

    pub fn critical_for(&self, method: Method) -> Option<&CriticalRecord> {
        self.critical.iter().find(|c| c.method == method)
    }

    fn require(&self, method: Method) -> Result<&MethodCurves> {
        self.method(method).ok_or_else(|| {
            Error::Missing(format!(
                "cell {} n={} D={} has no {} curves",
                self.problem, self.n, self.d, method
            ))
        })
    }
}

/// Mean and sample standard deviation (`ddof = 1`, zero for one value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (m - 1) as f64).sqrt())
}

fn column_stats(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let len = rows.first().map_or(0, Vec::len);
    (0..len)
        .map(|k| mean_std(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .unzip()
}

/// Plateau level of one instance's XM curve: its maximum.
pub fn xm_plateau(curve: &[f64]) -> f64 {
    curve.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest 1-based depth with `gm_curve[k] > plateau`.
pub fn critical_depth(gm_curve: &[f64], plateau: f64) -> Option<usize> {
    gm_curve.iter().position(|&p| p > plateau).map(|i| i + 1)
}

fn critical_record(method: Method, xm: &MethodCurves, gm: &MethodCurves) -> CriticalRecord {
    let plateau: Vec<f64> = xm.per_instance.iter().map(|c| xm_plateau(c)).collect();
    let depth: Vec<Option<usize>> = gm
        .per_instance
        .iter()
        .zip(&plateau)
        .map(|(c, &p)| critical_depth(c, p))
        .collect();
    let p_at_critical = gm
        .per_instance
        .iter()
        .zip(&depth)
        .map(|(c, d)| d.map(|k| c[k - 1]))
        .collect();
    CriticalRecord { method, plateau, depth, p_at_critical }
}

/// Censored summary of per-instance critical depths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalStats {
    pub mean_depth: f64,
    pub std_depth: f64,
    pub mean_p: f64,
    pub std_p: f64,
    /// Instances that never crossed the plateau; excluded from the means.
    pub absent: usize,
    pub total: usize,
}

pub fn summarize_critical(depth: &[Option<usize>], p_at_critical: &[Option<f64>]) -> CriticalStats {
    let depths: Vec<f64> = depth.iter().flatten().map(|&d| d as f64).collect();
    let ps: Vec<f64> = p_at_critical.iter().flatten().copied().collect();
    let (mean_depth, std_depth) = mean_std(&depths);
    let (mean_p, std_p) = mean_std(&ps);
    CriticalStats {
        mean_depth,
        std_depth,
        mean_p,
        std_p,
        absent: depth.len() - depths.len(),
        total: depth.len(),
    }
}

/// One row of a critical-depth table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalRow {
    pub n: usize,
    pub d: usize,
    #[serde(flatten)]
    pub stats: CriticalStats,
}

/// Critical-depth table over the given cells for `method` (GM, GMa or GMc),
/// sorted by `(D, n)`.
pub fn aggregate_critical(cells: &[CurveSet], method: Method) -> Result<Vec<CriticalRow>> {
    let mut rows = Vec::with_capacity(cells.len());
    for cell in cells {
        let record = match cell.critical_for(method) {
            Some(r) => r.clone(),
            None => critical_record(method, cell.require(Method::Xm)?, cell.require(method)?),
        };
        rows.push(CriticalRow {
            n: cell.n,
            d: cell.d,
            stats: summarize_critical(&record.depth, &record.p_at_critical),
        });
    }
    rows.sort_by_key(|r| (r.d, r.n));
    Ok(rows)
}

struct InstanceRun {
    info: InstanceInfo,
    runs: Vec<(ParamSchedule, Vec<f64>)>,
}

fn run_instance(config: &ExperimentConfig, n: usize, d: usize, index: usize) -> Result<InstanceRun> {
    let wrap = |method: &'static str| {
        move |e: Error| Error::Cell {
            problem: config.problem.name(),
            n,
            d,
            instance: index,
            method,
            source: Box::new(e),
        }
    };
    let seed = instance_seed(config.seed, index as u64);
    let instance = generate(config.problem, n, d, seed, config.maxcut_sign).map_err(wrap("-"))?;
    let spectrum = enumerate_spectrum(&instance, None).map_err(wrap("-"))?;
    let sigma2 = instance.sigma_squared();
    let e_min_est = if sigma2 > 0.0 { emin_estimate_quantile(sigma2.sqrt(), n).ok() } else { None };

    let mut runs = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let budget = config.budgets.for_method(method);
        let run = match method {
            Method::Xm | Method::Gm => {
                optimize_layerwise(&spectrum, method.mixer(), config.max_depth, budget)
                    .map(|t| (t.schedule, t.p_success))
            }
            Method::Gma => preoptimize_gm_angles(n, sigma2, config.max_depth, budget, config.analytic_mode)
                .and_then(|a| {
                    let curve = prefix_success_curve(&spectrum, &a.schedule, Mixer::Grover)?;
                    Ok((a.schedule, curve))
                }),
            Method::Gmc => e_min_est
                .ok_or(Error::DegenerateEstimate(0.0))
                .and_then(|e| constant_angles(e, config.max_depth))
                .and_then(|s| {
                    let curve = prefix_success_curve(&spectrum, &s, Mixer::Grover)?;
                    Ok((s, curve))
                }),
        };
        runs.push(run.map_err(wrap(method.name()))?);
    }
    Ok(InstanceRun {
        info: InstanceInfo {
            index,
            seed,
            e_min: spectrum.e_min(),
            sigma2,
            e_min_est,
            ground_states: spectrum.ground_states().len(),
        },
        runs,
    })
}

/// Run every instance of one `(n, D)` cell with every configured method.
pub fn run_cell(config: &ExperimentConfig, n: usize, d: usize) -> Result<CurveSet> {
    config.validate()?;
    if !config.n_list.contains(&n) || !config.d_list.contains(&d) {
        return Err(Error::Config(format!("cell n={n} D={d} is not in the configured grid")));
    }
    let results: Vec<InstanceRun> = (0..config.instances)
        .into_par_iter()
        .map(|i| run_instance(config, n, d, i))
        .collect::<Result<_>>()?;

    let mut instances = Vec::with_capacity(results.len());
    let mut per_method: Vec<Vec<(ParamSchedule, Vec<f64>)>> = vec![Vec::new(); config.methods.len()];
    for r in results {
        instances.push(r.info);
        for (slot, run) in per_method.iter_mut().zip(r.runs) {
            slot.push(run);
        }
    }
    let curves: Vec<MethodCurves> = config
        .methods
        .iter()
        .zip(per_method)
        .map(|(&m, runs)| MethodCurves::from_runs(m, runs))
        .collect();

    let mut critical = Vec::new();
    if let Some(xm) = curves.iter().find(|c| c.method == Method::Xm) {
        for gm in curves.iter().filter(|c| c.method != Method::Xm) {
            critical.push(critical_record(gm.method, xm, gm));
        }
    }
    Ok(CurveSet { problem: config.problem, n, d, instances, curves, critical })
}

/// Output of a full sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResults {
    /// The configuration file exactly as read.
    pub config_source: String,
    pub config: ExperimentConfig,
    /// Cells ordered by `D`, then `n`, following the config lists.
    pub cells: Vec<CurveSet>,
}

pub const RESULTS_FILE: &str = "results.json";
pub const POINTS_FILE: &str = "points.csv";
pub const CURVES_FILE: &str = "curves.csv";

impl SweepResults {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialize")
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(dir.as_ref().join(RESULTS_FILE))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn cell(&self, n: usize, d: usize) -> Option<&CurveSet> {
        self.cells.iter().find(|c| c.n == n && c.d == d)
    }

    /// Flat export, one row per `(cell, instance, method, depth)`.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("problem,D,n,instance,method,depth,p_success\n");
        for cell in &self.cells {
            for curves in &cell.curves {
                for (i, row) in curves.per_instance.iter().enumerate() {
                    for (k, p) in row.iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{},{}",
                            cell.problem,
                            cell.d,
                            cell.n,
                            cell.instances[i].index,
                            curves.method,
                            k + 1,
                            p
                        );
                    }
                }
            }
        }
        out
    }

    /// Mean and standard deviation per `(cell, method, depth)`.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("problem,D,n,method,depth,mean,std\n");
        for cell in &self.cells {
            for curves in &cell.curves {
                for (k, (m, s)) in curves.mean.iter().zip(&curves.std).enumerate() {
                    let _ = writeln!(out, "{},{},{},{},{},{},{}", cell.problem, cell.d, cell.n, curves.method, k + 1, m, s);
                }
            }
        }
        out
    }

    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join(RESULTS_FILE), self.to_json())?;
        fs::write(dir.join(POINTS_FILE), self.points_csv())?;
        fs::write(dir.join(CURVES_FILE), self.curves_csv())?;
        Ok(())
    }
}

/// Run all cells of a configuration given as JSON text.
pub fn run_sweep(config_source: &str) -> Result<SweepResults> {
    run_sweep_with(ExperimentConfig::from_json(config_source)?, config_source)
}

/// Run `config`, recording `config_source` as the file it came from. Used
/// when flags override fields of the file.
pub fn run_sweep_with(config: ExperimentConfig, config_source: &str) -> Result<SweepResults> {
    config.validate()?;
    let mut cells = Vec::new();
    for &d in &config.d_list {
        for &n in &config.n_list {
            cells.push(run_cell(&config, n, d)?);
        }
    }
    Ok(SweepResults { config_source: config_source.to_owned(), config, cells })
}

/// Figures with plot-data exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// `P` vs depth for every method.
    Fig2,
    /// GM critical depth vs `n`.
    Fig3,
    /// Mean analytic angles vs layer.
    Fig4,
    /// GM, GMa and GMc compared per depth.
    Fig5,
    /// GMa critical depth vs `n`.
    Fig6,
}

impl Figure {
    pub const ALL: [Figure; 5] = [Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig6];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
        }
    }
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown figure {s:?}, expected fig2..fig6")))
    }
}

/// Plot data for one figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub figure: Figure,
    pub csv: String,
    pub svg: String,
}

fn require_method(results: &SweepResults, method: Method) -> Result<()> {
    if results.cells.iter().all(|c| c.method(method).is_some()) && !results.cells.is_empty() {
        Ok(())
    } else {
        Err(Error::Missing(format!("sweep has no {method} curves")))
    }
}

pub fn report(results: &SweepResults, figure: Figure) -> Result<FigureData> {
    match figure {
        Figure::Fig2 => curve_figure(results, figure, &[Method::Xm, Method::Gm, Method::Gma, Method::Gmc], &[]),
        Figure::Fig5 => curve_figure(results, figure, &[Method::Gm, Method::Gma, Method::Gmc], &[Method::Gma, Method::Gmc]),
        Figure::Fig3 => critical_figure(results, figure, Method::Gm),
        Figure::Fig6 => critical_figure(results, figure, Method::Gma),
        Figure::Fig4 => angle_figure(results),
    }
}

fn curve_figure(results: &SweepResults, figure: Figure, methods: &[Method], required: &[Method]) -> Result<FigureData> {
    for &m in required {
        require_method(results, m)?;
    }
    if results.cells.is_empty() {
        return Err(Error::Missing("sweep has no cells".into()));
    }
    let mut csv = String::from("problem,D,n,method,depth,mean,std\n");
    let mut series = Vec::new();
    for cell in &results.cells {
        for curves in cell.curves.iter().filter(|c| methods.contains(&c.method)) {
            let mut pts = Vec::with_capacity(curves.mean.len());
            for (k, (m, s)) in curves.mean.iter().zip(&curves.std).enumerate() {
                let _ = writeln!(csv, "{},{},{},{},{},{},{}", cell.problem, cell.d, cell.n, curves.method, k + 1, m, s);
                pts.push(((k + 1) as f64, *m));
            }
            series.push((format!("{} n={} D={}", curves.method, cell.n, cell.d), pts));
        }
    }
    let svg = svg_chart(figure.name(), "depth", "mean P(E_min)", &series);
    Ok(FigureData { figure, csv, svg })
}

fn critical_figure(results: &SweepResults, figure: Figure, method: Method) -> Result<FigureData> {
    require_method(results, Method::Xm)?;
    require_method(results, method)?;
    let rows = aggregate_critical(&results.cells, method)?;
    let mut csv = String::from("problem,method,D,n,mean_depth,std_depth,mean_p,std_p,absent,total\n");
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in &rows {
        let s = r.stats;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            results.config.problem, method, r.d, r.n, s.mean_depth, s.std_depth, s.mean_p, s.std_p, s.absent, s.total
        );
        let label = format!("{method} D={}", r.d);
        match series.iter_mut().find(|(l, _)| *l == label) {
            Some((_, pts)) => pts.push((r.n as f64, s.mean_depth)),
            None => series.push((label, vec![(r.n as f64, s.mean_depth)])),
        }
    }
    let svg = svg_chart(figure.name(), "n", "mean critical depth", &series);
    Ok(FigureData { figure, csv, svg })
}

fn angle_figure(results: &SweepResults) -> Result<FigureData> {
    require_method(results, Method::Gma)?;
    let mut csv = String::from("problem,D,n,layer,beta_mean,beta_std,gamma_mean,gamma_std\n");
    let mut series = Vec::new();
    for cell in &results.cells {
        let curves = cell.require(Method::Gma)?;
        let betas: Vec<Vec<f64>> = curves.schedules.iter().map(|s| s.betas().to_vec()).collect();
        let gammas: Vec<Vec<f64>> = curves.schedules.iter().map(|s| s.gammas().to_vec()).collect();
        let (bm, bs) = column_stats(&betas);
        let (gm, gs) = column_stats(&gammas);
        let mut pts = Vec::with_capacity(bm.len());
        for k in 0..bm.len() {
            let _ = writeln!(csv, "{},{},{},{},{},{},{},{}", cell.problem, cell.d, cell.n, k + 1, bm[k], bs[k], gm[k], gs[k]);
            pts.push(((k + 1) as f64, bm[k]));
        }
        series.push((format!("beta n={} D={}", cell.n, cell.d), pts));
    }
    let svg = svg_chart("fig4", "layer", "mean beta", &series);
    Ok(FigureData { figure: Figure::Fig4, csv, svg })
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Minimal line chart.
fn svg_chart(title: &str, xlabel: &str, ylabel: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h, margin) = (640.0, 420.0, 56.0);
    let finite = series.iter().flat_map(|(_, p)| p).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, w / 2.0);
    let _ = writeln!(
        svg,
        r#"<path d="M{m} {t} L{m} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        m = margin,
        t = margin,
        b = h - margin,
        r = w - margin
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, w / 2.0, h - 16.0);
    let _ = writeln!(svg, r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">{ylabel}</text>"#, h / 2.0, h / 2.0);
    for (v, anchor) in [(y0, "end"), (y1, "end")] {
        let _ = writeln!(svg, r#"<text x="{}" y="{:.1}" text-anchor="{anchor}">{v:.3}</text>"#, margin - 4.0, sy(v) + 4.0);
    }
    for v in [x0, x1] {
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{}" text-anchor="middle">{v}</text>"#, sx(v), h - margin + 14.0);
    }
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let d: Vec<String> = pts
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(svg, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#, d.join(" "));
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{color}">{label}</text>"#,
            w - margin - 150.0,
            margin + 14.0 * i as f64
        );
    }
    svg.push_str("</svg>\n");
    svg
}
