use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use jc_core::analysis::{
    compare_generators, fit_rabi, linspace, predicted_rabi_frequency, rate_spread, timescale_check,
    ComparisonReport, DeltaNSurface, RateSource, TimescaleRecord,
};
use jc_core::bath::{BathModel, SpectralModel};
use jc_core::evolve::{evolve, observables, Observables, Trajectory};
use jc_core::generators::{kossakowski_report, scan_complete_positivity, CpScanPoint, GeneratorKind, KossakowskiReport, Liouvillian};
use jc_core::{build_dressed_basis, csv_float, DensityMatrix, SystemParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{kind_name, Scenario};
use crate::error::CliError;

pub const THREADS_ENV: &str = "JC_DISSIPATOR_THREADS";

#[derive(Clone, Debug, Default)]
pub struct Context {
    /// Overrides the scenario's output directory.
    pub out: Option<PathBuf>,
    pub verbose: bool,
}

impl Context {
    fn dir_for(&self, scenario: Option<&Scenario>) -> PathBuf {
        self.out
            .clone()
            .or_else(|| scenario.map(|s| s.output().dir))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn write_output(dir: &Path, name: &str, body: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::config(format!("output: cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| CliError::config(format!("output: cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct HealthExtrema {
    pub trace_deviation_max: f64,
    pub herm_defect_max: f64,
    pub min_eig_min: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationSummary {
    pub generator: GeneratorKind,
    pub params: SystemParams,
    pub t_end: f64,
    pub dt: f64,
    pub records: usize,
    #[serde(rename = "final")]
    pub final_observables: Observables,
    /// `<E0| rho(t_end) |E0>`
    pub ground_fidelity: f64,
    pub health: HealthExtrema,
    pub purity_min: f64,
    pub purity_max: f64,
    pub top_manifold_population_max: f64,
    pub timescale: TimescaleRecord,
    pub warnings: Vec<String>,
}

fn rate_source(l: &Liouvillian, scenario: &Scenario) -> Result<RateSource, CliError> {
    if l.kind.is_phenomenological() {
        let r = scenario.resolved();
        Ok(RateSource::Phenomenological {
            gamma: r.generator.gamma.unwrap_or(0.0),
            temperature: r.bath.map_or(0.0, |b| b.temperature),
        })
    } else {
        let bath = scenario.bath()?.ok_or_else(|| CliError::config("bath: section required"))?;
        Ok(RateSource::Bath { bath })
    }
}

/// Builds and runs a scenario without touching the file system.
pub fn run_simulation(scenario: &Scenario) -> Result<(Liouvillian, Trajectory, SimulationSummary), CliError> {
    let l = scenario.liouvillian()?;
    let basis = build_dressed_basis(l.params).map_err(|e| CliError::field("system", e))?;
    let rho0 = scenario.initial_state(&basis)?;
    let (t_end, cfg) = scenario.evolution()?;
    let traj = evolve(&l, &rho0, t_end, &cfg).map_err(|e| CliError::from_core("evolution", e))?;
    let last = traj.final_state().clone();
    let final_obs = DensityMatrix::new(last.clone())
        .map(|rho| observables(&rho, &basis))
        .unwrap_or_else(|_| jc_core::evolve::ObservableSet::new(&basis).evaluate(&last));
    let fold_max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let fold_min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let timescale = timescale_check(&l.params, &rate_source(&l, scenario)?)
        .map_err(|e| CliError::from_core("timescale", e))?;
    let summary = SimulationSummary {
        generator: l.kind,
        params: l.params,
        t_end,
        dt: traj.dt,
        records: traj.len(),
        ground_fidelity: last[(0, 0)].re,
        final_observables: final_obs,
        health: HealthExtrema {
            trace_deviation_max: traj.trace.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max),
            herm_defect_max: fold_max(&traj.herm_defect),
            min_eig_min: fold_min(&traj.min_eig),
        },
        purity_min: fold_min(&traj.purity),
        purity_max: fold_max(&traj.purity),
        top_manifold_population_max: fold_max(&traj.top_manifold_population),
        timescale,
        warnings: traj.warnings.clone(),
    };
    Ok((l, traj, summary))
}

pub struct SimulateOutput {
    pub trajectory_csv: PathBuf,
    pub summary_json: PathBuf,
    pub summary: SimulationSummary,
}

pub fn simulate(scenario: &Scenario, ctx: &Context) -> Result<SimulateOutput, CliError> {
    let (l, traj, summary) = run_simulation(scenario)?;
    ctx.log(format!(
        "{} generator, d = {}, {} records at dt = {:e}",
        kind_name(l.kind),
        l.dim(),
        traj.len(),
        traj.dt
    ));
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    let dir = ctx.dir_for(Some(scenario));
    let prefix = scenario.output().prefix;
    let mut csv = Vec::new();
    traj.write_csv(&mut csv).expect("in-memory write");
    let trajectory_csv = write_output(&dir, &format!("{prefix}trajectory.csv"), &csv)?;
    let summary_json = write_output(&dir, &format!("{prefix}summary.json"), to_json(&summary).as_bytes())?;
    Ok(SimulateOutput {
        trajectory_csv,
        summary_json,
        summary,
    })
}

pub fn compare(a: &Scenario, b: &Scenario, ctx: &Context) -> Result<ComparisonReport, CliError> {
    let la = a.liouvillian()?;
    let lb = b.liouvillian()?;
    let report = compare_generators(&la, &lb).map_err(|e| CliError::from_core("compare", e))?;
    if let Some(dir) = &ctx.out {
        write_output(dir, "comparison.json", to_json(&report).as_bytes())?;
    }
    Ok(report)
}

pub const SWEEP_METRICS: &[&str] = &[
    "nu_over_2omega",
    "predicted_nu_over_2omega",
    "nu_relative_error",
    "decay_rate",
    "final_sz",
    "final_n_phot",
    "final_ground_population",
    "purity_min",
    "min_eig_min",
    "trace_deviation_max",
    "rate_spread_down",
    "rate_spread_up",
    "rabi_ratio",
    "optical_ratio",
    "kossakowski_min_eigenvalue",
];

const EVOLVING_METRICS: &[&str] = &[
    "nu_over_2omega",
    "nu_relative_error",
    "decay_rate",
    "final_sz",
    "final_n_phot",
    "final_ground_population",
    "purity_min",
    "min_eig_min",
    "trace_deviation_max",
];

/// Sets the numeric field at dotted `path`. Integer fields accept only
/// integral values.
pub fn apply_axis(scenario: &Scenario, path: &str, x: f64) -> Result<Scenario, CliError> {
    if path == "gamma_over_4omega" {
        let mut s = scenario.clone();
        s.generator.gamma = Some(4.0 * s.system.coupling * x);
        return Ok(s);
    }
    let non_numeric = || CliError::config(format!("sweep.axis: `{path}` is not a numeric scenario field"));
    let mut root = toml::Value::try_from(scenario).expect("scenario serializes");
    let mut node = &mut root;
    for key in path.split('.') {
        node = node
            .as_table_mut()
            .and_then(|t| t.get_mut(key))
            .ok_or_else(non_numeric)?;
    }
    match node {
        toml::Value::Float(v) => *v = x,
        toml::Value::Integer(v) => {
            if x.fract() != 0.0 || x < 0.0 {
                return Err(CliError::config(format!(
                    "sweep.axis: `{path}` takes non-negative integers, got {x}"
                )));
            }
            *v = x as i64;
        }
        _ => return Err(non_numeric()),
    }
    root.try_into::<Scenario>()
        .map_err(|e| CliError::config(format!("sweep.axis: {e}")))
}

fn point_metrics(scenario: &Scenario, metrics: &[String]) -> Result<Vec<f64>, CliError> {
    let needs_run = metrics.iter().any(|m| EVOLVING_METRICS.contains(&m.as_str()));
    let run = if needs_run {
        Some(run_simulation(scenario)?)
    } else {
        None
    };
    let l = match &run {
        Some((l, _, _)) => l.clone(),
        None => scenario.liouvillian()?,
    };
    let bath = || -> Result<BathModel, CliError> {
        scenario
            .bath()?
            .ok_or_else(|| CliError::config("bath: required by rate_spread metrics"))
    };
    let rabi = |obs: &str| -> Result<jc_core::RabiFit, CliError> {
        let (_, traj, _) = run.as_ref().expect("evolved");
        fit_rabi(traj, obs).map_err(|e| CliError::from_core("fit", e))
    };
    let timescale = || -> Result<TimescaleRecord, CliError> {
        timescale_check(&l.params, &rate_source(&l, scenario)?).map_err(|e| CliError::from_core("timescale", e))
    };
    metrics
        .iter()
        .map(|m| {
            let summary = run.as_ref().map(|r| &r.2);
            let v = match m.as_str() {
                "nu_over_2omega" => rabi("sz")?.frequency_ratio,
                "predicted_nu_over_2omega" => l
                    .loss_rate()
                    .and_then(|g| predicted_rabi_frequency(l.params.coupling, g))
                    .map_or(f64::NAN, |w| w / (2.0 * l.params.coupling)),
                "nu_relative_error" => rabi("sz")?.relative_error.unwrap_or(f64::NAN),
                "decay_rate" => rabi("sz")?.decay_rate,
                "final_sz" => summary.unwrap().final_observables.sz,
                "final_n_phot" => summary.unwrap().final_observables.n_phot,
                "final_ground_population" => summary.unwrap().ground_fidelity,
                "purity_min" => summary.unwrap().purity_min,
                "min_eig_min" => summary.unwrap().health.min_eig_min,
                "trace_deviation_max" => summary.unwrap().health.trace_deviation_max,
                "rate_spread_down" | "rate_spread_up" => {
                    let r = rate_spread(&l.params, &bath()?).map_err(|e| CliError::from_core("bath", e))?;
                    if m == "rate_spread_down" {
                        r.down_spread
                    } else {
                        r.up_spread
                    }
                }
                "rabi_ratio" => timescale()?.rabi_ratio.unwrap_or(f64::INFINITY),
                "optical_ratio" => timescale()?.optical_ratio.unwrap_or(f64::INFINITY),
                "kossakowski_min_eigenvalue" => {
                    kossakowski_report(&l)
                        .map_err(|e| CliError::from_core("generator", e))?
                        .min_eigenvalue
                }
                other => return Err(CliError::config(format!("sweep.metrics: unknown metric `{other}`"))),
            };
            Ok(v)
        })
        .collect()
}

/// Thread cap from the environment; `None` leaves the pool at its default.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(CliError::config(format!("{THREADS_ENV}: expected a positive integer, got `{s}`"))),
            Ok(n) => Ok(Some(n)),
        },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub metric: String,
    pub value: f64,
}

pub fn run_sweep(scenario: &Scenario) -> Result<Vec<SweepRow>, CliError> {
    let sweep = scenario
        .sweep
        .clone()
        .ok_or_else(|| CliError::config("sweep: section required"))?;
    if let Some(bad) = sweep.metrics.iter().find(|m| !SWEEP_METRICS.contains(&m.as_str())) {
        return Err(CliError::config(format!(
            "sweep.metrics: unknown metric `{bad}` (known: {})",
            SWEEP_METRICS.join(", ")
        )));
    }
    let values = sweep.axis_values()?;
    // reject a bad axis before any work, even when the value list is empty
    apply_axis(scenario, &sweep.axis, 0.5)?;
    let points = values
        .iter()
        .map(|&x| apply_axis(scenario, &sweep.axis, x))
        .collect::<Result<Vec<_>, _>>()?;
    let work = || {
        points
            .par_iter()
            .map(|s| point_metrics(s, &sweep.metrics))
            .collect::<Vec<_>>()
    };
    let results = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::runtime(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut rows = Vec::new();
    for (x, r) in values.iter().zip(results) {
        for (m, v) in sweep.metrics.iter().zip(r?) {
            rows.push(SweepRow {
                axis_value: *x,
                metric: m.clone(),
                value: v,
            });
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("axis_value,metric,value\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", csv_float(r.axis_value), r.metric, csv_float(r.value)));
    }
    out
}

pub fn sweep(scenario: &Scenario, ctx: &Context) -> Result<PathBuf, CliError> {
    let rows = run_sweep(scenario)?;
    ctx.log(format!("{} sweep rows", rows.len()));
    let dir = ctx.dir_for(Some(scenario));
    write_output(&dir, &format!("{}sweep.csv", scenario.output().prefix), sweep_csv(&rows).as_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub omega: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub dw_min: f64,
    pub dw_max: f64,
    pub dw_count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        let (t_min, t_max) = DeltaNSurface::DEFAULT_T_RANGE;
        let (dw_min, dw_max) = DeltaNSurface::DEFAULT_DELTA_RANGE;
        Self {
            omega: 1.0,
            t_min,
            t_max,
            t_count: 50,
            dw_min,
            dw_max,
            dw_count: 51,
        }
    }
}

pub fn fig1_surface(grid: &GridSpec) -> Result<DeltaNSurface, CliError> {
    if grid.t_count == 0 || grid.dw_count == 0 {
        return Err(CliError::config("fig1: grid counts must be positive"));
    }
    if !(grid.t_min <= grid.t_max && grid.dw_min <= grid.dw_max) {
        return Err(CliError::config("fig1: grid minimum exceeds maximum"));
    }
    jc_core::analysis::delta_n_surface(
        grid.omega,
        &linspace(grid.t_min, grid.t_max, grid.t_count),
        &linspace(grid.dw_min, grid.dw_max, grid.dw_count),
    )
    .map_err(|e| CliError::from_core("fig1", e))
}

pub fn fig1(grid: &GridSpec, ctx: &Context) -> Result<PathBuf, CliError> {
    let surface = fig1_surface(grid)?;
    let mut buf = Vec::new();
    surface.write_csv(&mut buf).expect("in-memory write");
    write_output(&ctx.dir_for(None), "fig1.csv", &buf)
}

#[derive(Clone, Debug, Serialize)]
pub struct CpSearch {
    pub params: SystemParams,
    pub points: Vec<CpScanPoint>,
    pub most_negative: CpScanPoint,
}

#[derive(Clone, Debug, Serialize)]
pub struct LindbladCheck {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<KossakowskiReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<CpSearch>,
}

/// Temperatures and cutoffs, in units of `omega0`, scanned for negative
/// Kossakowski eigenvalues of the quasi-RWA generator with an Ohmic bath.
pub const SEARCH_TEMPERATURES: [f64; 5] = [0.05, 0.1, 0.2, 0.5, 1.0];
pub const SEARCH_CUTOFFS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

pub fn cp_search(params: SystemParams, eta: f64) -> Result<CpSearch, CliError> {
    let w = params.omega0;
    let mut baths = Vec::new();
    for t in SEARCH_TEMPERATURES {
        for c in SEARCH_CUTOFFS {
            baths.push(
                BathModel::new(SpectralModel::Ohmic { eta, omega_c: c * w }, t * w)
                    .map_err(|e| CliError::from_core("search", e))?,
            );
        }
    }
    let points = scan_complete_positivity(params, &baths).map_err(|e| CliError::from_core("search", e))?;
    let most_negative = points
        .iter()
        .min_by(|a, b| a.min_eigenvalue.total_cmp(&b.min_eigenvalue))
        .cloned()
        .expect("grid is not empty");
    Ok(CpSearch {
        params,
        points,
        most_negative,
    })
}

pub fn lindblad_check(scenario: Option<&Scenario>, search: bool, ctx: &Context) -> Result<LindbladCheck, CliError> {
    if scenario.is_none() && !search {
        return Err(CliError::config("lindblad-check: give --config, --search, or both"));
    }
    let report = scenario
        .map(|s| {
            let l = s.liouvillian()?;
            kossakowski_report(&l).map_err(|e| CliError::from_core("generator", e))
        })
        .transpose()?;
    let search = if search {
        let params = match scenario {
            Some(s) => s.params()?,
            None => SystemParams::new(1.0, 0.05, 2).expect("valid defaults"),
        };
        let eta = match scenario.map(|s| s.bath()).transpose()?.flatten() {
            Some(BathModel {
                spectral: SpectralModel::Ohmic { eta, .. },
                ..
            }) => eta,
            _ => 0.01,
        };
        Some(cp_search(params, eta)?)
    } else {
        None
    };
    let out = LindbladCheck { report, search };
    if let Some(dir) = &ctx.out {
        write_output(dir, "lindblad.json", to_json(&out).as_bytes())?;
    }
    Ok(out)
}

pub fn print_json<T: Serialize>(value: &T) {
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(to_json(value).as_bytes());
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(extra: &str) -> Scenario {
        Scenario::from_toml(&format!(
            "[system]\nomega0 = 1.0\ncoupling = 0.1\nn_max = 2\n\
             [bath]\ntemperature = 0.0\nspectrum = {{ kind = \"flat\", j0 = 0.003, cutoff = 10.0 }}\n\
             [generator]\nkind = \"phenom_bare\"\ngamma = 0.04\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn axis_paths() {
        let s = scenario("");
        assert_eq!(apply_axis(&s, "bath.temperature", 0.3).unwrap().bath.unwrap().temperature, 0.3);
        assert_eq!(apply_axis(&s, "system.n_max", 3.0).unwrap().system.n_max, 3);
        assert!(apply_axis(&s, "system.n_max", 2.5).is_err());
        assert_eq!(apply_axis(&s, "generator.kind", 1.0).unwrap_err().exit_code(), 2);
        assert!(apply_axis(&s, "system.nothing", 1.0).is_err());
        let g = apply_axis(&s, "gamma_over_4omega", 0.25).unwrap().generator.gamma.unwrap();
        assert!((g - 0.1).abs() < 1e-15);
    }

    #[test]
    fn empty_axis_gives_header_only() {
        let s = scenario("[sweep]\naxis = \"bath.temperature\"\nvalues = []\nmetrics = [\"rate_spread_down\"]\n");
        let rows = run_sweep(&s).unwrap();
        assert!(rows.is_empty());
        assert_eq!(sweep_csv(&rows), "axis_value,metric,value\n");
    }

    #[test]
    fn unknown_metric_rejected() {
        let s = scenario("[sweep]\naxis = \"bath.temperature\"\nvalues = [0.1]\nmetrics = [\"bogus\"]\n");
        assert_eq!(run_sweep(&s).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn thermal_rate_spread_grows() {
        let s = scenario(
            "[sweep]\naxis = \"bath.temperature\"\nvalues = [0.05, 0.1, 0.2, 0.4]\nmetrics = [\"rate_spread_down\"]\n",
        );
        let rows = run_sweep(&s).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.windows(2).all(|w| w[1].value > w[0].value));
    }

    #[test]
    fn search_finds_negative_eigenvalue() {
        let out = lindblad_check(None, true, &Context::default()).unwrap();
        let s = out.search.unwrap();
        assert_eq!(s.points.len(), 25);
        assert!(s.most_negative.min_eigenvalue < 0.0);
        assert!(s.most_negative.bath.temperature > 0.0);
    }

    #[test]
    fn fig1_grid_validation() {
        let mut g = GridSpec::default();
        assert!(fig1_surface(&g).is_ok());
        g.t_count = 0;
        assert!(fig1_surface(&g).is_err());
        g = GridSpec {
            dw_max: 2.0,
            ..GridSpec::default()
        };
        assert_eq!(fig1_surface(&g).unwrap_err().exit_code(), 2);
    }
}
