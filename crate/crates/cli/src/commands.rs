use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use spinphase_core::io::StateRecord;
use spinphase_core::metrics::{basis_coefficients, default_phase_points, phase_distribution, report};
use spinphase_core::states::{make_state, TwistEvolution};
use spinphase_core::twist::{fit_table, minimize_with, sweep_range, ScalingFit};
use spinphase_core::wigner::WignerFunction;
use spinphase_core::{Axis, Error, Metric, SpinQuantum, SpinState, StateKind};

use crate::output::{emit, num, opt_num};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpin(_)
            | Error::InvalidParameter(_)
            | Error::OddParticleNumber(_)
            | Error::GridTooCoarse { .. }
            | Error::InsufficientData(_)
            | Error::DimensionMismatch { .. }
            | Error::Format(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MetricChoice {
    Xi,
    Zeta,
    Both,
}

impl MetricChoice {
    fn xi(self) -> bool {
        self != MetricChoice::Zeta
    }

    fn zeta(self) -> bool {
        self != MetricChoice::Xi
    }
}

pub fn parse_kinds(list: &str) -> CliResult<Vec<StateKind>> {
    let kinds: Vec<StateKind> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<StateKind>())
        .collect::<Result<_, _>>()?;
    if kinds.is_empty() {
        return Err(CliError::Config("no states given".into()));
    }
    Ok(kinds)
}

fn spin(n: u32) -> CliResult<SpinQuantum> {
    Ok(SpinQuantum::from_particles(n)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

#[derive(Serialize)]
struct MetricsRow {
    state: String,
    n: u32,
    xi_sq: Option<f64>,
    xi_sq_min: Option<f64>,
    zeta_sq: f64,
    zeta_sq_rc: f64,
    sharpness: f64,
    sharpness_modulus: f64,
    variance_approx: f64,
    holevo_variance: f64,
}

pub const METRICS_HEADER: &str =
    "state,n,xi_sq,xi_sq_min,zeta_sq,zeta_sq_rc,sharpness,sharpness_modulus,variance_approx,holevo_variance";

/// One row per (state, N). Yurke rows at odd N are skipped, as are 2ACT
/// optimum rows at N where no optimum exists.
pub fn cmd_metrics(kinds: &[StateKind], ns: &[u32], format: Format, out: Option<&Path>) -> CliResult<()> {
    let jobs: Vec<(StateKind, u32)> = kinds
        .iter()
        .flat_map(|&k| ns.iter().map(move |&n| (k, n)))
        .filter(|(k, n)| !(k.requires_even_n() && n % 2 == 1))
        .collect();
    if jobs.is_empty() {
        return Err(CliError::Config("no valid (state, N) combination: Yurke needs even N".into()));
    }
    let results: Vec<CliResult<Option<MetricsRow>>> = jobs
        .par_iter()
        .map(|&(kind, n)| {
            let state = match make_state(kind, spin(n)?) {
                Ok(s) => s,
                Err(e @ Error::NoInteriorMinimum { .. }) => {
                    eprintln!("skipping {kind} at N = {n}: {e}");
                    return Ok(None);
                }
                Err(e) => return Err(e.into()),
            };
            let r = report(&state);
            Ok(Some(MetricsRow {
                state: kind.to_string(),
                n,
                xi_sq: r.xi_sq,
                xi_sq_min: r.xi_sq_min,
                zeta_sq: r.zeta_sq,
                zeta_sq_rc: r.zeta_sq_rc,
                sharpness: r.sharpness_re,
                sharpness_modulus: r.sharpness_mod,
                variance_approx: r.variance_approx,
                holevo_variance: r.holevo_variance,
            }))
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    if rows.is_empty() {
        return Err(CliError::Numerical("no rows could be computed".into()));
    }
    let text = match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from(METRICS_HEADER);
            s.push('\n');
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.state,
                    r.n,
                    opt_num(r.xi_sq),
                    opt_num(r.xi_sq_min),
                    num(r.zeta_sq),
                    num(r.zeta_sq_rc),
                    num(r.sharpness),
                    num(r.sharpness_modulus),
                    num(r.variance_approx),
                    num(r.holevo_variance)
                );
            }
            s
        }
    };
    emit(out, &text).map_err(|e| io_error(out.unwrap_or(Path::new("<stdout>")), e))
}

#[derive(Serialize)]
struct SweepRow {
    n: u32,
    nu: f64,
    xi_sq: Option<f64>,
    zeta_sq: f64,
}

pub fn cmd_twist_sweep(ns: &[u32], lo: f64, hi: f64, count: usize, format: Format, out: Option<&Path>) -> CliResult<()> {
    let mut rows = Vec::new();
    for &n in ns {
        let curve = sweep_range(spin(n)?, lo, hi, count)?;
        for k in 0..curve.nu_samples.len() {
            let xi = curve.xi_sq[k];
            rows.push(SweepRow {
                n,
                nu: curve.nu_samples[k],
                xi_sq: xi.is_finite().then_some(xi),
                zeta_sq: curve.zeta_sq[k],
            });
        }
    }
    let text = match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("n,nu,xi_sq,zeta_sq\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{}", r.n, num(r.nu), opt_num(r.xi_sq), num(r.zeta_sq));
            }
            s
        }
    };
    emit(out, &text).map_err(|e| io_error(out.unwrap_or(Path::new("<stdout>")), e))
}

#[derive(Serialize)]
struct OptimumRow {
    n: u32,
    nu_ss: Option<f64>,
    min_xi_sq: Option<f64>,
    nu_ps: Option<f64>,
    min_zeta_sq: Option<f64>,
}

#[derive(Serialize)]
struct OptimumReport {
    rows: Vec<OptimumRow>,
    /// Present when the N list supports a scaling fit.
    fit_xi: Option<ScalingFit>,
    fit_zeta: Option<ScalingFit>,
}

pub fn cmd_twist_optimize(ns: &[u32], metric: MetricChoice, format: Format, out: Option<&Path>) -> CliResult<()> {
    let rows: Vec<OptimumRow> = ns
        .par_iter()
        .map(|&n| {
            let evolution = TwistEvolution::new(spin(n)?);
            let ss = metric.xi().then(|| minimize_with(&evolution, Metric::XiSq)).transpose()?;
            let ps = metric.zeta().then(|| minimize_with(&evolution, Metric::ZetaSq)).transpose()?;
            Ok(OptimumRow {
                n,
                nu_ss: ss.map(|o| o.nu_star),
                min_xi_sq: ss.map(|o| o.value_at_star),
                nu_ps: ps.map(|o| o.nu_star),
                min_zeta_sq: ps.map(|o| o.value_at_star),
            })
        })
        .collect::<CliResult<_>>()?;

    let text = match format {
        Format::Json => {
            let fit = |metric: Metric, pick: fn(&OptimumRow) -> Option<f64>| {
                let table: Vec<(u32, f64)> = rows.iter().filter_map(|r| pick(r).map(|nu| (r.n, nu))).collect();
                fit_table(&table, metric).ok()
            };
            let report = OptimumReport {
                fit_xi: fit(Metric::XiSq, |r| r.nu_ss),
                fit_zeta: fit(Metric::ZetaSq, |r| r.nu_ps),
                rows,
            };
            to_json(&report)
        }
        Format::Csv => {
            let mut header = vec!["n"];
            if metric.xi() {
                header.extend(["nu_ss", "min_xi_sq"]);
            }
            if metric.zeta() {
                header.extend(["nu_ps", "min_zeta_sq"]);
            }
            let mut s = header.join(",") + "\n";
            for r in &rows {
                let mut cols = vec![r.n.to_string()];
                if metric.xi() {
                    cols.extend([opt_num(r.nu_ss), opt_num(r.min_xi_sq)]);
                }
                if metric.zeta() {
                    cols.extend([opt_num(r.nu_ps), opt_num(r.min_zeta_sq)]);
                }
                s += &(cols.join(",") + "\n");
            }
            s
        }
    };
    emit(out, &text).map_err(|e| io_error(out.unwrap_or(Path::new("<stdout>")), e))
}

pub struct PanelOptions {
    pub phase_points: Option<usize>,
    pub wigner_phi: usize,
    pub wigner_rows: usize,
}

/// Five CSV files per state: equal-area Wigner raster, phase distribution
/// and the coefficient tables in the x, y and z eigenbases.
pub fn cmd_panel(kinds: &[StateKind], n: u32, out_dir: &Path, opts: &PanelOptions) -> CliResult<Vec<PathBuf>> {
    let j = spin(n)?;
    let mut labels: Vec<&str> = kinds.iter().map(|k| k.label()).collect();
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Config("each state kind may appear once in a panel".into()));
    }
    if opts.wigner_phi < 2 || opts.wigner_rows < 2 {
        return Err(CliError::Config("Wigner raster needs at least 2 x 2 points".into()));
    }
    let phase_points = opts.phase_points.unwrap_or_else(|| default_phase_points(j));
    fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;

    let states: Vec<(StateKind, SpinState)> = kinds
        .par_iter()
        .map(|&k| Ok((k, make_state(k, j)?)))
        .collect::<CliResult<_>>()?;

    let mut written = Vec::new();
    for (kind, state) in &states {
        let files = panel_files(state, phase_points, opts)?;
        for (suffix, text) in files {
            let path = out_dir.join(format!("{}_{suffix}.csv", kind.label()));
            fs::write(&path, text).map_err(|e| io_error(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn panel_files(state: &SpinState, phase_points: usize, opts: &PanelOptions) -> CliResult<Vec<(&'static str, String)>> {
    let mut files = Vec::new();

    let raster = WignerFunction::from_state(state)?.equal_area(opts.wigner_phi, opts.wigner_rows);
    let mut s = String::from("phi,cos_theta,W\n");
    for (i, &x) in raster.costheta.iter().enumerate() {
        for (k, &phi) in raster.phi.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", num(phi), num(x), num(raster.values[(i, k)]));
        }
    }
    files.push(("wigner", s));

    // closed grid on [-pi, pi] so the trapezoid rule integrates to one
    let dist = phase_distribution(state, 0.0, phase_points)?;
    let mut s = String::from("phi,P\n");
    for k in 0..=phase_points {
        let phi = -PI + 2.0 * PI * k as f64 / phase_points as f64;
        let _ = writeln!(s, "{},{}", num(phi), num(dist.density_at(phi)));
    }
    files.push(("phase", s));

    for (axis, suffix) in [(Axis::X, "coeff_x"), (Axis::Y, "coeff_y"), (Axis::Z, "coeff_z")] {
        let table = basis_coefficients(state, axis);
        let mut s = String::from("mu,coeff\n");
        for (mu, c) in table.mu.iter().zip(&table.values) {
            let _ = writeln!(s, "{},{}", num(*mu), num(*c));
        }
        files.push((suffix, s));
    }
    Ok(files)
}

pub fn cmd_state(kind: StateKind, n: u32, out: Option<&Path>) -> CliResult<()> {
    let state = make_state(kind, spin(n)?)?;
    let text = StateRecord::new(&state, Some(&kind)).to_json() + "\n";
    emit(out, &text).map_err(|e| io_error(out.unwrap_or(Path::new("<stdout>")), e))
}
