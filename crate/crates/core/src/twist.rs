//! Optimal two-axis counter-twisting times.
//!
//! The coarse scan runs in parallel; golden-section refinement is sequential.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{xi_squared, zeta_squared};
use crate::spin::{SpinQuantum, SpinState};
use crate::states::TwistEvolution;

pub const SCAN_POINTS: usize = 200;
pub const SCAN_START: f64 = 1e-4;
pub const NU_TOLERANCE: f64 = 1e-8;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    XiSq,
    ZetaSq,
}

impl Metric {
    /// Metric value of a state; `+inf` where `xi^2` is undefined so that the
    /// minimizer steps around it.
    pub fn evaluate(self, state: &SpinState) -> f64 {
        match self {
            Metric::XiSq => xi_squared(state).map_or(f64::INFINITY, |x| x.along_y),
            Metric::ZetaSq => zeta_squared(state),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::XiSq => "xi",
            Metric::ZetaSq => "zeta",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xi" | "xi_sq" | "xisq" => Ok(Metric::XiSq),
            "zeta" | "zeta_sq" | "zetasq" => Ok(Metric::ZetaSq),
            other => Err(Error::InvalidParameter(format!("unknown metric '{other}'"))),
        }
    }
}

/// Both metrics sampled along the 2ACT trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistCurve {
    pub j: SpinQuantum,
    pub nu_samples: Vec<f64>,
    /// NaN where the mean spin vanishes.
    pub xi_sq: Vec<f64>,
    pub zeta_sq: Vec<f64>,
}

/// Uniform grid over `[0, nu_max]`.
pub fn sweep(j: SpinQuantum, nu_max: f64, n_samples: usize) -> Result<TwistCurve> {
    if !(nu_max > 0.0 && nu_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("nu_max must be positive, got {nu_max}")));
    }
    sweep_range(j, 0.0, nu_max, n_samples)
}

/// Uniform grid over `[lo, hi]`, both ends included.
pub fn sweep_range(j: SpinQuantum, lo: f64, hi: f64, n_samples: usize) -> Result<TwistCurve> {
    if n_samples < 16 {
        return Err(Error::InvalidParameter(format!(
            "need at least 16 samples, got {n_samples}"
        )));
    }
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad sweep range [{lo}, {hi}]")));
    }
    let evolution = TwistEvolution::new(j);
    let step = (hi - lo) / (n_samples - 1) as f64;
    let nu_samples: Vec<f64> = (0..n_samples).map(|k| lo + step * k as f64).collect();
    let values: Vec<(f64, f64)> = nu_samples
        .par_iter()
        .map(|&nu| {
            let state = evolution.state_at(nu)?;
            let xi = xi_squared(&state).map_or(f64::NAN, |x| x.along_y);
            Ok((xi, zeta_squared(&state)))
        })
        .collect::<Result<_>>()?;
    let (xi_sq, zeta_sq) = values.into_iter().unzip();
    Ok(TwistCurve {
        j,
        nu_samples,
        xi_sq,
        zeta_sq,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistOptimum {
    pub nu_star: f64,
    pub value_at_star: f64,
    pub metric: Metric,
    /// Coarse-scan neighbours of the first local minimum.
    pub bracket: (f64, f64),
    /// Golden-section iterations.
    pub iterations: u32,
}

/// Upper end of the coarse scan, `4 log2(N) / N`.
pub fn scan_upper(j: SpinQuantum) -> f64 {
    let n = f64::from(j.n_particles());
    4.0 * n.log2() / n
}

/// First local minimum of `metric` along the 2ACT trajectory.
pub fn minimize(j: SpinQuantum, metric: Metric) -> Result<TwistOptimum> {
    minimize_with(&TwistEvolution::new(j), metric)
}

/// As [`minimize`], reusing a prepared propagator.
pub fn minimize_with(evolution: &TwistEvolution, metric: Metric) -> Result<TwistOptimum> {
    let j = evolution.j();
    let lo = SCAN_START;
    let hi = scan_upper(j);
    if hi <= lo {
        return Err(Error::NoInteriorMinimum { lo, hi });
    }
    let eval = |nu: f64| -> Result<f64> { Ok(metric.evaluate(&evolution.state_at(nu)?)) };

    let ratio = (hi / lo).ln() / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| {
            if k == SCAN_POINTS - 1 {
                hi
            } else {
                lo * (ratio * k as f64).exp()
            }
        })
        .collect();
    let values: Vec<f64> = grid.par_iter().map(|&nu| eval(nu)).collect::<Result<_>>()?;

    let i = (1..SCAN_POINTS - 1)
        .find(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .ok_or(Error::NoInteriorMinimum { lo, hi })?;

    let (mut a, mut b) = (grid[i - 1], grid[i + 1]);
    let mut best = (grid[i], values[i]);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    let mut iterations = 0;
    for (nu, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (nu, v);
        }
    }
    while b - a >= NU_TOLERANCE {
        iterations += 1;
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }

    Ok(TwistOptimum {
        nu_star: best.0,
        value_at_star: best.1,
        metric,
        bracket: (grid[i - 1], grid[i + 1]),
        iterations,
    })
}

/// The 2ACT state at the optimal time for `metric`.
pub fn optimal_state(j: SpinQuantum, metric: Metric) -> Result<(SpinState, TwistOptimum)> {
    let evolution = TwistEvolution::new(j);
    let optimum = minimize_with(&evolution, metric)?;
    Ok((evolution.state_at(optimum.nu_star)?, optimum))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub metric: Metric,
    /// `c` in `nu*(N) = c log2(N) / N`.
    pub coefficient: f64,
    /// `nu* - c log2(N)/N`, in the order of `table`.
    pub residuals: Vec<f64>,
    /// `(N, nu*)` sorted by `N`.
    pub table: Vec<(u32, f64)>,
    /// Set for `ZetaSq`, whose functional form is a guess.
    pub exploratory: bool,
}

/// Least-squares fit of the optimal time against `log2(N)/N` through the
/// origin. Needs at least five distinct even `N >= 10`.
pub fn scaling_fit(n_values: &[u32], metric: Metric) -> Result<ScalingFit> {
    let ns = fit_inputs(n_values.iter().copied())?;
    let table: Vec<(u32, f64)> = ns
        .par_iter()
        .map(|&n| Ok((n, minimize(SpinQuantum::from_particles(n)?, metric)?.nu_star)))
        .collect::<Result<_>>()?;
    fit_table(&table, metric)
}

/// Same fit for optimal times that are already known.
pub fn fit_table(table: &[(u32, f64)], metric: Metric) -> Result<ScalingFit> {
    fit_inputs(table.iter().map(|r| r.0))?;
    let mut table = table.to_vec();
    table.sort_by_key(|r| r.0);
    let x = |n: u32| f64::from(n).log2() / f64::from(n);
    let sxy: f64 = table.iter().map(|&(n, nu)| x(n) * nu).sum();
    let sxx: f64 = table.iter().map(|&(n, _)| x(n) * x(n)).sum();
    let coefficient = sxy / sxx;
    let residuals = table.iter().map(|&(n, nu)| nu - coefficient * x(n)).collect();
    Ok(ScalingFit {
        metric,
        coefficient,
        residuals,
        table,
        exploratory: metric == Metric::ZetaSq,
    })
}

fn fit_inputs(n_values: impl Iterator<Item = u32>) -> Result<Vec<u32>> {
    let mut ns: Vec<u32> = n_values.collect();
    ns.sort_unstable();
    ns.dedup();
    if let Some(bad) = ns.iter().find(|&&n| n < 10 || n % 2 == 1) {
        return Err(Error::InsufficientData(format!(
            "N = {bad} is not an even value >= 10"
        )));
    }
    if ns.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "need 5 distinct N values, got {}",
            ns.len()
        )));
    }
    Ok(ns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::zeta_squared;
    use crate::states::{coherent_state, optimal_phase_state};
    use std::f64::consts::PI;

    fn sq(n: u32) -> SpinQuantum {
        SpinQuantum::from_particles(n).unwrap()
    }

    #[test]
    fn metric_parsing() {
        assert_eq!("xi".parse::<Metric>().unwrap(), Metric::XiSq);
        assert_eq!("ZETA".parse::<Metric>().unwrap(), Metric::ZetaSq);
        assert!("both".parse::<Metric>().is_err());
    }

    #[test]
    fn sweep_starts_at_coherent() {
        let j = sq(20);
        let curve = sweep(j, 1.0, 101).unwrap();
        assert_eq!(curve.nu_samples.len(), 101);
        assert_eq!(curve.nu_samples[0], 0.0);
        assert!((curve.xi_sq[0] - 1.0).abs() < 1e-12);
        assert!((curve.zeta_sq[0] - zeta_squared(&coherent_state(j))).abs() < 1e-12);
        let min = curve.xi_sq.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min < 1.0);
        assert!(curve.xi_sq.last().unwrap() > &min);
    }

    #[test]
    fn sweep_rejects_bad_input() {
        let j = sq(10);
        assert!(sweep(j, 1.0, 15).is_err());
        assert!(sweep(j, 0.0, 32).is_err());
        assert!(sweep(j, -1.0, 32).is_err());
    }

    #[test]
    fn sweep_continuity_improves_with_refinement() {
        let j = sq(20);
        // <J_x> crosses zero near nu = 0.52 for N = 20, where xi^2 diverges
        let jump = |n: usize| {
            let c = sweep(j, 1.0, n).unwrap();
            let zeta = c.zeta_sq.windows(2).map(|w| (w[1] - w[0]).abs());
            let xi = c
                .nu_samples
                .windows(2)
                .zip(c.xi_sq.windows(2))
                .filter(|(nu, _)| nu[1] <= 0.4)
                .map(|(_, w)| (w[1] - w[0]).abs());
            zeta.chain(xi).fold(0.0, f64::max)
        };
        let coarse = jump(51);
        let fine = jump(201);
        assert!(fine < 0.5 * coarse, "{coarse} -> {fine}");
    }

    #[test]
    fn minimize_n20() {
        let j = sq(20);
        let ss = minimize(j, Metric::XiSq).unwrap();
        let expected = 1.25 * 20f64.log2() / 20.0;
        assert!((ss.nu_star - expected).abs() / expected < 0.15, "{}", ss.nu_star);
        let ps = minimize(j, Metric::ZetaSq).unwrap();
        assert!(ps.nu_star < ss.nu_star);
        let best = 40.0 * (1.0 - (PI / 22.0).cos());
        assert!((ps.value_at_star - best).abs() / best < 0.01);
        for opt in [ss, ps] {
            assert!(opt.bracket.0 <= opt.nu_star && opt.nu_star <= opt.bracket.1);
            assert!(opt.bracket.1 - opt.bracket.0 > NU_TOLERANCE);
            assert!(opt.iterations > 0);
        }
    }

    #[test]
    fn minimize_is_deterministic() {
        let a = minimize(sq(14), Metric::ZetaSq).unwrap();
        let b = minimize(sq(14), Metric::ZetaSq).unwrap();
        assert_eq!(a.nu_star.to_bits(), b.nu_star.to_bits());
    }

    #[test]
    fn minimum_below_fine_grid_over_bracket() {
        let j = sq(20);
        let opt = minimize(j, Metric::XiSq).unwrap();
        let evo = TwistEvolution::new(j);
        let (lo, hi) = opt.bracket;
        let n = 10_000;
        let worst = (0..=n)
            .map(|k| {
                let nu = lo + (hi - lo) * k as f64 / n as f64;
                Metric::XiSq.evaluate(&evo.state_at(nu).unwrap())
            })
            .fold(f64::INFINITY, f64::min);
        assert!(opt.value_at_star <= worst + 1e-12);
    }

    #[test]
    fn pss_close_to_optimal_state() {
        for n in [10, 20, 40] {
            let j = sq(n);
            let (pss, _) = optimal_state(j, Metric::ZetaSq).unwrap();
            assert!(pss.fidelity(&optimal_phase_state(j)) > 0.99);
        }
    }

    #[test]
    fn single_particle_has_no_scan() {
        assert!(matches!(
            minimize(sq(1), Metric::XiSq),
            Err(Error::NoInteriorMinimum { .. })
        ));
    }

    #[test]
    fn fit_needs_enough_points() {
        assert!(matches!(
            scaling_fit(&[20], Metric::XiSq),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            scaling_fit(&[20, 20, 40, 40, 60, 80], Metric::XiSq),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            scaling_fit(&[9, 20, 40, 60, 80, 100], Metric::XiSq),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn fit_residuals_consistent() {
        let fit = scaling_fit(&[10, 12, 14, 16, 18], Metric::ZetaSq).unwrap();
        assert!(fit.exploratory);
        assert_eq!(fit.table.len(), 5);
        for ((n, nu), r) in fit.table.iter().zip(&fit.residuals) {
            let x = f64::from(*n).log2() / f64::from(*n);
            assert!((nu - fit.coefficient * x - r).abs() < 1e-15);
        }
        // normal equation: residuals orthogonal to the regressor
        let dot: f64 = fit
            .table
            .iter()
            .zip(&fit.residuals)
            .map(|((n, _), r)| r * f64::from(*n).log2() / f64::from(*n))
            .sum();
        assert!(dot.abs() < 1e-12);
    }
}
