//! Figures of merit for phase estimation.
//!
//! First and second moments are computed directly from the ladder structure
//! of the `J_z` basis in O(2J) time; the dense operators in [`crate::spin`]
//! are only used to cross-check them in tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin::{eigenbasis, Axis, DensityMatrix, SpinQuantum, SpinState};
use crate::states::coherent_state;

/// Below `MEAN_SPIN_ZERO * J` the mean spin is treated as zero.
pub const MEAN_SPIN_ZERO: f64 = 1e-9;

/// Mean vector and symmetrized covariance of `(J_x, J_y, J_z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoments {
    pub mean: [f64; 3],
    /// `cov[a][b] = <{J_a, J_b}>/2 - <J_a><J_b>`.
    pub cov: [[f64; 3]; 3],
}

pub fn moments(state: &SpinState) -> SpinMoments {
    let j = state.j();
    let c = state.coeffs();
    let d = j.dim();
    let mut jp = Complex64::new(0.0, 0.0);
    let mut jp2 = Complex64::new(0.0, 0.0);
    let mut jp_jz = Complex64::new(0.0, 0.0);
    let mut jz_jp = Complex64::new(0.0, 0.0);
    let mut lower_raise = 0.0;
    let mut raise_lower = 0.0;
    let mut jz = 0.0;
    let mut jz2 = 0.0;
    for i in 0..d {
        let p = c[i].norm_sqr();
        let mu = j.mu(i);
        jz += mu * p;
        jz2 += mu * mu * p;
        let up = j.raising_coefficient(i);
        lower_raise += up * up * p;
        if i > 0 {
            let down = j.raising_coefficient(i - 1);
            raise_lower += down * down * p;
        }
        if i + 1 < d {
            let amp = c[i + 1].conj() * c[i] * up;
            jp += amp;
            jp_jz += amp * mu;
            jz_jp += amp * j.mu(i + 1);
        }
        if i + 2 < d {
            jp2 += c[i + 2].conj() * c[i] * (up * j.raising_coefficient(i + 1));
        }
    }
    let mean = [jp.re, jp.im, jz];
    let xx = (2.0 * jp2.re + raise_lower + lower_raise) / 4.0;
    let yy = (-2.0 * jp2.re + raise_lower + lower_raise) / 4.0;
    let xy = jp2.im / 2.0;
    let mixed = jp_jz + jz_jp;
    let xz = mixed.re / 2.0;
    let yz = mixed.im / 2.0;
    let second = [[xx, xy, xz], [xy, yy, yz], [xz, yz, jz2]];
    let mut cov = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            cov[a][b] = second[a][b] - mean[a] * mean[b];
        }
    }
    SpinMoments { mean, cov }
}

/// `(<J_x>, <J_y>, <J_z>)`.
pub fn mean_spin(state: &SpinState) -> [f64; 3] {
    moments(state).mean
}

pub fn variance(state: &SpinState, axis: Axis) -> f64 {
    let k = axis_index(axis);
    moments(state).cov[k][k]
}

fn axis_index(axis: Axis) -> usize {
    match axis {
        Axis::X => 0,
        Axis::Y => 1,
        Axis::Z => 2,
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiSquared {
    /// `2J Var(J_y) / |<J>|^2`.
    pub along_y: f64,
    /// Same with `J_y` replaced by the least-noisy component orthogonal to `<J>`.
    pub minimized: f64,
}

/// Spin squeezing parameter. Fails with [`Error::MeanSpinZero`] when the mean
/// spin is below `1e-9 J`.
pub fn xi_squared(state: &SpinState) -> Result<XiSquared> {
    let j = state.j();
    let SpinMoments { mean, cov } = moments(state);
    let length = norm3(mean);
    if length < MEAN_SPIN_ZERO * j.j() {
        return Err(Error::MeanSpinZero);
    }
    let scale = 2.0 * j.j() / (length * length);

    let n = [mean[0] / length, mean[1] / length, mean[2] / length];
    // any vector not parallel to n seeds the orthogonal pair
    let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(cross(n, seed));
    let e2 = cross(n, e1);
    let project = |u: [f64; 3], v: [f64; 3]| -> f64 {
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                s += u[a] * cov[a][b] * v[b];
            }
        }
        s
    };
    let (a, b, c) = (project(e1, e1), project(e1, e2), project(e2, e2));
    let smallest = 0.5 * (a + c) - (0.25 * (a - c) * (a - c) + b * b).sqrt();

    Ok(XiSquared {
        along_y: scale * cov[1][1],
        minimized: scale * smallest,
    })
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let l = norm3(v);
    [v[0] / l, v[1] / l, v[2] / l]
}

/// Ramsey precision `Delta J_y / (|<J>| |cos varphi| sqrt M)` from `M` repeated
/// measurements, linearized about the unrotated state.
pub fn ramsey_precision(state: &SpinState, m: u32, varphi: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one measurement".into()));
    }
    let cos = varphi.cos();
    if cos.abs() < 1e-12 {
        return Err(Error::DivergentAtQuadrature);
    }
    let SpinMoments { mean, cov } = moments(state);
    let length = norm3(mean);
    if length < MEAN_SPIN_ZERO * state.j().j() {
        return Err(Error::MeanSpinZero);
    }
    Ok(cov[1][1].max(0.0).sqrt() / (length * cos.abs() * f64::from(m).sqrt()))
}

/// Canonical-measurement sharpness `S = sum_mu <mu+1|psi><psi|mu>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sharpness(pub Complex64);

impl Sharpness {
    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn modulus(self) -> f64 {
        self.0.norm()
    }
}

pub fn sharpness(state: &SpinState) -> Sharpness {
    let c = state.coeffs();
    let s = (0..c.len().saturating_sub(1))
        .map(|i| c[i + 1] * c[i].conj())
        .sum();
    Sharpness(s)
}

/// Sharpness of a mixed state, `sum_mu rho_{mu+1, mu}`; linear in `rho`.
pub fn sharpness_of_density(rho: &DensityMatrix) -> Sharpness {
    let m = rho.matrix();
    Sharpness((0..m.nrows().saturating_sub(1)).map(|i| m[(i + 1, i)]).sum())
}

/// Phase squeezing parameter `4J (1 - Re S)`.
pub fn zeta_squared(state: &SpinState) -> f64 {
    2.0 * f64::from(state.j().two_j()) * (1.0 - sharpness(state).re())
}

pub fn zeta_squared_of_density(rho: &DensityMatrix) -> f64 {
    2.0 * f64::from(rho.j().two_j()) * (1.0 - sharpness_of_density(rho).re())
}

/// Sharpness of the same-J coherent state.
pub fn coherent_sharpness(j: SpinQuantum) -> f64 {
    sharpness(&coherent_state(j)).re()
}

/// `(1 - Re S) / (1 - S_coh)`: phase squeezing relative to the coherent state.
pub fn zeta_squared_rc(state: &SpinState) -> f64 {
    (1.0 - sharpness(state).re()) / (1.0 - coherent_sharpness(state.j()))
}

/// Oversampled default grid size for plotting, `max(512, 8J + 1)`.
pub fn default_phase_points(j: SpinQuantum) -> usize {
    512.max(4 * j.two_j() as usize + 1)
}

/// Smallest grid on which the periodic trapezoid integrates `P` exactly with
/// margin: `4J + 3` points.
pub fn min_phase_points(j: SpinQuantum) -> usize {
    2 * j.two_j() as usize + 3
}

/// Canonical phase distribution `P(phi)` of `exp(-i varphi J_z)|psi>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDistribution {
    pub two_j: u32,
    pub varphi: f64,
    /// Uniform grid `-pi + 2 pi k / n`, `k = 0..n`.
    pub phi: Vec<f64>,
    pub density: Vec<f64>,
    /// `A_k = sum_mu c_{mu+k} c_mu^*`, `k = 0..=2J`, of the rotated state;
    /// `P(phi) = (A_0 + 2 Re sum_k A_k e^{i k phi}) / 2 pi`.
    pub correlation: Vec<Complex64>,
}

impl PhaseDistribution {
    pub fn density_at(&self, phi: f64) -> f64 {
        density_from_correlation(&self.correlation, phi)
    }

    /// Periodic trapezoid rule over the stored grid.
    pub fn integral(&self) -> f64 {
        let h = 2.0 * PI / self.phi.len() as f64;
        self.density.iter().sum::<f64>() * h
    }

    /// `int P(phi) e^{i(varphi - phi)} dphi`, which recovers the sharpness of
    /// the unrotated state.
    pub fn sharpness(&self) -> Complex64 {
        self.correlation.get(1).copied().unwrap_or_default() * Complex64::from_polar(1.0, self.varphi)
    }

    /// Grid point with the largest density.
    pub fn peak(&self) -> f64 {
        let k = self
            .density
            .iter()
            .enumerate()
            .fold(0, |best, (k, &p)| if p > self.density[best] { k } else { best });
        self.phi[k]
    }
}

fn density_from_correlation(corr: &[Complex64], phi: f64) -> f64 {
    let mut sum = corr[0].re;
    for (k, a) in corr.iter().enumerate().skip(1) {
        sum += 2.0 * (a * Complex64::from_polar(1.0, k as f64 * phi)).re;
    }
    sum / (2.0 * PI)
}

pub fn phase_distribution(state: &SpinState, varphi: f64, n_points: usize) -> Result<PhaseDistribution> {
    let j = state.j();
    let required = min_phase_points(j);
    if n_points < required {
        return Err(Error::GridTooCoarse {
            required,
            got: n_points,
        });
    }
    let rotated: Vec<Complex64> = state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::from_polar(1.0, -j.mu(i) * varphi))
        .collect();
    let d = rotated.len();
    let correlation: Vec<Complex64> = (0..d)
        .map(|k| (0..d - k).map(|i| rotated[i + k] * rotated[i].conj()).sum())
        .collect();
    let phi: Vec<f64> = (0..n_points)
        .map(|k| -PI + 2.0 * PI * k as f64 / n_points as f64)
        .collect();
    let density = phi
        .iter()
        .map(|&p| density_from_correlation(&correlation, p))
        .collect();
    Ok(PhaseDistribution {
        two_j: j.two_j(),
        varphi,
        phi,
        density,
        correlation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WrappedVariance {
    /// `int (phi - mean)^2 P` over the 2 pi window centred on the peak.
    pub direct: f64,
    /// `2 (1 - |S|)`.
    pub approx: f64,
    /// `|S|^-2 - 1`; infinite when `S = 0`.
    pub holevo: f64,
}

/// Variance of `P(phi)` on the window `[peak - pi, peak + pi)`, i.e. with the
/// cut placed opposite the peak, evaluated in closed form from the
/// correlation sequence, alongside the sharpness-based approximations.
pub fn variance_wrapped(dist: &PhaseDistribution) -> WrappedVariance {
    let centre = dist.peak();
    let mut mean = 0.0;
    let mut second = dist.correlation[0].re * PI * PI / 3.0;
    for (k, a) in dist.correlation.iter().enumerate().skip(1) {
        let kf = k as f64;
        let b = a * Complex64::from_polar(1.0, kf * centre);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        mean += 2.0 * sign * b.im / kf;
        second += 4.0 * sign * b.re / (kf * kf);
    }
    let s = dist.sharpness().norm();
    WrappedVariance {
        direct: second - mean * mean,
        approx: 2.0 * (1.0 - s),
        holevo: 1.0 / (s * s) - 1.0,
    }
}

/// Amplitudes of a state in the eigenbasis of `J_axis`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisCoefficients {
    pub axis: Axis,
    pub mu: Vec<f64>,
    /// Real parts after the global phase that maximizes their sum.
    pub values: Vec<f64>,
    /// Largest imaginary part left after that phase.
    pub residual_imag: f64,
}

pub fn basis_coefficients(state: &SpinState, axis: Axis) -> BasisCoefficients {
    let j = state.j();
    let mut amps = eigenbasis(j, axis).coefficients_of(state);
    let total: Complex64 = amps.iter().sum();
    if total.norm() > 1e-12 {
        let phase = total.conj() / total.norm();
        amps.iter_mut().for_each(|a| *a *= phase);
    } else {
        crate::spin::fix_phase_largest(&mut amps);
    }
    BasisCoefficients {
        axis,
        mu: j.mus().collect(),
        values: amps.iter().map(|a| a.re).collect(),
        residual_imag: amps.iter().map(|a| a.im.abs()).fold(0.0, f64::max),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingReport {
    pub mean_spin: [f64; 3],
    /// `None` when the mean spin vanishes.
    pub xi_sq: Option<f64>,
    pub xi_sq_min: Option<f64>,
    pub zeta_sq: f64,
    pub zeta_sq_rc: f64,
    pub sharpness_re: f64,
    pub sharpness_mod: f64,
    /// `2 (1 - Re S)`.
    pub variance_approx: f64,
    /// `|S|^-2 - 1`.
    pub holevo_variance: f64,
}

pub fn report(state: &SpinState) -> SqueezingReport {
    let s = sharpness(state);
    let xi = xi_squared(state).ok();
    SqueezingReport {
        mean_spin: mean_spin(state),
        xi_sq: xi.map(|x| x.along_y),
        xi_sq_min: xi.map(|x| x.minimized),
        zeta_sq: zeta_squared(state),
        zeta_sq_rc: zeta_squared_rc(state),
        sharpness_re: s.re(),
        sharpness_mod: s.modulus(),
        variance_approx: 2.0 * (1.0 - s.re()),
        holevo_variance: 1.0 / (s.modulus() * s.modulus()) - 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{angular_momentum_operator, rotate_about_z};
    use crate::states::{noon_state, optimal_phase_state, yurke_state};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn sq(two_j: u32) -> SpinQuantum {
        SpinQuantum::new(two_j).unwrap()
    }

    fn generic_state(two_j: u32) -> SpinState {
        let j = sq(two_j);
        let v = nalgebra::DVector::from_fn(j.dim(), |i, _| {
            Complex64::new((1.3 * i as f64).sin() + 0.2, (0.7 * i as f64 + 0.4).cos())
        });
        SpinState::from_unnormalized(j, v).unwrap()
    }

    #[test]
    fn ladder_moments_match_dense_operators() {
        for two_j in [1, 2, 7, 16] {
            let s = generic_state(two_j);
            let m = moments(&s);
            let ops: Vec<_> = Axis::ALL
                .iter()
                .map(|&a| angular_momentum_operator(s.j(), a))
                .collect();
            for a in 0..3 {
                assert!((s.expectation(&ops[a]).re - m.mean[a]).abs() < 1e-12);
                for b in 0..3 {
                    let sym = (ops[a].matrix() * ops[b].matrix() + ops[b].matrix() * ops[a].matrix())
                        * Complex64::new(0.5, 0.0);
                    let e = s.coeffs().dotc(&(sym * s.coeffs())).re - m.mean[a] * m.mean[b];
                    assert!((e - m.cov[a][b]).abs() < 1e-12, "{two_j} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn mean_spin_examples() {
        let j = sq(6);
        assert!(mean_spin(&noon_state(j)).iter().all(|x| x.abs() < 1e-12));
        for k in 0..j.dim() {
            let m = mean_spin(&SpinState::basis_state(j, k).unwrap());
            assert_eq!(m, [0.0, 0.0, j.mu(k)]);
        }
    }

    #[test]
    fn xi_coherent_is_one() {
        for two_j in [1, 2, 10, 100] {
            let xi = xi_squared(&coherent_state(sq(two_j))).unwrap();
            assert!((xi.along_y - 1.0).abs() < 1e-12);
            assert!((xi.minimized - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn xi_yurke_n4() {
        let alpha: f64 = 0.1;
        let xi = xi_squared(&yurke_state(sq(4), alpha).unwrap()).unwrap();
        let expected = 1.0 / 3.0 / alpha.cos().powi(2);
        assert!((xi.along_y - expected).abs() < 1e-12);
        assert!((xi.along_y - 0.33668).abs() < 1e-5);
    }

    #[test]
    fn xi_noon_undefined() {
        assert_eq!(xi_squared(&noon_state(sq(8))), Err(Error::MeanSpinZero));
        assert_eq!(
            xi_squared(&yurke_state(sq(8), std::f64::consts::FRAC_PI_2).unwrap()),
            Err(Error::MeanSpinZero)
        );
    }

    #[test]
    fn xi_minimized_never_exceeds_y() {
        for two_j in [3, 8, 20] {
            let s = generic_state(two_j);
            if let Ok(xi) = xi_squared(&s) {
                assert!(xi.minimized <= xi.along_y * (1.0 + 1e-12) + 1e-12);
            }
        }
    }

    #[test]
    fn ramsey_coherent() {
        for n in [4u32, 25, 100] {
            let s = coherent_state(sq(n));
            let one = ramsey_precision(&s, 1, 0.0).unwrap();
            assert!((one - 1.0 / f64::from(n).sqrt()).abs() < 1e-12);
            let hundred = ramsey_precision(&s, 100, 0.0).unwrap();
            assert!((hundred - 0.1 / f64::from(n).sqrt()).abs() < 1e-12);
        }
        let s = coherent_state(sq(10));
        assert_eq!(
            ramsey_precision(&s, 1, std::f64::consts::FRAC_PI_2),
            Err(Error::DivergentAtQuadrature)
        );
        assert!(ramsey_precision(&s, 0, 0.0).is_err());
    }

    #[test]
    fn sharpness_examples() {
        for n in 2..30 {
            let s = sharpness(&optimal_phase_state(sq(n)));
            assert!((s.re() - (PI / (f64::from(n) + 2.0)).cos()).abs() < 1e-12);
            assert!(s.value().im.abs() < 1e-15);
            assert_eq!(sharpness(&noon_state(sq(n))).value(), Complex64::new(0.0, 0.0));
        }
        for two_j in [1u32, 4, 9] {
            let j = sq(two_j);
            let amp = 1.0 / (j.dim() as f64).sqrt();
            let uniform = SpinState::from_real(j, &vec![amp; j.dim()]).unwrap();
            let expected = f64::from(two_j) / (f64::from(two_j) + 1.0);
            assert!((sharpness(&uniform).re() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn sharpness_bounded_and_real_for_x_states() {
        for two_j in [2, 5, 12] {
            let s = sharpness(&generic_state(two_j));
            assert!(s.modulus() <= 1.0 + 1e-12);
            let coh = sharpness(&coherent_state(sq(two_j)));
            assert!((coh.re() - coh.modulus()).abs() < 1e-10);
        }
    }

    #[test]
    fn zeta_examples() {
        for n in 2..40 {
            assert_eq!(zeta_squared(&noon_state(sq(n))), 2.0 * f64::from(n));
        }
        let coh2 = zeta_squared(&coherent_state(sq(2)));
        assert!((coh2 - 4.0 * (1.0 - FRAC_1_SQRT_2)).abs() < 1e-12);
        assert!((coh2 - 1.17157).abs() < 1e-5);
        let opt10 = zeta_squared(&optimal_phase_state(sq(10)));
        assert!((opt10 - 20.0 * (1.0 - (PI / 12.0).cos())).abs() < 1e-12);
        assert!((opt10 - 0.68148).abs() < 1e-5);
    }

    #[test]
    fn zeta_rc_examples() {
        let j = sq(8);
        assert_eq!(zeta_squared_rc(&coherent_state(j)), 1.0);
        let coh = zeta_squared(&coherent_state(j));
        let noon_rc = zeta_squared_rc(&noon_state(j));
        assert!((noon_rc - 16.0 / coh).abs() < 1e-12);
        assert!((zeta_squared_rc(&optimal_phase_state(sq(2))) - 1.0).abs() < 1e-12);
        let mut last = 1.0;
        for n in 3..=30u32 {
            let rc = zeta_squared_rc(&optimal_phase_state(sq(n)));
            assert!(rc < last, "N = {n}: {rc}");
            last = rc;
        }
    }

    #[test]
    fn density_sharpness_is_linear() {
        let j = sq(6);
        let a = coherent_state(j);
        let b = rotate_about_z(&optimal_phase_state(j), 0.8);
        let rho = DensityMatrix::mixture(&[(0.3, a.clone()), (0.7, b.clone())]).unwrap();
        let expected = 0.3 * sharpness(&a).re() + 0.7 * sharpness(&b).re();
        assert!((sharpness_of_density(&rho).re() - expected).abs() < 1e-14);
        assert!((zeta_squared_of_density(&DensityMatrix::pure(&a)) - zeta_squared(&a)).abs() < 1e-14);
    }

    #[test]
    fn phase_distribution_grid_check() {
        let s = coherent_state(sq(10));
        assert_eq!(
            phase_distribution(&s, 0.0, 22),
            Err(Error::GridTooCoarse {
                required: 23,
                got: 22
            })
        );
        assert!(phase_distribution(&s, 0.0, 23).is_ok());
        assert_eq!(default_phase_points(sq(10)), 512);
        assert_eq!(default_phase_points(sq(200)), 801);
    }

    #[test]
    fn coherent_distribution_symmetric_single_peak() {
        let dist = phase_distribution(&coherent_state(sq(20)), 0.0, 512).unwrap();
        assert!((dist.integral() - 1.0).abs() < 1e-10);
        assert_eq!(dist.peak(), 0.0);
        for phi in [0.1, 0.7, 2.0, 3.0] {
            assert!((dist.density_at(phi) - dist.density_at(-phi)).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_matches_direct_sum() {
        let s = generic_state(11);
        let dist = phase_distribution(&s, 0.0, 64).unwrap();
        for phi in [-2.9, -0.4, 0.0, 1.1, 3.1] {
            let amp: Complex64 = s
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| c * Complex64::from_polar(1.0, s.j().mu(i) * phi))
                .sum();
            assert!((dist.density_at(phi) - amp.norm_sqr() / (2.0 * PI)).abs() < 1e-12);
        }
    }

    #[test]
    fn distribution_is_nonnegative() {
        let dist = phase_distribution(&generic_state(13), 0.4, 301).unwrap();
        assert!(dist.density.iter().all(|&p| p >= -1e-12));
    }

    #[test]
    fn sharpness_matches_distribution_moment() {
        for s in [generic_state(9), coherent_state(sq(9)), optimal_phase_state(sq(9))] {
            let n = 64;
            let dist = phase_distribution(&s, 0.0, n).unwrap();
            let h = 2.0 * PI / n as f64;
            let moment: Complex64 = dist
                .phi
                .iter()
                .zip(&dist.density)
                .map(|(&phi, &p)| Complex64::from_polar(p * h, -phi))
                .sum();
            assert!((moment - sharpness(&s).value()).norm() < 1e-10);
            assert!((dist.sharpness() - sharpness(&s).value()).norm() < 1e-12);
        }
    }

    #[test]
    fn variance_closed_form_matches_quadrature() {
        let s = coherent_state(sq(12));
        let dist = phase_distribution(&s, 0.9, 64).unwrap();
        let wv = variance_wrapped(&dist);
        // brute-force midpoint rule on the window centred at the peak
        let centre = dist.peak();
        let n = 200_000;
        let h = 2.0 * PI / n as f64;
        let xs: Vec<f64> = (0..n).map(|k| -PI + (k as f64 + 0.5) * h).collect();
        let ps: Vec<f64> = xs.iter().map(|&x| dist.density_at(x + centre)).collect();
        let mean: f64 = xs.iter().zip(&ps).map(|(x, p)| x * p * h).sum();
        let var: f64 = xs.iter().zip(&ps).map(|(x, p)| (x - mean).powi(2) * p * h).sum();
        assert!((wv.direct - var).abs() < 1e-8, "{} vs {}", wv.direct, var);
    }

    #[test]
    fn variance_examples() {
        let opt = optimal_phase_state(sq(40));
        let wv = variance_wrapped(&phase_distribution(&opt, 0.0, 512).unwrap());
        assert!((wv.direct - wv.approx).abs() / wv.approx < 0.05);

        let noon = noon_state(sq(10));
        let wv = variance_wrapped(&phase_distribution(&noon, 0.0, 512).unwrap());
        assert_eq!(wv.holevo, f64::INFINITY);

        let coh = coherent_state(sq(100));
        let wv = variance_wrapped(&phase_distribution(&coh, 0.0, 512).unwrap());
        assert!((wv.approx - 0.01).abs() / 0.01 < 0.05);
    }

    #[test]
    fn coefficient_tables() {
        let j = sq(20);
        let coh = basis_coefficients(&coherent_state(j), Axis::X);
        let nonzero: Vec<usize> = (0..j.dim()).filter(|&k| coh.values[k].abs() > 1e-10).collect();
        assert_eq!(nonzero, vec![20]);
        assert!((coh.values[20] - 1.0).abs() < 1e-10);

        let noon = noon_state(j);
        let x = basis_coefficients(&noon, Axis::X);
        let y = basis_coefficients(&noon, Axis::Y);
        for (a, b) in x.values.iter().zip(&y.values) {
            assert!((a - b).abs() < 1e-10);
        }

        let z = basis_coefficients(&coherent_state(j), Axis::Z);
        let mut binom = 1.0f64;
        for k in 0..=20usize {
            let expected = binom.sqrt() / 2f64.powi(10);
            assert!((z.values[k] - expected).abs() < 1e-12);
            binom *= (20 - k) as f64 / (k + 1) as f64;
        }
        assert_eq!(z.residual_imag, 0.0);
    }

    #[test]
    fn report_fields_consistent() {
        let j = sq(12);
        let r = report(&optimal_phase_state(j));
        assert!((r.zeta_sq - 2.0 * 12.0 * (1.0 - r.sharpness_re)).abs() < 1e-12);
        assert!(r.sharpness_mod <= 1.0 && r.sharpness_mod >= 0.0);
        assert!(r.xi_sq.is_some());
        let noon = report(&noon_state(j));
        assert_eq!(noon.xi_sq, None);
        assert_eq!(noon.holevo_variance, f64::INFINITY);
    }
}
