//! Test states: coherent, Yurke, NOON, optimal phase-squeezed, and the
//! two-axis counter-twisting (2ACT) family `|psi(nu)> = U(nu)|psi_coh>`.
//!
//! All constructors return normalized states whose largest-magnitude
//! coefficient is real positive.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{
    eigenbasis, ladder_about_x, Axis, HermitianExp, SpinOperator, SpinQuantum, SpinState,
};
use crate::twist::{self, Metric};

/// Yurke mixing angle used when none is given.
pub const DEFAULT_YURKE_ALPHA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    Coherent,
    Yurke { alpha: f64 },
    Noon,
    OptimalPhase,
    TwoAxisEvolved { nu: f64 },
    /// 2ACT state at the time minimizing the spin squeezing parameter.
    SpinSqueezed2ACT,
    /// 2ACT state at the time minimizing the phase squeezing parameter.
    PhaseSqueezed2ACT,
}

impl StateKind {
    /// Short name used in file names and tables.
    pub fn label(&self) -> &'static str {
        match self {
            StateKind::Coherent => "coherent",
            StateKind::Yurke { .. } => "yurke",
            StateKind::Noon => "noon",
            StateKind::OptimalPhase => "optimal",
            StateKind::TwoAxisEvolved { .. } => "twist",
            StateKind::SpinSqueezed2ACT => "sss",
            StateKind::PhaseSqueezed2ACT => "pss",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            StateKind::Yurke { alpha } => vec![("alpha", alpha)],
            StateKind::TwoAxisEvolved { nu } => vec![("nu", nu)],
            _ => Vec::new(),
        }
    }

    /// Whether construction needs an even particle number.
    pub fn requires_even_n(&self) -> bool {
        matches!(self, StateKind::Yurke { .. })
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateKind::Yurke { alpha } => write!(f, "yurke({alpha})"),
            StateKind::TwoAxisEvolved { nu } => write!(f, "twist({nu})"),
            other => f.write_str(other.label()),
        }
    }
}

fn parse_argument(name: &str, arg: Option<&str>) -> Result<Option<f64>> {
    arg.map(|a| {
        a.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("bad argument '{a}' for {name}")))
    })
    .transpose()
}

impl FromStr for StateKind {
    type Err = Error;

    /// Accepts `coherent`, `yurke`, `yurke(0.05)`, `noon`, `optimal`,
    /// `twist(0.2)`, `sss` and `pss` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.find('(') {
            Some(open) => {
                let close = s
                    .strip_suffix(')')
                    .ok_or_else(|| Error::InvalidParameter(format!("unbalanced '{s}'")))?;
                (&s[..open], Some(&close[open + 1..]))
            }
            None => (s.as_str(), None),
        };
        let arg = parse_argument(name, arg)?;
        let kind = match name {
            "coherent" | "coh" => StateKind::Coherent,
            "yurke" | "yur" => StateKind::Yurke {
                alpha: arg.unwrap_or(DEFAULT_YURKE_ALPHA),
            },
            "noon" => StateKind::Noon,
            "optimal" | "opt" => StateKind::OptimalPhase,
            "twist" => StateKind::TwoAxisEvolved {
                nu: arg.ok_or_else(|| {
                    Error::InvalidParameter("twist needs a time, e.g. twist(0.2)".into())
                })?,
            },
            "sss" => StateKind::SpinSqueezed2ACT,
            "pss" => StateKind::PhaseSqueezed2ACT,
            other => {
                return Err(Error::InvalidParameter(format!("unknown state kind '{other}'")))
            }
        };
        if arg.is_some() && kind.params().is_empty() {
            return Err(Error::InvalidParameter(format!("{name} takes no argument")));
        }
        Ok(kind)
    }
}

fn finish(j: SpinQuantum, coeffs: DVector<Complex64>) -> Result<SpinState> {
    Ok(SpinState::from_unnormalized(j, coeffs)?.canonicalize_phase())
}

/// `|J, J>_x`: binomial amplitudes `2^{-J} sqrt(C(2J, J + mu))`.
pub fn coherent_state(j: SpinQuantum) -> SpinState {
    let n = j.two_j() as usize;
    let mut amps = Vec::with_capacity(n + 1);
    let mut a = 2f64.powf(-j.j());
    for k in 0..=n {
        amps.push(a);
        a *= (((n - k) as f64) / ((k + 1) as f64)).sqrt();
    }
    let v = DVector::from_iterator(n + 1, amps.into_iter().map(|x| Complex64::new(x, 0.0)));
    finish(j, v).expect("binomial amplitudes are nonzero")
}

/// `(sin a / sqrt 2)|J,1>_y + cos a |J,0>_y + (sin a / sqrt 2)|J,-1>_y`.
///
/// The y eigenbasis phases make `<J,1|J_x|J,0>_y` and `<J,0|J_x|J,-1>_y` real
/// positive, so the mean spin points along `+x` with magnitude
/// `sqrt(2 J (J+1)) sin a cos a`.
pub fn yurke_state(j: SpinQuantum, alpha: f64) -> Result<SpinState> {
    if j.two_j() % 2 != 0 {
        return Err(Error::OddParticleNumber(j.two_j()));
    }
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "Yurke angle must lie in [0, pi/2], got {alpha}"
        )));
    }
    let basis = eigenbasis(j, Axis::Y);
    let zero = j.two_j() as usize / 2;
    let side = Complex64::new(alpha.sin() * FRAC_1_SQRT_2, 0.0);
    let centre = Complex64::new(alpha.cos(), 0.0);
    let v = basis.vectors.column(zero + 1) * side
        + basis.vectors.column(zero) * centre
        + basis.vectors.column(zero - 1) * side;
    finish(j, v)
}

/// `(|J,J>_z + |J,-J>_z) / sqrt 2`.
pub fn noon_state(j: SpinQuantum) -> SpinState {
    let d = j.dim();
    let mut v = DVector::from_element(d, Complex64::new(0.0, 0.0));
    v[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v[d - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    SpinState::from_vector(j, v).expect("NOON state is normalized")
}

/// Minimum phase-squeezing state: amplitude `sin((k+1) pi / (2J+2)) / sqrt(J+1)`
/// at index `k`, i.e. at `mu = k - J`.
pub fn optimal_phase_state(j: SpinQuantum) -> SpinState {
    let n = j.two_j() as usize;
    let scale = 1.0 / (j.j() + 1.0).sqrt();
    let v = DVector::from_iterator(
        n + 1,
        (0..=n).map(|k| {
            let arg = (k as f64 + 1.0) * PI / (n as f64 + 2.0);
            Complex64::new(scale * arg.sin(), 0.0)
        }),
    );
    finish(j, v).expect("sine amplitudes are nonzero")
}

/// The 2ACT generator `H = i (J_+^2 - J_-^2) / 8`, with `J_± = J_y ± i J_z`,
/// so that `exp(-i nu H) = exp[nu (J_+^2 - J_-^2) / 8]`.
pub fn two_axis_generator(j: SpinQuantum) -> SpinOperator {
    let (plus, minus) = ladder_about_x(j);
    let a = plus.matrix() * plus.matrix() - minus.matrix() * minus.matrix();
    SpinOperator::from_matrix(j, a * Complex64::new(0.0, 0.125))
        .expect("generator has the right dimension")
}

/// Diagonalized 2ACT evolution from the coherent state, for evaluating many
/// twisting times at the cost of one eigendecomposition.
#[derive(Debug, Clone)]
pub struct TwistEvolution {
    j: SpinQuantum,
    propagator: HermitianExp,
    initial: SpinState,
}

impl TwistEvolution {
    pub fn new(j: SpinQuantum) -> Self {
        let propagator =
            HermitianExp::new(&two_axis_generator(j)).expect("2ACT generator is Hermitian");
        Self {
            j,
            propagator,
            initial: coherent_state(j),
        }
    }

    pub fn j(&self) -> SpinQuantum {
        self.j
    }

    /// `U(nu)|psi_coh>`, renormalized and phase-canonicalized.
    pub fn state_at(&self, nu: f64) -> Result<SpinState> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "twisting time must be finite and >= 0, got {nu}"
            )));
        }
        if nu == 0.0 {
            return Ok(self.initial.clone());
        }
        finish(self.j, self.propagator.apply(nu, self.initial.coeffs()))
    }
}

pub fn evolve_2act(j: SpinQuantum, nu: f64) -> Result<SpinState> {
    TwistEvolution::new(j).state_at(nu)
}

/// Builds any of the test states. The optimized 2ACT kinds run the twist
/// optimizer first.
pub fn make_state(kind: StateKind, j: SpinQuantum) -> Result<SpinState> {
    match kind {
        StateKind::Coherent => Ok(coherent_state(j)),
        StateKind::Yurke { alpha } => yurke_state(j, alpha),
        StateKind::Noon => Ok(noon_state(j)),
        StateKind::OptimalPhase => Ok(optimal_phase_state(j)),
        StateKind::TwoAxisEvolved { nu } => evolve_2act(j, nu),
        StateKind::SpinSqueezed2ACT => Ok(twist::optimal_state(j, Metric::XiSq)?.0),
        StateKind::PhaseSqueezed2ACT => Ok(twist::optimal_state(j, Metric::ZetaSq)?.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{mean_spin, variance};

    fn sq(two_j: u32) -> SpinQuantum {
        SpinQuantum::new(two_j).unwrap()
    }

    fn assert_real_coeffs(state: &SpinState, expected: &[f64], tol: f64) {
        assert_eq!(state.coeffs().len(), expected.len());
        for (c, e) in state.coeffs().iter().zip(expected) {
            assert!((c - Complex64::new(*e, 0.0)).norm() <= tol, "{c} vs {e}");
        }
    }

    #[test]
    fn coherent_small_cases() {
        assert_real_coeffs(&coherent_state(sq(1)), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2], 1e-15);
        assert_real_coeffs(&coherent_state(sq(2)), &[0.5, FRAC_1_SQRT_2, 0.5], 1e-15);
    }

    #[test]
    fn coherent_matches_top_x_eigenvector() {
        for two_j in [2, 7, 30] {
            let j = sq(two_j);
            let top = eigenbasis(j, Axis::X).vector(j.dim() - 1);
            assert!(coherent_state(j).fidelity(&top) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn coherent_moments() {
        for two_j in [1, 4, 25, 100] {
            let j = sq(two_j);
            let s = coherent_state(j);
            let m = mean_spin(&s);
            assert!((m[0] - j.j()).abs() < 1e-10);
            assert!(m[1].abs() < 1e-12 && m[2].abs() < 1e-12);
            let half = (j.j() / 2.0).sqrt();
            assert!((variance(&s, Axis::Y).sqrt() - half).abs() < 1e-10);
            assert!((variance(&s, Axis::Z).sqrt() - half).abs() < 1e-10);
        }
    }

    #[test]
    fn yurke_needs_even_n() {
        assert_eq!(yurke_state(sq(5), 0.1), Err(Error::OddParticleNumber(5)));
        assert!(yurke_state(sq(4), 2.0).is_err());
    }

    #[test]
    fn yurke_mean_spin_along_plus_x() {
        let j = sq(10);
        let alpha = 0.3;
        let m = mean_spin(&yurke_state(j, alpha).unwrap());
        let expected = (2.0 * j.j() * (j.j() + 1.0)).sqrt() * alpha.sin() * alpha.cos();
        assert!((m[0] - expected).abs() < 1e-12);
        assert!(m[1].abs() < 1e-12 && m[2].abs() < 1e-12);
    }

    #[test]
    fn yurke_small_alpha_limit() {
        let j = sq(8);
        let y0 = eigenbasis(j, Axis::Y).vector(4);
        assert!(yurke_state(j, 1e-6).unwrap().fidelity(&y0) > 1.0 - 1e-10);
    }

    #[test]
    fn yurke_right_angle_has_no_mean_spin() {
        let m = mean_spin(&yurke_state(sq(6), FRAC_PI_2).unwrap());
        assert!(m.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn noon_structure() {
        assert_real_coeffs(&noon_state(sq(2)), &[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2], 0.0);
        let s = noon_state(sq(40));
        let nonzero = s.coeffs().iter().filter(|c| c.norm() != 0.0).count();
        assert_eq!(nonzero, 2);
        assert!(mean_spin(&s).iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn optimal_state_n2_equals_coherent() {
        let j = sq(2);
        assert_real_coeffs(&optimal_phase_state(j), &[0.5, FRAC_1_SQRT_2, 0.5], 1e-15);
    }

    #[test]
    fn optimal_state_exactly_normalized_and_positive() {
        for two_j in 1..60 {
            let s = optimal_phase_state(sq(two_j));
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            assert!(s.coeffs().iter().all(|c| c.re > 0.0 && c.im == 0.0));
        }
    }

    #[test]
    fn twist_generator_is_hermitian_and_u_matches_definition() {
        let j = sq(6);
        let h = two_axis_generator(j);
        assert!(h.is_hermitian());
        let (plus, minus) = ladder_about_x(j);
        let a = plus.matrix() * plus.matrix() - minus.matrix() * minus.matrix();
        let nu = 0.3;
        // Taylor series of exp(nu A / 8) as an independent reference.
        let x = a * Complex64::new(nu / 8.0, 0.0);
        let d = j.dim();
        let mut term = nalgebra::DMatrix::<Complex64>::identity(d, d);
        let mut sum = term.clone();
        for k in 1..40 {
            term = &term * &x / Complex64::new(k as f64, 0.0);
            sum += &term;
        }
        let u = HermitianExp::new(&h).unwrap().operator(nu);
        assert!(crate::spin::max_abs(&(u.matrix() - sum)) < 1e-12);
    }

    #[test]
    fn evolve_zero_is_coherent() {
        let j = sq(12);
        let s = evolve_2act(j, 0.0).unwrap();
        assert!(s.fidelity(&coherent_state(j)) > 1.0 - 1e-14);
        assert!(evolve_2act(j, -0.1).is_err());
    }

    #[test]
    fn evolved_states_stay_normalized_along_x() {
        let j = sq(20);
        let evo = TwistEvolution::new(j);
        for nu in [0.01, 0.1, 0.27, 0.6, 1.0] {
            let s = evo.state_at(nu).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            let m = mean_spin(&s);
            assert!(m[1].abs() < 1e-8 * j.j() && m[2].abs() < 1e-8 * j.j());
        }
    }

    #[test]
    fn twist_squeezes_y() {
        let j = sq(20);
        let s = evolve_2act(j, 0.1).unwrap();
        let vy = variance(&s, Axis::Y);
        let vz = variance(&s, Axis::Z);
        assert!(vy < j.j() / 2.0 && vz > j.j() / 2.0);
    }

    #[test]
    fn factory_outputs_are_canonical() {
        let j = sq(10);
        let kinds = [
            StateKind::Coherent,
            StateKind::Yurke { alpha: 0.2 },
            StateKind::Noon,
            StateKind::OptimalPhase,
            StateKind::TwoAxisEvolved { nu: 0.2 },
        ];
        for kind in kinds {
            let s = make_state(kind, j).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            let max = s.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
            let first = s.coeffs().iter().find(|c| c.norm() >= max * (1.0 - 1e-12)).unwrap();
            assert!(first.im == 0.0 && first.re > 0.0, "{kind}");
        }
    }

    #[test]
    fn make_state_dispatch() {
        let j = sq(2);
        assert_real_coeffs(
            &make_state(StateKind::Coherent, j).unwrap(),
            &[0.5, FRAC_1_SQRT_2, 0.5],
            1e-15,
        );
        let noon = make_state(StateKind::Noon, sq(40)).unwrap();
        assert_eq!(noon.coeffs().iter().filter(|c| c.norm() > 0.0).count(), 2);
        let j = sq(9);
        assert_eq!(
            make_state(StateKind::TwoAxisEvolved { nu: 0.0 }, j).unwrap(),
            make_state(StateKind::Coherent, j).unwrap()
        );
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("coherent".parse::<StateKind>().unwrap(), StateKind::Coherent);
        assert_eq!(
            "yurke".parse::<StateKind>().unwrap(),
            StateKind::Yurke {
                alpha: DEFAULT_YURKE_ALPHA
            }
        );
        assert_eq!(
            "Yurke(0.05)".parse::<StateKind>().unwrap(),
            StateKind::Yurke { alpha: 0.05 }
        );
        assert_eq!(
            "twist(0.25)".parse::<StateKind>().unwrap(),
            StateKind::TwoAxisEvolved { nu: 0.25 }
        );
        assert_eq!("pss".parse::<StateKind>().unwrap(), StateKind::PhaseSqueezed2ACT);
        assert!("twist".parse::<StateKind>().is_err());
        assert!("noon(3)".parse::<StateKind>().is_err());
        assert!("squeezed".parse::<StateKind>().is_err());
        for kind in [StateKind::Noon, StateKind::Yurke { alpha: 0.3 }] {
            assert_eq!(kind.to_string().parse::<StateKind>().unwrap(), kind);
        }
    }

    #[test]
    fn generator_commutes_with_jx_squared_structure() {
        // U(nu) preserves the parity of J_x: the generator has no matrix
        // elements between J_x eigenstates of different parity.
        let j = sq(8);
        let basis = eigenbasis(j, Axis::X);
        let h = two_axis_generator(j);
        let hx = basis.vectors.adjoint() * h.matrix() * &basis.vectors;
        for r in 0..j.dim() {
            for c in 0..j.dim() {
                if (r + c) % 2 == 1 {
                    assert!(hx[(r, c)].norm() < 1e-12);
                }
            }
        }
    }
}
