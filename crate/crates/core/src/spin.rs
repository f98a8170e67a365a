//! Finite-dimensional angular-momentum algebra for a single spin-J irrep.
//!
//! Matrices are dense and indexed by `mu` ascending from `-J` to `+J`. The
//! `J_z` eigenbasis is the computational basis throughout the crate.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when verifying the Hermitian flag of an operator.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance used when verifying the unitary flag of an operator.
pub const UNITARY_TOL: f64 = 1e-10;
/// Allowed deviation of `sum |c|^2` from one for a [`SpinState`].
pub const NORM_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Total spin `J`, stored as the integer `2J` so half-integer spins are exact.
///
/// For an ensemble of `N` two-level systems in the symmetric sector, `N = 2J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SpinQuantum {
    two_j: u32,
}

impl SpinQuantum {
    pub fn new(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidSpin(two_j));
        }
        Ok(Self { two_j })
    }

    /// The collective spin of `n` two-level systems.
    pub fn from_particles(n: u32) -> Result<Self> {
        Self::new(n)
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    pub fn n_particles(self) -> u32 {
        self.two_j
    }

    /// Magnetic quantum number for coefficient index `index`.
    pub fn mu(self, index: usize) -> f64 {
        index as f64 - self.j()
    }

    pub fn mus(self) -> impl Iterator<Item = f64> {
        (0..self.dim()).map(move |i| self.mu(i))
    }

    /// `<mu+1| J_+ |mu>` for `mu` at `index`, i.e. `sqrt((J - mu)(J + mu + 1))`.
    ///
    /// Evaluated from the doubled integers so it is exact up to the final sqrt.
    pub fn raising_coefficient(self, index: usize) -> f64 {
        let two_j = self.two_j as i64;
        let two_mu = 2 * index as i64 - two_j;
        let prod = (two_j - two_mu) * (two_j + two_mu + 2);
        (prod as f64).sqrt() / 2.0
    }
}

impl TryFrom<u32> for SpinQuantum {
    type Error = Error;

    fn try_from(two_j: u32) -> Result<Self> {
        Self::new(two_j)
    }
}

impl From<SpinQuantum> for u32 {
    fn from(j: SpinQuantum) -> u32 {
        j.two_j
    }
}

impl fmt::Display for SpinQuantum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j % 2 == 0 {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Perpendicular axis whose adjacent-level matrix elements are made real
    /// positive when fixing eigenvector phases (see [`eigenbasis`]).
    fn phase_reference(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
            Axis::Z => Axis::X,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        };
        f.write_str(s)
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidParameter(format!("unknown axis '{other}'"))),
        }
    }
}

/// A normalized pure state in the `J_z` eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    j: SpinQuantum,
    coeffs: DVector<Complex64>,
}

impl SpinState {
    /// Wraps coefficients that are already normalized to within [`NORM_TOL`].
    pub fn new(j: SpinQuantum, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(j, DVector::from_vec(coeffs))
    }

    pub fn from_vector(j: SpinQuantum, coeffs: DVector<Complex64>) -> Result<Self> {
        if coeffs.len() != j.dim() {
            return Err(Error::DimensionMismatch {
                expected: j.dim(),
                got: coeffs.len(),
            });
        }
        let norm_sqr = coeffs.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { j, coeffs })
    }

    /// Normalizes `coeffs`; fails on a zero vector.
    pub fn from_unnormalized(j: SpinQuantum, coeffs: DVector<Complex64>) -> Result<Self> {
        if coeffs.len() != j.dim() {
            return Err(Error::DimensionMismatch {
                expected: j.dim(),
                got: coeffs.len(),
            });
        }
        let norm = coeffs.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self {
            j,
            coeffs: coeffs / Complex64::new(norm, 0.0),
        })
    }

    pub fn from_real(j: SpinQuantum, coeffs: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|&c| Complex64::new(c, 0.0)));
        Self::from_unnormalized(j, v)
    }

    /// The `J_z` eigenstate `|J, mu>` with `mu = index - J`.
    pub fn basis_state(j: SpinQuantum, index: usize) -> Result<Self> {
        if index >= j.dim() {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {}",
                j.dim()
            )));
        }
        let mut v = DVector::from_element(j.dim(), ZERO);
        v[index] = ONE;
        Ok(Self { j, coeffs: v })
    }

    pub fn j(&self) -> SpinQuantum {
        self.j
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, index: usize) -> Complex64 {
        self.coeffs[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.norm_squared()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SpinState) -> Complex64 {
        self.coeffs.dotc(&other.coeffs)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &SpinState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `<self| A |self>`.
    pub fn expectation(&self, op: &SpinOperator) -> Complex64 {
        self.coeffs.dotc(&(op.matrix() * &self.coeffs))
    }

    /// Applies a (unitary) operator and renormalizes to absorb round-off drift.
    pub fn evolve(&self, op: &SpinOperator) -> Result<SpinState> {
        if op.j() != self.j {
            return Err(Error::DimensionMismatch {
                expected: self.j.dim(),
                got: op.j().dim(),
            });
        }
        SpinState::from_unnormalized(self.j, op.matrix() * &self.coeffs)
    }

    /// Multiplies by the global phase that makes the largest-magnitude
    /// coefficient real positive (ties resolved towards the lowest index).
    pub fn canonicalize_phase(mut self) -> Self {
        fix_phase_largest(self.coeffs.as_mut_slice());
        self
    }
}

/// Index of the largest-magnitude entry, ties (to relative 1e-12) broken
/// towards the lowest index.
fn largest_index(v: &[Complex64]) -> Option<usize> {
    let max = v.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if max == 0.0 {
        return None;
    }
    v.iter().position(|z| z.norm() >= max * (1.0 - 1e-12))
}

pub(crate) fn fix_phase_largest(v: &mut [Complex64]) {
    if let Some(k) = largest_index(v) {
        let phase = v[k].conj() / v[k].norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
        v[k] = Complex64::new(v[k].re, 0.0);
    }
}

/// Dense operator on the spin-J space with verified structure flags.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperator {
    j: SpinQuantum,
    matrix: DMatrix<Complex64>,
    hermitian: bool,
    unitary: bool,
}

impl SpinOperator {
    pub fn from_matrix(j: SpinQuantum, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != j.dim() || matrix.ncols() != j.dim() {
            return Err(Error::DimensionMismatch {
                expected: j.dim(),
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        let hermitian = hermitian_defect(&matrix) < HERMITIAN_TOL;
        let unitary = unitary_defect(&matrix) < UNITARY_TOL;
        Ok(Self {
            j,
            matrix,
            hermitian,
            unitary,
        })
    }

    pub fn j(&self) -> SpinQuantum {
        self.j
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn adjoint(&self) -> SpinOperator {
        SpinOperator {
            j: self.j,
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    /// `[self, other]` as a raw matrix.
    pub fn commutator(&self, other: &SpinOperator) -> DMatrix<Complex64> {
        &self.matrix * &other.matrix - &other.matrix * &self.matrix
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.matrix * v
    }
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

pub fn unitary_defect(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - DMatrix::identity(n, n)))
}

fn raising_matrix(j: SpinQuantum) -> DMatrix<Complex64> {
    let d = j.dim();
    let mut m = DMatrix::from_element(d, d, ZERO);
    for i in 0..d - 1 {
        m[(i + 1, i)] = Complex64::new(j.raising_coefficient(i), 0.0);
    }
    m
}

fn component_matrix(j: SpinQuantum, axis: Axis) -> DMatrix<Complex64> {
    let d = j.dim();
    match axis {
        Axis::Z => DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::new(j.mu(r), 0.0)
            } else {
                ZERO
            }
        }),
        Axis::X => {
            let jp = raising_matrix(j);
            (&jp + jp.adjoint()) * Complex64::new(0.5, 0.0)
        }
        Axis::Y => {
            let jp = raising_matrix(j);
            (&jp - jp.adjoint()) * Complex64::new(0.0, -0.5)
        }
    }
}

/// The spin-J matrix of `J_x`, `J_y` or `J_z` in the `J_z` eigenbasis
/// (Condon-Shortley phases).
pub fn angular_momentum_operator(j: SpinQuantum, axis: Axis) -> SpinOperator {
    SpinOperator {
        j,
        matrix: component_matrix(j, axis),
        hermitian: true,
        unitary: false,
    }
    .reverified()
}

impl SpinOperator {
    fn reverified(self) -> Self {
        let hermitian = hermitian_defect(&self.matrix) < HERMITIAN_TOL;
        let unitary = unitary_defect(&self.matrix) < UNITARY_TOL;
        Self {
            hermitian,
            unitary,
            ..self
        }
    }
}

/// Raising and lowering operators about the x axis, `J_± = J_y ± i J_z`.
pub fn ladder_about_x(j: SpinQuantum) -> (SpinOperator, SpinOperator) {
    let jy = component_matrix(j, Axis::Y);
    let jz = component_matrix(j, Axis::Z);
    let plus = &jy + &jz * I;
    let minus = &jy - &jz * I;
    let plus = SpinOperator {
        j,
        matrix: plus,
        hermitian: false,
        unitary: false,
    }
    .reverified();
    let minus = SpinOperator {
        j,
        matrix: minus,
        hermitian: false,
        unitary: false,
    }
    .reverified();
    (plus, minus)
}

/// Eigenvectors of `J_axis` ordered by ascending eigenvalue `mu`.
#[derive(Debug, Clone)]
pub struct Eigenbasis {
    pub j: SpinQuantum,
    pub axis: Axis,
    /// Computed eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `mu = k - J`, in the `J_z` basis.
    pub vectors: DMatrix<Complex64>,
}

impl Eigenbasis {
    pub fn vector(&self, k: usize) -> SpinState {
        SpinState {
            j: self.j,
            coeffs: self.vectors.column(k).into_owned(),
        }
    }

    /// Amplitudes `<J, mu|_axis psi>` for every `mu`, ascending.
    pub fn coefficients_of(&self, state: &SpinState) -> Vec<Complex64> {
        (self.vectors.adjoint() * state.coeffs()).iter().copied().collect()
    }

    /// Largest deviation of a computed eigenvalue from the exact `mu`.
    pub fn eigenvalue_error(&self) -> f64 {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &e)| (e - self.j.mu(k)).abs())
            .fold(0.0, f64::max)
    }
}

/// Orthonormal eigenbasis of `J_axis`.
///
/// Phases are fixed deterministically: the `mu = -J` vector has its
/// largest-magnitude component real positive, and every subsequent vector is
/// chosen so that `<mu+1| J_ref |mu>` is real positive, with `J_ref` equal to
/// `J_x` for the z and y axes and `J_y` for the x axis. For the z axis this is
/// the usual Condon-Shortley basis; for x and y it is a Condon-Shortley basis in
/// a rotated frame. With this choice every real, `mu -> -mu` symmetric state in
/// the z basis has real amplitudes in all three bases.
pub fn eigenbasis(j: SpinQuantum, axis: Axis) -> Eigenbasis {
    let d = j.dim();
    let generator = component_matrix(j, axis);
    let eig = SymmetricEigen::new(generator);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);

    {
        let mut first: Vec<Complex64> = vectors.column(0).iter().copied().collect();
        fix_phase_largest(&mut first);
        vectors.set_column(0, &DVector::from_vec(first));
    }
    let reference = component_matrix(j, axis.phase_reference());
    for k in 1..d {
        let prev = vectors.column(k - 1).into_owned();
        let element = vectors.column(k).dotc(&(&reference * prev));
        let norm = element.norm();
        if norm > 0.0 {
            let phase = element / norm;
            let col = vectors.column(k) * phase;
            vectors.set_column(k, &col);
        }
    }

    Eigenbasis {
        j,
        axis,
        eigenvalues,
        vectors,
    }
}

/// Cached spectral decomposition of a Hermitian generator `H`, used to
/// evaluate `exp(-i s H)` for many scales `s`.
#[derive(Debug, Clone)]
pub struct HermitianExp {
    j: SpinQuantum,
    eigenvalues: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl HermitianExp {
    pub fn new(generator: &SpinOperator) -> Result<Self> {
        let defect = hermitian_defect(generator.matrix());
        if defect >= HERMITIAN_TOL {
            return Err(Error::NonHermitianGenerator(defect));
        }
        let eig = SymmetricEigen::new(generator.matrix().clone());
        Ok(Self {
            j: generator.j(),
            eigenvalues: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    fn phases(&self, scale: f64) -> DVector<Complex64> {
        self.eigenvalues
            .map(|e| Complex64::from_polar(1.0, -scale * e))
    }

    /// `exp(-i scale H)` as an operator.
    pub fn operator(&self, scale: f64) -> SpinOperator {
        let phases = self.phases(scale);
        let mut scaled = self.vectors.clone();
        for (mut col, p) in scaled.column_iter_mut().zip(phases.iter()) {
            col *= *p;
        }
        let matrix = scaled * self.vectors.adjoint();
        SpinOperator {
            j: self.j,
            matrix,
            hermitian: false,
            unitary: false,
        }
        .reverified()
    }

    /// `exp(-i scale H) v` without forming the matrix.
    pub fn apply(&self, scale: f64, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut w = self.vectors.adjoint() * v;
        for (wk, p) in w.iter_mut().zip(self.phases(scale).iter()) {
            *wk *= *p;
        }
        &self.vectors * w
    }
}

/// `exp(-i scale G)` for a Hermitian generator `G`.
pub fn unitary_exp(generator: &SpinOperator, scale: f64) -> Result<SpinOperator> {
    Ok(HermitianExp::new(generator)?.operator(scale))
}

/// `exp(-i varphi J_z) |psi>`: multiplies `c_mu` by `exp(-i mu varphi)`.
pub fn rotate_about_z(state: &SpinState, varphi: f64) -> SpinState {
    let j = state.j();
    let coeffs = DVector::from_iterator(
        j.dim(),
        state
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex64::from_polar(1.0, -j.mu(i) * varphi)),
    );
    SpinState { j, coeffs }
}

/// Unit-trace Hermitian density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    j: SpinQuantum,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(j: SpinQuantum, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != j.dim() || matrix.ncols() != j.dim() {
            return Err(Error::DimensionMismatch {
                expected: j.dim(),
                got: matrix.nrows(),
            });
        }
        let defect = hermitian_defect(&matrix);
        if defect > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "density matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        Ok(Self { j, matrix })
    }

    pub fn pure(state: &SpinState) -> Self {
        let c = state.coeffs();
        Self {
            j: state.j(),
            matrix: c * c.adjoint(),
        }
    }

    pub fn maximally_mixed(j: SpinQuantum) -> Self {
        let d = j.dim();
        Self {
            j,
            matrix: DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        }
    }

    /// `sum_k p_k |psi_k><psi_k|`; the weights must be non-negative and sum to one.
    pub fn mixture(components: &[(f64, SpinState)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let j = first.1.j();
        let d = j.dim();
        let mut matrix = DMatrix::from_element(d, d, ZERO);
        let mut total = 0.0;
        for (p, state) in components {
            if *p < 0.0 || state.j() != j {
                return Err(Error::InvalidParameter(
                    "mixture weights must be non-negative and share J".into(),
                ));
            }
            let c = state.coeffs();
            matrix += c * c.adjoint() * Complex64::new(*p, 0.0);
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights sum to {total}"
            )));
        }
        Ok(Self { j, matrix })
    }

    pub fn j(&self) -> SpinQuantum {
        self.j
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `Re Tr[rho sigma]`.
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum()
    }
}

impl From<&SpinState> for DensityMatrix {
    fn from(state: &SpinState) -> Self {
        DensityMatrix::pure(state)
    }
}
