//! Spherical Wigner functions `W(theta, phi) = Tr[rho Delta(theta, phi)]`.
//!
//! `theta` is the colatitude throughout; exported data only carry `cos(theta)`.
//! Grids are evaluated through the multipole expansion of `rho`, while
//! [`kernel_delta`] assembles the kernel matrix element by element.

pub mod cg;
pub mod harmonics;
pub mod quadrature;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spin::{DensityMatrix, SpinOperator, SpinQuantum, SpinState};
use cg::{clebsch_gordan, CgKey, CgTable};
use harmonics::{spherical_harmonic, LegendreTable};
use quadrature::gauss_legendre;

/// `Delta(theta, phi)` in the `J_z` basis.
pub fn kernel_delta(j: SpinQuantum, theta: f64, phi: f64) -> Result<SpinOperator> {
    let two_j = j.two_j();
    let dim = j.dim();
    let mut z = DMatrix::zeros(dim, dim);
    let lead = (4.0 * PI).sqrt() / dim as f64;
    for r in 0..dim {
        for s in 0..dim {
            let m = s as i32 - r as i32;
            let two_r = 2 * r as i32 - two_j as i32;
            let mut sum = Complex64::new(0.0, 0.0);
            for l in m.unsigned_abs()..=two_j {
                let cg = clebsch_gordan(CgKey::new(two_j, two_r, 2 * l, 2 * m, two_j, two_r + 2 * m))?;
                if cg != 0.0 {
                    sum += spherical_harmonic(l, m, theta, phi) * ((2 * l + 1) as f64).sqrt() * cg;
                }
            }
            z[(r, s)] = sum * lead;
        }
    }
    SpinOperator::from_matrix(j, z)
}

/// Phase state `(2J+1)^{-1/2} sum_mu e^{-i mu phi0} |mu>`.
pub fn phase_state(j: SpinQuantum, phi0: f64) -> SpinState {
    let amp = 1.0 / (j.dim() as f64).sqrt();
    let coeffs = j.mus().map(|mu| Complex64::from_polar(amp, -mu * phi0)).collect();
    SpinState::new(j, coeffs).expect("phase state has unit norm")
}

/// Node counts of a product grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub n_phi: usize,
    pub n_costheta: usize,
}

impl GridSpec {
    /// Smallest grid on which degree-`4J` integrands are integrated exactly:
    /// `4J + 1` azimuthal and `2J + 2` polar nodes.
    pub fn minimal(j: SpinQuantum) -> Self {
        GridSpec {
            n_phi: 2 * j.two_j() as usize + 1,
            n_costheta: j.two_j() as usize + 2,
        }
    }

    /// Finer grid for plotting.
    pub fn plotting(j: SpinQuantum) -> Self {
        let m = Self::minimal(j);
        GridSpec {
            n_phi: m.n_phi.max(128),
            n_costheta: m.n_costheta.max(64),
        }
    }

    fn check(&self, j: SpinQuantum) -> Result<()> {
        let m = Self::minimal(j);
        if self.n_phi < m.n_phi {
            return Err(Error::GridTooCoarse {
                required: m.n_phi,
                got: self.n_phi,
            });
        }
        if self.n_costheta < m.n_costheta {
            return Err(Error::GridTooCoarse {
                required: m.n_costheta,
                got: self.n_costheta,
            });
        }
        Ok(())
    }
}

/// Wigner function sampled on a trapezoid x Gauss–Legendre grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub j: SpinQuantum,
    /// `2 pi k / n_phi`, `k = 0..n_phi`.
    pub phi_nodes: Vec<f64>,
    /// Gauss–Legendre nodes, ascending.
    pub costheta_nodes: Vec<f64>,
    pub costheta_weights: Vec<f64>,
    /// `values[(i, k)] = W(costheta_nodes[i], phi_nodes[k])`.
    pub values: DMatrix<f64>,
    /// Largest imaginary part discarded during evaluation.
    pub max_imag: f64,
}

impl WignerGrid {
    /// Quadrature weight of node `(i, k)`.
    pub fn weight(&self, i: usize) -> f64 {
        self.costheta_weights[i] * 2.0 * PI / self.phi_nodes.len() as f64
    }

    /// Full weight matrix, same layout as `values`.
    pub fn weights(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.costheta_nodes.len(), self.phi_nodes.len(), |i, _| self.weight(i))
    }

    fn measure(&self) -> f64 {
        self.j.dim() as f64 / (4.0 * PI)
    }

    /// `(2J+1)/(4 pi) * integral of W`, equal to `Tr rho`.
    pub fn normalization(&self) -> f64 {
        self.measure()
            * (0..self.costheta_nodes.len())
                .map(|i| self.weight(i) * self.values.row(i).sum())
                .sum::<f64>()
    }
}

/// `rho` expanded in multipoles, ready for evaluation at any angle.
#[derive(Debug, Clone)]
pub struct WignerFunction {
    j: SpinQuantum,
    /// `coefficients[l][M + l]` including the kernel prefactor.
    coefficients: Vec<Vec<Complex64>>,
}

impl WignerFunction {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let table = CgTable::new(rho.j().two_j())?;
        Ok(Self::with_table(rho, &table))
    }

    /// Reuses a table built for the same `J`.
    pub fn with_table(rho: &DensityMatrix, table: &CgTable) -> Self {
        let j = rho.j();
        assert_eq!(table.two_j(), j.two_j(), "CG table built for another J");
        let dim = j.dim();
        let m = rho.matrix();
        let lead = (4.0 * PI).sqrt() / dim as f64;
        let coefficients = (0..dim)
            .map(|l| {
                let pref = lead * ((2 * l + 1) as f64).sqrt();
                (-(l as i64)..=l as i64)
                    .map(|mm| {
                        let mut a = Complex64::new(0.0, 0.0);
                        for r in 0..dim {
                            let s = r as i64 + mm;
                            if (0..dim as i64).contains(&s) {
                                a += m[(s as usize, r)] * table.get(l, mm, r);
                            }
                        }
                        a * pref
                    })
                    .collect()
            })
            .collect();
        WignerFunction { j, coefficients }
    }

    pub fn from_state(state: &SpinState) -> Result<Self> {
        Self::new(&DensityMatrix::pure(state))
    }

    pub fn j(&self) -> SpinQuantum {
        self.j
    }

    /// Per-`M` Fourier amplitudes at one polar node: `W(phi) = sum_M f_M e^{i M phi}`.
    fn fourier_at(&self, costheta: f64) -> Vec<Complex64> {
        let lmax = self.j.two_j() as usize;
        let legendre = LegendreTable::new(lmax, costheta);
        let mut f = vec![Complex64::new(0.0, 0.0); 2 * lmax + 1];
        for (l, row) in self.coefficients.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                let mm = k as i64 - l as i64;
                f[(mm + lmax as i64) as usize] += a * legendre.signed(l, mm);
            }
        }
        f
    }

    fn row(&self, costheta: f64, phi_nodes: &[f64]) -> (Vec<f64>, f64) {
        let lmax = self.j.two_j() as i64;
        let f = self.fourier_at(costheta);
        let mut max_imag: f64 = 0.0;
        let values = phi_nodes
            .iter()
            .map(|&phi| {
                let w: Complex64 = f
                    .iter()
                    .enumerate()
                    .map(|(k, fk)| fk * Complex64::from_polar(1.0, (k as i64 - lmax) as f64 * phi))
                    .sum();
                max_imag = max_imag.max(w.im.abs());
                w.re
            })
            .collect();
        (values, max_imag)
    }

    /// `W` at one point, imaginary round-off included.
    pub fn value(&self, theta: f64, phi: f64) -> Complex64 {
        let lmax = self.j.two_j() as i64;
        self.fourier_at(theta.cos())
            .iter()
            .enumerate()
            .map(|(k, fk)| fk * Complex64::from_polar(1.0, (k as i64 - lmax) as f64 * phi))
            .sum()
    }

    /// Evaluate on arbitrary `cos(theta)` rows and `phi` columns.
    pub fn sample(&self, costheta: &[f64], phi: &[f64]) -> (DMatrix<f64>, f64) {
        let rows: Vec<(Vec<f64>, f64)> = costheta.par_iter().map(|&x| self.row(x, phi)).collect();
        let max_imag = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        let values = DMatrix::from_fn(costheta.len(), phi.len(), |i, k| rows[i].0[k]);
        (values, max_imag)
    }

    pub fn grid(&self, spec: GridSpec) -> Result<WignerGrid> {
        spec.check(self.j)?;
        let phi_nodes: Vec<f64> = (0..spec.n_phi)
            .map(|k| 2.0 * PI * k as f64 / spec.n_phi as f64)
            .collect();
        let (costheta_nodes, costheta_weights) = gauss_legendre(spec.n_costheta);
        let (values, max_imag) = self.sample(&costheta_nodes, &phi_nodes);
        Ok(WignerGrid {
            j: self.j,
            phi_nodes,
            costheta_nodes,
            costheta_weights,
            values,
            max_imag,
        })
    }

    /// Rows uniform in `cos(theta)` from -1 to 1 inclusive and columns
    /// uniform in `phi` over `[-pi, pi]` inclusive, for equal-area plots.
    pub fn equal_area(&self, n_phi: usize, n_rows: usize) -> EqualAreaPanel {
        assert!(n_rows >= 2 && n_phi >= 2);
        let costheta: Vec<f64> = (0..n_rows)
            .map(|i| -1.0 + 2.0 * i as f64 / (n_rows - 1) as f64)
            .collect();
        let phi: Vec<f64> = (0..n_phi)
            .map(|k| -PI + 2.0 * PI * k as f64 / (n_phi - 1) as f64)
            .collect();
        let (values, max_imag) = self.sample(&costheta, &phi);
        EqualAreaPanel {
            phi,
            costheta,
            values,
            max_imag,
        }
    }
}

/// `W` on an equal-area `(phi, cos theta)` raster.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualAreaPanel {
    pub phi: Vec<f64>,
    pub costheta: Vec<f64>,
    pub values: DMatrix<f64>,
    pub max_imag: f64,
}

pub fn wigner_function(rho: &DensityMatrix, spec: GridSpec) -> Result<WignerGrid> {
    spec.check(rho.j())?;
    WignerFunction::new(rho)?.grid(spec)
}

pub fn wigner_of_state(state: &SpinState, spec: GridSpec) -> Result<WignerGrid> {
    wigner_function(&DensityMatrix::pure(state), spec)
}

/// `(2J+1)/(4 pi) * integral of W_a W_b`, equal to `Tr[rho_a rho_b]`.
pub fn overlap(a: &WignerGrid, b: &WignerGrid) -> Result<f64> {
    if a.j != b.j || a.phi_nodes != b.phi_nodes || a.costheta_nodes != b.costheta_nodes {
        return Err(Error::GridMismatch);
    }
    let s: f64 = (0..a.costheta_nodes.len())
        .map(|i| a.weight(i) * a.values.row(i).dot(&b.values.row(i)))
        .sum();
    Ok(a.measure() * s)
}

/// `(2J+1)/(4 pi) * integral of W dcos(theta)` at each `phi` node; integrates
/// to one over `phi`.
pub fn marginal_phi(grid: &WignerGrid) -> Vec<f64> {
    let w = DVector::from_vec(grid.costheta_weights.clone());
    let col = grid.values.tr_mul(&w);
    col.iter().map(|v| grid.measure() * v).collect()
}
