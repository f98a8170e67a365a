//! Orthonormal spherical harmonics with the Condon–Shortley phase.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Normalized associated Legendre values `Y_lm(theta, 0)` for `0 <= m <= l <= lmax`
/// at one `x = cos(theta)`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    lmax: usize,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(lmax: usize, x: f64) -> Self {
        let sin = (1.0 - x * x).max(0.0).sqrt();
        let mut values = vec![0.0; (lmax + 1) * (lmax + 2) / 2];
        let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
        let mut diag = 1.0 / (4.0 * PI).sqrt();
        for m in 0..=lmax {
            if m > 0 {
                let mf = m as f64;
                diag *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin;
            }
            values[idx(m, m)] = diag;
            if m == lmax {
                break;
            }
            let mf = m as f64;
            values[idx(m + 1, m)] = (2.0 * mf + 3.0).sqrt() * x * diag;
            for l in m + 2..=lmax {
                let lf = l as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
                values[idx(l, m)] = a * (x * values[idx(l - 1, m)] - b * values[idx(l - 2, m)]);
            }
        }
        LegendreTable { lmax, values }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// `Y_lm(theta, 0)`, `m >= 0`.
    pub fn get(&self, l: usize, m: usize) -> f64 {
        debug_assert!(m <= l && l <= self.lmax);
        self.values[l * (l + 1) / 2 + m]
    }

    /// `Y_lm(theta, 0)` for either sign of `m`.
    pub fn signed(&self, l: usize, m: i64) -> f64 {
        let v = self.get(l, m.unsigned_abs() as usize);
        if m < 0 && m % 2 != 0 {
            -v
        } else {
            v
        }
    }
}

/// `Y_lm(theta, phi)` with `theta` the colatitude.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    assert!(m.unsigned_abs() <= l, "|m| > l");
    let table = LegendreTable::new(l as usize, theta.cos());
    Complex64::from_polar(1.0, f64::from(m) * phi) * table.signed(l as usize, i64::from(m))
}
