//! Kirkwood-Dirac quasiprobability tables.
//!
//! For an operator `ρ` the table is `Q_ij(ρ) = ⟨b_j|a_i⟩⟨a_i|ρ|b_j⟩`. Row sums
//! give `⟨a_i|ρ|a_i⟩`, column sums give `⟨b_j|ρ|b_j⟩`, and the grand total is
//! the trace.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::dft::BasisPair;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerances};

/// Hermiticity tolerance applied to operators entering a KD table.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Amplitudes with modulus at or below this count as vanishing.
pub const SUPPORT_TOL: f64 = 1e-8;

const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct KdTable {
    dim: usize,
    values: Vec<Complex64>,
    source_trace: f64,
}

impl KdTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.dim + j]
    }

    /// Row-major values.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn source_trace(&self) -> f64 {
        self.source_trace
    }

    pub fn total(&self) -> Complex64 {
        self.values.iter().sum()
    }

    pub fn row_sum(&self, i: usize) -> Complex64 {
        (0..self.dim).map(|j| self.get(i, j)).sum()
    }

    pub fn column_sum(&self, j: usize) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, j)).sum()
    }

    /// Largest `|Im Q_ij|`.
    pub fn max_imag_abs(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// `d · Re Q_ij`, row-major. For the pure classical projectors this is the
    /// 0/1 indicator of their support.
    pub(crate) fn scaled_real(&self) -> Vec<f64> {
        let d = self.dim as f64;
        self.values.iter().map(|z| d * z.re).collect()
    }
}

/// Outcome of a classicality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalityVerdict {
    pub classical: bool,
    pub min_real: f64,
    pub max_imag_abs: f64,
    /// Lexicographically smallest cell attaining the worst violation, when the
    /// table is not classical.
    pub witness: Option<(usize, usize)>,
}

pub fn kd_table(rho: &ComplexMatrix, pair: &BasisPair) -> Result<KdTable> {
    let d = pair.dim();
    rho.ensure_dim(d)?;
    rho.ensure_hermitian(HERMITIAN_TOL)?;
    let u = pair.transition();
    let rho_u = rho.matmul(u);
    let values = (0..d)
        .flat_map(|i| {
            let rho_u = &rho_u;
            (0..d).map(move |j| u[(i, j)].conj() * rho_u[(i, j)])
        })
        .collect();
    Ok(KdTable {
        dim: d,
        values,
        source_trace: rho.trace().re,
    })
}

pub fn classicality(table: &KdTable, tol: &Tolerances) -> ClassicalityVerdict {
    let mut min_real = f64::INFINITY;
    let mut max_imag_abs = 0.0f64;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_cell = (0, 0);
    for i in 0..table.dim {
        for j in 0..table.dim {
            let z = table.get(i, j);
            min_real = min_real.min(z.re);
            max_imag_abs = max_imag_abs.max(z.im.abs());
            let violation = (-z.re).max(z.im.abs());
            if violation > worst {
                worst = violation;
                worst_cell = (i, j);
            }
        }
    }
    let classical = min_real >= -tol.classicality && max_imag_abs <= tol.classicality;
    ClassicalityVerdict {
        classical,
        min_real,
        max_imag_abs,
        witness: (!classical).then_some(worst_cell),
    }
}

fn ensure_normalized(psi: &[Complex64]) -> Result<()> {
    let norm = Float::sqrt(psi.iter().map(|z| z.norm_sqr()).sum::<f64>());
    if (norm - 1.0).abs() <= NORMALIZATION_TOL {
        Ok(())
    } else {
        Err(Error::NotNormalized { norm })
    }
}

/// Numbers of nonvanishing coefficients `(n_a, n_b)` of `ψ` in the two bases.
pub fn support_counts(psi: &[Complex64], pair: &BasisPair, tol: f64) -> Result<(usize, usize)> {
    if psi.len() != pair.dim() {
        return Err(Error::MixedDimensions {
            expected: pair.dim(),
            found: psi.len(),
        });
    }
    ensure_normalized(psi)?;
    let n_a = psi.iter().filter(|z| z.norm() > tol).count();
    let n_b = pair
        .to_b_coefficients(psi)
        .iter()
        .filter(|z| z.norm() > tol)
        .count();
    Ok((n_a, n_b))
}

/// Pure-state criterion: `ψ` is KD classical iff `n_a(ψ)·n_b(ψ) = d`.
pub fn pure_classicality_criterion(
    psi: &[Complex64],
    pair: &BasisPair,
    _tol: &Tolerances,
) -> Result<bool> {
    let (n_a, n_b) = support_counts(psi, pair, SUPPORT_TOL)?;
    Ok(n_a * n_b == pair.dim())
}

/// `F` is KD real when every `Q_ij(F)` is real (within `tol.classicality`).
pub fn is_kd_real(f: &ComplexMatrix, pair: &BasisPair, tol: &Tolerances) -> Result<bool> {
    let table = kd_table(f, pair)?;
    Ok(table.max_imag_abs() <= tol.classicality)
}
