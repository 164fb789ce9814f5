//! The computational basis `a` and its Fourier partner `b`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// `ω_n^k = exp(2πi·k/n)`, with `k` reduced modulo `n` before the exponential.
pub fn root_of_unity(n: usize, k: i64) -> Complex64 {
    let r = k.rem_euclid(n as i64) as f64;
    Complex64::cis(TAU * r / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    A,
    B,
}

/// Two orthonormal bases related by the DFT: `U_ij = ⟨a_i|b_j⟩ = ω_d^{ij}/√d`.
/// The `a` basis is the standard basis and `|b_j⟩` is column `j` of `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisPair {
    dim: usize,
    transition: ComplexMatrix,
}

/// Panics if `d == 0`.
pub fn dft_pair(d: usize) -> BasisPair {
    assert!(d >= 1, "dimension must be at least 1");
    let norm = 1.0 / Float::sqrt(d as f64);
    let transition = ComplexMatrix::from_fn(d, |i, j| root_of_unity(d, (i * j % d) as i64) * norm);
    BasisPair { dim: d, transition }
}

impl BasisPair {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transition(&self) -> &ComplexMatrix {
        &self.transition
    }

    /// `|b_j⟩` in the `a` basis.
    pub fn b_vector(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.transition[(i, j)]).collect()
    }

    pub fn a_vector(&self, i: usize) -> Vec<Complex64> {
        let mut v = alloc::vec![Complex64::new(0.0, 0.0); self.dim];
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    /// Coefficients `⟨b_j|ψ⟩` of a state given in the `a` basis.
    pub fn to_b_coefficients(&self, psi: &[Complex64]) -> Vec<Complex64> {
        self.transition.apply_adjoint(psi)
    }

    /// `U†·M·U`: the matrix of `M` in the `b` basis, `G_kj = ⟨b_k|M|b_j⟩`.
    pub fn to_b_basis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = &self.transition;
        u.adjoint().matmul(&m.matmul(u))
    }

    /// `U·G·U†`: inverse of [`Self::to_b_basis`].
    pub fn from_b_basis(&self, g: &ComplexMatrix) -> ComplexMatrix {
        let u = &self.transition;
        u.matmul(&g.matmul(&u.adjoint()))
    }
}

/// Rank-one projector onto `|a_index⟩` or `|b_index⟩`.
pub fn basis_projector(pair: &BasisPair, which: Basis, index: usize) -> Result<ComplexMatrix> {
    let d = pair.dim();
    if index >= d {
        return Err(Error::IndexOutOfRange { index, bound: d });
    }
    Ok(match which {
        Basis::A => ComplexMatrix::outer(&pair.a_vector(index)),
        Basis::B => ComplexMatrix::outer(&pair.b_vector(index)),
    })
}
