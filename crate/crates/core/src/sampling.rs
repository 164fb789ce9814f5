//! Seeded samplers: hull mixtures, KD-real perturbations of `I/d`, and
//! Ginibre states. Every sampler draws only from the supplied generator.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::dft::BasisPair;
use crate::error::{Error, Result};
use crate::kd::kd_table;
use crate::kd_real::kd_real_basis;
use crate::linalg::{dot, linear_combination, ComplexMatrix};

const ZERO_DIRECTION: f64 = 1e-12;
const BASIS_DROP: f64 = 1e-10;

/// Uniform point of the probability simplex with `n` vertices.
pub fn sample_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

/// `Σ c_k P_k` with flat-simplex weights `c`.
pub fn sample_hull_point<R: Rng + ?Sized>(
    rng: &mut R,
    projectors: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    if projectors.is_empty() {
        return Err(Error::EmptySet);
    }
    let weights = sample_simplex(rng, projectors.len());
    Ok(linear_combination(&weights, projectors))
}

/// Frobenius-orthonormal basis of the traceless KD-real operators at
/// dimension `d`.
pub fn traceless_kd_real_basis(d: usize) -> Vec<ComplexMatrix> {
    let identity = ComplexMatrix::identity(d);
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for b in kd_real_basis(d) {
        let shift = b.trace().re / d as f64;
        let traceless = &b - &identity.scale(shift);
        let mut v = traceless.isometric_coordinates();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for u in &ortho {
                let c = dot(u, &v);
                v.iter_mut().zip(u).for_each(|(x, ui)| *x -= c * ui);
            }
        }
        let norm = Float::sqrt(dot(&v, &v));
        if norm > BASIS_DROP {
            v.iter_mut().for_each(|x| *x /= norm);
            ortho.push(v);
        }
    }
    ortho
        .iter()
        .map(|v| ComplexMatrix::from_isometric_coordinates(d, v))
        .collect()
}

/// Largest `x` keeping `I/d + x·F` positive semidefinite and its KD table
/// nonnegative, for a traceless KD-real `F`:
/// `min{1/(d·f_max), 1/(d²·max_ij |Q_ij(F)|)}` with `f_max` the largest
/// eigenvalue magnitude of `F`.
pub fn perturbation_bound(f: &ComplexMatrix, pair: &BasisPair) -> Result<f64> {
    let d = pair.dim() as f64;
    let f_max = f
        .hermitian_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    let q_max = kd_table(f, pair)?
        .values()
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.norm()));
    if f_max <= ZERO_DIRECTION || q_max <= ZERO_DIRECTION {
        return Err(Error::ZeroDirection);
    }
    Ok((1.0 / (d * f_max)).min(1.0 / (d * d * q_max)))
}

/// `I/d + x·F`.
pub fn perturbed_state(f: &ComplexMatrix, x: f64) -> ComplexMatrix {
    let d = f.dim();
    &ComplexMatrix::identity(d).scale(1.0 / d as f64) + &f.scale(x)
}

/// A random direction `F = Σ g_k B_k` with standard normal `g_k`.
pub fn sample_direction<R: Rng + ?Sized>(
    rng: &mut R,
    basis: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    if basis.is_empty() {
        return Err(Error::ZeroDirection);
    }
    let coefficients: Vec<f64> = (0..basis.len())
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(linear_combination(&coefficients, basis))
}

/// `I/d + x·F` with `F` drawn by [`sample_direction`] from `basis` (traceless
/// KD-real operators) and `x` uniform on `[0, x₊]`.
pub fn sample_kd_boundary<R: Rng + ?Sized>(
    rng: &mut R,
    pair: &BasisPair,
    basis: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    let f = sample_direction(rng, basis)?;
    let bound = perturbation_bound(&f, pair)?;
    let x = rng.random::<f64>() * bound;
    Ok(perturbed_state(&f, x))
}

/// `G·G† / tr(G·G†)` with `G` a complex Gaussian `d × d` matrix.
pub fn ginibre_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = g.matmul(&g.adjoint());
    let trace = rho.trace().re;
    rho.scale(1.0 / trace)
}
