//! Minimal dense complex linear algebra.
//!
//! Matrices are small (`d ≤ 64`) and dense, so everything is row-major
//! `Vec<Complex64>` with straightforward loops. The two decompositions the rest
//! of the crate needs are Jacobi-based:
//!
//! - Hermitian eigenvalues via the real symmetric embedding
//!   `[[Re H, -Im H], [Im H, Re H]]`, whose spectrum is that of `H` with every
//!   eigenvalue doubled.
//! - A one-sided (Hestenes) Jacobi SVD of a real matrix given by columns, used
//!   for span ranks, orthogonal projections and minimum-norm least squares.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};

/// Numerical tolerances shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Eigenvalue floor: a density matrix may have eigenvalues down to `-eig_psd`.
    pub eig_psd: f64,
    /// Smallest admissible real part (negated) and largest admissible
    /// imaginary part of a KD quasiprobability.
    pub classicality: f64,
    /// Relative singular-value cutoff used for ranks.
    pub rank_rel: f64,
    /// Frobenius bound for reconstructions, traces and Hermiticity.
    pub recon: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig_psd: 1e-10,
            classicality: 1e-9,
            rank_rel: 1e-8,
            recon: 1e-9,
        }
    }
}

impl Tolerances {
    /// Returns `None` unless every field is strictly positive and finite.
    pub fn new(eig_psd: f64, classicality: f64, rank_rel: f64, recon: f64) -> Option<Self> {
        let t = Self {
            eig_psd,
            classicality,
            rank_rel,
            recon,
        };
        t.is_valid().then_some(t)
    }

    pub fn is_valid(&self) -> bool {
        [self.eig_psd, self.classicality, self.rank_rel, self.recon]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
    }
}

/// Dense `d × d` complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadDimension {
                d: 0,
                reason: "dimension must be at least 1",
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::BadEntryCount {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            entries: vec![Complex64::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::zero()
            }
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::zero()
            }
        })
    }

    /// Rank-one operator `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let lhs = self[(i, k)];
                if lhs.is_zero() {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += lhs * rhs.entries[k * d + j];
                }
            }
        }
        out
    }

    /// `M·v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|k| self[(i, k)] * v[k]).sum())
            .collect()
    }

    /// `M†·v`.
    pub fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|j| (0..self.dim).map(|k| self[(k, j)].conj() * v[k]).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        Float::sqrt(self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|M_ij - conj(M_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub(crate) fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation <= tol {
            Ok(())
        } else {
            Err(Error::NotHermitian { deviation })
        }
    }

    pub(crate) fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim == expected {
            Ok(())
        } else {
            Err(Error::MixedDimensions {
                expected,
                found: self.dim,
            })
        }
    }

    /// Eigenvalues of a Hermitian matrix in ascending order. Only the
    /// Hermitian part `(M + M†)/2` is used.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let d = self.dim;
        let n = 2 * d;
        let mut a = vec![0.0; n * n];
        for i in 0..d {
            for j in 0..d {
                let h = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                a[i * n + j] = h.re;
                a[(i + d) * n + (j + d)] = h.re;
                a[(i + d) * n + j] = h.im;
                a[i * n + (j + d)] = -h.im;
            }
        }
        let mut ev = symmetric_eigenvalues(a, n);
        ev.sort_by(f64::total_cmp);
        // Each eigenvalue of H appears twice in the embedding.
        ev.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
    }

    /// Real coordinates of a Hermitian matrix: the diagonal, then the upper
    /// triangle row-major with the real part before the imaginary part.
    pub fn hermitian_coordinates(&self) -> Vec<f64> {
        self.coordinates_with_weight(1.0)
    }

    /// Same layout as [`Self::hermitian_coordinates`], with off-diagonal
    /// coordinates scaled by `√2` so the Euclidean norm equals the Frobenius
    /// norm of the (Hermitian) matrix.
    pub fn isometric_coordinates(&self) -> Vec<f64> {
        self.coordinates_with_weight(core::f64::consts::SQRT_2)
    }

    fn coordinates_with_weight(&self, w: f64) -> Vec<f64> {
        let d = self.dim;
        let mut out = Vec::with_capacity(d * d);
        out.extend((0..d).map(|i| self[(i, i)].re));
        for i in 0..d {
            for j in i + 1..d {
                let z = self[(i, j)];
                out.push(w * z.re);
                out.push(w * z.im);
            }
        }
        out
    }

    /// Inverse of [`Self::isometric_coordinates`].
    pub fn from_isometric_coordinates(dim: usize, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), dim * dim);
        let mut m = Self::zeros(dim);
        for (i, &c) in coords[..dim].iter().enumerate() {
            m.entries[i * dim + i] = Complex64::new(c, 0.0);
        }
        let mut idx = dim;
        for i in 0..dim {
            for j in i + 1..dim {
                let z = Complex64::new(coords[idx], coords[idx + 1]) / core::f64::consts::SQRT_2;
                m.entries[i * dim + j] = z;
                m.entries[j * dim + i] = z.conj();
                idx += 2;
            }
        }
        m
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

/// `Σ_k w_k M_k`. Panics on an empty list or mixed dimensions.
pub fn linear_combination(weights: &[f64], matrices: &[ComplexMatrix]) -> ComplexMatrix {
    assert_eq!(weights.len(), matrices.len());
    let d = matrices.first().expect("empty combination").dim;
    let mut out = ComplexMatrix::zeros(d);
    for (w, m) in weights.iter().zip(matrices) {
        assert_eq!(m.dim, d, "mixed dimensions in combination");
        if *w == 0.0 {
            continue;
        }
        for (o, z) in out.entries.iter_mut().zip(&m.entries) {
            *o += z * *w;
        }
    }
    out
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.hermitian_deviation() <= tol
}

/// Hermitian within `tol.recon`, unit trace within `tol.recon`, and no
/// eigenvalue below `-tol.eig_psd`.
pub fn is_density_matrix(m: &ComplexMatrix, tol: &Tolerances) -> bool {
    if !is_hermitian(m, tol.recon) {
        return false;
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol.recon || tr.im.abs() > tol.recon {
        return false;
    }
    m.hermitian_eigenvalues()
        .first()
        .is_some_and(|&lo| lo >= -tol.eig_psd)
}

/// Dimension of the real span of a set of Hermitian matrices, counted as the
/// number of singular values of the coordinate matrix above
/// `tol.rank_rel × σ_max`.
pub fn real_span_rank(set: &[ComplexMatrix], tol: &Tolerances) -> Result<usize> {
    let Some(first) = set.first() else {
        return Ok(0);
    };
    let d = first.dim();
    for m in set {
        m.ensure_dim(d)?;
        m.ensure_hermitian(tol.recon)?;
    }
    let columns = set
        .iter()
        .map(ComplexMatrix::hermitian_coordinates)
        .collect();
    Ok(RealSvd::new(columns, false).rank(tol.rank_rel))
}

/// Eigenvalues of a real symmetric `n × n` matrix (row-major) by cyclic Jacobi
/// rotations. Unordered.
pub(crate) fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v = a[i * n + j] * a[i * n + j];
                total += v;
                if i != j {
                    off += v;
                }
            }
        }
        if off <= f64::EPSILON * f64::EPSILON * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + Float::sqrt(theta * theta + 1.0));
                let c = 1.0 / Float::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// One-sided Jacobi SVD of a real matrix supplied as columns: after
/// convergence `A·V = W` with mutually orthogonal columns `W`, so the singular
/// values are the column norms of `W` and the normalized nonzero columns form
/// an orthonormal basis of the range of `A`.
pub(crate) struct RealSvd {
    columns: Vec<Vec<f64>>,
    right: Option<Vec<Vec<f64>>>,
    norms: Vec<f64>,
}

impl RealSvd {
    pub(crate) fn new(mut columns: Vec<Vec<f64>>, accumulate_right: bool) -> Self {
        const MAX_SWEEPS: usize = 80;
        let k = columns.len();
        let mut right = accumulate_right.then(|| {
            (0..k)
                .map(|c| {
                    let mut e = vec![0.0; k];
                    e[c] = 1.0;
                    e
                })
                .collect::<Vec<_>>()
        });
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..k {
                for q in p + 1..k {
                    let (alpha, beta, gamma) = {
                        let (cp, cq) = (&columns[p], &columns[q]);
                        let mut alpha = 0.0;
                        let mut beta = 0.0;
                        let mut gamma = 0.0;
                        for (x, y) in cp.iter().zip(cq) {
                            alpha += x * x;
                            beta += y * y;
                            gamma += x * y;
                        }
                        (alpha, beta, gamma)
                    };
                    if gamma == 0.0 || gamma.abs() <= f64::EPSILON * Float::sqrt(alpha * beta) {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + Float::sqrt(1.0 + zeta * zeta));
                    let c = 1.0 / Float::sqrt(1.0 + t * t);
                    let s = c * t;
                    rotate_pair(&mut columns, p, q, c, s);
                    if let Some(v) = right.as_mut() {
                        rotate_pair(v, p, q, c, s);
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let norms = columns
            .iter()
            .map(|c| Float::sqrt(c.iter().map(|x| x * x).sum::<f64>()))
            .collect();
        Self {
            columns,
            right,
            norms,
        }
    }

    pub(crate) fn max_singular_value(&self) -> f64 {
        self.norms.iter().copied().fold(0.0, f64::max)
    }

    fn cutoff(&self, rank_rel: f64) -> f64 {
        rank_rel * self.max_singular_value()
    }

    pub(crate) fn rank(&self, rank_rel: f64) -> usize {
        let smax = self.max_singular_value();
        if smax == 0.0 {
            return 0;
        }
        let cut = self.cutoff(rank_rel);
        self.norms.iter().filter(|&&s| s > cut).count()
    }

    /// Orthonormal basis of the numerical range.
    pub(crate) fn range_basis(&self, rank_rel: f64) -> Vec<Vec<f64>> {
        if self.max_singular_value() == 0.0 {
            return Vec::new();
        }
        let cut = self.cutoff(rank_rel);
        self.columns
            .iter()
            .zip(&self.norms)
            .filter(|(_, &s)| s > cut)
            .map(|(c, &s)| c.iter().map(|x| x / s).collect())
            .collect()
    }

    /// Minimum-norm least-squares solution of `A·x ≈ b` (pseudo-inverse with
    /// the relative cutoff). Requires `accumulate_right`.
    pub(crate) fn solve_least_squares(&self, b: &[f64], rank_rel: f64) -> Vec<f64> {
        let v = self
            .right
            .as_ref()
            .expect("least squares needs the right singular vectors");
        let k = self.columns.len();
        let mut x = vec![0.0; k];
        if self.max_singular_value() == 0.0 {
            return x;
        }
        let cut = self.cutoff(rank_rel);
        for (c, (w, &s)) in self.columns.iter().zip(&self.norms).enumerate() {
            if s <= cut {
                continue;
            }
            // W = U·Σ, so uᵀb/σ = wᵀb/σ².
            let coef = dot(w, b) / (s * s);
            for (xi, vi) in x.iter_mut().zip(&v[c]) {
                *xi += coef * vi;
            }
        }
        x
    }
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
