//! Structure of KD-real operators.
//!
//! A Hermitian `F` has a real KD table exactly when its entries are invariant
//! along the shifted diagonals, `F_{i,i+k} = F_{i-k,i}` (indices mod `d`). With
//! `g = gcd(k, d)` the shift by `k` splits the cells `(i, i+k)` into `g` orbits
//! of length `d/g`; Hermiticity pairs the orbit for `k` with the transposed
//! orbit for `d - k`. Each such pair is one category carrying a single complex
//! value, except when `2k = d`, where the orbit is its own transpose and the
//! value is forced real.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dft::BasisPair;
use crate::error::Result;
use crate::kd::{kd_table, HERMITIAN_TOL};
use crate::linalg::{ComplexMatrix, RealSvd, Tolerances};

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `|F_{i,(i+k)} - F_{(i-k),i}| ≤ tol` for all `i, k`.
pub fn kd_real_condition(f: &ComplexMatrix, tol: f64) -> Result<bool> {
    f.ensure_hermitian(HERMITIAN_TOL)?;
    let d = f.dim();
    for k in 1..d {
        for i in 0..d {
            let lhs = f[(i, (i + k) % d)];
            let rhs = f[((i + d - k) % d, i)];
            if (lhs - rhs).norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The same shift condition applied to `⟨b_k|G|b_j⟩`.
pub fn b_side_condition(g: &ComplexMatrix, pair: &BasisPair, tol: f64) -> Result<bool> {
    g.ensure_dim(pair.dim())?;
    g.ensure_hermitian(HERMITIAN_TOL)?;
    kd_real_condition(&pair.to_b_basis(g), tol)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    /// `min(k, d - k)` for the generating shift.
    pub step: usize,
    /// Smallest row among `cells`; `cells` are the rows `i ≡ residue (mod gcd)`.
    pub residue: usize,
    pub cells: Vec<(usize, usize)>,
    /// Transposed orbit; empty for real categories, whose orbit is closed
    /// under transposition.
    pub conjugate_cells: Vec<(usize, usize)>,
    pub is_real: bool,
}

impl Category {
    pub fn label(&self) -> (usize, usize) {
        (self.step, self.residue)
    }

    /// Real parameters a KD-real operator spends on this category.
    pub fn parameter_count(&self) -> usize {
        if self.is_real {
            1
        } else {
            2
        }
    }

    pub fn contains(&self, cell: (usize, usize)) -> bool {
        self.cells.contains(&cell) || self.conjugate_cells.contains(&cell)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryPartition {
    pub dim: usize,
    /// Ordered by `(step, residue)`.
    pub categories: Vec<Category>,
    pub diagonal: Vec<(usize, usize)>,
}

impl EntryPartition {
    /// Number of categories including the diagonal one.
    pub fn total_categories(&self) -> usize {
        self.categories.len() + 1
    }

    /// Index into `categories` of an off-diagonal cell.
    pub fn category_of(&self, cell: (usize, usize)) -> Option<usize> {
        self.categories.iter().position(|c| c.contains(cell))
    }

    pub fn parameter_count(&self) -> usize {
        self.diagonal.len()
            + self
                .categories
                .iter()
                .map(Category::parameter_count)
                .sum::<usize>()
    }
}

/// Gcd-orbit partition of the matrix cells forced equal or conjugate for
/// KD-real operators. Defined for every `d ≥ 1` (at `d = 1` only the diagonal
/// remains).
pub fn entry_partition(d: usize) -> EntryPartition {
    let mut categories = Vec::new();
    for k in 1..=d / 2 {
        let g = gcd(k, d);
        let is_real = 2 * k == d;
        for r in 0..g {
            let rows = (r..d).step_by(g);
            let cells: Vec<_> = rows.clone().map(|i| (i, (i + k) % d)).collect();
            let conjugate_cells = if is_real {
                Vec::new()
            } else {
                cells.iter().map(|&(i, j)| (j, i)).collect()
            };
            categories.push(Category {
                step: k,
                residue: r,
                cells,
                conjugate_cells,
                is_real,
            });
        }
    }
    EntryPartition {
        dim: d,
        categories,
        diagonal: (0..d).map(|i| (i, i)).collect(),
    }
}

/// Dimension of the real space of KD-real operators, counted from the
/// partition; equals `d + Σ_{k=1}^{d-1} gcd(k, d)`.
pub fn kd_real_dimension(d: usize) -> usize {
    entry_partition(d).parameter_count()
}

/// A real basis of KD-real operators, one element per partition parameter:
/// `E_ii` for the diagonal, and for each category the real and imaginary unit
/// patterns (only the real one for real categories).
pub fn kd_real_basis(d: usize) -> Vec<ComplexMatrix> {
    let partition = entry_partition(d);
    let mut basis = Vec::with_capacity(partition.parameter_count());
    for &(i, _) in &partition.diagonal {
        let mut e = ComplexMatrix::zeros(d);
        e[(i, i)] = Complex64::new(1.0, 0.0);
        basis.push(e);
    }
    for cat in &partition.categories {
        let mut re = ComplexMatrix::zeros(d);
        for &(i, j) in &cat.cells {
            re[(i, j)] = Complex64::new(1.0, 0.0);
        }
        for &(i, j) in &cat.conjugate_cells {
            re[(i, j)] = Complex64::new(1.0, 0.0);
        }
        basis.push(re);
        if !cat.is_real {
            let mut im = ComplexMatrix::zeros(d);
            for &(i, j) in &cat.cells {
                im[(i, j)] = Complex64::new(0.0, 1.0);
            }
            for &(i, j) in &cat.conjugate_cells {
                im[(i, j)] = Complex64::new(0.0, -1.0);
            }
            basis.push(im);
        }
    }
    basis
}

/// Numerical dimension of the KD-real space: `d²` minus the rank of the real
/// linear map `F ↦ (Im Q_ij(F))_ij` over Hermitian `F`.
pub fn constraint_nullity(pair: &BasisPair, tol: &Tolerances) -> Result<usize> {
    let d = pair.dim();
    let mut columns = Vec::with_capacity(d * d);
    for unit in hermitian_units(d) {
        let table = kd_table(&unit, pair)?;
        columns.push(table.values().iter().map(|z| z.im).collect());
    }
    let rank = RealSvd::new(columns, false).rank(tol.rank_rel);
    Ok(d * d - rank)
}

/// The `d²` Hermitian units `E_ii`, `E_ij + E_ji`, `i(E_ij - E_ji)`.
fn hermitian_units(d: usize) -> Vec<ComplexMatrix> {
    let mut units = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut e = ComplexMatrix::zeros(d);
        e[(i, i)] = Complex64::new(1.0, 0.0);
        units.push(e);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut re = ComplexMatrix::zeros(d);
            re[(i, j)] = Complex64::new(1.0, 0.0);
            re[(j, i)] = Complex64::new(1.0, 0.0);
            units.push(re);
            let mut im = ComplexMatrix::zeros(d);
            im[(i, j)] = Complex64::new(0.0, 1.0);
            im[(j, i)] = Complex64::new(0.0, -1.0);
            units.push(im);
        }
    }
    units
}
