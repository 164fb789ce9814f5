//! KD-classical pure states.
//!
//! Under the DFT every KD-classical pure state is, up to phase, one of
//!
//! ```text
//! |ψ_ms⟩ = q^{-1/2} Σ_{k<q} ω_q^{sk} |a_{kp+m}⟩
//!        = p^{-1/2} ω_d^{-ms} Σ_{l<p} ω_p^{-ml} |b_{lq+s}⟩,    m ∈ Z_p, s ∈ Z_q,
//! ```
//!
//! for some ordered factorization `d = p·q`. The factorization `(d, 1)` gives the
//! `a` basis and `(1, d)` the `b` basis. Each factorization contributes one
//! [`PureFamily`] of `d` projectors; a member's KD table is `1/d` on the `d`
//! cells `i ≡ m (mod p)`, `j ≡ s (mod q)` and zero elsewhere.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::dft::{root_of_unity, BasisPair};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factorization {
    pub p: usize,
    pub q: usize,
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.p * self.q
    }
}

/// All ordered pairs `(p, q)` with `p·q = d`, by ascending `p`.
pub fn factorizations(d: usize) -> Vec<Factorization> {
    (1..=d)
        .filter(|p| d.is_multiple_of(*p))
        .map(|p| Factorization { p, q: d / p })
        .collect()
}

/// Family naming. `Psi { p, q }` holds `ψ_ms` with `m ∈ Z_p, s ∈ Z_q` for
/// `p ≤ q`; `Phi { p, q }` holds the partner family `φ_{m's'}` with
/// `m' ∈ Z_q, s' ∈ Z_p` (the factorization `(q, p)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyLabel {
    A,
    B,
    Psi { p: usize, q: usize },
    Phi { p: usize, q: usize },
}

impl FamilyLabel {
    fn for_factorization(f: Factorization) -> Self {
        let d = f.dim();
        match (f.p, f.q) {
            (p, _) if p == d => FamilyLabel::A,
            (1, _) => FamilyLabel::B,
            (p, q) if p <= q => FamilyLabel::Psi { p, q },
            (p, q) => FamilyLabel::Phi { p: q, q: p },
        }
    }

    /// Short name for one member.
    pub fn member_label(&self, m: usize, s: usize) -> String {
        match self {
            FamilyLabel::A => format!("a_{m}"),
            FamilyLabel::B => format!("b_{s}"),
            FamilyLabel::Psi { p, q } => format!("psi({p},{q})_{m}_{s}"),
            FamilyLabel::Phi { p, q } => format!("phi({p},{q})_{m}_{s}"),
        }
    }

    pub fn is_basis(&self) -> bool {
        matches!(self, FamilyLabel::A | FamilyLabel::B)
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyLabel::A => f.write_str("A"),
            FamilyLabel::B => f.write_str("B"),
            FamilyLabel::Psi { p, q } => write!(f, "PSI({p},{q})"),
            FamilyLabel::Phi { p, q } => write!(f, "PHI({p},{q})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub m: usize,
    pub s: usize,
    pub state: Vec<Complex64>,
    pub projector: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureFamily {
    pub label: FamilyLabel,
    /// Strides of the member states: `a`-support `i ≡ m (mod p)`, `b`-support
    /// `j ≡ s (mod q)`.
    pub factorization: Factorization,
    /// Ordered by `m`, then `s`.
    pub members: Vec<FamilyMember>,
}

impl PureFamily {
    pub fn new(pair: &BasisPair, factorization: Factorization) -> Result<Self> {
        let Factorization { p, q } = factorization;
        let mut members = Vec::with_capacity(p * q);
        for m in 0..p {
            for s in 0..q {
                let state = psi_state(pair, p, q, m, s)?;
                let projector = ComplexMatrix::outer(&state);
                members.push(FamilyMember {
                    m,
                    s,
                    state,
                    projector,
                });
            }
        }
        Ok(Self {
            label: FamilyLabel::for_factorization(factorization),
            factorization,
            members,
        })
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        self.members.iter().map(|m| m.projector.clone()).collect()
    }

    pub fn member_labels(&self) -> Vec<String> {
        self.members
            .iter()
            .map(|mem| self.label.member_label(mem.m, mem.s))
            .collect()
    }

    pub fn member(&self, m: usize, s: usize) -> Option<&FamilyMember> {
        let Factorization { p, q } = self.factorization;
        (m < p && s < q).then(|| &self.members[m * q + s])
    }
}

/// `|ψ_ms⟩` for the factorization `d = p·q`, in the `a` basis.
pub fn psi_state(
    pair: &BasisPair,
    p: usize,
    q: usize,
    m: usize,
    s: usize,
) -> Result<Vec<Complex64>> {
    let d = pair.dim();
    if p == 0 || q == 0 || p * q != d {
        return Err(Error::BadFactorization { p, q, d });
    }
    if m >= p {
        return Err(Error::IndexOutOfRange { index: m, bound: p });
    }
    if s >= q {
        return Err(Error::IndexOutOfRange { index: s, bound: q });
    }
    let norm = 1.0 / Float::sqrt(q as f64);
    let mut state = alloc::vec![Complex64::new(0.0, 0.0); d];
    for k in 0..q {
        state[k * p + m] = root_of_unity(q, (s * k) as i64) * norm;
    }
    Ok(state)
}

/// All KD-classical pure projectors, one family per ordered factorization of
/// `d`, in factorization order. Families are not deduplicated.
pub fn pure_kd_set(pair: &BasisPair) -> Vec<PureFamily> {
    factorizations(pair.dim())
        .into_iter()
        .map(|f| PureFamily::new(pair, f).expect("factorizations are valid"))
        .collect()
}

/// Worst entrywise deviations of the resolution identities
/// `Σ_s ψ_ms = Σ_k a_{kp+m}` (per `m`) and `Σ_m ψ_ms = Σ_l b_{lq+s}` (per `s`).
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub label: FamilyLabel,
    pub a_side: Vec<f64>,
    pub b_side: Vec<f64>,
}

impl IdentityReport {
    pub fn max_error(&self) -> f64 {
        self.a_side
            .iter()
            .chain(&self.b_side)
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max_error() <= tol
    }
}

pub fn family_identity_sums(family: &PureFamily, pair: &BasisPair) -> Result<IdentityReport> {
    if family.label.is_basis() {
        return Err(Error::WrongFamilyKind);
    }
    let d = pair.dim();
    let Factorization { p, q } = family.factorization;
    if p * q != d {
        return Err(Error::MixedDimensions {
            expected: d,
            found: p * q,
        });
    }
    let a_side = (0..p)
        .map(|m| {
            let lhs = sum_matrices(d, (0..q).map(|s| &family.members[m * q + s].projector));
            let a_proj: Vec<_> = (0..q)
                .map(|k| ComplexMatrix::outer(&pair.a_vector(k * p + m)))
                .collect();
            lhs.max_abs_diff(&sum_matrices(d, a_proj.iter()))
        })
        .collect();
    let b_side = (0..q)
        .map(|s| {
            let lhs = sum_matrices(d, (0..p).map(|m| &family.members[m * q + s].projector));
            let b_proj: Vec<_> = (0..p)
                .map(|l| ComplexMatrix::outer(&pair.b_vector(l * q + s)))
                .collect();
            lhs.max_abs_diff(&sum_matrices(d, b_proj.iter()))
        })
        .collect();
    Ok(IdentityReport {
        label: family.label,
        a_side,
        b_side,
    })
}

fn sum_matrices<'a>(d: usize, items: impl Iterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    items.fold(ComplexMatrix::zeros(d), |acc, m| &acc + m)
}
