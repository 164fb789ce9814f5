//! Kirkwood-Dirac (KD) classicality machinery for the computational basis and
//! its discrete-Fourier-transform partner.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational: file
//! formats, the probe runner and the command line live in the `kd-cli` crate.
//!
//! Module map:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigenvalues, real-span rank.
//! - [`dft`]: the basis pair `a`/`b` related by `U_ij = ω^{ij}/√d`.
//! - [`kd`]: KD quasiprobability tables, marginals and classicality verdicts.
//! - [`pure`]: every KD-classical pure state, grouped by factorization of `d`.
//! - [`kd_real`]: the shift condition on KD-real operators and its gcd-orbit
//!   category partition.
//! - [`geometry`]: span projections, constructive convex decompositions and a
//!   hull-membership oracle built on [`hull`].
//! - [`sampling`]: seeded samplers for hull points, KD-real perturbations of the
//!   maximally mixed state, and Ginibre states.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod dft;
pub mod geometry;
pub mod hull;
pub mod kd;
pub mod kd_real;
pub mod linalg;
pub mod pure;
pub mod sampling;

pub use num_complex::Complex64;

pub use dft::{basis_projector, dft_pair, Basis, BasisPair};
pub use error::{Error, Result};
pub use geometry::{
    decompose_p2, decompose_pq_three, hull_membership, quadruple_conditions_p2,
    quadruple_violation, span_project, DecompositionCertificate, FamilyLetter, MembershipVerdict,
    QuadrupleViolation,
};
pub use kd::{
    classicality, is_kd_real, kd_table, pure_classicality_criterion, support_counts,
    ClassicalityVerdict, KdTable,
};
pub use kd_real::{
    b_side_condition, entry_partition, kd_real_condition, kd_real_dimension, Category,
    EntryPartition,
};
pub use linalg::{is_density_matrix, is_hermitian, real_span_rank, ComplexMatrix, Tolerances};
pub use pure::{
    factorizations, family_identity_sums, psi_state, pure_kd_set, Factorization, FamilyLabel,
    FamilyMember, IdentityReport, PureFamily,
};
