//! Convex geometry of KD-classical states: projections onto real spans,
//! constructive decompositions over the pure classical families, and a general
//! hull-membership oracle.
//!
//! Families are referred to by letter: `A` and `B` are the two bases, `C` the
//! `ψ` family of the factorization `(p, q)` with `p ≤ q`, and `D` the partner
//! family of `(q, p)` (only present when `p ≠ q`).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::dft::BasisPair;
use crate::error::{Error, Result};
use crate::hull::min_norm_point;
use crate::kd::{classicality, kd_table, KdTable, HERMITIAN_TOL};
use crate::linalg::{dot, linear_combination, ComplexMatrix, RealSvd, Tolerances};
use crate::pure::{pure_kd_set, Factorization, PureFamily};

const SPAN_RANK_REL: f64 = 1e-10;
const HULL_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyLetter {
    A,
    B,
    C,
    D,
}

impl FamilyLetter {
    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'A' => Some(Self::A),
            'B' => Some(Self::B),
            'C' => Some(Self::C),
            'D' => Some(Self::D),
            _ => None,
        }
    }

    /// Parses three distinct letters such as `"BCD"`.
    pub fn parse_triple(s: &str) -> Result<[Self; 3]> {
        let letters: Vec<Self> = s
            .chars()
            .map(Self::from_char)
            .collect::<Option<_>>()
            .ok_or(Error::BadSetChoice)?;
        let triple: [Self; 3] = letters.try_into().map_err(|_| Error::BadSetChoice)?;
        ensure_distinct(&triple)?;
        Ok(triple)
    }

    /// The projector family this letter denotes at `pair.dim()`.
    pub fn family(self, pair: &BasisPair) -> Result<PureFamily> {
        let d = pair.dim();
        let f = match self {
            Self::A => Factorization { p: d, q: 1 },
            Self::B => Factorization { p: 1, q: d },
            Self::C | Self::D => {
                let (p, q) = prime_pair(d).ok_or(Error::BadDimension {
                    d,
                    reason: "families C and D need d = p·q with p, q prime",
                })?;
                match self {
                    Self::C => Factorization { p, q },
                    _ if p == q => {
                        return Err(Error::BadDimension {
                            d,
                            reason: "family D needs two distinct prime factors",
                        })
                    }
                    _ => Factorization { p: q, q: p },
                }
            }
        };
        PureFamily::new(pair, f)
    }
}

impl fmt::Display for FamilyLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Self::A => 'A',
            Self::B => 'B',
            Self::C => 'C',
            Self::D => 'D',
        };
        write!(f, "{c}")
    }
}

fn ensure_distinct(sets: &[FamilyLetter; 3]) -> Result<()> {
    if sets[0] == sets[1] || sets[0] == sets[2] || sets[1] == sets[2] {
        Err(Error::BadSetChoice)
    } else {
        Ok(())
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}

/// `(p, q)` with `p ≤ q`, both prime, `p·q = d`.
pub fn prime_pair(d: usize) -> Option<(usize, usize)> {
    let p = (2..=d).find(|k| d.is_multiple_of(*k))?;
    let q = d / p;
    is_prime(q).then_some((p, q))
}

/// Projectors with their member labels, in a fixed order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledSet {
    pub labels: Vec<String>,
    pub projectors: Vec<ComplexMatrix>,
}

impl LabeledSet {
    pub fn from_families(families: &[PureFamily]) -> Self {
        let mut set = Self::default();
        for f in families {
            set.labels.extend(f.member_labels());
            set.projectors.extend(f.projectors());
        }
        set
    }

    pub fn from_letters(pair: &BasisPair, letters: &[FamilyLetter]) -> Result<Self> {
        let families = letters
            .iter()
            .map(|l| l.family(pair))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_families(&families))
    }

    /// Every KD-classical pure projector at `pair.dim()`.
    pub fn pure(pair: &BasisPair) -> Self {
        Self::from_families(&pure_kd_set(pair))
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

/// Nonnegative weights over labeled projectors. Negative solver output is set
/// to zero before `residual` is measured.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCertificate {
    pub labels: Vec<String>,
    pub coefficients: Vec<f64>,
    /// `‖Σ c_k P_k − ρ‖_F`.
    pub residual: f64,
    pub coefficient_sum: f64,
}

impl DecompositionCertificate {
    pub fn build(
        labels: Vec<String>,
        mut coefficients: Vec<f64>,
        projectors: &[ComplexMatrix],
        rho: &ComplexMatrix,
    ) -> Self {
        for c in coefficients.iter_mut() {
            if *c < 0.0 {
                *c = 0.0;
            }
        }
        let residual = (&linear_combination(&coefficients, projectors) - rho).frobenius_norm();
        let coefficient_sum = coefficients.iter().sum();
        Self {
            labels,
            coefficients,
            residual,
            coefficient_sum,
        }
    }

    pub fn reconstruct(&self, projectors: &[ComplexMatrix]) -> ComplexMatrix {
        linear_combination(&self.coefficients, projectors)
    }

    pub fn coefficient(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| self.coefficients[k])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVerdict {
    pub member: bool,
    /// Present exactly when `member` holds.
    pub certificate: Option<DecompositionCertificate>,
    /// Frobenius distance from the state to the hull.
    pub distance: f64,
}

/// A quadruple `(i, j, k, l)` breaking `Q_ij + Q_kl = Q_il + Q_kj`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrupleViolation {
    /// `"row"` when `i ≡ k (mod p)`, `"column"` when `j ≡ l (mod p)`.
    pub condition: &'static str,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub defect: f64,
}

impl From<QuadrupleViolation> for Error {
    fn from(v: QuadrupleViolation) -> Self {
        Error::ConditionsFailed {
            condition: v.condition,
            i: v.i,
            j: v.j,
            k: v.k,
            l: v.l,
            defect: v.defect,
        }
    }
}

fn ensure_p2(d: usize, p: usize) -> Result<()> {
    if p * p == d && is_prime(p) {
        Ok(())
    } else {
        Err(Error::BadDimension {
            d,
            reason: "expected d = p² with p prime",
        })
    }
}

/// First quadruple (row condition before column condition, then
/// lexicographic) whose real-part defect exceeds `tol`.
pub fn quadruple_violation(
    table: &KdTable,
    p: usize,
    tol: f64,
) -> Result<Option<QuadrupleViolation>> {
    let d = table.dim();
    ensure_p2(d, p)?;
    let t = |i: usize, j: usize| table.get(i, j).re;
    let defect = |i, j, k, l| t(i, j) + t(k, l) - t(i, l) - t(k, j);
    for i in 0..d {
        for k in (i + p..d).step_by(p) {
            for j in 0..d {
                for l in j + 1..d {
                    let e = defect(i, j, k, l);
                    if e.abs() > tol {
                        let condition = "row";
                        return Ok(Some(QuadrupleViolation {
                            condition,
                            i,
                            j,
                            k,
                            l,
                            defect: e,
                        }));
                    }
                }
            }
        }
    }
    for j in 0..d {
        for l in (j + p..d).step_by(p) {
            for i in 0..d {
                for k in i + 1..d {
                    let e = defect(i, j, k, l);
                    if e.abs() > tol {
                        let condition = "column";
                        return Ok(Some(QuadrupleViolation {
                            condition,
                            i,
                            j,
                            k,
                            l,
                            defect: e,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn quadruple_conditions_p2(table: &KdTable, p: usize, tol: f64) -> Result<bool> {
    Ok(quadruple_violation(table, p, tol)?.is_none())
}

/// Decomposition over `A ∪ B ∪ C` at `d = p²`.
///
/// With `T = d·Re Q` and `(m̂, ŝ)` the lexicographically first minimizer of
/// `T` over the cells `i ≡ m, j ≡ s (mod p)`, the weights are
/// `γ_ms = T_{m̂ŝ}`, `λ_i = T_{iŝ} − T_{m̂ŝ}` (class of `(i mod p, 0)`) and
/// `μ_j = T_{m̂j} − T_{m̂ŝ}` (class of `(0, j mod p)`).
pub fn decompose_p2(
    rho: &ComplexMatrix,
    pair: &BasisPair,
    p: usize,
    tol: &Tolerances,
) -> Result<DecompositionCertificate> {
    let d = pair.dim();
    ensure_p2(d, p)?;
    let table = kd_table(rho, pair)?;
    let verdict = classicality(&table, tol);
    if let Some(witness) = verdict.witness {
        return Err(Error::NotClassical { witness });
    }
    if let Some(v) = quadruple_violation(&table, p, tol.classicality)? {
        return Err(v.into());
    }
    let t = table.scaled_real();
    let at = |i: usize, j: usize| t[i * d + j];

    let mut minimizers = vec![(0, 0); p * p];
    for m in 0..p {
        for s in 0..p {
            let mut best = (m, s);
            for i in (m..d).step_by(p) {
                for j in (s..d).step_by(p) {
                    if at(i, j) < at(best.0, best.1) {
                        best = (i, j);
                    }
                }
            }
            minimizers[m * p + s] = best;
        }
    }
    let lambda = (0..d).map(|i| {
        let (mh, sh) = minimizers[(i % p) * p];
        at(i, sh) - at(mh, sh)
    });
    let mu = (0..d).map(|j| {
        let (mh, sh) = minimizers[j % p];
        at(mh, j) - at(mh, sh)
    });
    let gamma = minimizers.iter().map(|&(i, j)| at(i, j));
    let coefficients: Vec<f64> = lambda.chain(mu).chain(gamma).collect();

    let set = LabeledSet::from_letters(pair, &[FamilyLetter::A, FamilyLetter::B, FamilyLetter::C])?;
    accept(
        DecompositionCertificate::build(set.labels, coefficients, &set.projectors, rho),
        tol,
    )
}

fn accept(cert: DecompositionCertificate, tol: &Tolerances) -> Result<DecompositionCertificate> {
    if cert.residual <= tol.recon {
        Ok(cert)
    } else {
        Err(Error::ReconstructionFailed {
            residual: cert.residual,
        })
    }
}

/// Decomposition over three of the four families at `d = p·q`, `p ≠ q`.
///
/// A least-squares solution over the support patterns of the three families
/// is shifted along the identity sums until every per-class minimum of the
/// `ψ`/`φ` weights (or of the basis weights, when both bases are chosen) is
/// zero; classicality then makes all weights nonnegative.
pub fn decompose_pq_three(
    rho: &ComplexMatrix,
    pair: &BasisPair,
    sets: [FamilyLetter; 3],
    tol: &Tolerances,
) -> Result<DecompositionCertificate> {
    let d = pair.dim();
    match prime_pair(d) {
        Some((p, q)) if p != q => {}
        _ => {
            return Err(Error::BadDimension {
                d,
                reason: "expected d = p·q with distinct primes p, q",
            })
        }
    }
    ensure_distinct(&sets)?;
    let families = sets
        .iter()
        .map(|l| l.family(pair))
        .collect::<Result<Vec<_>>>()?;
    let set = LabeledSet::from_families(&families);

    let (_, residual) = span_project(rho, &set.projectors)?;
    if residual > tol.recon {
        return Err(Error::NotInSpan { residual });
    }
    let table = kd_table(rho, pair)?;
    if let Some(witness) = classicality(&table, tol).witness {
        return Err(Error::NotClassical { witness });
    }

    let columns = families
        .iter()
        .flat_map(|f| {
            f.members
                .iter()
                .map(move |mem| support_indicator(d, f.factorization, mem.m, mem.s))
        })
        .collect();
    let solution =
        RealSvd::new(columns, true).solve_least_squares(&table.scaled_real(), tol.rank_rel);

    let mut weights: Vec<(FamilyLetter, Factorization, Vec<f64>)> = Vec::with_capacity(3);
    let mut offset = 0;
    for (letter, f) in sets.iter().zip(&families) {
        let n = f.members.len();
        weights.push((
            *letter,
            f.factorization,
            solution[offset..offset + n].to_vec(),
        ));
        offset += n;
    }
    fold_minima(&mut weights);

    let coefficients = weights.into_iter().flat_map(|(_, _, w)| w).collect();
    accept(
        DecompositionCertificate::build(set.labels, coefficients, &set.projectors, rho),
        tol,
    )
}

/// 0/1 pattern of the cells `i ≡ m (mod p)`, `j ≡ s (mod q)`.
fn support_indicator(d: usize, f: Factorization, m: usize, s: usize) -> Vec<f64> {
    let mut v = vec![0.0; d * d];
    for i in (m..d).step_by(f.p) {
        for j in (s..d).step_by(f.q) {
            v[i * d + j] = 1.0;
        }
    }
    v
}

fn fold_minima(weights: &mut [(FamilyLetter, Factorization, Vec<f64>)]) {
    let position = |l| weights.iter().position(|(x, _, _)| *x == l);
    let (a, b) = (position(FamilyLetter::A), position(FamilyLetter::B));
    let others: Vec<usize> = (0..weights.len())
        .filter(|&k| Some(k) != a && Some(k) != b)
        .collect();

    match (a, b) {
        (Some(a), Some(b)) => {
            let x = others[0];
            let Factorization { p, q } = weights[x].1;
            let d = p * q;
            for m in 0..p {
                let t = (m..d)
                    .step_by(p)
                    .map(|i| weights[a].2[i])
                    .fold(f64::INFINITY, f64::min);
                (m..d).step_by(p).for_each(|i| weights[a].2[i] -= t);
                (0..q).for_each(|s| weights[x].2[m * q + s] += t);
            }
            for s in 0..q {
                let u = (s..d)
                    .step_by(q)
                    .map(|j| weights[b].2[j])
                    .fold(f64::INFINITY, f64::min);
                (s..d).step_by(q).for_each(|j| weights[b].2[j] -= u);
                (0..p).for_each(|m| weights[x].2[m * q + s] += u);
            }
        }
        (None, Some(b)) => {
            for &x in &others {
                let Factorization { p, q } = weights[x].1;
                let d = p * q;
                for s in 0..q {
                    let t = (0..p)
                        .map(|m| weights[x].2[m * q + s])
                        .fold(f64::INFINITY, f64::min);
                    (0..p).for_each(|m| weights[x].2[m * q + s] -= t);
                    (s..d).step_by(q).for_each(|j| weights[b].2[j] += t);
                }
            }
        }
        (Some(a), None) => {
            for &x in &others {
                let Factorization { p, q } = weights[x].1;
                let d = p * q;
                for m in 0..p {
                    let t = (0..q)
                        .map(|s| weights[x].2[m * q + s])
                        .fold(f64::INFINITY, f64::min);
                    (0..q).for_each(|s| weights[x].2[m * q + s] -= t);
                    (m..d).step_by(p).for_each(|i| weights[a].2[i] += t);
                }
            }
        }
        (None, None) => unreachable!("three distinct letters include A or B"),
    }
}

/// Orthogonal projection of `rho` onto the real span of `projectors`, in the
/// Frobenius geometry, with the distance to the span.
pub fn span_project(
    rho: &ComplexMatrix,
    projectors: &[ComplexMatrix],
) -> Result<(ComplexMatrix, f64)> {
    let d = rho.dim();
    rho.ensure_hermitian(HERMITIAN_TOL)?;
    for p in projectors {
        p.ensure_dim(d)?;
    }
    let target = rho.isometric_coordinates();
    let columns = projectors
        .iter()
        .map(ComplexMatrix::isometric_coordinates)
        .collect();
    let basis = RealSvd::new(columns, false).range_basis(SPAN_RANK_REL);
    let mut proj = vec![0.0; target.len()];
    for u in &basis {
        let c = dot(u, &target);
        for (x, ui) in proj.iter_mut().zip(u) {
            *x += c * ui;
        }
    }
    let residual = Float::sqrt(
        target
            .iter()
            .zip(&proj)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>(),
    );
    Ok((
        ComplexMatrix::from_isometric_coordinates(d, &proj),
        residual,
    ))
}

/// Distance from `rho` to the convex hull of `projectors`; labels in the
/// certificate are `P0, P1, …` in input order.
pub fn hull_membership(
    rho: &ComplexMatrix,
    projectors: &[ComplexMatrix],
    tol: &Tolerances,
) -> Result<MembershipVerdict> {
    let labels: Vec<String> = (0..projectors.len()).map(|k| format!("P{k}")).collect();
    hull_membership_labeled(rho, projectors, &labels, tol)
}

pub fn hull_membership_labeled(
    rho: &ComplexMatrix,
    projectors: &[ComplexMatrix],
    labels: &[String],
    tol: &Tolerances,
) -> Result<MembershipVerdict> {
    assert_eq!(labels.len(), projectors.len(), "one label per projector");
    if projectors.is_empty() {
        return Err(Error::EmptySet);
    }
    let d = rho.dim();
    rho.ensure_hermitian(HERMITIAN_TOL)?;
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > tol.recon {
        return Err(Error::NotUnitTrace { trace });
    }
    let target = rho.isometric_coordinates();
    let points = projectors
        .iter()
        .map(|p| {
            p.ensure_dim(d)?;
            Ok(p.isometric_coordinates()
                .iter()
                .zip(&target)
                .map(|(a, b)| a - b)
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let solution = min_norm_point(&points, HULL_MAX_ITERATIONS)?;
    let member = solution.distance <= tol.recon;
    let certificate = member.then(|| {
        DecompositionCertificate::build(labels.to_vec(), solution.weights, projectors, rho)
    });
    Ok(MembershipVerdict {
        member,
        certificate,
        distance: solution.distance,
    })
}
