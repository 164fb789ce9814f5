//! Self-check of every invariant that applies at one dimension.

use std::fmt;

use kd_core::geometry::{decompose_pq_three, prime_pair, LabeledSet};
use kd_core::kd_real::{constraint_nullity, gcd, kd_real_basis};
use kd_core::linalg::linear_combination;
use kd_core::sampling::{
    ginibre_state, sample_hull_point, sample_kd_boundary, traceless_kd_real_basis,
};
use kd_core::{
    b_side_condition, classicality, decompose_p2, dft_pair, entry_partition, family_identity_sums,
    hull_membership, is_kd_real, kd_real_condition, kd_real_dimension, kd_table,
    pure_classicality_criterion, pure_kd_set, quadruple_conditions_p2, real_span_rank, Complex64,
    ComplexMatrix, FamilyLetter, Tolerances,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CliError;

const SEED: u64 = 0x6b64;
const SAMPLES: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
    /// Informational rows do not affect the verdict.
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyTable {
    pub d: usize,
    pub rows: Vec<CheckRow>,
}

impl VerifyTable {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass || r.informational)
    }

    fn check(&mut self, name: &str, expected: impl ToString, observed: impl ToString, pass: bool) {
        self.rows.push(CheckRow {
            name: name.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            pass,
            informational: false,
        });
    }

    fn exact<T: ToString + PartialEq>(&mut self, name: &str, expected: T, observed: T) {
        let pass = expected == observed;
        self.check(name, expected, observed, pass);
    }

    fn info(&mut self, name: &str, expected: impl ToString, observed: impl ToString, pass: bool) {
        self.check(name, expected, observed, pass);
        self.rows.last_mut().unwrap().informational = true;
    }
}

impl fmt::Display for VerifyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        writeln!(f, "verify d = {}", self.d)?;
        for r in &self.rows {
            let status = match (r.pass, r.informational) {
                (true, _) => "PASS",
                (false, true) => "INFO",
                (false, false) => "FAIL",
            };
            writeln!(
                f,
                "{status}  {:width$}  expected {}  observed {}",
                r.name, r.expected, r.observed
            )?;
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict}  overall")
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&g + &g.adjoint()).scale(0.5)
}

fn fmt_sci(x: f64) -> String {
    format!("{x:.2e}")
}

pub fn verify_dimension(d: usize, tol: &Tolerances) -> Result<VerifyTable, CliError> {
    if d < 2 {
        return Err(CliError::Invalid("verify needs d ≥ 2".into()));
    }
    let pair = dft_pair(d);
    let mut t = VerifyTable {
        d,
        rows: Vec::new(),
    };
    let families = pure_kd_set(&pair);
    let pure = LabeledSet::from_families(&families);

    // Pure classical states.
    let mut bad_members = 0;
    for f in &families {
        for mem in &f.members {
            let table = kd_table(&mem.projector, &pair)?;
            let verdict = classicality(&table, tol);
            let ones = table
                .values()
                .iter()
                .filter(|z| (z.re - 1.0 / d as f64).abs() <= 1e-12 && z.im.abs() <= 1e-12)
                .count();
            let criterion = pure_classicality_criterion(&mem.state, &pair, tol)?;
            if !verdict.classical || verdict.min_real < -1e-12 || ones != d || !criterion {
                bad_members += 1;
            }
        }
    }
    t.exact(
        "pure members failing classicality/support law",
        0,
        bad_members,
    );

    // Marginals.
    let mut worst = 0.0f64;
    let mut r = rng(1);
    for _ in 0..SAMPLES {
        let rho = ginibre_state(&mut r, d);
        let table = kd_table(&rho, &pair)?;
        let b = pair.to_b_basis(&rho);
        worst = worst.max((table.total() - rho.trace()).norm());
        for i in 0..d {
            worst = worst.max((table.row_sum(i) - rho[(i, i)]).norm());
            worst = worst.max((table.column_sum(i) - b[(i, i)]).norm());
        }
    }
    t.check(
        "marginal identities (max error)",
        "≤ 1e-10",
        fmt_sci(worst),
        worst <= 1e-10,
    );

    // Identity sums.
    let mut worst = 0.0f64;
    for f in families.iter().filter(|f| !f.label.is_basis()) {
        worst = worst.max(family_identity_sums(f, &pair)?.max_error());
    }
    t.check(
        "identity sums (max error)",
        "≤ 1e-12",
        fmt_sci(worst),
        worst <= 1e-12,
    );

    // Categories.
    let partition = entry_partition(d);
    let expected_categories = 1 + (1..=d / 2).map(|k| gcd(k, d)).sum::<usize>();
    t.exact(
        "category count",
        expected_categories,
        partition.total_categories(),
    );

    // KD-real dimension three ways.
    let closed = d + (1..d).map(|k| gcd(k, d)).sum::<usize>();
    t.exact(
        "KD-real dimension (partition count)",
        closed,
        kd_real_dimension(d),
    );
    t.exact(
        "KD-real dimension (constraint nullspace)",
        closed,
        constraint_nullity(&pair, tol)?,
    );
    let pure_rank = real_span_rank(&pure.projectors, tol)?;
    match prime_pair(d) {
        Some(_) => t.exact("KD-real dimension (pure span rank)", closed, pure_rank),
        None if kd_core::geometry::is_prime(d) => {
            t.exact("KD-real dimension (pure span rank)", closed, pure_rank)
        }
        None => t.info(
            "KD-real dimension (pure span rank)",
            closed,
            pure_rank,
            closed == pure_rank,
        ),
    }

    // KD-real equivalence.
    let mut disagreements = 0;
    let basis = kd_real_basis(d);
    let mut r = rng(2);
    for k in 0..SAMPLES {
        let f = if k % 2 == 0 {
            let w: Vec<f64> = (0..basis.len())
                .map(|_| r.random_range(-1.0..1.0))
                .collect();
            linear_combination(&w, &basis)
        } else {
            random_hermitian(&mut r, d)
        };
        let a = is_kd_real(&f, &pair, tol)?;
        let b = kd_real_condition(&f, 1e-9)?;
        let c = b_side_condition(&f, &pair, 1e-9)?;
        if a != b || b != c || (k % 2 == 0 && !a) {
            disagreements += 1;
        }
    }
    t.exact("KD-real test disagreements", 0, disagreements);

    // Soundness of hull sampling.
    let mut r = rng(3);
    let mut non_classical = 0;
    for _ in 0..SAMPLES {
        let rho = sample_hull_point(&mut r, &pure.projectors)?;
        if !classicality(&kd_table(&rho, &pair)?, tol).classical {
            non_classical += 1;
        }
    }
    t.exact("hull samples not classical", 0, non_classical);

    if let Some((p, q)) = prime_pair(d) {
        if p == q {
            verify_p2(&mut t, p, tol)?;
        } else {
            verify_pq(&mut t, p, q, tol)?;
        }
    }
    Ok(t)
}

fn verify_p2(t: &mut VerifyTable, p: usize, tol: &Tolerances) -> Result<(), CliError> {
    let d = p * p;
    let pair = dft_pair(d);
    let abc =
        LabeledSet::from_letters(&pair, &[FamilyLetter::A, FamilyLetter::B, FamilyLetter::C])?;
    t.exact(
        "span rank A∪B∪C",
        3 * p * p - 2 * p,
        real_span_rank(&abc.projectors, tol)?,
    );

    let basis = traceless_kd_real_basis(d);
    let mut r = rng(4);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..SAMPLES {
        let rho = sample_kd_boundary(&mut r, &pair, &basis)?;
        let table = kd_table(&rho, &pair)?;
        let ok_conditions = quadruple_conditions_p2(&table, p, tol.classicality)?;
        let member = hull_membership(&rho, &abc.projectors, tol)?.member;
        match decompose_p2(&rho, &pair, p, tol) {
            Ok(cert) if ok_conditions && member => worst = worst.max(cert.residual),
            _ => failures += 1,
        }
    }
    t.exact(
        "perturbed states failing decomposition/membership",
        0,
        failures,
    );
    t.check(
        "decomposition residual (max)",
        "≤ 1e-9",
        fmt_sci(worst),
        worst <= 1e-9,
    );
    Ok(())
}

fn verify_pq(t: &mut VerifyTable, p: usize, q: usize, tol: &Tolerances) -> Result<(), CliError> {
    let d = p * q;
    let pair = dft_pair(d);
    let all = LabeledSet::from_letters(
        &pair,
        &[
            FamilyLetter::A,
            FamilyLetter::B,
            FamilyLetter::C,
            FamilyLetter::D,
        ],
    )?;
    t.exact(
        "span rank A∪B∪C∪D",
        (2 * p - 1) * (2 * q - 1),
        real_span_rank(&all.projectors, tol)?,
    );
    for name in ["ABC", "ABD", "ACD", "BCD"] {
        let sets = FamilyLetter::parse_triple(name)?;
        let set = LabeledSet::from_letters(&pair, &sets)?;
        t.exact(
            &format!("span rank {name}"),
            3 * p * q - p - q,
            real_span_rank(&set.projectors, tol)?,
        );
    }

    let sets = FamilyLetter::parse_triple("BCD")?;
    let bcd = LabeledSet::from_letters(&pair, &sets)?;
    let mut r = rng(5);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..SAMPLES {
        let rho = sample_hull_point(&mut r, &bcd.projectors)?;
        match decompose_pq_three(&rho, &pair, sets, tol) {
            Ok(cert) => worst = worst.max(cert.residual),
            Err(_) => failures += 1,
        }
    }
    t.exact("BCD hull points failing decomposition", 0, failures);
    t.check(
        "decomposition residual (max)",
        "≤ 1e-9",
        fmt_sci(worst),
        worst <= 1e-9,
    );
    Ok(())
}
