//! Acceptance suite. Each test prints one `PASS`/`FAIL` line for its
//! criterion, written straight to stdout so it survives output capture.
//! Reference values are recomputed here with brute-force code that shares
//! nothing with the library beyond `ComplexMatrix` storage.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use kd_cli::harness::{probe_conjecture, SampleConfig, SampleMode, Sampler};
use kd_core::geometry::LabeledSet;
use kd_core::kd_real::{constraint_nullity, kd_real_basis};
use kd_core::linalg::linear_combination;
use kd_core::sampling::{
    ginibre_state, sample_hull_point, sample_kd_boundary, traceless_kd_real_basis,
};
use kd_core::{
    b_side_condition, classicality, decompose_p2, decompose_pq_three, dft_pair, entry_partition,
    family_identity_sums, hull_membership, is_kd_real, kd_real_condition, kd_real_dimension,
    kd_table, pure_kd_set, quadruple_conditions_p2, real_span_rank, Complex64, ComplexMatrix,
    FamilyLetter, Tolerances,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_241_015;
const PURE_TOL: f64 = 1e-12;
const MARGINAL_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-9;
const REAL_TOL: f64 = 1e-9;
const RANK_BUDGET: Duration = Duration::from_secs(10);
const TRIPLE_BUDGET: Duration = Duration::from_secs(60);
const ROUND_TRIP_BUDGET: Duration = Duration::from_secs(300);

fn report(id: usize, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let line = format!("acceptance {id:>2} {status}  {name}: {detail}\n");
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {id} failed: {detail}");
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn omega(d: usize, k: usize) -> Complex64 {
    Complex64::cis(TAU * (k % d) as f64 / d as f64)
}

/// `⟨a_i|b_j⟩ = ω^{ij}/√d`.
fn u(d: usize, i: usize, j: usize) -> Complex64 {
    omega(d, i * j) / (d as f64).sqrt()
}

fn b_vec(d: usize, j: usize) -> Vec<Complex64> {
    (0..d).map(|i| u(d, i, j)).collect()
}

fn outer(v: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj())
}

fn brute_kd(m: &ComplexMatrix) -> Vec<Complex64> {
    let d = m.dim();
    let mut q = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mu: Complex64 = (0..d).map(|k| m[(i, k)] * u(d, k, j)).sum();
            q.push(u(d, i, j).conj() * mu);
        }
    }
    q
}

fn coords(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.dim();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        v.push(m[(i, i)].re);
        for j in i + 1..d {
            v.push(m[(i, j)].re);
            v.push(m[(i, j)].im);
        }
    }
    v
}

/// Rank by Gaussian elimination with full pivoting.
fn gauss_rank(mut rows: Vec<Vec<f64>>, rel: f64) -> usize {
    let scale = rows.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut used = vec![false; cols];
    while rank < rows.len() {
        let mut best = (0.0, 0, 0);
        for (r, row) in rows.iter().enumerate().skip(rank) {
            for (col, &x) in row.iter().enumerate() {
                if !used[col] && x.abs() > best.0 {
                    best = (x.abs(), r, col);
                }
            }
        }
        let (pivot, r, col) = best;
        if pivot <= rel * scale {
            break;
        }
        rows.swap(rank, r);
        used[col] = true;
        let top = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col] / top[col];
            for (x, t) in row.iter_mut().zip(&top) {
                *x -= f * t;
            }
        }
        rank += 1;
    }
    rank
}

fn brute_span_rank(set: &[ComplexMatrix]) -> usize {
    gauss_rank(set.iter().map(coords).collect(), 1e-9)
}

/// `d² − rank` of `H ↦ Im Q(H)` over the Hermitian unit matrices.
fn brute_constraint_nullity(d: usize) -> usize {
    let mut rows = Vec::new();
    for i in 0..d {
        for j in i..d {
            let units: Vec<ComplexMatrix> = if i == j {
                vec![ComplexMatrix::from_fn(d, |a, b| {
                    c((a == i && b == i) as u8 as f64, 0.0)
                })]
            } else {
                vec![
                    ComplexMatrix::from_fn(d, |a, b| {
                        c(((a, b) == (i, j) || (a, b) == (j, i)) as u8 as f64, 0.0)
                    }),
                    ComplexMatrix::from_fn(d, |a, b| {
                        if (a, b) == (i, j) {
                            c(0.0, 1.0)
                        } else if (a, b) == (j, i) {
                            c(0.0, -1.0)
                        } else {
                            c(0.0, 0.0)
                        }
                    }),
                ]
            };
            for h in units {
                rows.push(brute_kd(&h).iter().map(|z| z.im).collect());
            }
        }
    }
    d * d - gauss_rank(rows, 1e-9)
}

/// Classes of off-diagonal cells under `(i, i+k) ~ (i−k, i)` and `(i, j) ~ (j, i)`.
fn brute_categories(d: usize) -> BTreeSet<BTreeSet<(usize, usize)>> {
    let idx = |i: usize, j: usize| i * d + j;
    let mut parent: Vec<usize> = (0..d * d).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut union = |a: usize, b: usize| {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    };
    for k in 1..d {
        for i in 0..d {
            union(idx(i, (i + k) % d), idx((i + d - k) % d, i));
            union(idx(i, (i + k) % d), idx((i + k) % d, i));
        }
    }
    let mut classes: HashMap<usize, BTreeSet<(usize, usize)>> = HashMap::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let root = find(&mut parent, idx(i, j));
                classes.entry(root).or_default().insert((i, j));
            }
        }
    }
    classes.into_values().collect()
}

fn closed_form_dimension(d: usize) -> usize {
    fn g(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            g(b, a % b)
        }
    }
    d + (1..d).map(|k| g(k, d)).sum::<usize>()
}

fn random_hermitian(r: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, |_, _| {
        c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
    });
    (&g + &g.adjoint()).scale(0.5)
}

fn letters(s: &str) -> [FamilyLetter; 3] {
    FamilyLetter::parse_triple(s).unwrap()
}

#[test]
fn criterion_01_dimension_pins() {
    let tol = Tolerances::default();
    let cases: [(&str, usize, usize); 9] = [
        ("ABC", 4, 8),
        ("ABC", 9, 21),
        ("ABC", 25, 65),
        ("ABCD", 6, 15),
        ("ABCD", 10, 27),
        ("ABCD", 15, 45),
        ("*", 6, 13),
        ("*", 10, 23),
        ("*", 15, 37),
    ];
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    for (sets, d, expected) in cases {
        let pair = dft_pair(d);
        let choices: Vec<String> = if sets == "*" {
            ["ABC", "ABD", "ACD", "BCD"].map(String::from).to_vec()
        } else {
            vec![sets.to_string()]
        };
        for name in choices {
            let chosen: Vec<FamilyLetter> = name
                .chars()
                .map(|ch| FamilyLetter::from_char(ch).unwrap())
                .collect();
            let set = LabeledSet::from_letters(&pair, &chosen).unwrap();
            let start = Instant::now();
            let rank = real_span_rank(&set.projectors, &tol).unwrap();
            let elapsed = start.elapsed();
            slowest = slowest.max(elapsed);
            let oracle = if d <= 15 {
                brute_span_rank(&set.projectors)
            } else {
                expected
            };
            if rank != expected || oracle != expected || elapsed > RANK_BUDGET {
                failures.push(format!("{name}@{d}: {rank} (oracle {oracle}, {elapsed:?})"));
            }
        }
    }
    let detail = format!(
        "{} rank pins, slowest {:.2}s; failures {:?}",
        cases.len(),
        slowest.as_secs_f64(),
        failures
    );
    report(1, "dimension pins", failures.is_empty(), &detail);
}

#[test]
fn criterion_02_category_pins() {
    let mut problems = Vec::new();
    for (d, total) in [(5, 3), (9, 7), (6, 7)] {
        let part = entry_partition(d);
        if part.total_categories() != total {
            problems.push(format!("d={d}: {} categories", part.total_categories()));
        }
        let ours: BTreeSet<BTreeSet<(usize, usize)>> = part
            .categories
            .iter()
            .map(|cat| {
                cat.cells
                    .iter()
                    .chain(&cat.conjugate_cells)
                    .copied()
                    .collect()
            })
            .collect();
        if ours != brute_categories(d) {
            problems.push(format!("d={d}: memberships differ from orbit closure"));
        }
        if part.diagonal.len() != d {
            problems.push(format!("d={d}: diagonal has {} cells", part.diagonal.len()));
        }
    }

    let nine = entry_partition(9);
    let k = nine.category_of((0, 3));
    if k.is_none() || k != nine.category_of((3, 6)) || k != nine.category_of((6, 0)) {
        problems.push("d=9: F_03, F_36, F_60 not grouped".into());
    }
    if k == nine.category_of((1, 4)) {
        problems.push("d=9: F_03 grouped with F_14".into());
    }

    let six = entry_partition(6);
    let k = six.category_of((0, 3)).unwrap();
    let cat = &six.categories[k];
    let cells: BTreeSet<_> = cat.cells.iter().copied().collect();
    if !cat.is_real || cells != BTreeSet::from([(0, 3), (3, 0)]) {
        problems.push(format!("d=6: F_03 category is {:?}", cat));
    }
    let real = six.categories.iter().filter(|c| c.is_real).count();
    if real != 3
        || six
            .categories
            .iter()
            .any(|c| c.is_real && c.cells.len() != 2)
    {
        problems.push(format!("d=6: {real} real categories"));
    }
    let mut f = ComplexMatrix::identity(6);
    f[(0, 3)] = c(2.0, 0.0);
    f[(3, 0)] = c(2.0, 0.0);
    if !kd_real_condition(&f, REAL_TOL).unwrap() {
        problems.push("d=6: real F_03 = F_30 rejected".into());
    }
    f[(0, 3)] = c(2.0, 0.5);
    f[(3, 0)] = c(2.0, -0.5);
    if kd_real_condition(&f, REAL_TOL).unwrap() {
        problems.push("d=6: F_03 ≠ F_30 accepted".into());
    }

    let detail = format!("totals 3/7/7 and orbit memberships; problems {problems:?}");
    report(2, "category pins", problems.is_empty(), &detail);
}

#[test]
fn criterion_03_kd_real_equivalence() {
    let tol = Tolerances::default();
    let mut disagreements = 0;
    let mut counts = [0usize; 2];
    for (stream, d) in [4usize, 5, 6, 9, 10].into_iter().enumerate() {
        let pair = dft_pair(d);
        let basis = kd_real_basis(d);
        let mut r = rng(300 + stream as u64);
        for k in 0..200 {
            let f = match k % 4 {
                0 | 1 => {
                    let w: Vec<f64> = (0..basis.len())
                        .map(|_| r.random_range(-1.0..1.0))
                        .collect();
                    linear_combination(&w, &basis)
                }
                2 => random_hermitian(&mut r, d),
                _ => {
                    let w: Vec<f64> = (0..basis.len())
                        .map(|_| r.random_range(-1.0..1.0))
                        .collect();
                    let mut f = linear_combination(&w, &basis);
                    let (i, j) = (r.random_range(0..d), r.random_range(0..d));
                    let z = c(r.random_range(0.1..1.0), 0.0) * omega(4, r.random_range(0..4));
                    f[(i, j)] += z;
                    if i != j {
                        f[(j, i)] += z.conj();
                    } else {
                        f[(i, i)].im = 0.0;
                    }
                    f
                }
            };
            let oracle = brute_kd(&f).iter().all(|z| z.im.abs() <= REAL_TOL);
            let a = is_kd_real(&f, &pair, &tol).unwrap();
            let b = kd_real_condition(&f, REAL_TOL).unwrap();
            let g = b_side_condition(&f, &pair, REAL_TOL).unwrap();
            counts[a as usize] += 1;
            if a != b || b != g || a != oracle {
                disagreements += 1;
            }
        }
    }
    let detail = format!(
        "1000 samples ({} KD-real, {} not), {disagreements} disagreements",
        counts[1], counts[0]
    );
    report(
        3,
        "KD-real equivalence",
        disagreements == 0 && counts[0] > 0 && counts[1] > 0,
        &detail,
    );
}

#[test]
fn criterion_04_dimension_triple_agreement() {
    let tol = Tolerances::default();
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut ok = true;
    for d in [4usize, 5, 6, 7, 9, 10] {
        let pair = dft_pair(d);
        let closed = closed_form_dimension(d);
        let count = kd_real_dimension(d);
        let nullity = constraint_nullity(&pair, &tol).unwrap();
        let projectors = LabeledSet::pure(&pair).projectors;
        let span = real_span_rank(&projectors, &tol).unwrap();
        let brute_nullity = brute_constraint_nullity(d);
        let brute_span = brute_span_rank(&projectors);
        let all = [count, nullity, span, brute_nullity, brute_span];
        ok &= all.iter().all(|&x| x == closed);
        rows.push(format!("d={d}:{closed}"));
        if !all.iter().all(|&x| x == closed) {
            rows.push(format!("mismatch {all:?}"));
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("{} in {:.2}s", rows.join(" "), elapsed.as_secs_f64());
    report(
        4,
        "KD-real dimension triple agreement",
        ok && elapsed <= TRIPLE_BUDGET,
        &detail,
    );
}

#[test]
fn criterion_05_pure_state_suite() {
    let tol = Tolerances::default();
    let mut members = 0;
    let mut failures = Vec::new();
    for d in 1..=12usize {
        let pair = dft_pair(d);
        for family in pure_kd_set(&pair) {
            let (p, q) = (family.factorization.p, family.factorization.q);
            for mem in &family.members {
                members += 1;
                let (m, s) = (mem.m, mem.s);
                let mut psi = vec![c(0.0, 0.0); d];
                for k in 0..q {
                    psi[k * p + m] = omega(q, s * k) / (q as f64).sqrt();
                }
                let proj = outer(&psi);
                let q_table = brute_kd(&proj);
                let min_re = q_table.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
                let max_im = q_table.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                let at_inv_d = q_table
                    .iter()
                    .filter(|z| (z.re - 1.0 / d as f64).abs() <= PURE_TOL && z.im.abs() <= PURE_TOL)
                    .count();
                let n_a = psi.iter().filter(|z| z.norm() > 1e-8).count();
                let n_b = (0..d)
                    .filter(|&j| {
                        let bj = b_vec(d, j);
                        let amp: Complex64 = bj.iter().zip(&psi).map(|(b, x)| b.conj() * x).sum();
                        amp.norm() > 1e-8
                    })
                    .count();
                let lib = classicality(&kd_table(&mem.projector, &pair).unwrap(), &tol);
                let same = mem.projector.max_abs_diff(&proj) <= PURE_TOL;
                if !(same
                    && min_re >= -PURE_TOL
                    && max_im <= PURE_TOL
                    && n_a * n_b == d
                    && at_inv_d == d
                    && lib.classical
                    && lib.min_real >= -PURE_TOL)
                {
                    failures.push(family.label.member_label(m, s) + &format!("@{d}"));
                }
            }
        }
    }
    let detail = format!("{members} members over d ≤ 12, failures {failures:?}");
    report(5, "pure-state suite", failures.is_empty(), &detail);
}

#[test]
fn criterion_06_marginal_identities() {
    let mut worst = 0.0f64;
    let mut samples = 0;
    for (stream, d) in [4usize, 6, 9, 16].into_iter().enumerate() {
        let pair = dft_pair(d);
        let bs: Vec<_> = (0..d).map(|j| b_vec(d, j)).collect();
        let mut r = rng(600 + stream as u64);
        for _ in 0..100 {
            samples += 1;
            let rho = ginibre_state(&mut r, d);
            let t = kd_table(&rho, &pair).unwrap();
            worst = worst.max((t.total() - c(1.0, 0.0)).norm());
            for i in 0..d {
                worst = worst.max((t.row_sum(i) - rho[(i, i)]).norm());
                let b = &bs[i];
                let expect: Complex64 = (0..d)
                    .flat_map(|k| (0..d).map(move |l| (k, l)))
                    .map(|(k, l)| b[k].conj() * rho[(k, l)] * b[l])
                    .sum();
                worst = worst.max((t.column_sum(i) - expect).norm());
            }
        }
    }
    let detail = format!("{samples} states, max error {worst:.2e} (bound {MARGINAL_TOL:.0e})");
    report(6, "marginal identities", worst <= MARGINAL_TOL, &detail);
}

#[test]
fn criterion_07_p2_round_trip() {
    let d = 9;
    let p = 3;
    let tol = Tolerances::default();
    let start = Instant::now();
    let config = SampleConfig {
        d,
        seed: SEED,
        n_samples: 500,
        mode: SampleMode::Perturb,
        tolerances: tol,
    };
    let sampler = Sampler::new(config);
    let pair = dft_pair(d);
    let abc = LabeledSet::from_letters(&pair, &[FamilyLetter::A, FamilyLetter::B, FamilyLetter::C])
        .unwrap();
    let by_label: HashMap<&str, &ComplexMatrix> = abc
        .labels
        .iter()
        .map(String::as_str)
        .zip(&abc.projectors)
        .collect();
    let mut failures = 0;
    let mut worst = 0.0f64;
    for k in 0..config.n_samples {
        let rho = sampler.state(k).unwrap();
        let table = kd_table(&rho, &pair).unwrap();
        let classical = classicality(&table, &tol).classical;
        let conditions = quadruple_conditions_p2(&table, p, tol.classicality).unwrap();
        let member = hull_membership(&rho, &abc.projectors, &tol).unwrap().member;
        let cert_ok = match decompose_p2(&rho, &pair, p, &tol) {
            Ok(cert) => {
                let mut sum = ComplexMatrix::zeros(d);
                for (label, &w) in cert.labels.iter().zip(&cert.coefficients) {
                    sum = &sum + &by_label[label.as_str()].scale(w);
                }
                let residual = (&sum - &rho).frobenius_norm();
                worst = worst.max(residual);
                residual < RESIDUAL_TOL && cert.coefficients.iter().all(|&w| w >= 0.0)
            }
            Err(_) => false,
        };
        if !(classical && conditions && member && cert_ok) {
            failures += 1;
        }
    }
    let report_doc = probe_conjecture(&config, None).unwrap();
    let elapsed = start.elapsed();
    let pass = failures == 0
        && report_doc.counts.classical_not_member == 0
        && report_doc.counts.total() == config.n_samples
        && elapsed <= ROUND_TRIP_BUDGET;
    let detail = format!(
        "500 perturbed states at d=9: {failures} failures, max residual {worst:.2e}, \
         probe classical_not_member {}, {:.1}s",
        report_doc.counts.classical_not_member,
        elapsed.as_secs_f64()
    );
    report(7, "p² decomposition round trip", pass, &detail);
}

#[test]
fn criterion_08_identity_resolution() {
    let mut worst_lib = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut families = 0;
    for d in [4usize, 6, 9, 10, 15] {
        let pair = dft_pair(d);
        for family in pure_kd_set(&pair)
            .into_iter()
            .filter(|f| !f.label.is_basis())
        {
            families += 1;
            worst_lib = worst_lib.max(family_identity_sums(&family, &pair).unwrap().max_error());
            let (p, q) = (family.factorization.p, family.factorization.q);
            let proj = |m: usize, s: usize| &family.members[m * q + s].projector;
            for m in 0..p {
                let mut lhs = ComplexMatrix::zeros(d);
                let mut rhs = ComplexMatrix::zeros(d);
                for s in 0..q {
                    lhs = &lhs + proj(m, s);
                    rhs[(s * p + m, s * p + m)] = c(1.0, 0.0);
                }
                worst_oracle = worst_oracle.max(lhs.max_abs_diff(&rhs));
            }
            for s in 0..q {
                let mut lhs = ComplexMatrix::zeros(d);
                let mut rhs = ComplexMatrix::zeros(d);
                for m in 0..p {
                    lhs = &lhs + proj(m, s);
                }
                for l in 0..p {
                    rhs = &rhs + &outer(&b_vec(d, l * q + s));
                }
                worst_oracle = worst_oracle.max(lhs.max_abs_diff(&rhs));
            }
        }
    }
    let worst = worst_lib.max(worst_oracle);
    let detail = format!(
        "{families} families, max error {worst:.2e} (library {worst_lib:.2e}, direct {worst_oracle:.2e})"
    );
    report(8, "identity resolution", worst <= IDENTITY_TOL, &detail);
}

#[test]
fn criterion_09_pq_decomposition() {
    let d = 6;
    let tol = Tolerances::default();
    let pair = dft_pair(d);
    let sets = letters("BCD");
    let bcd = LabeledSet::from_letters(&pair, &sets).unwrap();
    let by_label: HashMap<&str, &ComplexMatrix> = bcd
        .labels
        .iter()
        .map(String::as_str)
        .zip(&bcd.projectors)
        .collect();
    let mut r = rng(900);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let rho = sample_hull_point(&mut r, &bcd.projectors).unwrap();
        match decompose_pq_three(&rho, &pair, sets, &tol) {
            Ok(cert) => {
                let mut sum = ComplexMatrix::zeros(d);
                for (label, &w) in cert.labels.iter().zip(&cert.coefficients) {
                    sum = &sum + &by_label[label.as_str()].scale(w);
                }
                let residual = (&sum - &rho).frobenius_norm();
                worst = worst.max(residual);
                if residual >= RESIDUAL_TOL || cert.coefficients.iter().any(|&w| w < 0.0) {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let detail = format!("200 hull points of B∪C∪D: {failures} failures, max residual {worst:.2e}");
    report(9, "pq three-family decomposition", failures == 0, &detail);
}

fn run_kd(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kd"))
        .args(args)
        .env_remove("KD_DEFAULT_TOL")
        .output()
        .expect("kd binary runs")
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_10_conjecture_probe() {
    let tmp = tempfile::tempdir().unwrap();
    let seed = SEED.to_string();
    let mut runs = Vec::new();
    for name in ["first", "second"] {
        let dir = tmp.path().join(name);
        let out = run_kd(&[
            "probe",
            "--d",
            "6",
            "--mode",
            "perturb",
            "--samples",
            "500",
            "--seed",
            &seed,
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        runs.push(dir_contents(&dir));
    }
    let deterministic = runs[0] == runs[1];
    let report_text = &runs[0].iter().find(|(n, _)| n == "report.json").unwrap().1;
    let doc: serde_json::Value = serde_json::from_slice(report_text).unwrap();
    let counts = &doc["counts"];
    let classified = [
        "classical_and_member",
        "classical_not_member",
        "not_classical",
    ]
    .iter()
    .map(|k| counts[k].as_u64().unwrap())
    .sum::<u64>();
    let candidates = doc["counterexample_files"].as_array().unwrap();
    let archived = candidates.iter().all(|f| {
        let state = f.as_str().unwrap();
        let manifest = state.replace(".json", ".manifest.json");
        let m = runs[0].iter().find(|(n, _)| *n == manifest);
        runs[0].iter().any(|(n, _)| n == state)
            && m.is_some_and(|(_, bytes)| {
                let v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
                v["margin"].as_f64().is_some_and(|x| x > 0.0)
            })
    });

    let hull = run_kd(&[
        "--json",
        "probe",
        "--d",
        "6",
        "--mode",
        "hull",
        "--samples",
        "500",
        "--seed",
        &seed,
    ]);
    let hull_doc: serde_json::Value = serde_json::from_slice(&hull.stdout).unwrap();
    let hull_not_classical = hull_doc["counts"]["not_classical"].as_u64().unwrap();

    let pass = deterministic
        && classified == 500
        && archived
        && hull.status.success()
        && hull_not_classical == 0;
    let detail = format!(
        "byte-identical reruns {deterministic}, classified {classified}/500, \
         classical_not_member {} with {} archived, hull-mode not_classical {hull_not_classical}",
        counts["classical_not_member"],
        candidates.len()
    );
    report(
        10,
        "conjecture probe determinism and soundness",
        pass,
        &detail,
    );
}

#[test]
fn perturbation_states_stay_classical() {
    let d = 4;
    let pair = dft_pair(d);
    let basis = traceless_kd_real_basis(d);
    let mut r = rng(1000);
    for _ in 0..50 {
        let rho = sample_kd_boundary(&mut r, &pair, &basis).unwrap();
        let q = brute_kd(&rho);
        assert!(q.iter().all(|z| z.re >= -1e-12 && z.im.abs() <= 1e-9));
    }
}
