//! On-disk formats. Complex numbers are `[re, im]` pairs; KD tables are CSV
//! with columns `i,j,re,im`; everything else is JSON.

use std::io::Write;

use kd_core::geometry::{DecompositionCertificate, MembershipVerdict};
use kd_core::kd::support_counts;
use kd_core::{BasisPair, Complex64, ComplexMatrix, EntryPartition, KdTable, PureFamily};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub d: usize,
    /// Row-major.
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixDoc {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            d: m.dim(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl MatrixDoc {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, kd_core::Error> {
        let entries = self
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(self.d, entries)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub labels: Vec<String>,
    pub coeffs: Vec<f64>,
    pub residual: f64,
}

impl From<&DecompositionCertificate> for CertificateDoc {
    fn from(c: &DecompositionCertificate) -> Self {
        Self {
            labels: c.labels.clone(),
            coeffs: c.coefficients.clone(),
            residual: c.residual,
        }
    }
}

impl CertificateDoc {
    pub fn to_certificate(&self) -> DecompositionCertificate {
        DecompositionCertificate {
            labels: self.labels.clone(),
            coefficients: self.coeffs.clone(),
            residual: self.residual,
            coefficient_sum: self.coeffs.iter().sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictDoc {
    pub member: bool,
    pub distance: f64,
    pub certificate: Option<CertificateDoc>,
}

impl From<&MembershipVerdict> for VerdictDoc {
    fn from(v: &MembershipVerdict) -> Self {
        Self {
            member: v.member,
            distance: v.distance,
            certificate: v.certificate.as_ref().map(CertificateDoc::from),
        }
    }
}

impl VerdictDoc {
    pub fn to_verdict(&self) -> MembershipVerdict {
        MembershipVerdict {
            member: self.member,
            distance: self.distance,
            certificate: self
                .certificate
                .as_ref()
                .map(CertificateDoc::to_certificate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub step: usize,
    pub residue: usize,
    pub real: bool,
    pub cells: Vec<[usize; 2]>,
    pub conjugate_cells: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub d: usize,
    pub total_categories: usize,
    pub diagonal: Vec<[usize; 2]>,
    pub categories: Vec<CategoryDoc>,
}

fn cells(v: &[(usize, usize)]) -> Vec<[usize; 2]> {
    v.iter().map(|&(i, j)| [i, j]).collect()
}

impl From<&EntryPartition> for PartitionDoc {
    fn from(p: &EntryPartition) -> Self {
        Self {
            d: p.dim,
            total_categories: p.total_categories(),
            diagonal: cells(&p.diagonal),
            categories: p
                .categories
                .iter()
                .map(|c| CategoryDoc {
                    step: c.step,
                    residue: c.residue,
                    real: c.is_real,
                    cells: cells(&c.cells),
                    conjugate_cells: cells(&c.conjugate_cells),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberDoc {
    pub label: String,
    pub m: usize,
    pub s: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub state: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub label: String,
    pub p: usize,
    pub q: usize,
    pub members: Vec<MemberDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamiliesDoc {
    pub d: usize,
    pub families: Vec<FamilyDoc>,
}

impl FamiliesDoc {
    pub fn new(pair: &BasisPair, families: &[PureFamily]) -> Result<Self, kd_core::Error> {
        let families = families
            .iter()
            .map(|f| {
                let members = f
                    .members
                    .iter()
                    .map(|mem| {
                        let (n_a, n_b) =
                            support_counts(&mem.state, pair, kd_core::kd::SUPPORT_TOL)?;
                        Ok(MemberDoc {
                            label: f.label.member_label(mem.m, mem.s),
                            m: mem.m,
                            s: mem.s,
                            n_a,
                            n_b,
                            state: mem.state.iter().map(|z| [z.re, z.im]).collect(),
                        })
                    })
                    .collect::<Result<_, kd_core::Error>>()?;
                Ok(FamilyDoc {
                    label: f.label.to_string(),
                    p: f.factorization.p,
                    q: f.factorization.q,
                    members,
                })
            })
            .collect::<Result<_, kd_core::Error>>()?;
        Ok(Self {
            d: pair.dim(),
            families,
        })
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|source| CliError::Parse {
        path: origin.to_string(),
        source,
    })
}

pub fn read_text(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_matrix(path: &std::path::Path) -> Result<ComplexMatrix, CliError> {
    let doc: MatrixDoc = from_json(&read_text(path)?, &path.display().to_string())?;
    Ok(doc.to_matrix()?)
}

/// KD table as CSV (`i,j,re,im`, header row, LF line endings).
pub fn write_table_csv<W: Write>(table: &KdTable, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["i", "j", "re", "im"])?;
    let d = table.dim();
    for i in 0..d {
        for j in 0..d {
            let z = table.get(i, j);
            w.write_record([
                i.to_string(),
                j.to_string(),
                z.re.to_string(),
                z.im.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct TableRow {
    i: usize,
    j: usize,
    re: f64,
    im: f64,
}

/// Parses a KD table CSV back into `(d, row-major values)`.
pub fn read_table_csv(text: &str) -> Result<(usize, Vec<Complex64>), CliError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows = rdr
        .deserialize()
        .collect::<Result<Vec<TableRow>, _>>()
        .map_err(|e| CliError::Invalid(format!("bad KD table CSV: {e}")))?;
    let d = (rows.len() as f64).sqrt().round() as usize;
    if d * d != rows.len() || d == 0 {
        return Err(CliError::Invalid(format!(
            "{} rows is not a square table",
            rows.len()
        )));
    }
    let mut values = vec![Complex64::new(0.0, 0.0); d * d];
    let mut seen = vec![false; d * d];
    for r in rows {
        if r.i >= d || r.j >= d || seen[r.i * d + r.j] {
            return Err(CliError::Invalid(format!("bad cell ({}, {})", r.i, r.j)));
        }
        seen[r.i * d + r.j] = true;
        values[r.i * d + r.j] = Complex64::new(r.re, r.im);
    }
    Ok((d, values))
}
