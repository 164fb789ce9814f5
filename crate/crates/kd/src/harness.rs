//! Seeded probe of hull membership for sampled KD-classical states.
//!
//! Sample `k` of a run with seed `s` draws from `ChaCha8Rng` seeded with `s`
//! on stream `k`, so samples are independent of evaluation order and thread
//! count.

use std::path::Path;
use std::time::Instant;

use kd_core::geometry::{hull_membership_labeled, LabeledSet};
use kd_core::sampling::{
    ginibre_state, sample_hull_point, sample_kd_boundary, traceless_kd_real_basis,
};
use kd_core::{classicality, dft_pair, kd_table, BasisPair, ComplexMatrix, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::formats::{to_json, write_text, MatrixDoc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    /// Flat-simplex mixtures of the pure classical projectors.
    Hull,
    /// `I/d + x·F` along random KD-real directions.
    Perturb,
    /// Normalized `G·G†` for complex Gaussian `G`.
    Ginibre,
}

impl std::fmt::Display for SampleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SampleMode::Hull => "hull",
            SampleMode::Perturb => "perturb",
            SampleMode::Ginibre => "ginibre",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceDoc {
    pub eig_psd: f64,
    pub classicality: f64,
    pub rank_rel: f64,
    pub recon: f64,
}

impl From<Tolerances> for ToleranceDoc {
    fn from(t: Tolerances) -> Self {
        Self {
            eig_psd: t.eig_psd,
            classicality: t.classicality,
            rank_rel: t.rank_rel,
            recon: t.recon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    pub d: usize,
    pub seed: u64,
    pub n_samples: usize,
    pub mode: SampleMode,
    pub tolerances: Tolerances,
}

impl SampleConfig {
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.d == 0 {
            return Err(CliError::Invalid("dimension must be at least 1".into()));
        }
        if self.n_samples == 0 {
            return Err(CliError::Invalid("need at least one sample".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeCounts {
    pub classical_and_member: usize,
    pub classical_not_member: usize,
    pub not_classical: usize,
}

impl ProbeCounts {
    pub fn total(&self) -> usize {
        self.classical_and_member + self.classical_not_member + self.not_classical
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub d: usize,
    pub seed: u64,
    pub mode: SampleMode,
    pub n_samples: usize,
    pub counts: ProbeCounts,
    /// Classical samples whose membership solve hit the iteration cap; they
    /// are also counted as `classical_not_member`.
    pub solver_failures: usize,
    /// Largest hull distance among classical non-members, 0 if there are none.
    pub worst_margin: f64,
    /// Relative to the output directory.
    pub counterexample_files: Vec<String>,
    #[serde(skip)]
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleManifest {
    pub d: usize,
    pub seed: u64,
    pub sample_index: usize,
    pub mode: SampleMode,
    pub tolerances: ToleranceDoc,
    pub margin: f64,
    pub state_file: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Member,
    NotMember { distance: f64 },
    SolverFailure,
    NotClassical,
}

pub struct Sampler {
    config: SampleConfig,
    pair: BasisPair,
    projectors: LabeledSet,
    directions: Vec<ComplexMatrix>,
}

impl Sampler {
    pub fn new(config: SampleConfig) -> Self {
        let pair = dft_pair(config.d);
        let directions = match config.mode {
            SampleMode::Perturb => traceless_kd_real_basis(config.d),
            _ => Vec::new(),
        };
        Self {
            config,
            projectors: LabeledSet::pure(&pair),
            pair,
            directions,
        }
    }

    pub fn projectors(&self) -> &LabeledSet {
        &self.projectors
    }

    /// The state for sample `index`.
    pub fn state(&self, index: usize) -> Result<ComplexMatrix, kd_core::Error> {
        let mut rng = self.config.rng(index);
        match self.config.mode {
            SampleMode::Hull => sample_hull_point(&mut rng, &self.projectors.projectors),
            SampleMode::Perturb => sample_kd_boundary(&mut rng, &self.pair, &self.directions),
            SampleMode::Ginibre => Ok(ginibre_state(&mut rng, self.config.d)),
        }
    }

    pub fn classify(&self, rho: &ComplexMatrix) -> Result<Outcome, kd_core::Error> {
        let tol = &self.config.tolerances;
        if !classicality(&kd_table(rho, &self.pair)?, tol).classical {
            return Ok(Outcome::NotClassical);
        }
        let set = &self.projectors;
        match hull_membership_labeled(rho, &set.projectors, &set.labels, tol) {
            Ok(v) if v.member => Ok(Outcome::Member),
            Ok(v) => Ok(Outcome::NotMember {
                distance: v.distance,
            }),
            Err(kd_core::Error::SolverDidNotConverge { .. }) => Ok(Outcome::SolverFailure),
            Err(e) => Err(e),
        }
    }
}

/// Runs the probe. When `out_dir` is given, writes `report.json` there along
/// with each counterexample state and its manifest.
pub fn probe_conjecture(
    config: &SampleConfig,
    out_dir: Option<&Path>,
) -> Result<ProbeReport, CliError> {
    config.validate()?;
    let start = Instant::now();
    let sampler = Sampler::new(*config);
    let results = (0..config.n_samples)
        .into_par_iter()
        .map(|k| {
            let rho = sampler.state(k)?;
            let outcome = sampler.classify(&rho)?;
            Ok((rho, outcome))
        })
        .collect::<Result<Vec<_>, kd_core::Error>>()?;

    let threshold = 10.0 * config.tolerances.recon;
    let mut counts = ProbeCounts::default();
    let mut solver_failures = 0;
    let mut worst_margin = 0.0f64;
    let mut candidates = Vec::new();
    for (k, (rho, outcome)) in results.into_iter().enumerate() {
        match outcome {
            Outcome::Member => counts.classical_and_member += 1,
            Outcome::NotClassical => counts.not_classical += 1,
            Outcome::SolverFailure => {
                counts.classical_not_member += 1;
                solver_failures += 1;
            }
            Outcome::NotMember { distance } => {
                counts.classical_not_member += 1;
                worst_margin = worst_margin.max(distance);
                if distance > threshold {
                    candidates.push((k, rho, distance));
                }
            }
        }
    }

    let mut counterexample_files = Vec::new();
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    for (k, rho, margin) in candidates {
        let state_file = format!("counterexample_{k:06}.json");
        let manifest_file = format!("counterexample_{k:06}.manifest.json");
        if let Some(dir) = out_dir {
            let manifest = CounterexampleManifest {
                d: config.d,
                seed: config.seed,
                sample_index: k,
                mode: config.mode,
                tolerances: config.tolerances.into(),
                margin,
                state_file: state_file.clone(),
            };
            write_text(&dir.join(&state_file), &to_json(&MatrixDoc::from(&rho)))?;
            write_text(&dir.join(&manifest_file), &to_json(&manifest))?;
        }
        counterexample_files.push(state_file);
    }

    let report = ProbeReport {
        d: config.d,
        seed: config.seed,
        mode: config.mode,
        n_samples: config.n_samples,
        counts,
        solver_failures,
        worst_margin,
        counterexample_files,
        runtime_ms: start.elapsed().as_millis() as u64,
    };
    if let Some(dir) = out_dir {
        write_text(&dir.join("report.json"), &to_json(&report))?;
    }
    Ok(report)
}
