//! Parameter sweeps: every grid point, repetition and policy is one verified run.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::truth::TruthModel;
use crate::bounds::{info_lower_bound, Family};
use crate::error::{Error, Result};
use crate::learners::{run_learner, verify_report, LearnerParams, LearnerRegistry, LearnerReport, Verdict};
use crate::oracle::AdversaryPolicy;
use crate::partition::CoalitionStructure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: Family,
    pub n_range: Vec<usize>,
    /// Degree limits for graphical runs; points with `d > n` are skipped.
    #[serde(default)]
    pub d_values: Vec<usize>,
    pub truth_model: TruthModel,
    pub policies: Vec<AdversaryPolicy>,
    pub repetitions: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.n_range.contains(&0) {
            return bad("every n must be at least 1".into());
        }
        if self.policies.is_empty() {
            return bad("at least one adversary policy is required".into());
        }
        if self.family == Family::Graphical {
            if self.d_values.is_empty() {
                return bad("graphical runs need at least one d".into());
            }
            if let Some(d) = self.d_values.iter().find(|&&d| d < 2 || d % 2 != 0) {
                return bad(format!("d = {d} is not an even integer >= 2"));
            }
        }
        Ok(())
    }

    /// `(n, d)` pairs in sweep order.
    pub fn grid(&self) -> Vec<(usize, Option<usize>)> {
        let mut points = Vec::new();
        for &n in &self.n_range {
            if self.family == Family::Graphical {
                points.extend(self.d_values.iter().filter(|&&d| d <= n).map(|&d| (n, Some(d))));
            } else {
                points.push((n, None));
            }
        }
        points
    }
}

/// Seed of the truth stream for one repetition of one grid point.
pub fn run_seed(seed: u64, grid_index: usize, rep: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((grid_index as u64) << 32) | rep as u64);
    rng.next_u64()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CampaignRow {
    pub family: Family,
    pub n: usize,
    pub d: Option<usize>,
    pub c: Option<usize>,
    pub policy: AdversaryPolicy,
    pub seed: u64,
    pub rounds: usize,
    pub budget: u64,
    pub lower_bound: u64,
    pub recovered_ok: bool,
}

impl CampaignRow {
    fn from_report(rep: &LearnerReport, seed: u64) -> Self {
        CampaignRow {
            family: rep.family,
            n: rep.n,
            d: rep.params.d,
            c: rep.params.c,
            policy: rep.policy,
            seed,
            rounds: rep.rounds,
            budget: rep.budget,
            lower_bound: info_lower_bound(rep.n),
            recovered_ok: true,
        }
    }

    fn sort_key(&self) -> (Family, usize, u64, Option<usize>, AdversaryPolicy) {
        (self.family, self.n, self.seed, self.d, self.policy)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub rows: Vec<CampaignRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown output format `{other}`"))),
        }
    }
}

/// Serialized offending run, attached to verification failures.
fn describe_failure(rep: &LearnerReport, truth: &CoalitionStructure, seed: u64) -> String {
    let mut out = serde_json::json!({
        "truth": truth,
        "policy": rep.policy,
        "seed": seed,
        "report": rep.summary(),
    })
    .to_string();
    out.push('\n');
    let mut jsonl = Vec::new();
    if rep.transcript.write_jsonl(&mut jsonl).is_ok() {
        out.push_str(&String::from_utf8_lossy(&jsonl));
    }
    out
}

/// Runs every repetition of one grid point under every policy; the truth is
/// shared across policies.
fn run_point(
    cfg: &ExperimentConfig,
    registry: &LearnerRegistry,
    grid_index: usize,
    n: usize,
    d: Option<usize>,
    rep: usize,
) -> Result<Vec<CampaignRow>> {
    let learner = registry.create(cfg.family.as_str(), &LearnerParams { degree: d })?;
    let seed = run_seed(cfg.seed, grid_index, rep);
    let truth = cfg.truth_model.sample(n, rep, &mut ChaCha8Rng::seed_from_u64(seed))?;
    cfg.policies
        .iter()
        .map(|&policy| {
            let mut report = run_learner(learner.as_ref(), truth.clone(), policy)?;
            report.seed = Some(seed);
            if let Verdict::Fail(v) = verify_report(&report, &truth, cfg.family, d) {
                return Err(Error::VerificationFailed {
                    reason: v.to_string(),
                    run: describe_failure(&report, &truth, seed),
                });
            }
            Ok(CampaignRow::from_report(&report, seed))
        })
        .collect()
}

/// Every run is verified; the first failure aborts the campaign.
pub fn run_campaign(cfg: &ExperimentConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let registry = LearnerRegistry::with_defaults();
    let jobs: Vec<(usize, usize, Option<usize>, usize)> = cfg
        .grid()
        .into_iter()
        .enumerate()
        .flat_map(|(g, (n, d))| (0..cfg.repetitions).map(move |rep| (g, n, d, rep)))
        .collect();
    let chunks = jobs
        .par_iter()
        .map(|&(g, n, d, rep)| run_point(cfg, &registry, g, n, d, rep))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<CampaignRow> = chunks.into_iter().flatten().collect();
    rows.sort_by_key(CampaignRow::sort_key);
    Ok(CampaignResult { rows })
}

/// CSV columns: family,n,d,c,policy,seed,rounds,budget,lower_bound,recovered_ok.
pub fn emit<W: Write>(result: &CampaignResult, format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(["family", "n", "d", "c", "policy", "seed", "rounds", "budget", "lower_bound", "recovered_ok"])?;
            for row in &result.rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, result)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn emit_to_path(result: &CampaignResult, format: OutputFormat, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    emit(result, format, &mut out)?;
    out.flush()?;
    Ok(())
}
