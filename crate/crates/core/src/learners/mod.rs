//! The five coalition-structure learners, selected by family name at run time.

mod auction;
mod binary_search;
mod graphical;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{upper_bound, Family};
use crate::error::{Error, Result};
use crate::games::{braess_product, BraessFactor, FactoredNormalFormGame, GameStrategyPair};
use crate::oracle::{AdversaryPolicy, HiddenOracle, Observation, Transcript};
use crate::partition::CoalitionStructure;

pub use auction::{AuctionBitwiseLearner, AuctionIterativeLearner};
pub use binary_search::{CongestionLearner, NormalFormLearner};
pub use graphical::GraphicalLearner;
pub use verify::{verify_report, Verdict, Violation};

/// Which index a per-agent binary search is closing in on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchTarget {
    /// Smallest index in the agent's coalition.
    SmallestTeammate,
    /// Largest teammate index below the agent.
    Predecessor,
}

/// Learner state exposed to an instrumented run at each loop boundary.
#[derive(Debug)]
pub enum SearchState<'a> {
    /// `sets[j - 1]` is the candidate set `T_j`, sorted ascending.
    Candidates {
        target: SearchTarget,
        sets: &'a [Vec<usize>],
    },
    /// Agents not yet settled, and the head currently being matched.
    Iterative {
        remaining: &'a [usize],
        head: usize,
    },
    /// Bit `bit` has been read for every member of `t_y`; `t_false` holds
    /// those whose bit is 0.
    BitRead {
        bit: u32,
        t_x: &'a [usize],
        t_y: &'a [usize],
        t_false: &'a [usize],
    },
    /// `(i, alpha(i))` for every `i` outside the representative set.
    Reconstructed { pairs: &'a [(usize, usize)] },
}

/// Algorithm-level configuration a factory may need.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LearnerParams {
    /// Degree limit for graphical queries.
    pub degree: Option<usize>,
}

/// A strategy for recovering the hidden partition through an oracle.
pub trait Learner: Send + Sync {
    fn family(&self) -> Family;

    /// Degree limit the learner was built with, if any.
    fn degree(&self) -> Option<usize> {
        None
    }

    /// Runs to completion, calling `probe` at every loop boundary.
    fn learn_observed(
        &self,
        oracle: &mut HiddenOracle,
        probe: &mut dyn FnMut(&SearchState<'_>),
    ) -> Result<CoalitionStructure>;

    fn learn(&self, oracle: &mut HiddenOracle) -> Result<CoalitionStructure> {
        self.learn_observed(oracle, &mut |_| {})
    }
}

impl fmt::Debug for dyn Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Learner({})", self.family())
    }
}

pub type LearnerFactory = fn(&LearnerParams) -> Result<Box<dyn Learner>>;

/// Name-to-factory table.
#[derive(Clone, Default)]
pub struct LearnerRegistry {
    factories: BTreeMap<String, LearnerFactory>,
}

impl LearnerRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// All five learners under their family names.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Family::NormalForm.as_str(), |_| Ok(Box::new(NormalFormLearner)));
        r.register(Family::Congestion.as_str(), |_| Ok(Box::new(CongestionLearner)));
        r.register(Family::Graphical.as_str(), |p| {
            let d = p.degree.ok_or(Error::MissingParameter("d"))?;
            Ok(Box::new(GraphicalLearner::new(d)?))
        });
        r.register(Family::AuctionIterative.as_str(), |_| Ok(Box::new(AuctionIterativeLearner)));
        r.register(Family::AuctionBitwise.as_str(), |_| Ok(Box::new(AuctionBitwiseLearner)));
        r
    }

    /// Adds or replaces the factory registered under `name`.
    pub fn register(&mut self, name: &str, factory: LearnerFactory) {
        self.factories.insert(name.to_owned(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn create(&self, name: &str, params: &LearnerParams) -> Result<Box<dyn Learner>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownFamily(name.to_owned()))?;
        factory(params)
    }
}

/// Parameters a run's budget depends on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
}

/// Evidence from one run.
#[derive(Clone, Debug, PartialEq)]
pub struct LearnerReport {
    pub family: Family,
    pub n: usize,
    pub params: RunParams,
    pub policy: AdversaryPolicy,
    pub seed: Option<u64>,
    pub recovered: CoalitionStructure,
    pub rounds: usize,
    pub budget: u64,
    pub transcript: Transcript,
}

/// The JSON form of a report, without the transcript.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub family: Family,
    pub n: usize,
    pub params: RunParams,
    pub rounds: usize,
    pub budget: u64,
    pub recovered: CoalitionStructure,
    pub seed: Option<u64>,
}

impl LearnerReport {
    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            family: self.family,
            n: self.n,
            params: self.params,
            rounds: self.rounds,
            budget: self.budget,
            recovered: self.recovered.clone(),
            seed: self.seed,
        }
    }
}

/// Budget parameters for `family` on `truth`: the bitwise learner is charged
/// against the largest coalition actually present.
pub fn run_params(family: Family, degree: Option<usize>, truth: &CoalitionStructure) -> RunParams {
    RunParams {
        d: if family == Family::Graphical { degree } else { None },
        c: if family == Family::AuctionBitwise {
            Some(truth.max_block_size())
        } else {
            None
        },
    }
}

pub fn run_learner(learner: &dyn Learner, truth: CoalitionStructure, policy: AdversaryPolicy) -> Result<LearnerReport> {
    run_learner_observed(learner, truth, policy, &mut |_| {})
}

/// Plays `learner` against a fresh oracle hiding `truth`.
pub fn run_learner_observed(
    learner: &dyn Learner,
    truth: CoalitionStructure,
    policy: AdversaryPolicy,
    probe: &mut dyn FnMut(&SearchState<'_>),
) -> Result<LearnerReport> {
    let family = learner.family();
    let n = truth.n();
    let params = run_params(family, learner.degree(), &truth);
    let budget = upper_bound(family, n, params.d, params.c)?;
    let mut oracle = HiddenOracle::new(truth, policy);
    let recovered = learner.learn_observed(&mut oracle, probe)?;
    let rounds = oracle.rounds_used();
    Ok(LearnerReport {
        family,
        n,
        params,
        policy,
        seed: None,
        recovered,
        rounds,
        budget,
        transcript: oracle.into_transcript(),
    })
}

/// Game class used to realise a product of directed gadgets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PairGame {
    NormalForm,
    Graphical,
    Congestion,
}

impl PairGame {
    fn build(self, n: usize, pairs: &[(usize, usize)]) -> Result<GameStrategyPair> {
        Ok(match self {
            PairGame::NormalForm => {
                GameStrategyPair::NormalForm(FactoredNormalFormGame::from_pairs(n, pairs.iter().copied())?)
            }
            PairGame::Graphical => {
                GameStrategyPair::Graphical(FactoredNormalFormGame::from_pairs(n, pairs.iter().copied())?)
            }
            PairGame::Congestion => {
                let factors = pairs
                    .iter()
                    .map(|&(i, j)| BraessFactor::new(i, j))
                    .collect::<Result<Vec<_>>>()?;
                GameStrategyPair::Congestion(braess_product(n, &factors)?)
            }
        })
    }
}

/// Plays the product of gadgets `(beneficiary, decider)`. The empty product
/// has an all-False observation, so it is answered without a round.
pub(crate) fn ask_pairs(oracle: &mut HiddenOracle, kind: PairGame, pairs: &[(usize, usize)]) -> Result<Observation> {
    if pairs.is_empty() {
        return Ok(Observation::all_false(oracle.n()));
    }
    let game = kind.build(oracle.n(), pairs)?;
    oracle.observe(game)
}

/// Merges each agent with the single smaller index left in its candidate set.
pub(crate) fn merge_with_found(n: usize, sets: &[Vec<usize>]) -> Result<CoalitionStructure> {
    let mut labels: Vec<usize> = (0..n).collect();
    for j in 1..=n {
        match sets[j - 1].as_slice() {
            [] => {}
            &[i] if i < j => labels[j - 1] = labels[i - 1],
            other => {
                return Err(Error::InconsistentObservations(format!(
                    "agent {j} ended with candidates {other:?}"
                )))
            }
        }
    }
    Ok(CoalitionStructure::from_labels(&labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::AdversaryPolicy;

    #[test]
    fn registry_builds_every_family() {
        let reg = LearnerRegistry::with_defaults();
        let names: Vec<&str> = reg.names().collect();
        assert_eq!(names.len(), 5);
        let params = LearnerParams { degree: Some(4) };
        for f in Family::ALL {
            let learner = reg.create(f.as_str(), &params).unwrap();
            assert_eq!(learner.family(), f);
        }
        assert!(matches!(
            reg.create("graphical", &LearnerParams::default()),
            Err(Error::MissingParameter("d"))
        ));
        assert!(matches!(reg.create("nash", &params), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn registry_accepts_custom_entries() {
        let mut reg = LearnerRegistry::empty();
        reg.register("alias", |_| Ok(Box::new(NormalFormLearner)));
        let l = reg.create("alias", &LearnerParams::default()).unwrap();
        assert_eq!(l.family(), Family::NormalForm);
    }

    #[test]
    fn summary_json_has_the_report_fields() {
        let truth = CoalitionStructure::from_blocks(vec![vec![1, 4], vec![2, 3]]).unwrap();
        let mut rep = run_learner(&NormalFormLearner, truth, AdversaryPolicy::First).unwrap();
        rep.seed = Some(7);
        let v: serde_json::Value = serde_json::to_value(rep.summary()).unwrap();
        assert_eq!(v["family"], "normal-form");
        assert_eq!(v["n"], 4);
        assert_eq!(v["recovered"], serde_json::json!([[1, 4], [2, 3]]));
        assert_eq!(v["budget"], 3);
        assert_eq!(v["seed"], 7);
        assert_eq!(v["params"], serde_json::json!({}));
        let back: ReportSummary = serde_json::from_value(v).unwrap();
        assert_eq!(back, rep.summary());
    }

    #[test]
    fn empty_products_cost_nothing() {
        let mut o = HiddenOracle::new(CoalitionStructure::singletons(3), AdversaryPolicy::First);
        let obs = ask_pairs(&mut o, PairGame::Congestion, &[]).unwrap();
        assert_eq!(obs, Observation::all_false(3));
        assert_eq!(o.rounds_used(), 0);
    }

    #[test]
    fn merge_rejects_unresolved_candidates() {
        assert!(merge_with_found(3, &[vec![], vec![1], vec![1, 2]]).is_err());
        let s = merge_with_found(3, &[vec![], vec![1], vec![2]]).unwrap();
        assert_eq!(s.num_blocks(), 1);
    }
}
