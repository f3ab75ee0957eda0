//! Independent audit of a finished run against the hidden truth.

use std::fmt;

use super::{run_params, LearnerReport};
use crate::bounds::{upper_bound, Family};
use crate::games::{AuctionShape, GameStrategyPair};
use crate::oracle::observe_with;
use crate::partition::CoalitionStructure;

/// The first assertion a report breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// 1-based round of the offending query, if the failure is per-query.
    pub round: Option<usize>,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.round {
            Some(r) => write!(f, "round {r}: {}", self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Violation),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

fn fail(round: Option<usize>, reason: impl Into<String>) -> Verdict {
    Verdict::Fail(Violation {
        round,
        reason: reason.into(),
    })
}

fn check_query(family: Family, d: Option<usize>, game: &GameStrategyPair) -> Result<(), String> {
    match (family, game) {
        (Family::NormalForm, GameStrategyPair::NormalForm(_)) => Ok(()),
        (Family::Graphical, GameStrategyPair::Graphical(g)) => {
            let deg = g.graphical_view().max_degree;
            match d {
                Some(d) if deg <= d => Ok(()),
                Some(d) => Err(format!("query has degree {deg} above the limit {d}")),
                None => Err("graphical run without a degree limit".into()),
            }
        }
        (Family::Congestion, GameStrategyPair::Congestion(g)) => {
            g.validate().map_err(|e| format!("query is not a valid congestion game: {e}"))
        }
        (Family::AuctionIterative | Family::AuctionBitwise, GameStrategyPair::Auction(a)) => {
            if a.shape() == AuctionShape::Other {
                Err("auction query is not a gadget".into())
            } else {
                Ok(())
            }
        }
        (family, game) => Err(format!("{} query in a {family} run", game.tag())),
    }
}

/// Checks, in order: family, exact recovery, the round budget (recomputed
/// from `truth`), transcript length, and per query its round number, game
/// class, structural limits, and a replay of the observation.
pub fn verify_report(rep: &LearnerReport, truth: &CoalitionStructure, family: Family, degree: Option<usize>) -> Verdict {
    if rep.family != family {
        return fail(None, format!("report is for {}, expected {family}", rep.family));
    }
    if rep.recovered != *truth {
        return fail(None, format!("recovered {} but the truth is {truth}", rep.recovered));
    }
    let params = run_params(family, degree, truth);
    let budget = match upper_bound(family, truth.n(), params.d, params.c) {
        Ok(b) => b,
        Err(e) => return fail(None, format!("no budget: {e}")),
    };
    if rep.rounds as u64 > budget {
        return fail(None, format!("{} rounds exceed the budget of {budget}", rep.rounds));
    }
    if rep.rounds != rep.transcript.len() {
        return fail(
            None,
            format!("{} rounds reported but the transcript has {}", rep.rounds, rep.transcript.len()),
        );
    }
    for (k, entry) in rep.transcript.entries.iter().enumerate() {
        let round = Some(k + 1);
        if entry.round != k + 1 {
            return fail(round, format!("entry is numbered {}", entry.round));
        }
        if entry.game.n() != truth.n() {
            return fail(round, format!("query has {} agents, expected {}", entry.game.n(), truth.n()));
        }
        if let Err(reason) = check_query(family, params.d, &entry.game) {
            return fail(round, reason);
        }
        match observe_with(truth, &entry.game, rep.policy) {
            Ok(o) if o == entry.observation => {}
            Ok(o) => {
                return fail(
                    round,
                    format!("observation {} does not replay (expected {o})", entry.observation),
                )
            }
            Err(e) => return fail(round, format!("query cannot be replayed: {e}")),
        }
    }
    Verdict::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::FactoredNormalFormGame;
    use crate::learners::{run_learner, GraphicalLearner, NormalFormLearner};
    use crate::oracle::AdversaryPolicy;

    fn cs(blocks: &[&[usize]]) -> CoalitionStructure {
        CoalitionStructure::from_blocks(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn genuine_run_passes() {
        let truth = cs(&[&[1, 4], &[2, 3]]);
        let rep = run_learner(&NormalFormLearner, truth.clone(), AdversaryPolicy::First).unwrap();
        assert_eq!(verify_report(&rep, &truth, Family::NormalForm, None), Verdict::Pass);
    }

    #[test]
    fn forged_round_count_fails_on_budget() {
        let truth = cs(&[&[1, 4], &[2, 3]]);
        let mut rep = run_learner(&NormalFormLearner, truth.clone(), AdversaryPolicy::First).unwrap();
        rep.rounds = rep.budget as usize + 1;
        let Verdict::Fail(v) = verify_report(&rep, &truth, Family::NormalForm, None) else {
            panic!("forged report passed")
        };
        assert!(v.reason.contains("budget"), "{v}");
        assert_eq!(v.round, None);
    }

    #[test]
    fn injected_high_degree_query_fails_on_degree() {
        let truth = cs(&[&[1, 6], &[2, 3], &[4], &[5]]);
        let mut rep = run_learner(&GraphicalLearner::new(2).unwrap(), truth.clone(), AdversaryPolicy::First).unwrap();
        assert!(verify_report(&rep, &truth, Family::Graphical, Some(2)).is_pass());
        // A star on agent 1 with three leaves has degree d + 1.
        let star = FactoredNormalFormGame::from_pairs(6, [(1, 2), (1, 3), (1, 4)]).unwrap();
        rep.transcript.entries[1].game = GameStrategyPair::Graphical(star);
        let Verdict::Fail(v) = verify_report(&rep, &truth, Family::Graphical, Some(2)) else {
            panic!("injected query passed")
        };
        assert_eq!(v.round, Some(2));
        assert!(v.reason.contains("degree 3"), "{v}");
    }

    #[test]
    fn wrong_partition_and_tampered_observation_fail() {
        let truth = cs(&[&[1, 2], &[3]]);
        let mut rep = run_learner(&NormalFormLearner, truth.clone(), AdversaryPolicy::First).unwrap();
        let other = cs(&[&[1], &[2, 3]]);
        assert!(!verify_report(&rep, &other, Family::NormalForm, None).is_pass());
        assert!(!verify_report(&rep, &truth, Family::Congestion, None).is_pass());
        rep.transcript.entries[0].observation = crate::oracle::Observation::all_false(3);
        let Verdict::Fail(v) = verify_report(&rep, &truth, Family::NormalForm, None) else { panic!() };
        assert_eq!(v.round, Some(1));
    }
}
