//! Simultaneous binary search for every agent's smallest teammate.

use super::{ask_pairs, merge_with_found, Learner, PairGame, SearchState, SearchTarget};
use crate::bounds::Family;
use crate::error::Result;
use crate::oracle::HiddenOracle;
use crate::partition::CoalitionStructure;

/// Queries products of directed prisoner's dilemmas.
#[derive(Clone, Copy, Debug, Default)]
pub struct NormalFormLearner;

/// Same protocol with every dilemma replaced by a Braess gadget.
#[derive(Clone, Copy, Debug, Default)]
pub struct CongestionLearner;

impl Learner for NormalFormLearner {
    fn family(&self) -> Family {
        Family::NormalForm
    }

    fn learn_observed(
        &self,
        oracle: &mut HiddenOracle,
        probe: &mut dyn FnMut(&SearchState<'_>),
    ) -> Result<CoalitionStructure> {
        simultaneous_binary_search(oracle, PairGame::NormalForm, probe)
    }
}

impl Learner for CongestionLearner {
    fn family(&self) -> Family {
        Family::Congestion
    }

    fn learn_observed(
        &self,
        oracle: &mut HiddenOracle,
        probe: &mut dyn FnMut(&SearchState<'_>),
    ) -> Result<CoalitionStructure> {
        simultaneous_binary_search(oracle, PairGame::Congestion, probe)
    }
}

fn simultaneous_binary_search(
    oracle: &mut HiddenOracle,
    kind: PairGame,
    probe: &mut dyn FnMut(&SearchState<'_>),
) -> Result<CoalitionStructure> {
    let n = oracle.n();
    let all_pairs: Vec<(usize, usize)> = (1..=n).flat_map(|j| (1..j).map(move |i| (i, j))).collect();
    let first = ask_pairs(oracle, kind, &all_pairs)?;
    // t[j - 1] holds T_j; j has a smaller teammate iff it deviated.
    let mut t: Vec<Vec<usize>> = (1..=n)
        .map(|j| if first.deviates(j) { (1..j).collect() } else { Vec::new() })
        .collect();
    probe(&SearchState::Candidates {
        target: SearchTarget::SmallestTeammate,
        sets: &t,
    });

    while t.iter().any(|tj| tj.len() >= 2) {
        let half: Vec<usize> = t.iter().map(|tj| tj.len() / 2).collect();
        let pairs: Vec<(usize, usize)> = (1..=n)
            .flat_map(|j| t[j - 1][..half[j - 1]].iter().map(move |&i| (i, j)))
            .collect();
        let o = ask_pairs(oracle, kind, &pairs)?;
        for j in 1..=n {
            let tj = &mut t[j - 1];
            if o.deviates(j) {
                tj.truncate(half[j - 1]);
            } else {
                tj.drain(..half[j - 1]);
            }
        }
        probe(&SearchState::Candidates {
            target: SearchTarget::SmallestTeammate,
            sets: &t,
        });
    }
    merge_with_found(n, &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::GameStrategyPair;
    use crate::learners::run_learner;
    use crate::oracle::AdversaryPolicy;
    use crate::partition::all_partitions;

    fn cs(blocks: &[&[usize]]) -> CoalitionStructure {
        CoalitionStructure::from_blocks(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let truth = cs(&[&[1, 4], &[2, 3]]);
        let rep = run_learner(&NormalFormLearner, truth.clone(), AdversaryPolicy::First).unwrap();
        assert_eq!(rep.recovered, truth);
        assert!(rep.rounds <= 3);
        assert_eq!(rep.transcript.entries[0].observation.to_bitstring(), "0011");

        let rep = run_learner(&NormalFormLearner, CoalitionStructure::singletons(8), AdversaryPolicy::First).unwrap();
        assert_eq!(rep.rounds, 1);

        let rep = run_learner(&NormalFormLearner, cs(&[&[1, 2]]), AdversaryPolicy::First).unwrap();
        assert_eq!(rep.rounds, 1);
        assert_eq!(rep.recovered, cs(&[&[1, 2]]));

        let rep = run_learner(&NormalFormLearner, CoalitionStructure::singletons(1), AdversaryPolicy::First).unwrap();
        assert_eq!(rep.rounds, 0);
    }

    #[test]
    fn hand_trace_of_four_agents() {
        // After the first query T_3 = {1,2}, T_4 = {1,2,3}; both halve to
        // L = {1}, which holds 4's smallest teammate but not 3's.
        let truth = cs(&[&[1, 4], &[2, 3]]);
        let mut states = Vec::new();
        let mut oracle = HiddenOracle::new(truth, AdversaryPolicy::First);
        NormalFormLearner
            .learn_observed(&mut oracle, &mut |s| {
                if let SearchState::Candidates { sets, .. } = s {
                    states.push(sets.to_vec());
                }
            })
            .unwrap();
        assert_eq!(states[0], vec![vec![], vec![], vec![1, 2], vec![1, 2, 3]]);
        assert_eq!(states.last().unwrap(), &vec![vec![], vec![], vec![2], vec![1]]);
        assert_eq!(oracle.rounds_used(), 2);
    }

    #[test]
    fn congestion_examples() {
        for truth in [cs(&[&[1, 4], &[2, 3]]), CoalitionStructure::singletons(8), cs(&[&[1, 2]])] {
            let a = run_learner(&NormalFormLearner, truth.clone(), AdversaryPolicy::Last).unwrap();
            let b = run_learner(&CongestionLearner, truth.clone(), AdversaryPolicy::Last).unwrap();
            assert_eq!(b.recovered, truth);
            assert_eq!(a.rounds, b.rounds);
        }
        let rep = run_learner(&CongestionLearner, cs(&[&[1, 2, 3, 4]]), AdversaryPolicy::First).unwrap();
        assert_eq!(rep.recovered, cs(&[&[1, 2, 3, 4]]));
        assert!(rep.rounds <= 3);
        match &rep.transcript.entries[0].game {
            GameStrategyPair::Congestion(g) => assert_eq!(g.num_resources(), 18),
            other => panic!("unexpected first query {other:?}"),
        }
    }

    #[test]
    fn smallest_teammate_stays_in_candidates() {
        for n in 1..=6 {
            for truth in all_partitions(n) {
                let mut oracle = HiddenOracle::new(truth.clone(), AdversaryPolicy::First);
                let recovered = NormalFormLearner
                    .learn_observed(&mut oracle, &mut |s| {
                        let SearchState::Candidates { sets, .. } = s else { return };
                        for (j, tj) in (1..).zip(sets.iter()) {
                            if !tj.is_empty() {
                                assert!(tj.contains(&truth.block_of(j)[0]));
                            }
                        }
                    })
                    .unwrap();
                assert_eq!(recovered, truth);
            }
        }
    }
}
