//! Learners restricted to second-price auctions with personalized reserves.

use std::collections::BTreeSet;

use super::{Learner, SearchState};
use crate::bounds::{floor_log2, Family};
use crate::error::{Error, Result};
use crate::games::{auction_gadget, first_move_game, GameStrategyPair};
use crate::oracle::HiddenOracle;
use crate::partition::CoalitionStructure;

/// Matches one head agent at a time against everyone still unsettled.
#[derive(Clone, Copy, Debug, Default)]
pub struct AuctionIterativeLearner;

/// Reads the index of each agent's coalition representative bit by bit.
#[derive(Clone, Copy, Debug, Default)]
pub struct AuctionBitwiseLearner;

fn gadget_query(
    oracle: &mut HiddenOracle,
    x: &BTreeSet<usize>,
    y: &BTreeSet<usize>,
) -> Result<BTreeSet<usize>> {
    let n = oracle.n();
    let z: BTreeSet<usize> = (1..=n).filter(|k| !x.contains(k) && !y.contains(k)).collect();
    let game = auction_gadget(n, x, y, &z)?;
    Ok(oracle.observe(GameStrategyPair::Auction(game))?.deviators().into_iter().collect())
}

impl Learner for AuctionIterativeLearner {
    fn family(&self) -> Family {
        Family::AuctionIterative
    }

    fn learn_observed(
        &self,
        oracle: &mut HiddenOracle,
        probe: &mut dyn FnMut(&SearchState<'_>),
    ) -> Result<CoalitionStructure> {
        let n = oracle.n();
        let mut remaining: BTreeSet<usize> = (1..=n).collect();
        let mut labels: Vec<usize> = (0..n).collect();
        while remaining.len() >= 2 {
            let head = *remaining.first().expect("at least two agents remain");
            while remaining.len() >= 2 && remaining.contains(&head) {
                let snapshot: Vec<usize> = remaining.iter().copied().collect();
                probe(&SearchState::Iterative {
                    remaining: &snapshot,
                    head,
                });
                let x = BTreeSet::from([head]);
                let mut y = remaining.clone();
                y.remove(&head);
                let found = gadget_query(oracle, &x, &y)?;
                match found.first() {
                    Some(&j) => {
                        if !y.contains(&j) {
                            return Err(Error::InconsistentObservations(format!(
                                "agent {j} deviated outside Y"
                            )));
                        }
                        labels[j - 1] = labels[head - 1];
                        remaining.remove(&j);
                    }
                    None => {
                        remaining.remove(&head);
                    }
                }
            }
        }
        Ok(CoalitionStructure::from_labels(&labels))
    }
}

impl Learner for AuctionBitwiseLearner {
    fn family(&self) -> Family {
        Family::AuctionBitwise
    }

    fn learn_observed(
        &self,
        oracle: &mut HiddenOracle,
        probe: &mut dyn FnMut(&SearchState<'_>),
    ) -> Result<CoalitionStructure> {
        let n = oracle.n();
        // One representative per coalition deviates.
        let first = oracle.observe(GameStrategyPair::Auction(first_move_game(n)?))?;
        let t_x: BTreeSet<usize> = first.deviators().into_iter().collect();
        let t_y: BTreeSet<usize> = (1..=n).filter(|i| !t_x.contains(i)).collect();
        let t_x_list: Vec<usize> = t_x.iter().copied().collect();
        let t_y_list: Vec<usize> = t_y.iter().copied().collect();

        // alpha[i - 1] accumulates the representative index of agent i.
        let mut alpha = vec![0usize; n];
        for b in 0..=floor_log2(n) as u32 {
            let x: BTreeSet<usize> = t_x.iter().copied().filter(|&i| (i >> b) & 1 == 1).collect();
            let mut t_false = t_y.clone();
            loop {
                let found = gadget_query(oracle, &x, &t_false)?;
                let t_true: BTreeSet<usize> = t_false.intersection(&found).copied().collect();
                if t_true.is_empty() {
                    break;
                }
                t_false.retain(|i| !t_true.contains(i));
            }
            for &i in &t_y {
                if !t_false.contains(&i) {
                    alpha[i - 1] |= 1 << b;
                }
            }
            let t_false_list: Vec<usize> = t_false.iter().copied().collect();
            probe(&SearchState::BitRead {
                bit: b,
                t_x: &t_x_list,
                t_y: &t_y_list,
                t_false: &t_false_list,
            });
        }

        let pairs: Vec<(usize, usize)> = t_y.iter().map(|&i| (i, alpha[i - 1])).collect();
        probe(&SearchState::Reconstructed { pairs: &pairs });
        let mut labels: Vec<usize> = (0..n).collect();
        for &(i, j) in &pairs {
            if !t_x.contains(&j) {
                return Err(Error::InconsistentObservations(format!(
                    "agent {i} decoded representative {j}, which is not a representative"
                )));
            }
            labels[i - 1] = labels[j - 1];
        }
        Ok(CoalitionStructure::from_labels(&labels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::run_learner;
    use crate::oracle::AdversaryPolicy;
    use crate::partition::all_partitions;

    fn cs(blocks: &[&[usize]]) -> CoalitionStructure {
        CoalitionStructure::from_blocks(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn iterative_examples() {
        let rep = run_learner(&AuctionIterativeLearner, CoalitionStructure::singletons(4), AdversaryPolicy::First)
            .unwrap();
        assert_eq!(rep.rounds, 3);
        assert!(rep.transcript.entries.iter().all(|e| e.observation.deviators().is_empty()));

        for policy in [AdversaryPolicy::First, AdversaryPolicy::Last] {
            let rep = run_learner(&AuctionIterativeLearner, cs(&[&[1, 2, 3]]), policy).unwrap();
            assert_eq!(rep.rounds, 2);
            assert_eq!(rep.recovered, cs(&[&[1, 2, 3]]));
        }

        let rep = run_learner(&AuctionIterativeLearner, CoalitionStructure::singletons(1), AdversaryPolicy::First)
            .unwrap();
        assert_eq!(rep.rounds, 0);
    }

    #[test]
    fn iterative_which_teammate_is_found_first_depends_on_policy() {
        let truth = cs(&[&[1, 2, 3]]);
        let first = run_learner(&AuctionIterativeLearner, truth.clone(), AdversaryPolicy::First).unwrap();
        let last = run_learner(&AuctionIterativeLearner, truth, AdversaryPolicy::Last).unwrap();
        assert_eq!(first.transcript.entries[0].observation.deviators(), vec![2]);
        assert_eq!(last.transcript.entries[0].observation.deviators(), vec![3]);
    }

    #[test]
    fn bitwise_examples() {
        let truth = cs(&[&[1, 4], &[2, 3], &[5, 6]]);
        for policy in AdversaryPolicy::sweep(8) {
            let rep = run_learner(&AuctionBitwiseLearner, truth.clone(), policy).unwrap();
            assert_eq!(rep.recovered, truth);
            assert!(rep.rounds as u64 <= rep.budget);
        }

        let rep = run_learner(&AuctionBitwiseLearner, CoalitionStructure::singletons(8), AdversaryPolicy::First)
            .unwrap();
        assert_eq!(rep.transcript.entries[0].observation.deviators().len(), 8);
        assert_eq!(rep.rounds, 5);
        assert!(rep.rounds <= 9);

        for policy in [AdversaryPolicy::First, AdversaryPolicy::Last] {
            let rep = run_learner(&AuctionBitwiseLearner, cs(&[&[1, 2]]), policy).unwrap();
            assert_eq!(rep.recovered, cs(&[&[1, 2]]));
        }
    }

    #[test]
    fn bitwise_reconstructs_representatives() {
        for n in 1..=6 {
            for truth in all_partitions(n) {
                for policy in AdversaryPolicy::sweep(2) {
                    let mut oracle = HiddenOracle::new(truth.clone(), policy);
                    let mut reps = None;
                    let mut decoded = Vec::new();
                    AuctionBitwiseLearner
                        .learn_observed(&mut oracle, &mut |s| match s {
                            SearchState::BitRead { t_x, .. } => reps = Some(t_x.to_vec()),
                            SearchState::Reconstructed { pairs } => decoded = pairs.to_vec(),
                            _ => {}
                        })
                        .unwrap();
                    let reps = reps.unwrap();
                    for (i, j) in decoded {
                        let expected = truth.block_of(i).iter().copied().find(|k| reps.contains(k));
                        assert_eq!(Some(j), expected);
                    }
                }
            }
        }
    }
}
