//! Block decomposition plus simultaneous binary search for each agent's
//! predecessor, keeping every query within a degree limit.

use super::{ask_pairs, merge_with_found, Learner, PairGame, SearchState, SearchTarget};
use crate::bounds::{check_degree, Family};
use crate::error::{Error, Result};
use crate::oracle::HiddenOracle;
use crate::partition::CoalitionStructure;

#[derive(Clone, Copy, Debug)]
pub struct GraphicalLearner {
    d: usize,
}

impl GraphicalLearner {
    /// `d` must be even and at least 2; the upper limit is checked per run.
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 || !d.is_multiple_of(2) {
            return Err(Error::InvalidDegree { d, n: d });
        }
        Ok(GraphicalLearner { d })
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// Agents are grouped into consecutive blocks of `size`; `belong(j)` is the
/// 0-based block of agent `j`.
#[derive(Clone, Copy, Debug)]
struct Blocks {
    size: usize,
    cnt: usize,
}

impl Blocks {
    fn new(n: usize, d: usize) -> Self {
        let size = d / 2;
        Blocks {
            size,
            cnt: n.div_ceil(size),
        }
    }

    fn belong(&self, j: usize) -> usize {
        (j - 1) / self.size
    }

    /// Pairs `(i, j)` with `i < j` whose blocks are `delta` apart.
    fn sweep_pairs(&self, n: usize, delta: usize) -> Vec<(usize, usize)> {
        (1..=n)
            .flat_map(|j| {
                (1..j)
                    .filter(move |&i| self.belong(j) - self.belong(i) == delta)
                    .map(move |i| (i, j))
            })
            .collect()
    }
}

impl Learner for GraphicalLearner {
    fn family(&self) -> Family {
        Family::Graphical
    }

    fn degree(&self) -> Option<usize> {
        Some(self.d)
    }

    fn learn_observed(
        &self,
        oracle: &mut HiddenOracle,
        probe: &mut dyn FnMut(&SearchState<'_>),
    ) -> Result<CoalitionStructure> {
        let n = oracle.n();
        check_degree(n, self.d)?;
        let blocks = Blocks::new(n, self.d);

        // delta[j - 1] is the block distance to j's predecessor, if any.
        let mut delta: Vec<Option<usize>> = vec![None; n];
        for dist in 0..blocks.cnt {
            let o = ask_pairs(oracle, PairGame::Graphical, &blocks.sweep_pairs(n, dist))?;
            for j in 1..=n {
                if o.deviates(j) && delta[j - 1].is_none() {
                    delta[j - 1] = Some(dist);
                }
            }
        }
        let mut t: Vec<Vec<usize>> = (1..=n)
            .map(|j| match delta[j - 1] {
                Some(dist) => (1..j).filter(|&i| blocks.belong(j) - blocks.belong(i) == dist).collect(),
                None => Vec::new(),
            })
            .collect();
        probe(&SearchState::Candidates {
            target: SearchTarget::Predecessor,
            sets: &t,
        });

        let in_block = |j: usize| delta[j - 1] == Some(0);
        let across = |j: usize| matches!(delta[j - 1], Some(dist) if dist >= 1);
        binary_search_upper(oracle, &mut t, &in_block, probe)?;
        binary_search_upper(oracle, &mut t, &across, probe)?;
        merge_with_found(n, &t)
    }
}

/// Halves `T_j` for every agent in the group, querying the upper half and
/// keeping it on a deviation.
fn binary_search_upper(
    oracle: &mut HiddenOracle,
    t: &mut [Vec<usize>],
    group: &dyn Fn(usize) -> bool,
    probe: &mut dyn FnMut(&SearchState<'_>),
) -> Result<()> {
    let n = t.len();
    let members: Vec<usize> = (1..=n).filter(|&j| group(j)).collect();
    while members.iter().any(|&j| t[j - 1].len() >= 2) {
        let half: Vec<usize> = members.iter().map(|&j| t[j - 1].len() / 2).collect();
        let pairs: Vec<(usize, usize)> = members
            .iter()
            .zip(&half)
            .flat_map(|(&j, &h)| t[j - 1][h..].iter().map(move |&i| (i, j)))
            .collect();
        let o = ask_pairs(oracle, PairGame::Graphical, &pairs)?;
        for (&j, &h) in members.iter().zip(&half) {
            let tj = &mut t[j - 1];
            if o.deviates(j) {
                tj.drain(..h);
            } else {
                tj.truncate(h);
            }
        }
        probe(&SearchState::Candidates {
            target: SearchTarget::Predecessor,
            sets: t,
        });
    }
    Ok(())
}
