//! Directed prisoner's dilemmas and their products, kept in factored form.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::AgentId;

/// One directed prisoner's dilemma `P(i, j)`.
///
/// The decider `j` chooses between C and D; everyone else only has D. If `j`
/// plays C the beneficiary gains [`Self::BENEFIT`] and `j` pays [`Self::COST`].
/// The specified action is D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct PrisonerDilemmaFactor {
    beneficiary: AgentId,
    decider: AgentId,
}

impl PrisonerDilemmaFactor {
    pub const BENEFIT: f64 = 2.0;
    pub const COST: f64 = 1.0;

    pub fn new(beneficiary: impl Into<AgentId>, decider: impl Into<AgentId>) -> Result<Self> {
        let (beneficiary, decider) = (beneficiary.into(), decider.into());
        if beneficiary == decider {
            return Err(Error::SelfPair(beneficiary.get()));
        }
        Ok(PrisonerDilemmaFactor { beneficiary, decider })
    }

    pub fn beneficiary(&self) -> usize {
        self.beneficiary.get()
    }

    pub fn decider(&self) -> usize {
        self.decider.get()
    }
}

impl TryFrom<[usize; 2]> for PrisonerDilemmaFactor {
    type Error = Error;

    fn try_from([i, j]: [usize; 2]) -> Result<Self> {
        Self::new(i, j)
    }
}

impl From<PrisonerDilemmaFactor> for [usize; 2] {
    fn from(f: PrisonerDilemmaFactor) -> Self {
        [f.beneficiary(), f.decider()]
    }
}

/// A product of directed prisoner's dilemmas on agents `1..=n`.
///
/// Stored as its factor list; agents outside every factor have the single
/// action D and are not represented.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFactored")]
pub struct FactoredNormalFormGame {
    n: usize,
    factors: Vec<PrisonerDilemmaFactor>,
}

#[derive(Deserialize)]
struct RawFactored {
    n: usize,
    factors: Vec<PrisonerDilemmaFactor>,
}

impl TryFrom<RawFactored> for FactoredNormalFormGame {
    type Error = Error;

    fn try_from(raw: RawFactored) -> Result<Self> {
        Self::new(raw.n, raw.factors)
    }
}

impl FactoredNormalFormGame {
    pub fn new(n: usize, factors: Vec<PrisonerDilemmaFactor>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(factors.len());
        for f in &factors {
            AgentId::new(f.beneficiary()).checked(n)?;
            AgentId::new(f.decider()).checked(n)?;
            if !seen.insert(*f) {
                return Err(Error::DuplicateFactor(f.beneficiary(), f.decider()));
            }
        }
        Ok(FactoredNormalFormGame { n, factors })
    }

    /// Builds a product from `(beneficiary, decider)` pairs.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let factors = pairs
            .into_iter()
            .map(|(i, j)| PrisonerDilemmaFactor::new(i, j))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, factors)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[PrisonerDilemmaFactor] {
        &self.factors
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.factors.iter().map(|f| (f.beneficiary(), f.decider()))
    }

    pub fn graphical_view(&self) -> GraphicalGameView {
        GraphicalGameView::of(self.clone())
    }
}

/// The single-factor game `P(i, j)` on `n` agents.
pub fn prisoner_dilemma(n: usize, i: usize, j: usize) -> Result<FactoredNormalFormGame> {
    FactoredNormalFormGame::new(n, vec![PrisonerDilemmaFactor::new(i, j)?])
}

/// Additive product of factored games; the factor lists are concatenated.
pub fn product(n: usize, games: &[FactoredNormalFormGame]) -> Result<FactoredNormalFormGame> {
    let mut factors = Vec::new();
    for g in games {
        if g.n != n {
            return Err(Error::PopulationMismatch {
                expected: n,
                found: g.n,
            });
        }
        factors.extend_from_slice(&g.factors);
    }
    FactoredNormalFormGame::new(n, factors)
}

/// `P(i, j)` for every `i < j`.
pub fn all_pairs_game(n: usize) -> FactoredNormalFormGame {
    let pairs = (1..=n).flat_map(|j| (1..j).map(move |i| (i, j)));
    FactoredNormalFormGame::from_pairs(n, pairs).expect("all pairs are distinct and in range")
}

/// A factored game read as a graphical game: the interaction graph has one
/// undirected edge per factor pair and the degree counts factor occurrences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicalGameView {
    pub underlying: FactoredNormalFormGame,
    pub edge_set: BTreeSet<(usize, usize)>,
    pub max_degree: usize,
}

impl GraphicalGameView {
    pub fn of(game: FactoredNormalFormGame) -> Self {
        let mut occurrences = vec![0usize; game.n + 1];
        let mut edge_set = BTreeSet::new();
        for (i, j) in game.pairs() {
            occurrences[i] += 1;
            occurrences[j] += 1;
            edge_set.insert((i.min(j), i.max(j)));
        }
        GraphicalGameView {
            max_degree: occurrences.into_iter().max().unwrap_or(0),
            edge_set,
            underlying: game,
        }
    }

    /// Number of factors mentioning agent `i`.
    pub fn degree_of(&self, i: usize) -> usize {
        self.underlying
            .pairs()
            .filter(|&(a, b)| a == i || b == i)
            .count()
    }
}
