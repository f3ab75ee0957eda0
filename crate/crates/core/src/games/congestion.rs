//! Congestion games and the directed Braess gadget.
//!
//! Strategy spaces are stored in product form: an agent picks one option from
//! each of its components and plays the union of the chosen resource sets.
//! This is exactly the shape that a product of congestion games on disjoint
//! resource sets produces, without expanding the Cartesian product.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::AgentId;

pub type ResourceId = usize;

/// Cost of a resource as a function of its load.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CostFunction {
    /// `c(x) = slope * x`
    Linear { slope: f64 },
    Constant { value: f64 },
}

impl CostFunction {
    pub fn eval(&self, load: usize) -> f64 {
        match *self {
            CostFunction::Linear { slope } => slope * load as f64,
            CostFunction::Constant { value } => value,
        }
    }
}

/// One independent choice an agent makes: pick one of the resource sets.
pub type Component = Vec<Vec<ResourceId>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongestionGame {
    n: usize,
    /// Cost function per resource; resource ids index this vector.
    costs: Vec<CostFunction>,
    /// `strategy_spaces[i - 1]` lists agent i's components. No components means
    /// the single empty strategy.
    strategy_spaces: Vec<Vec<Component>>,
    /// Chosen option per component for each agent.
    specified: Vec<Vec<usize>>,
    /// Gadget factors this game was assembled from, when built by
    /// [`braess_product`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gadgets: Option<Vec<BraessFactor>>,
}

impl CongestionGame {
    pub fn new(
        n: usize,
        costs: Vec<CostFunction>,
        strategy_spaces: Vec<Vec<Component>>,
        specified: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let g = CongestionGame {
            n,
            costs,
            strategy_spaces,
            specified,
            gadgets: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// Checks every structural invariant of the game.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidCongestionGame(m));
        if self.strategy_spaces.len() != self.n || self.specified.len() != self.n {
            return bad(format!(
                "{} strategy spaces and {} specified strategies for {} agents",
                self.strategy_spaces.len(),
                self.specified.len(),
                self.n
            ));
        }
        // Per resource: the option that last touched it, and the (agent,
        // component) that owns it within the current agent.
        let mut option_stamp = vec![usize::MAX; self.costs.len()];
        let mut owner = vec![(usize::MAX, usize::MAX); self.costs.len()];
        let mut stamp = 0;
        for (idx, (space, chosen)) in self.strategy_spaces.iter().zip(&self.specified).enumerate() {
            let agent = idx + 1;
            if space.len() != chosen.len() {
                return bad(format!("agent {agent}: specified strategy has wrong arity"));
            }
            for (k, (component, &pick)) in space.iter().zip(chosen).enumerate() {
                if component.is_empty() {
                    return bad(format!("agent {agent}: component {k} has no options"));
                }
                if pick >= component.len() {
                    return bad(format!("agent {agent}: specified option {pick} outside component {k}"));
                }
                for option in component {
                    stamp += 1;
                    for &r in option {
                        if r >= self.costs.len() {
                            return bad(format!("agent {agent}: unknown resource {r}"));
                        }
                        if option_stamp[r] == stamp {
                            return bad(format!("agent {agent}: resource {r} repeated in one option"));
                        }
                        option_stamp[r] = stamp;
                        let (a, c) = owner[r];
                        if a == agent && c != k {
                            return bad(format!("agent {agent}: components share resources"));
                        }
                        owner[r] = (agent, k);
                    }
                }
            }
        }
        if let Some(gadgets) = &self.gadgets {
            if gadgets.len() * 3 != self.costs.len() {
                return bad("gadget list does not match resource count".into());
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_resources(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[CostFunction] {
        &self.costs
    }

    /// Components of agent `i` (1-based).
    pub fn components(&self, i: usize) -> &[Component] {
        &self.strategy_spaces[i - 1]
    }

    pub fn specified(&self) -> &[Vec<usize>] {
        &self.specified
    }

    pub fn gadgets(&self) -> Option<&[BraessFactor]> {
        self.gadgets.as_deref()
    }

    /// Total number of pure strategies of agent `i`, saturating.
    pub fn strategy_count(&self, i: usize) -> u128 {
        self.components(i)
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
    }

    /// The resource set agent `i` uses under the given per-component picks.
    pub fn resources_used(&self, i: usize, picks: &[usize]) -> Vec<ResourceId> {
        self.components(i)
            .iter()
            .zip(picks)
            .flat_map(|(c, &p)| c[p].iter().copied())
            .collect()
    }

    /// Loads on every resource under a full profile of per-agent picks.
    pub fn loads(&self, profile: &[Vec<usize>]) -> Vec<usize> {
        let mut load = vec![0; self.costs.len()];
        for i in 1..=self.n {
            for r in self.resources_used(i, &profile[i - 1]) {
                load[r] += 1;
            }
        }
        load
    }

    /// Cost paid by agent `i` (the negative of its utility).
    pub fn cost_of(&self, i: usize, profile: &[Vec<usize>], loads: &[usize]) -> f64 {
        self.resources_used(i, &profile[i - 1])
            .into_iter()
            .map(|r| self.costs[r].eval(loads[r]))
            .sum()
    }

    /// Summed cost of a set of agents under a full profile.
    pub fn joint_cost(&self, agents: &[usize], profile: &[Vec<usize>]) -> f64 {
        let loads = self.loads(profile);
        agents.iter().map(|&i| self.cost_of(i, profile, &loads)).sum()
    }
}

/// One directed Braess gadget `B(i, j)`.
///
/// Resources `r1, r2, r3` cost `x`, `2.5` and `0`. The beneficiary `i` must
/// use `{r1}`; the decider `j` chooses `{r2}` or `{r1, r3}` and is specified
/// to play `{r1, r3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct BraessFactor {
    beneficiary: AgentId,
    decider: AgentId,
}

impl BraessFactor {
    pub const DETOUR_COST: f64 = 2.5;

    pub fn new(beneficiary: impl Into<AgentId>, decider: impl Into<AgentId>) -> Result<Self> {
        let (beneficiary, decider) = (beneficiary.into(), decider.into());
        if beneficiary == decider {
            return Err(Error::SelfPair(beneficiary.get()));
        }
        Ok(BraessFactor { beneficiary, decider })
    }

    pub fn beneficiary(&self) -> usize {
        self.beneficiary.get()
    }

    pub fn decider(&self) -> usize {
        self.decider.get()
    }
}

impl TryFrom<[usize; 2]> for BraessFactor {
    type Error = Error;

    fn try_from([i, j]: [usize; 2]) -> Result<Self> {
        Self::new(i, j)
    }
}

impl From<BraessFactor> for [usize; 2] {
    fn from(f: BraessFactor) -> Self {
        [f.beneficiary(), f.decider()]
    }
}

/// Index of the decider's `{r2}` and `{r1, r3}` options in its component.
pub const BRAESS_DETOUR: usize = 0;
pub const BRAESS_SHARED: usize = 1;

/// The product of Braess gadgets as a single congestion game whose resource
/// set is the disjoint union of the gadgets' resources.
pub fn braess_product(n: usize, factors: &[BraessFactor]) -> Result<CongestionGame> {
    let mut seen = HashSet::with_capacity(factors.len());
    let mut costs = Vec::with_capacity(3 * factors.len());
    let mut spaces: Vec<Vec<Component>> = vec![Vec::new(); n];
    let mut specified: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, f) in factors.iter().enumerate() {
        let (i, j) = (f.beneficiary(), f.decider());
        AgentId::new(i).checked(n)?;
        AgentId::new(j).checked(n)?;
        if !seen.insert(*f) {
            return Err(Error::DuplicateFactor(i, j));
        }
        let (r1, r2, r3) = (3 * x, 3 * x + 1, 3 * x + 2);
        costs.push(CostFunction::Linear { slope: 1.0 });
        costs.push(CostFunction::Constant {
            value: BraessFactor::DETOUR_COST,
        });
        costs.push(CostFunction::Constant { value: 0.0 });
        spaces[i - 1].push(vec![vec![r1]]);
        specified[i - 1].push(0);
        let mut options = vec![Vec::new(); 2];
        options[BRAESS_DETOUR] = vec![r2];
        options[BRAESS_SHARED] = vec![r1, r3];
        spaces[j - 1].push(options);
        specified[j - 1].push(BRAESS_SHARED);
    }
    let mut g = CongestionGame::new(n, costs, spaces, specified)?;
    g.gadgets = Some(factors.to_vec());
    g.validate()?;
    Ok(g)
}

/// The single gadget `B(i, j)` on `n` agents.
pub fn braess(n: usize, i: usize, j: usize) -> Result<CongestionGame> {
    braess_product(n, &[BraessFactor::new(i, j)?])
}
